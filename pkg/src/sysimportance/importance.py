"""Regression importance index ``R_k^2 = Var(m_k(X_k)) / Var(T)``.

Two estimators are provided.  The exact route integrates the conditional
moments against the density of ``X_k``; the Monte Carlo route simulates
component lifetimes once per replication and uses the same draws for both
``Var(T)`` and ``Var(m_k(X_k))`` (unbiased ``N - 1`` denominators, so the
ratio keeps its small-sample bias).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .conditional import OUTER_EPS, SystemModel, conditional_moments, regression_curve
from .quadrature import integrate
from .sampling import simulate

DEFAULT_TOLERANCE = 1e-9


class DegenerateSampleError(ValueError):
    """Sample variance of the system lifetime is zero."""


@dataclass(frozen=True)
class ComponentImportance:
    k: int
    r2: float
    var_m: float
    residual: float
    mean_m: float = float("nan")

    @property
    def r2_from_residual(self) -> float:
        total = self.var_m + self.residual
        return 1.0 - self.residual / total if total > 0 else float("nan")


@dataclass
class ImportanceReport:
    components: list[ComponentImportance]
    mean_t: float
    var_t: float
    method: str
    n: int | None = None
    seed: int | None = None
    repetitions: int = 1
    tolerance: float | None = None
    extra: dict = field(default_factory=dict)

    def __getitem__(self, k: int) -> ComponentImportance:
        for c in self.components:
            if c.k == k:
                return c
        raise KeyError(k)

    def ranked(self) -> list[ComponentImportance]:
        return sorted(self.components, key=lambda c: (-c.r2, c.k))

    def table(self) -> str:
        lines = [
            f"method={self.method}  E(T)={self.mean_t:.6f}  Var(T)={self.var_t:.6f}",
            f"{'rank':>4}  {'k':>3}  {'R^2':>10}  {'Var(m_k)':>12}  {'E(e_k)':>12}",
        ]
        for r, c in enumerate(self.ranked(), 1):
            lines.append(f"{r:>4}  {c.k:>3}  {c.r2:>10.6f}  {c.var_m:>12.6g}  {c.residual:>12.6g}")
        return "\n".join(lines)


@lru_cache(maxsize=64)
def _moments(model: SystemModel, tolerance: float):
    def f(t, idx):
        s = model.system_survival(t)
        return np.column_stack([s, 2.0 * t * s])

    ends = sorted({0.0, model.t_max, *(d.support[1] for d in model.marginals if np.isfinite(d.support[1]))})
    vals, _ = integrate(f, ends[:-1], ends[1:], atol=tolerance, rtol=tolerance * 1e-2)
    mean, second = vals.sum(axis=0)
    return float(mean), float(second - mean * mean)


def system_moments(model: SystemModel, tolerance: float = DEFAULT_TOLERANCE):
    """``(E(T), Var(T))`` from ``E(T) = int Fbar_T`` and ``E(T^2) = 2 int t Fbar_T``."""
    return _moments(model, float(tolerance))


@lru_cache(maxsize=256)
def _exact_row(model: SystemModel, k: int, tolerance: float):
    mean_t, var_t = system_moments(model, tolerance)
    d = model.marginals[k - 1]
    hi = d.upper(OUTER_EPS)

    def f(x, idx):
        m, s2 = conditional_moments(model, k, x)
        w = d.density(x)
        return np.column_stack([w * m, w * (m - mean_t) ** 2, w * (s2 - m * m)])

    ends = sorted({0.0, hi, *(e.support[1] for e in model.marginals if 0 < e.support[1] < hi)})
    vals, _ = integrate(f, ends[:-1], ends[1:], atol=tolerance * 1e-2, rtol=tolerance * 1e-2)
    mean_m, var_m, residual = vals.sum(axis=0)
    return ComponentImportance(k, float(var_m / var_t), float(var_m), float(residual), float(mean_m))


def r_squared_exact(model: SystemModel, k: int, tolerance: float = DEFAULT_TOLERANCE) -> ComponentImportance:
    """Exact index for component ``k`` by nested adaptive quadrature."""
    if not 1 <= k <= model.n:
        raise ValueError(f"component {k} out of range 1..{model.n}")
    return _exact_row(model, int(k), float(tolerance))


def importance_exact(model: SystemModel, components=None, tolerance: float = DEFAULT_TOLERANCE) -> ImportanceReport:
    mean_t, var_t = system_moments(model, tolerance)
    ks = components or range(1, model.n + 1)
    rows = [r_squared_exact(model, k, tolerance) for k in ks]
    return ImportanceReport(rows, mean_t, var_t, "exact", tolerance=tolerance)


@lru_cache(maxsize=64)
def tabulated_curve(model: SystemModel, k: int):
    """Interpolated ``m_k`` on the default 512-point grid (exact outside it)."""
    return regression_curve(model, k).interpolator()


def _mc_rows(model, x, t, ks, curves):
    var_t = float(np.var(t, ddof=1))
    if not var_t > 0:
        raise DegenerateSampleError("sample variance of T is zero")
    rows = []
    for k in ks:
        curve = (curves or {}).get(k) or tabulated_curve(model, k)
        m = np.asarray(curve(x[:, k - 1]), dtype=float)
        var_m = float(np.var(m, ddof=1))
        rows.append(ComponentImportance(k, float(var_m / var_t), var_m, float(np.mean((t - m) ** 2)), float(m.mean())))
    return rows, float(t.mean()), var_t


def importance_mc(model: SystemModel, n: int, seed: int, *, curves=None, components=None,
                  rep: int = 0, threads: int = 1) -> ImportanceReport:
    """Monte Carlo estimate of every index from one shared sample of size ``n``.

    ``curves`` optionally maps component numbers to closed-form ``m_k``.
    """
    if n < 2:
        raise ValueError("need at least two draws")
    x, t = simulate(model, n, seed, rep=rep, threads=threads)
    ks = list(components or range(1, model.n + 1))
    rows, mean_t, var_t = _mc_rows(model, x, t, ks, curves)
    return ImportanceReport(rows, mean_t, var_t, "mc", n=n, seed=seed)


def r_squared_mc(model: SystemModel, k: int, n: int, seed: int, *, curve=None,
                 rep: int = 0, threads: int = 1) -> ComponentImportance:
    curves = {k: curve} if curve is not None else None
    return importance_mc(model, n, seed, curves=curves, components=[k], rep=rep, threads=threads)[k]


@dataclass(frozen=True)
class ErrorStudy:
    """Dispersion of ``E_k = R_k^2 - Rhat_k^2`` over independent replications."""

    k: int
    n: int
    exact: float
    errors: np.ndarray

    @property
    def mean(self) -> float:
        return float(np.mean(self.errors))

    @property
    def sd(self) -> float:
        return float(np.std(self.errors, ddof=1)) if self.errors.size > 1 else 0.0

    @property
    def quartiles(self) -> tuple[float, float, float]:
        q = np.quantile(self.errors, [0.25, 0.5, 0.75])
        return float(q[0]), float(q[1]), float(q[2])

    @property
    def median_abs(self) -> float:
        return float(np.median(np.abs(self.errors)))


def error_study(model: SystemModel, k: int, n: int, repetitions: int, seed: int, *,
                curve=None, exact: float | None = None, threads: int = 1) -> ErrorStudy:
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if exact is None:
        exact = r_squared_exact(model, k).r2
    curve = curve or tabulated_curve(model, k)
    est = np.array([
        r_squared_mc(model, k, n, seed, curve=curve, rep=r, threads=threads).r2
        for r in range(repetitions)
    ])
    return ErrorStudy(k, n, float(exact), exact - est)
