"""Conditional law of the system lifetime given one component's failure time.

``Pr(X_P > t | X_i = x)`` comes from the partial derivative of the survival
copula (zero for ``t >= x`` when ``i`` is in ``P``); the system-level
conditional survival follows by inclusion-exclusion over unions of minimal
path sets.  Regression and error curves integrate that conditional survival
in ``t``, with the domain split at the jump ``t = x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator

from .copulas import CopulaModel, Product
from .marginals import MarginalDistribution
from .quadrature import integrate
from .structure import SystemStructure

TAIL_EPS = 1e-10
OUTER_EPS = 1e-14
INNER_ATOL = 1e-12
INNER_RTOL = 1e-13
GRID_POINTS = 512
GRID_PROBS = (1e-4, 1.0 - 1e-4)


class DomainError(ValueError):
    """Conditioning value where the component density vanishes."""


@dataclass(frozen=True)
class SystemModel:
    structure: SystemStructure
    marginals: tuple[MarginalDistribution, ...]
    copula: CopulaModel
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "marginals", tuple(self.marginals))
        self.structure.check()
        n = self.structure.n
        problems = []
        if len(self.marginals) != n:
            problems.append(f"{len(self.marginals)} marginals for {n} components")
        if self.copula.dim != n:
            problems.append(f"copula dimension {self.copula.dim} != {n} components")
        for j, d in enumerate(self.marginals, 1):
            if d.support[0] != 0:
                problems.append(f"component {j} support must start at 0, got {d.support[0]}")
        if problems:
            raise ValueError("; ".join(problems))

    @property
    def n(self) -> int:
        return self.structure.n

    @cached_property
    def t_max(self) -> float:
        """Upper truncation point for every t-integral."""
        return max(d.upper(TAIL_EPS) for d in self.marginals)

    @property
    def bounded(self) -> bool:
        return any(np.isfinite(d.support[1]) for d in self.marginals)

    def survivals(self, t):
        """Component reliabilities at ``t``; shape ``t.shape + (n,)``."""
        t = np.asarray(t, dtype=float)
        return np.stack([d.survival(t) for d in self.marginals], axis=-1)

    def system_survival(self, t):
        """``Pr(T > t)`` via the distortion of component reliabilities."""
        u = self.survivals(t)
        out = np.zeros(u.shape[:-1])
        for union, coef in self.structure.union_terms:
            out = out + coef * self.copula._cdf(_masked(u, union))
        return out


def _masked(u, keep):
    u = u.copy()
    drop = [j for j in range(u.shape[-1]) if j + 1 not in keep]
    u[..., drop] = 1.0
    return u


def _check_density(model, k, x):
    x = np.asarray(x, dtype=float)
    f = model.marginals[k - 1].density(x)
    bad = ~(np.asarray(f) > 0)
    if np.any(bad):
        where = np.asarray(x)[bad] if np.ndim(x) else x
        raise DomainError(
            f"component {k} density is zero at x={np.ravel(where)[:5]}; "
            "conditioning requires f_k(x) > 0"
        )


def _check_component(model, k):
    if not 1 <= k <= model.n:
        raise ValueError(f"component {k} out of range 1..{model.n}")


def _series_term(model, P, i, x, t, u_t=None):
    """Raw ``Pr(X_P > t | X_i = x)`` on broadcast arrays, no density check."""
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    if P == {i}:
        return (t < x).astype(float)
    u = model.survivals(t) if u_t is None else u_t
    u = _masked(u, P | {i})
    u[..., i - 1] = model.marginals[i - 1].survival(x)
    val = model.copula._partial(i - 1, u)
    if i in P:
        val = np.where(t < x, val, 0.0)
    return val


def series_conditional_survival(model: SystemModel, P, i: int, x, t):
    """``Pr(min_{j in P} X_j > t | X_i = x)``."""
    P = frozenset(P)
    if not P or not all(1 <= j <= model.n for j in P):
        raise ValueError(f"invalid index set {sorted(P)}")
    _check_component(model, i)
    _check_density(model, i, x)
    out = _series_term(model, P, i, x, t)
    return float(out) if out.ndim == 0 else out


def _system_term(model, k, x, t):
    x, t = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(t, dtype=float))
    u_t = model.survivals(t)
    out = np.zeros(t.shape)
    for union, coef in model.structure.union_terms:
        out = out + coef * _series_term(model, union, k, x, t, u_t)
    return out


def system_conditional_survival(model: SystemModel, k: int, x, t, *, clip: bool = False):
    """``Pr(T > t | X_k = x)`` by inclusion-exclusion.

    The raw alternating sum can leave [0, 1] by rounding; ``clip=True`` is for
    display only.
    """
    _check_component(model, k)
    _check_density(model, k, x)
    out = _system_term(model, k, x, t)
    if clip:
        out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def _breakpoints(model, k, x):
    """Per-``x`` split points of the t-domain, shape ``(M, B)`` sorted.

    The conditional survival has a jump at ``t = x``, kinks where a bounded
    marginal reaches its upper end, and (under strong dependence) sharp
    transitions near the matched-survival points ``Fbar_j^{-1}(Fbar_k(x))``.
    """
    tmax = model.t_max
    u = np.clip(model.marginals[k - 1].survival(x), np.finfo(float).tiny, 1.0)
    cols = [np.zeros_like(x), x, np.maximum(x, tmax)]
    for j, d in enumerate(model.marginals, 1):
        if np.isfinite(d.support[1]):
            cols.append(np.full_like(x, d.support[1]))
        if j != k:
            cols.append(np.asarray(d.isf(u), dtype=float))
    pts = np.column_stack(cols)
    return np.sort(np.clip(pts, 0.0, np.maximum(x, tmax)[:, None]), axis=1)


def conditional_moments(model: SystemModel, k: int, x, *, atol=INNER_ATOL, rtol=INNER_RTOL):
    """``(E[T | X_k = x], E[T^2 | X_k = x])`` for an array of ``x``."""
    _check_component(model, k)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    _check_density(model, k, x)
    M = x.size
    tmax = model.t_max
    pts = _breakpoints(model, k, x)
    a = pts[:, :-1].ravel()
    b = pts[:, 1:].ravel()
    owner = np.repeat(np.arange(M), pts.shape[1] - 1)

    def f(t, idx):
        s = _system_term(model, k, x[owner[idx]], t)
        return np.column_stack([s, 2.0 * t * s])

    vals, _ = integrate(f, a, b, atol=atol * max(tmax, 1.0), rtol=rtol)
    total = np.zeros((M, 2))
    np.add.at(total, owner, vals)
    return total[:, 0], total[:, 1]


class _Curve:
    """Curve in the conditioning value ``x`` for component ``k``."""

    def __init__(self, model: SystemModel, k: int):
        _check_component(model, k)
        self.model = model
        self.k = k
        self._table = None

    def _from_moments(self, m, s2):
        raise NotImplementedError

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        m, s2 = conditional_moments(self.model, self.k, x.ravel())
        out = self._from_moments(m, s2).reshape(x.shape)
        return float(out) if out.ndim == 0 else out

    def default_grid(self, points: int = GRID_POINTS):
        d = self.model.marginals[self.k - 1]
        lo, hi = d.quantile(np.array(GRID_PROBS))
        return np.linspace(lo, hi, points)

    def tabulate(self, grid=None, points: int = GRID_POINTS):
        if grid is None:
            if self._table is not None and len(self._table[0]) == points:
                return self._table
            grid = self.default_grid(points)
            self._table = (grid, self(grid))
            return self._table
        grid = np.asarray(grid, dtype=float)
        return grid, self(grid)

    def interpolator(self, points: int = GRID_POINTS):
        """Fast evaluator: interpolate on the tabulation, exact outside it.

        Monotone cubic (PCHIP) when the copula is declared CI, linear otherwise.
        """
        grid, vals = self.tabulate(points=points)
        smooth = PchipInterpolator(grid, vals) if self.model.copula.ci else None

        def evaluate(x):
            x = np.asarray(x, dtype=float)
            out = np.empty_like(x)
            inside = (x >= grid[0]) & (x <= grid[-1])
            out[inside] = smooth(x[inside]) if smooth is not None else np.interp(x[inside], grid, vals)
            if np.any(~inside):
                out[~inside] = self(x[~inside])
            return out

        return evaluate


class RegressionCurve(_Curve):
    """``m_k(x) = E[T | X_k = x]``."""

    def _from_moments(self, m, s2):
        return m


class ErrorCurve(_Curve):
    """``e_k(x) = Var[T | X_k = x]``."""

    def _from_moments(self, m, s2):
        return s2 - m * m


def regression_curve(model: SystemModel, k: int) -> RegressionCurve:
    return RegressionCurve(model, k)


def error_curve(model: SystemModel, k: int) -> ErrorCurve:
    return ErrorCurve(model, k)


def independent(model: SystemModel) -> SystemModel:
    """Same structure and marginals with the product copula."""
    return SystemModel(model.structure, model.marginals, Product(model.n), model.name)
