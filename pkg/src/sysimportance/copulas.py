"""Survival copula families: product, FGM and Clayton.

The dependence input of a system model is the *survival* copula, so the
joint reliability is ``Pr(X > x) = C_hat(Fbar_1(x_1), ..., Fbar_n(x_n))``.
Product and FGM are radially symmetric, so their copula and survival copula
coincide.  For Clayton the parametric form is declared to be the survival
copula itself; :meth:`CopulaModel.evaluate` and
:meth:`CopulaModel.survival_eval` therefore return the same function for all
three families.

Component indices ``i`` and index sets ``P`` are 1-based.  Points ``u`` are
arrays of shape ``(..., n)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import chunked_map

BISECT_TOL = 1e-12


def _as_points(u, n):
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != n:
        raise ValueError(f"expected points of dimension {n}, got {u.shape[-1]}")
    if np.any((u < 0) | (u > 1)) or np.any(np.isnan(u)):
        raise ValueError("copula arguments must lie in [0, 1]")
    return u


def _ret(x, u):
    return float(x) if np.ndim(x) == 0 else x


def mask(u, keep, n):
    """Set coordinates outside the 1-based index set ``keep`` to one."""
    u = np.array(u, dtype=float, copy=True)
    drop = [j for j in range(n) if j + 1 not in keep]
    u[..., drop] = 1.0
    return u


class CopulaModel:
    family: str
    dim: int

    @property
    def ci(self) -> bool:
        """Declared conditionally-increasing (CI) property; not verified."""
        raise NotImplementedError

    @property
    def params(self) -> dict:
        return {}

    # evaluation -------------------------------------------------------
    def evaluate(self, u):
        u = _as_points(u, self.dim)
        return _ret(self._cdf(u), u)

    def survival_eval(self, u):
        return self.evaluate(u)

    def partial(self, i: int, u):
        """Analytic derivative of the survival copula in coordinate ``i``."""
        self._check_index(i)
        u = _as_points(u, self.dim)
        return _ret(self._partial(i - 1, u), u)

    def conditional_kernel(self, i: int, P, u):
        """``d_i C_hat(u_{P + {i}})``: mask outside ``P`` and ``i``, then differentiate."""
        P = frozenset(P)
        if not P:
            raise ValueError("index set must be nonempty")
        return self.partial(i, mask(u, P | {i}, self.dim))

    def marginal(self, P) -> "CopulaModel":
        P = sorted(set(P))
        if not P:
            raise ValueError("index set must be nonempty")
        if P[0] < 1 or P[-1] > self.dim:
            raise ValueError(f"indices {P} out of range 1..{self.dim}")
        return self._marginal(P)

    # sampling ---------------------------------------------------------
    def conditional_cdf(self, k: int, prev, v):
        """Pr(U_k <= v | U_1..U_{k-1} = prev) for the sequential sampler."""
        raise NotImplementedError

    def conditional_inverse(self, k: int, prev, w):
        """Invert :meth:`conditional_cdf` in ``v``; bisection on [0, 1] by default."""
        return bisect_inverse(lambda v: self.conditional_cdf(k, prev, v), w)

    def transform(self, w):
        """Map independent uniforms ``w`` (rows) to draws from the copula."""
        w = np.asarray(w, dtype=float)
        u = np.empty_like(w)
        u[:, 0] = w[:, 0]
        for k in range(2, self.dim + 1):
            u[:, k - 1] = self.conditional_inverse(k, u[:, : k - 1], w[:, k - 1])
        return u

    def sample(self, n_draws: int, seed: int, *, rep: int = 0, threads: int = 1):
        """Conditional-distribution-method draws, reproducible per (seed, rep)."""
        return chunked_map(lambda g, m: self.transform(g.random((m, self.dim))),
                           n_draws, seed, rep=rep, threads=threads)

    # helpers ----------------------------------------------------------
    def _check_index(self, i):
        if not 1 <= i <= self.dim:
            raise ValueError(f"index {i} out of range 1..{self.dim}")

    def _cdf(self, u):
        raise NotImplementedError

    def _partial(self, i0, u):
        raise NotImplementedError

    def _marginal(self, P):
        raise NotImplementedError


def bisect_inverse(cdf, w, tol=BISECT_TOL):
    """Vectorised bisection solving ``cdf(v) = w`` on [0, 1]."""
    w = np.asarray(w, dtype=float)
    lo = np.zeros_like(w)
    hi = np.ones_like(w)
    while np.max(hi - lo, initial=0.0) > tol:
        mid = 0.5 * (lo + hi)
        below = cdf(mid) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class Product(CopulaModel):
    dim: int
    family = "product"

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")

    @property
    def ci(self):
        return True

    def _cdf(self, u):
        return np.prod(u, axis=-1)

    def _partial(self, i0, u):
        return np.prod(np.delete(u, i0, axis=-1), axis=-1)

    def _marginal(self, P):
        return Product(len(P))

    def conditional_cdf(self, k, prev, v):
        return np.asarray(v, dtype=float)

    def conditional_inverse(self, k, prev, w):
        return np.asarray(w, dtype=float)


@dataclass(frozen=True)
class FGM(CopulaModel):
    """``prod(u) * (1 + theta * prod(1 - u))``; every proper margin is independent."""

    theta: float
    dim: int = 2
    family = "fgm"

    def __post_init__(self):
        if not -1.0 <= self.theta <= 1.0:
            raise ValueError(f"FGM theta must lie in [-1, 1], got {self.theta}")
        if self.dim < 2:
            raise ValueError("FGM dimension must be >= 2")

    @property
    def ci(self):
        # Only the bivariate family with theta >= 0 is CI.  In higher
        # dimensions the single top-order term makes the sign of the
        # conditional dependence flip with the other coordinates, so the
        # flag is withheld unless theta == 0.
        return self.theta == 0 or (self.dim == 2 and self.theta > 0)

    @property
    def params(self):
        return {"theta": self.theta}

    def _cdf(self, u):
        return np.prod(u, axis=-1) * (1.0 + self.theta * np.prod(1.0 - u, axis=-1))

    def _partial(self, i0, u):
        rest = np.delete(u, i0, axis=-1)
        ui = u[..., i0]
        return np.prod(rest, axis=-1) * (
            1.0 + self.theta * (1.0 - 2.0 * ui) * np.prod(1.0 - rest, axis=-1)
        )

    def _marginal(self, P):
        return self if len(P) == self.dim else Product(len(P))

    def conditional_cdf(self, k, prev, v):
        v = np.asarray(v, dtype=float)
        if k < self.dim:
            return v
        a = self.theta * np.prod(1.0 - 2.0 * np.asarray(prev), axis=-1)
        return v * (1.0 + a * (1.0 - v))

    def conditional_inverse(self, k, prev, w):
        w = np.asarray(w, dtype=float)
        if k < self.dim:
            return w
        a = self.theta * np.prod(1.0 - 2.0 * np.asarray(prev), axis=-1)
        # Root of a v^2 - (1 + a) v + w = 0 in [0, 1], written to avoid a = 0 division.
        b = 1.0 + a
        return np.clip(2.0 * w / (b + np.sqrt(np.maximum(b * b - 4.0 * a * w, 0.0))), 0.0, 1.0)


@dataclass(frozen=True)
class Clayton(CopulaModel):
    """``(sum(u**-alpha) - n + 1)**(-1/alpha)``, alpha > 0."""

    alpha: float
    dim: int = 2
    family = "clayton"

    def __post_init__(self):
        if not self.alpha > 0 or not np.isfinite(self.alpha):
            raise ValueError(f"Clayton alpha must be > 0, got {self.alpha}")
        if self.dim < 2:
            raise ValueError("Clayton dimension must be >= 2")

    @property
    def ci(self):
        return True

    @property
    def params(self):
        return {"alpha": self.alpha}

    def _cdf(self, u):
        a = self.alpha
        # u**-a may overflow to inf for tiny u; inf ** (-1/a) is the right limit 0.
        with np.errstate(divide="ignore", over="ignore"):
            s = np.sum(u**-a, axis=-1) - u.shape[-1] + 1.0
        return np.where(np.any(u == 0, axis=-1), 0.0, s ** (-1.0 / a))

    def _partial(self, i0, u):
        a = self.alpha
        rest = np.delete(u, i0, axis=-1)
        ui = u[..., i0]
        zero_rest = np.any(rest == 0, axis=-1)
        safe = np.where(rest == 0, 1.0, rest)
        # (u_i^a * S)^(-(1+a)/a) with S the Clayton sum; stable as u_i -> 0.
        with np.errstate(over="ignore"):
            inner = 1.0 + ui**a * (np.sum(safe**-a, axis=-1) - rest.shape[-1])
        return np.where(zero_rest, 0.0, inner ** (-(1.0 + a) / a))

    def _marginal(self, P):
        return self if len(P) == self.dim else (Clayton(self.alpha, len(P)) if len(P) > 1 else Product(1))

    def _prev_sum(self, k, prev):
        return np.sum(np.asarray(prev, dtype=float) ** -self.alpha, axis=-1) - k + 2.0

    def conditional_cdf(self, k, prev, v):
        a = self.alpha
        v = np.asarray(v, dtype=float)
        s = self._prev_sum(k, prev)
        with np.errstate(divide="ignore"):
            out = ((s - 1.0 + v**-a) / s) ** -(1.0 / a + k - 1)
        return np.where(v <= 0, 0.0, out)

    def conditional_inverse(self, k, prev, w):
        a = self.alpha
        w = np.asarray(w, dtype=float)
        s = self._prev_sum(k, prev)
        with np.errstate(divide="ignore", over="ignore"):
            v = (1.0 + s * (w ** (-a / (1.0 + a * (k - 1))) - 1.0)) ** (-1.0 / a)
        return np.where(w <= 0, 0.0, v)


FAMILIES = {"product": Product, "fgm": FGM, "clayton": Clayton}


def make_copula(family: str, dimension: int, **params) -> CopulaModel:
    if family == "product":
        if params:
            raise ValueError(f"product copula takes no parameters, got {sorted(params)}")
        return Product(dimension)
    if family == "fgm":
        return FGM(float(params.pop("theta")), dimension, **params)
    if family == "clayton":
        return Clayton(float(params.pop("alpha")), dimension, **params)
    raise ValueError(f"unknown copula family {family!r}; expected one of {sorted(FAMILIES)}")
