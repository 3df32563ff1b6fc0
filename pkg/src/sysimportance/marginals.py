"""Component lifetime distributions.

All functions are vectorised over ``t`` / ``p`` and return numpy arrays (or
floats for scalar input).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class MarginalDistribution:
    family: str

    @property
    def params(self) -> dict:
        raise NotImplementedError

    @property
    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def survival(self, t):
        raise NotImplementedError

    def cdf(self, t):
        return 1.0 - self.survival(t)

    def density(self, t):
        raise NotImplementedError

    def quantile(self, p):
        p = np.asarray(p, dtype=float)
        if np.any((p < 0) | (p >= 1)) or np.any(np.isnan(p)):
            raise ValueError("quantile level must lie in [0, 1)")
        return self._quantile(p)

    def sample(self, u):
        """Inverse-transform draw for uniforms ``u``."""
        return self.quantile(u)

    def isf(self, v):
        """Inverse survival ``Fbar^{-1}(v)`` for ``v`` in (0, 1]; exact in the far tail."""
        return self._isf(np.asarray(v, dtype=float))

    def upper(self, eps: float = 1e-10) -> float:
        """Effective upper end of the support, ``quantile(1 - eps)``."""
        return float(self.quantile(1.0 - eps))

    def _quantile(self, p):
        raise NotImplementedError


def _out(x, like):
    return float(x) if np.ndim(like) == 0 else x


@dataclass(frozen=True)
class Exponential(MarginalDistribution):
    rate: float
    family = "exponential"

    def __post_init__(self):
        if not self.rate > 0 or not np.isfinite(self.rate):
            raise ValueError(f"exponential rate must be > 0, got {self.rate}")

    @property
    def params(self):
        return {"rate": self.rate}

    @property
    def support(self):
        return (0.0, np.inf)

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        return _out(np.exp(-self.rate * np.maximum(t, 0.0)), t)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return _out(-np.expm1(-self.rate * np.maximum(t, 0.0)), t)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        return _out(np.where(t >= 0, self.rate * np.exp(-self.rate * np.maximum(t, 0.0)), 0.0), t)

    def _quantile(self, p):
        return _out(-np.log1p(-p) / self.rate, p)

    def _isf(self, v):
        return _out(-np.log(v) / self.rate, v)


@dataclass(frozen=True)
class Weibull(MarginalDistribution):
    """Weibull with survival ``exp(-(t/scale)**shape)``."""

    scale: float
    shape: float
    family = "weibull"

    def __post_init__(self):
        if not self.scale > 0 or not self.shape > 0:
            raise ValueError(f"weibull scale and shape must be > 0, got {self.scale}, {self.shape}")

    @property
    def params(self):
        return {"scale": self.scale, "shape": self.shape}

    @property
    def support(self):
        return (0.0, np.inf)

    def _h(self, t):
        return (np.maximum(t, 0.0) / self.scale) ** self.shape

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        return _out(np.exp(-self._h(t)), t)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return _out(-np.expm1(-self._h(t)), t)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        pos = t > 0
        z = np.where(pos, t, 1.0) / self.scale
        f = self.shape / self.scale * z ** (self.shape - 1) * np.exp(-(z**self.shape))
        if self.shape < 1:
            at0 = np.inf
        else:
            at0 = 1.0 / self.scale if self.shape == 1 else 0.0
        f = np.where(pos, f, np.where(t == 0, at0, 0.0))
        return _out(f, t)

    def _quantile(self, p):
        return _out(self.scale * (-np.log1p(-p)) ** (1.0 / self.shape), p)

    def _isf(self, v):
        return _out(self.scale * (-np.log(v)) ** (1.0 / self.shape), v)


@dataclass(frozen=True)
class Uniform(MarginalDistribution):
    low: float
    high: float
    family = "uniform"

    def __post_init__(self):
        if not (self.low >= 0 and self.high > self.low and np.isfinite(self.high)):
            raise ValueError(f"uniform needs 0 <= low < high, got {self.low}, {self.high}")

    @property
    def params(self):
        return {"low": self.low, "high": self.high}

    @property
    def support(self):
        return (self.low, self.high)

    def survival(self, t):
        t = np.asarray(t, dtype=float)
        return _out(np.clip((self.high - t) / (self.high - self.low), 0.0, 1.0), t)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return _out(np.clip((t - self.low) / (self.high - self.low), 0.0, 1.0), t)

    def density(self, t):
        # Zero on the boundary: conditional formulas need f > 0 strictly.
        t = np.asarray(t, dtype=float)
        inside = (t > self.low) & (t < self.high)
        return _out(np.where(inside, 1.0 / (self.high - self.low), 0.0), t)

    def _quantile(self, p):
        return _out(self.low + p * (self.high - self.low), p)

    def _isf(self, v):
        return _out(self.high - v * (self.high - self.low), v)

    def upper(self, eps: float = 1e-10) -> float:
        return float(self.high)


FAMILIES = {"exponential": Exponential, "weibull": Weibull, "uniform": Uniform}


def make_marginal(family: str, **params) -> MarginalDistribution:
    try:
        cls = FAMILIES[family]
    except KeyError:
        raise ValueError(f"unknown marginal family {family!r}; expected one of {sorted(FAMILIES)}") from None
    return cls(**params)
