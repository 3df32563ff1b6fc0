"""Closed-form regression curves and indices for the worked systems.

These are pure formula evaluations used as independent checks on the
quadrature and simulation paths.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class OracleBundle:
    name: str
    curves: dict = field(default_factory=dict)
    mean_t: float | None = None
    var_t: float | None = None
    var_m: dict = field(default_factory=dict)

    @property
    def r2(self) -> dict:
        return {k: v / self.var_t for k, v in self.var_m.items()}


def series_exponential(rates) -> OracleBundle:
    """Series system of independent exponentials.

    ``m_i(x) = (1 - exp(-L_i x)) / L_i`` with ``L_i`` the sum of the other
    rates, and ``R_i^2 = rate_i / (rate_i + 2 L_i)``.
    """
    rates = np.asarray(rates, dtype=float)
    total = rates.sum()
    b = OracleBundle("series_exponential", mean_t=1.0 / total, var_t=1.0 / total**2)
    for i, lam in enumerate(rates, 1):
        rest = total - lam
        b.curves[i] = (lambda x, r=rest: -np.expm1(-r * np.asarray(x, dtype=float)) / r)
        b.var_m[i] = lam / (lam + 2.0 * rest) * b.var_t
    return b


def series_r2(rates) -> np.ndarray:
    rates = np.asarray(rates, dtype=float)
    rest = rates.sum() - rates
    return rates / (rates + 2.0 * rest)


def kappa(l1, l3):
    return ((l1 + l3) ** 2 - l1 * l3) / (l1 * l3 * (l1 + l3))


def _m2_bridge(l1, l3):
    k = kappa(l1, l3)
    return lambda x: (k - np.exp(-l3 * np.asarray(x, dtype=float)) / l3
                      + np.exp(-(l1 + l3) * np.asarray(x, dtype=float)) / (l1 + l3))


def _var_m2_bridge(l1, l2, l3):
    k = kappa(l1, l3)
    second = (
        k**2
        + l2 / (l3**2 * (l2 + 2 * l3))
        - 2 * l2 * k / (l3 * (l2 + l3))
        + l2 / ((l1 + l3) ** 2 * (2 * l1 + l2 + 2 * l3))
        + 2 * l2 * k / ((l1 + l3) * (l1 + l2 + l3))
        - 2 * l2 / (l3 * (l1 + l3) * (l1 + l2 + 2 * l3))
    )
    mean = 1 / l1 + l1 / ((l2 + l3) * (l1 + l2 + l3))
    return second - mean**2


def bridge_system(l1=1.0, l2=1.0, l3=1.0) -> OracleBundle:
    """``T = max(X1, min(X2, X3))`` with independent exponentials."""
    s23 = l2 + l3
    lam = l1 + l2 + l3
    mean_t = 1 / l1 + 1 / s23 - 1 / lam
    second_t = 2 / l1**2 + 2 / s23**2 - 2 / lam**2
    b = OracleBundle("bridge_system", mean_t=mean_t, var_t=second_t - mean_t**2)
    b.curves[1] = lambda x: np.asarray(x, dtype=float) + np.exp(-s23 * np.asarray(x, dtype=float)) / s23
    b.curves[2] = _m2_bridge(l1, l3)
    b.curves[3] = _m2_bridge(l1, l2)
    second_m1 = (2 / l1**2 + l1 / (s23**2 * (l1 + 2 * s23))
                 + 2 * l1 / (s23 * lam**2))
    b.var_m[1] = second_m1 - (1 / l1 + l1 / (s23 * lam)) ** 2
    b.var_m[2] = _var_m2_bridge(l1, l2, l3)
    b.var_m[3] = _var_m2_bridge(l1, l3, l2)
    return b


def fgm_series_m1(l1, l2, theta):
    """``m_1`` for a two-component series system, exponentials, FGM dependence."""

    def m1(x):
        x = np.asarray(x, dtype=float)
        e2 = np.exp(-l2 * x)
        return ((1 - e2) / l2
                + theta / l2 * (1 - 2 * np.exp(-l1 * x)) * (1 - e2 - 0.5 * (1 - np.exp(-2 * l2 * x))))

    return m1


def ship_case1(theta: float) -> OracleBundle:
    """Ship control system, exponential rates 1/60, 1/50, 1/45, 1/45, 4-dim FGM."""
    th = float(theta)
    e = np.exp

    def m1(x):
        x = np.asarray(x, dtype=float)
        inner = (-145236 - 343824 * e(x / 300) - 701974 * e(x / 180) + 171912 * e(x / 50)
                 + 350987 * e(x / 45) + 863968 * e(23 * x / 900) + 443352 * e(x / 36)
                 - 431984 * e(19 * x / 450) - 221676 * e(2 * x / 45) - 580944 * e(43 * x / 900))
        return (900 / 19 * e(-19 * x / 450) + x
                - 75 * th / 1403948 * e(-131 * x / 900) * (290472 + e(x / 60) * inner)
                - 450 / 29 * (1 + th) * e(-29 * x / 450))

    def m2(x):
        x = np.asarray(x, dtype=float)
        g = -2 + e(x / 50)
        bracket = (5985 * g * th - 6930 * e(x / 60) * g * th - 14630 * e(x / 45) * g * th
                   + 17556 * e(7 * x / 180) * g * th + 9405 * e(2 * x / 45) * g * th
                   - 11970 * e(11 * x / 180) * (-2 * th + e(x / 50) * (1 + th))
                   + 2 * e(11 * x / 90) * (-584 * th + e(x / 50) * (5985 + 292 * th)))
        return (150 - 90 * e(-x / 45) - 45 / 2 * (1 - e(-2 * x / 45)) - 360 / 7 * (1 - e(-7 * x / 180))
                + 2 / 1463 * e(-32 * x / 225) * bracket)

    def m3(x):
        x = np.asarray(x, dtype=float)
        return (110 + 450 / 19 * e(-19 * x / 450) - 50 * e(-x / 50) - 300 / 11 * (1 - e(-11 * x / 300))
                - 900 / 53 * th * e(-7 * x / 50) + 1800 / 91 * th * e(-37 * x / 300)
                + 225 / 11 * th * e(-3 * x / 25) + 67050 / 2279 * th * e(-53 * x / 450)
                - 1800 / 73 * th * e(-31 * x / 300) - 227700 / 6461 * th * e(-91 * x / 900)
                - 13725 / 374 * th * e(-22 * x / 225) - 450 / 43 * th * e(-43 * x / 450)
                + 179100 / 3869 * th * e(-73 * x / 900) + 900 / 71 * th * e(-71 * x / 900)
                + 225 / 17 * th * e(-17 * x / 225) - 900 / 53 * e(-53 * x / 900) * (1 + th))

    return OracleBundle("ship_case1", curves={1: m1, 2: m2, 3: m3, 4: m3})


def oracle_catalog() -> dict:
    """Constructors for every closed-form bundle, keyed by name."""
    return {
        "series_exponential": series_exponential,
        "bridge_system": bridge_system,
        "fgm_series": lambda l1, l2, theta: OracleBundle("fgm_series", curves={1: fgm_series_m1(l1, l2, theta)}),
        "ship_case1": ship_case1,
    }
