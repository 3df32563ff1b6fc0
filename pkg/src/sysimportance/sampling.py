"""Simulation of component and system lifetimes."""

from __future__ import annotations

import numpy as np

from .conditional import SystemModel
from .rng import chunked_map

_TINY = np.finfo(float).tiny


def simulate(model: SystemModel, n: int, seed: int, *, rep: int = 0, threads: int = 1):
    """Draw ``n`` joint component lifetimes and the system lifetime.

    Survival-copula draws ``V`` map to lifetimes through ``X_j = Fbar_j^{-1}(V_j)``.
    Returns ``(X, T)`` with ``X`` of shape ``(n, model.n)``.
    """

    def chunk(g, m):
        v = model.copula.transform(g.random((m, model.n)))
        v = np.clip(v, _TINY, 1.0)
        x = np.column_stack([d.isf(v[:, j]) for j, d in enumerate(model.marginals)])
        return np.column_stack([x, model.structure.lifetime(x)])

    out = chunked_map(chunk, n, seed, rep=rep, threads=threads)
    return out[:, :-1], out[:, -1]
