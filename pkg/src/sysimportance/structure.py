"""Coherent-system structure given by minimal path sets.

Component numbers are 1-based everywhere in the public API, matching the
spec files; lifetime vectors are ordinary 0-based arrays whose column
``j - 1`` holds component ``j``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

MAX_SIGNATURE_N = 10
MAX_PATH_SETS = 20


class StructureError(ValueError):
    """Raised when a structure violates the coherence invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class SystemStructure:
    n: int
    path_sets: tuple[frozenset[int], ...]

    def __init__(self, n, path_sets):
        object.__setattr__(self, "n", int(n))
        object.__setattr__(
            self, "path_sets", tuple(frozenset(int(j) for j in p) for p in path_sets)
        )

    @property
    def r(self) -> int:
        return len(self.path_sets)

    def validate(self) -> list[str]:
        """Return the list of violated invariants (empty when coherent)."""
        out = []
        if self.n < 1:
            out.append(f"component count must be >= 1, got {self.n}")
        if not self.path_sets:
            out.append("at least one minimal path set is required")
        for a, p in enumerate(self.path_sets, 1):
            if not p:
                out.append(f"path set {a} is empty")
            bad = sorted(j for j in p if not 1 <= j <= self.n)
            if bad:
                out.append(f"path set {a} has out-of-range component(s) {bad}")
        for (a, p), (b, q) in itertools.combinations(enumerate(self.path_sets, 1), 2):
            if p == q:
                out.append(f"path sets {a} and {b} are duplicates {_fmt(p)}")
            elif p < q:
                out.append(f"path set {_fmt(p)} is contained in {_fmt(q)}")
            elif q < p:
                out.append(f"path set {_fmt(q)} is contained in {_fmt(p)}")
        used = set().union(*self.path_sets) if self.path_sets else set()
        for j in range(1, self.n + 1):
            if j not in used:
                out.append(f"component {j} is irrelevant (in no path set)")
        return out

    def check(self) -> "SystemStructure":
        violations = self.validate()
        if violations:
            raise StructureError(violations)
        return self

    def lifetime(self, x):
        """System lifetime max_P min_{j in P} x_j; ``x`` has shape (..., n)."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.n:
            raise ValueError(f"expected {self.n} component lifetimes, got {x.shape[-1]}")
        mins = [x[..., sorted(j - 1 for j in p)].min(axis=-1) for p in self.path_sets]
        return np.max(np.stack(mins, axis=-1), axis=-1)

    def phi(self, state) -> int:
        """Boolean structure function on a 0/1 state vector."""
        return int(any(all(state[j - 1] for j in p) for p in self.path_sets))

    def dual(self) -> "SystemStructure":
        """Dual system; its minimal path sets are our minimal cut sets."""
        self.check()
        cuts = [frozenset()]
        for p in self.path_sets:
            grown = {c for c in cuts if c & p}
            grown.update(c | {e} for c in cuts if not c & p for e in p)
            cuts = _minimal(grown)
        return SystemStructure(self.n, sorted(cuts, key=lambda c: (len(c), sorted(c))))

    @cached_property
    def union_terms(self) -> tuple[tuple[frozenset[int], int], ...]:
        """Inclusion-exclusion over unions of path sets, merged by union.

        Returns ``(union, coefficient)`` pairs with nonzero coefficients so that
        ``Pr(T > t) = sum(coef * Pr(X_union > t))``.
        """
        if self.r > MAX_PATH_SETS:
            raise ValueError(f"inclusion-exclusion guarded at r <= {MAX_PATH_SETS}, got {self.r}")
        coef: dict[frozenset[int], int] = {}
        for size in range(1, self.r + 1):
            sign = 1 if size % 2 else -1
            for combo in itertools.combinations(self.path_sets, size):
                u = frozenset().union(*combo)
                coef[u] = coef.get(u, 0) + sign
        return tuple(
            (u, c) for u, c in sorted(coef.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
            if c != 0
        )

    def same_as(self, other: "SystemStructure") -> bool:
        return self.n == other.n and set(self.path_sets) == set(other.path_sets)


def _fmt(s):
    return "{" + ",".join(map(str, sorted(s))) + "}"


def _minimal(sets):
    ordered = sorted(set(sets), key=len)
    kept = []
    for s in ordered:
        if not any(k <= s for k in kept):
            kept.append(s)
    return kept


def series(n: int) -> SystemStructure:
    return SystemStructure(n, [range(1, n + 1)])


def parallel(n: int) -> SystemStructure:
    return SystemStructure(n, [[j] for j in range(1, n + 1)])


@dataclass(frozen=True)
class BivariateSignature:
    """Joint law of (rank of T, rank of X_k) among the order statistics.

    ``mass[i - 1, j - 1]`` is the probability that T = X_{i:n} and X_k = X_{j:n}
    under exchangeable, tie-free component lifetimes.
    """

    k: int
    mass: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.mass, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("signature mass must be a square matrix")
        if np.any(m < 0) or abs(m.sum() - 1.0) > 1e-12:
            raise ValueError("signature mass must be nonnegative and sum to 1")
        object.__setattr__(self, "mass", m)


def bivariate_signature(structure: SystemStructure, k: int, max_n: int = MAX_SIGNATURE_N) -> BivariateSignature:
    structure.check()
    n = structure.n
    if not 1 <= k <= n:
        raise ValueError(f"component {k} out of range 1..{n}")
    if n > max_n:
        raise ValueError(f"n={n} exceeds the factorial enumeration guard ({max_n}); raise max_n to override")
    # Each permutation is an ordering X_{s(1)} < ... < X_{s(n)}; store ranks.
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int16)
    ranks = np.empty_like(perms)
    rows = np.arange(len(perms))[:, None]
    ranks[rows, perms] = np.arange(1, n + 1, dtype=np.int16)
    t_rank = structure.lifetime(ranks).astype(int)
    k_rank = ranks[:, k - 1].astype(int)
    counts = np.zeros((n, n))
    np.add.at(counts, (t_rank - 1, k_rank - 1), 1)
    return BivariateSignature(k, counts / math.factorial(n))
