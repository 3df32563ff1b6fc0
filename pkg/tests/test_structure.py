import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sysimportance.structure import (
    BivariateSignature,
    StructureError,
    SystemStructure,
    bivariate_signature,
    parallel,
    series,
)

BRIDGE = SystemStructure(3, [[1], [2, 3]])
SHIP = SystemStructure(4, [[1], [2, 3], [2, 4]])


def brute_phi(structure, state):
    return int(any(all(state[j - 1] for j in p) for p in structure.path_sets))


def test_lifetime_is_max_of_path_minima():
    x = np.array([[3.0, 1.0, 2.0], [0.5, 4.0, 2.0], [1.0, 1.0, 1.0]])
    np.testing.assert_array_equal(BRIDGE.lifetime(x), [3.0, 2.0, 1.0])


def test_lifetime_broadcasts_over_leading_axes():
    x = np.arange(24, dtype=float).reshape(2, 3, 4)
    out = SHIP.lifetime(x)
    assert out.shape == (2, 3)
    assert out[0, 0] == max(0.0, min(1.0, 2.0), min(1.0, 3.0))


def test_series_and_parallel():
    x = np.array([2.0, 5.0, 3.0])
    assert series(3).lifetime(x) == 2.0
    assert parallel(3).lifetime(x) == 5.0


@pytest.mark.parametrize("sets, fragment", [
    ([], "at least one"),
    ([[1], []], "empty"),
    ([[1], [2, 4]], "out-of-range"),
    ([[1, 2], [1, 2]], "duplicates"),
    ([[1], [1, 2]], "contained"),
    ([[1, 2]], "irrelevant"),
])
def test_validate_reports_each_violation(sets, fragment):
    n = 3 if fragment == "irrelevant" else 2
    msgs = SystemStructure(n, sets).validate()
    assert any(fragment in m for m in msgs), msgs
    with pytest.raises(StructureError):
        SystemStructure(n, sets).check()


def test_dual_of_series_is_parallel():
    assert series(4).dual().same_as(parallel(4))
    assert parallel(3).dual().same_as(series(3))


def test_dual_of_ship():
    assert SHIP.dual().same_as(SystemStructure(4, [[1, 2], [1, 3, 4]]))


def test_dual_is_involution():
    assert SHIP.dual().dual().same_as(SHIP)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.sets(st.integers(1, n), min_size=1), min_size=1, max_size=5))))
def test_dual_matches_brute_force(data):
    n, raw = data
    sets = [frozenset(s) for s in raw]
    minimal = {s for s in sets if not any(o < s for o in sets)}
    used = set().union(*minimal)
    if used != set(range(1, n + 1)):
        return
    s = SystemStructure(n, sorted(minimal, key=sorted))
    d = s.dual()
    for state in itertools.product([0, 1], repeat=n):
        flipped = [1 - v for v in state]
        assert d.phi(state) == 1 - s.phi(flipped)
        assert s.phi(state) == brute_phi(s, state)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0, 10), min_size=4, max_size=4))
def test_union_terms_reproduce_indicator(x):
    # Pr(T > t) for a point mass is the indicator; inclusion-exclusion must agree.
    x = np.array(x)
    for t in (0.5, 2.0, 7.0):
        lhs = float(SHIP.lifetime(x) > t)
        rhs = sum(c * float(all(x[j - 1] > t for j in u)) for u, c in SHIP.union_terms)
        assert lhs == rhs


def test_union_terms_for_bridge():
    terms = dict(BRIDGE.union_terms)
    assert terms == {frozenset({1}): 1, frozenset({2, 3}): 1, frozenset({1, 2, 3}): -1}


def test_series_signature_k1():
    sig = bivariate_signature(series(2), 1)
    np.testing.assert_allclose(sig.mass, [[0.5, 0.5], [0.0, 0.0]])


def test_signature_rows_match_system_signature():
    # Row sums give the ordinary signature Pr(T = X_{i:n}); for the bridge: (0, 2/3, 1/3).
    for k in (1, 2, 3):
        sig = bivariate_signature(BRIDGE, k)
        np.testing.assert_allclose(sig.mass.sum(axis=1), [0.0, 2 / 3, 1 / 3], atol=1e-15)
        np.testing.assert_allclose(sig.mass.sum(axis=0), [1 / 3] * 3, atol=1e-15)
        assert sig.mass.sum() == pytest.approx(1.0, abs=1e-15)


def test_signature_denominator():
    sig = bivariate_signature(SHIP, 2)
    np.testing.assert_allclose(sig.mass * math.factorial(4), np.round(sig.mass * math.factorial(4)))


def test_signature_guard():
    with pytest.raises(ValueError, match="guard"):
        bivariate_signature(series(11), 1)


def test_signature_rejects_bad_mass():
    with pytest.raises(ValueError):
        BivariateSignature(1, np.array([[0.5, 0.6], [0.0, 0.0]]))
