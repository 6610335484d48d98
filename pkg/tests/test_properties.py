import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from gyrokit import ExactSet, disjointness_check, group_adapter, mobius_make, set_add
from gyrokit.tablefile import format_json, format_text, parse_json, parse_text

import oracles

DISK = mobius_make()
Z6 = group_adapter(6)


@st.composite
def points(draw, r=0.95):
    rho = draw(st.floats(0, r))
    th = draw(st.floats(0, 2 * np.pi))
    return complex(rho * np.cos(th), rho * np.sin(th))


@given(points(), points(), points())
def test_left_gyroassociative(a, b, z):
    lhs = DISK.add(a, DISK.add(b, z))
    rhs = DISK.add(DISK.add(a, b), DISK.gyr(a, b, z))
    assert abs(lhs - rhs) < 1e-9


@given(points(), points())
def test_left_loop_and_inverse(a, b):
    assert abs(DISK.gyr(a, b, 0.3) - DISK.gyr(DISK.add(a, b), b, 0.3)) < 1e-9
    assert abs(DISK.add(DISK.inv(a), a)) < 1e-12


@given(points(), points())
def test_add_matches_oracle(a, b):
    assert abs(DISK.add(a, b) - oracles.mobius_add(a, b)) < 1e-12


@given(points(), points(), points())
def test_gyrations_preserve_modulus(a, b, z):
    assert abs(abs(DISK.gyr(a, b, z)) - abs(z)) < 1e-12


subsets = st.sets(st.integers(0, 5), min_size=1, max_size=6)


@given(subsets, subsets)
def test_set_add_is_elementwise(A, B):
    expect = {int(Z6.table[a, b]) for a in A for b in B}
    assert set_add(ExactSet(Z6, A), ExactSet(Z6, B)) == expect


@given(subsets, subsets, subsets)
def test_disjointness_equivalence(A, B, C):
    lhs, rhs, verdict = disjointness_check(*(ExactSet(Z6, s) for s in (A, B, C)))
    assert verdict == "pass" and lhs == rhs


@st.composite
def tables(draw):
    n = draw(st.integers(1, 12))
    return np.array(draw(st.lists(st.lists(st.integers(0, n - 1), min_size=n, max_size=n),
                                  min_size=n, max_size=n)))


meta_text = st.text(st.characters(min_codepoint=33, max_codepoint=126), min_size=1, max_size=12)


@settings(max_examples=50)
@given(tables(), st.dictionaries(st.from_regex(r"[a-z][a-z0-9_]{0,6}", fullmatch=True), meta_text, max_size=3))
def test_table_round_trip(t, meta):
    back, m = parse_text(format_text(t, meta))
    assert (back == t).all() and m == meta
    back, m = parse_json(format_json(t, meta))
    assert (back == t).all() and m == meta
