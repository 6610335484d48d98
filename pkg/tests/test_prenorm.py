import numpy as np
import pytest

from gyrokit import (Ball, ChainInvalid, ChainMismatch, DyadicFamily, build_dyadic_family, coset_metric,
                     disk_grid, f_value, finite_chain, geometric_chain, group_adapter, metric_check, prenorm,
                     prenorm_check, prenorm_table, pseudometric_d)

import oracles


def z4_chain(z4):
    return finite_chain(z4, [[0, 1, 2, 3], [0, 2], [0]])


def truncated_f(chain, depth):
    """min{m / 2**depth : x in V(m / 2**depth)}, or 1 outside V(1)."""
    lv = DyadicFamily(chain, depth).levels[depth]
    return np.where(lv.any(axis=0), (lv.argmax(axis=0) + 1) / 2 ** depth, 1.0)


# --- the dyadic family ------------------------------------------------------------

def test_z4_family_by_hand(z4):
    fam = build_dyadic_family(z4_chain(z4), 2)
    assert fam.V(1, 0) == {0, 1, 2, 3}
    assert fam.V(1, 1) == {0, 2}
    assert fam.V(1, 2) == {0}
    assert fam.V(3, 2) == {0, 2}
    # r > 1 is the whole carrier, and 2/2 reduces to 1/1
    assert fam.V(5, 2) == {0, 1, 2, 3} and fam.V(2, 1) == fam.V(1, 0)
    assert fam.to_dict()["V"] == {"1/1": [0, 1, 2, 3], "1/2": [0, 2], "1/4": [0], "3/4": [0, 2]}


def test_depth_zero_and_bad_indices(z4):
    fam = DyadicFamily(z4_chain(z4), 0)
    assert fam.levels[0].tolist() == [[True, True, True, True]]
    with pytest.raises(ValueError):
        fam.raw(0, 1)
    with pytest.raises(ValueError):
        DyadicFamily(z4_chain(z4), 1).raw(1, 3)


def test_invalid_chain_is_rejected(z4):
    with pytest.raises(ChainInvalid) as info:
        DyadicFamily(finite_chain(z4, [[0, 1, 2, 3], [0, 1, 3]]), 3)
    assert not info.value.report.passed
    with pytest.raises(ChainInvalid):
        DyadicFamily(finite_chain(z4, [[0, 1]]), 2)


def test_claim_and_monotone(z4, gyro8):
    for chain in (z4_chain(z4), finite_chain(gyro8[4], [range(8), [0, 1], [0]])):
        fam = DyadicFamily(chain, 5)
        assert fam.claim_check().status == "pass"
        assert fam.monotone_check().status == "pass"


def test_disk_family_radii(disk):
    fam = DyadicFamily(geometric_chain(disk), 4)
    assert fam.V(1, 0).radius == pytest.approx(1 / 3)
    assert fam.V(1, 2).radius == pytest.approx(1 / 27)
    # V(3/4) = U2 + V(1/2): rapidities add
    r = np.tanh(np.arctanh(1 / 27) + np.arctanh(1 / 9))
    assert isinstance(fam.V(3, 2), Ball) and fam.V(3, 2).radius == pytest.approx(r)
    assert fam.claim_check().status == "pass"
    assert fam.monotone_check().status == "pass"
    assert fam.f_error == 2.0 ** -4 and not fam.exact_f


# --- f ----------------------------------------------------------------------------

def test_f_on_z4(z4):
    fam = DyadicFamily(z4_chain(z4), 12)
    assert fam.exact_f and fam.f_error == 0.0
    assert fam.f(np.arange(4)).tolist() == [0, 1, 0.5, 1]
    assert f_value(fam, 2) == 0.5


def test_f_on_klein_chain(klein):
    fam = DyadicFamily(finite_chain(klein, [[0, 1, 2], [0, 1]]), 3)
    # 2 sits in V(1) only and 3 is outside V(1): both have f = 1
    assert fam.f(np.arange(4)).tolist() == [0, 0, 1, 1]
    tab = prenorm_table(fam)
    assert tab.N[1] == 0 and tab.N[0] == 0


def test_unattained_infimum_is_rounded_down():
    # Z6 with U1 = {0,1,3,5}, then {0,3} forever: 2 lies in every V(r) for
    # r > 1/2 but not in V(1/2) = U1, so f(2) = 1/2 is not attained
    z6 = group_adapter(6)
    chain = finite_chain(z6, [range(6), [0, 1, 3, 5], [0, 3]])
    fam = DyadicFamily(chain, 6)
    assert 2 not in fam.V(1, 1)
    assert all(2 in fam.V(m, n) for n in range(2, 7) for m in range(2 ** (n - 1) + 1, 2 ** n + 1))
    assert fam.f(np.arange(6)).tolist() == [0, 0.5, 0.5, 0, 0.5, 0.5]


def test_exact_f_is_the_limit_of_truncations(gyro8):
    # truncated f decreases to the exact value within 2**-D at depth D
    carriers = list(gyro8[:3]) + [group_adapter(6), group_adapter(8)]
    for c in carriers:
        for sets in oracles.stabilizing_chains(c.table)[:60]:
            chain = finite_chain(c, sets)
            f = DyadicFamily(chain, 1).f(np.arange(c.order))
            prev = None
            for D in range(len(sets), len(sets) + 4):
                fd = truncated_f(chain, D)
                assert (fd >= f).all() and (fd - f <= 2.0 ** -D).all()
                if prev is not None:
                    assert (fd <= prev).all()
                prev = fd


def test_f_on_disk(disk):
    fam = DyadicFamily(geometric_chain(disk), 8)
    assert f_value(fam, 0) == 0
    # beyond V(1) = B(1/3) the infimum is exactly 1
    assert fam.f([0.5, 0.9j, -0.99]).tolist() == [1, 1, 1]
    # rotation invariant and monotone in |x|
    r = np.linspace(0, 0.3, 40)
    assert np.allclose(fam.f(r), fam.f(r * np.exp(0.7j)))
    assert (np.diff(fam.f(r)) >= 0).all()
    # x just inside U_n has f <= 1/2**n
    for n in range(1, 8):
        x = 0.999 * 3.0 ** -(n + 1)
        assert f_value(fam, x) <= 2.0 ** -n


# --- N and the metrics ------------------------------------------------------------

def test_prenorm_and_d_on_z4(z4):
    tab = prenorm_table(DyadicFamily(z4_chain(z4), 6))
    assert tab.exact and tab.f_error == 0
    assert prenorm(tab.family, 2) == 0.5
    assert pseudometric_d(tab, 1, 2) == 0.5
    assert pseudometric_d(tab, 1, 3) == 0
    d = tab.to_dict()
    assert d["f"] == [0, 1, 0.5, 1] and d["N"] == [0, 1, 0.5, 1]


def test_coset_metric_on_z4(z4):
    chain = z4_chain(z4)
    tab = prenorm_table(DyadicFamily(chain, 6))
    # rho(0, 1) = N(1) + N(3) = 2, P = {0}
    assert coset_metric(z4, [0], tab, 0, 1) == 2
    assert coset_metric(z4, [0], tab, 0, 2) == 1
    assert coset_metric(z4, [0], tab, 3, 3) == 0
    with pytest.raises(ChainMismatch):
        coset_metric(z4, [0, 2], tab, 0, 1)
    with pytest.raises(ChainMismatch):
        metric_check(z4, [0, 2], tab)
    assert metric_check(z4, [0], tab).passed


def test_coset_metric_with_nontrivial_kernel(z4):
    chain = finite_chain(z4, [[0, 1, 2, 3], [0, 2]])
    tab = prenorm_table(DyadicFamily(chain, 4))
    assert coset_metric(z4, [0, 2], tab, 0, 2) == 0
    assert coset_metric(z4, [0, 2], tab, 0, 1) > 0
    assert metric_check(z4, [0, 2], tab).passed


def test_coset_metric_rejects_foreign_table(z4, klein):
    tab = prenorm_table(DyadicFamily(z4_chain(z4), 4))
    with pytest.raises(ChainMismatch):
        coset_metric(klein, [0], tab, 0, 1)


def test_prenorm_check_on_fixture_chain(gyro8):
    g = gyro8[4]
    rep = prenorm_check(finite_chain(g, [range(8), [0, 1], [0]]), 6)
    assert rep.passed, rep.summary()
    assert rep.mode == "exhaustive"


def test_prenorm_on_disk(disk):
    fam = DyadicFamily(geometric_chain(disk), 6)
    ys = np.array([0, 0.1, 0.2j, -0.3])
    assert prenorm(fam, 0, sup_set=ys) == 0
    # -x is always among the sup points, so N(x) >= f(x)
    for x in (0.01, 0.05j, 0.2):
        assert prenorm(fam, x, sup_set=ys) >= f_value(fam, x)
    # N depends on |x| only
    assert prenorm(fam, 0.05, seed=3) == prenorm(fam, 0.05j, seed=3)


def test_disk_table_has_nan_outside(disk):
    fam = DyadicFamily(geometric_chain(disk), 5)
    tab = prenorm_table(fam, grid=25, sup_samples=50, seed=1)
    pts = disk_grid(disk, 25)
    assert tab.points.shape == pts.shape == (625,)
    outside = np.abs(pts) >= 1
    assert outside.any()
    assert np.isnan(tab.N[outside]).all() and np.isfinite(tab.N[~outside]).all()
    assert tab.to_dict()["grid_shape"] == [25, 25]
    assert "lower estimate" in tab.note


def test_disk_metric_check(disk):
    fam = DyadicFamily(geometric_chain(disk), 6)
    tab = prenorm_table(fam, grid=40, sup_samples=200, seed=0)
    rep = metric_check(disk, [0], tab, budget=200, seed=0)
    assert rep.passed, rep.summary()
    with pytest.raises(ChainMismatch):
        metric_check(disk, [0.2], tab)


def test_disk_prenorm_check_small(disk):
    rep = prenorm_check(geometric_chain(disk), depth=6, budget=200, grid=40, sup_samples=200, seed=4)
    assert rep.passed, rep.summary()
    assert rep.mode == "sampled"
