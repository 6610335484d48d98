import numpy as np
import pytest

from gyrokit import (EXHAUSTIVE_CAP, MobiusDisk, PropertyResult, VerificationReport, group_adapter,
                     gyr_consistency_check, is_degenerate_group, verify_axioms)
from gyrokit.core import check_property

ALL = ["G1_left_identity", "G1_right_identity", "G2_left_inverse", "G2_right_inverse", "G2_unique_inverse",
       "G3_left_gyroassociative", "G3_gyr_homomorphism", "G3_gyr_bijective", "G4_left_loop",
       "L1_left_cancellation", "L2_right_cancellation_gyr", "L3_right_cancellation_inv", "L4_gyr_formula"]


class Opposite(MobiusDisk):
    """a, b -> b + a: stays in the disk but is not a (left) gyrogroup."""

    def add(self, a, b):
        return super().add(b, a)

    def gyr(self, a, b, z):
        return self.derived_gyr(a, b, z)


def test_property_result_requires_counterexample_on_failure():
    with pytest.raises(ValueError):
        PropertyResult("x", "fail", 3)
    with pytest.raises(ValueError):
        PropertyResult("x", "maybe")
    assert PropertyResult("x", "skipped").passed


def test_report_bookkeeping():
    rep = VerificationReport("t", "exhaustive", seed=1)
    rep.add(PropertyResult("a", "pass", 4))
    rep.add(PropertyResult("b", "fail", 2, counterexample=[1, 2], residual=0.5))
    assert not rep.passed
    assert rep.names() == ["a", "b"]
    assert [e.name for e in rep.failures()] == ["b"]
    assert "a" in rep and "c" not in rep
    assert rep.budget_consumed == 6
    d = rep.to_dict()
    assert d["passed"] is False and d["properties"][1]["counterexample"] == [1, 2]
    other = VerificationReport("u", "sampled")
    other.extend(rep, prefix="sub.")
    assert other.names() == ["sub.a", "sub.b"]
    assert "FAIL" in rep.summary()
    with pytest.raises(KeyError):
        rep["zzz"]


def test_check_property_reports_first_failure(z4):
    x = np.arange(4)
    r = check_property(z4, "p", [x], lambda x: (x, np.where(x == 2, 0, x)))
    assert r.status == "fail" and r.counterexample == [2]


def test_exhaustive_report_on_z4(z4):
    rep = verify_axioms(z4)
    assert rep.mode == "exhaustive"
    assert rep.names() == ALL
    assert rep.passed
    # exhaustive counts ignore the budget
    assert rep["G3_gyr_homomorphism"].checks == 4 ** 4
    assert verify_axioms(z4, budget=1)["G3_left_gyroassociative"].checks == 4 ** 3


def test_sampled_mode_above_cap():
    big = group_adapter(EXHAUSTIVE_CAP + 1)
    rep = verify_axioms(big, budget=300, seed=0)
    assert rep.mode == "sampled"
    assert "G2_unique_inverse" not in rep
    assert rep["G1_left_identity"].checks == 300
    assert rep.passed


def test_budget_must_be_positive(z4):
    with pytest.raises(ValueError):
        verify_axioms(z4, budget=0)


def test_broken_disk_operation_fails():
    rep = verify_axioms(Opposite(), budget=2000, seed=0)
    assert not rep.passed
    bad = rep.failures()[0]
    assert bad.counterexample is not None and bad.residual > 0


def test_seeded_reports_repeat(disk):
    a = verify_axioms(disk, budget=500, seed=9).to_dict()
    b = verify_axioms(disk, budget=500, seed=9).to_dict()
    c = verify_axioms(disk, budget=500, seed=10).to_dict()
    assert a == b
    assert a["properties"][5]["max_residual"] != c["properties"][5]["max_residual"]


def test_consistency_on_groups_is_skipped_or_identity(z4):
    rep = gyr_consistency_check(z4)
    assert rep.passed
    assert is_degenerate_group(z4) == (True, None)


def test_consistency_without_closed_form(gyro8):
    rep = gyr_consistency_check(gyro8[0])
    assert rep["closed_vs_derived_gyr"].status == "skipped"


def test_degenerate_witness_is_genuine(gyro8):
    g = gyro8[3]
    ok, (a, b, z) = is_degenerate_group(g)
    assert not ok
    assert g.gyr(a, b, z) != z
