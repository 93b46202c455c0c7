import random

import pytest
from hypothesis import given, strategies as st

from hpai.errors import ConfigError
from hpai.health import (
    HealthState, action_to_momentum, apply_action_effect, balancedness, build_a2mm, compute_gap,
    expected_momentum, fitness_dec, write_a2mm_csv,
)
from hpai.motion import MomentumVector as MV
from hpai.opponent import A2CTable

AM = MV(298.69, 306.36, 138.77, 88.23)
SKILL_A = MV(5.57, 1.82, 2.10, 3.39)
DB = {
    "right_punch": MV(5.83, 0.49, 0.51, 0.38),
    "left_kick": MV(1.47, 1.68, 1.08, 6.42),
    "crouch": MV(2.25, 2.11, 2.95, 3.04),
}
C2M = {"A": "right_punch", "B": "left_kick", "C": "crouch"}

nonneg = st.floats(0, 1e4, allow_nan=False)
vectors = st.builds(MV, nonneg, nonneg, nonneg, nonneg)


def test_expected_momentum_worked_example():
    assert expected_momentum(AM).as_tuple() == (306.36, 306.36, 138.77, 138.77)


@pytest.mark.parametrize("am,em", [((5, 5, 3, 3), (5, 5, 3, 3)), ((0, 0, 0, 0), (0, 0, 0, 0))])
def test_expected_momentum_trivial(am, em):
    assert expected_momentum(MV.of(am)).as_tuple() == em


def test_gap_worked_example():
    assert compute_gap(AM).as_tuple() == pytest.approx((7.67, 0, 0, 50.54), abs=1e-9)
    assert compute_gap(AM).total() == pytest.approx(58.21, abs=1e-9)


def test_gap_small_cases():
    assert compute_gap(MV(1, 3, 0, 0)).as_tuple() == (2, 0, 0, 0)
    assert compute_gap(MV(4, 4, 2, 2)) == MV()


def test_balancedness_worked_example():
    assert balancedness(AM) == pytest.approx(0.8692, abs=1e-4)
    assert balancedness(AM) == pytest.approx(1 - 2 * 58.21 / 890.26, abs=1e-12)


def test_balancedness_after_skill_a():
    post = apply_action_effect(AM, SKILL_A)
    assert post.as_tuple() == pytest.approx((304.26, 308.18, 140.87, 91.62), abs=1e-9)
    assert balancedness(post) == pytest.approx(0.8816, abs=1e-4)


def test_balancedness_zero_state():
    assert balancedness(MV()) == 1.0
    assert compute_gap(MV()) == MV()


def test_health_state_bundle():
    h = HealthState.from_am(AM)
    assert h.em == expected_momentum(AM) and h.gap == compute_gap(AM)
    assert h.after(SKILL_A).am == AM + SKILL_A


def test_fitness_worked_example():
    gap = MV(7.67, 0, 0, 50.54)
    assert fitness_dec(gap, SKILL_A) == pytest.approx(5.04, abs=0.01)


def test_fitness_edges():
    gap = compute_gap(AM)
    assert fitness_dec(gap, MV()) == 0
    assert fitness_dec(gap, gap) == pytest.approx(gap.total())


def test_apply_action_effect_identities():
    assert apply_action_effect(AM, MV()) == AM
    assert apply_action_effect(MV(), SKILL_A) == SKILL_A


class TestActionToMomentum:
    def test_point_mass(self):
        assert action_to_momentum({"A": 1.0}, C2M, DB) == DB["right_punch"]

    def test_weighted_sum_of_published_rows(self):
        # hand-evaluated: 0.7*row_A + 0.25*row_B + 0.05*row_C
        got = action_to_momentum({"A": 0.7, "B": 0.25, "C": 0.05}, C2M, DB)
        assert got.as_tuple() == pytest.approx((4.5610, 0.8685, 0.7745, 2.0230), abs=1e-9)

    def test_uniform_pair_is_midpoint(self):
        got = action_to_momentum({"A": 0.5, "B": 0.5}, C2M, DB)
        mid = [(a + b) / 2 for a, b in zip(DB["right_punch"], DB["left_kick"])]
        assert got.as_tuple() == pytest.approx(mid)

    def test_unmapped_counteraction(self):
        with pytest.raises(ConfigError, match="Z"):
            action_to_momentum({"Z": 1.0}, C2M, DB)

    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ConfigError):
            action_to_momentum({"A": 0.7, "B": 0.2}, C2M, DB)

    def test_convex_hull(self):
        rng = random.Random(3)
        for _ in range(200):
            w = [rng.random() for _ in range(3)]
            s = sum(w)
            row = {"A": w[0] / s, "B": w[1] / s}
            row["C"] = 1.0 - row["A"] - row["B"]
            got = action_to_momentum(row, C2M, DB)
            for i in range(4):
                col = [v.as_tuple()[i] for v in DB.values()]
                assert min(col) - 1e-12 <= got.as_tuple()[i] <= max(col) + 1e-12


def test_build_a2mm_and_csv(tmp_path):
    table = A2CTable({"x": {"A": 0.7, "B": 0.25, "C": 0.05}, "y": {"A": 0.0, "B": 0.0, "C": 1.0}})
    a2mm = build_a2mm(table, C2M, DB)
    assert a2mm["y"] == DB["crouch"]
    write_a2mm_csv(tmp_path / "a2mm.csv", a2mm)
    lines = (tmp_path / "a2mm.csv").read_text().splitlines()
    assert lines[0] == "action,arm_r,arm_l,leg_r,leg_l"
    assert [ln.split(",")[0] for ln in lines[1:]] == ["x", "y"]


@given(vectors)
def test_gap_structure(am):
    gap = compute_gap(am)
    assert min(gap) >= 0
    assert gap.arm_r * gap.arm_l == 0 and gap.leg_r * gap.leg_l == 0


@given(vectors, st.floats(1e-3, 1e3))
def test_scale_invariance_property(am, k):
    assert balancedness(am * k) == pytest.approx(balancedness(am), abs=1e-9)
