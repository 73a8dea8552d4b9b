from fractions import Fraction

import pytest
from pydantic import ValidationError

from seifill.models import (
    INNER,
    BPattern,
    Hole,
    HoleKind,
    Leg,
    Presentation,
    SignedTwist,
    SublinkChoice,
    pair_key,
    sort_holes,
)


class TestHole:
    def test_names_round_trip(self):
        hole = Hole.parse("R2.3.1")
        assert hole.kind is HoleKind.RHO
        assert (hole.leg, hole.level, hole.index) == (2, 3, 1)
        assert hole.name == "R2.3.1"
        assert Hole.model_validate("in") == INNER

    def test_dumps_as_name(self):
        assert Hole.parse("L1.1.2").model_dump() == "L1.1.2"

    @pytest.mark.parametrize("name", ["X1.1.1", "L1.1", "R0.1.1", "inner"])
    def test_rejects_bad_names(self, name):
        with pytest.raises(ValueError):
            Hole.parse(name)

    def test_canonical_order(self):
        holes = [Hole.parse(n) for n in ["R1.1.1", "L3.1.2", "out", "L3.1.1", "in"]]
        assert [h.name for h in sort_holes(holes)] == [
            "in",
            "out",
            "L3.1.1",
            "L3.1.2",
            "R1.1.1",
        ]
        assert pair_key(Hole.parse("R1.1.1"), INNER) == "in|R1.1.1"


class TestSignedTwist:
    def test_holes_from_names(self):
        twist = SignedTwist(sign=-1, holes=["R1.1.1", "in"])
        assert twist.names == ("in", "R1.1.1")
        assert twist.model_dump()["holes"] == ["in", "R1.1.1"]

    def test_rejects_empty_and_bad_sign(self):
        with pytest.raises(ValidationError):
            SignedTwist(sign=1, holes=[])
        with pytest.raises(ValidationError):
            SignedTwist(sign=2, holes=["in"])


class TestLeg:
    def test_stabilization_counts(self):
        leg = Leg(coefficients=(-3, -3), rotations=(2, 1))
        assert [leg.stab_count(j) for j in (1, 2)] == [2, 1]
        assert leg.lambda_count(1) == 2
        assert leg.rho_count(1) == 0
        assert leg.tb(1) == -3
        assert leg.r == Fraction(3, 8)

    @pytest.mark.parametrize(
        ("coefficients", "rotations", "invariant"),
        [
            ((-2, -1), (1, 0), "coefficient invariant"),
            ((-3,), (2, 0), "rotation count invariant"),
            ((-3,), (4,), "rotation range invariant"),
            ((-3,), (1,), "rotation parity invariant"),
        ],
    )
    def test_invariant_violations_are_named(self, coefficients, rotations, invariant):
        with pytest.raises(ValidationError, match=invariant):
            Leg(coefficients=coefficients, rotations=rotations)

    def test_mirrored_and_truncated(self):
        leg = Leg(coefficients=(-2, -3, -2), rotations=(-1, -1, 0))
        assert leg.mirrored().rotations == (1, 1, 0)
        assert leg.truncated(2).coefficients == (-2, -3)


def test_presentation_needs_three_legs():
    leg = Leg(coefficients=(-2,), rotations=(1,))
    with pytest.raises(ValidationError, match="three-leg invariant"):
        Presentation(legs=(leg, leg))


def test_presentation_mirror(sample_presentation):
    mirrored = sample_presentation.mirror()
    assert mirrored.leg(3).rotations == (-2, -1)
    assert mirrored.r_values == sample_presentation.r_values


def test_sublink_choice_sums_to_one():
    with pytest.raises(ValidationError):
        SublinkChoice(
            positive_leg=1,
            negative_leg=2,
            trunc_pos=1,
            trunc_neg=1,
            s_pos="1/3",
            s_neg="1/3",
        )
    choice = SublinkChoice(
        positive_leg=1, negative_leg=2, trunc_pos=1, trunc_neg=1, s_pos="1/2", s_neg="1/2"
    )
    assert choice.model_dump(mode="json")["s_pos"] == "1/2"


def test_bpattern_needs_even_runs():
    with pytest.raises(ValidationError):
        BPattern(runs=(1, 0, 2))
    with pytest.raises(ValidationError):
        BPattern(runs=(1, -1))
