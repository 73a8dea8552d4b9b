import pytest

from seifill.models import Leg, Presentation
from seifill.services.fillability import find_sublinks
from seifill.services.openbook import translate_sublink


def make_presentation(*legs):
    """Build a presentation from ``(coefficients, rotations)`` pairs."""
    return Presentation(
        legs=tuple(Leg(coefficients=tuple(c), rotations=tuple(r)) for c, r in legs)
    )


@pytest.fixture
def sample_presentation():
    """Fillable structure whose legs 3 and 1 form a dual sublink."""
    return make_presentation(
        ([-2, -3, -2], [-1, -1, 0]),
        ([-2, -3], [-1, 1]),
        ([-3, -3], [2, 1]),
    )


@pytest.fixture
def sample_payload():
    return {
        "legs": [
            {"coeffs": [-2, -3, -2], "rot": [-1, -1, 0]},
            {"coeffs": [-2, -3], "rot": [-1, 1]},
            {"coeffs": [-3, -3], "rot": [2, 1]},
        ]
    }


@pytest.fixture
def sample_sublink_book(sample_presentation):
    """Sublink book of legs 3 ([-3,-3]) and 1 ([-2,-3,-2])."""
    return translate_sublink(sample_presentation, find_sublinks(sample_presentation)[0])


@pytest.fixture
def thirds_presentation():
    """M(-1; 1/3, 1/3, 1/3) with rotations (+2, -2, +2)."""
    return make_presentation(([-3], [2]), ([-3], [-2]), ([-3], [2]))


@pytest.fixture
def build_presentation():
    return make_presentation
