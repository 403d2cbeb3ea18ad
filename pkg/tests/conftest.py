from fractions import Fraction

import pytest

from clearpack.packing import Instance, ObjectSpec, Region, derive_parameters


@pytest.fixture
def square_pair():
    """Two clearance-free 2x2 objects in a 10x10 region."""
    return Instance(
        Region(Fraction(10), Fraction(10)),
        (ObjectSpec(1, Fraction(2), Fraction(2)), ObjectSpec(2, Fraction(2), Fraction(2))),
    )


@pytest.fixture
def square_pair_params(square_pair):
    return derive_parameters(square_pair)
