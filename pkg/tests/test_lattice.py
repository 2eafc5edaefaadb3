from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from k3curves.lattice import (
    C_CLASS,
    H_CLASS,
    DivisorClass,
    IntersectionLattice,
    LatticeError,
    build_lattice,
    classes_on_degree_line,
    degree,
    disc_pair,
    intersect,
    minus_two_on_degree_line,
)

coords = st.integers(min_value=-60, max_value=60)
classes = st.builds(DivisorClass, coords, coords)


@st.composite
def lattices(draw: st.DrawFn) -> IntersectionLattice:
    n = draw(st.integers(min_value=2, max_value=12))
    d = draw(st.integers(min_value=1, max_value=40))
    # Δ > 0 exactly when g - 1 <= (d^2 - 1) // 4n.
    g = draw(st.integers(min_value=0, max_value=min(40, (d * d - 1) // (4 * n) + 1)))
    return build_lattice(n, d, g)


def test_gram_matrix() -> None:
    assert build_lattice(3, 7, 4).gram == ((6, 7), (7, 6))
    assert build_lattice(2, 3, 1).gram == ((4, 3), (3, 0))


def test_build_lattice_rejects_non_hyperbolic() -> None:
    with pytest.raises(LatticeError) as excinfo:
        build_lattice(2, 3, 3)
    assert excinfo.value.bound == "delta"
    with pytest.raises(LatticeError) as excinfo:
        build_lattice(2, 4, 3)
    assert excinfo.value.bound == "delta"


@pytest.mark.parametrize(
    ("triple", "bound"),
    [((1, 3, 1), "n"), ((2, 0, 1), "d"), ((2, 3, -1), "g")],
)
def test_range_errors_name_the_bound(triple: tuple[int, int, int], bound: str) -> None:
    with pytest.raises(LatticeError) as excinfo:
        build_lattice(*triple)
    assert excinfo.value.bound == bound


def test_intersection_examples() -> None:
    assert intersect(build_lattice(2, 5, 1), H_CLASS, C_CLASS) == 5
    assert build_lattice(8, 8, 2).square(DivisorClass(1, -1)) == 2
    assert build_lattice(2, 3, 1).square(DivisorClass(1, -1)) == -2


def test_degree_examples() -> None:
    assert degree(build_lattice(2, 3, 1), DivisorClass(1, -1)) == 1
    assert degree(build_lattice(8, 8, 2), DivisorClass(1, -2)) == 0
    assert degree(build_lattice(3, 7, 4), C_CLASS) == 7


def test_disc_pair_examples() -> None:
    assert disc_pair(build_lattice(2, 5, 3), H_CLASS, C_CLASS) == 9
    assert disc_pair(build_lattice(3, 7, 4), H_CLASS, C_CLASS) == 13
    lattice = build_lattice(3, 7, 4)
    assert lattice.disc_pair(DivisorClass(2, -5), DivisorClass(2, -5)) == 0


def test_class_formatting() -> None:
    assert str(DivisorClass(1, -1)) == "H-C"
    assert str(DivisorClass(2, -3)) == "2H-3C"
    assert str(DivisorClass(0, 1)) == "C"
    assert str(DivisorClass(-1, 2)) == "-H+2C"
    assert str(DivisorClass(0, 0)) == "0"


def test_minus_two_on_degree_line() -> None:
    lattice = build_lattice(2, 3, 1)
    assert minus_two_on_degree_line(lattice, 1) == [DivisorClass(1, -1)]
    assert minus_two_on_degree_line(lattice, 2) == []
    assert minus_two_on_degree_line(build_lattice(2, 5, 1), 1) == []


@settings(max_examples=200)
@given(lattices(), classes, classes, classes)
def test_pairing_is_symmetric_and_bilinear(
    lattice: IntersectionLattice, first: DivisorClass, second: DivisorClass, third: DivisorClass
) -> None:
    assert lattice.intersect(first, second) == lattice.intersect(second, first)
    assert lattice.intersect(first + second, third) == lattice.intersect(first, third) + lattice.intersect(second, third)
    assert lattice.square(first) % 2 == 0


@settings(max_examples=200)
@given(lattices(), classes, classes)
def test_disc_pair_is_delta_times_determinant_squared(
    lattice: IntersectionLattice, first: DivisorClass, second: DivisorClass
) -> None:
    det = first.a * second.b - second.a * first.b
    assert lattice.disc_pair(first, second) == lattice.delta * det * det


@settings(max_examples=200)
@given(lattices(), classes)
def test_degree_line_identity(lattice: IntersectionLattice, divisor: DivisorClass) -> None:
    t = lattice.degree(divisor)
    assert 2 * lattice.n * lattice.square(divisor) == t * t - lattice.delta * divisor.b * divisor.b


@settings(max_examples=100)
@given(lattices(), st.integers(min_value=1, max_value=15))
def test_degree_line_enumeration_is_complete(lattice: IntersectionLattice, t: int) -> None:
    found = classes_on_degree_line(lattice, t, min_square=-2)
    assert found == sorted(found, key=DivisorClass.as_pair)
    for divisor in found:
        assert lattice.degree(divisor) == t
        assert lattice.square(divisor) >= -2
    minus_two = minus_two_on_degree_line(lattice, t)
    assert minus_two == [divisor for divisor in found if lattice.square(divisor) == -2]
