from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor

import pytest

from k3curves.existence import curve_class_nef
from k3curves.lattice import C_CLASS, H_CLASS, ZERO, DivisorClass, build_lattice
from k3curves.oracle import (
    OracleContext,
    OracleError,
    effectivity,
    h0,
    h_is_ample,
    irreducible_curves,
    is_effective,
    is_irreducible,
    is_nef,
    minus_two_classes,
    nef_h0,
)


def test_ampleness_formula() -> None:
    assert h_is_ample(2, 3, 1)
    assert not h_is_ample(9, 9, 3)
    assert not h_is_ample(2, 4, 2)
    assert h_is_ample(8, 8, 2)


def test_non_ample_context_is_rejected() -> None:
    ctx = OracleContext.for_triple(2, 4, 2)
    with pytest.raises(OracleError, match="requires ample H"):
        is_effective(ctx, H_CLASS)


def test_minus_two_classes() -> None:
    assert minus_two_classes(OracleContext.for_triple(2, 3, 1), 5) == [DivisorClass(1, -1)]
    assert minus_two_classes(OracleContext.for_triple(2, 5, 1), 10) == []
    ctx = OracleContext.for_triple(3, 7, 4)
    for gamma in minus_two_classes(ctx, 3):
        assert ctx.lattice.square(gamma) == -2
        assert 0 < ctx.lattice.degree(gamma) <= 3


def test_effectivity_branches() -> None:
    ctx = OracleContext.for_triple(2, 3, 1)
    assert effectivity(ctx, ZERO).reason == "zero"
    assert effectivity(ctx, DivisorClass(1, -1)).reason == "riemann-roch"
    stripped = effectivity(ctx, DivisorClass(2, -2))
    assert stripped.effective and stripped.reason == "stripped"
    assert stripped.chain == (DivisorClass(1, -1),)
    assert not is_effective(OracleContext.for_triple(8, 8, 2), DivisorClass(1, -2))
    assert not is_effective(ctx, DivisorClass(-1, 0))


def test_nef_examples() -> None:
    ctx = OracleContext.for_triple(2, 3, 1)
    assert is_nef(ctx, C_CLASS)
    assert not is_nef(ctx, DivisorClass(1, -1))
    assert is_nef(OracleContext.for_triple(3, 7, 4), H_CLASS)


def test_curve_class_nef_agrees_with_oracle() -> None:
    assert is_nef(OracleContext.for_triple(2, 3, 1), C_CLASS) == curve_class_nef(2, 3, 1)
    ctx = OracleContext.for_triple(2, 5, 3)
    assert is_irreducible(ctx, C_CLASS - H_CLASS)
    assert not is_nef(ctx, C_CLASS)
    assert not curve_class_nef(2, 5, 3)


def test_h0_examples() -> None:
    assert h0(OracleContext.for_triple(6, 5, 1), DivisorClass(1, -1)).h0 == 3
    ctx = OracleContext.for_triple(2, 3, 1)
    assert h0(ctx, DivisorClass(0, 2)).h0 == 3
    result = h0(ctx, DivisorClass(2, -2))
    assert result.h0 == 1
    assert result.nef_model == ZERO
    assert result.stripped == [DivisorClass(1, -1), DivisorClass(1, -1)]
    assert h0(OracleContext.for_triple(8, 8, 2), DivisorClass(1, -2)).h0 == 0
    zero = h0(ctx, ZERO)
    assert zero.h0 == 1 and zero.zero_input


@pytest.mark.parametrize("triple", [(2, 3, 1), (3, 7, 4), (5, 6, 2), (8, 8, 2), (9, 9, 2)])
def test_h0_of_polarization(triple: tuple[int, int, int]) -> None:
    assert h0(OracleContext.for_triple(*triple), H_CLASS).h0 == triple[0] + 2


def test_stripping_order_does_not_matter() -> None:
    ctx = OracleContext.for_triple(2, 3, 1)
    divisor = DivisorClass(3, -3)
    first = h0(ctx, divisor)
    last = h0(ctx, divisor, pick=lambda candidates: candidates[-1])
    assert (first.h0, first.nef_model) == (last.h0, last.nef_model)


def test_irreducible_requires_minus_two_class() -> None:
    ctx = OracleContext.for_triple(2, 3, 1)
    with pytest.raises(ValueError):
        is_irreducible(ctx, H_CLASS)
    assert irreducible_curves(ctx, 6) == [DivisorClass(1, -1)]


def test_nef_h0_rejects_negative_model() -> None:
    with pytest.raises(OracleError):
        nef_h0(build_lattice(2, 3, 1), DivisorClass(1, -1))


def test_shared_context_is_coherent_across_threads() -> None:
    ctx = OracleContext.for_triple(7, 6, 2)
    divisors = [DivisorClass(a, b) for a in range(0, 3) for b in range(-3, 4)] * 4
    with ThreadPoolExecutor(max_workers=8) as executor:
        parallel = list(executor.map(lambda divisor: h0(ctx, divisor).h0, divisors))
    fresh = OracleContext.for_triple(7, 6, 2)
    assert parallel == [h0(fresh, divisor).h0 for divisor in divisors]


def test_long_stripping_chain_does_not_recurse() -> None:
    ctx = OracleContext.for_triple(2, 3, 1)
    found = effectivity(ctx, DivisorClass(1200, -1200))
    assert found.effective and found.reason == "stripped"
    assert set(found.chain) == {DivisorClass(1, -1)}
    assert is_effective(ctx, DivisorClass(1200, -1199))


BOX_TRIPLES = [(2, 3, 1), (3, 7, 4), (4, 5, 2), (5, 6, 2), (6, 5, 2)]
BOX_DEGREE_LIMIT = 30


def _box(ctx: OracleContext) -> list[DivisorClass]:
    return [
        DivisorClass(a, b)
        for a in range(-6, 7)
        for b in range(-6, 7)
        if ctx.lattice.degree(DivisorClass(a, b)) <= BOX_DEGREE_LIMIT
    ]


@pytest.mark.parametrize("triple", BOX_TRIPLES)
def test_h0_positive_exactly_on_effective_classes(triple: tuple[int, int, int]) -> None:
    ctx = OracleContext.for_triple(*triple)
    for divisor in _box(ctx):
        result = h0(ctx, divisor)
        assert (result.h0 >= 1) == (divisor.is_zero or is_effective(ctx, divisor)), divisor
        if is_effective(ctx, divisor) and not divisor.is_zero:
            assert 2 * result.h0 >= ctx.lattice.square(divisor) + 4, divisor


@pytest.mark.parametrize("triple", BOX_TRIPLES)
def test_nef_classes_are_effective_with_nonnegative_square(triple: tuple[int, int, int]) -> None:
    ctx = OracleContext.for_triple(*triple)
    for divisor in _box(ctx):
        if is_nef(ctx, divisor):
            assert ctx.lattice.square(divisor) >= 0, divisor
            assert divisor.is_zero or is_effective(ctx, divisor), divisor


@pytest.mark.parametrize("triple", BOX_TRIPLES + [(8, 8, 2), (9, 9, 2)])
def test_minus_two_classes_are_distinct(triple: tuple[int, int, int]) -> None:
    ctx = OracleContext.for_triple(*triple)
    found = minus_two_classes(ctx, 2 * triple[0])
    assert len(found) == len(set(found))
    assert all(ctx.lattice.square(gamma) == -2 for gamma in found)


@pytest.mark.parametrize("triple", BOX_TRIPLES)
def test_random_stripping_order_gives_same_model(triple: tuple[int, int, int]) -> None:
    ctx = OracleContext.for_triple(*triple)
    rng = random.Random(f"strip:{triple}")
    for divisor in _box(ctx):
        default = h0(ctx, divisor)
        shuffled = h0(ctx, divisor, pick=rng.choice)
        assert (default.h0, default.nef_model) == (shuffled.h0, shuffled.nef_model), divisor
