from __future__ import annotations

import pytest

from k3curves.bn import (
    RESIDUAL_BN_GENERAL,
    RESIDUAL_TRIPLES,
    ROUTES,
    BnVerdict,
    UndecidedError,
    Witness,
    bn_general,
    oracle_bn_general,
    prodell,
    reduce_small1,
    reduce_small2,
    residual_product,
)
from k3curves.lattice import C_CLASS, H_CLASS, DivisorClass, LatticeError, discriminant
from k3curves.oracle import OracleContext, OracleError, h_is_ample

ELL_THRESHOLDS = {2: 3, 3: 3, 4: 4, 5: 4, 6: 5, 7: 5, 8: 6, 9: 6}


def test_residual_case_with_witness() -> None:
    verdict = bn_general(6, 6, 2)
    assert not verdict.bn_general
    assert verdict.route == "residual-table"
    assert verdict.witness == Witness(H_CLASS - C_CLASS, C_CLASS, 3, 3)
    assert verdict.witness.product == 9


@pytest.mark.parametrize("triple", RESIDUAL_TRIPLES)
def test_residual_table(triple: tuple[int, int, int]) -> None:
    verdict = bn_general(*triple)
    assert verdict.bn_general == (triple in RESIDUAL_BN_GENERAL)
    if not verdict.bn_general and verdict.witness is not None:
        assert verdict.witness.product == residual_product(*triple)
        assert verdict.witness.product >= triple[0] + 2


def test_closed_form_routes() -> None:
    assert bn_general(5, 7, 0).route == "rational"
    assert bn_general(5, 7, 0).bn_general
    assert bn_general(3, 9, 4).route == "triangle"
    elliptic = bn_general(4, 3, 1)
    assert not elliptic.bn_general and elliptic.route == "elliptic-threshold"
    assert elliptic.witness is not None and elliptic.witness.product >= 6


def test_rank_one_boundary() -> None:
    verdict = bn_general(8, 8, 3)
    assert verdict.route == "rank-one" and not verdict.bn_general
    assert bn_general(2, 4, 3).bn_general


def test_negative_discriminant_is_rejected() -> None:
    with pytest.raises(LatticeError):
        bn_general(2, 2, 2)


def test_non_ample_polarization_is_undecided() -> None:
    with pytest.raises(UndecidedError, match="H not ample"):
        bn_general(2, 4, 2)


def test_reduction_routes_record_their_steps() -> None:
    verdict = bn_general(3, 8, 5)
    assert verdict.bn_general
    assert verdict.route == "reduction"
    assert verdict.detail == "rational"
    assert verdict.steps == ("small1",)
    assert verdict.reduced == (3, 2, 0)

    reflected = bn_general(6, 7, 3)
    assert reflected.steps == ("small2",)
    assert reflected.reduced == (6, 5, 2)


@pytest.mark.parametrize("n", sorted(ELL_THRESHOLDS))
def test_elliptic_thresholds(n: int) -> None:
    general = [d for d in range(1, 2 * n + 1) if bn_general(n, d, 1).bn_general]
    assert min(general) == ELL_THRESHOLDS[n]
    assert general == list(range(ELL_THRESHOLDS[n], 2 * n + 1))


def test_prodell_examples() -> None:
    assert prodell(6, 5, 1) == 6
    assert prodell(6, 4, 1) == 8
    assert prodell(6, 5, 2) == 0
    with pytest.raises(ValueError):
        prodell(6, 5, 0)


def test_reduce_small1_examples() -> None:
    assert reduce_small1(3, 8, 5) == (2, 0, 1)
    assert reduce_small1(2, 7, 2) == (7, 2, 0)
    assert reduce_small1(4, 4, 1) == (4, 1, 0)
    with pytest.raises(LatticeError):
        reduce_small1(2, 2, 2)


def test_reduce_small2_examples() -> None:
    assert reduce_small2(8, 8, 2) == (8, 2)
    assert reduce_small2(6, 7, 3) == (5, 2)
    assert reduce_small2(6, 5, 2) == (7, 3)
    with pytest.raises(ValueError):
        reduce_small2(3, 6, 0)


def test_reductions_preserve_discriminant() -> None:
    for n in range(2, 7):
        for d in range(1, 6 * n + 1):
            for g in range(0, 25):
                delta = discriminant(n, d, g)
                if delta <= 0:
                    continue
                d0, g0, _ = reduce_small1(n, d, g)
                assert discriminant(n, d0, g0) == delta
                if n - d + g >= 0 and d <= 2 * n - 1:
                    assert discriminant(n, *reduce_small2(n, d, g)) == delta


def test_oracle_small_examples() -> None:
    assert oracle_bn_general(OracleContext.for_triple(2, 3, 1)).bn_general
    violated = oracle_bn_general(OracleContext.for_triple(6, 6, 2))
    assert not violated.bn_general
    assert violated.witness is not None
    assert violated.witness.first + violated.witness.second == H_CLASS
    assert violated.witness.product >= 8


def test_oracle_pruning_matches_hand_search() -> None:
    verdict = oracle_bn_general(OracleContext.for_triple(9, 9, 2))
    assert verdict.bn_general
    assert verdict.detail == "pruned"
    assert verdict.visited == (DivisorClass(1, -1),)


def test_oracle_box_and_pruned_searches_agree() -> None:
    for triple in [(6, 6, 2), (7, 7, 2), (7, 6, 2), (8, 8, 2), (9, 9, 2)]:
        ctx = OracleContext.for_triple(*triple)
        assert oracle_bn_general(ctx).bn_general == oracle_bn_general(ctx, prune=False).bn_general


def test_oracle_rejects_non_ample_context() -> None:
    with pytest.raises(OracleError):
        oracle_bn_general(OracleContext.for_triple(9, 9, 3))


def test_witness_normalization() -> None:
    witness = Witness(C_CLASS, H_CLASS - C_CLASS, 3, 3).normalized()
    assert witness.first == H_CLASS - C_CLASS
    assert witness.normal_form


def test_reflected_residual_triple_reports_the_reduction() -> None:
    verdict = bn_general(7, 8, 3)
    assert not verdict.bn_general
    assert verdict.route == "reduction"
    assert verdict.detail == "residual-table"
    assert verdict.steps == ("small2",)
    assert verdict.reduced == (7, 6, 2)
    assert verdict.witness == Witness(H_CLASS - C_CLASS, C_CLASS, 3, 4)


def test_fixed_point_of_reflection_uses_the_table() -> None:
    verdict = bn_general(9, 9, 3)
    assert verdict.route == "residual-table" and verdict.steps == ()
    assert not verdict.bn_general


@pytest.mark.parametrize("triple", RESIDUAL_TRIPLES + ((3, 8, 5), (6, 7, 3), (4, 3, 1), (5, 7, 0)))
def test_routes_are_known(triple: tuple[int, int, int]) -> None:
    verdict = bn_general(*triple)
    assert verdict.route in ROUTES
    assert not verdict.detail or verdict.detail in ROUTES + ("pruned", "box")


def test_verdict_rejects_unknown_route() -> None:
    with pytest.raises(ValueError, match="unknown route"):
        BnVerdict(True, "guess")


def _ample_box() -> list[tuple[int, int, int]]:
    return [
        (n, d, g)
        for n in range(2, 10)
        for d in range(1, 2 * n + 1)
        for g in range(0, n + 2)
        if discriminant(n, d, g) > 0 and h_is_ample(n, d, g)
    ]


@pytest.mark.slow
@pytest.mark.parametrize("triple", _ample_box())
def test_closed_forms_agree_with_unpruned_oracle(triple: tuple[int, int, int]) -> None:
    expected = oracle_bn_general(OracleContext.for_triple(*triple), prune=False).bn_general
    assert bn_general(*triple).bn_general == expected
