from __future__ import annotations

from dataclasses import dataclass, field
from typing import Final, Optional, Union

from k3curves.lattice import discriminant

CertificateValue = Union[int, bool]

CLAUSE_MODES: Final = ("corrected", "literal")
DEFAULT_MODE: Final = "corrected"

_ROMAN: Final = {3: "i", 4: "ii", 5: "iii", 6: "iv", 7: "v", 8: "vi", 9: "vii", 10: "viii"}


@dataclass(slots=True)
class ExistenceVerdict:
    exists: bool
    case_label: str
    certificate: Optional[dict[str, CertificateValue]] = None
    picard_note: Optional[str] = None
    notes: list[str] = field(default_factory=list)


@dataclass(frozen=True, slots=True)
class K3Model:
    genus: int
    model: str
    ambient: str
    intersection_type: tuple[int, ...] = ()

    @property
    def n(self) -> int:
        return self.genus - 1


MUKAI_MODELS: Final[dict[int, K3Model]] = {
    2: K3Model(2, "double covering with branch sextic", "P^2"),
    3: K3Model(3, "(4) ⊆ P^3", "P^3", (4,)),
    4: K3Model(4, "(2,3) ⊆ P^4", "P^4", (2, 3)),
    5: K3Model(5, "(2,2,2) ⊆ P^5", "P^5", (2, 2, 2)),
    6: K3Model(6, "(1,1,1,2) ∩ G(2,V^5) ⊆ P^6", "G(2,V^5)", (1, 1, 1, 2)),
    7: K3Model(7, "(1^8) ∩ Σ^10_12 ⊆ P^7", "Σ^10_12", (1,) * 8),
    8: K3Model(8, "(1^6) ∩ G(V^6,2) ⊆ P^8", "G(V^6,2)", (1,) * 6),
    9: K3Model(9, "(1^4) ∩ Σ^6_16 ⊆ P^9", "Σ^6_16", (1,) * 4),
    10: K3Model(10, "(1^3) ∩ Σ^5_18 ⊆ P^10", "Σ^5_18", (1,) * 3),
}


def mukai_model(mu: int) -> K3Model:
    if mu not in MUKAI_MODELS:
        raise ValueError(f"genus must be in [2, 10], got {mu}")
    return MUKAI_MODELS[mu]


def _check_surface_input(n: int, d: int, g: int) -> None:
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if d < 1:
        raise ValueError(f"d must be > 0, got {d}")
    if g < 0:
        raise ValueError(f"g must be >= 0, got {g}")


def _congruent_pm(value: int, residue: int, modulus: int) -> bool:
    return value % modulus in {residue % modulus, (-residue) % modulus}


def _divides(divisor: int, value: int) -> bool:
    return divisor != 0 and value % divisor == 0


def mainthm_case(n: int, d: int, g: int) -> str:
    """Δ band: 'i' (Δ = 0), 'ii' (0 < Δ < 4n), 'iii' (Δ = 4n), 'iv' (Δ > 4n), 'hodge' (Δ < 0)."""
    _check_surface_input(n, d, g)
    delta = discriminant(n, d, g)
    if delta < 0:
        return "hodge"
    if delta == 0:
        return "i"
    if delta < 4 * n:
        return "ii"
    if delta == 4 * n:
        return "iii"
    return "iv"


def rank_one_certificate(n: int, d: int) -> Optional[tuple[int, int]]:
    """Smallest k with n = k^2 m, (k, m) != (2, 1) and 2n | kd."""
    k = 1
    while k * k <= n:
        if n % (k * k) == 0:
            m = n // (k * k)
            if (k, m) != (2, 1) and (k * d) % (2 * n) == 0:
                return k, m
        k += 1
    return None


def case_two_exclusions(n: int, d: int, g: int) -> tuple[str, ...]:
    """Every case-(ii) exclusion that holds, not just the first."""
    delta = discriminant(n, d, g)
    modulus = 2 * n
    fired: list[str] = []
    if _congruent_pm(d, 1, modulus) or _congruent_pm(d, 2, modulus):
        fired.append("a")
    if delta == 1 and (d % modulus) in {(n + 1) % modulus, (n - 1) % modulus}:
        fired.append("b")
    if delta == n and d % modulus == n:
        fired.append("c")
    if delta == 1 and (_divides(d - 1, modulus) or _divides(d + 1, modulus)):
        fired.append("d")
    return tuple(fired)


def k3_curve_exists(n: int, d: int, g: int) -> ExistenceVerdict:
    """Smooth curve of degree d and genus g on some K3 surface of degree 2n in P^{n+1}."""
    case = mainthm_case(n, d, g)
    delta = discriminant(n, d, g)
    if case == "hodge":
        return ExistenceVerdict(
            False,
            "mainthm.hodge",
            notes=[f"Δ = {delta} < 0 violates the Hodge index theorem"],
        )
    if case == "i":
        found = rank_one_certificate(n, d)
        if found is None:
            return ExistenceVerdict(False, "mainthm.i.excl", picard_note="rank1")
        k, m = found
        return ExistenceVerdict(
            True,
            "mainthm.i",
            certificate={"k": k, "m": m},
            picard_note="rank1",
            notes=[f"Pic S = Z(1/{k})H"],
        )
    if case == "ii":
        fired = case_two_exclusions(n, d, g)
        if fired:
            return ExistenceVerdict(False, f"mainthm.ii.excl.{fired[0]}", picard_note="rank2")
        return ExistenceVerdict(True, "mainthm.ii", picard_note="rank2")
    if case == "iii":
        if d % (2 * n) == 0:
            return ExistenceVerdict(False, "mainthm.iii.excl", picard_note="rank2")
        return ExistenceVerdict(True, "mainthm.iii", picard_note="rank2")
    if (d, g) == (2 * n + 1, n + 1):
        return ExistenceVerdict(False, "mainthm.iv.excl", picard_note="rank2")
    return ExistenceVerdict(True, "mainthm.iv", picard_note="rank2")


def quadric_generation(n: int, d: int, g: int) -> str:
    if n < 4 or not k3_curve_exists(n, d, g).exists:
        return "not-applicable"
    if mainthm_case(n, d, g) != "ii":
        return "quadrics"
    delta = discriminant(n, d, g)
    modulus = 2 * n
    if delta == 1 and _congruent_pm(3 * d, 3, modulus):
        return "quadrics-and-cubics"
    if delta == 9 and _congruent_pm(d, 3, modulus):
        return "quadrics-and-cubics"
    return "quadrics"


def curve_class_nef(n: int, d: int, g: int) -> bool:
    _check_surface_input(n, d, g)
    return g != 0 and (d, g) != (2 * n + 1, n + 1)


def curve_class_smooth_member(n: int, d: int, g: int) -> bool:
    _check_surface_input(n, d, g)
    if g == 0:
        return True
    if (d, g) == (2 * n + 1, n + 1):
        return False
    if discriminant(n, d, g) == 1 and (_divides(d - 1, 2 * n) or _divides(d + 1, 2 * n)):
        return False
    return True


@dataclass(frozen=True, slots=True)
class _BoundaryClause:
    """d^2 = coefficient * g - offset, optionally with d mod modulus in residues."""

    coefficient: int
    offset: int
    modulus: Optional[int] = None
    residues: frozenset[int] = frozenset()

    def holds(self, d: int, g: int) -> bool:
        if d * d != self.coefficient * g - self.offset:
            return False
        return self.modulus is None or d % self.modulus in self.residues


_BOUNDARY: Final[dict[int, _BoundaryClause]] = {
    4: _BoundaryClause(12, 3),
    5: _BoundaryClause(16, 0, 8, frozenset({4})),
    6: _BoundaryClause(20, 4),
    8: _BoundaryClause(28, 3),
    9: _BoundaryClause(32, 0, 16, frozenset({8})),
    10: _BoundaryClause(36, 0, 18, frozenset({6, 12})),
}
_LITERAL_GENUS_NINE = _BoundaryClause(28, 0, 16, frozenset({8}))
# Genera whose dependent clause prints the divisibility 2(mu - 1) | d.
_PRINTED_DIVISIBILITY: Final = frozenset({5, 9, 10})


def boundary_clause(mu: int, *, mode: str = DEFAULT_MODE) -> Optional[_BoundaryClause]:
    if mode not in CLAUSE_MODES:
        raise ValueError(f"mode must be one of {CLAUSE_MODES}, got {mode!r}")
    if mu == 9 and mode == "literal":
        return _LITERAL_GENUS_NINE
    return _BOUNDARY.get(mu)


def bn_curve_exists(mu: int, d: int, g: int, *, mode: str = DEFAULT_MODE) -> ExistenceVerdict:
    """Smooth curve of degree d and genus g on a BN general K3 surface of genus mu."""
    if mu not in _ROMAN:
        raise ValueError(f"genus must be in [3, 10], got {mu}")
    if d < 1:
        raise ValueError(f"d must be > 0, got {d}")
    if g < 0:
        raise ValueError(f"g must be >= 0, got {g}")
    n = mu - 1
    roman = _ROMAN[mu]
    boundary = boundary_clause(mu, mode=mode)
    strict_letter = "c" if boundary is not None else "b"

    if d * d == 4 * n * (g - 1) and d % (2 * n) == 0:
        certificate: dict[str, CertificateValue] = {
            "hypersurface_degree": d // (2 * n),
            "divisibility_printed": mu in _PRINTED_DIVISIBILITY,
        }
        return ExistenceVerdict(True, f"bncurves.{roman}.a", certificate=certificate, picard_note="rank1")
    if boundary is not None and boundary.holds(d, g):
        return ExistenceVerdict(True, f"bncurves.{roman}.b", picard_note="rank2")
    if 4 * n * g < d * d:
        if (d, g) == (2 * mu - 1, mu):
            return ExistenceVerdict(False, f"bncurves.{roman}.{strict_letter}.excl")
        return ExistenceVerdict(True, f"bncurves.{roman}.{strict_letter}", picard_note="rank2")
    return ExistenceVerdict(False, f"bncurves.{roman}.none")
