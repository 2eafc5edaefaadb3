"""Calabi-Yau families, their K3 constructions and the two admissibility classifiers.

``theorem_result`` reads the printed degree/genus clauses of a family as they
stand. ``derived_admissible`` recomputes admissibility from the pieces: some
construction of the family must carry the curve on its K3 surface and pass the
node-count and vanishing gates.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cache
from math import comb, prod
from typing import Final, Optional, Union

from k3curves import get_logger
from k3curves.existence import DEFAULT_MODE, bn_curve_exists

LOGGER = get_logger()

FAMILY_LABELS: Final = tuple("abcdefghijk")
ASSUMED_HYPOTHESES: Final = ("A4", "A5")

# (dimension, degree, dimension of the linear span) of each homogeneous ambient.
_HOMOGENEOUS: Final[dict[str, tuple[int, int, int]]] = {
    "G(2,V^5)": (6, 5, 9),
    "Σ^10_12": (10, 12, 15),
    "G(V^6,2)": (8, 14, 14),
    "Σ^6_16": (6, 16, 13),
    "Σ^5_18": (5, 18, 13),
}

_DESCRIPTOR = re.compile(r"^\((?P<degrees>[0-9^,]+)\)(?: ∩ (?P<space>\S+))? ⊆ P\^(?P<span>\d+)$")

# The (5) family's quadratic clause admits (12, 12), but the sextic route has
# Δ = 4n with 6 | d and the quartic route fails the vanishing gate.
KNOWN_SUBSET_DISCREPANCIES: Final = frozenset({("a", 12, 12)})


class RegistryError(RuntimeError):
    pass


def parse_type(descriptor: str) -> tuple[tuple[int, ...], str, int]:
    """'(2,1^6) ∩ Σ^10_12 ⊆ P^9' -> ((2, 1, 1, 1, 1, 1, 1), 'Σ^10_12', 9)."""
    match = _DESCRIPTOR.match(descriptor.strip())
    if match is None:
        raise ValueError(f"cannot parse intersection type {descriptor!r}")
    degrees: list[int] = []
    for token in match.group("degrees").split(","):
        base, _, power = token.partition("^")
        degrees.extend([int(base)] * (int(power) if power else 1))
    span = int(match.group("span"))
    space = match.group("space") or f"P^{span}"
    return tuple(degrees), space, span


@dataclass(frozen=True, slots=True)
class K3Construction:
    k3_descriptor: str
    k3_type: tuple[int, ...]
    cy_type: tuple[int, ...]
    ambient: str
    ambient_degree: int
    m: int
    mu: int
    min_a: int
    assumed: tuple[str, ...] = ASSUMED_HYPOTHESES

    def __str__(self) -> str:
        return f"{self.k3_descriptor} (μ={self.mu}, m={self.m})"


@dataclass(frozen=True, slots=True)
class QuadraticClause:
    """d^2 >= coefficient * g - offset (strictly greater when ``strict``) on a genus band."""

    coefficient: int
    offset: int
    g_low: int
    g_high: int
    strict: bool = False

    def covers(self, g: int) -> bool:
        return self.g_low <= g <= self.g_high

    def holds(self, d: int, g: int) -> bool:
        bound = self.coefficient * g - self.offset
        return d * d > bound if self.strict else d * d >= bound


@dataclass(frozen=True, slots=True)
class LinearClause:
    """d > g / slope_divisor + constant, compared as slope_divisor * d > g + slope_divisor * constant."""

    constant: int
    g_low: int
    g_high: int
    slope_divisor: int = 1

    def covers(self, g: int) -> bool:
        return self.g_low <= g <= self.g_high

    def holds(self, d: int, g: int) -> bool:
        return self.slope_divisor * d > g + self.slope_divisor * self.constant


@dataclass(frozen=True, slots=True)
class TheoremConditions:
    quadratic: QuadraticClause
    linear: LinearClause
    special_pairs: frozenset[tuple[int, int]] = frozenset()

    @property
    def genus_cap(self) -> int:
        return self.linear.g_high


@dataclass(frozen=True, slots=True)
class CyFamily:
    label: str
    cy_descriptor: str
    constructions: tuple[K3Construction, ...]
    theorem_conditions: TheoremConditions

    @property
    def cy_type(self) -> tuple[int, ...]:
        return parse_type(self.cy_descriptor)[0]


@dataclass(slots=True)
class FamilyVerdict:
    admissible: bool
    via: str
    construction_used: Optional[K3Construction] = None
    clause: str = ""
    notes: list[str] = field(default_factory=list)


def _construction(
    k3_descriptor: str, cy_descriptor: str, m: int, mu: int, min_a: int, *, ambient_degree: int = 1
) -> K3Construction:
    k3_type, space, _ = parse_type(k3_descriptor)
    return K3Construction(
        k3_descriptor=k3_descriptor,
        k3_type=k3_type,
        cy_type=parse_type(cy_descriptor)[0],
        ambient=space,
        ambient_degree=ambient_degree,
        m=m,
        mu=mu,
        min_a=min_a,
    )


def _family(
    label: str,
    cy_descriptor: str,
    rows: list[tuple[str, int, int, int]],
    conditions: TheoremConditions,
    *,
    ambient_degree: int = 1,
) -> CyFamily:
    constructions = tuple(
        _construction(k3, cy_descriptor, m, mu, min_a, ambient_degree=ambient_degree)
        for k3, m, mu, min_a in rows
    )
    return CyFamily(label, cy_descriptor, constructions, conditions)


_LOW_PAIRS: Final = frozenset({(3, 1), (5, 2)})

_GRASSMANNIAN_K3: Final = "(2,1,1,1) ∩ G(2,V^5) ⊆ P^6"


def _build_families() -> tuple[CyFamily, ...]:
    return (
        _family(
            "a",
            "(5) ⊆ P^4",
            [("(4,1) ⊆ P^4", 16, 3, 1), ("(3,2) ⊆ P^4", 36, 4, 2)],
            TheoremConditions(QuadraticClause(12, 3, 0, 12), LinearClause(6, 13, 34, slope_divisor=2)),
        ),
        _family(
            "b",
            "(4,2) ⊆ P^5",
            [("(4,1,1) ⊆ P^5", 4, 3, 1), ("(3,2,1) ⊆ P^5", 18, 4, 1), ("(2,2,2) ⊆ P^5", 32, 5, 2)],
            TheoremConditions(QuadraticClause(16, 0, 0, 15), LinearClause(8, 16, 30, slope_divisor=2), _LOW_PAIRS),
        ),
        _family(
            "c",
            "(3,3) ⊆ P^5",
            [("(3,2,1) ⊆ P^5", 12, 4, 1), ("(2,2,2) ⊆ P^5", 32, 5, 2)],
            TheoremConditions(QuadraticClause(16, 0, 0, 15), LinearClause(8, 16, 30, slope_divisor=2), _LOW_PAIRS),
        ),
        _family(
            "d",
            "(3,2,2) ⊆ P^6",
            [("(3,2,1,1) ⊆ P^6", 6, 4, 1), ("(2,2,2,1) ⊆ P^6", 16, 5, 1)],
            TheoremConditions(QuadraticClause(16, 0, 0, 4), LinearClause(4, 5, 14), _LOW_PAIRS),
        ),
        _family(
            "e",
            "(2,2,2,2) ⊆ P^7",
            [("(2,2,2,1,1) ⊆ P^7", 8, 5, 1)],
            TheoremConditions(QuadraticClause(16, 0, 0, 3), LinearClause(4, 4, 6)),
        ),
        _family(
            "f",
            "(3,1,1) ∩ G(2,V^5) ⊆ P^7",
            [(_GRASSMANNIAN_K3, 20, 6, 1)],
            TheoremConditions(QuadraticClause(20, 4, 0, 4), LinearClause(5, 5, 18)),
            ambient_degree=5,
        ),
        _family(
            "g",
            "(2,2,1) ∩ G(2,V^5) ⊆ P^8",
            [(_GRASSMANNIAN_K3, 10, 6, 1)],
            TheoremConditions(QuadraticClause(20, 4, 0, 4), LinearClause(5, 5, 8)),
            ambient_degree=5,
        ),
        _family(
            "h",
            "(2,1^6) ∩ Σ^10_12 ⊆ P^9",
            [("(1^8) ∩ Σ^10_12 ⊆ P^7", 12, 7, 1)],
            TheoremConditions(QuadraticClause(24, 0, 0, 5, strict=True), LinearClause(6, 6, 10)),
            ambient_degree=12,
        ),
        _family(
            "i",
            "(2,1^4) ∩ G(V^6,2) ⊆ P^10",
            [("(1^6) ∩ G(V^6,2) ⊆ P^8", 14, 8, 1)],
            TheoremConditions(QuadraticClause(28, 3, 0, 6), LinearClause(7, 7, 12)),
            ambient_degree=14,
        ),
        _family(
            "j",
            "(2,1,1) ∩ Σ^6_16 ⊆ P^11",
            [("(1^4) ∩ Σ^6_16 ⊆ P^9", 16, 9, 1)],
            TheoremConditions(QuadraticClause(32, 0, 0, 7), LinearClause(8, 8, 14)),
            ambient_degree=16,
        ),
        _family(
            "k",
            "(2,1) ∩ Σ^5_18 ⊆ P^12",
            [("(1^3) ∩ Σ^5_18 ⊆ P^10", 18, 10, 1)],
            TheoremConditions(QuadraticClause(36, 0, 0, 8), LinearClause(9, 9, 16)),
            ambient_degree=18,
        ),
    )


def _expected_dimension(descriptor: str) -> int:
    degrees, space, span = parse_type(descriptor)
    if space in _HOMOGENEOUS:
        dimension, _, linear_span = _HOMOGENEOUS[space]
        if linear_span - degrees.count(1) != span:
            raise RegistryError(f"{descriptor}: hyperplane sections do not cut the span down to P^{span}")
        return dimension - len(degrees)
    return span - len(degrees)


def _validate_construction(family_label: str, cy_descriptor: str, row: K3Construction) -> list[str]:
    problems: list[str] = []
    where = f"family ({family_label}) {row.k3_descriptor}"
    if row.min_a != min(row.k3_type):
        problems.append(f"{where}: min_a {row.min_a} != {min(row.k3_type)}")
    if row.min_a not in (1, 2):
        problems.append(f"{where}: min_a must be 1 or 2")
    if row.ambient in _HOMOGENEOUS and _HOMOGENEOUS[row.ambient][1] != row.ambient_degree:
        problems.append(f"{where}: ambient degree {row.ambient_degree} does not match {row.ambient}")
    sectional = row.ambient_degree * prod(row.k3_type)
    if sectional % 2 or sectional // 2 + 1 != row.mu:
        problems.append(f"{where}: μ = {row.mu} but the type gives H^2 = {sectional}")
    try:
        if _expected_dimension(row.k3_descriptor) != 2:
            problems.append(f"{where}: not a surface")
        if _expected_dimension(cy_descriptor) != 3:
            problems.append(f"{where}: {cy_descriptor} is not a threefold")
    except RegistryError as exc:
        problems.append(str(exc))
    k3_sorted = sorted(row.k3_type, reverse=True)
    cy_sorted = sorted(row.cy_type, reverse=True)
    if len(k3_sorted) != len(cy_sorted) + 1:
        problems.append(f"{where}: K3 type must have one more equation than {cy_descriptor}")
    elif any(not 1 <= a <= b for a, b in zip(k3_sorted, cy_sorted)):
        problems.append(f"{where}: degrees {tuple(k3_sorted)} do not pair below {tuple(cy_sorted)}")
    return problems


def validate_family(item: CyFamily) -> list[str]:
    problems: list[str] = []
    for row in item.constructions:
        problems.extend(_validate_construction(item.label, item.cy_descriptor, row))
    carrier = max(item.constructions, key=lambda row: row.m)
    conditions = item.theorem_conditions
    if conditions.genus_cap != carrier.m - 2:
        problems.append(f"family ({item.label}): genus cap {conditions.genus_cap} != m - 2 = {carrier.m - 2}")
    if conditions.quadratic.coefficient != 4 * (carrier.mu - 1):
        problems.append(
            f"family ({item.label}): quadratic slope {conditions.quadratic.coefficient} does not match μ = {carrier.mu}"
        )
    if conditions.quadratic.g_high + 1 != conditions.linear.g_low:
        problems.append(f"family ({item.label}): genus bands are not contiguous")
    return problems


@cache
def registry() -> tuple[CyFamily, ...]:
    families = _build_families()
    problems = [problem for item in families for problem in validate_family(item)]
    if problems:
        raise RegistryError("; ".join(problems))
    LOGGER.debug("Loaded %s families with %s constructions.", len(families), sum(len(f.constructions) for f in families))
    return families


def family(label: str) -> CyFamily:
    for item in registry():
        if item.label == label:
            return item
    raise ValueError(f"unknown family {label!r}; expected one of {', '.join(FAMILY_LABELS)}")


def node_rows() -> list[tuple[str, str, int]]:
    return [(item.cy_descriptor, row.k3_descriptor, row.m) for item in registry() for row in item.constructions]


def a2_gate(m: int, g: int) -> bool:
    return m >= g + 2


def a3_gate(mu: int, min_a: int, d: int, g: int) -> bool:
    if min_a == 1:
        return d <= 2 * (mu - 1) or d > mu + g - 1
    if min_a == 2:
        return d <= 4 * (mu - 1) or 2 * d > 4 * mu + g - 4
    raise ValueError(f"min_a must be 1 or 2, got {min_a}")


def _check_curve(d: int, g: int) -> None:
    if d < 1:
        raise ValueError(f"d must be > 0, got {d}")
    if g < 0:
        raise ValueError(f"g must be >= 0, got {g}")


def _rigidity_notes(g: int) -> list[str]:
    if g in (0, 1):
        return ["infinitesimally rigid as well"]
    return []


def theorem_result(label: str, d: int, g: int) -> FamilyVerdict:
    conditions = family(label).theorem_conditions
    _check_curve(d, g)
    if (d, g) in conditions.special_pairs:
        return FamilyVerdict(True, "literal", clause="special-pair", notes=_rigidity_notes(g))
    for name, clause in (("quadratic-clause", conditions.quadratic), ("linear-clause", conditions.linear)):
        if clause.covers(g):
            if clause.holds(d, g):
                return FamilyVerdict(True, "literal", clause=name, notes=_rigidity_notes(g))
            return FamilyVerdict(False, "literal", clause="excluded")
    return FamilyVerdict(False, "literal", clause="excluded")


def derived_admissible(label: str, d: int, g: int, *, mode: str = DEFAULT_MODE) -> FamilyVerdict:
    item = family(label)
    _check_curve(d, g)
    for row in item.constructions:
        on_surface = bn_curve_exists(row.mu, d, g, mode=mode)
        if on_surface.exists and a2_gate(row.m, g) and a3_gate(row.mu, row.min_a, d, g):
            return FamilyVerdict(True, "derived", row, on_surface.case_label, _rigidity_notes(g))
    return FamilyVerdict(False, "derived", clause="no-construction")


def rigid_curve_count(label: str, construction: Union[K3Construction, int], g: int) -> int:
    """Length of the scheme of deformed curves: C(m - 2, g)."""
    item = family(label)
    if isinstance(construction, int):
        if not 0 <= construction < len(item.constructions):
            raise ValueError(f"family ({label}) has no construction #{construction}")
        construction = item.constructions[construction]
    elif construction not in item.constructions:
        raise ValueError(f"{construction} is not a construction of family ({label})")
    if not a2_gate(construction.m, g):
        raise ValueError(f"node gate fails: m = {construction.m} < g + 2 = {g + 2}")
    return comb(construction.m - 2, g)
