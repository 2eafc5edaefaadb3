from __future__ import annotations

from dataclasses import dataclass
from math import isqrt


class LatticeError(ValueError):
    """Raised when (n, d, g) does not describe a hyperbolic rank-2 lattice."""

    def __init__(self, message: str, *, bound: str) -> None:
        super().__init__(message)
        self.bound = bound


@dataclass(frozen=True, slots=True)
class DivisorClass:
    """The class aH + bC. Expressions written aH - bC elsewhere map to (a, -b)."""

    a: int
    b: int

    def __add__(self, other: DivisorClass) -> DivisorClass:
        return DivisorClass(self.a + other.a, self.b + other.b)

    def __sub__(self, other: DivisorClass) -> DivisorClass:
        return DivisorClass(self.a - other.a, self.b - other.b)

    def __neg__(self) -> DivisorClass:
        return DivisorClass(-self.a, -self.b)

    def scaled(self, k: int) -> DivisorClass:
        return DivisorClass(k * self.a, k * self.b)

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def as_pair(self) -> tuple[int, int]:
        return (self.a, self.b)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts: list[str] = []
        for coeff, symbol in ((self.a, "H"), (self.b, "C")):
            if coeff == 0:
                continue
            sign = "-" if coeff < 0 else ("+" if parts else "")
            size = abs(coeff)
            parts.append(f"{sign}{'' if size == 1 else size}{symbol}")
        return "".join(parts)


ZERO = DivisorClass(0, 0)
H_CLASS = DivisorClass(1, 0)
C_CLASS = DivisorClass(0, 1)


def discriminant(n: int, d: int, g: int) -> int:
    return d * d - 4 * n * (g - 1)


def check_ranges(n: int, d: int, g: int) -> None:
    if n < 2:
        raise LatticeError(f"n must be >= 2, got {n}", bound="n")
    if d < 1:
        raise LatticeError(f"d must be >= 1, got {d}", bound="d")
    if g < 0:
        raise LatticeError(f"g must be >= 0, got {g}", bound="g")


@dataclass(frozen=True, slots=True)
class IntersectionLattice:
    """ZH + ZC with H^2 = 2n, H.C = d, C^2 = 2(g-1)."""

    n: int
    d: int
    g: int

    @property
    def gram(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((2 * self.n, self.d), (self.d, 2 * (self.g - 1)))

    @property
    def delta(self) -> int:
        return discriminant(self.n, self.d, self.g)

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.n, self.d, self.g)

    def intersect(self, first: DivisorClass, second: DivisorClass) -> int:
        return (
            2 * self.n * first.a * second.a
            + self.d * (first.a * second.b + second.a * first.b)
            + 2 * (self.g - 1) * first.b * second.b
        )

    def square(self, divisor: DivisorClass) -> int:
        return self.intersect(divisor, divisor)

    def degree(self, divisor: DivisorClass) -> int:
        return 2 * self.n * divisor.a + self.d * divisor.b

    def disc_pair(self, first: DivisorClass, second: DivisorClass) -> int:
        product = self.intersect(first, second)
        return product * product - self.square(first) * self.square(second)


def build_lattice(n: int, d: int, g: int) -> IntersectionLattice:
    check_ranges(n, d, g)
    delta = discriminant(n, d, g)
    if delta <= 0:
        raise LatticeError(
            f"Δ ≤ 0: d^2 - 4n(g-1) = {delta} for (n, d, g) = ({n}, {d}, {g})",
            bound="delta",
        )
    return IntersectionLattice(n=n, d=d, g=g)


def intersect(lattice: IntersectionLattice, first: DivisorClass, second: DivisorClass) -> int:
    return lattice.intersect(first, second)


def degree(lattice: IntersectionLattice, divisor: DivisorClass) -> int:
    return lattice.degree(divisor)


def disc_pair(lattice: IntersectionLattice, first: DivisorClass, second: DivisorClass) -> int:
    return lattice.disc_pair(first, second)


def classes_on_degree_line(
    lattice: IntersectionLattice, degree_value: int, *, min_square: int
) -> list[DivisorClass]:
    """All classes D with D.H = degree_value and D^2 >= min_square, sorted by (a, b).

    On the line D.H = t the form reads 2n * D^2 = t^2 - Δ b^2 (the complement of H
    is negative definite), so D^2 >= q bounds |b| by sqrt((t^2 - 2nq) / Δ).
    """
    n, d = lattice.n, lattice.d
    rhs = degree_value * degree_value - 2 * n * min_square
    if rhs < 0:
        return []
    b_max = isqrt(rhs // lattice.delta)
    found: list[DivisorClass] = []
    for b in range(-b_max, b_max + 1):
        numerator = degree_value - d * b
        if numerator % (2 * n) == 0:
            found.append(DivisorClass(numerator // (2 * n), b))
    found.sort(key=DivisorClass.as_pair)
    return found


def minus_two_on_degree_line(lattice: IntersectionLattice, degree_value: int) -> list[DivisorClass]:
    """Classes with square -2 and D.H = degree_value: exactly Δ b^2 = t^2 + 4n."""
    n, d = lattice.n, lattice.d
    rhs = degree_value * degree_value + 4 * n
    if rhs % lattice.delta:
        return []
    target = rhs // lattice.delta
    root = isqrt(target)
    if root * root != target:
        return []
    found: list[DivisorClass] = []
    for b in sorted({root, -root}):
        numerator = degree_value - d * b
        if numerator % (2 * n) == 0:
            found.append(DivisorClass(numerator // (2 * n), b))
    found.sort(key=DivisorClass.as_pair)
    return found
