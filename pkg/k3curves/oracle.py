from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd
from threading import Lock
from typing import Callable, Generic, Iterator, Optional, TypeVar

from k3curves.lattice import (
    ZERO,
    DivisorClass,
    IntersectionLattice,
    build_lattice,
    minus_two_on_degree_line,
    classes_on_degree_line,
)

K = TypeVar("K")
V = TypeVar("V")

Chooser = Callable[[list[DivisorClass]], DivisorClass]


class OracleError(RuntimeError):
    pass


def h_is_ample(n: int, d: int, g: int) -> bool:
    """H fails to be ample only when a (-2)-class has degree 0."""
    delta = d * d - 4 * n * (g - 1)
    if delta == n and d % (2 * n) == n:
        return False
    if delta == 4 * n and d % (2 * n) == 0:
        return False
    return True


class _Memo(Generic[K, V]):
    """Coherent map: lock-free reads, atomic insert-if-absent."""

    def __init__(self) -> None:
        self._data: dict[K, V] = {}
        self._lock = Lock()

    def get(self, key: K) -> Optional[V]:
        return self._data.get(key)

    def put(self, key: K, value: V) -> V:
        with self._lock:
            return self._data.setdefault(key, value)


@dataclass(frozen=True, slots=True)
class Effectivity:
    effective: bool
    reason: str
    chain: tuple[DivisorClass, ...] = ()

    def __bool__(self) -> bool:
        return self.effective


@dataclass(slots=True)
class H0Result:
    h0: int
    nef_model: DivisorClass
    stripped: list[DivisorClass] = field(default_factory=list)
    zero_input: bool = False


class OracleContext:
    """Brute-force cone computations on one lattice; safe to share between threads."""

    def __init__(self, lattice: IntersectionLattice) -> None:
        self.lattice = lattice
        self.ample_ok = h_is_ample(lattice.n, lattice.d, lattice.g)
        self._effective: _Memo[DivisorClass, Effectivity] = _Memo()
        self._irreducible: _Memo[DivisorClass, bool] = _Memo()
        self._curves: _Memo[int, tuple[DivisorClass, ...]] = _Memo()
        self._h0: _Memo[DivisorClass, H0Result] = _Memo()

    @classmethod
    def for_triple(cls, n: int, d: int, g: int) -> OracleContext:
        return cls(build_lattice(n, d, g))

    def require_ample(self) -> None:
        if not self.ample_ok:
            n, d, g = self.lattice.triple
            raise OracleError(f"oracle requires ample H; ({n}, {d}, {g}) has a degree-0 (-2)-class")


def minus_two_classes(ctx: OracleContext, degree_bound: int) -> list[DivisorClass]:
    ctx.require_ample()
    if degree_bound < 1:
        raise ValueError(f"degree_bound must be positive, got {degree_bound}")
    found: list[DivisorClass] = []
    for t in range(1, degree_bound + 1):
        found.extend(minus_two_on_degree_line(ctx.lattice, t))
    return found


def _settled(ctx: OracleContext, divisor: DivisorClass) -> Optional[Effectivity]:
    lattice = ctx.lattice
    if divisor.is_zero:
        return Effectivity(True, "zero")
    if lattice.degree(divisor) <= 0:
        return Effectivity(False, "nonpositive-degree")
    cached = ctx._effective.get(divisor)
    if cached is not None:
        return cached
    if lattice.square(divisor) >= -2:
        return ctx._effective.put(divisor, Effectivity(True, "riemann-roch"))
    return None


def _negative_curves(lattice: IntersectionLattice, divisor: DivisorClass) -> Iterator[DivisorClass]:
    for t in range(1, lattice.degree(divisor)):
        for gamma in minus_two_on_degree_line(lattice, t):
            if lattice.intersect(gamma, divisor) < 0:
                yield gamma


@dataclass(slots=True)
class _Peel:
    divisor: DivisorClass
    candidates: Iterator[DivisorClass]
    pending: Optional[DivisorClass] = None


def effectivity(ctx: OracleContext, divisor: DivisorClass) -> Effectivity:
    """Degree induction: Riemann-Roch above square -2, otherwise peel off a (-2)-class.

    The peeling runs on an explicit stack, so long chains of stripped curves
    do not hit the interpreter's recursion limit.
    """
    ctx.require_ample()
    settled = _settled(ctx, divisor)
    if settled is not None:
        return settled
    lattice = ctx.lattice
    stack = [_Peel(divisor, _negative_curves(lattice, divisor))]
    while stack:
        frame = stack[-1]
        if frame.pending is not None:
            rest = _settled(ctx, frame.divisor - frame.pending)
            if rest is not None and rest.effective:
                ctx._effective.put(frame.divisor, Effectivity(True, "stripped", (frame.pending,) + rest.chain))
                stack.pop()
                continue
            frame.pending = None
        for gamma in frame.candidates:
            rest = _settled(ctx, frame.divisor - gamma)
            if rest is None:
                frame.pending = gamma
                stack.append(_Peel(frame.divisor - gamma, _negative_curves(lattice, frame.divisor - gamma)))
                break
            if rest.effective:
                ctx._effective.put(frame.divisor, Effectivity(True, "stripped", (gamma,) + rest.chain))
                stack.pop()
                break
        else:
            ctx._effective.put(frame.divisor, Effectivity(False, "no-negative-curve"))
            stack.pop()
    result = ctx._effective.get(divisor)
    assert result is not None
    return result


def is_effective(ctx: OracleContext, divisor: DivisorClass) -> bool:
    return effectivity(ctx, divisor).effective


def is_irreducible(ctx: OracleContext, gamma: DivisorClass) -> bool:
    """A positive-degree (-2)-class is a curve unless gamma = A + (gamma - A) with both effective."""
    ctx.require_ample()
    lattice = ctx.lattice
    if lattice.square(gamma) != -2 or lattice.degree(gamma) <= 0:
        raise ValueError(f"{gamma} is not a positive-degree (-2)-class")
    cached = ctx._irreducible.get(gamma)
    if cached is not None:
        return cached
    deg = lattice.degree(gamma)
    irreducible = True
    for t in range(1, deg):
        for part in classes_on_degree_line(lattice, t, min_square=-2):
            if is_effective(ctx, gamma - part):
                irreducible = False
                break
        if not irreducible:
            break
    return ctx._irreducible.put(gamma, irreducible)


def irreducible_curves(ctx: OracleContext, degree_bound: int) -> list[DivisorClass]:
    ctx.require_ample()
    curves: list[DivisorClass] = []
    for t in range(1, degree_bound + 1):
        on_line = ctx._curves.get(t)
        if on_line is None:
            on_line = ctx._curves.put(
                t,
                tuple(gamma for gamma in minus_two_on_degree_line(ctx.lattice, t) if is_irreducible(ctx, gamma)),
            )
        curves.extend(on_line)
    return curves


def is_nef(ctx: OracleContext, divisor: DivisorClass) -> bool:
    ctx.require_ample()
    lattice = ctx.lattice
    if divisor.is_zero:
        return True
    deg = lattice.degree(divisor)
    if deg <= 0 or lattice.square(divisor) < 0:
        return False
    # A curve meeting D negatively is a fixed component of D, so its degree is at most deg.
    return all(lattice.intersect(divisor, gamma) >= 0 for gamma in irreducible_curves(ctx, deg))


def h0(ctx: OracleContext, divisor: DivisorClass, *, pick: Optional[Chooser] = None) -> H0Result:
    ctx.require_ample()
    if divisor.is_zero:
        return H0Result(h0=1, nef_model=ZERO, zero_input=True)
    if pick is None:
        cached = ctx._h0.get(divisor)
        if cached is not None:
            return cached
    if not is_effective(ctx, divisor):
        result = H0Result(h0=0, nef_model=divisor)
    else:
        result = _strip_to_nef(ctx, divisor, pick)
    if pick is None:
        result = ctx._h0.put(divisor, result)
    return result


def _strip_to_nef(ctx: OracleContext, divisor: DivisorClass, pick: Optional[Chooser]) -> H0Result:
    lattice = ctx.lattice
    current = divisor
    stripped: list[DivisorClass] = []
    while not current.is_zero:
        candidates = [
            gamma
            for gamma in irreducible_curves(ctx, lattice.degree(current))
            if lattice.intersect(current, gamma) < 0
        ]
        if not candidates:
            break
        gamma = candidates[0] if pick is None else pick(candidates)
        current = current - gamma
        stripped.append(gamma)
    return H0Result(h0=nef_h0(lattice, current), nef_model=current, stripped=stripped)


def nef_h0(lattice: IntersectionLattice, model: DivisorClass) -> int:
    if model.is_zero:
        return 1
    square = lattice.square(model)
    if square > 0:
        return square // 2 + 2
    if square == 0:
        # M = kE with E primitive isotropic; |kE| is a pencil multiple.
        return gcd(model.a, model.b) + 1
    raise OracleError(f"stripping ended on {model} with negative square {square}")
