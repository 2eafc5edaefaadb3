"""Verification suites and box enumerations.

Every suite is a list of points plus a pure check per point. ``SweepRunner``
fans the points out over a thread pool and merges the outcomes back in input
order, so reports and tables do not depend on the worker count.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence, TypeVar

from k3curves import get_logger
from k3curves.bn import (
    RESIDUAL_BN_GENERAL,
    RESIDUAL_TRIPLES,
    UndecidedError,
    bn_general,
    oracle_bn_general,
    prodell,
    reduce_small1,
    reduce_small2,
)
from k3curves.config import (
    PRODELL_MAX_N,
    REDUCTION_MAX_G,
    REDUCTION_MAX_N,
    REDUCTION_ORACLE_MAX_G,
    REDUCTION_ORACLE_MAX_N,
    STRUCTURE_MAX_N,
    SweepSettings,
)
from k3curves.existence import (
    bn_curve_exists,
    case_two_exclusions,
    k3_curve_exists,
    mainthm_case,
)
from k3curves.families import (
    FAMILY_LABELS,
    KNOWN_SUBSET_DISCREPANCIES,
    derived_admissible,
    family,
    theorem_result,
)
from k3curves.lattice import (
    H_CLASS,
    DivisorClass,
    IntersectionLattice,
    LatticeError,
    classes_on_degree_line,
    discriminant,
)
from k3curves.oracle import OracleContext, h0, h_is_ample, is_effective

LOGGER = get_logger()

P = TypeVar("P")
R = TypeVar("R")

ELL_THRESHOLDS = {2: 3, 3: 3, 4: 4, 5: 4, 6: 5, 7: 5, 8: 6, 9: 6}
HODGE_COORDINATE_RANGE = 100


@dataclass(frozen=True, slots=True)
class Discrepancy:
    point: tuple[Any, ...]
    message: str
    known: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {"point": list(self.point), "message": self.message, "known": self.known}


@dataclass(slots=True)
class _Outcome:
    positive: bool
    discrepancies: list[Discrepancy] = field(default_factory=list)
    tags: tuple[str, ...] = ()
    note: Optional[str] = None


@dataclass(slots=True)
class SweepReport:
    suite: str
    mode: str
    bounds: dict[str, int] = field(default_factory=dict)
    checked: int = 0
    admissible: int = 0
    excluded: int = 0
    errors: int = 0
    discrepancies: list[Discrepancy] = field(default_factory=list)
    tallies: dict[str, int] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    expects_discrepancies: bool = False
    wall_time: Optional[float] = None

    @property
    def unexpected(self) -> list[Discrepancy]:
        return [item for item in self.discrepancies if not item.known]

    @property
    def passed(self) -> bool:
        if self.errors or self.unexpected:
            return False
        return bool(self.discrepancies) or not self.expects_discrepancies

    def to_dict(self, *, include_timing: bool = False) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "suite": self.suite,
            "mode": self.mode,
            "bounds": dict(self.bounds),
            "checked": self.checked,
            "admissible": self.admissible,
            "excluded": self.excluded,
            "errors": self.errors,
            "passed": self.passed,
            "discrepancies": [item.to_dict() for item in self.discrepancies],
        }
        if self.tallies:
            payload["tallies"] = dict(sorted(self.tallies.items()))
        if self.notes:
            payload["notes"] = list(self.notes)
        if include_timing and self.wall_time is not None:
            payload["wall_time"] = round(self.wall_time, 3)
        return payload


@dataclass(slots=True)
class _Suite:
    points: list[Any]
    check: Callable[[Any], _Outcome]
    bounds: dict[str, int]
    expects_discrepancies: bool = False


class SweepRunner:
    def __init__(self, settings: Optional[SweepSettings] = None) -> None:
        self.settings = settings or SweepSettings()
        self._suites: dict[str, Callable[[], _Suite]] = {
            "bn-residual": self._bn_residual,
            "ell-thresholds": self._ell_thresholds,
            "prodell": self._prodell,
            "subset": self._subset,
            "consistency": self._consistency,
            "hodge": self._hodge,
            "stripping": self._stripping,
            "reductions": self._reductions,
            "exclusion-d": self._exclusion_d,
        }

    @property
    def suite_names(self) -> tuple[str, ...]:
        return tuple(self._suites)

    def run(self, name: str) -> SweepReport:
        if name not in self._suites:
            raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(self._suites)}")
        started = time.perf_counter()
        suite = self._suites[name]()
        LOGGER.info("Running suite %s over %s point(s).", name, len(suite.points))
        report = SweepReport(
            suite=name,
            mode=self.settings.mode,
            bounds=suite.bounds,
            expects_discrepancies=suite.expects_discrepancies,
        )
        for point, outcome in zip(suite.points, self.map(suite.check, suite.points)):
            report.checked += 1
            if outcome is None:
                report.errors += 1
                continue
            if outcome.positive:
                report.admissible += 1
            else:
                report.excluded += 1
            report.discrepancies.extend(outcome.discrepancies)
            for tag in outcome.tags:
                report.tallies[tag] = report.tallies.get(tag, 0) + 1
            if outcome.note:
                report.notes.append(outcome.note)
        report.wall_time = time.perf_counter() - started
        for item in report.unexpected:
            LOGGER.warning("Suite %s: %s at %s", name, item.message, item.point)
        LOGGER.info(
            "Suite %s finished: %s checked, %s discrepancies, %s errors, passed=%s.",
            name,
            report.checked,
            len(report.discrepancies),
            report.errors,
            report.passed,
        )
        return report

    def map(self, fn: Callable[[P], R], points: Sequence[P]) -> list[Optional[R]]:
        """Apply fn to every point; failures are logged and come back as None."""
        workers = min(self.settings.workers, max(1, len(points)))
        if workers <= 1:
            return [self._guarded(fn, point) for point in points]
        return self._map_parallel(fn, points, workers=workers)

    def _guarded(self, fn: Callable[[P], R], point: P) -> Optional[R]:
        try:
            return fn(point)
        except Exception:
            LOGGER.exception("Evaluation failed at %s", point)
            return None

    def _map_parallel(self, fn: Callable[[P], R], points: Sequence[P], *, workers: int) -> list[Optional[R]]:
        LOGGER.debug("Running parallel sweep with %s worker(s) across %s point(s).", workers, len(points))
        results: list[Optional[R]] = [None] * len(points)
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = {executor.submit(fn, point): index for index, point in enumerate(points)}
            for future in as_completed(futures):
                index = futures[future]
                try:
                    results[index] = future.result()
                except Exception:
                    LOGGER.exception("Evaluation failed at %s", points[index])
        return results

    # Suites

    def _bn_residual(self) -> _Suite:
        def check(triple: tuple[int, int, int]) -> _Outcome:
            n, d, g = triple
            expected = triple in RESIDUAL_BN_GENERAL
            verdict = bn_general(n, d, g)
            found: list[Discrepancy] = []
            if verdict.bn_general != expected:
                found.append(Discrepancy(triple, f"closed form ({verdict.route}) says {verdict.bn_general}"))
            if verdict.witness is not None and verdict.witness.product < n + 2:
                found.append(Discrepancy(triple, f"witness product {verdict.witness.product} < {n + 2}"))
            note = None
            if discriminant(n, d, g) > 0 and h_is_ample(n, d, g):
                oracle = oracle_bn_general(OracleContext.for_triple(n, d, g))
                if oracle.bn_general != expected:
                    found.append(Discrepancy(triple, f"oracle says {oracle.bn_general}"))
            else:
                note = f"{triple}: oracle not applicable, decided by the {verdict.route} route"
            return _Outcome(verdict.bn_general, found, note=note)

        return _Suite(list(RESIDUAL_TRIPLES), check, {"triples": len(RESIDUAL_TRIPLES)})

    def _ell_thresholds(self) -> _Suite:
        def check(n: int) -> _Outcome:
            found: list[Discrepancy] = []
            threshold: Optional[int] = None
            for d in range(1, 2 * n + 1):
                oracle = oracle_bn_general(OracleContext.for_triple(n, d, 1)).bn_general
                closed = bn_general(n, d, 1).bn_general
                if oracle != closed:
                    found.append(Discrepancy((n, d, 1), f"oracle {oracle} vs closed form {closed}"))
                if oracle and threshold is None:
                    threshold = d
            if threshold != ELL_THRESHOLDS[n]:
                found.append(Discrepancy((n,), f"threshold {threshold}, expected {ELL_THRESHOLDS[n]}"))
            return _Outcome(threshold == ELL_THRESHOLDS[n], found)

        points = sorted(ELL_THRESHOLDS)
        return _Suite(points, check, {"n_min": points[0], "n_max": points[-1]})

    def _prodell(self) -> _Suite:
        def check(point: tuple[int, int, int]) -> _Outcome:
            n, d, b = point
            ctx = OracleContext.for_triple(n, d, 1)
            product = h0(ctx, DivisorClass(1, -b)).h0 * h0(ctx, DivisorClass(0, b)).h0
            expected = prodell(n, d, b)
            found = [] if product == expected else [Discrepancy(point, f"oracle product {product} != {expected}")]
            return _Outcome(product > 0, found)

        points = [
            (n, d, b)
            for n in range(2, PRODELL_MAX_N + 1)
            for d in range(1, n + 4)
            for b in range(1, (n + 3) // d + 1)
        ]
        return _Suite(points, check, {"n_max": PRODELL_MAX_N})

    def _subset(self) -> _Suite:
        box = self.settings.box
        mode = self.settings.mode

        def check(point: tuple[str, int, int]) -> _Outcome:
            label, d, g = point
            literal = theorem_result(label, d, g)
            derived = derived_admissible(label, d, g, mode=mode)
            if literal.admissible and not derived.admissible:
                known = point in KNOWN_SUBSET_DISCREPANCIES
                message = f"{literal.clause} admits the point but no construction reaches it"
                return _Outcome(True, [Discrepancy(point, message, known=known)])
            tags = ("derived-only",) if derived.admissible and not literal.admissible else ()
            return _Outcome(literal.admissible, tags=tags)

        points = [(label, d, g) for label in FAMILY_LABELS for d in range(1, box + 1) for g in range(0, box + 1)]
        for label in FAMILY_LABELS:
            family(label)
        return _Suite(points, check, {"families": len(FAMILY_LABELS), "d_max": box, "g_max": box})

    def _consistency(self) -> _Suite:
        box = self.settings.box
        mode = self.settings.mode
        literal = mode == "literal"

        def check(point: tuple[int, int, int]) -> _Outcome:
            mu, d, g = point
            chosen = bn_curve_exists(mu, d, g, mode=mode)
            found: list[Discrepancy] = []
            if chosen.exists and not k3_curve_exists(mu - 1, d, g).exists:
                known = literal and mu == 9 and chosen.case_label.endswith(".b")
                found.append(Discrepancy(point, f"{chosen.case_label} holds but the K3 classification excludes it", known))
            if literal:
                corrected = bn_curve_exists(mu, d, g)
                if corrected.exists != chosen.exists:
                    labels = (chosen.case_label, corrected.case_label)
                    known = mu == 9 and any(label.endswith(".b") for label in labels)
                    found.append(Discrepancy(point, f"modes disagree: {labels[0]} vs {labels[1]}", known))
            return _Outcome(chosen.exists, found)

        points = [(mu, d, g) for mu in range(3, 11) for d in range(1, box + 1) for g in range(0, box + 1)]
        return _Suite(points, check, {"mu_min": 3, "mu_max": 10, "d_max": box, "g_max": box}, literal)

    def _hodge(self) -> _Suite:
        settings = self.settings
        rng = random.Random(settings.seed)
        lattices: list[IntersectionLattice] = []
        while len(lattices) < settings.hodge_lattices:
            n, d, g = rng.randint(2, 9), rng.randint(1, 40), rng.randint(0, 40)
            if discriminant(n, d, g) > 0:
                lattices.append(IntersectionLattice(n, d, g))

        def check(index: int) -> _Outcome:
            lattice = lattices[index]
            local = random.Random(f"{settings.seed}:{index}")
            span = HODGE_COORDINATE_RANGE
            for _ in range(settings.hodge_pairs):
                first = DivisorClass(local.randint(-span, span), local.randint(-span, span))
                second = DivisorClass(local.randint(-span, span), local.randint(-span, span))
                det = first.a * second.b - second.a * first.b
                if lattice.disc_pair(first, second) != lattice.delta * det * det:
                    return _Outcome(False, [Discrepancy(lattice.triple, f"identity fails for {first}, {second}")])
            return _Outcome(True)

        bounds = {"lattices": settings.hodge_lattices, "pairs": settings.hodge_pairs, "seed": settings.seed}
        return _Suite(list(range(len(lattices))), check, bounds)

    def _stripping(self) -> _Suite:
        bound = self.settings.strip_degree_bound

        def last(candidates: list[DivisorClass]) -> DivisorClass:
            return candidates[-1]

        def check(triple: tuple[int, int, int]) -> _Outcome:
            n, d, g = triple
            ctx = OracleContext.for_triple(n, d, g)
            lattice = ctx.lattice
            found: list[Discrepancy] = []
            plane = h0(ctx, H_CLASS).h0
            if plane != n + 2:
                found.append(Discrepancy(triple, f"h0(H) = {plane}, expected {n + 2}"))
            for t in range(1, bound + 1):
                for divisor in classes_on_degree_line(lattice, t, min_square=-2 * t * t):
                    if not is_effective(ctx, divisor):
                        continue
                    first = h0(ctx, divisor)
                    other = h0(ctx, divisor, pick=last)
                    if (first.h0, first.nef_model) != (other.h0, other.nef_model):
                        found.append(Discrepancy(triple, f"stripping order changes h0 of {divisor}"))
            if d > n + g:
                for k in range(1, 6):
                    if is_effective(ctx, (H_CLASS - DivisorClass(0, 1)).scaled(k)):
                        found.append(Discrepancy(triple, f"{k}(H-C) is effective although d > n + g"))
            return _Outcome(not found, found)

        points = [
            (n, d, g)
            for n in range(2, STRUCTURE_MAX_N + 1)
            for d in range(1, 2 * n + 1)
            for g in range(0, n + 2)
            if discriminant(n, d, g) > 0 and h_is_ample(n, d, g)
        ]
        return _Suite(points, check, {"n_max": STRUCTURE_MAX_N, "degree_bound": bound})

    def _reductions(self) -> _Suite:
        def agree(n: int, before: tuple[int, int], after: tuple[int, int]) -> Optional[str]:
            if n > REDUCTION_ORACLE_MAX_N or before[1] > REDUCTION_ORACLE_MAX_G:
                return None
            if not (h_is_ample(n, *before) and h_is_ample(n, *after)):
                return None
            left = oracle_bn_general(OracleContext.for_triple(n, *before)).bn_general
            right = oracle_bn_general(OracleContext.for_triple(n, *after)).bn_general
            return None if left == right else f"oracle {left} on {before}, {right} on {after}"

        def check(triple: tuple[int, int, int]) -> _Outcome:
            n, d, g = triple
            delta = discriminant(n, d, g)
            found: list[Discrepancy] = []
            tags: list[str] = []
            if d > 2 * n:
                d0, g0, count = reduce_small1(n, d, g)
                if count:
                    tags.append("small1")
                    if discriminant(n, d0, g0) != delta:
                        found.append(Discrepancy(triple, f"small1 moves Δ to {discriminant(n, d0, g0)}"))
                    problem = agree(n, (d, g), (d0, g0))
                    if problem:
                        found.append(Discrepancy(triple, f"small1: {problem}"))
            if n - d + g >= 0 and d <= 2 * n - 1:
                tags.append("small2")
                d2, g2 = reduce_small2(n, d, g)
                if discriminant(n, d2, g2) != delta:
                    found.append(Discrepancy(triple, f"small2 moves Δ to {discriminant(n, d2, g2)}"))
                if reduce_small2(n, d2, g2) != (d, g):
                    found.append(Discrepancy(triple, "small2 is not an involution here"))
                problem = agree(n, (d, g), (d2, g2))
                if problem:
                    found.append(Discrepancy(triple, f"small2: {problem}"))
            return _Outcome(bool(tags), found, tags=tuple(tags))

        points = [
            (n, d, g)
            for n in range(2, REDUCTION_MAX_N + 1)
            for d in range(1, 6 * n + 1)
            for g in range(0, REDUCTION_MAX_G + 1)
            if discriminant(n, d, g) > 0
        ]
        bounds = {"n_max": REDUCTION_MAX_N, "g_max": REDUCTION_MAX_G, "oracle_n_max": REDUCTION_ORACLE_MAX_N}
        return _Suite(points, check, bounds)

    def _exclusion_d(self) -> _Suite:
        box = self.settings.box

        def check(triple: tuple[int, int, int]) -> _Outcome:
            fired = case_two_exclusions(*triple)
            found = [Discrepancy(triple, "exclusion (d) fires alone")] if fired == ("d",) else []
            return _Outcome(not fired, found, tags=tuple(f"excl.{letter}" for letter in fired))

        points = [
            (n, d, g)
            for n in range(2, STRUCTURE_MAX_N + 1)
            for d in range(1, box + 1)
            for g in range(0, box + 1)
            if mainthm_case(n, d, g) == "ii"
        ]
        return _Suite(points, check, {"n_max": STRUCTURE_MAX_N, "d_max": box, "g_max": box})

    # Enumerations

    def enumerate_family(self, label: str, d_max: int, g_max: int) -> list[dict[str, Any]]:
        family(label)
        _check_bounds(d_max, g_max)

        def row(point: tuple[int, int]) -> dict[str, Any]:
            d, g = point
            verdict = theorem_result(label, d, g)
            return {"family": label, "d": d, "g": g, "admissible": verdict.admissible, "case_label": verdict.clause}

        return self._rows(row, _box(d_max, g_max))

    def enumerate_surface(self, n: int, d_max: int, g_max: int) -> list[dict[str, Any]]:
        if n < 2:
            raise ValueError(f"n must be >= 2, got {n}")
        _check_bounds(d_max, g_max)

        def row(point: tuple[int, int]) -> dict[str, Any]:
            d, g = point
            verdict = k3_curve_exists(n, d, g)
            try:
                general: Optional[bool] = bn_general(n, d, g).bn_general
            except (LatticeError, UndecidedError):
                general = None
            return {"n": n, "d": d, "g": g, "exists": verdict.exists, "bn_general": general, "case_label": verdict.case_label}

        return self._rows(row, _box(d_max, g_max))

    def _rows(self, fn: Callable[[tuple[int, int]], dict[str, Any]], points: list[tuple[int, int]]) -> list[dict[str, Any]]:
        rows = self.map(fn, points)
        missing = [point for point, item in zip(points, rows) if item is None]
        if missing:
            raise RuntimeError(f"enumeration failed at {len(missing)} point(s), first {missing[0]}")
        return [item for item in rows if item is not None]


def _check_bounds(d_max: int, g_max: int) -> None:
    if d_max < 0 or g_max < 0:
        raise ValueError(f"bounds must be >= 0, got d_max={d_max}, g_max={g_max}")


def _box(d_max: int, g_max: int) -> list[tuple[int, int]]:
    return [(d, g) for d in range(1, d_max + 1) for g in range(0, g_max + 1)]


def run_suite(name: str, settings: Optional[SweepSettings] = None) -> SweepReport:
    return SweepRunner(settings).run(name)
