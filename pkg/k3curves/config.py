from __future__ import annotations

from dataclasses import dataclass

from k3curves.existence import CLAUSE_MODES, DEFAULT_MODE

DEFAULT_WORKERS = 4
DEFAULT_SUBSET_BOX = 40
DEFAULT_CONSISTENCY_BOX = 40
DEFAULT_HODGE_PAIRS = 10_000
DEFAULT_HODGE_LATTICES = 20
DEFAULT_SEED = 20_240_101
STRIP_DEGREE_BOUND = 20
STRUCTURE_MAX_N = 9
REDUCTION_MAX_N = 9
REDUCTION_ORACLE_MAX_N = 5
REDUCTION_MAX_G = 40
REDUCTION_ORACLE_MAX_G = 12
PRODELL_MAX_N = 9
MAX_WORKERS = 64


@dataclass(slots=True)
class SweepSettings:
    workers: int = DEFAULT_WORKERS
    box: int = DEFAULT_SUBSET_BOX
    mode: str = DEFAULT_MODE
    seed: int = DEFAULT_SEED
    hodge_pairs: int = DEFAULT_HODGE_PAIRS
    hodge_lattices: int = DEFAULT_HODGE_LATTICES
    strip_degree_bound: int = STRIP_DEGREE_BOUND
    timing: bool = False

    @classmethod
    def from_flags(cls, **overrides: object) -> SweepSettings:
        """Defaults with every non-None override applied, then validated."""
        kwargs = {key: value for key, value in overrides.items() if value is not None}
        unknown = set(kwargs) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown sweep setting(s): {', '.join(sorted(unknown))}")
        settings = cls(**kwargs)  # type: ignore[arg-type]
        settings.validate()
        return settings

    def validate(self) -> None:
        if not 1 <= self.workers <= MAX_WORKERS:
            raise ValueError(f"workers must be in [1, {MAX_WORKERS}], got {self.workers}")
        if self.box < 0:
            raise ValueError(f"box must be >= 0, got {self.box}")
        if self.mode not in CLAUSE_MODES:
            raise ValueError(f"mode must be one of {CLAUSE_MODES}, got {self.mode!r}")
        if self.hodge_pairs < 1 or self.hodge_lattices < 1:
            raise ValueError("hodge sample sizes must be positive")
        if self.strip_degree_bound < 1:
            raise ValueError(f"strip_degree_bound must be positive, got {self.strip_degree_bound}")
