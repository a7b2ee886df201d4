from __future__ import annotations

import os
from dataclasses import asdict, dataclass, replace

DEFAULT_AUT_CAP = 12
DEFAULT_MAX_TUPLES = 20_000_000
MAX_TUPLES_ENV = "ARITYLAB_MAX_TUPLES"


def env_max_tuples() -> int:
    raw = os.environ.get(MAX_TUPLES_ENV)
    if not raw:
        return DEFAULT_MAX_TUPLES
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{MAX_TUPLES_ENV} must be positive")
    return value


@dataclass(frozen=True)
class RunConfig:
    aut_cap: int = DEFAULT_AUT_CAP
    max_tuples: int | None = None  # None: environment override or default
    max_m: int | None = None  # None: structure size
    max_n: int | None = None  # None: structure size
    oracle: bool = False
    threads: int = 1
    output: str | None = None

    def __post_init__(self):
        for name in ("aut_cap", "max_tuples", "max_m", "max_n", "threads"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be positive")

    @property
    def tuple_cap(self) -> int:
        return self.max_tuples if self.max_tuples is not None else env_max_tuples()

    def with_(self, **changes) -> "RunConfig":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["max_tuples"] = self.tuple_cap
        d.pop("output")
        # thread count is excluded: reports must not depend on it
        d.pop("threads")
        return d
