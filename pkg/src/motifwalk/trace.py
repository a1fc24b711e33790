"""Sample records produced by walkers and consumed by estimators."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO

from .motifs import Cis, ClassRegistry
from .oracle import OracleStats


@dataclass(frozen=True, slots=True)
class Sample:
    """A visited CIS with its G^(k) (or G_mix) degree."""

    cis: Cis
    class_id: int
    degree: int


@dataclass(frozen=True, slots=True)
class PairSample:
    """Union of two consecutive walk states and its contained-CIS count."""

    union_cis: Cis
    class_id: int
    i_count: int

    @property
    def cis(self) -> Cis:
        return self.union_cis


@dataclass(frozen=True, slots=True)
class ReduceSample:
    """A size-k state seen through its contained (k-1)-node CISes.

    ``contained`` holds ``(class_id, |O(s')|)`` for every s' in C^(k-1)(s).
    """

    cis: Cis
    degree: int
    contained: tuple[tuple[int, int], ...]


VIEWS = ("node", "pair", "reduce", "mixed")


@dataclass
class WalkTrace:
    method: str
    k: int
    mode: str
    view: str
    samples: list = field(default_factory=list)
    registries: dict[int, ClassRegistry] = field(default_factory=dict)
    truncated: bool = False
    stats: OracleStats | None = None
    steps_taken: int = 0

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def registry(self) -> ClassRegistry:
        return self.registries[self.k]

    def dump(self, stream: IO[str]) -> None:
        """Line-delimited JSON: step, nodes, class id, degree, aux weights."""
        for step, s in enumerate(self.samples):
            rec = {"step": step, "nodes": list(s.cis.nodes), "k": s.cis.k}
            if isinstance(s, Sample):
                rec.update(class_id=s.class_id, degree=s.degree)
            elif isinstance(s, PairSample):
                rec.update(class_id=s.class_id, i_count=s.i_count)
            else:
                rec.update(degree=s.degree, contained=[list(c) for c in s.contained])
            stream.write(json.dumps(rec) + "\n")
