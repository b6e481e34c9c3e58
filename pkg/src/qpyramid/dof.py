"""Freedom/relation census for a polyhedron given by its face vector.

Pin one k-gonal face to a plane and fix one of its edges.  The remaining
vertex coordinates carry ``2(k-2) + 3(v-k)`` freedoms; fixed edge lengths and
face planarity impose ``(e-1) + sum n_i (i-3) - (k-3)`` relations.  The two
counts always agree (this is Euler's formula in disguise), which is what
makes a generic polyhedron strongly rigid.  Integer arithmetic only.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .errors import InvalidFaceVector, NonIntegralCount


@dataclass(frozen=True)
class FaceVector:
    counts: Mapping[int, int]
    k: Optional[int] = None

    def __post_init__(self):
        counts = {int(i): int(n) for i, n in dict(self.counts).items() if int(n) != 0}
        if not counts:
            raise InvalidFaceVector("face vector has no faces")
        for i, n in counts.items():
            if i < 3:
                raise InvalidFaceVector(f"face size {i} < 3")
            if n < 0:
                raise InvalidFaceVector(f"negative count for {i}-faces")
        object.__setattr__(self, "counts", dict(sorted(counts.items())))
        k = self.m if self.k is None else int(self.k)
        if k not in counts:
            raise InvalidFaceVector(f"pinned face size {k} has no faces")
        object.__setattr__(self, "k", k)

    @property
    def m(self) -> int:
        return max(self.counts)

    @classmethod
    def parse(cls, text: str, k: Optional[int] = None) -> "FaceVector":
        """Parse ``"3:4,4:1"`` (size:count pairs)."""
        counts: dict = {}
        try:
            for part in text.split(","):
                part = part.strip()
                if not part:
                    continue
                size, n = part.split(":")
                counts[int(size)] = counts.get(int(size), 0) + int(n)
        except ValueError as exc:
            raise InvalidFaceVector(f"cannot parse face vector {text!r}") from exc
        return cls(counts, k)


def counts(F: FaceVector) -> tuple:
    """Edge and vertex counts ``(e, v)``."""
    total = sum(i * n for i, n in F.counts.items())
    if total % 2:
        raise NonIntegralCount(f"sum of i*n_i = {total} is odd")
    e = total // 2
    v = sum((i - 2) * n for i, n in F.counts.items()) // 2 + 2
    if v < 4:
        raise InvalidFaceVector(f"vertex count {v} < 4")
    return e, v


@dataclass(frozen=True)
class DofBalance:
    freedoms: int
    relations: int
    e: int
    v: int
    k: int
    balanced: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "balanced", self.freedoms == self.relations)


def dof_balance(F: FaceVector) -> DofBalance:
    e, v = counts(F)
    k = F.k
    freedoms = 2 * (k - 2) + 3 * (v - k)
    relations = (e - 1) + sum(n * (i - 3) for i, n in F.counts.items()) - (k - 3)
    return DofBalance(freedoms, relations, e, v, k)
