"""Combinators over dynamical systems: products, powers and sequence shifts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .errors import DepthError, ValidationError
from .metric_core import PairPoint, SeqPoint


@dataclass(frozen=True)
class ProductSystem:
    """f x g acting on PairPoint."""

    left: Any
    right: Any

    def apply(self, x: PairPoint) -> PairPoint:
        if not isinstance(x, PairPoint):
            raise ValidationError("product systems act on PairPoint")
        return PairPoint(self.left.apply(x.left), self.right.apply(x.right))

    @property
    def name(self):
        return f"{getattr(self.left, 'name', 'f')}x{getattr(self.right, 'name', 'g')}"

    def to_dict(self):
        return {"kind": "product", "left": self.left.to_dict(), "right": self.right.to_dict()}


@dataclass(frozen=True)
class PowerSystem:
    """f^p."""

    base: Any
    p: int

    def __post_init__(self):
        if int(self.p) < 1:
            raise ValidationError("power must be >= 1")

    def apply(self, x):
        for _ in range(self.p):
            x = self.base.apply(x)
        return x

    @property
    def name(self):
        return f"{getattr(self.base, 'name', 'f')}^{self.p}"

    def to_dict(self):
        return {"kind": "power", "base": self.base.to_dict(), "p": self.p}


@dataclass(frozen=True)
class SequenceShift:
    """Left shift on truncated sequences of points (any alphabet)."""

    def apply(self, x: SeqPoint) -> SeqPoint:
        if not isinstance(x, SeqPoint):
            raise ValidationError("the sequence shift acts on SeqPoint")
        if x.depth < 2:
            raise DepthError("depth 1 sequence cannot be shifted")
        return SeqPoint(x.entries[1:])

    name = "seq_shift"

    def to_dict(self):
        return {"kind": "seq_shift"}
