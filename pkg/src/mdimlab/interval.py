"""Tent map, affine conjugations and interval tower maps.

Each tower cuts [0,1] into closed blocks and acts on block n as
T^{-1} o g^{s n} o T, where g is the tent map and T the increasing affine map
of the block onto [0,1].  Block endpoints are fixed (g(0) = 0, g(1) = 1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RepresentabilityError, ValidationError
from .metric_core import IntervalPoint

BOUNDARY_TOL = 1e-15
VARPHI_CAP = 4
MAX_BLOCKS = 100_000


def tent(x: float) -> float:
    """g(x) = |1 - |3x - 1||."""
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"tent map argument {x!r} outside [0, 1]")
    return abs(1.0 - abs(3.0 * x - 1.0))


def _tent_array(x):
    return np.abs(1.0 - np.abs(3.0 * x - 1.0))


def affine_to_unit(J, x: float) -> float:
    """Increasing affine map of J = (left, right) onto [0, 1]."""
    left, right = float(J[0]), float(J[1])
    if not right > left:
        raise ValidationError(f"degenerate interval {J!r}")
    if x == right:
        return 1.0
    return min(max((x - left) / (right - left), 0.0), 1.0)


def _running_fsum(terms):
    """Prefix sums with Neumaier compensation (math.fsum has no running form)."""
    total, comp = 0.0, 0.0
    for t in terms:
        y = total + t
        if abs(total) >= abs(t):
            comp += (total - y) + t
        else:
            comp += (t - y) + total
        total = y
        yield total + comp


KINDS = ("phi_sr", "psi_s", "varphi_s")


@dataclass(frozen=True)
class IntervalTower:
    kind: str
    s: int
    r: float | None = None
    n_max: int | None = None
    blocks: tuple = field(default=(), compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown interval tower {self.kind!r}")
        if int(self.s) < 1:
            raise ValidationError("s must be a positive integer")
        if self.kind == "phi_sr" and not (self.r is not None and self.r > 0):
            raise ValidationError("PhiSR needs r > 0")
        if self.kind == "varphi_s":
            n = VARPHI_CAP if self.n_max is None else self.n_max
            if n > VARPHI_CAP:
                raise RepresentabilityError(
                    f"VarPhiS blocks beyond n={VARPHI_CAP} underflow double precision")
        object.__setattr__(self, "blocks", tuple(_build_blocks(self)))
        lefts = np.array([b[0] for b in self.blocks])
        order = np.argsort(lefts)
        object.__setattr__(self, "_sorted", [self.blocks[i] for i in order])
        object.__setattr__(self, "_left", np.array([self.blocks[i][0] for i in order]))
        object.__setattr__(self, "_right", np.array([self.blocks[i][1] for i in order]))
        object.__setattr__(self, "_index", np.array([i + 1 for i in order]))

    @property
    def name(self):
        if self.kind == "phi_sr":
            return f"phi_{self.s},{self.r:g}"
        return f"{'psi' if self.kind == 'psi_s' else 'varphi'}_{self.s}"

    @property
    def target(self) -> float:
        """Metric mean dimension of the tower under |.|."""
        if self.kind == "phi_sr":
            return self.s / (self.r + self.s)
        return 1.0 if self.kind == "psi_s" else 0.0

    def locate(self, x: float):
        """(block index n, (left, right)) for x, or None when x is fixed."""
        pos = int(np.searchsorted(self._right, x, side="left"))
        if pos > 0:
            # ties within the tolerance go to the left block; the tolerance
            # shrinks with the block so tiny VarPhiS blocks keep their gaps
            prev = pos - 1
            tol = min(BOUNDARY_TOL, self._right[prev] - self._left[prev])
            if x - self._right[prev] <= tol:
                pos = prev
        if pos < len(self._right) and self._left[pos] <= x:
            return int(self._index[pos]), self._sorted[pos]
        return self._outside(x)

    def _outside(self, x):
        if self.kind == "varphi_s":
            lowest = self._left[0]
            if 0.0 < x < lowest:
                raise RepresentabilityError(
                    f"x={x:.3g} lies below the representable VarPhiS blocks")
            return None  # gaps between blocks and x=0 are fixed points
        if x >= 1.0:
            return None
        raise RepresentabilityError(f"x={x!r} lies beyond the last representable block")

    def apply(self, x: IntervalPoint) -> IntervalPoint:
        return IntervalPoint(apply_tower(self, x.x))

    def apply_array(self, xs):
        xs = np.asarray(xs, dtype=float)
        out = xs.copy()
        flat_in, flat_out = xs.ravel(), out.ravel()
        for i, x in enumerate(flat_in):
            flat_out[i] = apply_tower(self, float(x))
        return out

    def to_dict(self):
        d = {"kind": self.kind, "s": self.s}
        if self.r is not None:
            d["r"] = self.r
        if self.n_max is not None:
            d["n_max"] = self.n_max
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(d["kind"], int(d["s"]), d.get("r"), d.get("n_max"))


def PhiSR(s: int, r: float, n_max: int | None = None) -> IntervalTower:
    return IntervalTower("phi_sr", int(s), float(r), n_max)


def PsiS(s: int, n_max: int | None = None) -> IntervalTower:
    return IntervalTower("psi_s", int(s), None, n_max)


def VarPhiS(s: int, n_max: int | None = None) -> IntervalTower:
    return IntervalTower("varphi_s", int(s), None, n_max)


def _build_blocks(t: IntervalTower):
    if t.kind == "varphi_s":
        n = VARPHI_CAP if t.n_max is None else t.n_max
        return [(2.0 ** -(k ** k), 2.0 ** -(k ** k - 1)) for k in range(1, n + 1)]
    limit = t.n_max or MAX_BLOCKS
    if t.kind == "phi_sr":
        A = (3.0 ** t.r - 1.0) / 3.0 ** t.r
        terms = (A * 3.0 ** (-i * t.r) for i in range(limit))
    else:
        c = 6.0 / math.pi ** 2
        terms = (c / (i * i) for i in range(1, limit + 1))
    ends = [0.0]
    for e in _running_fsum(terms):
        e = min(e, 1.0)
        if e <= ends[-1]:
            break  # increments below double resolution
        ends.append(e)
    return list(zip(ends[:-1], ends[1:]))


def tower_partition(t: IntervalTower, n_max: int) -> list[tuple[float, float]]:
    """First n_max blocks with compensated endpoints."""
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    if t.kind == "varphi_s" and n_max > VARPHI_CAP:
        raise RepresentabilityError(f"VarPhiS is representable only up to n={VARPHI_CAP}")
    if n_max > len(t.blocks):
        if t.kind == "varphi_s" or t.n_max is not None:
            raise RepresentabilityError(f"only {len(t.blocks)} blocks are representable")
        raise RepresentabilityError(f"blocks beyond n={len(t.blocks)} are below double resolution")
    return list(t.blocks[:n_max])


def apply_tower(t: IntervalTower, x: float) -> float:
    if not (0.0 <= x <= 1.0):
        raise DomainError(f"tower argument {x!r} outside [0, 1]")
    hit = t.locate(x)
    if hit is None:
        return x
    n, (left, right) = hit
    y = affine_to_unit((left, right), x)
    for _ in range(t.s * n):
        y = abs(1.0 - abs(3.0 * y - 1.0))
    if y >= 1.0:
        return right
    return left + y * (right - left)


def block_map_conjugate(t: IntervalTower, n: int, u: float) -> float:
    """T o (block map) o T^{-1} evaluated at u in [0, 1] for block n."""
    left, right = t.blocks[n - 1]
    x = left + u * (right - left) if u < 1.0 else right
    return affine_to_unit((left, right), _apply_in_block(t, n, x))


def _apply_in_block(t, n, x):
    left, right = t.blocks[n - 1]
    y = affine_to_unit((left, right), x)
    for _ in range(t.s * n):
        y = abs(1.0 - abs(3.0 * y - 1.0))
    return right if y >= 1.0 else left + y * (right - left)


def grid_sample(interval, n_points: int) -> list[IntervalPoint]:
    """Uniform grid on a closed interval, endpoints included."""
    if n_points < 2:
        raise ValidationError("grid needs >= 2 points")
    left, right = float(interval[0]), float(interval[1])
    if right < left:
        raise ValidationError("interval endpoints out of order")
    xs = np.linspace(left, right, n_points)
    xs[-1] = right
    return [IntervalPoint(float(x)) for x in xs]


def tent_power(m: int, u):
    """g^m, vectorised."""
    u = np.asarray(u, dtype=float)
    for _ in range(m):
        u = _tent_array(u)
    return u


def block_grid_sample(t: IntervalTower, n_blocks: int, per_block: int) -> list[IntervalPoint]:
    """Uniform grid inside each of the first n_blocks blocks (shared endpoints once)."""
    if per_block < 2:
        raise ValidationError("each block grid needs >= 2 points")
    xs = set()
    for left, right in tower_partition(t, n_blocks):
        xs.update(float(x) for x in np.linspace(left, right, per_block))
    return [IntervalPoint(x) for x in sorted(xs)]


def block_separated_count(t: IntervalTower, i: int, n: int, eps: float, per_block: int) -> int:
    """First-fit (n, eps)-separated count inside block i from a unit-grid of its conjugate.

    Block i is an affine copy of g^(s i) on [0, 1] scaled by its length, so
    orbits are computed in unit coordinates and rescaled.  Streaming first-fit
    keeps memory linear in the accepted set.
    """
    left, right = t.blocks[i - 1]
    u = np.linspace(0.0, 1.0, per_block)
    cols = [u]
    for _ in range(n - 1):
        cols.append(tent_power(t.s * i, cols[-1]))
    orbits = np.stack(cols, axis=1) * (right - left)
    acc = np.empty((per_block, n))
    size = 0
    for o in orbits:
        if size == 0 or np.all(np.max(np.abs(acc[:size] - o), axis=1) > eps):
            acc[size] = o
            size += 1
    return size


def tower_sep_lower(t: IntervalTower, n: int, eps: float, n_blocks: int = 6,
                    per_block: int = 4000) -> int:
    """Largest per-block separated count; each block is invariant, so this is a lower bound."""
    if t.kind == "varphi_s":
        n_blocks = min(n_blocks, len(t.blocks))
    return max(block_separated_count(t, i, n, eps, per_block)
               for i in range(1, min(n_blocks, len(t.blocks)) + 1))
