"""Shift-type maps on the Cantor space {0,2}^N and their exact counts.

Block C_k holds the sequences whose first 2 sits at coordinate k, and T_k
strips that prefix.  The tower maps act on C_k as T_k^{-1} o sigma^{s_k} o T_k
with s_k = j*k (psi_j) or k*k (phi); the all-zeros sequence is fixed.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DepthError, ValidationError
from .metric_core import CantorAlpha, CantorPoint, cantor_tail

KINDS = ("full_shift", "psi", "phi")


@dataclass(frozen=True)
class CantorSystem:
    kind: str
    j: int | None = None
    alpha: float = 3.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown Cantor system kind {self.kind!r}")
        if self.kind == "psi" and (self.j is None or int(self.j) < 1):
            raise ValidationError("TowerPsi needs j >= 1")
        if not float(self.alpha) > 1.0:
            raise ValidationError("alpha must be > 1")
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def name(self) -> str:
        if self.kind == "psi":
            return f"psi_{self.j}"
        return "phi" if self.kind == "phi" else "full_shift"

    def metric(self) -> CantorAlpha:
        return CantorAlpha(self.alpha)

    def shift(self, k: int) -> int:
        """Shift applied on block k (the full shift ignores blocks)."""
        if self.kind == "full_shift":
            return 1
        return self.j * k if self.kind == "psi" else k * k

    def apply(self, x: CantorPoint) -> CantorPoint:
        return apply_map(self, x)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "alpha": self.alpha}
        if self.kind == "psi":
            d["j"] = self.j
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CantorSystem":
        return cls(d["kind"], d.get("j"), d.get("alpha", 3.0))


def FullShift(alpha: float = 3.0) -> CantorSystem:
    return CantorSystem("full_shift", None, alpha)


def TowerPsi(j: int, alpha: float = 3.0) -> CantorSystem:
    return CantorSystem("psi", int(j), alpha)


def TowerPhiSquare(alpha: float = 3.0) -> CantorSystem:
    return CantorSystem("phi", None, alpha)


def block_index(x: CantorPoint) -> int | None:
    """1-based position of the first 2, or None for an all-zeros truncation."""
    try:
        return x.word.index(2) + 1
    except ValueError:
        return None


def apply_map(sys: CantorSystem, x: CantorPoint) -> CantorPoint:
    if not isinstance(x, CantorPoint):
        raise ValidationError("Cantor systems act on CantorPoint")
    if sys.kind == "full_shift":
        if x.depth < 2:
            raise DepthError("depth 1 truncation cannot be shifted")
        return CantorPoint(x.word[1:])
    k = block_index(x)
    if k is None:
        return x
    s = sys.shift(k)
    tail = x.word[k:]
    if len(tail) < s:
        raise DepthError(
            f"block {k} needs {s} coordinates past the prefix, truncation has {len(tail)}")
    return CantorPoint(x.word[:k] + tail[s:])


def eps_ladder(sys: CantorSystem, k_max: int, k_min: int = 1) -> list[float]:
    """alpha^-k(j+1) for psi_j, alpha^-(k^2+k) for phi, alpha^-k for the full shift."""
    if k_max < 1 or k_min < 1 or k_min > k_max:
        raise ValidationError("ladder needs 1 <= k_min <= k_max")
    return [sys.alpha ** (-scale_exponent(sys, k)) for k in range(k_min, k_max + 1)]


def scale_exponent(sys: CantorSystem, k: int) -> int:
    if sys.kind == "psi":
        return k * (sys.j + 1)
    if sys.kind == "phi":
        return k * k + k
    return k


def word_len(sys: CantorSystem, k: int) -> int:
    """Coordinates fixed per time step in the separated family of block k."""
    if sys.kind == "full_shift":
        return 1
    return sys.shift(k)


def _check_nk(n, k):
    if int(n) < 1 or int(k) < 1:
        raise ValidationError("n and k must be >= 1")


def exact_sep_lower(sys: CantorSystem, n: int, k: int) -> int:
    """Size of the cylinder family that is (n+1, eps_k)-separated."""
    _check_nk(n, k)
    if sys.kind == "full_shift":
        return full_shift_sep_exact(2, n + 1, k)
    return 2 ** (word_len(sys, k) * n)


def exact_cov_upper(sys: CantorSystem, n: int, k: int) -> int:
    """k * 2^(n*w) + 2 for the towers (w = jk or k^2); 2^(n+k) for the full shift."""
    _check_nk(n, k)
    if sys.kind == "full_shift":
        return 2 ** (n + k)
    return k * 2 ** (n * word_len(sys, k)) + 2


def sep_lower_at(sys: CantorSystem, big_n: int, k: int) -> int:
    """Lower bound for sep(N, f, eps_k) at Bowen length N >= 1."""
    if big_n == 1 and sys.kind != "full_shift":
        return 1
    if sys.kind == "full_shift":
        return full_shift_sep_exact(2, big_n, k)
    return exact_sep_lower(sys, big_n - 1, k)


def full_shift_sep_exact(alphabet_size: int, n: int, k: int) -> int:
    """alphabet^(n+k-1): cylinders told apart by d_n at a scale resolving k symbols."""
    if int(alphabet_size) < 2:
        raise ValidationError("alphabet must have >= 2 symbols")
    _check_nk(n, k)
    return int(alphabet_size) ** (n + k - 1)


# ---------------------------------------------------------------- witnesses

def family_depth(sys: CantorSystem, n: int, k: int, pad: int | None = None) -> int:
    w = word_len(sys, k)
    if pad is None:
        pad = scale_exponent(sys, k) + 8
    return k + n * w + pad


def family_member(sys: CantorSystem, n: int, k: int, bits, pad: int | None = None) -> CantorPoint:
    """Member of A^k_{z_1..z_n} with the z-blocks given as 0/1 bits, zero tail."""
    if sys.kind == "full_shift":
        raise ValidationError("full-shift families come from separated_family")
    w = word_len(sys, k)
    bits = list(bits)
    if len(bits) != n * w:
        raise ValidationError(f"family member needs {n * w} bits, got {len(bits)}")
    depth = family_depth(sys, n, k, pad)
    word = [0] * (k - 1) + [2] + [2 * b for b in bits]
    word += [0] * (depth - len(word))
    return CantorPoint(word)


def separated_family(sys: CantorSystem, n: int, k: int, pad: int | None = None
                     ) -> Iterator[CantorPoint]:
    """All 2^(n*w) members of the separated cylinder family."""
    _check_nk(n, k)
    if sys.kind == "full_shift":
        total = n + k
        for bits in itertools.product((0, 1), repeat=total):
            word = [2 * b for b in bits] + [0] * (k + 8)
            yield CantorPoint(word)
        return
    w = word_len(sys, k)
    for bits in itertools.product((0, 1), repeat=n * w):
        yield family_member(sys, n, k, bits, pad)


def family_min_separation(sys: CantorSystem, n: int, k: int) -> float:
    """Exact minimum (n+1)-Bowen distance over all pairs of the family.

    Members of one family share block k and the same shift schedule, so the
    distance at time t is a positive sum over the coordinates where the
    z-words differ.  A pair differing on a set P of z-coordinates is at least
    as far apart as the pair differing on any single p in P, so the minimum
    over pairs is the minimum over single-coordinate flips.
    """
    from .metric_core import bowen_distance

    _check_nk(n, k)
    if sys.kind == "full_shift":
        raise ValidationError("the flip reduction is stated for tower families")
    w = word_len(sys, k)
    m = sys.metric()
    base = [0] * (n * w)
    x = family_member(sys, n, k, base)
    best = math.inf
    for p in range(n * w):
        flip = list(base)
        flip[p] = 1
        y = family_member(sys, n, k, flip)
        best = min(best, bowen_distance(sys, m, n + 1, x, y))
    return best


# ---------------------------------------------------------------- covers

@dataclass(frozen=True)
class CoverPiece:
    description: str
    diameter: float
    count: int


def visible_coordinates(shift: int, window: int, n: int) -> int:
    """T-coordinates that enter the first `window` slots at some time t < n."""
    if window <= 0:
        return 0
    if shift >= window:
        return n * window
    return (n - 1) * shift + window


def constructive_cover(sys: CantorSystem, n: int, eps: float) -> list[CoverPiece]:
    """Explicit cover of C by sets of d_n-diameter < eps.

    With m0 the least m whose tail 2 alpha^-m / (alpha - 1) is < eps, two
    points whose iterates share their first m0 coordinates at every time are
    closer than eps.  In block C_i this fixes only the T_i-coordinates that
    ever enter the window of m0 - i slots after the prefix; all blocks deeper
    than m0 together with the fixed point form one extra set.
    """
    if n < 1 or not eps > 0:
        raise ValidationError("need n >= 1 and eps > 0")
    m0 = tail_index(sys.alpha, eps)
    diam = cantor_tail(sys.alpha, m0)
    if sys.kind == "full_shift":
        length = m0 + n - 1
        return [CoverPiece(f"cylinders of length {length}", diam, 2 ** length)]
    pieces = []
    for i in range(1, m0 + 1):
        v = visible_coordinates(sys.shift(i), m0 - i, n)
        pieces.append(CoverPiece(f"block {i}: {v} visible coordinates fixed", diam, 2 ** v))
    pieces.append(CoverPiece(f"blocks >= {m0 + 1} and the fixed point", diam, 1))
    return pieces


def tail_index(alpha: float, eps: float) -> int:
    """Least m >= 0 with 2 alpha^-m / (alpha - 1) < eps."""
    m = max(0, math.floor(math.log(2.0 / ((alpha - 1.0) * eps), alpha)) - 1)
    while cantor_tail(alpha, m) >= eps:
        m += 1
    while m > 0 and cantor_tail(alpha, m - 1) < eps:
        m -= 1
    return m


def cover_count(pieces: list[CoverPiece]) -> int:
    return sum(p.count for p in pieces)


def cylinder_cover(alpha: float, m: int) -> list[CoverPiece]:
    """Static cover of C by the 2^m cylinders of length m."""
    return [CoverPiece(f"cylinders of length {m}", cantor_tail(alpha, m), 2 ** m)]


# ---------------------------------------------------------------- oracle

def oracle_universe(sys: CantorSystem, depth: int, big_n: int, eps: float) -> list[CantorPoint]:
    """All 2^depth words, zero-extended so that N-step orbits resolve eps."""
    if depth < 1 or depth > 20:
        raise ValidationError("oracle depth must be in [1, 20]")
    res = math.ceil(-math.log(eps, sys.alpha)) + 8
    max_shift = sys.shift(depth)
    total = depth + (big_n - 1) * max_shift + res
    out = []
    for bits in itertools.product((0, 1), repeat=depth):
        word = [2 * b for b in bits] + [0] * (total - depth)
        out.append(CantorPoint(word))
    return out


def brute_force_max_separated(sys: CantorSystem, big_n: int, eps: float, depth: int,
                              extra=()) -> int:
    """Exact maximum (N, eps)-separated subset of the oracle universe."""
    from .counting import bowen_pairwise, exact_max_separated

    pts = oracle_universe(sys, depth, big_n, eps) + list(extra)
    return exact_max_separated(pts, bowen_pairwise(sys, sys.metric(), big_n, pts), eps)


def encode_orbits(sys, points, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Orbit bit arrays (P, n, L) and valid lengths (P, n) for the kernels."""
    from .metric_core import orbit

    orbits = [orbit(sys, p, n) for p in points]
    width = max(q.depth for orb in orbits for q in orb)
    bits = np.zeros((len(points), n, width), dtype=np.uint8)
    lengths = np.zeros((len(points), n), dtype=np.int32)
    for i, orb in enumerate(orbits):
        for t, q in enumerate(orb):
            bits[i, t, :q.depth] = np.frombuffer(bytes(q.word), dtype=np.uint8) >> 1
            lengths[i, t] = q.depth
    return bits, lengths
