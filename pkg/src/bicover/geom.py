"""Divisor classes on the minimal rational surfaces P2, P1xP1 and F_n.

Classes are integer vectors in a fixed Picard basis:
    P2      (h,)
    P1xP1   (h1, h2)
    F_n     (C_n, F_n), with C_n^2 = -n, C_n.F_n = 1, F_n^2 = 0
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


class GeomError(ValueError):
    pass


@dataclass(frozen=True)
class BaseSurface:
    kind: str  # "P2" | "P1xP1" | "Fn"
    n: int = 0

    def __post_init__(self):
        if self.kind not in ("P2", "P1xP1", "Fn"):
            raise GeomError(f"unknown base kind {self.kind!r}")
        if self.kind == "Fn" and self.n < 2:
            raise GeomError("F_n requires n >= 2 (F_0 is P1xP1, F_1 is not minimal)")

    @property
    def picard_rank(self) -> int:
        return 1 if self.kind == "P2" else 2

    @property
    def gram(self) -> tuple[tuple[int, ...], ...]:
        if self.kind == "P2":
            return ((1,),)
        if self.kind == "P1xP1":
            return ((0, 1), (1, 0))
        return ((-self.n, 1), (1, 0))

    @property
    def canonical(self) -> "DivisorClass":
        if self.kind == "P2":
            return DivisorClass(self, (-3,))
        if self.kind == "P1xP1":
            return DivisorClass(self, (-2, -2))
        return DivisorClass(self, (-2, -(self.n + 2)))

    @property
    def aut_dim(self) -> int:
        return {"P2": 8, "P1xP1": 6}.get(self.kind, self.n + 5)

    @property
    def is_ruled(self) -> bool:
        return self.kind != "P2"

    def cls(self, *coeffs: int) -> "DivisorClass":
        return DivisorClass(self, tuple(coeffs))

    @property
    def name(self) -> str:
        return f"F{self.n}" if self.kind == "Fn" else self.kind

    def __str__(self) -> str:
        return self.name


P2 = BaseSurface("P2")
P1xP1 = BaseSurface("P1xP1")


def Fn(n: int) -> BaseSurface:
    return BaseSurface("Fn", n)


def parse_base(text: str) -> BaseSurface:
    """Parse 'p2', 'p1xp1', 'fn:3' (case-insensitive); also accepts 'F3'."""
    t = text.strip().lower()
    if t == "p2":
        return P2
    if t in ("p1xp1", "q", "f0"):
        return P1xP1
    if t.startswith("fn:"):
        t = "f" + t[3:]
    if t.startswith("f") and t[1:].isdigit():
        return Fn(int(t[1:]))
    raise GeomError(f"unrecognised base {text!r}")


@dataclass(frozen=True)
class DivisorClass:
    surface: BaseSurface
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.surface.picard_rank:
            raise GeomError(f"{self.surface}: expected {self.surface.picard_rank} coefficients, got {self.coeffs}")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    def _same(self, other: "DivisorClass") -> None:
        if self.surface != other.surface:
            raise GeomError(f"classes on different surfaces: {self.surface} vs {other.surface}")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        self._same(other)
        return DivisorClass(self.surface, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        return self + (-other)

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.surface, tuple(-a for a in self.coeffs))

    def __mul__(self, k: int) -> "DivisorClass":
        return DivisorClass(self.surface, tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def halve(self) -> "DivisorClass":
        if any(c % 2 for c in self.coeffs):
            raise GeomError(f"{self} is not divisible by 2")
        return DivisorClass(self.surface, tuple(c // 2 for c in self.coeffs))

    def __str__(self) -> str:
        if self.surface.kind == "P2":
            return f"{self.coeffs[0]}h"
        return str(self.coeffs)


def bilinear(gram: Sequence[Sequence[int]], x: Sequence, y: Sequence):
    return sum(x[i] * gram[i][j] * y[j] for i in range(len(x)) for j in range(len(y)))


def dot(c: DivisorClass, d: DivisorClass) -> int:
    c._same(d)
    return bilinear(c.surface.gram, c.coeffs, d.coeffs)


def _h0_fn(n: int, a: int, b: int) -> int:
    # push forward to P1: O(aC+bF) -> sum_{i<=a} O(b - i n)
    if a < 0:
        return 0
    return sum(max(0, b - i * n + 1) for i in range(a + 1))


def h0(d: DivisorClass) -> int:
    s = d.surface
    if s.kind == "P2":
        (k,) = d.coeffs
        return (k + 1) * (k + 2) // 2 if k >= 0 else 0
    a, b = d.coeffs
    if s.kind == "P1xP1":
        return (a + 1) * (b + 1) if a >= 0 and b >= 0 else 0
    return _h0_fn(s.n, a, b)


def riemann_roch_fn(n: int, a: int, b: int) -> int:
    """Closed form of h0(aC+bF) valid for b >= a n >= 0."""
    twice = 2 + (-n * a * (a + 1) + 2 * a * b + 2 * a + 2 * b)
    assert twice % 2 == 0
    return twice // 2


def is_effective(d: DivisorClass) -> bool:
    return h0(d) > 0


def _nef_pair(d: DivisorClass) -> tuple[int, ...]:
    s = d.surface
    if s.kind == "P2":
        return d.coeffs
    if s.kind == "P1xP1":
        return d.coeffs
    return (dot(d, s.cls(0, 1)), dot(d, s.cls(1, 0)))


def is_nef(d: DivisorClass) -> bool:
    return all(x >= 0 for x in _nef_pair(d))


def is_ample(d: DivisorClass) -> bool:
    return all(x > 0 for x in _nef_pair(d))


def genus(d: DivisorClass) -> int:
    """Arithmetic genus of a member of |d| by adjunction."""
    twice = dot(d, d) + dot(d, d.surface.canonical)
    g = 1 + twice // 2
    if twice % 2 or g < 0:
        raise GeomError(f"{d} has no irreducible member (adjunction genus {1 + twice / 2})")
    return g


def is_irreducible_class(d: DivisorClass) -> bool:
    """Whether |aC+bF| on F_n has an irreducible member."""
    s = d.surface
    if s.kind != "Fn":
        raise GeomError("is_irreducible_class is defined on F_n only")
    a, b = d.coeffs
    if (a, b) in ((0, 1), (1, 0)):
        return True
    return a >= 1 and b >= a * s.n


def has_irreducible_member(d: DivisorClass) -> bool:
    """Irreducible generic member on any of the three bases (0 excluded)."""
    s = d.surface
    if s.kind == "P2":
        return d.coeffs[0] >= 1
    if s.kind == "P1xP1":
        a, b = d.coeffs
        return (a >= 1 and b >= 1) or (a, b) in ((1, 0), (0, 1))
    return is_irreducible_class(d)


def is_rigid(d: DivisorClass) -> bool:
    return h0(d) == 1


def log_h1(d: DivisorClass) -> int:
    # assumes the image of the Chern class map is one-dimensional
    return d.surface.picard_rank + genus(d) - 1


def generic_components(d: DivisorClass) -> list[DivisorClass]:
    """Most generic reduced decomposition of an admissible branch class.

    Raises GeomError when the class has no reduced member of the expected shape.
    """
    s = d.surface
    if d.is_zero():
        return []
    if any(c < 0 for c in d.coeffs):
        raise GeomError(f"{d} is not effective")
    if s.kind == "P2":
        return [d]
    a, b = d.coeffs
    if s.kind == "P1xP1":
        if a >= 1 and b >= 1:
            return [d]
        if b == 0:
            return [s.cls(1, 0)] * a
        return [s.cls(0, 1)] * b
    if a == 0:
        return [s.cls(0, 1)] * b
    if is_irreducible_class(d):
        return [d]
    # C + B with B irreducible and disjoint from C
    if a >= 2 and b == s.n * (a - 1):
        return [s.cls(1, 0), s.cls(a - 1, b)]
    raise GeomError(f"{d} on {s} has no reduced member of the form irreducible, fibres, or C+B")
