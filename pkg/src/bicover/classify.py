"""Enumeration of bidouble covers with a K3 quotient (D1 + D2 = -2K).

Rows are deduplicated under the symmetry group generated by index
permutations preserving D1 + D2 = -2K and, on P1xP1, the ruling swap.
Unbounded rays of D3 (fibre multiples) are folded into parametric rows.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .cover import BidoubleData, CoverInvariants, check, invariants, validate
from .geom import BaseSurface, GeomError, generic_components, h0

Triple = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]


@dataclass(frozen=True)
class Parametric:
    index: int  # (divisor, coordinate), 0-based, of the free coefficient
    coord: int
    bound: int  # minimal member; members step by 2

    def __str__(self) -> str:
        return f">={self.bound}"


@dataclass
class ClassificationRow:
    data: BidoubleData
    invariants: CoverInvariants
    parametric: Optional[Parametric] = None
    label: Optional[str] = None
    provenance: tuple[str, ...] = ()

    @property
    def key(self) -> tuple:
        return (canonical(self.data.base, self.data.key()), self.parametric is not None)


def _swap(t: tuple[int, ...]) -> tuple[int, ...]:
    return (t[1], t[0])


def symmetry_images(base: BaseSurface, triple: Triple) -> list[Triple]:
    minus2K = tuple(-2 * c for c in base.canonical.coeffs)
    out = []
    flips = [False, True] if base.kind == "P1xP1" else [False]
    for perm in itertools.permutations(range(3)):
        t = tuple(triple[p] for p in perm)
        if tuple(a + b for a, b in zip(t[0], t[1])) != minus2K:
            continue
        for f in flips:
            out.append(tuple(_swap(x) for x in t) if f else t)
    return out


def canonical(base: BaseSurface, triple: Triple) -> Triple:
    """Lexicographically minimal representative (triple must have D1+D2 = -2K)."""
    imgs = symmetry_images(base, triple)
    if not imgs:
        raise ValueError(f"{triple} has no K3 quotient")
    return min(imgs)


def _admissible(base: BaseSurface, c: tuple[int, ...]) -> bool:
    try:
        generic_components(base.cls(*c))
        return True
    except GeomError:
        return False


def _pg_ok(base: BaseSurface, triple: Triple) -> bool:
    K = base.canonical
    minus2K = tuple(-2 * c for c in K.coeffs)
    for i in (0, 1):
        s = tuple(a + b for a, b in zip(triple[i], triple[2]))
        if s == minus2K:
            continue
        Li = base.cls(*(x // 2 for x in s))
        if h0(K + Li) > 0:
            return False
    return True


def raw_solutions(base: BaseSurface, cap: int) -> list[Triple]:
    """All valid ordered triples with D1 + D2 = -2K and D3 coefficients <= cap."""
    K = base.canonical.coeffs
    minus2K = tuple(-2 * c for c in K)
    rng = [range(m + 1) for m in minus2K]
    out = []
    for d1 in itertools.product(*rng):
        d2 = tuple(m - a for m, a in zip(minus2K, d1))
        if not (_admissible(base, d1) and _admissible(base, d2)):
            continue
        for d3 in itertools.product(*[range(cap + 1)] * base.picard_rank):
            if any((a + b) % 2 for a, b in zip(d1, d3)):
                continue
            triple = (d1, d2, d3)
            if not _admissible(base, d3):
                continue
            if not _pg_ok(base, triple):
                continue
            data = BidoubleData.from_totals(base, *triple)
            if validate(data):
                continue
            out.append(triple)
    return out


def _ray(base: BaseSurface, triple: Triple) -> Optional[tuple[int, int]]:
    """Coordinate along which D3 is a fibre multiple, if any."""
    d3 = triple[2]
    if base.kind == "P1xP1":
        if d3[1] == 0:
            return 0, d3[0]
        if d3[0] == 0:
            return 1, d3[1]
    elif base.kind == "Fn" and d3[0] == 0:
        return 1, d3[1]
    return None


def _display(base: BaseSurface, triple: Triple, coord: int) -> tuple[Triple, int]:
    """Orient a ray member: free coordinate first on P1xP1, larger free part in D1."""
    d1, d2, d3 = triple
    if base.kind == "P1xP1" and coord == 1:
        d1, d2, d3 = _swap(d1), _swap(d2), _swap(d3)
        coord = 0
    if d2[coord] > d1[coord]:
        d1, d2 = d2, d1
    return (d1, d2, d3), coord


def _p1p1_case(n1: int, t: int) -> str:
    if n1 + t > 4:
        return "(1)" if t > n1 else "(2)" if t == n1 else "(3)"
    return "(4)"


def enumerate_rows(base: BaseSurface, cap: int = 10) -> list[ClassificationRow]:
    """Classification rows up to symmetry; K^2 < 0 rows are discarded."""
    if cap < 10:
        raise ValueError("cap must be >= 10")
    raw = raw_solutions(base, cap)
    rays: dict[tuple, list[int]] = {}
    for tr in raw:
        r = _ray(base, tr)
        if r is None:
            continue
        disp, coord = _display(base, tr, r[0])
        rays.setdefault((disp[0], disp[1], coord), []).append(disp[2][coord])
    unbounded = {k: sorted(set(v)) for k, v in rays.items() if max(v) > cap - 2}

    families: dict[tuple, tuple[Triple, Parametric, tuple[str, ...]]] = {}
    covered: set[Triple] = set()
    singles: set[Triple] = set()
    for (d1, d2, coord), ts in unbounded.items():
        def member(t, d1=d1, d2=d2, coord=coord):
            v = [0] * base.picard_rank
            v[coord] = t
            return (d1, d2, tuple(v))

        if base.kind == "P1xP1":
            n1 = d1[coord]
            fam = [t for t in ts if t >= n1]
            lone = [t for t in ts if t < n1 or (t == n1 and 2 * n1 <= 4)]
            prov = ("(1)", "(2)")
        else:
            fam = [t for t in ts if t > 0]
            lone = [t for t in ts if t == 0]
            prov = ()
        for t in ts:
            covered.add(canonical(base, member(t)))
        for t in lone:
            singles.add(canonical(base, member(t)))
        rep = member(fam[0])
        fkey = canonical(base, rep)
        if fkey not in families:
            families[fkey] = (rep, Parametric(2, coord, fam[0]), prov)

    rows: list[ClassificationRow] = []
    seen: set[Triple] = set()
    for tr in raw:
        c = canonical(base, tr)
        if c in seen or (c in covered and c not in singles):
            continue
        seen.add(c)
        data = BidoubleData.from_totals(base, *c)
        inv = invariants(data)
        if inv.k2 < 0:
            continue
        prov = ()
        r = _ray(base, c)
        if base.kind == "P1xP1" and r is not None and c in singles:
            disp, coord = _display(base, c, r[0])
            prov = (_p1p1_case(disp[0][coord], disp[2][coord]),)
        rows.append(ClassificationRow(data, inv, None, None, prov))
    for fkey, (rep, par, prov) in families.items():
        data = BidoubleData.from_totals(base, *rep)
        rows.append(ClassificationRow(data, invariants(data), par, None, prov))
    rows.sort(key=lambda r: (r.parametric is not None, r.key))
    return rows


def f_group(row: ClassificationRow) -> str:
    """Sub-table of an F_n row: 'reducible' when D1 or D2 contains C_n."""
    base = row.data.base
    C = base.cls(1, 0)
    for img in symmetry_images(base, row.data.key()):
        if any(c == C for i in (0, 1) for c in generic_components(base.cls(*img[i]))):
            return "reducible"
    return "irreducible"


def p1p1_group(row: ClassificationRow) -> str:
    return "general" if row.invariants.k2 > 0 else "elliptic"
