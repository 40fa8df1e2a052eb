"""Iterated bidouble covers over the resolved quotient Y1~.

Y1~ is the double cover of the base blown up at the k = D2.D3 points of
D2 cap D3. Its classes are written in the basis (A_1..A_r, E_1..E_k), where
A_i pulls back the base basis and E_j are the (-2)-curves over the nodes.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .cover import BidoubleData, L, check, chi_Yi, pg_q_X
from .geom import BaseSurface, DivisorClass, GeomError, bilinear, generic_components, h0
from .hodge import moduli_count

Vec = tuple[int, ...]


@dataclass(frozen=True)
class BlowupCover:
    first: BidoubleData
    k: int
    gram: tuple[tuple[int, ...], ...]
    canonical: Vec
    branch: Vec
    L1: Vec  # half class of the first cover on the base

    @property
    def base(self) -> BaseSurface:
        return self.first.base

    @property
    def r(self) -> int:
        return self.base.picard_rank

    def a_part(self, v: Sequence) -> tuple:
        return tuple(v[: self.r])

    def e_part(self, v: Sequence) -> tuple:
        return tuple(v[self.r:])

    def vec(self, a: Sequence[int], e: Optional[Sequence[int]] = None) -> Vec:
        return tuple(a) + tuple(e if e is not None else [0] * self.k)

    def dot(self, x: Sequence, y: Sequence):
        return bilinear(self.gram, x, y)

    def basis_names(self) -> list[str]:
        if self.base.kind == "P2":
            a = ["A"]
        elif self.base.kind == "P1xP1":
            a = ["A1", "A2"]
        else:
            a = ["Γ", "Φ"]
        return a + ["E"] * self.k

    def fmt(self, v: Sequence) -> str:
        """Human form; E-coefficients are printed summed when uniform."""
        names = self.basis_names()
        parts = []
        for c, nm in zip(v[: self.r], names):
            if c:
                parts.append(f"{'' if c == 1 else '-' if c == -1 else c}{nm}")
        e = list(v[self.r:])
        if any(e):
            if len(set(e)) == 1:
                c = e[0]
                lbl = "E" if self.k == 1 else "ΣE"
                parts.append(f"{'' if c == 1 else '-' if c == -1 else c}{lbl}")
            else:
                parts.extend(f"{c}E{j + 1}" for j, c in enumerate(e) if c)
        if not parts:
            return "0"
        return "+".join(parts).replace("+-", "-")


def build(first: BidoubleData) -> BlowupCover:
    check(first)
    base = first.base
    from .geom import dot as bdot

    k = bdot(first.D(2), first.D(3))
    if k < 0:
        raise GeomError("D2.D3 < 0")
    r = base.picard_rank
    n = r + k
    g = [[0] * n for _ in range(n)]
    for i in range(r):
        for j in range(r):
            g[i][j] = 2 * base.gram[i][j]
    for j in range(k):
        g[r + j][r + j] = -2
    L1 = L(first, 1)
    K = tuple((base.canonical + L1).coeffs) + (0,) * k
    B = tuple(first.D(1).coeffs) + (1,) * k
    return BlowupCover(first, k, tuple(map(tuple, g)), K, B, L1.coeffs)


# -- sections on Y1~ -------------------------------------------------------------

def _h0_blown(cov: BlowupCover, a: Sequence[int], e: Sequence[int]) -> int:
    """h0 on the blown-up base of a + sum e_j e_j, expected dimension at general points."""
    m = [max(0, -x) for x in e]
    return max(0, h0(cov.base.cls(*a)) - sum(x * (x + 1) // 2 for x in m))


def h0_tilde(cov: BlowupCover, v: Sequence[int]) -> int:
    """h0 on Y1~ of an integral class pi^*(M), M on the blown-up base.

    E_j is the pullback of the exceptional curve e_j, and
    pi_* O = O + O(-L~) with L~ = L1 - sum e_j.
    """
    a, eb = cov.a_part(v), cov.e_part(v)
    first = _h0_blown(cov, a, eb)
    second = _h0_blown(cov, [x - y for x, y in zip(a, cov.L1)], [x + 1 for x in eb])
    return first + second


# -- admissibility of images on the base ---------------------------------------

def fixed_c(base: BaseSurface, a: int, b: int) -> int:
    """Multiplicity of C_n in the base locus of |aC + bF| (F_n only)."""
    if base.kind != "Fn" or a <= 0:
        return 0
    return max(0, math.ceil(a - Fraction(b, base.n)))


def reduced_components(base: BaseSurface, coeffs: Sequence[int]) -> list[DivisorClass]:
    """Generic members of a class: fixed C_n part plus a reduced moving part."""
    try:
        return generic_components(base.cls(*coeffs))
    except GeomError:
        pass
    if base.kind != "Fn":
        raise GeomError(f"{tuple(coeffs)} has no reduced member")
    a, b = coeffs
    mu = fixed_c(base, a, b)
    rest = base.cls(a - mu, b)
    return [base.cls(1, 0)] * mu + generic_components(rest)


def _image_ok(cov: BlowupCover, deltas, c: int) -> tuple[bool, str]:
    base = cov.base
    d1, d2, d3 = (cov.a_part(x) for x in deltas)
    C = (1, 0)
    c_count = 0
    for name, img in (("Δ1", d1), ("Δ2", d2)):
        if not any(img):
            continue
        try:
            comps = generic_components(base.cls(*img))
        except GeomError:
            return False, f"image of {name} is not irreducible, fibres, or C+B"
        if base.kind == "Fn":
            c_count += sum(1 for x in comps if x.coeffs == C)
    if base.kind == "Fn" and any(d3):
        mu = fixed_c(base, *d3)
        if mu > 1:
            return False, "image of Δ3 contains C_n twice"
        c_count += mu
    if c_count > 1:
        return False, "C_n lies in two branch curves"
    return True, ""


# -- search ---------------------------------------------------------------------

@dataclass(frozen=True)
class IteratedSolution:
    deltas: tuple[Vec, Vec, Vec]
    construction: int  # 1 or 2
    z1_class: str
    z3_class: str
    pg_W: Optional[int]
    rank_TW: Optional[int]
    ranks: tuple  # rank_T of (Y2, Y3, Z1, Z3) with None for non-K3
    moduli: tuple  # (m_Y2, m_Y3, m_Z1, m_Z3) with None for non-K3
    divisibility_verified: bool = False

    def to_json(self, cov: BlowupCover) -> dict:
        return {
            "construction": self.construction,
            "deltas": [cov.fmt(d) for d in self.deltas],
            "deltas_vec": [list(d) for d in self.deltas],
            "Z1": self.z1_class,
            "Z3": self.z3_class,
            "pg_W": self.pg_W,
            "rank_TW": self.rank_TW,
            "ranks": list(self.ranks),
            "moduli": list(self.moduli),
            "divisibility_verified": self.divisibility_verified,
        }


def candidates(cov: BlowupCover, c: int, slack: int = 0) -> list[tuple[Vec, Vec, Vec]]:
    """Triples allowed by the class conditions and the doubled emptiness bound."""
    if c not in (1, 2):
        raise ValueError("construction must be 1 or 2")
    out = []
    bounds = cov.a_part(cov.branch)
    zeroE = (0,) * cov.k
    for a in itertools.product(*[range(b + slack + 1) for b in bounds]):
        d1 = cov.vec(a, zeroE)
        d3 = tuple(x - y for x, y in zip(cov.branch, d1))
        d2 = tuple(-2 * x - y for x, y in zip(cov.canonical, d1)) if c == 1 else d1
        if any(x < 0 for x in d2) or any(x < 0 for x in d3):
            continue
        if any(cov.e_part(d2)):
            continue
        if not any(d1) and not any(d2):
            continue
        if c == 1:
            test = tuple(2 * x + y + z for x, y, z in zip(cov.canonical, d2, d3))
        else:
            test = tuple(2 * x + y + z for x, y, z in zip(cov.canonical, d1, d2))
        if h0_tilde(cov, test) > 1:
            continue
        out.append((d1, d2, d3))
    return out


def _anti_bounded(cov: BlowupCover, d1: Vec) -> bool:
    """-(K + Δ1) is effective on the base (the Z3 branch stays below -2K)."""
    v = [-(x + y) for x, y in zip(cov.a_part(cov.canonical), cov.a_part(d1))]
    return h0(cov.base.cls(*v)) > 0


def _ruling_symmetric(first: BidoubleData) -> bool:
    return first.base.kind == "P1xP1" and all(t.coeffs[0] == t.coeffs[1] for t in first.totals)


def enumerate_iterated(cov: BlowupCover, c: int, slack: int = 0) -> list[IteratedSolution]:
    sols = []
    seen = set()
    for deltas in candidates(cov, c, slack):
        ok, _ = _image_ok(cov, deltas, c)
        if not ok:
            continue
        if c == 2 and not _anti_bounded(cov, deltas[0]):
            continue
        key = deltas
        if _ruling_symmetric(cov.first):
            sw = tuple((d[1], d[0]) + tuple(d[2:]) for d in deltas)
            key = max(deltas, sw)
            if key in seen:
                continue
            seen.add(key)
            deltas = key
        sols.append(_solution(cov, deltas, c))
    sols.sort(key=lambda s: tuple(-x for x in s.deltas[0]))
    return sols


def rejected(cov: BlowupCover, c: int) -> list[tuple[tuple[Vec, Vec, Vec], str]]:
    """Candidates dropped by the image conditions, with the reason."""
    out = []
    for deltas in candidates(cov, c):
        ok, why = _image_ok(cov, deltas, c)
        if ok and c == 2 and not _anti_bounded(cov, deltas[0]):
            ok, why = False, "-(K + Δ1) is not effective"
        if not ok:
            out.append((deltas, why))
    return out


# -- quotients of the second cover -----------------------------------------------

def _chi_Z(cov: BlowupCover, lam: Sequence[Fraction]) -> Fraction:
    chi_y1 = chi_Yi(cov.first, 1)
    lk = [x + y for x, y in zip(lam, cov.canonical)]
    return 2 * chi_y1 + Fraction(1, 2) * cov.dot(lam, lk)


def classify_lambda(cov: BlowupCover, lam: Sequence[Fraction]) -> tuple[str, Fraction]:
    chi = _chi_Z(cov, lam)
    if chi.denominator != 1:
        raise AssertionError(f"non-integral chi = {chi}")
    if tuple(lam) == tuple(-x for x in cov.canonical):
        return "K3", chi
    kl = [x + y for x, y in zip(cov.canonical, lam)]
    pure = cov.a_part(kl)
    if chi == 1 and not any(pure):
        return "Enriques-like", chi
    vanish = True
    for m in range(1, 5):
        a = [m * x for x in pure]
        if any(Fraction(x).denominator != 1 for x in a):
            continue
        if h0_tilde(cov, cov.vec([int(x) for x in a])) > 0:
            vanish = False
            break
    if vanish:
        return ("Rational" if chi == 1 else f"Ruled(q={1 - chi})"), chi
    return "Other", chi


def classify_Z(cov: BlowupCover, sol_or_deltas, which: str, c: Optional[int] = None) -> str:
    if isinstance(sol_or_deltas, IteratedSolution):
        deltas, c = sol_or_deltas.deltas, sol_or_deltas.construction
    else:
        deltas = sol_or_deltas
    d1, d2, d3 = deltas
    if which == "Z3" and c == 1:
        return "K3"
    if which == "Z1" and c == 2:
        return "SameAsX"
    s = (d2, d3) if which == "Z1" else (d1, d2)
    lam = [Fraction(x + y, 2) for x, y in zip(*s)]
    return classify_lambda(cov, lam)[0]


def _pg(tag: str, pg_x: int) -> Optional[int]:
    if tag == "K3":
        return 1
    if tag == "SameAsX":
        return pg_x
    if tag == "Other":
        return None
    return 0


def specialized_branches(cov: BlowupCover, deltas) -> dict[str, list[DivisorClass]]:
    """Branch configurations on the base once D1 splits as push(Δ1) + push(Δ3)."""
    base = cov.base
    d1, d2, d3 = (cov.a_part(x) for x in deltas)
    comps = lambda v: reduced_components(base, v) if any(v) else []
    D2 = list(cov.first.d[1].components)
    D3 = list(cov.first.d[2].components)
    split = comps(d1) + comps(d3)
    return {
        "Y2": split + D3,
        "Y3": split + D2,
        "Z1": comps(d2) + comps(d3) + D2 + D3,
        "Z3": comps(d1) + comps(d2) + D2 + D3,
    }


def _solution(cov: BlowupCover, deltas, c: int) -> IteratedSolution:
    z1 = classify_Z(cov, deltas, "Z1", c)
    z3 = classify_Z(cov, deltas, "Z3", c)
    pg_x, _ = pg_q_X(cov.first)
    parts = [_pg(z1, pg_x), _pg(z3, pg_x)]
    pg_W = None if None in parts else pg_x + sum(parts)
    br = specialized_branches(cov, deltas)
    tags = {"Y2": "K3", "Y3": "K3", "Z1": z1, "Z3": z3}
    moduli, ranks = [], []
    for nm in ("Y2", "Y3", "Z1", "Z3"):
        if tags[nm] == "K3":
            m = moduli_count(cov.base, br[nm])
            moduli.append(m)
            ranks.append(2 + m)
        else:
            moduli.append(None)
            ranks.append(None)
    r = [x or 0 for x in ranks]
    if c == 1:
        rank_TW = r[0] + r[1] + r[2] + r[3]
    else:
        rank_TW = 2 * (r[0] + r[1]) + r[3]
    return IteratedSolution(tuple(deltas), c, z1, z3, pg_W, rank_TW, tuple(ranks), tuple(moduli))
