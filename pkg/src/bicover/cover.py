"""Bidouble cover data over a minimal rational surface and its numerical invariants.

Indices are 1-based in the public API (i = 1, 2, 3), matching D_1, D_2, D_3.
Y_i is the quotient branched on D_j + D_k, with 2 L_i = D_j + D_k.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from .geom import (
    BaseSurface,
    DivisorClass,
    GeomError,
    P1xP1,
    P2,
    Fn,
    dot,
    generic_components,
    h0,
    has_irreducible_member,
    is_nef,
    is_rigid,
)


class CoverError(ValueError):
    pass


class SchemaError(ValueError):
    """Malformed JSON input; carries a field path."""

    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


@dataclass(frozen=True)
class BranchDivisor:
    total: DivisorClass
    components: tuple[DivisorClass, ...]

    @classmethod
    def generic(cls, total: DivisorClass) -> "BranchDivisor":
        return cls(total, tuple(generic_components(total)))


@dataclass(frozen=True)
class BidoubleData:
    base: BaseSurface
    d: tuple[BranchDivisor, BranchDivisor, BranchDivisor]

    @classmethod
    def from_totals(cls, base: BaseSurface, *totals) -> "BidoubleData":
        """Build data from coefficient tuples (or ints on P2) using generic components."""
        ds = []
        for t in totals:
            c = t if isinstance(t, DivisorClass) else base.cls(*((t,) if isinstance(t, int) else t))
            ds.append(BranchDivisor.generic(c))
        if len(ds) != 3:
            raise CoverError("exactly three branch divisors are required")
        return cls(base, tuple(ds))

    @property
    def totals(self) -> tuple[DivisorClass, DivisorClass, DivisorClass]:
        return tuple(b.total for b in self.d)

    def D(self, i: int) -> DivisorClass:
        return self.d[i - 1].total

    def key(self) -> tuple:
        return tuple(t.coeffs for t in self.totals)

    def __str__(self) -> str:
        return f"{self.base}: " + ", ".join(str(t) for t in self.totals)


# -- JSON ------------------------------------------------------------------

def base_to_json(base: BaseSurface) -> Any:
    return {"Fn": base.n} if base.kind == "Fn" else base.kind


def base_from_json(obj: Any, path: str = "base") -> BaseSurface:
    if obj == "P2":
        return P2
    if obj == "P1xP1":
        return P1xP1
    if isinstance(obj, dict) and set(obj) == {"Fn"} and isinstance(obj["Fn"], int):
        try:
            return Fn(obj["Fn"])
        except GeomError as e:
            raise SchemaError(path, str(e)) from None
    raise SchemaError(path, f'expected "P2", "P1xP1" or {{"Fn": n}}, got {obj!r}')


def _vec(obj: Any, base: BaseSurface, path: str) -> DivisorClass:
    if not isinstance(obj, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in obj):
        raise SchemaError(path, "expected a list of integers")
    if len(obj) != base.picard_rank:
        raise SchemaError(path, f"expected {base.picard_rank} coefficients, got {len(obj)}")
    return base.cls(*obj)


def data_from_json(obj: Any) -> BidoubleData:
    if not isinstance(obj, dict):
        raise SchemaError("$", "expected an object")
    for k in ("base", "divisors"):
        if k not in obj:
            raise SchemaError(k, "missing field")
    base = base_from_json(obj["base"])
    divs = obj["divisors"]
    if not isinstance(divs, list) or len(divs) != 3:
        raise SchemaError("divisors", "expected a list of three divisors")
    out = []
    for i, dv in enumerate(divs):
        p = f"divisors[{i}]"
        if not isinstance(dv, dict) or "total" not in dv:
            raise SchemaError(p, 'expected an object with "total"')
        total = _vec(dv["total"], base, p + ".total")
        if "components" in dv:
            comps = dv["components"]
            if not isinstance(comps, list):
                raise SchemaError(p + ".components", "expected a list")
            cs = tuple(_vec(c, base, f"{p}.components[{j}]") for j, c in enumerate(comps))
        else:
            try:
                cs = tuple(generic_components(total))
            except GeomError:
                cs = (total,)
        out.append(BranchDivisor(total, cs))
    return BidoubleData(base, tuple(out))


def data_to_json(data: BidoubleData) -> dict:
    return {
        "base": base_to_json(data.base),
        "divisors": [
            {"total": list(b.total.coeffs), "components": [list(c.coeffs) for c in b.components]}
            for b in data.d
        ],
    }


def load_data(path: str) -> BidoubleData:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as e:
            raise SchemaError("$", f"invalid JSON: {e}") from None
    return data_from_json(obj)


# -- validation --------------------------------------------------------------

PAIRS = ((1, 2), (1, 3), (2, 3))


def validate(data: BidoubleData) -> list[str]:
    """Return the list of violated conditions (empty when the data is admissible)."""
    errs: list[str] = []
    base = data.base
    for i, j in PAIRS:
        s = data.D(i) + data.D(j)
        if any(c % 2 for c in s.coeffs):
            errs.append(f"parity: D{i}+D{j} = {s} is not divisible by 2")
    zeros = [i for i in (1, 2, 3) if data.D(i).is_zero()]
    if len(zeros) > 1:
        errs.append(f"two trivial divisors: D{zeros[0]} and D{zeros[1]} are both 0")
    for i in (1, 2, 3):
        bd = data.d[i - 1]
        if any(c < 0 for c in bd.total.coeffs) or h0(bd.total) == 0:
            errs.append(f"effectivity: D{i} = {bd.total} is not effective")
            continue
        acc = base.cls(*([0] * base.picard_rank))
        for c in bd.components:
            acc = acc + c
            if not has_irreducible_member(c):
                errs.append(f"component: D{i} has component {c} without irreducible member")
        if acc != bd.total:
            errs.append(f"components: D{i} components sum to {acc}, not {bd.total}")
    # rigid curves are unique in their class, so a repeat is a non-reduced branch
    seen: dict[tuple, int] = {}
    for i in (1, 2, 3):
        for c in data.d[i - 1].components:
            if not is_rigid(c):
                continue
            if c.coeffs in seen:
                j = seen[c.coeffs]
                if j == i:
                    errs.append(f"reduced: rigid component {c} appears twice in D{i}")
                else:
                    errs.append(f"reduced: rigid component {c} appears in D{j} and D{i}")
            else:
                seen[c.coeffs] = i
    if base.kind == "Fn":
        C = base.cls(1, 0)
        holders = [i for i in (1, 2, 3) for c in data.d[i - 1].components if c == C]
        if len(holders) > 1 and not any("rigid component" in e for e in errs):
            errs.append(f"C_n: appears {len(holders)} times (in D{holders})")
    return errs


def check(data: BidoubleData) -> None:
    errs = validate(data)
    if errs:
        raise CoverError("; ".join(errs))


# -- invariants ------------------------------------------------------------

def half_classes(data: BidoubleData) -> tuple[DivisorClass, DivisorClass, DivisorClass]:
    D1, D2, D3 = data.totals
    return ((D2 + D3).halve(), (D1 + D3).halve(), (D1 + D2).halve())


def L(data: BidoubleData, i: int) -> DivisorClass:
    return half_classes(data)[i - 1]


def _half_term(data: BidoubleData, Li: DivisorClass) -> Fraction:
    K = data.base.canonical
    return Fraction(dot(Li, Li + K), 2)


def chi_X(data: BidoubleData) -> int:
    v = 4 + sum(_half_term(data, Li) for Li in half_classes(data))
    if v.denominator != 1:
        raise AssertionError(f"non-integral chi(X) = {v}")
    return int(v)


def k2_X(data: BidoubleData) -> int:
    K = data.base.canonical
    D1, D2, D3 = data.totals
    M = K * 2 + D1 + D2 + D3
    return dot(M, M)


def chi_Yi(data: BidoubleData, i: int) -> int:
    v = 2 + _half_term(data, L(data, i))
    if v.denominator != 1:
        raise AssertionError(f"non-integral chi(Y{i}) = {v}")
    total = sum(2 + _half_term(data, Lj) for Lj in half_classes(data))
    assert chi_X(data) == total - 2, "chi(X) = sum chi(Y_i) - 2 violated"
    return int(v)


def plurigenus_Yi(data: BidoubleData, i: int, k: int) -> int:
    if k < 1:
        raise CoverError("plurigenus index must be >= 1")
    K = data.base.canonical
    Li = L(data, i)
    return h0((K + Li) * k) + h0(K * k + Li * (k - 1))


@dataclass(frozen=True)
class QuotientClass:
    tag: str  # "K3" | "RationalPg0" | "RuledIrregular" | "Other"
    q: int = 0
    p_g: int = 0

    def short(self) -> str:
        return {"K3": "K3", "RationalPg0": "rat", "RuledIrregular": "rul"}.get(self.tag, "oth")

    def __str__(self) -> str:
        if self.tag == "RuledIrregular":
            return f"RuledIrregular({self.q})"
        if self.tag == "Other":
            return f"Other({self.p_g},{self.q})"
        return self.tag


def classify_quotient(data: BidoubleData, i: int) -> QuotientClass:
    Li = L(data, i)
    chi = chi_Yi(data, i)
    if Li == -data.base.canonical:
        return QuotientClass("K3", 0, 1)
    pg = plurigenus_Yi(data, i, 1)
    if all(plurigenus_Yi(data, i, k) == 0 for k in range(1, 5)):
        q = 1 - chi
        return QuotientClass("RationalPg0") if q == 0 else QuotientClass("RuledIrregular", q, 0)
    return QuotientClass("Other", pg - chi + 1, pg)


def pg_q_X(data: BidoubleData) -> tuple[int, int]:
    K = data.base.canonical
    pg = h0(K) + sum(h0(K + Li) for Li in half_classes(data))
    q = 1 + pg - chi_X(data)
    if q < 0:
        raise AssertionError(f"negative irregularity for {data}")
    return pg, q


def kodaira_and_minimality(data: BidoubleData) -> tuple[str, Optional[bool]]:
    """Kodaira dimension tag and minimality flag.

    Tags: "Zero", "K3Special", "One", "Two", or "Undetermined" (minimal is None then).
    """
    K = data.base.canonical
    D1, D2, D3 = data.totals
    M = K * 2 + D1 + D2 + D3
    if M.is_zero():
        pg, q = pg_q_X(data)
        return ("K3Special" if (pg, q) == (1, 0) else "Zero"), True
    if is_nef(M) and dot(M, M) > 0:
        return "Two", True
    if data.base.is_ruled and _is_fibres(D3):
        return "One", True
    return "Undetermined", None


def _is_fibres(D: DivisorClass) -> bool:
    if D.is_zero():
        return False
    a, b = D.coeffs
    if D.surface.kind == "P1xP1":
        return a == 0 or b == 0
    return a == 0


def singular_k2(data: BidoubleData, k: int) -> int:
    """K^2 of the minimal model after imposing k points of type (1,1,1)."""
    if k < 0:
        raise CoverError("k must be nonnegative")
    bound = dot(data.D(1), data.D(2))
    if k > bound:
        raise CoverError(f"k = {k} exceeds D1.D2 = {bound}")
    cubic = data.base.kind == "P2" and all(t.coeffs == (3,) for t in data.totals)
    if cubic and k == 8:
        raise CoverError("k = 8 is not realisable on three cubics")
    return k2_X(data) - k


@dataclass(frozen=True)
class CoverInvariants:
    chi: int
    k2: int
    p_g: int
    q: int
    quotients: tuple[QuotientClass, QuotientClass, QuotientClass]
    kodaira: str
    minimal: Optional[bool]

    def tags(self) -> tuple[str, str, str]:
        return tuple(qc.short() for qc in self.quotients)

    def to_json(self) -> dict:
        return {
            "chi": self.chi,
            "k2": self.k2,
            "p_g": self.p_g,
            "q": self.q,
            "quotients": [str(x) for x in self.quotients],
            "kodaira": self.kodaira,
            "minimal": self.minimal,
        }


def invariants(data: BidoubleData) -> CoverInvariants:
    check(data)
    pg, q = pg_q_X(data)
    chi = chi_X(data)
    assert chi == 1 - q + pg
    kod, mini = kodaira_and_minimality(data)
    return CoverInvariants(
        chi=chi,
        k2=k2_X(data),
        p_g=pg,
        q=q,
        quotients=tuple(classify_quotient(data, i) for i in (1, 2, 3)),
        kodaira=kod,
        minimal=mini,
    )
