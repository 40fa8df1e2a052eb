"""Moduli counts, Picard numbers, transcendental ranks and the two hypothesis checkers."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .cover import (
    BidoubleData,
    L,
    check,
    chi_X,
    chi_Yi,
    classify_quotient,
    half_classes,
    k2_X,
    pg_q_X,
)
from .geom import (
    BaseSurface,
    DivisorClass,
    GeomError,
    dot,
    genus,
    h0,
    has_irreducible_member,
    is_rigid,
)
from . import lattice as lat


def moduli_count(base: BaseSurface, components: Iterable[DivisorClass]) -> int:
    """Projective parameters of a branch configuration modulo Aut(base)."""
    return sum(h0(c) - 1 for c in components if not is_rigid(c)) - base.aut_dim


def node_count(components: Sequence[DivisorClass]) -> int:
    return sum(dot(a, b) for a, b in combinations(components, 2))


def branch_components(data: BidoubleData, i: int) -> list[DivisorClass]:
    """Components of D_j + D_k, the branch locus of Y_i."""
    return [c for j in (1, 2, 3) if j != i for c in data.d[j - 1].components]


def all_components(data: BidoubleData) -> list[DivisorClass]:
    return [c for b in data.d for c in b.components]


@dataclass(frozen=True)
class QuotientHodge:
    moduli: int
    rho_resolution: int
    rho_singular: int
    rank_T: int
    nodes: int


def quotient_hodge(data: BidoubleData, i: int) -> QuotientHodge:
    qc = classify_quotient(data, i)
    comps = branch_components(data, i)
    nodes = node_count(comps)
    m = moduli_count(data.base, comps)
    if qc.tag == "K3":
        return QuotientHodge(m, 20 - m, 20 - m - nodes, 2 + m, nodes)
    if qc.tag not in ("RationalPg0", "RuledIrregular"):
        raise ValueError(f"Y{i} is {qc}; no Hodge bookkeeping for this class")
    K = data.base.canonical
    M = K + L(data, i)
    k2 = 2 * dot(M, M)
    rho = 12 * chi_Yi(data, i) - k2 - 2 + 4 * qc.q
    return QuotientHodge(max(0, m), rho, rho - nodes, 0, nodes)


@dataclass(frozen=True)
class HodgeReport:
    h11: int
    rank_TX: int
    rho_X: int
    quotients: tuple[QuotientHodge, QuotientHodge, QuotientHodge]
    m_X: int
    flags: tuple[str, ...] = ()

    def hodge_triple(self, i: int = 3) -> tuple[int, int, int]:
        """(h20, h11, h02) of T(Y_i) for a K3 quotient."""
        r = self.quotients[i - 1].rank_T
        return (1, r - 2, 1)

    def to_json(self) -> dict:
        return {
            "h11": self.h11,
            "rank_TX": self.rank_TX,
            "rho_X": self.rho_X,
            "m_X": self.m_X,
            "quotients": [q.__dict__ for q in self.quotients],
            "flags": list(self.flags),
        }


def hodge_report(data: BidoubleData) -> HodgeReport:
    check(data)
    chi, k2 = chi_X(data), k2_X(data)
    pg, q = pg_q_X(data)
    e = 12 * chi - k2
    b2 = e - 2 + 4 * q
    h11 = b2 - 2 * pg
    qs = tuple(quotient_hodge(data, i) for i in (1, 2, 3))
    rank_TX = sum(x.rank_T for x in qs)
    rho_X = 2 * pg + h11 - rank_TX
    m_X = moduli_count(data.base, all_components(data))
    flags = []
    r = data.base.picard_rank
    if qs[1].rho_singular == r and qs[2].rho_singular == r and rho_X != qs[0].rho_singular:
        flags.append(f"rho(X) = {rho_X} differs from rho(Y1) = {qs[0].rho_singular}")
    if rho_X != sum(x.rho_singular for x in qs) - 2 * r:
        flags.append("rho(X) differs from sum rho(Y_i) - 2 rho(Y)")
    return HodgeReport(h11, rank_TX, rho_X, qs, m_X, tuple(flags))


# -- hypothesis checkers ---------------------------------------------------------

@dataclass(frozen=True)
class CheckResult:
    status: str  # "Pass" | "HypothesisFail"
    reason: str
    witnesses: tuple = ()

    @property
    def passed(self) -> bool:
        return self.status == "Pass"

    def to_json(self) -> dict:
        return {"status": self.status, "reason": self.reason, "witnesses": list(self.witnesses)}


def _x_is_k3_or_abelian(data: BidoubleData) -> Optional[str]:
    K = data.base.canonical
    M = K * 2 + data.D(1) + data.D(2) + data.D(3)
    if not M.is_zero():
        return None
    pg, q = pg_q_X(data)
    return {(1, 0): "K3", (1, 2): "Abelian"}.get((pg, q))


def mtc_check(data: BidoubleData) -> CheckResult:
    check(data)
    kind = _x_is_k3_or_abelian(data)
    if kind:
        return CheckResult("Pass", f"X is {kind}")
    base = data.base
    tags = [classify_quotient(data, i) for i in (1, 2, 3)]
    k3s = [i for i in (1, 2, 3) if tags[i - 1].tag == "K3"]
    if base.kind == "Fn":
        C = base.cls(1, 0)
        for i in k3s:
            comps = branch_components(data, i)
            total = data.D(1) + data.D(2) + data.D(3) - data.D(i)
            if C not in comps and dot(total, C) == 0:
                return CheckResult(
                    "HypothesisFail",
                    f"branch of Y{i} is disjoint from C_n, so rho(Y{i}) > rho(Y)",
                    (f"Y{i}",),
                )
    pg, _ = pg_q_X(data)
    if pg == 1:
        if base.kind != "Fn" or k2_X(data) > 0:
            return CheckResult("Pass", "p_g(X) = 1")
        return CheckResult("HypothesisFail", "p_g(X) = 1 but X is not of general type over F_n")
    if pg in (2, 3):
        bad = [i for i in (1, 2, 3) if tags[i - 1].tag not in ("K3", "RationalPg0")]
        if bad:
            return CheckResult("HypothesisFail", "a quotient is neither K3 nor rational", tuple(f"Y{i}" for i in bad))
        r = base.picard_rank
        off = [i for i in k3s if quotient_hodge(data, i).rho_singular != r]
        if off:
            return CheckResult("HypothesisFail", "a K3 quotient has rho(Y_i) > rho(Y)", tuple(f"Y{i}" for i in off))
        return CheckResult("Pass", f"p_g(X) = {pg}, K3 quotients have rho(Y_i) = rho(Y)", tuple(f"Y{i}" for i in k3s))
    return CheckResult("HypothesisFail", f"p_g(X) = {pg} is outside the criterion")


def _proportional(a: DivisorClass, b: DivisorClass) -> bool:
    x, y = a.coeffs, b.coeffs
    return all(x[i] * y[j] == x[j] * y[i] for i in range(len(x)) for j in range(len(x)))


def itp_check(data: BidoubleData) -> CheckResult:
    check(data)
    kind = _x_is_k3_or_abelian(data)
    if kind:
        return CheckResult("Pass", f"X is {kind}")
    k3s = [i for i in (1, 2, 3) if classify_quotient(data, i).tag == "K3"]
    if len(k3s) < 2:
        return CheckResult("HypothesisFail", "fewer than two K3 quotients")
    # relabel so that the two K3 quotients are Y2, Y3
    j = ({1, 2, 3} - set(k3s[-2:])).pop()
    order = [j] + k3s[-2:]
    Ds = [data.D(i) for i in order]
    reducible = [i for i in order if len(data.d[i - 1].components) != 1]
    if reducible:
        return CheckResult("HypothesisFail", "branch divisor is reducible", tuple(f"D{i}" for i in reducible))
    if not all(_proportional(a, b) for a, b in combinations(Ds, 2)):
        return CheckResult("HypothesisFail", "branch classes are not proportional")
    try:
        gs = [genus(Ds[1]), genus(Ds[2])]
    except GeomError as e:
        return CheckResult("HypothesisFail", str(e))
    if gs != [0, 0]:
        return CheckResult("HypothesisFail", f"D2, D3 have genus {gs[0]}, {gs[1]}")
    K = data.base.canonical
    Ls = half_classes(data)
    for i in (1, 2, 3):
        M = -(K + data.D(i) + Ls[i - 1])
        if h0(M) != 0:
            return CheckResult("HypothesisFail", f"-(K + D{i} + L{i}) has sections")
    return CheckResult("Pass", "proportional rational branch curves with vanishing obstructions", tuple(f"Y{i}" for i in order[1:]))


# -- transcendental lattices ---------------------------------------------------

def descriptor(base: BaseSurface, components: Iterable[DivisorClass]) -> tuple:
    """Hashable key of a branch configuration, invariant under the ruling swap."""
    cs = tuple(sorted(c.coeffs for c in components))
    if base.kind == "P1xP1":
        cs = min(cs, tuple(sorted((c[1], c[0]) for c in cs)))
    return (base.name, cs)


def _k(base: str, *cs) -> tuple:
    from .geom import P1xP1 as Q
    cs = tuple(sorted(c if isinstance(c, tuple) else (c,) for c in cs))
    if base == "P1xP1":
        cs = min(cs, tuple(sorted((c[1], c[0]) for c in cs)))
    return (base, cs)


F, G = (1, 0), (0, 1)

# branch configuration -> lattice name
TRANSCENDENTAL = {
    _k("P2", 3, 3): "U^2 ⊕ E8(-2)",
    _k("P2", 4, 2): "U^2 ⊕ D4(-1) ⊕ <-2>^5",
    _k("P2", 5, 1): "U^2 ⊕ E8(-1) ⊕ <-2>^4",
    _k("P2", 2, 2, 2): "<2>^2 ⊕ <-2>^7",
    _k("P2", 1, 2, 3): "U ⊕ U(2) ⊕ <-2>^6",
    _k("P2", 1, 1, 4): "U^2 ⊕ D4(-1) ⊕ <-2>^4",
    _k("P1xP1", (4, 1), G, G, G): "<2>^2 ⊕ <-2>^6",
    _k("P1xP1", F, F, F, F, G, G, G, G): "U(2)^2",
    _k("P1xP1", (3, 1), (1, 3)): "<2>^2 ⊕ <-2>^8",
    _k("P1xP1", (3, 2), (1, 2)): "U^2 ⊕ <-2>^8",
    _k("P1xP1", (3, 3), (1, 1)): "U^2 ⊕ D6(-1) ⊕ <-2>^4",
    _k("P1xP1", F, F, F, (1, 4)): "U(2)^2 ⊕ <-2>^4",
    _k("P1xP1", (2, 2), (2, 2)): "U^2 ⊕ E8(-2)",
    _k("P1xP1", (4, 2), G, G): "U^2 ⊕ N",
    _k("P1xP1", F, F, (1, 2), (1, 2)): "U(2)^2 ⊕ <-2>^4",
    _k("P1xP1", (2, 2), (1, 1), (1, 1)): "U ⊕ <2> ⊕ <-2>^7",
    _k("P1xP1", (2, 1), (1, 2), (1, 1)): "U(2)^2 ⊕ <-2>^5",
    _k("P1xP1", F, F, (1, 3), (1, 1)): "U(2)^2 ⊕ <-2>^4",
}


class Unassigned(LookupError):
    pass


def transcendental_of(base: BaseSurface, components: Iterable[DivisorClass]) -> lat.Lattice:
    comps = list(components)
    key = descriptor(base, comps)
    if key not in TRANSCENDENTAL:
        raise Unassigned(f"unassigned: no lattice recorded for {key}")
    L_ = lat.named(TRANSCENDENTAL[key])
    m = moduli_count(base, comps)
    assert L_.rank == 2 + m, f"{TRANSCENDENTAL[key]} has rank {L_.rank}, expected 2 + {m}"
    assert lat.signature(L_) == (2, L_.rank - 2)
    return L_


def transcendental_name(base: BaseSurface, components: Iterable[DivisorClass]) -> str:
    comps = list(components)
    transcendental_of(base, comps)
    return TRANSCENDENTAL[descriptor(base, comps)]
