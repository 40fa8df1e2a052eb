"""Integral quadratic lattices: named constructors, an expression parser,
exact signatures and discriminant groups.

Expression grammar (whitespace ignored, '+' accepted for '⊕')::

    expr  := term (('⊕' | '+') term)*
    term  := atom ['(' int ')'] ['^' power]
    power := int | '{' ['⊕'] int '}'
    atom  := 'U' | 'E8' | 'D4' | 'D6' | 'N' | '<' int '>'

Root lattices written without a twist are taken negative definite, so
``E8`` and ``E8(-1)`` agree and ``E8(-2)`` is the positive E8 scaled by -2.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

Matrix = tuple[tuple[int, ...], ...]


class LatticeError(ValueError):
    pass


class ParseError(LatticeError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Lattice:
    gram: Matrix

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        n = len(g)
        if any(len(r) != n for r in g):
            raise LatticeError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise LatticeError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.gram)

    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))


# -- constructors -------------------------------------------------------------

def _cartan(n: int, edges: Sequence[tuple[int, int]]) -> Matrix:
    g = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    for a, b in edges:
        g[a][b] = g[b][a] = -1
    return tuple(map(tuple, g))


# Bourbaki labelling: E8 chain 1-3-4-5-6-7-8 with 2 on 4; D_n chain with fork at n-2
_ROOTS = {
    "E8": _cartan(8, [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]),
    "D4": _cartan(4, [(0, 1), (1, 2), (1, 3)]),
    "D6": _cartan(6, [(0, 1), (1, 2), (2, 3), (3, 4), (3, 5)]),
}


def _nikulin() -> Matrix:
    # e1..e7 with e_i^2 = -2, and v = (e1 + ... + e8)/2
    g = [[-2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i in range(7):
        g[i][7] = g[7][i] = -1
    g[7][7] = -4
    return tuple(map(tuple, g))


U = Lattice(((0, 1), (1, 0)))


def zero_lattice() -> Lattice:
    return Lattice(())


def direct_sum(*ls: Lattice) -> Lattice:
    n = sum(l.rank for l in ls)
    g = [[0] * n for _ in range(n)]
    off = 0
    for l in ls:
        for i in range(l.rank):
            for j in range(l.rank):
                g[off + i][off + j] = l.gram[i][j]
        off += l.rank
    return Lattice(tuple(map(tuple, g)))


def twist(l: Lattice, k: int) -> Lattice:
    if k == 0:
        raise LatticeError("twist by 0 is not allowed")
    return Lattice(tuple(tuple(k * x for x in row) for row in l.gram))


def diag(*ks: int) -> Lattice:
    return direct_sum(*(Lattice(((k,),)) for k in ks))


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Term:
    atom: str  # "U", "E8", "D4", "D6", "N", or "<k>"
    twist: int = 1
    power: int = 1

    def lattice(self) -> Lattice:
        if self.atom == "U":
            base = U
        elif self.atom == "N":
            base = Lattice(_nikulin())
        elif self.atom in _ROOTS:
            base = Lattice(_ROOTS[self.atom])
        else:
            base = Lattice(((int(self.atom[1:-1]),),))
        one = twist(base, self.twist)
        return direct_sum(*([one] * self.power))

    def text(self) -> str:
        if self.atom.startswith("<"):
            s = f"<{int(self.atom[1:-1]) * self.twist}>"
        elif self.atom in _ROOTS or self.twist != 1:
            s = f"{self.atom}({self.twist})"
        else:
            s = self.atom
        return s + (f"^{self.power}" if self.power > 1 else "")


_TOKEN = re.compile(r"\s*(?:(U|E8|E_8|D4|D_4|D6|D_6|N)|<\s*([+-]?\d+)\s*>|(⊕|\+)|\(\s*([+-]?\d+)\s*\)|\^\s*\{?\s*⊕?\s*(\d+)\s*\}?)")


def parse(expr: str) -> list[Term]:
    s = expr.replace("−", "-").replace("\\oplus", "⊕").replace("{\\oplus", "{⊕").replace("\\langle", "<").replace("\\rangle", ">")
    pos = 0
    terms: list[Term] = []
    expect_atom = True
    cur: Optional[dict] = None
    while True:
        while pos < len(s) and s[pos].isspace():
            pos += 1
        if pos >= len(s):
            break
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected {s[pos]!r}", pos)
        atom, angle, plus, tw, pw = m.groups()
        if atom or angle is not None:
            if not expect_atom:
                raise ParseError("missing ⊕ between terms", pos)
            name = atom.replace("_", "") if atom else f"<{int(angle)}>"
            if angle is not None and int(angle) == 0:
                raise ParseError("<0> is degenerate", pos)
            # unsigned root lattices are negative definite
            default = -1 if name in _ROOTS else 1
            cur = {"atom": name, "twist": default, "power": 1, "twisted": False}
            terms.append(cur)
            expect_atom = False
        elif plus:
            if expect_atom:
                raise ParseError("⊕ without left operand", pos)
            expect_atom = True
        elif tw is not None:
            if cur is None or expect_atom or cur["twisted"] or cur["power"] != 1:
                raise ParseError("misplaced twist", pos)
            k = int(tw)
            if k == 0:
                raise ParseError("invalid twist 0", pos)
            cur["twist"] = k
            cur["twisted"] = True
        else:
            if cur is None or expect_atom or cur["power"] != 1:
                raise ParseError("misplaced power", pos)
            p = int(pw)
            if p < 1:
                raise ParseError("power must be >= 1", pos)
            cur["power"] = p
        pos = m.end()
    if expect_atom:
        raise ParseError("expression ends without a term", pos)
    out = []
    for t in terms:
        tw_ = t["twist"]
        if t["atom"].startswith("<"):
            out.append(Term(f"<{int(t['atom'][1:-1]) * tw_}>", 1, t["power"]))
        else:
            out.append(Term(t["atom"], tw_, t["power"]))
    return out


def normalize(expr: str) -> str:
    """Canonical printed form: explicit twists on root lattices, merged powers."""
    merged: list[Term] = []
    for t in parse(expr):
        if merged and merged[-1].atom == t.atom and merged[-1].twist == t.twist:
            merged[-1] = Term(t.atom, t.twist, merged[-1].power + t.power)
        else:
            merged.append(t)
    return " ⊕ ".join(t.text() for t in merged)


def named(expr: str) -> Lattice:
    return direct_sum(*(t.lattice() for t in parse(expr)))


# -- invariants ---------------------------------------------------------------

def det(l: Lattice) -> int:
    n = l.rank
    a = [[Fraction(x) for x in row] for row in l.gram]
    d = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            d = -d
        d *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return int(d)


def diagonalize(gram: Matrix) -> list[Fraction]:
    """Diagonal entries of a congruent diagonal form over Q."""
    n = len(gram)
    a = [[Fraction(x) for x in row] for row in gram]
    out = []
    for c in range(n):
        if a[c][c] == 0:
            p = next((r for r in range(c + 1, n) if a[r][r] != 0), None)
            if p is not None:
                a[c], a[p] = a[p], a[c]
                for row in a:
                    row[c], row[p] = row[p], row[c]
            else:
                p = next((r for r in range(c + 1, n) if a[c][r] != 0), None)
                if p is None:
                    out.append(Fraction(0))
                    continue
                # e_c <- e_c + e_p makes the pivot 2 a[c][p] != 0
                for k in range(n):
                    a[c][k] += a[p][k]
                for k in range(n):
                    a[k][c] += a[k][p]
        piv = a[c][c]
        out.append(piv)
        for r in range(c + 1, n):
            f = a[r][c] / piv
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
                for k in range(c, n):
                    a[k][r] -= f * a[k][c]
    return out


def signature(l: Lattice) -> tuple[int, int]:
    d = diagonalize(l.gram)
    if any(x == 0 for x in d):
        raise LatticeError("degenerate Gram matrix")
    return sum(1 for x in d if x > 0), sum(1 for x in d if x < 0)


def smith(gram: Matrix) -> tuple[list[int], list[list[int]]]:
    """Invariant factors of an integer matrix and P^{-1}, where P A Q = diag."""
    n = len(gram)
    a = [list(row) for row in gram]
    pinv = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        for row in pinv:
            row[i], row[j] = row[j], row[i]

    def add_row(i, j, c):  # row_i += c row_j
        a[i] = [x + c * y for x, y in zip(a[i], a[j])]
        for row in pinv:
            row[j] -= c * row[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]

    def add_col(i, j, c):  # col_i += c col_j
        for row in a:
            row[i] += c * row[j]

    for t in range(n):
        while True:
            nz = [(abs(a[i][j]), i, j) for i in range(t, n) for j in range(t, n) if a[i][j]]
            if not nz:
                return _finish(a, pinv, n)
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            done = True
            for i in range(t + 1, n):
                q = a[i][t] // a[t][t]
                if q:
                    add_row(i, t, -q)
                if a[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = a[t][j] // a[t][t]
                if q:
                    add_col(j, t, -q)
                if a[t][j]:
                    done = False
            if not done:
                continue
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, n) if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            for row in pinv:
                row[t] = -row[t]
    return _finish(a, pinv, n)


def _finish(a, pinv, n):
    return [a[i][i] for i in range(n)], pinv


def _inverse(gram: Matrix) -> list[list[Fraction]]:
    n = len(gram)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(gram)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise LatticeError("degenerate Gram matrix")
        a[c], a[p] = a[p], a[c]
        pv = a[c][c]
        a[c] = [x / pv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


@dataclass(frozen=True)
class DiscriminantGroup:
    cyclic_orders: tuple[int, ...]
    form_values: Optional[tuple[Fraction, ...]] = None

    @property
    def order(self) -> int:
        out = 1
        for d in self.cyclic_orders:
            out *= d
        return out

    def text(self) -> str:
        if not self.cyclic_orders:
            return "0"
        parts = []
        for d in sorted(set(self.cyclic_orders)):
            c = self.cyclic_orders.count(d)
            parts.append(f"(Z/{d})" + (f"^{c}" if c > 1 else ""))
        return " x ".join(parts)


def discriminant_group(l: Lattice, with_form: bool = True) -> DiscriminantGroup:
    if l.rank and det(l) == 0:
        raise LatticeError("degenerate Gram matrix")
    if not l.rank:
        return DiscriminantGroup((), () if with_form else None)
    fac, pinv = smith(l.gram)
    orders = tuple(sorted(d for d in fac if d > 1))
    if not with_form:
        return DiscriminantGroup(orders)
    ginv = _inverse(l.gram)
    mod = 2 if l.is_even() else 1
    vals = []
    for i, d in enumerate(fac):
        if d <= 1:
            continue
        y = [pinv[r][i] for r in range(l.rank)]
        v = sum(y[r] * ginv[r][s] * y[s] for r in range(l.rank) for s in range(l.rank))
        vals.append(v % mod)
    return DiscriminantGroup(orders, tuple(sorted(vals)))


def describe(l: Lattice) -> dict:
    sig = signature(l) if l.rank else (0, 0)
    dg = discriminant_group(l)
    return {
        "rank": l.rank,
        "det": det(l),
        "signature": list(sig),
        "discriminant": {
            "group": list(dg.cyclic_orders),
            "text": dg.text(),
            "form_values": [str(v) for v in dg.form_values],
        },
    }


def same_invariants(a: Lattice, b: Lattice) -> bool:
    """Rank, signature, parity and discriminant group agree."""
    return (
        a.rank == b.rank
        and signature(a) == signature(b)
        and a.is_even() == b.is_even()
        and discriminant_group(a, False).cyclic_orders == discriminant_group(b, False).cyclic_orders
    )
