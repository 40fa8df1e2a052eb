"""Golden tables: loading, comparison against computed output, and the verify run.

Fixtures live as JSON next to this module (``bicover/data/*.json``) and are
never written to. Every comparison produces :class:`Diff` records; an empty list
means the computed data reproduces the table.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

from . import lattice as lat
from .classify import (
    ClassificationRow,
    _p1p1_case,
    canonical,
    enumerate_rows,
    f_group,
    p1p1_group,
)
from .cover import (
    BidoubleData,
    CoverError,
    base_from_json,
    invariants,
    pg_q_X,
    singular_k2,
    validate,
)
from .geom import BaseSurface, Fn
from .hodge import (
    _x_is_k3_or_abelian,
    all_components,
    branch_components,
    hodge_report,
    itp_check,
    moduli_count,
    mtc_check,
    transcendental_of,
)
from . import iterated as it

REQUIRED = (
    "table1",
    "table2",
    "tableP2-hodge",
    "tableP1xP1-general",
    "tableP1xP1-elliptic",
    "tableP1xP1-hodge",
    "tableP1xP1-tra",
    "tableF2-irreducible",
    "tableF2-reducible",
    "tableF3",
    "tableF4",
    "tableFn-empty",
    "tableFn-hodge",
    "table-singular",
    "iterated-P2",
    "iterated-P1xP1",
    "iterated-Fn",
    "table4-iterated",
    "annotations",
)

CHECK = "✓"
CROSS = "×"


@dataclass(frozen=True)
class Diff:
    table: str
    case: str
    column: str
    expected: Any
    actual: Any

    def __str__(self) -> str:
        return f"{self.table} {self.case}: {self.column} expected {self.expected!r}, got {self.actual!r}"

    def to_json(self) -> dict:
        return {"table": self.table, "case": self.case, "column": self.column,
                "expected": self.expected, "actual": self.actual}


# -- loading ---------------------------------------------------------------------

def default_dir() -> Path:
    return Path(str(resources.files("bicover") / "data"))


def load_all(directory: Optional[Path] = None) -> dict[str, dict]:
    d = Path(directory) if directory else default_dir()
    out = {}
    for p in sorted(d.glob("*.json")):
        obj = json.loads(p.read_text(encoding="utf-8"))
        out[obj["table_id"]] = obj
    return out


def load_fixture(table_id: str, directory: Optional[Path] = None) -> dict:
    fx = load_all(directory)
    if table_id not in fx:
        raise KeyError(f"no fixture {table_id!r}")
    return fx[table_id]


def _data(base: BaseSurface, divisors) -> BidoubleData:
    return BidoubleData.from_totals(base, *[tuple(v) for v in divisors])


def _base(obj) -> BaseSurface:
    return base_from_json(obj)


# -- classification tables ---------------------------------------------------------

def row_group(row: ClassificationRow) -> str:
    kind = row.data.base.kind
    if kind == "Fn":
        return f_group(row)
    if kind == "P1xP1":
        return p1p1_group(row)
    return "all"


def _itp_annotated(base: BaseSurface, triple, annotations: Optional[dict]) -> bool:
    if not annotations:
        return False
    key = canonical(base, triple)
    for a in annotations.get("itp_fail", []):
        b = _base(a["base"])
        if b == base and canonical(b, tuple(tuple(v) for v in a["divisors"])) == key:
            return True
    return False


def computed_columns(data: BidoubleData, annotations: Optional[dict] = None) -> dict:
    """Table columns computed in the orientation of ``data``."""
    inv = invariants(data)
    key = data.key()
    itp = itp_check(data)
    if _itp_annotated(data.base, key, annotations):
        itp_cell = CROSS
    else:
        itp_cell = CHECK if itp.passed else ""
    return {
        "tags": list(inv.tags()),
        "p_g": inv.p_g,
        "q": inv.q,
        "k2": inv.k2,
        "mtc": CHECK if mtc_check(data).passed else "",
        "itp": itp_cell,
    }


def match_expected(rows: Iterable[ClassificationRow], fixture: dict,
                   annotations: Optional[dict] = None) -> list[Diff]:
    """Compare enumerated rows with a classification fixture.

    Matching is by canonical form (plus the parametric flag); the columns are
    recomputed on the fixture's own orientation so that quotient order agrees
    with the printed table. Matched rows get their ``label`` set.
    """
    tid = fixture["table_id"]
    rows = list(rows)
    by_key = {r.key: r for r in rows}
    used = set()
    diffs: list[Diff] = []
    base = _base(fixture["base"])
    for fr in fixture["rows"]:
        case = fr["case"]
        data = _data(base, fr["divisors"])
        errs = validate(data)
        if errs:
            diffs.append(Diff(tid, case, "data", "valid", "; ".join(errs)))
            continue
        key = (canonical(base, data.key()), "bound" in fr)
        row = by_key.get(key)
        if row is None:
            diffs.append(Diff(tid, case, "row", "present", "missing"))
            continue
        used.add(key)
        row.label = case
        got = computed_columns(data, annotations)
        for col in ("tags", "p_g", "q", "k2", "mtc", "itp"):
            if col in fr and fr[col] != got[col]:
                diffs.append(Diff(tid, case, col, fr[col], got[col]))
        if "bound" in fr:
            b = fr["bound"]
            if row.parametric is None or row.parametric.bound != b["min"]:
                diffs.append(Diff(tid, case, "bound", b["min"], row.parametric and row.parametric.bound))
            if fr["divisors"][b["divisor"] - 1][b["coord"] - 1] != b["min"]:
                diffs.append(Diff(tid, case, "bound", "minimal member", fr["divisors"]))
        if "case_tag" in fr:
            if row.parametric is not None:
                tag = ",".join(row.provenance)
            else:
                d1, _, d3 = data.key()
                tag = _p1p1_case(d1[0], d3[0])
            if tag != fr["case_tag"]:
                diffs.append(Diff(tid, case, "case_tag", fr["case_tag"], tag))
    for r in rows:
        if r.key not in used:
            diffs.append(Diff(tid, "?", "row", "absent", str(r.data)))
    if "golden" in fixture:
        text = render_golden(fixture, annotations)
        if text != fixture["golden"]:
            diffs.append(Diff(tid, "*", "golden", fixture["golden"], text))
    return diffs


def render_golden(fixture: dict, annotations: Optional[dict] = None) -> str:
    """TSV in the column layout of the printed table, values recomputed."""
    base = _base(fixture["base"])
    lines = ["\t".join(fixture["columns"])]
    for fr in fixture["rows"]:
        data = _data(base, fr["divisors"])
        c = computed_columns(data, annotations)
        ns = [t.coeffs[0] for t in data.totals]
        cells = [fr["case"], *map(str, ns), *c["tags"], str(c["p_g"]), str(c["q"]),
                 str(sum(ns)), str(c["k2"]), fr.get("name", ""), c["mtc"], c["itp"]]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def _check_classification(fx: dict, ctx: "Context") -> list[Diff]:
    base = _base(fx["base"])
    rows = [r for r in ctx.rows(base) if fx["group"] in ("all", row_group(r))]
    return match_expected(rows, fx, ctx.fixtures.get("annotations"))


def _check_empty(fx: dict, ctx: "Context") -> list[Diff]:
    out = []
    for n in fx["bases"]:
        rows = ctx.rows(Fn(n))
        if rows:
            out.append(Diff(fx["table_id"], f"F{n}", "rows", 0, len(rows)))
    return out


# -- lattice / hodge tables --------------------------------------------------------

def snf_consistent(l: lat.Lattice) -> bool:
    factors, _ = lat.smith(l.gram)
    prod = 1
    for f in factors:
        prod *= f
    return abs(lat.det(l)) == prod


def _check_transcendental(fx: dict, ctx: "Context") -> list[Diff]:
    tid = fx["table_id"]
    base = _base(fx["base"])
    out = []
    for fr in fx["rows"]:
        case = fr["case"]
        data = _data(base, fr["divisors"])
        hr = hodge_report(data)
        ranks = 0
        for i in (1, 2, 3):
            expr, m = fr["T"][i - 1], fr["m"][i - 1]
            q = hr.quotients[i - 1]
            is_k3 = q.rank_T > 0
            if (expr is not None) != is_k3:
                out.append(Diff(tid, case, f"T_Y{i}", expr, "K3" if is_k3 else "-"))
                continue
            if expr is None:
                continue
            listed = lat.named(expr)
            ranks += listed.rank
            if not snf_consistent(listed):
                out.append(Diff(tid, case, f"T_Y{i} snf", "|det| = prod factors", lat.describe(listed)))
            try:
                mine = transcendental_of(base, branch_components(data, i))
            except (LookupError, AssertionError) as e:
                out.append(Diff(tid, case, f"T_Y{i}", expr, str(e)))
                continue
            if not lat.same_invariants(listed, mine):
                out.append(Diff(tid, case, f"T_Y{i}", lat.describe(listed), lat.describe(mine)))
            if m != q.moduli:
                out.append(Diff(tid, case, f"m_{i}", m, q.moduli))
        if "r_X" in fr:
            if fr["r_X"] != hr.rank_TX:
                out.append(Diff(tid, case, "r_X", fr["r_X"], hr.rank_TX))
            if fr["r_X"] != ranks:
                out.append(Diff(tid, case, "r_X", fr["r_X"], f"sum of listed ranks {ranks}"))
        if fr["m_X"] != hr.m_X:
            out.append(Diff(tid, case, "m_X", fr["m_X"], hr.m_X))
    return out


def _check_hodge(fx: dict, ctx: "Context") -> list[Diff]:
    tid = fx["table_id"]
    out = []
    for fr in fx["rows"]:
        case = fr["case"]
        base = _base(fr.get("base", fx.get("base")))
        data = _data(base, fr["divisors"])
        hr = hodge_report(data)
        inv = invariants(data)
        if fr["h11"] != hr.h11:
            out.append(Diff(tid, case, "h11", fr["h11"], hr.h11))
        rho = [q.rho_singular for q in hr.quotients]
        if fr["rho"] != rho:
            out.append(Diff(tid, case, "rho", fr["rho"], rho))
        k3 = [i for i in (1, 2, 3) if inv.quotients[i - 1].tag == "K3"]
        if fr["for_i"] != k3:
            out.append(Diff(tid, case, "for_i", fr["for_i"], k3))
        for i in k3:
            t = list(hr.hodge_triple(i))
            if t != fr["triple"]:
                out.append(Diff(tid, case, f"triple Y{i}", fr["triple"], t))
        if 2 * inv.p_g + hr.h11 != hr.rank_TX + hr.rho_X:
            out.append(Diff(tid, case, "b2 bookkeeping", 2 * inv.p_g + hr.h11, hr.rank_TX + hr.rho_X))
        if hr.flags:
            out.append(Diff(tid, case, "flags", [], list(hr.flags)))
    return out


def _check_singular(fx: dict, ctx: "Context") -> list[Diff]:
    tid = fx["table_id"]
    out = []
    for fr in fx["rows"]:
        case = f"{fr['base'] if isinstance(fr['base'], str) else 'Fn'} {fr['case']}"
        data = _data(_base(fr["base"]), fr["divisors"])
        pg, _ = pg_q_X(data)
        if pg != fr["p_g"]:
            out.append(Diff(tid, case, "p_g", fr["p_g"], pg))
        m_X = moduli_count(data.base, all_components(data))
        for j, k in enumerate(fr["k"]):
            got = singular_k2(data, k)
            if got != fr["k2"][j]:
                out.append(Diff(tid, case, f"K2 (k={k})", fr["k2"][j], got))
            if "moduli" in fr and m_X - k != fr["moduli"][j]:
                out.append(Diff(tid, case, f"moduli (k={k})", fr["moduli"][j], m_X - k))
        for k in fr["error_k"]:
            try:
                got = singular_k2(data, k)
            except CoverError:
                continue
            out.append(Diff(tid, case, f"K2 (k={k})", "error", got))
    return out


# -- iterated ----------------------------------------------------------------------

def _cover(base_obj, divisors) -> it.BlowupCover:
    return it.build(_data(_base(base_obj), divisors))


def _check_iterated(fx: dict, ctx: "Context") -> list[Diff]:
    tid = fx["table_id"]
    out = []
    for cv in fx["covers"]:
        cov = _cover(cv["base"], cv["divisors"])
        cname = cv.get("name", cv["case"])
        for col, want, got in (("k", cv["k"], cov.k), ("K", cv["K"], cov.fmt(cov.canonical)),
                               ("B", cv["B"], cov.fmt(cov.branch))):
            if want != got:
                out.append(Diff(tid, cname, col, want, got))
        for c in (1, 2):
            sols = {tuple(cov.fmt(d) for d in s.deltas): s for s in ctx.iterated(cov, c)}
            expected = cv["solutions"][str(c)]
            seen = set()
            for e in expected:
                key = tuple(e["deltas"])
                label = f"{cname} C{c} {e.get('label', key[0])}"
                s = sols.get(key)
                if s is None:
                    out.append(Diff(tid, label, "solution", list(key), "missing"))
                    continue
                seen.add(key)
                for col, got in (("Z1", s.z1_class), ("Z3", s.z3_class), ("pg_W", s.pg_W),
                                 ("ranks", list(s.ranks)), ("rank_TW", s.rank_TW)):
                    if col in e and e[col] != got:
                        out.append(Diff(tid, label, col, e[col], got))
                if "T_Y" in e:
                    br = it.specialized_branches(cov, s.deltas)
                    try:
                        mine = transcendental_of(cov.base, br["Y2"])
                        if not lat.same_invariants(mine, lat.named(e["T_Y"])):
                            out.append(Diff(tid, label, "T_Y", e["T_Y"], lat.describe(mine)))
                    except (LookupError, AssertionError) as err:
                        out.append(Diff(tid, label, "T_Y", e["T_Y"], str(err)))
            for key in sols:
                if key not in seen:
                    out.append(Diff(tid, f"{cname} C{c}", "solution", "absent", list(key)))
    return out


def _check_iterated_summary(fx: dict, ctx: "Context") -> list[Diff]:
    tid = fx["table_id"]
    firsts = {"d": [[4], [2], [2]], "e": [[5], [1], [1]]}
    out = []
    for fr in fx["rows"]:
        label = f"{fr['case']} C{fr['construction']}"
        cov = _cover("P2", firsts[fr["cover"]])
        sol = next((s for s in ctx.iterated(cov, fr["construction"])
                    if cov.fmt(s.deltas[0]) == fr["delta1"]), None)
        if sol is None:
            out.append(Diff(tid, label, "solution", fr["delta1"], "missing"))
            continue
        m = [sol.moduli[0], sol.moduli[1], sol.moduli[3]]
        for col, got in (("pg_W", sol.pg_W), ("r_W", sol.rank_TW), ("m", m)):
            if fr[col] != got:
                out.append(Diff(tid, label, col, fr[col], got))
    return out


# -- annotations -------------------------------------------------------------------

_GROUP = re.compile(r"\(Z/(\d+)\)\^(\d+)")


def group_order(text: str) -> int:
    n = 1
    for p, e in _GROUP.findall(text):
        n *= int(p) ** int(e)
    return n


def _check_annotations(fx: dict, ctx: "Context") -> list[Diff]:
    tid = fx["table_id"]
    out = []
    for a in fx["itp_fail"]:
        data = _data(_base(a["base"]), a["divisors"])
        if itp_check(data).passed:
            out.append(Diff(tid, f"{a['table']} {a['case']}", "itp", "HypothesisFail", "Pass"))
    for a in fx["kodaira"]:
        data = _data(_base(a["base"]), a["divisors"])
        got = _x_is_k3_or_abelian(data)
        if got != a["X"]:
            out.append(Diff(tid, str(data), "X", a["X"], got))
    for a in fx["lattices"]:
        case = a["case"]
        data = _data(_base(a["base"]), a["divisors"])
        ty = lat.named(a["T_Y3"])
        tx = lat.named(a["T_X"])
        try:
            mine = transcendental_of(data.base, branch_components(data, 3))
            if not lat.same_invariants(mine, ty):
                out.append(Diff(tid, case, "T_Y3", lat.describe(ty), lat.describe(mine)))
        except (LookupError, AssertionError) as err:
            out.append(Diff(tid, case, "T_Y3", a["T_Y3"], str(err)))
        hr = hodge_report(data)
        if tx.rank != hr.rank_TX or lat.signature(tx) != lat.signature(ty):
            out.append(Diff(tid, case, "T_X rank/signature", (hr.rank_TX, lat.signature(ty)),
                            (tx.rank, lat.signature(tx))))
        if lat.same_invariants(tx, ty) != a["T_X_isometric_T_Y3"]:
            out.append(Diff(tid, case, "T_X vs T_Y3", a["T_X_isometric_T_Y3"], not a["T_X_isometric_T_Y3"]))
        if "NS_Y3" in a:
            ns = lat.named(a["NS_Y3"])
            if ns.rank + ty.rank != 22 or abs(lat.det(ns)) != abs(lat.det(ty)):
                out.append(Diff(tid, case, "NS_Y3", "complement of T_Y3 in rank 22",
                                (ns.rank, lat.det(ns))))
    covers = {"P1xP1 e": [[3, 2], [1, 2], [1, 2]], "P1xP1 f": [[3, 3], [1, 1], [1, 1]]}
    for a in fx["iterated_Z3"]:
        cov = _cover("P1xP1", covers[a["cover"]])
        label = f"{a['cover']} {a['delta1']}"
        sol = next((s for s in ctx.iterated(cov, a["construction"])
                    if cov.fmt(s.deltas[0]) == a["delta1"]), None)
        if sol is None:
            out.append(Diff(tid, label, "solution", a["delta1"], "missing"))
            continue
        if sol.ranks[3] != sum(a["signature"]):
            out.append(Diff(tid, label, "rank T_Z3", sum(a["signature"]), sol.ranks[3]))
        if group_order(a["discriminant"]) <= 1:
            out.append(Diff(tid, label, "discriminant", a["discriminant"], "unparsed"))
    return out


CHECKERS: dict[str, Callable[[dict, "Context"], list[Diff]]] = {
    "classification": _check_classification,
    "empty": _check_empty,
    "transcendental": _check_transcendental,
    "hodge": _check_hodge,
    "singular": _check_singular,
    "iterated": _check_iterated,
    "iterated-summary": _check_iterated_summary,
    "annotations": _check_annotations,
}


class Context:
    """Caches enumeration and iterated searches across fixtures."""

    def __init__(self, fixtures: dict[str, dict], cap: int = 10):
        self.fixtures = fixtures
        self.cap = cap
        self._rows: dict[BaseSurface, list[ClassificationRow]] = {}
        self._it: dict[tuple, list] = {}

    def rows(self, base: BaseSurface) -> list[ClassificationRow]:
        if base not in self._rows:
            self._rows[base] = enumerate_rows(base, self.cap)
        return self._rows[base]

    def iterated(self, cov: it.BlowupCover, c: int) -> list:
        key = (cov.first.base, cov.first.key(), c)
        if key not in self._it:
            self._it[key] = it.enumerate_iterated(cov, c)
        return self._it[key]


def completeness(fixtures: dict[str, dict]) -> list[Diff]:
    out = [Diff(t, "*", "fixture", "present", "missing") for t in REQUIRED if t not in fixtures]
    out += [Diff(t, "*", "fixture", "registered", "unknown") for t in fixtures if t not in REQUIRED]
    out += [Diff(t, "*", "kind", "known", fx.get("kind")) for t, fx in fixtures.items()
            if fx.get("kind") not in CHECKERS]
    return out


def verify(directory: Optional[Path] = None, only: Optional[Iterable[str]] = None,
           cap: int = 10) -> dict[str, list[Diff]]:
    """Run every checker; keys are table ids plus ``"completeness"``."""
    fixtures = load_all(directory)
    ctx = Context(fixtures, cap)
    wanted = set(only) if only else None
    report: dict[str, list[Diff]] = {}
    if wanted is None:
        report["completeness"] = completeness(fixtures)
    elif wanted - set(fixtures):
        report["completeness"] = [Diff(t, "*", "fixture", "present", "missing")
                                  for t in sorted(wanted - set(fixtures))]
    for tid in REQUIRED:
        if tid not in fixtures or (wanted is not None and tid not in wanted):
            continue
        fx = fixtures[tid]
        checker = CHECKERS.get(fx.get("kind"))
        if checker is None:
            continue
        report[tid] = checker(fx, ctx)
    return report
