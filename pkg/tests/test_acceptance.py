"""Acceptance criteria 1-10. Each test prints one PASS/FAIL line."""
import json
import random
import shutil
import time

import pytest

from bicover import fixtures as fx
from bicover import hodge, iterated as it, lattice as lat
from bicover.classify import enumerate_rows, f_group, p1p1_group
from bicover.cli import main
from bicover.cover import BidoubleData, CoverError, chi_X, chi_Yi, pg_q_X, singular_k2
from bicover.geom import P1xP1, P2, Fn, dot, h0, riemann_roch_fn

RESULTS: dict[int, str] = {}


def report(n, desc, problems):
    line = f"criterion {n}: {'PASS' if not problems else 'FAIL'} - {desc}"
    RESULTS[n] = line
    print(line)
    for p in problems:
        print(f"    {p}")
    assert not problems, "\n".join(map(str, problems))


def timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


@pytest.fixture(scope="module")
def F():
    return fx.load_all()


def _rows(base, group=None):
    rows = enumerate_rows(base, 10)
    if group is None:
        return rows
    g = p1p1_group if base.kind == "P1xP1" else f_group
    return [r for r in rows if g(r) == group]


def test_criterion_1_table1(F):
    rows, dt = timed(lambda: enumerate_rows(P2, 10))
    probs = list(fx.match_expected(rows, F["table1"], F["annotations"]))
    if len(rows) != 5:
        probs.append(f"{len(rows)} rows")
    if dt >= 1:
        probs.append(f"took {dt:.2f}s")
    report(1, "Table 1 reproduced on P2", probs)


def test_criterion_2_p1xp1(F):
    rows, dt = timed(lambda: enumerate_rows(P1xP1, 10))
    gen = [r for r in rows if p1p1_group(r) == "general"]
    ell = [r for r in rows if p1p1_group(r) == "elliptic"]
    probs = []
    if (len(gen), len(ell), sum(r.parametric is not None for r in ell)) != (8, 15, 3):
        probs.append(f"sizes {len(gen)}/{len(ell)}")
    probs += fx.match_expected(gen, F["tableP1xP1-general"], F["annotations"])
    probs += fx.match_expected(ell, F["tableP1xP1-elliptic"], F["annotations"])
    if pg_q_X(BidoubleData.from_totals(P1xP1, (4, 0), (0, 4), (4, 0)))[1] != 3:
        probs.append("case l: q != 3")
    if dt >= 5:
        probs.append(f"took {dt:.2f}s")
    report(2, "P1xP1 general and elliptic tables reproduced", probs)


def test_criterion_3_hirzebruch(F):
    t = time.perf_counter()
    probs = []
    tables = [(Fn(2), "irreducible", "tableF2-irreducible", 5), (Fn(2), "reducible", "tableF2-reducible", 6),
            (Fn(3), None, "tableF3", 3), (Fn(4), None, "tableF4", 3)]
    for base, grp, tid, size in tables:
        rows = _rows(base, grp)
        if len(rows) != size:
            probs.append(f"{tid}: {len(rows)} rows, expected {size}")
        probs += fx.match_expected(rows, F[tid], F["annotations"])
    for n in (5, 6, 7, 8):
        if enumerate_rows(Fn(n), 10):
            probs.append(f"F{n} not empty")
    dt = time.perf_counter() - t
    if dt >= 5:
        probs.append(f"took {dt:.2f}s")
    report(3, "F_n tables 5/6/3/3 rows, none for n >= 5", probs)


def test_criterion_4_table2(F):
    probs = list(fx.verify(only=["table2"])["table2"])
    expect = [((3, 3, 1), 12, (None, None, 10), 12), ((3, 3, 3), 36, (10, 10, 10), 19),
              ((2, 4, 0), 13, (None, None, 11), 11), ((4, 2, 2), 26, (None, 11, 11), 16),
              ((5, 1, 1), 32, (None, 14, 14), 16)]
    for ns, r_x, ms, m_x in expect:
        d = BidoubleData.from_totals(P2, *ns)
        rep = hodge.hodge_report(d)
        ranks = 0
        for i, m in enumerate(ms, 1):
            q = rep.quotients[i - 1]
            got = q.moduli if q.rank_T else None
            if got != m:
                probs.append(f"{ns} Y{i}: m {got} != {m}")
            if m is not None:
                T = hodge.transcendental_of(P2, hodge.branch_components(d, i))
                ranks += T.rank
                if not fx.snf_consistent(T):
                    probs.append(f"{ns} Y{i}: discriminant order != |det|")
        if (ranks, rep.rank_TX, rep.m_X) != (r_x, r_x, m_x):
            probs.append(f"{ns}: r_X {ranks}/{rep.rank_TX}, m_X {rep.m_X}")
    report(4, "Table 2 lattice ranks, moduli and discriminants", probs)


def test_criterion_5_hodge(F):
    rep = fx.verify(only=["tableP2-hodge", "tableP1xP1-hodge", "tableFn-hodge"])
    probs = [d for v in rep.values() for d in v]
    for base in (P2, P1xP1, Fn(2), Fn(3), Fn(4)):
        for r in enumerate_rows(base, 10):
            h = hodge.hodge_report(r.data)
            if 2 * r.invariants.p_g + h.h11 != h.rank_TX + h.rho_X:
                probs.append(f"{r.data}: 2p_g + h11 != rank T + rho")
    report(5, "Hodge bookkeeping tables and b2 identity", probs)


CLASSIFICATION = ("table1", "tableP1xP1-general", "tableP1xP1-elliptic",
                  "tableF2-irreducible", "tableF2-reducible", "tableF3", "tableF4")


def test_criterion_6_mtc_itp(F):
    probs = []
    rep = fx.verify(only=list(CLASSIFICATION))
    probs += [d for v in rep.values() for d in v if d.column in ("mtc", "itp")]
    e = next(r for r in F["tableF2-irreducible"]["rows"] if r["case"] == "e")
    data = fx._data(Fn(2), e["divisors"])
    if hodge.mtc_check(data).passed:
        probs.append("F2-irreducible e: MTC not blanked")
    for tid in CLASSIFICATION:
        base = fx._base(F[tid]["base"])
        for r in F[tid]["rows"]:
            d = fx._data(base, r["divisors"])
            if fx.computed_columns(d, None)["itp"] == fx.CROSS:
                probs.append(f"{tid} {r['case']}: × without annotation")
            annotated = fx.computed_columns(d, F["annotations"])["itp"] == fx.CROSS
            if annotated != (r.get("itp") == fx.CROSS):
                probs.append(f"{tid} {r['case']}: × pattern differs")
    report(6, "MTC/ITP columns of all six tables", probs)


def test_criterion_7_singular(F):
    probs = list(fx.verify(only=["table-singular"])["table-singular"])
    cubics = BidoubleData.from_totals(P2, 3, 3, 3)
    got = [singular_k2(cubics, k) for k in range(1, 8)]
    if got != [9 - k for k in range(1, 8)]:
        probs.append(f"K2 {got}")
    try:
        singular_k2(cubics, 8)
        probs.append("k = 8 accepted")
    except CoverError:
        pass
    d = BidoubleData.from_totals(P1xP1, (3, 1), (1, 3), (1, 3))
    if (pg_q_X(d)[0], singular_k2(d, 1)) != (2, 5):
        probs.append("P1xP1 one-point specialization")
    report(7, "singular specializations", probs)


def test_criterion_8_iterated(F):
    t = time.perf_counter()
    ids = ["iterated-P2", "iterated-P1xP1", "iterated-Fn", "table4-iterated"]
    rep = fx.verify(only=ids)
    probs = [d for v in rep.values() for d in v]
    counts = {("iterated-P2", "d"): (1, 1), ("iterated-P2", "e"): (2, 2),
              ("iterated-P1xP1", "d"): (0, 0), ("iterated-P1xP1", "g"): (0, 0),
              ("iterated-P1xP1", "e"): (1, 1), ("iterated-P1xP1", "f"): (3, 2),
              ("iterated-Fn", "a"): (2, 3), ("iterated-Fn", "o"): (1, 0),
              ("iterated-Fn", "i"): (0, 0), ("iterated-Fn", "m"): (0, 0)}
    for tid in ids[:3]:
        for c in F[tid]["covers"]:
            cov = it.build(fx._data(fx._base(c["base"]), c["divisors"]))
            got = tuple(len(it.enumerate_iterated(cov, k)) for k in (1, 2))
            if got != counts[(tid, c["case"])]:
                probs.append(f"{tid} {c['case']}: {got} solutions")
    summary = [(r["pg_W"], r["r_W"]) for r in F["table4-iterated"]["rows"]]
    if summary != [(3, 27), (5, 48), (3, 29), (3, 36), (4, 40), (5, 56)]:
        probs.append(f"Table 4 fixture {summary}")
    dt = time.perf_counter() - t
    if dt >= 10:
        probs.append(f"took {dt:.2f}s")
    report(8, "iterated cover solution sets and Table 4", probs)


def test_criterion_9_properties(F):
    rng = random.Random(20261019)
    probs = []
    for _ in range(1000):
        b = rng.choice([P2, P1xP1, Fn(2), Fn(3)])
        x, y, z = (b.cls(*[rng.randint(-50, 50) for _ in range(b.picard_rank)]) for _ in range(3))
        k = rng.randint(-50, 50)
        if dot(x, y) != dot(y, x) or dot(x + y, z) != dot(x, z) + dot(y, z) or dot(k * x, y) != k * dot(x, y):
            probs.append(f"dot fails on {x}, {y}, {z}")
    for n in range(2, 7):
        for a in range(9):
            for b in range(a * n, 41):
                if h0(Fn(n).cls(a, b)) != riemann_roch_fn(n, a, b):
                    probs.append(f"h0 on F{n} ({a},{b})")
    for base in (P2, P1xP1, Fn(2), Fn(3), Fn(4)):
        for r in enumerate_rows(base, 10):
            if chi_X(r.data) != sum(chi_Yi(r.data, i) for i in (1, 2, 3)) - 2:
                probs.append(f"chi identity on {r.data}")
    for _ in range(200):
        n = rng.randint(1, 6)
        g = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                g[i][j] = g[j][i] = rng.randint(-6, 6)
        fac, _ = lat.smith(g)
        prod = 1
        for f in fac:
            prod *= f
        if abs(prod) != abs(lat.det(lat.Lattice(g))):
            probs.append(f"det != prod of invariant factors for {g}")
    for tid in ("iterated-P2", "iterated-P1xP1", "iterated-Fn"):
        for c in F[tid]["covers"]:
            cov = it.build(fx._data(fx._base(c["base"]), c["divisors"]))
            for k in (1, 2):
                a = {s.deltas for s in it.enumerate_iterated(cov, k)}
                b = {s.deltas for s in it.enumerate_iterated(cov, k, slack=2)}
                if a != b:
                    probs.append(f"{tid} {c['case']} C{k}: widening adds {b - a}")
    for base in (P2, P1xP1, Fn(2)):
        if {r.key for r in enumerate_rows(base, 10)} != {r.key for r in enumerate_rows(base, 20)}:
            probs.append(f"{base}: cap 20 differs from cap 10")
    report(9, "property suites", probs)


def test_criterion_10_end_to_end(tmp_path, capsys):
    probs = []
    code = main(["verify", "--format", "json"])
    clean = json.loads(capsys.readouterr().out)
    if code != 0:
        probs.append(f"clean verify exits {code} with {clean['diffs']} diff(s)")
        for tid, ds in clean["tables"].items():
            probs += [f"{tid} {d['case']} {d['column']}: expected {d['expected']!r}, got {d['actual']!r}" for d in ds]
    d = tmp_path / "data"
    shutil.copytree(fx.default_dir(), d)
    p = d / "table1.json"
    obj = json.loads(p.read_text())
    next(r for r in obj["rows"] if r["case"] == "b")["k2"] += 1
    p.write_text(json.dumps(obj, ensure_ascii=False))
    code2 = main(["verify", "--format", "json", "--fixtures-dir", str(d)])
    pert = json.loads(capsys.readouterr().out)
    if code2 != 1 or pert["diffs"] != clean["diffs"] + 1:
        probs.append(f"perturbed verify exits {code2} with {pert['diffs']} diff(s)")
    report(10, "verify exits 0 when clean and 1 when perturbed", probs)
