"""Command-line interface: ``bicover {classify,invariants,iterated,lattice,check,verify}``.

Exit codes: 0 ok, 1 fixture mismatch, 2 usage or schema error, 3 invalid data.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import fixtures as fx
from . import iterated as it
from . import lattice as lat
from .classify import ClassificationRow, enumerate_rows
from .cover import BidoubleData, SchemaError, data_to_json, invariants, load_data, validate
from .geom import BaseSurface, GeomError, parse_base
from .hodge import hodge_report, itp_check, mtc_check

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INVALID = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InvalidData(Exception):
    def __init__(self, reasons: Sequence[str]):
        super().__init__("; ".join(reasons))
        self.reasons = list(reasons)


# -- rendering ---------------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False)


def render(records: list[dict], columns: Sequence[str], fmt: str) -> str:
    if fmt == "json":
        return _dumps(records)
    cells = [[_cell(r.get(c)) for c in columns] for r in records]
    if fmt == "tsv":
        return "\n".join("\t".join(row) for row in [list(columns)] + cells) + "\n"
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(x.ljust(w) for x, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def _vec(coeffs: tuple[int, ...]) -> str:
    return str(coeffs[0]) if len(coeffs) == 1 else "(" + ",".join(map(str, coeffs)) + ")"


# -- helpers -------------------------------------------------------------------------

def _base(text: Optional[str]) -> BaseSurface:
    if not text:
        raise UsageError("--base is required")
    try:
        return parse_base(text)
    except GeomError as e:
        raise UsageError(str(e)) from None


def _cap(value: Optional[int]) -> int:
    if value is not None:
        cap = value
    else:
        raw = os.environ.get("BICOVER_CAP", "10")
        try:
            cap = int(raw)
        except ValueError:
            raise UsageError(f"BICOVER_CAP must be an integer, got {raw!r}") from None
    if cap < 10:
        raise UsageError("cap must be >= 10")
    return cap


def _load(path: str) -> BidoubleData:
    try:
        data = load_data(path)
    except OSError as e:
        raise UsageError(str(e)) from None
    errs = validate(data)
    if errs:
        raise InvalidData(errs)
    return data


def _labelled(base: BaseSurface, rows: list[ClassificationRow], fdir: Optional[Path]) -> None:
    fixtures = fx.load_all(fdir)
    ann = fixtures.get("annotations")
    for f in fixtures.values():
        if f.get("kind") != "classification" or fx._base(f["base"]) != base:
            continue
        sel = [r for r in rows if f["group"] in ("all", fx.row_group(r))]
        fx.match_expected(sel, f, ann)


def row_record(row: ClassificationRow) -> dict:
    inv = row.invariants
    d = row.data
    rec = {"case": row.label, "base": d.base.name}
    for i in (1, 2, 3):
        rec[f"D{i}"] = _vec(d.D(i).coeffs)
    for i, t in enumerate(inv.tags(), 1):
        rec[f"Y{i}"] = t
    rec.update(p_g=inv.p_g, q=inv.q, K2=inv.k2, kodaira=inv.kodaira, minimal=inv.minimal,
               MTC=mtc_check(d).status, ITP=itp_check(d).status)
    p = row.parametric
    rec["family"] = f"D{p.index + 1}[{p.coord + 1}]>={p.bound}" if p else None
    rec["provenance"] = ",".join(row.provenance) or None
    return rec


ROW_COLUMNS = ("case", "D1", "D2", "D3", "Y1", "Y2", "Y3", "p_g", "q", "K2",
               "kodaira", "minimal", "MTC", "ITP", "family", "provenance")


# -- subcommands -----------------------------------------------------------------------

def cmd_classify(args) -> int:
    base = _base(args.base)
    rows = enumerate_rows(base, _cap(args.cap))
    _labelled(base, rows, args.fixtures_dir)
    print(render([row_record(r) for r in rows], ROW_COLUMNS, args.format), end="")
    return EXIT_OK


def cmd_invariants(args) -> int:
    data = _load(args.input)
    inv = invariants(data).to_json()
    hr = hodge_report(data).to_json()
    out = {"data": data_to_json(data), "invariants": inv, "hodge": hr}
    if args.format == "json":
        print(_dumps(out))
    else:
        rec = dict(inv, quotients=",".join(inv["quotients"]), rank_TX=hr["rank_TX"],
                   rho_X=hr["rho_X"], h11=hr["h11"], m_X=hr["m_X"])
        cols = ("chi", "k2", "p_g", "q", "quotients", "kodaira", "minimal", "h11", "rank_TX", "rho_X", "m_X")
        print(render([rec], cols, args.format), end="")
    return EXIT_OK


def _first_cover(args) -> BidoubleData:
    if args.input:
        return _load(args.input)
    if not (args.base and args.case):
        raise UsageError("iterated needs --input or both --base and --case")
    base = _base(args.base)
    for f in fx.load_all(args.fixtures_dir).values():
        if f.get("kind") != "classification" or fx._base(f["base"]) != base:
            continue
        for r in f["rows"]:
            if r["case"] == args.case:
                return fx._data(base, r["divisors"])
    raise UsageError(f"no case {args.case!r} on {base.name}")


def cmd_iterated(args) -> int:
    first = _first_cover(args)
    try:
        cov = it.build(first)
    except GeomError as e:
        raise InvalidData([str(e)]) from None
    cons = [args.construction] if args.construction else [1, 2]
    sols = [s for c in cons for s in it.enumerate_iterated(cov, c)]
    if args.format == "json":
        print(_dumps({
            "first": data_to_json(first),
            "k": cov.k,
            "K": cov.fmt(cov.canonical),
            "B": cov.fmt(cov.branch),
            "solutions": [s.to_json(cov) for s in sols],
        }))
        return EXIT_OK
    recs = []
    for s in sols:
        j = s.to_json(cov)
        recs.append({"C": j["construction"], "Δ1": j["deltas"][0], "Δ2": j["deltas"][1], "Δ3": j["deltas"][2],
                     "Z1": j["Z1"], "Z3": j["Z3"], "pg_W": j["pg_W"], "rank_TW": j["rank_TW"]})
    print(render(recs, ("C", "Δ1", "Δ2", "Δ3", "Z1", "Z3", "pg_W", "rank_TW"), args.format), end="")
    return EXIT_OK


def cmd_lattice(args) -> int:
    if not args.expr:
        raise UsageError("lattice needs --expr")
    try:
        l = lat.named(args.expr)
        info = lat.describe(l)
    except lat.LatticeError as e:
        raise UsageError(str(e)) from None
    info["expr"] = lat.normalize(args.expr)
    if args.format == "json":
        print(_dumps(info))
    else:
        rec = {"expr": info["expr"], "rank": info["rank"], "det": info["det"],
               "signature": "({},{})".format(*info["signature"]), "discriminant": info["discriminant"]["text"]}
        print(render([rec], ("expr", "rank", "det", "signature", "discriminant"), args.format), end="")
    return EXIT_OK


def cmd_check(args) -> int:
    data = _load(args.input)
    res = {"MTC": mtc_check(data).to_json(), "ITP": itp_check(data).to_json()}
    if args.format == "json":
        print(_dumps(res))
    else:
        recs = [{"check": k, "status": v["status"], "reason": v["reason"]} for k, v in res.items()]
        print(render(recs, ("check", "status", "reason"), args.format), end="")
    return EXIT_OK


def cmd_verify(args) -> int:
    only = [x for part in args.only for x in part.split(",") if x] if args.only else None
    report = fx.verify(args.fixtures_dir, only, _cap(args.cap))
    total = sum(len(v) for v in report.values())
    if args.format == "json":
        print(_dumps({"diffs": total, "tables": {k: [d.to_json() for d in v] for k, v in report.items()}}))
    else:
        for tid, diffs in report.items():
            print(f"{tid}: {'ok' if not diffs else f'{len(diffs)} diff(s)'}")
            for d in diffs:
                print(f"  {d}")
        print(f"total diffs: {total}")
    return EXIT_OK if total == 0 else EXIT_MISMATCH


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bicover", description="Bidouble covers of minimal rational surfaces.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, base=False, cap=False, inp=False):
        sp.add_argument("--format", choices=("table", "json", "tsv"), default="table")
        sp.add_argument("--fixtures-dir", type=Path, default=None, help="alternative fixture directory")
        if base:
            sp.add_argument("--base", help="p2, p1xp1 or fn:N")
        if cap:
            sp.add_argument("--cap", type=int, default=None, help="bound on free fibre coordinates (env BICOVER_CAP)")
        if inp:
            sp.add_argument("--input", required=inp == "required", help="BidoubleData JSON file")
        return sp

    s = common(sub.add_parser("classify", help="enumerate bidouble covers with a K3 quotient"), base=True, cap=True)
    s.set_defaults(func=cmd_classify)
    s = common(sub.add_parser("invariants", help="invariants and Hodge bookkeeping of one cover"), inp="required")
    s.set_defaults(func=cmd_invariants)
    s = common(sub.add_parser("iterated", help="iterated bidouble covers over Y1"), base=True, inp=True)
    s.add_argument("--case", help="case letter of the first cover")
    s.add_argument("--construction", type=int, choices=(1, 2))
    s.set_defaults(func=cmd_iterated)
    s = common(sub.add_parser("lattice", help="invariants of a lattice expression"))
    s.add_argument("--expr")
    s.set_defaults(func=cmd_lattice)
    s = common(sub.add_parser("check", help="MTC and ITP hypothesis checks"), inp="required")
    s.set_defaults(func=cmd_check)
    s = common(sub.add_parser("verify", help="compare every pipeline with the golden tables"), cap=True)
    s.add_argument("--only", action="append", help="table ids (repeatable or comma separated)")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SchemaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidData as e:
        for r in e.reasons:
            print(f"invalid: {r}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
