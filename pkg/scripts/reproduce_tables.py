"""Enumerate every base, match against the stored tables and print a summary.

    python3 scripts/reproduce_tables.py --cap 12 --out tables.json
"""
from __future__ import annotations

import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from bicover import fixtures as fx
from bicover.classify import enumerate_rows
from bicover.cli import row_record
from bicover.geom import parse_base


@dataclass
class Config:
    bases: list[str] = field(default_factory=lambda: ["p2", "p1xp1", "fn:2", "fn:3", "fn:4", "fn:5", "fn:6"])
    cap: int = 10
    out: str | None = None


def run(cfg: Config) -> dict:
    fixtures = fx.load_all()
    ann = fixtures["annotations"]
    result = {"config": asdict(cfg), "bases": {}}
    for name in cfg.bases:
        base = parse_base(name)
        t = time.perf_counter()
        rows = enumerate_rows(base, cfg.cap)
        dt = time.perf_counter() - t
        diffs = []
        for f in fixtures.values():
            if f.get("kind") == "classification" and fx._base(f["base"]) == base:
                sel = [r for r in rows if f["group"] in ("all", fx.row_group(r))]
                diffs += fx.match_expected(sel, f, ann)
        result["bases"][base.name] = {
            "seconds": round(dt, 3),
            "rows": [row_record(r) for r in rows],
            "diffs": [d.to_json() for d in diffs],
        }
        print(f"{base.name:7s} {len(rows):3d} rows  {len(diffs):2d} diffs  {dt:.2f}s")
        for d in diffs:
            print(f"    {d}")
    return result


def main() -> None:
    p = argparse.ArgumentParser()
    p.add_argument("--cap", type=int, default=Config.cap)
    p.add_argument("--bases", nargs="*")
    p.add_argument("--out")
    a = p.parse_args()
    cfg = Config(cap=a.cap, out=a.out)
    if a.bases:
        cfg.bases = a.bases
    res = run(cfg)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            json.dump(res, fh, indent=2, ensure_ascii=False)


if __name__ == "__main__":
    main()
