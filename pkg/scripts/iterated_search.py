"""Run the iterated-cover search on every stored first cover, with rejections.

    python3 scripts/iterated_search.py --slack 2 --show-rejected
"""
from __future__ import annotations

import argparse
from dataclasses import dataclass

from bicover import fixtures as fx
from bicover import iterated as it


@dataclass
class Config:
    slack: int = 0
    show_rejected: bool = False


def run(cfg: Config) -> None:
    for tid in ("iterated-P2", "iterated-P1xP1", "iterated-Fn"):
        for c in fx.load_fixture(tid)["covers"]:
            base = fx._base(c["base"])
            cov = it.build(fx._data(base, c["divisors"]))
            print(f"{base.name} case {c['case']}: k={cov.k} K={cov.fmt(cov.canonical)} B={cov.fmt(cov.branch)}")
            for k in (1, 2):
                sols = it.enumerate_iterated(cov, k, cfg.slack)
                print(f"  construction {k}: {len(sols)} solution(s)")
                for s in sols:
                    j = s.to_json(cov)
                    print(f"    {', '.join(j['deltas']):28s} Z1={j['Z1']:14s} Z3={j['Z3']:10s} "
                          f"pg_W={j['pg_W']} rank_TW={j['rank_TW']} m={j['moduli']}")
                if cfg.show_rejected:
                    for deltas, why in it.rejected(cov, k):
                        print(f"    rejected {', '.join(cov.fmt(d) for d in deltas)}: {why}")


def main() -> None:
    p = argparse.ArgumentParser()
    p.add_argument("--slack", type=int, default=0)
    p.add_argument("--show-rejected", action="store_true")
    a = p.parse_args()
    run(Config(a.slack, a.show_rejected))


if __name__ == "__main__":
    main()
