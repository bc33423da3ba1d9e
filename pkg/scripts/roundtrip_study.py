"""Repeat the simulate/estimate/fit round trip over many seeds and summarise.

    python3 scripts/roundtrip_study.py --seeds 1-10 --workers 4
"""

import argparse
import json

import numpy as np

from noveltydecay.roundtrip import RoundTripSpec, run_roundtrip


def seed_range(text):
    lo, _, hi = text.partition("-")
    return list(range(int(lo), int(hi or lo) + 1))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=seed_range, default=seed_range("1-10"))
    ap.add_argument("--stories", type=int, default=2000)
    ap.add_argument("--horizon", type=int, default=1440)
    ap.add_argument("--family", default="gamma", choices=["gamma", "lognormal", "constant"])
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--json", help="write per-seed results here")
    args = ap.parse_args()

    spec = RoundTripSpec(stories=args.stories, horizon=args.horizon, family=args.family)
    results = [run_roundtrip(spec, s, workers=args.workers) for s in args.seeds]
    names = [c.name for c in results[0].checks]
    print(f"{len(results)} seeds, {args.stories} stories, horizon {args.horizon}, {args.family} shocks")
    print(f"{'quantity':<28}{'truth':>10}{'mean':>10}{'min':>10}{'max':>10}  passed")
    for i, name in enumerate(names):
        checks = [r.checks[i] for r in results]
        est = np.array([c.estimate for c in checks])
        truth = "-" if checks[0].truth is None else f"{checks[0].truth:.4g}"
        passed = "-" if checks[0].passed is None else f"{sum(bool(c.passed) for c in checks)}/{len(checks)}"
        print(f"{name:<28}{truth:>10}{est.mean():10.4g}{est.min():10.4g}{est.max():10.4g}  {passed}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump([r.as_dict() for r in results], fh, indent=2)


if __name__ == "__main__":
    main()
