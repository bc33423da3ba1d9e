"""Half-life and total area of exp(-a t^b) over a parameter grid.

    python3 scripts/halflife_table.py --a 0.1 0.4 1 --b 0.3 0.4 0.5 1
"""

import argparse

from noveltydecay.relaxation import half_life, kww_partial_integral, kww_tail_cutoff, kww_total_integral


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, nargs="+", default=[0.1, 0.4, 1.0, 2.0])
    ap.add_argument("--b", type=float, nargs="+", default=[0.3, 0.4, 0.5, 1.0])
    args = ap.parse_args()
    print(f"{'a':>6} {'b':>6} {'tau (min)':>14} {'area (Gamma)':>14} {'area (quad)':>14} {'rel diff':>9}")
    for a in args.a:
        for b in args.b:
            total = kww_total_integral(a, b)
            quad = kww_partial_integral(a, b, kww_tail_cutoff(a, b))
            print(f"{a:6.3g} {b:6.3g} {half_life(a, b):14.6f} {total:14.6f} {quad:14.6f} "
                  f"{abs(quad / total - 1):9.1e}")


if __name__ == "__main__":
    main()
