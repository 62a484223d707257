"""Marshak wave error table against a 20001-point self-reference (cached)."""
import argparse
import time

from grhd.driver import RunConfig, convergence_table

POINTS = [65, 129, 257, 513, 1025, 2049]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reference-points", type=int, default=20001)
    ap.add_argument("--cache", default=".cache")
    ap.add_argument("--points", type=int, nargs="+", default=POINTS)
    args = ap.parse_args()
    t0 = time.time()
    cfg = RunConfig(scenario="marshak", points=min(args.points), self_reference=True,
                    reference_points=args.reference_points)
    log = lambda s: print(f"# {s} ({time.time() - t0:.0f}s)", flush=True)
    rows = convergence_table(cfg, args.points, cache_dir=args.cache, log=log)
    print("I,error,rate")
    for I, err, rate in rows:
        print(f"{I},{err:.3e},{'' if rate is None else f'{rate:.2f}'}")


if __name__ == "__main__":
    main()
