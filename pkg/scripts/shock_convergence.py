"""Radiative shock error tables.

With --reference the errors are measured against that CSV (x,rho,v,T,Er);
otherwise against a fine self-reference run (cached), or with --successive
each mesh is compared with the next finer one.
"""
import argparse
import time

from grhd.driver import RunConfig, convergence_table
from grhd.scenarios import SCENARIO_IDS


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("scenario", choices=[s for s in SCENARIO_IDS if s.startswith("shock")])
    ap.add_argument("--points", type=int, nargs="+", default=[101, 201, 401, 801])
    ap.add_argument("--reference")
    ap.add_argument("--reference-points", type=int, default=3201)
    ap.add_argument("--successive", action="store_true")
    ap.add_argument("--cache", default=".cache")
    args = ap.parse_args()
    t0 = time.time()
    self_ref = args.reference is None and not args.successive
    cfg = RunConfig(scenario=args.scenario, points=min(args.points), reference=args.reference,
                    self_reference=self_ref, reference_points=args.reference_points)
    log = lambda s: print(f"# {s} ({time.time() - t0:.0f}s)", flush=True)
    rows = convergence_table(cfg, args.points, successive=args.successive,
                             cache_dir=args.cache, log=log)
    print("I,error,rate")
    for I, err, rate in rows:
        print(f"{I},{err:.3e},{'' if rate is None else f'{rate:.2f}'}")


if __name__ == "__main__":
    main()
