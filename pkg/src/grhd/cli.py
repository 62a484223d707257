"""Command line entry point: ``grhd run | converge | riemann``.

Failures exit with status 1 and a single ``error: <kind>: <message>`` line on stderr.
"""
from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import fields

from .driver import RunConfig, convergence_table, time_loop
from .riemann_euler import lambda_max_euler
from .riemann_rad import mu_max_pair
from .scenarios import SCENARIO_IDS, build_scenario
from .thermo import reduce, state_from_primitive

_RUN_FIELDS = {f.name: f for f in fields(RunConfig)}
_INT_KEYS = {"points", "dump_every", "reference_points", "max_steps"}
_FLOAT_KEYS = {"cfl", "t_final", "eps"}
_BOOL_KEYS = {"self_reference", "check_idp"}


def read_config(path: str) -> dict:
    """Key-value file with a ``[run]`` section; keys are RunConfig field names."""
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh)
    if not cp.has_section("run"):
        raise ValueError(f"{path}: missing [run] section")
    out = {}
    sec = cp["run"]
    for key in sec:
        if key not in _RUN_FIELDS:
            raise ValueError(f"{path}: unknown key {key!r}")
        if key in _INT_KEYS:
            out[key] = sec.getint(key)
        elif key in _FLOAT_KEYS:
            out[key] = sec.getfloat(key)
        elif key in _BOOL_KEYS:
            out[key] = sec.getboolean(key)
        else:
            out[key] = sec.get(key)
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key-value file with a [run] section")
    p.add_argument("--scenario", choices=SCENARIO_IDS)
    p.add_argument("--cfl", type=float)
    p.add_argument("--tfinal", dest="t_final", type=float)
    p.add_argument("--eps", type=float, help="Picard relative tolerance")
    p.add_argument("--out", dest="out_dir")
    p.add_argument("--check-idp", dest="check_idp", action="store_true", default=None)
    p.add_argument("--max-steps", dest="max_steps", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grhd", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario")
    _common(run)
    run.add_argument("--points", type=int)
    run.add_argument("--dump-every", dest="dump_every", type=int)

    conv = sub.add_parser("converge", help="error and rate table over several meshes")
    _common(conv)
    conv.add_argument("--points", type=int, nargs="+", required=True)
    conv.add_argument("--reference", help="reference CSV (x,rho,v,T,Er)")
    conv.add_argument("--self-reference", dest="reference_points", type=int,
                      help="use a run on this many points as the reference")
    conv.add_argument("--successive", action="store_true",
                      help="measure each mesh against the next finer one")
    conv.add_argument("--cache", help="directory for cached reference dumps")

    rp = sub.add_parser("riemann", help="wave-speed bounds for one pair of states")
    rp.add_argument("--left", required=True, help="rho,v,T[,Er]")
    rp.add_argument("--right", required=True, help="rho,v,T[,Er]")
    rp.add_argument("--scenario", choices=SCENARIO_IDS, default="marshak",
                    help="scenario whose constants are used")
    return ap


def _run_config(args, points) -> RunConfig:
    base = read_config(args.config) if args.config else {}
    for key in ("scenario", "cfl", "t_final", "eps", "out_dir", "check_idp", "max_steps",
                "dump_every", "reference"):
        val = getattr(args, key, None)
        if val is not None:
            base[key] = val
    if getattr(args, "reference_points", None):
        base["self_reference"] = True
        base["reference_points"] = args.reference_points
    if points is not None:
        base["points"] = points
    return RunConfig(**base)


def _parse_state(text: str, params):
    vals = [float(s) for s in text.split(",")]
    if len(vals) not in (3, 4):
        raise ValueError(f"state {text!r}: expected rho,v,T[,Er]")
    return state_from_primitive(vals[0], vals[1], vals[2], params,
                                e_rad=vals[3] if len(vals) == 4 else None)


def cmd_run(args) -> int:
    cfg = _run_config(args, args.points)
    res = time_loop(cfg)
    print(f"scenario={cfg.scenario} points={cfg.points} steps={res.steps} t={res.t:.10g} "
          f"max_drift={res.max_drift:.3e}")
    return 0


def cmd_converge(args) -> int:
    cfg = _run_config(args, min(args.points))
    if not (cfg.reference or cfg.self_reference or args.successive):
        raise ValueError("converge needs --reference, --self-reference or --successive")
    rows = convergence_table(cfg, args.points, successive=args.successive,
                             cache_dir=args.cache,
                             log=lambda s: print(f"# {s}", file=sys.stderr, flush=True))
    print("I,error,rate")
    for I, err, rate in rows:
        print(f"{I},{err:.6e},{'' if rate is None else f'{rate:.3f}'}")
    return 0


def cmd_riemann(args) -> int:
    params = build_scenario(args.scenario, 3).params
    UL = _parse_state(args.left, params)
    UR = _parse_state(args.right, params)
    eb = lambda_max_euler(UL, UR, params)
    mu = mu_max_pair(reduce(UL), reduce(UR))
    print(f"lambda_max={eb.lambda_max:.17g} p_star={eb.p_star:.17g} "
          f"waves={eb.wave_types[0]},{eb.wave_types[1]} mu_max={mu:.17g}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": cmd_run, "converge": cmd_converge, "riemann": cmd_riemann}[args.command]
    try:
        return handler(args)
    except Exception as exc:  # surfaced as one parsable line
        msg = str(exc).replace("\n", " ")
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
