"""Command-line entry point.

Subcommands write their results into ``--out DIR``:

* ``chain-map``: ``coeffs.csv`` with ``(k, omega_k, t_k)`` and ``report.json``;
* ``construct`` / ``tebd``: ``report.json`` and ``bonds.csv``;
* ``oracle``, ``min-dim``: ``report.json``;
* ``compare``: ``report.json`` and ``compare.csv``.

Run parameters come from ``--config FILE.json`` and/or flags named after the
:class:`~gaussmpo.bench.ExperimentConfig` fields; flags win.
"""

import argparse
import csv
import itertools
import json
import os
import sys
import typing
from dataclasses import fields, replace

from .bench import ExperimentConfig, compare, run_gaussian, run_oracle, run_tebd
from .chain import SpectralDensity, ohmic_chain_coefficients
from .gaussian import ThermalSpec, beta_from_resc, min_local_dim, normal_mode_decompose
from .models import spin_boson_chain

__all__ = ["main", "build_parser"]


def _field_type(f):
    tp = f.type
    args = [a for a in typing.get_args(tp) if a is not type(None)]
    return args[0] if args else tp


def _bool(text):
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _add_config_flags(p):
    p.add_argument("--config", help="JSON file with ExperimentConfig fields")
    for f in fields(ExperimentConfig):
        tp = _field_type(f)
        kind = _bool if tp is bool else tp
        p.add_argument("--" + f.name.replace("_", "-"), dest=f.name, type=kind, default=None)


def _config_from_args(args, **overrides):
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    for f in fields(ExperimentConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            data[f.name] = v
    data.update(overrides)
    return ExperimentConfig.from_dict(data)


def _write_json(out, name, obj):
    with open(os.path.join(out, name), "w") as fh:
        json.dump(obj, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _cmd_run(args, scheme):
    cfg = _config_from_args(args, scheme=scheme)
    rep = run_gaussian(cfg) if scheme == "gaussian" else run_tebd(cfg)
    _write_json(args.out, "report.json", rep.to_dict())
    rep.bonds.write_csv(os.path.join(args.out, "bonds.csv"))
    print(f"eps_m={rep.eps_m:.3e} eps_gamma_rel={rep.eps_gamma_rel:.3e} fpo_total={rep.fpo_total}")
    return 0 if rep.converged else 1


def _cmd_chain_map(args):
    sd = SpectralDensity("ohmic", omega_c=args.omega_c, cutoff_factor=args.cutoff)
    coeffs = ohmic_chain_coefficients(sd, args.N)
    with open(os.path.join(args.out, "coeffs.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "omega", "t"])
        for k, om, t in coeffs.to_rows():
            w.writerow([k, repr(om), repr(t)])
    _write_json(args.out, "report.json", {
        "N": args.N, "omega_c": args.omega_c, "cutoff": args.cutoff,
        "n_panels": coeffs.n_panels, "omega_0": float(coeffs.omegas[0]), "t_0": float(coeffs.ts[0]),
    })
    return 0


def _cmd_oracle(args):
    cfg = _config_from_args(args)
    _write_json(args.out, "report.json", run_oracle(cfg))
    return 0


def _cmd_min_dim(args):
    H = spin_boson_chain(args.N, args.omega_c, args.cutoff)
    nmd = normal_mode_decompose(H)
    rows = []
    for b in args.beta_resc:
        spec = ThermalSpec(beta_from_resc(nmd, b))
        rows.append({"beta_resc": b, "M": min_local_dim(nmd, spec, args.eps, block=args.block)})
    _write_json(args.out, "report.json", {"N": args.N, "eps": args.eps, "block": args.block, "rows": rows})
    for r in rows:
        print(f"beta_resc={r['beta_resc']:g} M={r['M']}")
    return 0


def _expand(spec):
    """Configs from ``{"configs": [...]}`` or ``{"base": {...}, "sweep": {field: [values]}}``."""
    if "configs" in spec:
        return [ExperimentConfig.from_dict(c) for c in spec["configs"]]
    base = ExperimentConfig.from_dict(spec.get("base", {}))
    sweep = spec.get("sweep", {})
    keys = sorted(sweep)
    return [replace(base, **dict(zip(keys, vals))) for vals in itertools.product(*(sweep[k] for k in keys))]


def _cmd_compare(args):
    with open(args.config) as fh:
        spec = json.load(fh)
    result = compare(_expand(spec), fit_by=args.fit_by)
    _write_json(args.out, "report.json", result)
    with open(os.path.join(args.out, "compare.csv"), "w", newline="") as fh:
        keys = sorted(result["rows"][0]) if result["rows"] else []
        w = csv.DictWriter(fh, fieldnames=keys)
        w.writeheader()
        w.writerows(result["rows"])
    for fit in result["fits"]:
        print(f"alpha={fit['alpha']:.3f}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="gaussmpo", description="Thermal MPOs of quadratic Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("chain-map", help="chain coefficients of an ohmic bath")
    p.add_argument("--N", type=int, default=20)
    p.add_argument("--omega-c", dest="omega_c", type=float, default=1.0)
    p.add_argument("--cutoff", type=float, default=40.0)

    for name, text in (("construct", "Gaussian thermal-state construction"),
                       ("tebd", "imaginary-time TEBD baseline"),
                       ("oracle", "dense thermal state check")):
        p = sub.add_parser(name, help=text)
        _add_config_flags(p)

    p = sub.add_parser("min-dim", help="smallest local dimension per temperature")
    p.add_argument("--N", type=int, default=20)
    p.add_argument("--omega-c", dest="omega_c", type=float, default=1.0)
    p.add_argument("--cutoff", type=float, default=40.0)
    p.add_argument("--beta-resc", dest="beta_resc", type=float, nargs="+", default=[0.5, 1.0, 2.0, 3.0, 4.0])
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--block", choices=("number", "full"), default="number")

    p = sub.add_parser("compare", help="run a sweep and fit fpo power laws")
    p.add_argument("--config", required=True, help='JSON with "configs" or "base" + "sweep"')
    p.add_argument("--fit-by", dest="fit_by", default="N")

    for p in sub.choices.values():
        p.add_argument("--out", default=".", help="output directory")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    os.makedirs(args.out, exist_ok=True)
    handlers = {
        "chain-map": _cmd_chain_map,
        "construct": lambda a: _cmd_run(a, "gaussian"),
        "tebd": lambda a: _cmd_run(a, "tebd"),
        "oracle": _cmd_oracle,
        "min-dim": _cmd_min_dim,
        "compare": _cmd_compare,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
