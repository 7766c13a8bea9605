"""Command-line entry point: reproducible CSV/JSON reports for the sum,
ansatz, nodal, kernel and energy modules, plus the verification suite."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import acceptance
from .crown import build_crown, q_mid_lower, u_star_profile
from .energy import default_config, minimize_psi
from .errors import DomainError
from .geometry import Point3, SectorConfig
from .kernels import gamma_bb, h0e_bb
from .nodal import nodal_mesh
from .trigsums import SumSpec, csc_asym, s_asym, sum_direct

_FMT = "{:.17g}"


def _fmt(v) -> str:
    if isinstance(v, float):
        return _FMT.format(v)
    return str(v)


def _emit(rows: List[Dict[str, object]], fmt: str, out: Optional[str]) -> None:
    if fmt == "json":
        payload = [
            {k: (float(_FMT.format(v)) if isinstance(v, float) else v)
             for k, v in row.items()}
            for row in rows
        ]
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    else:
        if not rows:
            text = ""
        else:
            header = list(rows[0].keys())
            lines = [",".join(header)]
            lines += [",".join(_fmt(row[k]) for k in header) for row in rows]
            text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("NECKLACE_THREADS", "1")))
    except ValueError:
        return 1


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser,
                  defaults: Dict[str, object]) -> None:
    """Merge a key=value config file under the flags (flags win)."""
    if not getattr(args, "config", None):
        pass
    else:
        known = set(vars(args))
        with open(args.config) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    parser.error(f"malformed config line: {line!r}")
                key, _, raw = line.partition("=")
                key = key.strip()
                if key not in known:
                    parser.error(f"unknown config key: {key!r}")
                if getattr(args, key) is None:
                    current_default = defaults.get(key)
                    caster = type(current_default) if current_default is not None else str
                    try:
                        value = caster(raw.strip()) if caster is not bool else (
                            raw.strip().lower() in ("1", "true", "yes"))
                    except ValueError:
                        parser.error(f"bad value for {key!r}: {raw.strip()!r}")
                    setattr(args, key, value)
    for key, val in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="key=value file merged under the flags")
    sp.add_argument("--out", help="output path (default stdout)")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="necklace",
        description="ring-of-bubbles numerics: sums, kernels, nodal sets, "
                    "reduced energy",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sums", help="trigonometric sums and their asymptotics")
    p.add_argument("--variant", choices=("odd", "even", "even_hat", "alt", "alt_hat"))
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--x", type=float)
    _add_common(p)

    p = sub.add_parser("ansatz", help="ring parameters and midpoint report")
    p.add_argument("--m", type=int)
    _add_common(p)

    p = sub.add_parser("nodal", help="zero-set point cloud of the ring profile")
    p.add_argument("--m", type=int)
    p.add_argument("--bbox", type=float)
    p.add_argument("--res", type=int)
    _add_common(p)

    p = sub.add_parser("kernels", help="diagonal kernel reports")
    p.add_argument("--K", type=int)
    p.add_argument("--b-abs", dest="b_abs", type=float)
    p.add_argument("--alpha-b", dest="alpha_b", type=float)
    _add_common(p)

    p = sub.add_parser("energy", help="reduced-energy minimization")
    p.add_argument("--K", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--mode", choices=("leading", "full"))
    _add_common(p)

    p = sub.add_parser("verify", help="run the acceptance checks")
    p.add_argument("--quick", action="store_true")
    _add_common(p)
    return parser


def _cmd_sums(args) -> int:
    spec = SumSpec(args.variant, args.k, args.n, args.x)
    direct = sum_direct(spec)
    asym = math.nan
    if args.x == 0.0:
        try:
            asym = csc_asym(args.variant, args.k, args.n)
        except DomainError:
            asym = math.nan
    elif args.variant == "alt":
        asym = s_asym(args.k, args.n, args.x)
    rel = abs(asym / direct - 1.0) if (direct != 0.0 and not math.isnan(asym)) else math.nan
    _emit([{
        "variant": args.variant, "k": args.k, "n": args.n, "x": args.x,
        "direct": direct, "asymptotic": asym, "rel_err": rel,
    }], args.format, args.out)
    return 0


def _cmd_ansatz(args) -> int:
    params = build_crown(args.m)
    rep = q_mid_lower(params)
    _emit([{
        "m": params.m, "mu": params.mu, "d": params.d,
        "ring_radius": params.ring_radius,
        "mid_value": rep.value, "mid_lower_bound": rep.lower_bound,
    }], args.format, args.out)
    return 0


def _cmd_nodal(args) -> int:
    params = build_crown(args.m)
    profile = u_star_profile(params)
    mesh = nodal_mesh(params, profile, args.bbox, args.res)
    rows = [
        {
            "z1": float(pt[0]), "z2": float(pt[1]), "z3": float(pt[2]),
            "value": float(val), "grad_norm": float(g),
        }
        for pt, val, g in zip(mesh.points, mesh.values, mesh.gradients)
    ]
    _emit(rows, args.format, args.out)
    return 0


def _cmd_kernels(args) -> int:
    cfg = SectorConfig(args.K)
    b = Point3(args.b_abs * math.cos(args.alpha_b),
               args.b_abs * math.sin(args.alpha_b), 0.0)
    rows = []
    for name, fn in (("gamma_bb", gamma_bb), ("h0e_bb", h0e_bb)):
        rep = fn(b, cfg)
        rows.append({
            "kernel": name, "K": args.K, "b_abs": args.b_abs,
            "alpha_b": args.alpha_b, "direct": rep.direct,
            "closed_form": rep.closed_form, "asymptotic": rep.asymptotic,
            "abs_err_dc": rep.abs_err_dc, "abs_err_ca": rep.abs_err_ca,
        })
    _emit(rows, args.format, args.out)
    return 0


def _cmd_energy(args) -> int:
    cfg = default_config(args.K, lam=args.lam, delta=args.delta)
    argmin, diag = minimize_psi(cfg, mode=args.mode)
    _emit([{
        "K": args.K, "lam": args.lam, "delta": args.delta, "mode": args.mode,
        "eps": argmin.eps, "a": argmin.a, "d": argmin.d,
        "alpha_b": argmin.alpha_b, "alpha_w": argmin.alpha_w,
        "value": float(diag["value"]), "eps_ratio": float(diag["eps_ratio"]),
        "d_scaling": float(diag["d_scaling"]),
        "on_boundary": ";".join(diag["on_boundary"]),
    }], args.format, args.out)
    return 0


def _cmd_verify(args) -> int:
    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: c(args.quick), acceptance.CRITERIA))
    else:
        results = acceptance.run_all(quick=args.quick)
    rows = [
        {"criterion": i + 1, "name": r.name,
         "status": "pass" if r.passed else "FAIL",
         "elapsed_s": r.elapsed}
        for i, r in enumerate(results)
    ]
    _emit(rows, args.format, args.out)
    if args.out:
        for row in rows:
            sys.stdout.write(f"{row['criterion']:>2} {row['name']:<28} {row['status']}\n")
    return 0 if all(r.passed for r in results) else 1


_DEFAULTS = {
    "sums": {"variant": "alt_hat", "k": 1, "n": 64, "x": 0.0},
    "ansatz": {"m": 16},
    "nodal": {"m": 16, "bbox": 2.5, "res": 96},
    "kernels": {"K": 64, "b_abs": 0.9, "alpha_b": 0.0},
    "energy": {"K": 64, "lam": 1.0, "delta": 0.1, "mode": "leading"},
    "verify": {},
}

_HANDLERS = {
    "sums": _cmd_sums,
    "ansatz": _cmd_ansatz,
    "nodal": _cmd_nodal,
    "kernels": _cmd_kernels,
    "energy": _cmd_energy,
    "verify": _cmd_verify,
}


def run(argv: Sequence[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
        _apply_config(args, parser, _DEFAULTS.get(args.command, {}))
    except SystemExit as exc:
        return 2 if exc.code not in (0,) else 0
    np.random.seed(args.seed % 2**32)
    try:
        return _HANDLERS[args.command](args)
    except DomainError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
