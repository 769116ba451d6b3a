"""Command-line front end: ``exactswap {spectrum,scan,sweep,search,oracle}``.

CSV goes to ``--out`` (or stdout).  When ``--out`` is given a
``<out>.manifest.json`` sidecar records the command, parameters and version.
Exit codes: 0 ok, 1 oracle check failed, 2 bad input, 3 numerical contract
violated.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .analysis import (
    DEFAULT_TAU,
    ScanConfig,
    default_targets,
    exact_transfer_search,
    scan_tau,
    sweep_chain_sizes,
    tau_grid,
)
from .errors import NumericalContractError, ValidationError
from .exchange import parse_exchange
from .linalg import jacobi_eigh
from .oracle import demo_gates, sector_equivalence_check
from .sector import ZERO, ModelParams, SectorBasis, one_magnon_hamiltonian, spectrum

FLOAT_FMT = "%.12g"


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return FLOAT_FMT % v
    return str(v)


def parse_grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"grid {text!r} must look like start:end:step")
    try:
        start, end, step = (float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"grid {text!r} has a non-numeric field") from None
    tau_grid(start, end, step)
    return start, end, step


def parse_int_list(text: str) -> List[int]:
    """``7,9,11`` or ``5:73:4`` (inclusive)."""
    try:
        if ":" in text:
            a, b, s = (int(p) for p in text.split(":"))
            if s <= 0 or b < a:
                raise ValidationError(f"bad range {text!r}")
            return list(range(a, b + 1, s))
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ValidationError(f"bad integer list {text!r}") from None


def parse_float_list(text: str) -> List[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ValidationError(f"bad number list {text!r}") from None


def parse_fidelity(text: str) -> tuple[float, float]:
    """``a,b`` rescaled to a^2 + b^2 = 1 (input may be rounded to ~5 digits)."""
    vals = parse_float_list(text)
    if len(vals) != 2:
        raise ValidationError(f"--fidelity expects a,b, got {text!r}")
    a, b = vals
    if a < 0 or b < 0:
        raise ValidationError("fidelity amplitudes must be non-negative")
    norm = math.hypot(a, b)
    if abs(norm - 1.0) > 1e-3:
        raise ValidationError(f"a^2 + b^2 = {norm * norm:.6g}, expected 1")
    return a / norm, b / norm


def _arg(fn):
    """Adapt a parser so argparse shows its message on failure."""

    def wrapped(text):
        try:
            return fn(text)
        except ValidationError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None

    wrapped.__name__ = fn.__name__
    return wrapped


def _params(args) -> ModelParams:
    if args.model == "xy" and (args.delta != 0 or args.h != 0):
        raise ValidationError("--delta and --h only apply to --model xxz")
    return ModelParams(args.model.upper(), args.J, args.delta, args.h)


def _initial(text: str):
    if text.lower() == ZERO:
        return ZERO
    try:
        return int(text)
    except ValueError:
        raise ValidationError(f"--initial must be a site number or 'zero', got {text!r}") from None


def _targets(text: str, exchange):
    if text == "auto":
        return default_targets(exchange)
    if text == "none":
        return None
    return tuple(parse_int_list(text))


def _config(args, N: int) -> ScanConfig:
    exchange = parse_exchange(args.exchange, N, raw=args.raw, degenerate=args.degenerate)
    start, end, step = args.tau
    initial = _initial(args.initial)
    include_zero = args.include_zero or initial == ZERO
    return ScanConfig(
        exchange=exchange,
        initial=initial,
        tau_start=start,
        tau_end=end,
        tau_step=step,
        include_zero=include_zero,
        target_sites=_targets(args.targets, exchange),
        params=_params(args),
        fidelity=args.fidelity,
        method=args.backend,
    )


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(args, text: str, params: dict) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    manifest = {
        "command": args.command,
        "parameters": params,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "seed": "none: no randomness in any computation path",
    }
    with open(args.out + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _public(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}


def cmd_spectrum(args) -> int:
    params = _params(args)
    basis = SectorBasis(args.n)
    spec = spectrum(basis, params)
    if args.verify:
        H = one_magnon_hamiltonian(basis, params)
        w, _, _ = jacobi_eigh(H)
        dev = float(np.max(np.abs(np.sort(spec.energies) - w)))
        if dev > 1e-10:
            raise NumericalContractError(f"analytic energies differ from Jacobi eigenvalues by {dev:.3e}")
        print(f"verify: max |E_analytic - E_jacobi| = {dev:.3e}", file=sys.stderr)
    rows = [(m, float(e)) for m, e in enumerate(spec.energies, start=1)]
    _emit(args, _csv(["m", "E"], rows), _public(args))
    return 0


def cmd_scan(args) -> int:
    config = _config(args, args.n)
    res = scan_tau(config, keep_clusters=args.clusters_json is not None)
    header = ["tau", "best_phase", "best_p", "cluster_dim", "label"]
    if config.fidelity is not None:
        header.append("fidelity")
    rows = [[rec.row()[h] for h in header] for rec in res.records]
    if args.clusters_json:
        dump = [
            {"tau": rec.tau, "clusters": [{"phase": ph, "p": p} for ph, p in rec.all_clusters]}
            for rec in res.records
        ]
        with open(args.clusters_json, "w", encoding="utf-8") as fh:
            json.dump(dump, fh, indent=1)
            fh.write("\n")
    _emit(args, _csv(header, rows), _public(args))
    best = res.best
    print(f"peak: tau={best.tau:g} p={best.best_p:.6f} phase={best.best_phase:.6f} ({best.label})", file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    Ns = parse_int_list(args.ns)
    if not Ns:
        raise ValidationError("--ns is empty")
    template = _config(args, Ns[0])
    auto = args.targets == "auto"
    records = sweep_chain_sizes(template, Ns, skip_static=not args.include_static, auto_targets=auto)
    header = ["N", "p_peak", "tau_at_peak"]
    with_fid = template.fidelity is not None
    if with_fid:
        header.append("fidelity_peak")
    rows = []
    for r in records:
        row = [r.N, r.p_peak, r.tau_at_peak]
        if with_fid:
            row.append(r.fidelity_peak)
        rows.append(row)
    _emit(args, _csv(header, rows), _public(args))
    return 0


def cmd_search(args) -> int:
    config = _config(args, args.n)
    cert = exact_transfer_search(config, threshold=args.threshold)
    out = {
        "found": cert.found,
        "tau": cert.tau,
        "p": cert.p,
        "threshold": cert.threshold,
        "grid_step": cert.grid_step,
        "tau_range": list(cert.tau_range),
        "product_eigenvectors": [vars(pv) for pv in cert.product_eigenvectors],
        "caveat": cert.caveat,
    }
    _emit(args, json.dumps(out, indent=2) + "\n", _public(args))
    return 0


def cmd_oracle(args) -> int:
    lines = []
    ok = True
    if args.ns:
        Ns = parse_int_list(args.ns)
        taus = parse_float_list(args.taus)
        models = [ModelParams("XY"), ModelParams("XXZ", args.J, args.delta, args.h)]
        lines.append("N,model,max_deviation,max_leakage,status")
        for N in Ns:
            SectorBasis(N)
            for params in models:
                rep = sector_equivalence_check(N, params, taus)
                status = "PASS" if rep.passed(args.tol) else "FAIL"
                ok &= status == "PASS"
                label = params.model if params.model == "XY" else f"XXZ(Delta={params.Delta:g};h={params.h:g})"
                lines.append(f"{N},{label},{rep.max_deviation:.3e},{rep.max_leakage:.3e},{status}")
        lines.append(f"overall: {'PASS' if ok else 'FAIL'}")
    if args.demo_gates:
        for demo in demo_gates():
            lines.extend(demo.lines())
    _emit(args, "\n".join(lines) + "\n", _public(args))
    return 0 if ok else 1


def _add_model(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=["xy", "xxz"], default="xy")
    p.add_argument("--J", type=float, default=1.0, help="coupling (default 1)")
    p.add_argument("--delta", type=float, default=0.0, help="XXZ anisotropy")
    p.add_argument("--h", type=float, default=0.0, help="XXZ field")


def _add_scan_opts(p: argparse.ArgumentParser, with_n: bool = True) -> None:
    p.add_argument("--exchange", required=True, help="p1, p3, pall, pe, pe-prime, pes or pairs:a-b,c-d")
    if with_n:
        p.add_argument("--n", type=int, required=True)
    p.add_argument("--tau", type=_arg(parse_grid), default=DEFAULT_TAU, help="start:end:step, inclusive (default 0:50:0.01)")
    p.add_argument("--initial", default="1", help="initial site, or 'zero' (default 1)")
    p.add_argument("--include-zero", action="store_true", help="add the zero-magnon state to the basis")
    p.add_argument("--targets", default="auto", help="'auto' (sender sites for multi-site exchanges), 'none', or a site list")
    p.add_argument("--fidelity", type=_arg(parse_fidelity), default=None, metavar="A,B")
    p.add_argument("--raw", action="store_true", help="use entangling operators as written (not unitary)")
    p.add_argument("--degenerate", action="store_true", help="allow pe-prime at N=3")
    p.add_argument("--backend", choices=["lapack", "jacobi"], default="lapack")
    _add_model(p)
    p.add_argument("--out", default=None, help="output file (default stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exactswap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="one-magnon energies E_m")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--verify", action="store_true", help="cross-check against Jacobi eigenvalues")
    _add_model(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("scan", help="best swap probability at each tau")
    _add_scan_opts(p)
    p.add_argument("--clusters-json", default=None, metavar="PATH", help="dump every (phase, p) cluster per tau")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("sweep", help="peak probability for each chain size")
    _add_scan_opts(p, with_n=False)
    p.add_argument("--ns", required=True, help="chain sizes: 7,9,11 or 5:73:4")
    p.add_argument("--include-static", action="store_true", help="let tau=0 compete for the peak")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("search", help="look for exact transfer on a tau grid")
    _add_scan_opts(p)
    p.add_argument("--threshold", type=float, default=0.999)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("oracle", help="compare the sector path with full 2^N evolution")
    p.add_argument("--ns", default=None, help="chain sizes, e.g. 3,5,7 (max 12)")
    p.add_argument("--taus", default="0.1,1,10")
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.5, help="anisotropy for the XXZ check")
    p.add_argument("--h", type=float, default=0.2, help="field for the XXZ check")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--demo-gates", action="store_true", help="print the register gate transcripts")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # usage errors exit with status 2
    if args.command == "oracle" and not args.ns and not args.demo_gates:
        parser.error("oracle needs --ns and/or --demo-gates")
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalContractError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
