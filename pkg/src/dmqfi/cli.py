"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .numerics import eigh
from .qfi import EstimationSetup, UnboundedUncertainty, cramer_rao, qfi
from .spin_model import ModelParams, analytic_spectrum, build_hamiltonian
from .sweeps import PRESET_NAMES, SIGNS, Axis, SweepError, SweepSpec, preset, run_sweep
from .thermal import closed_form_factors, closed_form_state, gibbs_state

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

MODEL_DEFAULTS = {"J": -1.0, "B": 0.0, "b": 0.0, "D": 0.0, "T": 0.7, "N": 2}


class UsageError(Exception):
    pass


def _g(x: float) -> str:
    return format(float(x), ".17g")


def _complex_str(z: complex, digits: int = 10) -> str:
    re, im = float(np.real(z)) + 0.0, float(np.imag(z)) + 0.0
    if im == 0.0:
        return f"{re:.{digits}g}"
    return f"{re:.{digits}g}{im:+.{digits}g}i"


def _matrix_lines(m: np.ndarray) -> list[str]:
    cells = [[_complex_str(z) for z in row] for row in m]
    width = max(len(c) for row in cells for c in row)
    return ["  " + "  ".join(c.rjust(width) for c in row) for row in cells]


def _params(args) -> ModelParams:
    values = {k: getattr(args, k) if getattr(args, k) is not None else v for k, v in MODEL_DEFAULTS.items()}
    try:
        return ModelParams(**values)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _require_positive_t(p: ModelParams) -> None:
    if not p.T > 0:
        raise UsageError(f"temperature must be positive, got T={p.T!r}")


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _csv(header: list[str], rows: list[list]) -> str:
    def cell(x):
        if isinstance(x, bool):
            return "true" if x else "false"
        if isinstance(x, (float, int, np.floating)):
            return _g(x)
        return str(x)

    return "\n".join([",".join(header)] + [",".join(cell(x) for x in r) for r in rows]) + "\n"


def _cvec(v) -> list:
    return [[float(np.real(z)), float(np.imag(z))] for z in v]


def cmd_spectrum(args) -> int:
    p = _params(args)
    fmt = args.format or "text"
    if p.N == 2:
        an = analytic_spectrum(p)
        energies, vectors = an.energies, an.vectors
        extra = {"gamma": an.gamma, "N1": an.norm1, "N2": an.norm2, "degenerate_branch": p.J == 0.0}
    else:
        es = eigh(build_hamiltonian(p))
        energies, vectors = es.values, es.vectors
        extra = {}

    if fmt == "json":
        payload = {
            "params": p.as_dict(),
            **extra,
            "energies": [float(e) for e in energies],
            "vectors": [_cvec(vectors[:, k]) for k in range(len(energies))],
        }
        _emit(args, json.dumps(payload, indent=2) + "\n")
    elif fmt == "csv":
        rows = [[float(e)] + [_complex_str(z, 17) for z in vectors[:, k]] for k, e in enumerate(energies)]
        header = ["energy"] + [f"v{i}" for i in range(vectors.shape[0])]
        _emit(args, _csv(header, rows))
    else:
        lines = [f"params: {p.as_dict()}"]
        if extra:
            lines.append(f"gamma = {an.gamma:.10g}")
            if extra["degenerate_branch"]:
                lines.append("J = 0: middle block is diagonal, energies +/-b on |01>, |10>")
            else:
                lines.append(f"N1 = {an.norm1:.10g}")
                lines.append(f"N2 = {an.norm2:.10g}")
        lines.append("energy / eigenvector (basis |00>, |01>, |10>, ...):")
        for k, e in enumerate(energies):
            vec = ", ".join(_complex_str(z) for z in vectors[:, k])
            lines.append(f"  {e + 0.0:+.10g}  ({vec})")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_state(args) -> int:
    p = _params(args)
    _require_positive_t(p)
    fmt = args.format or "text"
    numeric = gibbs_state(build_hamiltonian(p), p.T).matrix
    closed = closed_form_state(p).matrix if p.N == 2 else None
    diff = float(np.max(np.abs(closed - numeric))) if closed is not None else None

    if fmt == "json":
        payload = {
            "params": p.as_dict(),
            "numeric": [_cvec(row) for row in numeric],
            "closed_form": None if closed is None else [_cvec(row) for row in closed],
            "max_abs_difference": diff,
        }
        if closed is not None:
            f = closed_form_factors(p)
            payload.update(gamma_c=f.gamma_c, gamma_s=f.gamma_s, Z=f.Z)
        _emit(args, json.dumps(payload, indent=2) + "\n")
    elif fmt == "csv":
        rows = []
        for name, m in (("closed_form", closed), ("numeric", numeric)):
            if m is None:
                continue
            for i, row in enumerate(m):
                for j, z in enumerate(row):
                    rows.append([name, i, j, float(z.real), float(z.imag)])
        _emit(args, _csv(["source", "row", "col", "re", "im"], rows))
    else:
        lines = [f"params: {p.as_dict()}"]
        if closed is not None:
            f = closed_form_factors(p)
            lines.append(f"gamma = {f.gamma:.10g}, gamma_c = {f.gamma_c:.10g}, gamma_s = {f.gamma_s:.10g}")
            lines.append("closed form:")
            lines += _matrix_lines(closed)
        lines.append("numeric exp(-H/T)/Z:")
        lines += _matrix_lines(numeric)
        if diff is not None:
            lines.append(f"max |closed - numeric| = {diff:.3e}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_qfi(args) -> int:
    p = _params(args)
    if not args.zero_temperature:
        _require_positive_t(p)
    fmt = args.format or "text"
    r = qfi(p, zero_temperature=args.zero_temperature)
    try:
        bound = cramer_rao(EstimationSetup.from_result(r, 1))
    except UnboundedUncertainty:
        bound = None

    if fmt == "json":
        payload = {
            "params": p.as_dict(),
            "zero_temperature": bool(args.zero_temperature),
            "c": r.c.tolist(),
            "c_max": r.c_max,
            "qfi": r.qfi_per_particle,
            "n_opt": r.n_opt.tolist(),
            "useful": r.useful,
            "delta_phi_qcb": bound,
        }
        _emit(args, json.dumps(payload, indent=2) + "\n")
    elif fmt == "csv":
        header = ["J", "B", "b", "D", "T", "N", "qfi", "c_max", "n_x", "n_y", "n_z", "useful", "delta_phi_qcb"]
        row = [p.J, p.B, p.b, p.D, p.T, p.N, r.qfi_per_particle, r.c_max, *r.n_opt, r.useful,
               "inf" if bound is None else bound]
        _emit(args, _csv(header, [row]))
    else:
        lines = [f"params: {p.as_dict()}" + (" (T -> 0 limit)" if args.zero_temperature else "")]
        lines.append("C matrix (x, y, z):")
        lines += ["  " + "  ".join(f"{x:+.10e}" for x in row) for row in r.c]
        lines.append(f"c_max  = {r.c_max:.10g}")
        lines.append(f"QFI    = {r.qfi_per_particle:.10g}")
        lines.append(f"n_opt  = ({', '.join(f'{x:.10g}' for x in r.n_opt)})")
        lines.append(f"useful = {'true' if r.useful else 'false'}")
        lines.append(f"dphi_QCB (N_m = 1) = {'unbounded' if bound is None else f'{bound:.10g}'}")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _override_axis(axis: Axis, name, lo, hi, count) -> Axis:
    return Axis(
        name or axis.name,
        axis.min if lo is None else lo,
        axis.max if hi is None else hi,
        axis.count if count is None else count,
    )


def _sweep_spec(args) -> SweepSpec:
    try:
        if args.preset:
            spec = preset(args.preset, args.sign)
            given = {k: getattr(args, k) for k in MODEL_DEFAULTS if getattr(args, k) is not None}
            fixed = spec.fixed.replace(**given) if given else spec.fixed
            label = spec.label
            axis1, axis2 = spec.axis1, spec.axis2
        else:
            if not args.axis1 or not args.axis2:
                raise UsageError("a custom sweep needs --axis1 and --axis2 (or use --preset)")
            fixed = _params(args)
            if args.sign and args.J is None:
                fixed = fixed.replace(J=SIGNS[args.sign])
            axis1 = Axis(args.axis1, 0.05 if args.axis1 == "T" else 0.0, 3.0)
            axis2 = Axis(args.axis2, 0.05 if args.axis2 == "T" else 0.0, 3.0)
            label = "custom"
        axis1 = _override_axis(axis1, args.axis1 if args.preset else None, args.min1, args.max1, args.count1)
        axis2 = _override_axis(axis2, args.axis2 if args.preset else None, args.min2, args.max2, args.count2)
        if axis1.name != "T" and axis2.name != "T" and not fixed.T > 0:
            raise UsageError(f"temperature must be positive, got T={fixed.T!r}")
        return SweepSpec(axis1, axis2, fixed, label)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_sweep(args) -> int:
    spec = _sweep_spec(args)
    if args.workers is not None and args.workers < 1:
        raise UsageError("--workers must be >= 1")
    try:
        table = run_sweep(spec, workers=args.workers)
    except SweepError as exc:
        raise UsageError(str(exc)) from exc
    fmt = args.format or "csv"
    if fmt == "text":
        raise UsageError("sweep output format must be csv or json")
    _emit(args, table.to_json() if fmt == "json" else table.to_csv())
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import run_suite

    def show(r):
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<28} {r.detail}  [{r.seconds:.2f}s]", flush=True)

    results = run_suite(quick=args.quick, inject_fault=args.inject_fault, progress=show)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def _model_flags(parser: argparse.ArgumentParser) -> None:
    g = parser.add_argument_group("model parameters")
    g.add_argument("--J", type=float, help="exchange coupling (default -1, ferromagnetic)")
    g.add_argument("--B", type=float, help="homogeneous field (default 0)")
    g.add_argument("--b", type=float, help="inhomogeneous field (default 0)")
    g.add_argument("--D", type=float, help="DM interaction strength (default 0)")
    g.add_argument("--T", type=float, help="temperature, k = 1 (default 0.7)")
    g.add_argument("--N", type=int, help="number of spins (default 2)")


def _output_flags(parser: argparse.ArgumentParser, formats) -> None:
    parser.add_argument("--format", choices=formats)
    parser.add_argument("--out", help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dmqfi",
        description="QFI of thermal XX spin chains with DM interaction and magnetic fields.",
        allow_abbrev=False,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="energies and eigenvectors", allow_abbrev=False)
    _model_flags(p)
    _output_flags(p, ("text", "csv", "json"))
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("state", help="closed-form and numeric thermal density matrix", allow_abbrev=False)
    _model_flags(p)
    _output_flags(p, ("text", "csv", "json"))
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("qfi", help="C matrix, per-particle QFI and Cramer-Rao bound", allow_abbrev=False)
    _model_flags(p)
    _output_flags(p, ("text", "csv", "json"))
    p.add_argument("--zero-temperature", action="store_true", help="use the T -> 0 ground-state mixture")
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("sweep", help="QFI over a 2-D parameter grid", allow_abbrev=False)
    _model_flags(p)
    _output_flags(p, ("csv", "json"))
    p.add_argument("--preset", choices=PRESET_NAMES)
    p.add_argument("--sign", choices=tuple(SIGNS), default=None, help="ferro (J=-1) or antiferro (J=+1)")
    for k in ("1", "2"):
        p.add_argument(f"--axis{k}", choices=("T", "B", "b", "D", "J"))
        p.add_argument(f"--min{k}", type=float)
        p.add_argument(f"--max{k}", type=float)
        p.add_argument(f"--count{k}", type=int)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: all CPUs)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the invariant suite", allow_abbrev=False)
    p.add_argument("--quick", action="store_true", help="reduced draw counts")
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "preset", None) and args.sign is None:
        args.sign = "ferro"
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"dmqfi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"dmqfi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
