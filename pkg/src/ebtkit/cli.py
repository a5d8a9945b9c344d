"""Command-line interface.

Exit codes: 0 success, 2 malformed input, 3 invalid channel or unsupported
request for this channel, 4 internal tolerance failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .basis import ebt_diag_necessary, gell_mann_basis, transfer_matrix
from .builtins import BUILTINS, UnknownBuiltin, make_builtin
from .channels import HolevoChannel, choi_of, kraus_from_choi, to_kraus
from .ebt import DEFAULT_TOL, Status, classify
from .errors import EbtError, MergeStall, PreconditionRankMismatch
from .extremality import classify_structure, cpt_extremality, ebt_extremality_hints
from .io import ChannelSpec, SpecParseError, dump_spec, encode_matrix, load_spec, load_state, spec_from_channel
from .linalg import numerical_rank, trace_distance
from .states import DensityMatrix

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_TOLERANCE = 0, 2, 3, 4


class CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(path: str | None, builtin: str | None) -> ChannelSpec:
    if builtin is not None:
        try:
            ch = make_builtin(builtin)
        except UnknownBuiltin as exc:
            raise CliFailure(EXIT_PARSE, str(exc)) from exc
        name, *params = builtin.split(":")
        data = {"name": name}
        if params:
            data["params"] = params
        return ChannelSpec("builtin", data, ch)
    if path is None:
        raise CliFailure(EXIT_PARSE, "give a spec file or --builtin NAME")
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliFailure(EXIT_PARSE, f"{path}: {exc.strerror}") from exc
    return load_spec(text)


def _summary(spec: ChannelSpec) -> dict:
    ch = spec.channel
    return {
        "source_type": spec.type,
        "representation": type(ch).__name__,
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "trace_preserving": bool(ch.trace_preserving),
        "structural_class": classify_structure(ch),
    }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


# --- classify --------------------------------------------------------------------

def classify_report(spec: ChannelSpec, tol: float) -> dict:
    ch = spec.channel
    if not ch.is_square:
        raise CliFailure(EXIT_INVALID, "classification needs a square channel")
    if not ch.trace_preserving:
        raise CliFailure(EXIT_INVALID, "channel is not trace-preserving")
    t0 = time.perf_counter()
    verdict = classify(ch, tol)
    elapsed = time.perf_counter() - t0
    evidence = dict(verdict.evidence)
    if ch.dim_in == 2:
        ok, value = ebt_diag_necessary(transfer_matrix(ch, gell_mann_basis(2)))
        evidence["diag_sum"] = value
        evidence["diag_sum_ok"] = ok
    if "choi_rank" not in evidence:
        evidence["choi_rank"] = numerical_rank(choi_of(ch).mat, tol)
    certificate = None
    if verdict.certificate is not None:
        certificate = spec_from_channel(verdict.certificate).to_dict()
    return {
        "channel": _summary(spec),
        "verdicts": {"ebt": verdict.status.value, "criterion": verdict.criterion},
        "evidence": _jsonable(evidence),
        "certificate": certificate,
        "timings": {"classify_seconds": elapsed},
    }


def _classify_text(name: str, rep: dict) -> str:
    ev = rep["evidence"]
    lines = [f"{name}: {rep['verdicts']['ebt']}  [{rep['verdicts']['criterion']}]"]
    lines.append(
        f"  d_in={rep['channel']['dim_in']} d_out={rep['channel']['dim_out']} class={rep['channel']['structural_class']}"
        f" choi_rank={ev.get('choi_rank')}"
    )
    for key in ("min_pt_eigenvalue", "max_eigenvalue", "marginal_max_eigenvalue", "diag_sum", "certificate_residual"):
        if key in ev:
            lines.append(f"  {key} = {ev[key]:.6g}")
    if rep["certificate"] is not None:
        lines.append(f"  certificate: measure-and-prepare form with {len(rep['certificate']['pairs'])} pairs")
    return "\n".join(lines)


def cmd_classify(args) -> int:
    targets = [(p, None) for p in args.paths] + ([(None, args.builtin)] if args.builtin else [])
    if not targets:
        raise CliFailure(EXIT_PARSE, "give a spec file or --builtin NAME")

    def run(target):
        path, builtin = target
        return classify_report(_load(path, builtin), args.tol)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        reports = list(pool.map(run, targets))
    names = [p if p is not None else b for p, b in targets]
    if args.json:
        out = reports[0] if len(reports) == 1 else [dict(r, source=n) for r, n in zip(reports, names)]
        print(json.dumps(out, indent=2, sort_keys=True))
    else:
        print("\n".join(_classify_text(n, r) for n, r in zip(names, reports)))
    return EXIT_OK


# --- convert ----------------------------------------------------------------------

def cmd_convert(args) -> int:
    spec = _load(args.path, args.builtin)
    ch = spec.channel
    if args.to == "choi":
        out = choi_of(ch)
    elif args.to == "kraus":
        out = to_kraus(ch)
    else:
        if isinstance(ch, HolevoChannel):
            out = ch
        else:
            verdict = classify(ch, args.tol) if ch.is_square else None
            if verdict is None or verdict.status is not Status.EBT:
                status = "not square" if verdict is None else verdict.status.value
                raise CliFailure(EXIT_INVALID, f"NotEbt: no measure-and-prepare form ({status})")
            out = verdict.certificate
    text = dump_spec(spec_from_channel(out))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- extremal ---------------------------------------------------------------------

def cmd_extremal(args) -> int:
    spec = _load(args.path, args.builtin)
    ch = spec.channel
    rep = cpt_extremality(ch)
    out = {
        "channel": _summary(spec),
        "cpt_extreme": rep.cpt_extreme,
        "gram_min_singular_value": rep.gram_min_singular_value,
        "gram_max_singular_value": rep.gram_max_singular_value,
        "n_kraus": rep.n_kraus,
        "cq_overlap_matrix": None if rep.cq_overlap_matrix is None else encode_matrix(rep.cq_overlap_matrix),
    }
    ebt = classify(ch, args.tol).status if ch.is_square else None
    out["ebt"] = None if ebt is None else ebt.value
    if ebt is Status.EBT:
        hints = ebt_extremality_hints(ch)
        out["ebt_extremality"] = {
            "extreme_in_ebt": hints.extreme_in_ebt,
            "reason": hints.reason,
            "general_test": hints.general_test,
            "builtin": hints.builtin,
            "split_weight": None if hints.split is None else hints.split[0],
        }
    if args.json:
        print(json.dumps(_jsonable(out), indent=2, sort_keys=True))
    else:
        print(f"structural class: {out['channel']['structural_class']}")
        print(f"CPT-extreme: {rep.cpt_extreme}  (Kraus-product singular values min {rep.gram_min_singular_value:.3e},"
              f" max {rep.gram_max_singular_value:.3e}, {rep.n_kraus} Kraus operators)")
        print(f"EBT: {out['ebt']}")
        if "ebt_extremality" in out:
            e = out["ebt_extremality"]
            print(f"extreme in EBT: {e['extreme_in_ebt']}  ({e['reason']})")
    return EXIT_OK


# --- tmatrix ----------------------------------------------------------------------

def cmd_tmatrix(args) -> int:
    spec = _load(args.path, args.builtin)
    ch = spec.channel
    if not ch.is_square:
        raise CliFailure(EXIT_INVALID, "transfer matrix needs a square channel")
    if args.basis != "gellmann":
        raise CliFailure(EXIT_PARSE, f"unknown basis {args.basis!r}")
    tm = transfer_matrix(ch, gell_mann_basis(ch.dim_in))
    out = {
        "t": tm.t,
        "rank": tm.rank(),
        "first_row_residual": tm.first_row_residual(),
        "first_row_tp": tm.first_row_residual() <= 1e-9,
    }
    if ch.dim_in == 2:
        ok, value = ebt_diag_necessary(tm)
        out["diag_sum"] = value
        out["diag_sum_ok"] = ok
    if args.json:
        print(json.dumps(_jsonable(out), indent=2, sort_keys=True))
    else:
        with np.printoptions(precision=6, suppress=True, linewidth=120):
            print(tm.t)
        print(f"rank(T) = {out['rank']}")
        print(f"first row (1, 0, ..., 0): {'yes' if out['first_row_tp'] else 'no'}"
              f" (residual {out['first_row_residual']:.3e})")
        if "diag_sum" in out:
            flag = "ok (inconclusive)" if out["diag_sum_ok"] else "> 1: NotEBT witness"
            print(f"sum |t_jj| (j>=1) = {out['diag_sum']:.6g}  {flag}")
    return EXIT_OK


# --- simulate ---------------------------------------------------------------------

def cmd_simulate(args) -> int:
    from .channels import simulate_measure_prepare

    spec = _load(args.path, args.builtin)
    ch = spec.channel
    if not isinstance(ch, HolevoChannel):
        verdict = classify(ch, args.tol) if ch.is_square else None
        if verdict is None or verdict.status is not Status.EBT:
            raise CliFailure(EXIT_INVALID, "simulation needs a measure-and-prepare (EBT) channel")
        ch = verdict.certificate
    if args.state:
        try:
            rho = load_state(Path(args.state).read_text(encoding="utf-8"))
        except OSError as exc:
            raise CliFailure(EXIT_PARSE, f"{args.state}: {exc.strerror}") from exc
    else:
        rho = DensityMatrix(np.eye(ch.dim_in) / ch.dim_in)
    if rho.dim != ch.dim_in:
        raise CliFailure(EXIT_INVALID, f"state has dimension {rho.dim}, channel expects {ch.dim_in}")
    emp, counts = simulate_measure_prepare(ch, rho, args.samples, args.seed)
    exact = ch(rho.mat)
    dist = trace_distance(emp.mat, exact)
    out = {
        "samples": args.samples,
        "seed": args.seed,
        "outcome_counts": counts,
        "empirical": encode_matrix(emp.mat),
        "exact": encode_matrix(exact),
        "trace_distance": dist,
    }
    if args.json:
        print(json.dumps(_jsonable(out), indent=2, sort_keys=True))
    else:
        print(f"samples = {args.samples}, seed = {args.seed}")
        print("outcome histogram: " + " ".join(f"{k}:{c}" for k, c in enumerate(counts)))
        with np.printoptions(precision=5, suppress=True, linewidth=120):
            print("empirical output:")
            print(emp.mat)
        print(f"trace distance to exact output = {dist:.6g}")
    return EXIT_OK


def cmd_builtins(args) -> int:
    if args.json:
        print(json.dumps({k: {"usage": u, "description": d} for k, (u, d) in BUILTINS.items()}, indent=2))
    else:
        for usage, desc in BUILTINS.values():
            print(f"{usage:22s} {desc}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="rank/PSD tolerance on the Choi matrix")
    common.add_argument("--builtin", metavar="NAME", help="use a named channel, e.g. depolarizing:2:0.2")

    parser = argparse.ArgumentParser(prog="ebtkit", description="Analyze entanglement-breaking channels.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="EBT / NotEBT / Undecided with certificate")
    p.add_argument("paths", nargs="*")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("convert", parents=[common], help="convert to another representation")
    p.add_argument("path", nargs="?")
    p.add_argument("--to", choices=("kraus", "holevo", "choi"), required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("extremal", parents=[common], help="extreme-point analysis")
    p.add_argument("path", nargs="?")
    p.set_defaults(func=cmd_extremal)

    p = sub.add_parser("tmatrix", parents=[common], help="transfer matrix in an operator basis")
    p.add_argument("path", nargs="?")
    p.add_argument("--basis", default="gellmann")
    p.set_defaults(func=cmd_tmatrix)

    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo measure-and-prepare simulation")
    p.add_argument("path", nargs="?")
    p.add_argument("--state", help="state document (default: maximally mixed)")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("builtins", help="list named channels")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_builtins)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SpecParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MergeStall, PreconditionRankMismatch) as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except EbtError as exc:
        print(f"invalid channel: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE


if __name__ == "__main__":
    sys.exit(main())
