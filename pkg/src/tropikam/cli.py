"""Command-line front end.

A thin client over the service layer: every subcommand builds the same
request models the HTTP endpoints accept, dispatches them in-process by
default (no network involved), or to a running service when --server is
given, and renders the returned report.

Exit codes: 0 all checks passed, 1 a check failed or the data is
numerically inconsistent, 2 input or usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .costfile import load_cost, save_cost
from .errors import InconsistencyError, TropikamError
from .lagrangian import parse_lagrangian
from .service import pipeline
from .service.schemas import (
    AnalyzeReport,
    AnalyzeRequest,
    ErgodicReport,
    ErgodicRequest,
    IngestReport,
    IngestRequest,
    KamReport,
    KamRequest,
    KernelPayload,
    LagrangianPayload,
    MatherReport,
    MatherRequest,
    ToleranceParams,
    TransportReport,
    TransportRequest,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

_RUNNERS = {
    "ingest": (pipeline.run_ingest, IngestReport),
    "analyze": (pipeline.run_analyze, AnalyzeReport),
    "kam": (pipeline.run_kam, KamReport),
    "transport": (pipeline.run_transport, TransportReport),
    "mather": (pipeline.run_mather, MatherReport),
    "ergodic": (pipeline.run_ergodic, ErgodicReport),
}


class UsageError(Exception):
    pass


def _add_common(parser: argparse.ArgumentParser, with_input: bool = True) -> None:
    if with_input:
        parser.add_argument("--input", help="cost file to load")
        parser.add_argument(
            "--format", choices=["json", "csv"], help="cost file format (default: by extension)"
        )
    parser.add_argument("--out", help="write the full JSON report to this path")
    parser.add_argument("--emit-csv", help="write plot-ready CSV data to this path")
    parser.add_argument("--eps-num", type=float, default=1e-9)
    parser.add_argument("--eps-aubry", type=float, default=1e-7)
    parser.add_argument("--eps-dual", type=float, default=1e-7)
    parser.add_argument("--eps-mass", type=float, default=1e-12)
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropikam",
        description=(
            "Critical values, Peierls barriers, Aubry sets, weak KAM pairs, "
            "optimal transport and minimizing measures for finite cost kernels."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build a kernel from a Lagrangian or validate a cost file")
    _add_common(p)
    p.add_argument(
        "--lagrangian",
        help="generator spec, e.g. pendulum:eps=0.1,N=50,K=10",
    )

    p = sub.add_parser("analyze", help="normalize, compute barrier data and run the axiom checks")
    _add_common(p)
    p.add_argument(
        "--oracle-window",
        nargs=2,
        type=int,
        metavar=("N_MIN", "N_MAX"),
        help="cross-check the barrier against the windowed-liminf oracle",
    )
    p.add_argument("--include-barrier", action="store_true", help="embed the full barrier matrix")

    p = sub.add_parser("kam", help="generate admissible pairs and verify their characterization")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--num-pairs", type=int, default=8)

    p = sub.add_parser("transport", help="solve the primal/dual transport problems")
    _add_common(p)
    p.add_argument("--mu0", default="uniform", help='"uniform", "dirac:IDX" or a JSON vector')
    p.add_argument("--mu1", default="uniform", help='"uniform", "dirac:IDX" or a JSON vector')

    p = sub.add_parser("mather", help="minimize over stationary couplings and verify the support")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--extra-family-seeds", type=int, default=4)

    p = sub.add_parser("ergodic", help="realize the minimizer as a chain and check orbit averages")
    _add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--orbit-length", type=int, default=100_000)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _tolerances(args) -> ToleranceParams:
    return ToleranceParams(
        eps_num=args.eps_num,
        eps_aubry=args.eps_aubry,
        eps_dual=args.eps_dual,
        eps_mass=args.eps_mass,
    )


def _load_payload(args) -> KernelPayload:
    if not args.input:
        raise UsageError("--input is required for this command")
    kernel = load_cost(args.input, fmt=args.format)
    return KernelPayload.from_kernel(kernel)


def _measure_arg(text: str):
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad measure vector: {exc}") from None
    return stripped


def _dispatch(args, name: str, request):
    runner, report_cls = _RUNNERS[name]
    if not args.server:
        return runner(request)
    import httpx

    response = httpx.post(
        args.server.rstrip("/") + f"/{name}",
        json=request.model_dump(mode="json"),
        timeout=600.0,
    )
    if response.status_code == 409:
        raise InconsistencyError(response.json().get("detail", response.text))
    if response.status_code >= 400:
        detail = response.json().get("detail", response.text)
        raise UsageError(f"service rejected the request: {detail}")
    return report_cls.model_validate(response.json())


def _summarize(report) -> None:
    head = f"{report.command}  digest={report.digest[:12]}  n={report.size}"
    if hasattr(report, "critical_value"):
        head += f"  critical_value={report.critical_value:.12g}"
    print(head)
    if hasattr(report, "aubry"):
        print(f"  aubry={report.aubry}  d_edges={report.d_edges}")
    if hasattr(report, "primal_value"):
        print(
            f"  primal={report.primal_value:.12g}  dual={report.dual_value_:.12g}"
            f"  gap={report.gap:.3e}"
        )
    if hasattr(report, "value") and report.command in ("mather", "ergodic"):
        print(f"  stationary_value={report.value:.3e}")
    if hasattr(report, "birkhoff_average"):
        print(
            f"  birkhoff={report.birkhoff_average:.3e} (threshold {report.birkhoff_threshold:.3e})"
            f"  two_step_tv={report.two_step_tv:.3e}"
        )
    for check in getattr(report, "checks", []):
        status = "pass" if check.passed else "FAIL"
        print(f"  [{status}] {check.name}: residual={check.residual:.3e} tol={check.tolerance:.3e}")
    print("PASSED" if report.passed else "FAILED")


def _write_report(report, path: str) -> None:
    Path(path).write_text(report.model_dump_json(indent=2, by_alias=True), encoding="utf-8")


def _emit_csv(report, request, path: str) -> None:
    rows: list[list] = []
    if isinstance(report, (AnalyzeReport,)):
        labels = request.kernel.labels
        coords = request.kernel.coords
        rows.append(["index", "label", "coord", "self_barrier", "aubry"])
        aubry = set(report.aubry)
        for i, label in enumerate(labels):
            coord = coords[i][0] if coords else ""
            rows.append([i, label, coord, report.self_barrier[i], int(i in aubry)])
    elif isinstance(report, (KamReport, TransportReport)):
        labels = request.kernel.labels
        coords = request.kernel.coords
        rows.append(["index", "label", "coord", "phi0", "phi1"])
        for i, label in enumerate(labels):
            coord = coords[i][0] if coords else ""
            rows.append([i, label, coord, report.phi0[i], report.phi1[i]])
    elif isinstance(report, MatherReport):
        rows.append(["x", "y", "mass"])
        rows.extend(list(t) for t in report.coupling_support)
    elif isinstance(report, ErgodicReport):
        rows.append(["step", "state"])
        rows.extend([i, s] for i, s in enumerate(report.orbit_head))
    elif isinstance(report, IngestReport):
        rows.append(["index", "label", "coord"])
        coords = report.kernel.coords
        for i, label in enumerate(report.kernel.labels):
            rows.append([i, label, coords[i][0] if coords else ""])
    with open(path, "w", newline="", encoding="utf-8") as handle:
        csv.writer(handle).writerows(rows)


def _run_command(args) -> int:
    name = args.command
    if name == "serve":
        import uvicorn

        from .service.app import app

        uvicorn.run(app, host=args.host, port=args.port)
        return EXIT_OK

    if name == "ingest":
        if bool(args.input) == bool(args.lagrangian):
            raise UsageError("ingest needs exactly one of --input or --lagrangian")
        if args.input:
            request = IngestRequest(kernel=_load_payload(args), tolerances=_tolerances(args))
        else:
            spec = parse_lagrangian(args.lagrangian)
            request = IngestRequest(
                lagrangian=LagrangianPayload(
                    potential=spec.potential,
                    grid_size=spec.grid_size,
                    substeps=spec.substeps,
                    amplitude=spec.amplitude,
                    phase=spec.phase,
                    amplitude2=spec.amplitude2,
                    phase2=spec.phase2,
                    kinetic=spec.kinetic,
                ),
                tolerances=_tolerances(args),
            )
        report = _dispatch(args, "ingest", request)
        _summarize(report)
        if args.out:
            save_cost(report.kernel.to_kernel(), args.out, fmt=args.format)
            print(f"kernel written to {args.out}")
        if args.emit_csv:
            _emit_csv(report, request, args.emit_csv)
        return EXIT_OK if report.passed else EXIT_CHECK_FAILED

    payload = _load_payload(args)
    tolerances = _tolerances(args)
    if name == "analyze":
        request = AnalyzeRequest(
            kernel=payload,
            tolerances=tolerances,
            oracle_window=tuple(args.oracle_window) if args.oracle_window else None,
            include_barrier=args.include_barrier,
        )
    elif name == "kam":
        request = KamRequest(
            kernel=payload, tolerances=tolerances, seed=args.seed, num_pairs=args.num_pairs
        )
    elif name == "transport":
        request = TransportRequest(
            kernel=payload,
            tolerances=tolerances,
            mu0=_measure_arg(args.mu0),
            mu1=_measure_arg(args.mu1),
        )
    elif name == "mather":
        request = MatherRequest(
            kernel=payload,
            tolerances=tolerances,
            seed=args.seed,
            extra_family_seeds=args.extra_family_seeds,
        )
    elif name == "ergodic":
        request = ErgodicRequest(
            kernel=payload,
            tolerances=tolerances,
            seed=args.seed,
            orbit_length=args.orbit_length,
        )
    else:  # pragma: no cover - argparse restricts the choices
        raise UsageError(f"unknown command {name!r}")

    report = _dispatch(args, name, request)
    _summarize(report)
    if args.out:
        _write_report(report, args.out)
    if args.emit_csv:
        _emit_csv(report, request, args.emit_csv)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run_command(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistencyError as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    except TropikamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
