"""Command-line interface.

Data goes to ``--output`` (or stdout); diagnostics go to stderr as JSON lines.
Exit codes: 0 success, 2 validation failure, 3 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import dynamics, ed_oracle, string_correlators
from .errors import ConvergenceError, ValidationError
from .inverse_problem import (
    AnnealSchedule,
    coupling_variation,
    reconstruct_annealing,
    reconstruct_direct,
    tune_cosine_amplitude,
)
from .jacobi_core import SymmetricChainSpec, diagonalize
from .mirror_design import (
    SpectrumSpec,
    certify_spectrum,
    cosine_distorted_spectrum,
    default_cosine_amplitude,
    linear_spectrum,
    quadratic_spectrum,
)
from .recipes import mirror31_spectrum
from .series import CorrelationSeries, chain_hash

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3


class NotConverged(Exception):
    pass


def _diag(level: str, message: str, **extra) -> None:
    record = {"level": level, "message": message}
    record.update(extra)
    sys.stderr.write(json.dumps(record, sort_keys=True, default=float) + "\n")


def _emit(args, text: str) -> None:
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc


def _parse_temperature(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


def _time_grid(args) -> np.ndarray:
    parts = []
    for g in args.grid or []:
        try:
            start, stop, num = g.split(":")
            parts.append(np.linspace(float(start), float(stop), int(num)))
        except ValueError as exc:
            raise ValidationError(f"bad --grid {g!r}; expected START:STOP:NUM") from exc
    if args.times:
        parts.append(np.array([float(t) for t in args.times.split(",") if t.strip()]))
    if not parts:
        raise ValidationError("no time grid given (use --grid START:STOP:NUM or --times)")
    t = np.unique(np.concatenate(parts))
    return t


def _spectrum_text(args, spec: SpectrumSpec) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        buf.write("# " + json.dumps({"tau": spec.tau, "phi0": spec.phi0}, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["nu", "energy", "n_assign"])
        for nu, (e, n) in enumerate(zip(spec.energies, spec.n_assign)):
            w.writerow([nu, repr(float(e)), int(n)])
        return buf.getvalue()
    return _dump(spec.to_dict())


def _chain_text(args, chain: SymmetricChainSpec) -> str:
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["site", "field", "coupling_to_next"])
        for i, h in enumerate(chain.fields):
            J = repr(float(chain.couplings[i])) if i < chain.n_sites - 1 else ""
            w.writerow([i, repr(float(h)), J])
        return buf.getvalue()
    return _dump(chain.to_dict())


def _series_text(args, series: CorrelationSeries, chain: SymmetricChainSpec) -> str:
    if args.format == "json":
        return _dump(series.to_dict(chain))
    return series.to_csv(chain)


def cmd_design(args) -> int:
    if args.family == "linear":
        spec = linear_spectrum(args.levels, args.omega0, args.omega)
    elif args.family == "quadratic":
        spec = quadratic_spectrum(args.levels, args.omega0, args.omega, args.p, args.q)
    elif args.family == "cosine":
        if args.tune:
            spec, report = tune_cosine_amplitude(args.levels)
            lo, hi, var = coupling_variation(report.chain)
            _diag("info", f"tuned amplitude: J in [{lo:.4g}, {hi:.4g}], variation {100 * var:.2f}%")
        else:
            amp = args.amplitude
            if amp is None:
                amp = default_cosine_amplitude(args.levels, args.lowest_gap)
            spec = cosine_distorted_spectrum(args.levels, amp)
    else:
        spec = mirror31_spectrum()
    cert = spec.certify(args.tolerance)
    _diag("info", cert.summary(), valid=cert.valid)
    _emit(args, _spectrum_text(args, spec))
    return EXIT_OK if cert.valid else EXIT_INVALID


def cmd_certify(args) -> int:
    data = _load_json(args.spectrum)
    tau = args.tau if args.tau is not None else data.get("tau", math.pi)
    cert = certify_spectrum(data["energies"], tau, args.tolerance)
    _diag("info", cert.summary(), valid=cert.valid)
    _emit(args, _dump(cert.to_dict()))
    return EXIT_OK if cert.valid else EXIT_INVALID


def cmd_reconstruct(args) -> int:
    spec = SpectrumSpec.from_dict(_load_json(args.spectrum))
    if args.method == "direct":
        report = reconstruct_direct(spec)
    else:
        schedule = AnnealSchedule(t0=args.t0, cooling=args.cooling, sweeps=args.sweeps, seed=args.seed)
        report = reconstruct_annealing(spec, schedule=schedule, tol=args.tolerance, restarts=args.restarts)
    lo, hi, var = coupling_variation(report.chain)
    _diag(
        "info",
        f"J in [{lo:.4g}, {hi:.4g}], variation {100 * var:.2f}%",
        method=report.method,
        spectral_residual=report.spectral_residual,
        max_abs_field=float(np.abs(report.chain.fields).max()),
        iterations=report.iterations,
    )
    _emit(args, _chain_text(args, report.chain))
    if not report.converged:
        raise NotConverged(f"annealing residual {report.spectral_residual:.3g} above tolerance {args.tolerance:g}")
    return EXIT_OK


def _load_chain(path: str) -> SymmetricChainSpec:
    data = _load_json(path)
    if "chain" in data:
        data = data["chain"]
    return SymmetricChainSpec.from_dict(data)


def cmd_correlate(args) -> int:
    chain = _load_chain(args.chain)
    times = _time_grid(args)
    eig = diagonalize(chain)
    state = dynamics.ThermalState.from_temperature(eig, args.temperature)
    sites = args.sites
    if args.observable == "zz":
        if len(sites) != 2:
            raise ValidationError("zz needs two sites: --sites J K")
        series = dynamics.zz_correlation(eig, state, sites[0], sites[1], times)
    else:
        if len(sites) not in (1, 2):
            raise ValidationError("xx needs one or two sites")
        j, k = sites[0], sites[-1]
        series = string_correlators.xx_cross_correlation(eig, state, j, k, times)
    _emit(args, _series_text(args, series, chain))
    return EXIT_OK


def cmd_fidelity(args) -> int:
    chain = _load_chain(args.chain)
    times = _time_grid(args)
    eig = diagonalize(chain)
    amps = [dynamics.transfer_amplitude(eig, t) for t in times]
    if args.format == "json":
        text = _dump({
            "chain_hash": chain_hash(chain),
            "t": [float(t) for t in times],
            "fidelity": [abs(a) ** 2 for a in amps],
            "amplitude_re": [a.real for a in amps],
            "amplitude_im": [a.imag for a in amps],
        })
    else:
        buf = io.StringIO()
        buf.write("# " + json.dumps({"observable": "fidelity", "chain_hash": chain_hash(chain)}, sort_keys=True) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "fidelity", "amplitude_re", "amplitude_im"])
        for t, a in zip(times, amps):
            w.writerow([repr(float(t)), repr(abs(a) ** 2), repr(a.real), repr(a.imag)])
        text = buf.getvalue()
    _emit(args, text)
    return EXIT_OK


def oracle_check(chain: SymmetricChainSpec, temperatures, times) -> dict:
    """Largest deviations between fermionic correlators and dense ED."""
    eig = diagonalize(chain)
    model = ed_oracle.build_spin_hamiltonian(chain)
    spectrum_dev = float(np.abs(ed_oracle.subset_sums(eig.eigenvalues) - model.energies).max())
    worst = {"zz": 0.0, "xx": 0.0}
    L = chain.n_sites
    for T in temperatures:
        state = dynamics.ThermalState.from_temperature(eig, T)
        beta = state.beta
        for j in range(L):
            for k in range(L):
                zz = dynamics.zz_correlation(eig, state, j, k, times).values
                ref = ed_oracle.ed_correlation(model, ("z", j), ("z", k), beta, times).values
                worst["zz"] = max(worst["zz"], float(np.abs(zz - ref).max(initial=0.0)))
                xx = string_correlators.xx_cross_correlation(eig, state, j, k, times).values
                ref = ed_oracle.ed_correlation(model, ("x", j), ("x", k), beta, times).values
                worst["xx"] = max(worst["xx"], float(np.abs(xx - ref).max(initial=0.0)))
    return {"many_body_spectrum": spectrum_dev, **worst}


def cmd_oracle_check(args) -> int:
    chain = _load_chain(args.chain)
    temps = [_parse_temperature(t) for t in args.temperatures.split(",")]
    times = _time_grid(args) if (args.grid or args.times) else np.linspace(0.0, 3.0, 7)
    report = oracle_check(chain, temps, times)
    ok = max(report.values()) < args.tolerance
    _diag("info", "oracle agreement" if ok else "oracle MISMATCH", **report)
    _emit(args, _dump({**report, "tolerance": args.tolerance, "passed": ok}))
    return EXIT_OK if ok else EXIT_INVALID


def _global_options(defaults: bool) -> argparse.ArgumentParser:
    # defaults only on the top-level parser so subcommand placement does not reset them
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--output", "-o", default=d(None), help="write data here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default=d(None), help="output format")
    p.add_argument("--seed", type=int, default=d(0), help="PRNG seed (annealing)")
    p.add_argument("--tolerance", type=float, default=d(None), help="acceptance tolerance")
    return p


def _add_grid(p: argparse.ArgumentParser) -> None:
    p.add_argument("--grid", action="append", metavar="START:STOP:NUM", help="linspace block (repeatable)")
    p.add_argument("--times", help="comma-separated explicit times")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinmirror",
        description="Design, reconstruct and simulate perfect state-mirror XX spin chains.",
        parents=[_global_options(True)],
    )
    common = _global_options(False)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("design", parents=[common], help="generate a mirror spectrum")
    fam = p.add_subparsers(dest="family", required=True)
    q = fam.add_parser("linear", parents=[common])
    q.add_argument("--levels", type=int, required=True)
    q.add_argument("--omega0", type=float, default=0.0)
    q.add_argument("--omega", type=float, default=1.0)
    q = fam.add_parser("quadratic", parents=[common])
    q.add_argument("--levels", type=int, required=True)
    q.add_argument("--omega0", type=float, default=0.0)
    q.add_argument("--omega", type=float, default=1.0)
    q.add_argument("--p", type=int, default=1)
    q.add_argument("--q", type=int, default=1)
    q = fam.add_parser("cosine", parents=[common])
    q.add_argument("--levels", type=int, required=True)
    q.add_argument("--amplitude", type=float, default=None)
    q.add_argument("--lowest-gap", type=float, default=3.0, help="sets the default amplitude")
    q.add_argument("--tune", action="store_true", help="scan amplitudes for the most homogeneous couplings")
    fam.add_parser("mirror31", parents=[common], help="the 31-level spectrum with couplings within 101.5..108.5")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("certify", parents=[common], help="check the mirror condition of a spectrum file")
    p.add_argument("spectrum")
    p.add_argument("--tau", type=float, default=None)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("reconstruct", parents=[common], help="solve the inverse eigenvalue problem")
    p.add_argument("spectrum")
    p.add_argument("--method", choices=("direct", "annealing"), default="direct")
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--cooling", type=float, default=0.995)
    p.add_argument("--sweeps", type=int, default=6000)
    p.add_argument("--restarts", type=int, default=3)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("correlate", parents=[common], help="spin correlation time series")
    p.add_argument("chain")
    p.add_argument("--observable", choices=("zz", "xx"), required=True)
    p.add_argument("--sites", type=int, nargs="+", required=True)
    p.add_argument("--temperature", type=_parse_temperature, default=0.0)
    _add_grid(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("fidelity", parents=[common], help="end-to-end transfer fidelity")
    p.add_argument("chain")
    _add_grid(p)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("oracle-check", parents=[common], help="compare against exact diagonalization")
    p.add_argument("chain")
    p.add_argument("--temperatures", default="0,1,inf")
    _add_grid(p)
    p.set_defaults(func=cmd_oracle_check)
    return parser


_DEFAULT_TOL = {"design": 1e-9, "certify": 1e-9, "reconstruct": 1e-6, "oracle-check": 1e-8}
_DEFAULT_FORMAT = {"correlate": "csv", "fidelity": "csv"}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tolerance is None:
        args.tolerance = _DEFAULT_TOL.get(args.command, 1e-9)
    if args.format is None:
        args.format = _DEFAULT_FORMAT.get(args.command, "json")
    try:
        return args.func(args)
    except ValidationError as exc:
        _diag("error", str(exc), error="validation", index=exc.index)
        return EXIT_INVALID
    except (NotConverged, ConvergenceError) as exc:
        _diag("error", str(exc), error="convergence")
        return EXIT_NOT_CONVERGED


if __name__ == "__main__":
    sys.exit(main())
