"""Command-line driver: ``covpovm check | tomo | cv``.

Exit codes: 0 all checks pass, 2 a mathematical check failed,
3 ill-conditioned input, 4 I/O or configuration error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from .coherent import FockSpace, QuadratureGrid, gs_identity_check, verify_gaussian_contraction
from .config import ConfigError, ExperimentConfig, resolve_fiducial, resolve_state
from .errors import GridTooSmallError, NormalizationError, TruncationWarning
from .povm import (
    ambiguity_function,
    build_povm,
    contractions,
    extract_multiplier,
    informational_completeness_report,
    MATERIALIZE_MAX_DIM,
)
from .serialization import SCHEMA_VERSION, dumps, multiplier_table_to_csv, rows_to_csv
from .tomography import (
    error_metrics,
    forward_probabilities,
    loglog_slope,
    reconstruct,
    sample_outcomes,
    stage_one,
)
from .weyl import commutant_dimension, weyl_transform

EXIT_OK, EXIT_CHECK_FAILED, EXIT_ILL_CONDITIONED, EXIT_CONFIG = 0, 2, 3, 4
CONTRACTION_SLACK = 1e-12


def _check(name, passed, value, tolerance=None, **extra) -> dict:
    entry = {"name": name, "passed": bool(passed), "value": value}
    if tolerance is not None:
        entry["tolerance"] = tolerance
    entry.update(extra)
    return entry


def _report(command: str, config: ExperimentConfig, checks: list[dict], exit_code: int, **extra) -> dict:
    report = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config.to_dict(),
        "checks": checks,
        "passed": exit_code == EXIT_OK,
        "exit_code": exit_code,
    }
    failed = [c["name"] for c in checks if not c["passed"]]
    if failed:
        report["failed_checks"] = failed
    report.update(extra)
    return report


def _povm_and_multipliers(config: ExperimentConfig):
    spec = config.group_spec
    fid_rng, _, _ = config.seed_streams()
    psi = resolve_fiducial(config, fid_rng)
    try:
        povm = build_povm(spec, psi)
    except NormalizationError as exc:
        raise ConfigError(str(exc)) from None
    # residual is judged by the caller against config.residual_tol
    table = extract_multiplier(povm, tol=np.inf)
    return povm, table


def cmd_check(config: ExperimentConfig) -> tuple[int, dict]:
    spec = config.group_spec
    povm, table = _povm_and_multipliers(config)
    checks = []

    dim = commutant_dimension(spec)
    checks.append(_check("irreducibility", dim == 1, dim, expected=1))

    defect = povm.identity_defect()
    checks.append(_check("identity_resolution", defect < config.identity_tol, defect, config.identity_tol))

    checks.append(
        _check("multiplier_residual", table.max_residual < config.residual_tol, table.max_residual, config.residual_tol)
    )

    amb = np.conj(ambiguity_function(spec, povm.fiducial))
    amb_err = float(np.max(np.abs(table.values - amb)))
    checks.append(_check("ambiguity_identity", amb_err < config.ambiguity_tol, amb_err, config.ambiguity_tol))

    if spec.order <= MATERIALIZE_MAX_DIM:
        norms = np.linalg.norm(contractions(povm), ord=2, axis=(1, 2))
    else:
        norms = np.abs(table.values)
    max_norm = float(np.max(norms))
    checks.append(_check("contraction_bound", max_norm <= 1 + CONTRACTION_SLACK, max_norm, 1 + CONTRACTION_SLACK))

    ic = informational_completeness_report(table, config.ic_tol)
    checks.append(_check("informational_completeness", ic.complete, ic.min_modulus, config.ic_tol, **ic.to_dict()))

    failed = [c["name"] for c in checks if not c["passed"]]
    if not failed:
        code = EXIT_OK
    elif failed == ["informational_completeness"]:
        code = EXIT_ILL_CONDITIONED
    else:
        code = EXIT_CHECK_FAILED
    extra = {}
    if config.csv:
        _write(config.csv, multiplier_table_to_csv(table))
        extra["multiplier_csv"] = config.csv
    return code, _report("check", config, checks, code, **extra)


def cmd_tomo(config: ExperimentConfig) -> tuple[int, dict]:
    spec = config.group_spec
    povm, table = _povm_and_multipliers(config)
    ic = informational_completeness_report(table, config.ic_tol)
    if not ic.complete:
        checks = [_check("informational_completeness", False, ic.min_modulus, config.ic_tol, **ic.to_dict())]
        report = _report(
            "tomo",
            config,
            checks,
            EXIT_ILL_CONDITIONED,
            diagnostic=f"multiplier vanishes at {ic.worst_point}; reconstruction refused",
        )
        return EXIT_ILL_CONDITIONED, report

    _, state_rng, sampling_seeds = config.seed_streams()
    rho = resolve_state(config, state_rng)
    exact = forward_probabilities(povm, rho)

    if config.shots == 0 and not config.schedule:
        result = reconstruct(povm, exact, table, tol=config.ic_tol)
        metrics = error_metrics(rho, result.rho_hat)
        coeff_err = float(np.max(np.abs(stage_one(exact, table) - weyl_transform(rho, spec))))
        checks = [
            _check("round_trip_frobenius", metrics["frobenius"] < config.tomo_tol, metrics["frobenius"], config.tomo_tol),
            _check("weyl_coefficients", coeff_err < config.tomo_tol, coeff_err, config.tomo_tol),
        ]
        code = EXIT_OK if all(c["passed"] for c in checks) else EXIT_CHECK_FAILED
        return code, _report(
            "tomo", config, checks, code, mode="exact", condition_indicator=ic.min_modulus, **metrics
        )

    schedule = [int(n) for n in config.schedule] or [int(config.shots)]
    rows = []
    for shots in schedule:
        for seed in sampling_seeds:
            empirical = sample_outcomes(exact, shots, seed)
            result = reconstruct(povm, empirical, table, tol=config.ic_tol, project=config.project)
            metrics = error_metrics(rho, result.rho_hat)
            rows.append({"shots": shots, "seed": seed, **metrics})
    medians = [
        {
            "shots": shots,
            "median_frobenius": float(np.median([r["frobenius"] for r in rows if r["shots"] == shots])),
            "median_trace_distance": float(np.median([r["trace_distance"] for r in rows if r["shots"] == shots])),
        }
        for shots in schedule
    ]
    checks = []
    extra = {"mode": "sampled", "condition_indicator": ic.min_modulus, "medians": medians}
    if len(schedule) >= 2:
        slope = loglog_slope(schedule, [m["median_frobenius"] for m in medians])
        checks.append(_check("shot_noise_slope", abs(slope + 0.5) <= config.slope_tol, slope, config.slope_tol, expected=-0.5))
        extra["slope"] = slope
    csv_text = rows_to_csv(rows, ["shots", "seed", "frobenius", "trace_distance"])
    csv_path = config.csv or (str(Path(config.output).with_suffix(".csv")) if config.output else None)
    if csv_path:
        _write(csv_path, csv_text)
        extra["csv"] = csv_path
    else:
        extra["rows"] = rows
    code = EXIT_OK if all(c["passed"] for c in checks) else EXIT_CHECK_FAILED
    return code, _report("tomo", config, checks, code, **extra)


def cmd_cv(config: ExperimentConfig) -> tuple[int, dict]:
    alpha = config.alpha_value
    space = FockSpace(config.trunc)
    try:
        grid = QuadratureGrid.disk(config.radius, config.step)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TruncationWarning)
        identity = gs_identity_check(space, grid, config.n_check)
        contraction = verify_gaussian_contraction(space, grid, alpha, config.n_check)
    truncation = [str(w.message) for w in caught if issubclass(w.category, TruncationWarning)]
    checks = [
        _check("gs_identity", identity.max_error < config.cv_tol, identity.max_error, config.cv_tol,
               per_level_errors=identity.per_level_errors),
        _check("gaussian_contraction", contraction.max_error < config.cv_tol, contraction.max_error, config.cv_tol,
               per_level_errors=contraction.per_level_errors),
    ]
    code = EXIT_OK if all(c["passed"] for c in checks) else EXIT_CHECK_FAILED
    if truncation and config.strict and code == EXIT_OK:
        code = EXIT_ILL_CONDITIONED
    extra = {"params": contraction.params, "max_error": max(identity.max_error, contraction.max_error)}
    if truncation:
        extra["warnings"] = truncation
    return code, _report("cv", config, checks, code, **extra)


COMMANDS = {"check": cmd_check, "tomo": cmd_tomo, "cv": cmd_cv}


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its values")
    common.add_argument("--group", help='cyclic factors, e.g. "4" or "2,2,3"')
    common.add_argument("--seed", type=int, help="64-bit seed for all randomness")
    common.add_argument("--fiducial", help="basis | discrete-gaussian | random | path to JSON vector")
    common.add_argument("--ic-tol", type=float, dest="ic_tol")
    common.add_argument("--output", "-o", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="CSV output path (multipliers for check, convergence rows for tomo)")

    parser = argparse.ArgumentParser(prog="covpovm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", parents=[common], help="irreducibility, POVM and multiplier checks")
    check.add_argument("--identity-tol", type=float, dest="identity_tol")
    check.add_argument("--residual-tol", type=float, dest="residual_tol")

    tomo = sub.add_parser("tomo", parents=[common], help="reconstruct a state from exact or sampled statistics")
    tomo.add_argument("--state", help="random | maximally-mixed | basis | path to JSON matrix")
    tomo.add_argument("--rank", type=int)
    tomo.add_argument("--shots", type=int, help="0 for exact probabilities")
    tomo.add_argument("--schedule", type=lambda s: [int(float(x)) for x in s.split(",")],
                      help="comma-separated shot counts for a convergence study")
    tomo.add_argument("--n-seeds", type=int, dest="n_seeds")
    tomo.add_argument("--project", action="store_true", default=None, help="project estimates onto states")
    tomo.add_argument("--tomo-tol", type=float, dest="tomo_tol")
    tomo.add_argument("--slope-tol", type=float, dest="slope_tol")

    cv = sub.add_parser("cv", parents=[common], help="coherent-state quadrature checks on Fock space")
    cv.add_argument("--trunc", type=int)
    cv.add_argument("--radius", type=float)
    cv.add_argument("--step", type=float)
    cv.add_argument("--alpha", help='complex amplitude, e.g. "0.5+0.3i"')
    cv.add_argument("--n-check", type=int, dest="n_check")
    cv.add_argument("--cv-tol", type=float, dest="cv_tol")
    cv.add_argument("--strict", action="store_true", default=None)
    return parser


def main(argv=None) -> int:
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")
    config_path = args.pop("config")
    try:
        base = ExperimentConfig.from_file(config_path) if config_path else ExperimentConfig()
        config = base.merged(args).validate()
        code, report = COMMANDS[command](config)
    except ConfigError as exc:
        print(f"covpovm {command}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GridTooSmallError as exc:
        print(f"covpovm {command}: grid too small: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = dumps(report)
    if config.output:
        try:
            _write(config.output, text)
        except ConfigError as exc:
            print(f"covpovm {command}: {exc}", file=sys.stderr)
            return EXIT_CONFIG
    else:
        sys.stdout.write(text)
    if code != EXIT_OK:
        failed = ", ".join(report.get("failed_checks", [])) or "see report"
        print(f"covpovm {command}: failed ({failed})", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
