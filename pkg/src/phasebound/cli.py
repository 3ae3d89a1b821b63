"""Command-line front end.

Three subcommands:

``point``
    Evaluate every reportable quantity at one parameter point and emit
    the record as JSON.
``scan``
    Sweep one variable and write a CSV (plus a companion metadata JSON;
    the timestamp lives only there so the CSV stays byte-stable).
``oracle-check``
    Re-derive the closed forms from the brute-force Fock engine at one
    point and report each identity as a pass/fail line.

Configuration is a single JSON document (file or standard input via
``-``) with the keys described in ``--help``; command-line flags
override the corresponding JSON fields.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from typing import Optional, TextIO, Union

from . import __version__
from .errors import DegenerateStatistics, PhaseboundError
from .fock_oracle import (
    apply_splitter,
    derivative_qfim,
    kraus_completeness,
    kraus_sum_cij,
    measure_moments,
    prepare_input,
)
from .moments import (
    InterferometerInput,
    ModeStatistics,
    SplitterSpec,
    derived_correlations,
    lbs_moments,
    nbs_moments,
)
from .optimizer import SingleArm, TwoArmIndependent, TwoArmSymmetric, optimize_gamma
from .qfim_ideal import (
    EstimationMode,
    FisherMatrix,
    Target,
    overestimation,
    qcrb,
    qfim_matrix,
    two_param_bound,
)
from .qfim_lossy import (
    SingleArmLoss,
    TwoArmLoss,
    c_matrix_single,
    c_matrix_two,
    gamma_opt_single,
)

# column order is part of the output contract; tests pin it
CSV_COLUMNS = (
    "swept_value",
    "mean_a",
    "mean_b",
    "var_a",
    "var_b",
    "cov",
    "f_pp",
    "f_mm",
    "f_pm",
    "info_single",
    "info_two",
    "delta_f",
    "gamma_opt_analytic",
    "gamma_opt_numeric",
    "info_optimal",
    "qcrb_single",
    "qcrb_two",
    "error",
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_COMPUTE = 2
EXIT_ORACLE = 3

_MOMENT_TOL = 1e-6
_KRAUS_TOL = 1e-8
_COMPLETENESS_TOL = 1e-10


class ConfigError(Exception):
    """Invalid or incomplete configuration document."""


class Interferometer(Enum):
    SU2 = "SU2"
    SU11 = "SU11"


class LossKind(Enum):
    NONE = "None"
    ONE_ARM = "OneArm"
    TWO_ARM = "TwoArm"


_SWEEPABLE = ("alpha_photons", "eta", "splitter_ratio", "gain")


@dataclass(frozen=True)
class ScanSpec:
    """One sweep (or, with swept_variable=None, one point).

    fixed holds every parameter not swept: alpha_photons (input mean
    photon number |alpha|^2), squeeze_r, splitter_ratio (reflectivity
    over transmissivity, SU2) or gain (SU11), eta and optionally eta_b
    when loss is present.
    """

    interferometer: Interferometer
    estimation: EstimationMode
    loss: LossKind
    fixed: dict
    swept_variable: Optional[str] = None
    start: float = 0.0
    stop: float = 0.0
    steps: int = 0
    repeats: int = 1

    def __post_init__(self) -> None:
        if self.swept_variable is not None:
            if self.swept_variable not in _SWEEPABLE:
                raise ConfigError(
                    f"swept_variable must be one of {_SWEEPABLE}, "
                    f"got {self.swept_variable!r}"
                )
            if not self.start < self.stop:
                raise ConfigError(
                    f"range start must be below stop, got [{self.start}, {self.stop}]"
                )
            if self.steps < 2:
                raise ConfigError(f"steps must be at least 2, got {self.steps}")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be a positive integer, got {self.repeats}")


def _parse_enum(kind, raw, field: str):
    try:
        return kind(raw)
    except ValueError:
        allowed = ", ".join(member.value for member in kind)
        raise ConfigError(f"{field} must be one of: {allowed}; got {raw!r}") from None


def _parse_estimation(raw) -> EstimationMode:
    mapping = {
        "SingleParameter": EstimationMode.SINGLE_PARAMETER,
        "TwoParameter": EstimationMode.TWO_PARAMETER,
    }
    if raw not in mapping:
        raise ConfigError(
            f"estimation must be SingleParameter or TwoParameter, got {raw!r}"
        )
    return mapping[raw]


def load_spec(document: dict, repeats_override: Optional[int] = None) -> ScanSpec:
    """Build a ScanSpec from a configuration dictionary."""
    if not isinstance(document, dict):
        raise ConfigError("configuration must be a JSON object")
    unknown = set(document) - {
        "interferometer",
        "estimation",
        "loss",
        "swept_variable",
        "range",
        "fixed",
        "repeats",
    }
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    for key in ("interferometer", "estimation", "loss"):
        if key not in document:
            raise ConfigError(f"missing required key {key!r}")
    swept = document.get("swept_variable")
    start = stop = 0.0
    steps = 0
    if swept is not None:
        rng = document.get("range")
        if not (isinstance(rng, (list, tuple)) and len(rng) == 3):
            raise ConfigError("range must be [start, stop, steps] when sweeping")
        start, stop, steps = float(rng[0]), float(rng[1]), int(rng[2])
    fixed = document.get("fixed", {})
    if not isinstance(fixed, dict):
        raise ConfigError("fixed must be an object of name -> value")
    repeats = int(document.get("repeats", 1))
    if repeats_override is not None:
        repeats = repeats_override
    return ScanSpec(
        interferometer=_parse_enum(
            Interferometer, document["interferometer"], "interferometer"
        ),
        estimation=_parse_estimation(document["estimation"]),
        loss=_parse_enum(LossKind, document["loss"], "loss"),
        fixed={str(k): float(v) for k, v in fixed.items()},
        swept_variable=swept,
        start=start,
        stop=stop,
        steps=steps,
        repeats=repeats,
    )


def _require(fixed: dict, key: str) -> float:
    if key not in fixed:
        raise ConfigError(f"fixed parameter {key!r} is required for this spec")
    return fixed[key]


def _build_input(
    spec: ScanSpec, fixed: dict
) -> tuple[InterferometerInput, Target]:
    alpha_photons = _require(fixed, "alpha_photons")
    if alpha_photons < 0.0:
        raise ConfigError(f"alpha_photons must be non-negative, got {alpha_photons}")
    alpha = math.sqrt(alpha_photons)
    squeeze_r = _require(fixed, "squeeze_r")
    if spec.interferometer is Interferometer.SU2:
        ratio = _require(fixed, "splitter_ratio")
        if ratio < 0.0:
            raise ConfigError(f"splitter_ratio must be non-negative, got {ratio}")
        splitter = SplitterSpec.lbs(1.0 / (1.0 + ratio))
        target = Target.PHASE_DIFFERENCE
    else:
        splitter = SplitterSpec.nbs(_require(fixed, "gain"))
        target = Target.PHASE_SUM
    return InterferometerInput(alpha, squeeze_r, splitter), target


def _stats_for(inp: InterferometerInput) -> ModeStatistics:
    if inp.splitter.kind.name == "LBS":
        return lbs_moments(inp)
    return nbs_moments(inp)


def _diag(fm: FisherMatrix, target: Target) -> float:
    return fm.f_mm if target is Target.PHASE_DIFFERENCE else fm.f_pp


def point_record(spec: ScanSpec, swept_value: Optional[float] = None) -> dict:
    """Compute one output row; raises on invalid parameters."""
    fixed = dict(spec.fixed)
    if spec.swept_variable is not None:
        if swept_value is None:
            raise ConfigError("swept_value required when a variable is swept")
        fixed[spec.swept_variable] = swept_value
    inp, target = _build_input(spec, fixed)
    stats = _stats_for(inp)
    row: dict = {key: None for key in CSV_COLUMNS}
    row["swept_value"] = swept_value
    row["mean_a"], row["mean_b"] = stats.mean_a, stats.mean_b
    row["var_a"], row["var_b"], row["cov"] = stats.var_a, stats.var_b, stats.cov
    row["error"] = ""

    gamma_analytic: Optional[float] = None
    gamma_numeric: Union[None, float, tuple[float, float]] = None
    if spec.loss is LossKind.NONE:
        fm = qfim_matrix(stats)
        info_single = _diag(fm, target)
        info_two = two_param_bound(fm, target)
        delta = overestimation(fm, target)
    elif spec.loss is LossKind.ONE_ARM:
        eta = _require(fixed, "eta")
        res_two = optimize_gamma(stats, SingleArm(eta), target)
        res_single = optimize_gamma(
            stats, SingleArm(eta), target, mode=EstimationMode.SINGLE_PARAMETER
        )
        gamma_numeric = res_two.argmin
        fm = c_matrix_single(stats, SingleArmLoss(eta, res_two.argmin))
        info_single, info_two = res_single.minimum, res_two.minimum
        delta = overestimation(fm, target)
        try:
            gamma_analytic = gamma_opt_single(stats, eta, target)
        except (ValueError, DegenerateStatistics):
            gamma_analytic = None  # lossless edge or singular statistics
    else:
        eta_a = _require(fixed, "eta")
        eta_b = fixed.get("eta_b", eta_a)
        if eta_b == eta_a:
            family = TwoArmSymmetric(eta_a)
        else:
            family = TwoArmIndependent(eta_a, eta_b)
        res_two = optimize_gamma(stats, family, target)
        res_single = optimize_gamma(
            stats, family, target, mode=EstimationMode.SINGLE_PARAMETER
        )
        gamma_numeric = res_two.argmin
        if isinstance(res_two.argmin, tuple):
            gamma_a, gamma_b = res_two.argmin
        else:
            gamma_a = gamma_b = res_two.argmin
        fm = c_matrix_two(stats, TwoArmLoss(eta_a, eta_b, gamma_a, gamma_b))
        info_single, info_two = res_single.minimum, res_two.minimum
        delta = overestimation(fm, target)

    row["f_pp"], row["f_mm"], row["f_pm"] = fm.f_pp, fm.f_mm, fm.f_pm
    row["info_single"], row["info_two"] = info_single, info_two
    row["delta_f"] = delta
    row["gamma_opt_analytic"] = gamma_analytic
    row["gamma_opt_numeric"] = gamma_numeric
    if spec.estimation is EstimationMode.SINGLE_PARAMETER:
        row["info_optimal"] = info_single
    else:
        row["info_optimal"] = info_two
    row["qcrb_single"] = qcrb(
        info_single, spec.repeats, mode=EstimationMode.SINGLE_PARAMETER, target=target
    ).delta_phi
    row["qcrb_two"] = qcrb(
        info_two, spec.repeats, mode=EstimationMode.TWO_PARAMETER, target=target
    ).delta_phi
    return row


def _guarded_record(spec: ScanSpec, swept_value: float) -> dict:
    # row-local containment: one bad point must not kill the sweep
    try:
        return point_record(spec, swept_value)
    except Exception as exc:
        row = {key: None for key in CSV_COLUMNS}
        row["swept_value"] = swept_value
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        return ";".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def run_scan(spec: ScanSpec, output_path: str, jobs: int = 1) -> None:
    """Write one CSV row per sweep point plus a metadata JSON."""
    if spec.swept_variable is None:
        raise ConfigError("scan requires swept_variable and range")
    step = (spec.stop - spec.start) / (spec.steps - 1)
    values = [spec.start + i * step for i in range(spec.steps)]
    values[-1] = spec.stop
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda v: _guarded_record(spec, v), values))
    else:
        rows = [_guarded_record(spec, v) for v in values]
    with open(output_path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([_format_cell(row[key]) for key in CSV_COLUMNS])
    meta = {
        "library": {"name": "phasebound", "version": __version__},
        "spec": {
            "interferometer": spec.interferometer.value,
            "estimation": "SingleParameter"
            if spec.estimation is EstimationMode.SINGLE_PARAMETER
            else "TwoParameter",
            "loss": spec.loss.value,
            "swept_variable": spec.swept_variable,
            "range": [spec.start, spec.stop, spec.steps],
            "fixed": spec.fixed,
            "repeats": spec.repeats,
        },
        "tolerances": {
            "moment_check": _MOMENT_TOL,
            "kraus_check": _KRAUS_TOL,
        },
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
    with open(output_path + ".meta.json", "w") as handle:
        json.dump(meta, handle, indent=2, sort_keys=True)
        handle.write("\n")


# ---------------------------------------------------------------------------
# oracle-check


def _check_line(
    name: str, lhs: float, rhs: float, tol: float, lines: list, scale: float = 0.0
) -> None:
    denom = max(abs(rhs), scale, 1e-300)
    rel = abs(lhs - rhs) / denom
    ok = rel <= tol
    lines.append((ok, f"{name}: closed={lhs!r} oracle={rhs!r} rel={rel:.3e} tol={tol:g}"))


def oracle_check(
    spec: ScanSpec,
    cutoff: int = 64,
    tolerance: Optional[float] = None,
    out: TextIO = sys.stdout,
) -> bool:
    """Compare closed forms against the Fock engine at one point.

    Prints one line per identity and returns overall success. The
    moment and matrix identities use `tolerance` when given, falling
    back to 1e-6 for moment-level and 1e-8 for Kraus-level checks.
    """
    moment_tol = tolerance if tolerance is not None else _MOMENT_TOL
    kraus_tol = tolerance if tolerance is not None else _KRAUS_TOL
    fixed = dict(spec.fixed)
    inp, target = _build_input(spec, fixed)
    closed = _stats_for(inp)
    lines: list[tuple[bool, str]] = []

    state0 = prepare_input(inp.alpha_mag, inp.squeeze_r, cutoff)
    state = apply_splitter(state0, inp.splitter)
    oracle = measure_moments(state)

    # cutoff adequacy evidence: doubling must not move the moments
    state_big = apply_splitter(
        prepare_input(inp.alpha_mag, inp.squeeze_r, 2 * cutoff), inp.splitter
    )
    oracle_big = measure_moments(state_big)
    for field in ("mean_a", "mean_b", "var_a", "var_b", "cov"):
        _check_line(
            f"cutoff_convergence.{field}",
            getattr(oracle, field),
            getattr(oracle_big, field),
            moment_tol,
            lines,
            scale=max(abs(oracle.mean_a), abs(oracle.mean_b), 1.0),
        )
        _check_line(
            f"moments.{field}",
            getattr(closed, field),
            getattr(oracle, field),
            moment_tol,
            lines,
        )
    corr_closed = derived_correlations(closed)
    corr_oracle = derived_correlations(oracle)
    for field in ("q_a", "q_b", "j"):
        _check_line(
            f"correlations.{field}",
            getattr(corr_closed, field),
            getattr(corr_oracle, field),
            moment_tol,
            lines,
            scale=1.0,
        )
    fm_closed = qfim_matrix(oracle)
    fm_oracle = derivative_qfim(state)
    matrix_scale = max(abs(fm_oracle.f_pp), abs(fm_oracle.f_mm))
    for field in ("f_pp", "f_mm", "f_pm"):
        _check_line(
            f"qfim.{field}",
            getattr(fm_closed, field),
            getattr(fm_oracle, field),
            moment_tol,
            lines,
            scale=matrix_scale,
        )

    if "eta" in fixed:
        gamma = fixed.get("gamma", -0.5)
        if "eta_b" in fixed or spec.loss is LossKind.TWO_ARM:
            loss: Union[SingleArmLoss, TwoArmLoss] = TwoArmLoss(
                fixed["eta"],
                fixed.get("eta_b", fixed["eta"]),
                gamma,
                fixed.get("gamma_b", gamma),
            )
            cm_closed = c_matrix_two(oracle, loss)
        else:
            loss = SingleArmLoss(fixed["eta"], gamma)
            cm_closed = c_matrix_single(oracle, loss)
        cm_oracle = kraus_sum_cij(state, loss)
        cm_scale = max(abs(cm_oracle.f_pp), abs(cm_oracle.f_mm))
        for field in ("f_pp", "f_mm", "f_pm"):
            _check_line(
                f"kraus.{field}",
                getattr(cm_closed, field),
                getattr(cm_oracle, field),
                kraus_tol,
                lines,
                scale=cm_scale,
            )
        norm_sq = 1.0 - state.norm_deficit
        _check_line(
            "kraus.completeness",
            kraus_completeness(state, loss),
            norm_sq,
            _COMPLETENESS_TOL,
            lines,
            scale=1.0,
        )

    all_ok = True
    for ok, text in lines:
        flag = "PASS" if ok else "FAIL"
        print(f"[{flag}] {text}", file=out)
        all_ok = all_ok and ok
    print(
        f"oracle-check: {'all identities hold' if all_ok else 'FAILURES above'} "
        f"(cutoff {cutoff}, {len(lines)} checks)",
        file=out,
    )
    return all_ok


# ---------------------------------------------------------------------------
# argument handling


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad arguments; the contract reserves 2
    # for computation errors and 1 for invalid configuration
    def error(self, message: str) -> None:  # noqa: A003 - argparse API
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def _read_config(path: str) -> dict:
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as handle:
            return json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read configuration: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="phasebound",
        description=(
            "Phase-precision bounds for passive and amplifying two-mode "
            "interferometers under photon loss."
        ),
        epilog=(
            "Configuration JSON keys: interferometer (SU2|SU11), estimation "
            "(SingleParameter|TwoParameter), loss (None|OneArm|TwoArm), "
            "swept_variable (alpha_photons|eta|splitter_ratio|gain), range "
            "[start, stop, steps], fixed {alpha_photons, squeeze_r, "
            "splitter_ratio or gain, eta, eta_b, gamma, gamma_b}, repeats, "
            "and cutoff (oracle-check only). Flags override JSON fields."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("point", "evaluate one parameter point, emit a JSON record"),
        ("scan", "sweep one variable, emit CSV plus metadata JSON"),
        ("oracle-check", "verify closed forms against the Fock engine"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument(
            "--config",
            required=True,
            metavar="PATH|-",
            help="JSON configuration file, or - for standard input",
        )
        cmd.add_argument("--repeats", type=int, default=None, metavar="M")
        if name == "scan":
            cmd.add_argument("--output", required=True, metavar="PATH")
            cmd.add_argument("--jobs", type=int, default=1, metavar="N")
        if name == "point":
            cmd.add_argument("--output", default=None, metavar="PATH")
        if name == "oracle-check":
            cmd.add_argument(
                "--tolerance",
                type=float,
                default=None,
                metavar="REL",
                help="override the identity tolerances",
            )
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        document = _read_config(args.config)
        cutoff = int(document.pop("cutoff", 64))
        spec = load_spec(document, repeats_override=args.repeats)
    except (ConfigError, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "point":
        try:
            record = point_record(spec)
        except (PhaseboundError, ConfigError, ValueError) as exc:
            print(f"computation failed: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        text = json.dumps(
            {key: record[key] for key in CSV_COLUMNS}, indent=2, default=repr
        )
        if args.output:
            with open(args.output, "w") as handle:
                handle.write(text + "\n")
        else:
            print(text)
        return EXIT_OK

    if args.command == "scan":
        try:
            run_scan(spec, args.output, jobs=args.jobs)
        except ConfigError as exc:
            print(f"invalid configuration: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except OSError as exc:
            print(f"cannot write output: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        return EXIT_OK

    try:
        ok = oracle_check(spec, cutoff=cutoff, tolerance=args.tolerance)
    except (PhaseboundError, ConfigError, ValueError) as exc:
        print(f"oracle failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    return EXIT_OK if ok else EXIT_ORACLE


if __name__ == "__main__":
    raise SystemExit(main())
