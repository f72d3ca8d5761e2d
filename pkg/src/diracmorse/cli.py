"""Command-line front end.

All quantities are in atomic units (hbar = m = 1, c = 1/lambda_c); energies
epsilon are measured in units of mc^2 = 1/lambda_c^2, so bound states have
|epsilon| < 1 and scattering states |epsilon| > 1.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import bound, oracle, scatter, verify
from .errors import (ConvergenceError, DegenerateRecursionError, DomainError,
                     ThresholdDivergence)
from .model import ModelParams, x_of_z, z_of_x

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
FORMATS = ("csv", "json")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    A: float = 2.0
    omega: float = 0.5
    xi: float = 0.8
    lambda_c: float = 1.0
    energy: float | None = None
    alpha: float = 1.0
    n_terms: int = scatter.DEFAULT_N_TERMS
    state: str | None = None
    z_min: float = 0.5
    z_max: float = 20.0
    n_points: int = 100
    normalize: bool = False
    cesaro: int = 0
    only: list = field(default_factory=list)
    perturb_zeta: float = 0.0
    output: str | None = None
    format: str = "csv"

    def __post_init__(self):
        try:
            self.model = ModelParams(float(self.A), float(self.omega), float(self.xi), float(self.lambda_c))
        except (DomainError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha!r}")
        if int(self.n_terms) != self.n_terms or self.n_terms < 1:
            raise ConfigError(f"n_terms must be a positive integer, got {self.n_terms!r}")
        if self.cesaro < 0:
            raise ConfigError("cesaro must be >= 0")
        unknown = set(self.only) - set(verify.SUITES)
        if unknown:
            raise ConfigError(f"unknown suite(s) {sorted(unknown)}; choose from {list(verify.SUITES)}")

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        data = dict(data)
        model = data.pop("model", None)
        if model is not None:
            data.update(model)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        return cls(**data)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _num(v):
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render(cfg: RunConfig, columns: list, rows: list) -> str:
    if cfg.format == "json":
        results = [{c: _jsonable(v) for c, v in zip(columns, r)} for r in rows]
        return json.dumps({"config": cfg.to_dict(), "results": results}, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_num(v) for v in r])
    return buf.getvalue()


def emit(cfg: RunConfig, text: str):
    if cfg.output:
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

SPECTRUM_COLUMNS = ["n", "branch", "epsilon", "alpha_n", "valid", "shooting_epsilon", "abs_delta"]
SHOOT_MATCH_TOL = 1e-6


def spectrum_rows(cfg: RunConfig):
    """Closed-form states with the shooting oracle alongside; also reports unmatched valid states."""
    P = cfg.model
    states = bound.spectrum(P)
    shot = oracle.shoot_spectrum(P, (-1 + 1e-6, 1 - 1e-6)).energies
    rows, missing = [], []
    for s in states:
        se = delta = None
        if s.valid:
            if shot:
                se = min(shot, key=lambda e: abs(e - s.epsilon))
                delta = abs(se - s.epsilon)
            if delta is None or delta > SHOOT_MATCH_TOL:
                missing.append(s)
        rows.append([s.n, s.branch_symbol, s.epsilon, s.alpha_n, s.valid, se, delta])
    return rows, missing


def cmd_spectrum(cfg: RunConfig) -> int:
    rows, missing = spectrum_rows(cfg)
    emit(cfg, render(cfg, SPECTRUM_COLUMNS, rows))
    if missing:
        for s in missing:
            print(f"error: shooting did not reproduce state n={s.n}{s.branch_symbol} "
                  f"(epsilon={s.epsilon!r})", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _parse_state(P: ModelParams, text: str) -> bound.BoundState:
    text = text.strip()
    branch = bound.PLUS
    if text and text[-1] in "+-":
        branch = bound.PLUS if text[-1] == "+" else bound.MINUS
        text = text[:-1]
    try:
        n = int(text)
    except ValueError:
        raise ConfigError(f"state must look like '0+' or '2-', got {text!r}") from None
    for s in bound.spectrum(P):
        if s.n == n and s.branch == branch:
            if not s.valid:
                raise ConfigError(f"state {n}{s.branch_symbol} has alpha_n = {s.alpha_n:.6g} <= 0 "
                                  "and is not normalizable")
            return s
    raise ConfigError(f"no bound state n={n} (n_max = {bound.n_max(P)})")


def sample_grid(cfg: RunConfig) -> np.ndarray:
    if cfg.n_points < 1:
        raise ConfigError("the sampling grid is empty (n_points < 1)")
    if not 0 < cfg.z_min < cfg.z_max:
        raise ConfigError(f"need 0 < z_min < z_max, got z_min={cfg.z_min}, z_max={cfg.z_max}")
    P = cfg.model
    if cfg.n_points == 1:
        return np.array([float(x_of_z(P, cfg.z_min))])
    return np.linspace(float(x_of_z(P, cfg.z_max)), float(x_of_z(P, cfg.z_min)), cfg.n_points)


WAVEFUNCTION_COLUMNS = ["x", "z", "phi_upper", "theta_lower", "ode_residual"]


def wavefunction_rows(cfg: RunConfig):
    P = cfg.model
    if (cfg.state is None) == (cfg.energy is None):
        raise ConfigError("give exactly one of --state (bound) or --energy (scattering)")
    x = sample_grid(cfg)
    if cfg.state is not None:
        st = _parse_state(P, cfg.state)
        eps = st.epsilon
        fn = lambda t: bound.bound_spinor(P, st, z_of_x(P, t)).upper
        sample = bound.bound_spinor(P, st, z_of_x(P, x))
    else:
        eps = float(cfg.energy)
        if abs(eps) <= 1:
            raise ConfigError(f"energy {eps!r}: bound-state regime; use spectrum")
        args = (P, eps, cfg.alpha, cfg.n_terms)
        fn = lambda t: scatter.wavefunction(*args, t, cesaro=cfg.cesaro).upper
        sample = scatter.wavefunction(*args, x, normalize=cfg.normalize, cesaro=cfg.cesaro)
    res = oracle.ode_residual_profile(P, eps, fn, x)
    return [[xi, zi, u, l, r] for xi, zi, u, l, r in
            zip(x, z_of_x(P, x), sample.upper, sample.lower, res)]


def cmd_wavefunction(cfg: RunConfig) -> int:
    emit(cfg, render(cfg, WAVEFUNCTION_COLUMNS, wavefunction_rows(cfg)))
    return EXIT_OK


COEFFICIENT_COLUMNS = ["n", "f_n", "S_n"]


def coefficient_rows(cfg: RunConfig):
    if cfg.energy is None:
        raise ConfigError("coefficients needs --energy with |epsilon| > 1")
    eps = float(cfg.energy)
    if abs(eps) <= 1:
        raise ConfigError(f"energy {eps!r}: bound-state regime; use spectrum")
    sol = scatter.solve(cfg.model, eps, cfg.alpha, cfg.n_terms)
    ratio = [math.exp(0.5 * (math.lgamma(n + 2 * cfg.alpha) - math.lgamma(n + 1)))
             for n in range(cfg.n_terms)]
    return [[n, f, f / r] for n, (f, r) in enumerate(zip(sol.coefficients, ratio))]


def cmd_coefficients(cfg: RunConfig) -> int:
    emit(cfg, render(cfg, COEFFICIENT_COLUMNS, coefficient_rows(cfg)))
    return EXIT_OK


VERIFY_COLUMNS = ["suite", "check", "measured", "tolerance", "passed"]


def cmd_verify(cfg: RunConfig) -> int:
    checks = verify.run(cfg.model, only=cfg.only or None, zeta_shift=cfg.perturb_zeta)
    # the report goes to stderr only when stdout carries the JSON document
    report = sys.stderr if cfg.output is None and cfg.format == "json" else sys.stdout
    for c in checks:
        print(c.line(), file=report)
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed", file=report)
    if cfg.output or cfg.format == "json":
        rows = [[c.suite, c.name, c.measured, c.tol, c.passed] for c in checks]
        emit(cfg, render(cfg, VERIFY_COLUMNS, rows))
    return EXIT_OK if failed == 0 else EXIT_VERIFY


COMMANDS = {
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "coefficients": cmd_coefficients,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("problem")
    g.add_argument("--config", help="JSON config file; flags override its values")
    g.add_argument("--A", dest="A", type=float, help="potential strength (nonzero), V = -A exp(-omega x)")
    g.add_argument("--omega", type=float, help="range parameter (> 0)")
    g.add_argument("--xi", type=float, help="coupling scale (> 0)")
    g.add_argument("--lambda-c", dest="lambda_c", type=float, help="Compton wavelength 1/c (> 0)")
    o = common.add_argument_group("output")
    o.add_argument("--output", help="write results here instead of stdout")
    o.add_argument("--format", choices=FORMATS)

    parser = argparse.ArgumentParser(prog="diracmorse", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="bound-state energies with a shooting cross-check")

    wf = sub.add_parser("wavefunction", parents=[common], help="sampled spinor components")
    wf.add_argument("--state", help="bound state as n followed by + or -, e.g. 0+")
    wf.add_argument("--energy", type=float, help="scattering energy, |epsilon| > 1")
    wf.add_argument("--alpha", type=float, help="basis parameter alpha > 0 (scattering)")
    wf.add_argument("--n-terms", dest="n_terms", type=int, help="number of series terms")
    wf.add_argument("--z-min", dest="z_min", type=float)
    wf.add_argument("--z-max", dest="z_max", type=float)
    wf.add_argument("--n-points", dest="n_points", type=int)
    wf.add_argument("--normalize", action="store_true", default=None,
                    help="multiply the series by the energy normalization")
    wf.add_argument("--cesaro", type=int, help="Riesz mean order applied to the partial sums")

    co = sub.add_parser("coefficients", parents=[common], help="expansion coefficients f_n")
    co.add_argument("--energy", type=float)
    co.add_argument("--alpha", type=float)
    co.add_argument("--n-terms", dest="n_terms", type=int)

    ve = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    ve.add_argument("--only", action="append",
                    help=f"suite name(s), comma separated or repeated: {', '.join(verify.SUITES)}")
    ve.add_argument("--perturb-zeta", dest="perturb_zeta", type=float,
                    help="test hook: shift the basis parameter zeta (tridiagonality must fail)")
    return parser


def load_config(ns: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config!r}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data.pop("command", None)
    if "config" in data and "results" in data:
        data = data["config"]
    overrides = {k: v for k, v in vars(ns).items()
                 if k not in ("command", "config") and v is not None}
    if "only" in overrides:
        overrides["only"] = [s.strip() for item in overrides["only"] for s in item.split(",") if s.strip()]
    data = dict(data)
    data.update(data.pop("model", None) or {})
    data.update(overrides)
    return RunConfig.from_dict(data)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = load_config(ns)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[ns.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, ThresholdDivergence, DegenerateRecursionError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
