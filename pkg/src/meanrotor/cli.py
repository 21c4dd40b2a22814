"""Command-line front end: every capability as a subcommand emitting plot-ready data.

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence
(or a failed internal cross-check), 4 parameter-regime violation.  Output
files start with a comment line recording the fully resolved configuration.
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .consistency import checkerboard_fixed_points, regime_grid
from .dynamics import integrate_flow
from .energy import (
    MINUS_INF,
    discretize_gibbs,
    free_energy,
    free_energy_rate,
    orbit_segment,
)
from .errors import (
    ConvergenceError,
    RegimeViolationError,
    SingularLinearizationError,
    StiffnessError,
)
from .ldp import lagrangian
from .model import ModelParams
from .simplex import dirac, equidistribution, fourier_mode
from .stability import equidistribution_jacobian, equidistribution_spectrum, match_spectra
from .stochastic import lln_error, round_to_counts, simulate_path
from .dynamics import vector_field

_SHARED_DEFAULTS = {
    "beta": 3.0,
    "q": 10,
    "nodes_per_arc": 32,
    "fp_tol": 1e-12,
    "ode_rtol": 1e-9,
    "ode_atol": 1e-9,
    "seed": 0,
    "out": None,
    "format": "csv",
}

_COMMAND_DEFAULTS = {
    "flow": {"nu0": "eq", "t_final": 10.0, "output_dt": 0.1},
    "orbit": {"theta": 0.0, "samples": None},
    "spectrum": {},
    "regimes": {
        "beta_min": 2.5, "beta_max": 100.0, "beta_steps": 40,
        "q_min": 3, "q_max": 100, "q_step": 1,
    },
    "lyapunov": {"theta": 0.0, "samples": 101, "s_max": 1.0},
    "simulate": {"nu0": "eq", "n_particles": 1000, "t_final": 1.0, "sample_dt": None},
    "lln": {"nu0": "eq", "n_list": "100,1000,10000", "seeds": 20, "t_final": 5.0},
    "lagrangian": {"nu": "eq", "u": "flow-velocity"},
    "checkerboard": {},
}


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is MINUS_INF:
        return "-inf"
    return f"{float(v):.17g}"


def _json_value(v):
    if v is MINUS_INF:
        return "-inf"
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return int(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def _emit(config: dict, columns: list[str], rows: list[list], out, fmt: str):
    if fmt == "json":
        doc = {
            "config": config,
            "columns": columns,
            "rows": [[_json_value(v) for v in row] for row in rows],
        }
        text = json.dumps(doc, indent=2) + "\n"
    else:
        lines = ["# config: " + json.dumps(config, sort_keys=True)]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(v if isinstance(v, str) else _fmt(v) for v in row))
        text = "\n".join(lines) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_state(spec: str, params: ModelParams) -> np.ndarray:
    if spec == "eq":
        return equidistribution(params.q)
    if spec.startswith("orbit:"):
        return discretize_gibbs(params, float(spec.split(":", 1)[1])).nu
    if spec.startswith("dirac:"):
        return dirac(params.q, int(spec.split(":", 1)[1]))
    if spec.startswith("mix:"):
        w = np.array([float(x) for x in spec.split(":", 1)[1].split(",")])
        if w.shape != (params.q,) or w.min() < 0 or w.sum() <= 0:
            raise ValueError(f"mix weights must be {params.q} nonnegative numbers")
        return w / w.sum()
    if spec.startswith("file:"):
        return _read_vector(spec.split(":", 1)[1], params.q)
    raise ValueError(f"unknown state spec {spec!r}; use eq, orbit:<theta>, dirac:<k>, mix:<w,..>, file:<path>")


def _parse_velocity(spec: str, params: ModelParams, nu: np.ndarray) -> np.ndarray:
    if spec == "flow-velocity":
        return vector_field(params, nu)
    if spec == "zero":
        return np.zeros(params.q)
    if spec.startswith("mode:"):
        _, j, amp = spec.split(":")
        return float(amp) * fourier_mode(params.q, int(j))
    if spec.startswith("file:"):
        u = _read_vector(spec.split(":", 1)[1], params.q, simplex=False)
        return u
    raise ValueError(f"unknown velocity spec {spec!r}; use flow-velocity, zero, mode:<j>:<amp>, file:<path>")


def _read_vector(path: str, q: int, simplex: bool = True) -> np.ndarray:
    with open(path) as fh:
        text = fh.read().strip()
    try:
        vals = np.array(json.loads(text), dtype=float)
    except json.JSONDecodeError:
        vals = np.array([float(x) for x in text.replace(",", " ").split()])
    if vals.shape != (q,):
        raise ValueError(f"{path} holds {vals.shape[0]} values, expected q = {q}")
    if simplex:
        if vals.min() < 0 or vals.sum() <= 0:
            raise ValueError(f"{path} is not a nonnegative weight vector")
        return vals / vals.sum()
    return vals


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meanrotor", description=__doc__)
    parser.add_argument("--version", action="version", version=f"meanrotor {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_shared(sp):
        sp.add_argument("--beta", type=float)
        sp.add_argument("--q", type=int)
        sp.add_argument("--nodes-per-arc", dest="nodes_per_arc", type=int)
        sp.add_argument("--fp-tol", dest="fp_tol", type=float)
        sp.add_argument("--rtol", dest="ode_rtol", type=float)
        sp.add_argument("--atol", dest="ode_atol", type=float)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", type=str)
        sp.add_argument("--format", choices=["csv", "json"])
        sp.add_argument("--config", type=str, help="JSON config file; flags override its values")

    sp = sub.add_parser("flow", help="integrate the simplex flow and write the trajectory")
    add_shared(sp)
    sp.add_argument("--nu0", type=str)
    sp.add_argument("--t-final", dest="t_final", type=float)
    sp.add_argument("--output-dt", dest="output_dt", type=float)

    sp = sub.add_parser("orbit", help="discretized Gibbs orbit point(s)")
    add_shared(sp)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--samples", type=int)

    sp = sub.add_parser("spectrum", help="analytic and numeric eigenvalues at the equidistribution")
    add_shared(sp)

    sp = sub.add_parser("regimes", help="closed-form (beta, q) regime grid")
    add_shared(sp)
    sp.add_argument("--beta-min", dest="beta_min", type=float)
    sp.add_argument("--beta-max", dest="beta_max", type=float)
    sp.add_argument("--beta-steps", dest="beta_steps", type=int)
    sp.add_argument("--q-min", dest="q_min", type=int)
    sp.add_argument("--q-max", dest="q_max", type=int)
    sp.add_argument("--q-step", dest="q_step", type=int)

    sp = sub.add_parser("lyapunov", help="free energy and its descent rate on the eq-to-orbit segment")
    add_shared(sp)
    sp.add_argument("--theta", type=float)
    sp.add_argument("--samples", type=int)
    sp.add_argument("--s-max", dest="s_max", type=float)

    sp = sub.add_parser("simulate", help="one finite-N jump path")
    add_shared(sp)
    sp.add_argument("--N", dest="n_particles", type=int)
    sp.add_argument("--nu0", type=str)
    sp.add_argument("--t-final", dest="t_final", type=float)
    sp.add_argument("--sample-dt", dest="sample_dt", type=float)

    sp = sub.add_parser("lln", help="sup-TV error of finite-N paths against the flow")
    add_shared(sp)
    sp.add_argument("--N", dest="n_list", type=str, help="comma-separated particle counts")
    sp.add_argument("--seeds", type=int, help="number of seeds (0..n-1)")
    sp.add_argument("--nu0", type=str)
    sp.add_argument("--t-final", dest="t_final", type=float)

    sp = sub.add_parser("lagrangian", help="pointwise rate-function density")
    add_shared(sp)
    sp.add_argument("--nu", type=str)
    sp.add_argument("--u", type=str)

    sp = sub.add_parser("checkerboard", help="fixed points of the antipodal constraint")
    add_shared(sp)
    return parser


def _resolve_config(args: argparse.Namespace) -> dict:
    defaults = dict(_SHARED_DEFAULTS)
    defaults.update(_COMMAND_DEFAULTS[args.command])
    resolved = dict(defaults)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            try:
                file_cfg = json.load(fh)
            except json.JSONDecodeError as err:
                raise ValueError(f"config file {args.config}: {err}") from err
        unknown = set(file_cfg) - set(defaults)
        if unknown:
            raise ValueError(f"config file {args.config}: unknown keys {sorted(unknown)}")
        resolved.update(file_cfg)
    for key in defaults:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    resolved["command"] = args.command
    return resolved


def _model(cfg: dict) -> ModelParams:
    for key in ("fp_tol", "ode_rtol", "ode_atol"):
        if not cfg[key] > 0:
            raise ValueError(f"{key} must be positive, got {cfg[key]}")
    return ModelParams(beta=cfg["beta"], q=cfg["q"], nodes_per_arc=cfg["nodes_per_arc"])


def _weight_columns(q: int, prefix: str = "w") -> list[str]:
    return [f"{prefix}{k}" for k in range(1, q + 1)]


def _cmd_flow(cfg: dict) -> list | None:
    params = _model(cfg)
    nu0 = _parse_state(cfg["nu0"], params)
    traj = integrate_flow(
        params, nu0, cfg["t_final"], output_dt=cfg["output_dt"],
        rtol=cfg["ode_rtol"], atol=cfg["ode_atol"], fp_tol=cfg["fp_tol"],
    )
    rows = [
        [t, *state, m[0], m[1]]
        for t, state, m in zip(traj.times, traj.states, traj.magnetizations)
    ]
    _emit(cfg, ["t", *_weight_columns(params.q), "Mx", "My"], rows, cfg["out"], cfg["format"])


def _cmd_orbit(cfg: dict):
    params = _model(cfg)
    if cfg["samples"]:
        thetas = 2.0 * np.pi * np.arange(cfg["samples"]) / cfg["samples"]
    else:
        thetas = [cfg["theta"]]
    rows = []
    for th in thetas:
        pt = discretize_gibbs(params, float(th))
        rows.append([pt.theta, *pt.nu, pt.m[0], pt.m[1]])
    _emit(cfg, ["theta", *_weight_columns(params.q), "Mx", "My"], rows, cfg["out"], cfg["format"])


def _cmd_spectrum(cfg: dict):
    params = _model(cfg)
    spec = equidistribution_spectrum(params)
    numeric = np.linalg.eigvals(equidistribution_jacobian(params))
    rows = [[j + 1, lam.real, lam.imag, "analytic"] for j, lam in enumerate(spec.eigenvalues)]
    rows += [[j + 1, lam.real, lam.imag, "numeric"] for j, lam in enumerate(numeric)]
    _emit(cfg, ["j", "re", "im", "source"], rows, cfg["out"], cfg["format"])
    mismatch = match_spectra(spec.eigenvalues, numeric)
    if mismatch > 1e-8:
        raise ConvergenceError(f"analytic/numeric spectra disagree by {mismatch:.3e} > 1e-8")


def _cmd_regimes(cfg: dict):
    betas = np.linspace(cfg["beta_min"], cfg["beta_max"], cfg["beta_steps"])
    qs = range(cfg["q_min"], cfg["q_max"] + 1, cfg["q_step"])
    rows = [
        [beta, q, label.uniqueness, label.non_uniqueness, label.equidistribution_attractive]
        for beta, q, label in regime_grid(betas, list(qs))
    ]
    _emit(cfg, ["beta", "q", "uniqueness", "non_uniqueness", "eq_attractive"],
          rows, cfg["out"], cfg["format"])


def _cmd_lyapunov(cfg: dict):
    params = _model(cfg)
    rows = []
    for s in np.linspace(0.0, cfg["s_max"], cfg["samples"]):
        nu = orbit_segment(params, float(s), cfg["theta"])
        psi = free_energy(params, nu).value
        rate = free_energy_rate(params, nu)
        rows.append([s, psi, rate])
    _emit(cfg, ["s", "psi", "dpsi_dt"], rows, cfg["out"], cfg["format"])


def _cmd_simulate(cfg: dict):
    params = _model(cfg)
    nu0 = _parse_state(cfg["nu0"], params)
    counts0 = round_to_counts(nu0, cfg["n_particles"])
    path = simulate_path(params, counts0, cfg["t_final"], cfg["seed"], fp_tol=cfg["fp_tol"])
    cols = ["t", *_weight_columns(params.q, "c")]
    if cfg["sample_dt"]:
        times = np.arange(0.0, cfg["t_final"] + 1e-12, cfg["sample_dt"])
        states = path.states_at(times)
        rows = [[t, *state] for t, state in zip(times, states)]
    else:
        rows = [[0.0, *path.initial_counts]]
        rows += [[t, *state] for t, state in zip(path.event_times, path.states[1:])]
    _emit(cfg, cols, rows, cfg["out"], cfg["format"])


def _cmd_lln(cfg: dict):
    params = _model(cfg)
    nu0 = _parse_state(cfg["nu0"], params)
    n_list = [int(x) for x in str(cfg["n_list"]).split(",")]
    table = lln_error(params, nu0, n_list, cfg["t_final"], seeds=range(cfg["seeds"]),
                      rtol=cfg["ode_rtol"], atol=cfg["ode_atol"])
    rows = [[n, seed, err] for n, seed, err in table.rows]
    _emit(cfg, ["N", "seed", "sup_tv"], rows, cfg["out"], cfg["format"])


def _cmd_lagrangian(cfg: dict):
    params = _model(cfg)
    nu = _parse_state(cfg["nu"], params)
    u = _parse_velocity(cfg["u"], params, nu)
    res = lagrangian(params, nu, u)
    cols = ["value", "converged", "gradient_norm", *[f"p{k}" for k in range(1, params.q + 1)]]
    _emit(cfg, cols, [[res.value, res.converged, res.gradient_norm, *res.maximizer]],
          cfg["out"], cfg["format"])


def _cmd_checkerboard(cfg: dict):
    params = _model(cfg)
    roots = checkerboard_fixed_points(params)
    _emit(cfg, ["m"], [[r] for r in roots], cfg["out"], cfg["format"])


_RUNNERS = {
    "flow": _cmd_flow,
    "orbit": _cmd_orbit,
    "spectrum": _cmd_spectrum,
    "regimes": _cmd_regimes,
    "lyapunov": _cmd_lyapunov,
    "simulate": _cmd_simulate,
    "lln": _cmd_lln,
    "lagrangian": _cmd_lagrangian,
    "checkerboard": _cmd_checkerboard,
}


def _error_record(err: Exception) -> str:
    return json.dumps(
        {
            "error": type(err).__name__,
            "module": type(err).__module__,
            "message": str(err),
        }
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        _RUNNERS[args.command](cfg)
    except (RegimeViolationError, SingularLinearizationError) as err:
        print(_error_record(err), file=sys.stderr)
        return 4
    except (ConvergenceError, StiffnessError, OverflowError) as err:
        print(_error_record(err), file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError) as err:
        print(_error_record(err), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
