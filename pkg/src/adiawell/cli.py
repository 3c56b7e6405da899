"""Command-line front end: CSV emission for every computation in the package.

Each subcommand wraps one slice of the library behind flags and writes a
CSV table (header row first) to stdout or ``--out``.  All floating-point
output uses shortest round-trip formatting, computations are seed-free,
and sweep rows are reduced in input order, so repeated runs of the same
configuration produce byte-identical files.  The one exception is the
oracle's runtime telemetry column, which measures wall time.

Exit codes: 0 on success, 2 on validation or usage errors, 3 when the
numerics fail (no eigenvalue, continuation off its sheet, a quadrature or
linear solve giving up).

A ``--json-config FILE`` holding ``{"format_version": 1, "<flag>": value}``
can replace flags; explicit flags win over config values.  The worker pool
used for sweeps is capped by the ``ADIA_THREADS`` environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, branches, oracle, special, spectrum, symbolfield, wavefield
from .errors import AdiawellError
from .spectrum import ModelParams

__all__ = ["RunConfig", "run", "main"]

FORMAT_VERSION = 1

# default oracle grid: the documented validation run resolves the edge
# cell at dx = 0.02 and lands t1 exactly
_ORACLE_DX = 0.02
_ORACLE_DT = 0.005


class _Invalid(ValueError):
    """Bad parameter combination; mapped to exit code 2."""


# =====================================================================
# configuration plumbing
# =====================================================================

# per-subcommand parameter schema: dest -> python type expected in a JSON
# config (bool is unused; enums travel as strings)
_SCHEMA: dict[str, dict[str, type]] = {
    "special": {"fn": str, "z": str, "eps": float, "deriv": int, "side": int},
    "eigen": {"n": int, "tau": float, "tol": float},
    "field": {
        "eps": float, "n": int, "t": float, "x_min": float, "x_max": float,
        "x_steps": int, "method": str, "tol": float,
    },
    "compare": {
        "eps": float, "n": int, "t": float, "x_steps": int,
        "delta_reg": float, "tol": float,
    },
    "sweep": {
        "eps": str, "n": int, "tau": float, "check": str, "x": float,
        "xi": float, "tol": float,
    },
    "oracle": {
        "eps": float, "n": int, "t0": float, "t1": float, "x_max": float,
        "nx": int, "dt": float, "snap": str,
    },
}


@dataclass(frozen=True)
class RunConfig:
    """One validated invocation: subcommand, parameters, output path."""

    subcommand: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.format_version != FORMAT_VERSION:
            raise _Invalid(
                f"unsupported format_version {self.format_version!r}; "
                f"this build writes version {FORMAT_VERSION}"
            )
        eps = self.params.get("eps")
        for value in np.atleast_1d(eps if eps is not None else []):
            if not 0.0 < value < 1.0:
                raise _Invalid(f"eps must lie in (0, 1), got {value}")
        tol = self.params.get("tol")
        if tol is not None and tol < 0.0:
            raise _Invalid(f"tolerance must be nonnegative, got {tol}")
        for key in ("tau", "tau_final"):
            tau = self.params.get(key)
            if tau is not None and tau > 1.0:
                raise _Invalid(f"eps*t must stay <= 1, got {key}={tau}")


def _load_json_config(path: str, sub: str) -> dict:
    """Read a config file and check it against the subcommand's schema."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _Invalid(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise _Invalid("config must be a JSON object")
    version = raw.pop("format_version", None)
    if not isinstance(version, int) or isinstance(version, bool):
        raise _Invalid("config needs an integer format_version")
    if version != FORMAT_VERSION:
        raise _Invalid(f"unsupported config format_version {version}")
    schema = _SCHEMA[sub]
    merged = {}
    for key, value in raw.items():
        dest = key.replace("-", "_")
        if dest == "out":
            if not isinstance(value, str):
                raise _Invalid("config key 'out' must be a string")
            merged[dest] = value
            continue
        if dest not in schema:
            raise _Invalid(f"config key {key!r} not valid for '{sub}'")
        want = schema[dest]
        ok = isinstance(value, want) or (want is float and isinstance(value, int))
        if not ok or isinstance(value, bool):
            raise _Invalid(
                f"config key {key!r} must be {want.__name__}, got {value!r}"
            )
        merged[dest] = float(value) if want is float else value
    return merged


def _merge_config(args: argparse.Namespace) -> None:
    """Fill unset flags from the JSON config; flags always win."""
    if not getattr(args, "json_config", None):
        return
    merged = _load_json_config(args.json_config, args.subcommand)
    for dest, value in merged.items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            flag = "--" + name.replace("_", "-")
            raise _Invalid(f"{flag} is required (flag or config)")


def _validate(sub: str, **params) -> None:
    """Run the RunConfig invariants for this invocation."""
    RunConfig(sub, params)


# =====================================================================
# CSV emission
# =====================================================================


def _fmt(value) -> str:
    """Shortest round-trip text for one cell."""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _emit(header: list[str], rows: list[list], out: str | None) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _parse_complex_list(text: str) -> list[complex]:
    points = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            points.append(complex(token))
        except ValueError as exc:
            raise _Invalid(f"cannot parse complex value {token!r}") from exc
    if not points:
        raise _Invalid("--z needs at least one point")
    return points


def _parse_float_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise _Invalid(f"cannot parse float list {text!r}") from exc
    if not values:
        raise _Invalid("--eps needs at least one value")
    return values


# =====================================================================
# subcommands
# =====================================================================


def _cmd_special(args) -> tuple[list[str], list[list]]:
    _require(args, "fn", "z")
    points = _parse_complex_list(args.z)
    side = args.side if args.side is not None else 0
    deriv = args.deriv if args.deriv is not None else 0

    def needs_eps():
        if args.eps is None:
            raise _Invalid(f"--eps is required for --fn {args.fn}")
        return args.eps

    if args.fn in ("q0", "l0", "rho0"):
        fn = getattr(branches, args.fn)
        values = [fn(z, side=side) for z in points]
    elif args.fn == "L0":
        eps = needs_eps()
        values = [symbolfield.big_l0(z, eps, side=side).value for z in points]
    elif args.fn == "R0":
        eps = needs_eps()
        values = [symbolfield.r0(z, eps).value for z in points]
    elif args.fn == "transition":
        values = [special.f_transition(z) for z in points]
    elif args.fn == "a":
        for z in points:
            if z.imag != 0.0:
                raise _Invalid("--fn a takes real arguments only")
        values = [special.a_fn(z.real, deriv=deriv) for z in points]
    elif args.fn == "zeta":
        values = np.atleast_1d(special.zeta_fn(np.array(points, dtype=complex)))
    else:
        raise _Invalid(f"unknown --fn {args.fn!r}")
    return ["re", "im"], [[v.real, v.imag] for v in map(complex, values)]


def _cmd_eigen(args) -> tuple[list[str], list[list]]:
    _require(args, "n", "tau")
    _validate("eigen", tau=args.tau, tol=args.tol)
    tol = args.tol if args.tol is not None else 1e-13
    p = spectrum.p_n(args.n, args.tau, tol=tol)
    return ["p_n", "E_n", "dlnpn_dtau"], [
        [p, spectrum.e_n(args.n, args.tau), spectrum.dlnpn_dtau(args.n, args.tau)]
    ]


def _field_params(args) -> ModelParams:
    kwargs = {"eps": args.eps, "n": args.n}
    if args.tol is not None:
        kwargs["tol"] = args.tol
    return ModelParams(**kwargs)


def _cmd_field(args) -> tuple[list[str], list[list]]:
    _require(args, "eps", "n", "t")
    tau = args.eps * args.t
    _validate("field", eps=args.eps, tau=tau, tol=args.tol)
    params = _field_params(args)
    edge = 1.0 - tau
    x_min = args.x_min if args.x_min is not None else 0.0
    x_max = args.x_max if args.x_max is not None else edge
    steps = args.x_steps if args.x_steps is not None else 200
    if steps < 1:
        raise _Invalid("--x-steps must be at least 1")
    if x_max < x_min:
        raise _Invalid("--x-max must not be below --x-min")
    method = args.method if args.method is not None else "contour"
    xs = np.linspace(x_min, x_max, steps)

    if method == "contour":
        sample = wavefield.mode_solution(params, args.t, xs)
        psi = np.asarray(sample.psi)
        est = np.broadcast_to(np.asarray(sample.est_error), psi.shape)
    elif method == "series":
        if np.any(xs > edge):
            raise _Invalid("--method series evaluates inside the well only")
        psi = np.asarray(wavefield.fourier_mode(params, args.t, xs))
        probe = np.asarray(wavefield.fourier_mode(params, args.t, xs, samples=96))
        est = np.abs(psi - probe)
    else:
        raise _Invalid(f"unknown --method {method!r}")
    rows = [
        [x, tau, v.real, v.imag, e]
        for x, v, e in zip(xs, psi, est)
    ]
    return ["x", "tau", "re_psi", "im_psi", "est_error"], rows


def _cmd_compare(args) -> tuple[list[str], list[list]]:
    _require(args, "eps", "n", "t")
    tau = args.eps * args.t
    _validate("compare", eps=args.eps, tau=tau, tol=args.tol)
    params = _field_params(args)
    steps = args.x_steps if args.x_steps is not None else 200
    if steps < 1:
        raise _Invalid("--x-steps must be at least 1")
    xs = np.linspace(0.0, 1.0 - tau, steps)
    exact = np.asarray(wavefield.mode_solution(params, args.t, xs).psi)
    approx, label = asymptotics.best_leading(params, xs, args.t,
                                             delta_reg=args.delta_reg)
    approx = np.asarray(approx)
    rows = [
        [x, e.real, e.imag, a.real, a.imag, abs(e - a), label.value]
        for x, e, a in zip(xs, exact, approx)
    ]
    header = ["x", "re_exact", "im_exact", "re_asym", "im_asym",
              "abs_err", "regime"]
    return header, rows


def _sweep_point(check: str, eps: float, n: int, tau: float,
                 x: float | None, xi: float) -> float:
    """Asymptotics-vs-exact error for one eps; runs inside pool workers."""
    params = ModelParams(eps=eps, n=n)
    t = tau / eps
    edge = 1.0 - tau
    if check == "adiabatic":
        x_eval = x if x is not None else 0.7 * edge
        exact = complex(wavefield.mode_solution(params, t, np.array([x_eval])).psi[0])
        return abs(asymptotics.adiabatic_leading(params, x_eval, t) - exact)
    if check == "outside":
        x_eval = edge + xi
        exact = complex(wavefield.mode_outside(params, t, np.array([x_eval])).psi[0])
        return abs(asymptotics.outside_leading(params, x_eval, t) - exact) / abs(exact)
    if check == "transition":
        x_eval = x if x is not None else 0.7 * edge
        exact = complex(wavefield.mode_solution(params, t, np.array([x_eval])).psi[0])
        return abs(asymptotics.transition_leading(params, x_eval, t) - exact)
    raise _Invalid(f"unknown --check {check!r}")


def _worker_cap(n_jobs: int) -> int:
    raw = os.environ.get("ADIA_THREADS", "")
    try:
        cap = int(raw) if raw else (os.cpu_count() or 1)
    except ValueError as exc:
        raise _Invalid(f"ADIA_THREADS must be an integer, got {raw!r}") from exc
    return max(1, min(n_jobs, cap))


def _cmd_sweep(args) -> tuple[list[str], list[list]]:
    _require(args, "eps", "n", "check")
    eps_list = _parse_float_list(args.eps)
    if args.check == "transition" and args.tau is None:
        tau = spectrum.tau_threshold(args.n)
    else:
        _require(args, "tau")
        tau = args.tau
    _validate("sweep", eps=np.array(eps_list), tau=tau, tol=args.tol)
    xi = args.xi if args.xi is not None else 0.5

    jobs = [(args.check, eps, args.n, tau, args.x, xi) for eps in eps_list]
    workers = _worker_cap(len(jobs))
    if workers == 1:
        errs = [_sweep_point(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            errs = list(pool.map(_sweep_point, *zip(*jobs)))

    positive = [(e, err) for e, err in zip(eps_list, errs) if err > 0.0]
    if len(positive) >= 2:
        log_eps = np.log([e for e, _ in positive])
        log_err = np.log([err for _, err in positive])
        order = float(np.polyfit(log_eps, log_err, 1)[0])
    else:
        order = float("nan")
    rows = [[eps, err, order] for eps, err in zip(eps_list, errs)]
    return ["eps", "err", "order_fit"], rows


def _cmd_oracle(args) -> tuple[list[str], list[list]]:
    _require(args, "eps", "n", "t0", "t1")
    _validate("oracle", eps=args.eps, tau_final=args.eps * args.t1)
    if args.t1 < args.t0:
        raise _Invalid("--t1 must not be below --t0")
    params = ModelParams(eps=args.eps, n=args.n)
    x_max = args.x_max if args.x_max is not None else oracle.suggest_x_max(
        params, args.t1)
    nx = args.nx if args.nx is not None else int(np.ceil(x_max / _ORACLE_DX))
    dt = args.dt if args.dt is not None else _ORACLE_DT
    if nx < 2:
        raise _Invalid("--nx must be at least 2")
    if dt <= 0.0:
        raise _Invalid("--dt must be positive")
    snap = (oracle.SnapPolicy.NEAREST_NODE
            if args.snap == "nearest-node" else oracle.SnapPolicy.CELL_AVERAGE)
    grid = oracle.GridSpec(x_max=x_max, nx=nx, dt=dt, snap_policy=snap)
    report = oracle.propagate_report(params, args.t0, args.t1, grid)
    return ["deviation", "norm_drift", "runtime_ms"], [
        [report.deviation, report.norm_drift, report.runtime_ms]
    ]


_DISPATCH = {
    "special": _cmd_special,
    "eigen": _cmd_eigen,
    "field": _cmd_field,
    "compare": _cmd_compare,
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
}


# =====================================================================
# argument parsing and entry points
# =====================================================================


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adia",
        description="Shrinking-well mode evaluation, asymptotics, and oracle runs.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output CSV path (default stdout)")
    common.add_argument("--json-config", help="JSON file supplying parameters")

    sp = subs.add_parser("special", parents=[common],
                         help="evaluate branch and transition functions")
    sp.add_argument("--fn", choices=["q0", "l0", "rho0", "L0", "R0",
                                     "transition", "a", "zeta"])
    sp.add_argument("--z", help="comma-separated complex points")
    sp.add_argument("--eps", type=float, help="needed for L0 and R0")
    sp.add_argument("--deriv", type=int, choices=[0, 1, 2],
                    help="derivative order for --fn a")
    sp.add_argument("--side", type=int, choices=[-1, 0, 1],
                    help="boundary side for branch functions")

    eig = subs.add_parser("eigen", parents=[common],
                          help="bound-state momentum and energy at one tau")
    eig.add_argument("--n", type=int)
    eig.add_argument("--tau", type=float)
    eig.add_argument("--tol", type=float)

    fld = subs.add_parser("field", parents=[common],
                          help="evaluate the mode on an x grid")
    fld.add_argument("--eps", type=float)
    fld.add_argument("--n", type=int)
    fld.add_argument("--t", type=float)
    fld.add_argument("--x-min", type=float, dest="x_min")
    fld.add_argument("--x-max", type=float, dest="x_max")
    fld.add_argument("--x-steps", type=int, dest="x_steps")
    fld.add_argument("--method", choices=["contour", "series"])
    fld.add_argument("--tol", type=float)

    cmp_ = subs.add_parser("compare", parents=[common],
                           help="exact field against the regime asymptotics")
    cmp_.add_argument("--eps", type=float)
    cmp_.add_argument("--n", type=int)
    cmp_.add_argument("--t", type=float)
    cmp_.add_argument("--x-steps", type=int, dest="x_steps")
    cmp_.add_argument("--delta-reg", type=float, dest="delta_reg")
    cmp_.add_argument("--tol", type=float)

    swp = subs.add_parser("sweep", parents=[common],
                          help="asymptotic error across an eps list")
    swp.add_argument("--eps", help="comma-separated eps values")
    swp.add_argument("--n", type=int)
    swp.add_argument("--tau", type=float)
    swp.add_argument("--check", choices=["adiabatic", "outside", "transition"])
    swp.add_argument("--x", type=float, help="evaluation point inside the well")
    swp.add_argument("--xi", type=float, help="distance past the edge (outside)")
    swp.add_argument("--tol", type=float)

    orc = subs.add_parser("oracle", parents=[common],
                          help="propagate the mode and report the deviation")
    orc.add_argument("--eps", type=float)
    orc.add_argument("--n", type=int)
    orc.add_argument("--t0", type=float)
    orc.add_argument("--t1", type=float)
    orc.add_argument("--x-max", type=float, dest="x_max")
    orc.add_argument("--nx", type=int)
    orc.add_argument("--dt", type=float)
    orc.add_argument("--snap", choices=["cell-average", "nearest-node"])
    return parser


def run(argv: list[str] | None = None) -> int:
    """Parse argv, dispatch, and write CSV; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        _merge_config(args)
        header, rows = _DISPATCH[args.subcommand](args)
        _emit(header, rows, args.out)
    except _Invalid as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AdiawellError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0


def main() -> None:
    sys.exit(run())
