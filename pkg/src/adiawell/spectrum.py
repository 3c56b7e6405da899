"""Instantaneous bound-state data of the shrinking well.

The well has depth 1 on 0 <= x <= 1 - tau (Dirichlet wall at x = 0) and the
slow time is tau = eps * t.  Mode n exists while tau <= tau_n = 1 - pi*(n - 1/2)
and its momentum p_n(tau) in (0, 1] solves the dispersion relation

    (1 - tau) * p + arcsin(p) = pi * n,

with energy E_n = p_n**2 - 1.  At the threshold p_n(tau_n) = 1 and E_n
vanishes quadratically: E_n = -(tau_n - tau)**2 * (1 + O(tau_n - tau)); the
momentum is analytic across tau_n, so no integrable-singularity handling is
needed anywhere downstream.

Everything here is scalar-exact and array-friendly: the dispersion relation is
solved by bisection (the bracket [0, 1] is guaranteed, the slope
(1 - tau) + 1/sqrt(1 - p^2) is positive), vectorized over slow-time arrays for
the adiabatic-phase integrals.

The outside-the-well coordinate is xi = eps * (x - (1 - tau)); the momentum
continues to complex values there as the root p~_n(tau, xi) of

    (1 - tau) * p + arcsin(p) - i * p * xi / (2 * sqrt(1 - p^2)) = pi * n,

found by Newton continuation in xi from the real root, staying in the first
quadrant with Re sqrt(1 - p~^2) > 0 (the branch that makes the outside field
decay).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContinuationFailure, NoEigenvalue

__all__ = [
    "ModelParams",
    "SpaceTimePoint",
    "tau_threshold",
    "p_n",
    "e_n",
    "dlnpn_dtau",
    "int_e_n",
    "psi_n",
    "c_n_phase",
    "p_n_tilde",
]

_BISECT_ITERS = 64


@dataclass(frozen=True)
class ModelParams:
    """Slow-drive parameters: rate eps in (0, 1), mode index n >= 1."""

    eps: float
    n: int
    tol: float = 1e-13

    def __post_init__(self) -> None:
        if not (0.0 < self.eps < 1.0):
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.n < 1:
            raise ValueError(f"mode index must be >= 1, got {self.n}")


@dataclass(frozen=True)
class SpaceTimePoint:
    """A sample point (x, t) with the slow coordinates derived from eps."""

    x: float
    t: float
    eps: float

    @property
    def tau(self) -> float:
        return self.eps * self.t

    @property
    def xi(self) -> float:
        """Stretched distance past the well edge (negative inside)."""
        return self.eps * (self.x - (1.0 - self.tau))


def tau_threshold(n: int) -> float:
    """Slow time at which mode n stops existing: 1 - pi*(n - 1/2)."""
    return 1.0 - np.pi * (n - 0.5)


def _p_n_raw(n: int, tau: np.ndarray) -> np.ndarray:
    """Vectorized bisection for the dispersion relation; tau <= tau_n assumed."""
    target = np.pi * n
    lo = np.zeros_like(tau)
    hi = np.ones_like(tau)
    one_m_tau = 1.0 - tau
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        low_side = one_m_tau * mid + np.arcsin(mid) < target
        lo = np.where(low_side, mid, lo)
        hi = np.where(low_side, hi, mid)
    return 0.5 * (lo + hi)


def p_n(n: int, tau, tol: float = 1e-13):
    """Bound-state momentum p_n(tau) in (0, 1]; NoEigenvalue past threshold."""
    tau_arr = np.asarray(tau, dtype=float)
    scalar = np.ndim(tau) == 0
    thr = tau_threshold(n)
    if np.any(tau_arr > thr + 1e-12):
        raise NoEigenvalue(
            f"mode n={n} only exists for tau <= {thr:.6f}, got tau={tau_arr.max():.6f}"
        )
    out = _p_n_raw(n, np.minimum(np.atleast_1d(tau_arr), thr)).reshape(tau_arr.shape)
    return float(out) if scalar else out


def e_n(n: int, tau):
    """Bound-state energy E_n(tau) = p_n**2 - 1 (negative below threshold)."""
    p = p_n(n, tau)
    return p * p - 1.0


def dlnpn_dtau(n: int, tau):
    """Logarithmic slope of the momentum, d ln p_n / d tau.

    Implicit differentiation of the dispersion relation gives
    1 / [(1 - tau) + (1 - p^2)^{-1/2}]; it is computed in the rearranged form
    sqrt(1-p^2) / [(1-tau) sqrt(1-p^2) + 1], which stays finite at the
    threshold where the slope vanishes linearly in tau_n - tau.
    """
    p = p_n(n, tau)
    tau_arr = np.asarray(tau, dtype=float)
    root = np.sqrt(np.maximum(1.0 - p * p, 0.0))
    return root / ((1.0 - tau_arr) * root + 1.0)


def int_e_n(n: int, tau_lo: float, tau_hi: float) -> float:
    """Integral of E_n over [tau_lo, tau_hi] by composite Gauss-Legendre.

    Both endpoints must be <= tau_n.  The integrand is smooth up to and
    including the threshold (quadratic zero), so fixed panels converge fast.
    """
    if tau_hi == tau_lo:
        return 0.0
    nodes, weights = np.polynomial.legendre.leggauss(20)
    n_panels = max(4, int(np.ceil(abs(tau_hi - tau_lo) / 0.1)))
    edges = np.linspace(tau_lo, tau_hi, n_panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
    half = 0.5 * (edges[1:] - edges[:-1])[:, None]
    ts = mid + half * nodes[None, :]
    vals = e_n(n, ts.ravel()).reshape(ts.shape)
    return float(np.sum(half * vals * weights[None, :]))


def psi_n(n: int, tau, x):
    """Instantaneous eigenfunction: sin(p_n x) inside, decaying tail outside.

    Continuously differentiable across the edge x = 1 - tau by construction;
    the outside amplitude carries the sign (-1)^{n+1} and factor p_n.
    """
    p = p_n(n, tau)
    x_arr = np.asarray(x, dtype=float)
    scalar = np.ndim(x) == 0 and np.ndim(tau) == 0
    edge = 1.0 - np.asarray(tau, dtype=float)
    decay = np.sqrt(np.maximum(1.0 - p * p, 0.0))
    inside = np.sin(p * x_arr)
    outside = (-1.0) ** (n + 1) * p * np.exp(-decay * np.maximum(x_arr - edge, 0.0))
    out = np.where(x_arr <= edge, inside, outside)
    return float(out) if scalar else out


def c_n_phase(params: ModelParams) -> complex:
    """Fixed phase exp((i/eps)(2 tau_n - 3) + i pi/4) carried by mode n."""
    thr = tau_threshold(params.n)
    return complex(np.exp(1j * (2.0 * thr - 3.0) / params.eps + 1j * np.pi / 4.0))


# =====================================================================
# complex continuation for the outside field
# =====================================================================


def _tilde_residual(p: complex, n: int, tau: float, xi: float) -> complex:
    return (1.0 - tau) * p + np.arcsin(p) - 0.5j * p * xi / np.sqrt(1.0 - p * p) - np.pi * n


def _tilde_slope(p: complex, tau: float, xi: float) -> complex:
    root = np.sqrt(1.0 - p * p)
    return (1.0 - tau) + 1.0 / root - 0.5j * xi / root**3


def p_n_tilde(n: int, tau: float, xi: float, tol: float = 1e-13) -> complex:
    """Momentum continued to the outside coordinate xi >= 0.

    Newton continuation in xi from the real root p_n(tau); the step is halved
    until every Newton solve converges.  The root must stay in the closed
    first quadrant with Re sqrt(1 - p~^2) > 0, else ContinuationFailure.
    """
    if xi < 0.0:
        raise ContinuationFailure("xi must be >= 0 (outside the well)")
    p = complex(p_n(n, tau))
    if xi == 0.0:
        return p
    done = 0.0
    step = max(xi / 8.0, min(xi, 0.25))
    while done < xi:
        target = min(xi, done + step)
        trial = p
        ok = False
        for _ in range(50):
            f = _tilde_residual(trial, n, tau, target)
            if abs(f) < tol:
                ok = True
                break
            trial = trial - f / _tilde_slope(trial, tau, target)
            if not (np.isfinite(trial.real) and np.isfinite(trial.imag)):
                break
        if ok and trial.real > 0.0 and trial.imag > -1e-12:
            p, done = trial, target
            continue
        step *= 0.5
        if step < 1e-8 * max(1.0, xi):
            raise ContinuationFailure(
                f"Newton continuation stalled at xi={done:.3g} of {xi:.3g} "
                f"(n={n}, tau={tau:.3g})"
            )
    if np.sqrt(1.0 - p * p).real <= 0.0:
        raise ContinuationFailure("continued root left the decaying branch")
    return p
