"""The slow-drive resummation layer: L0, L1, their period part, and amplitudes.

Problem
-------
The drive enters the exact mode integrals through functions defined by a
smoothing of the branch functions over the fast scale eps:

    L0(p) = (pi/2) * int sech^2(pi s) * l0(p + i eps s) ds        (same for l1)

which satisfy the difference equations L(p + eps/2) - L(p - eps/2) =
eps * l'(p) and reduce to l0/l1 up to O(eps^2) away from the branch points.
Derived objects: R0(p) = exp((i/eps) int_0^p L0), its boundary restriction,
the amplitude A(p) = exp((i/eps) int_0^p (L0 - l0)), and the eps-periodic
difference P = L0 - L1 in the upper half plane.

Evaluation strategy
-------------------
* Straight vertical kernel contour whenever it stays clear of the cuts:
  a single fixed trapezoid ladder (step 0.1, truncated at |s| = 8) is
  spectrally accurate because the integrand is analytic in a strip of
  half-width >= 0.45 around the real s-axis there (kernel poles sit at
  s = +-i/2, the branch-point preimages at vertical distance
  (1 - |Re p|)/eps).
* When the straight contour would cross a cut (|Re p| >= 1 with
  |Im p| <~ 6.5 eps for L0; Re p <= 1 for L1), the evaluation point is
  relocated horizontally by an integer number of eps steps using the exact
  difference equation, e.g.

      L0(p) = L0(p - M eps) + eps * sum_{j=1..M} l0'(p - (j - 1/2) eps),

  placing the kernel anchor near Re p = +-0.5 where the straight ladder is
  valid.  This is an identity, not an approximation: no clearance tuning, no
  pole dodging.  (A requested BentVertical contour is honored through this
  relocation; the result is the same analytic continuation.)
* In the thin collar 1 - |Re p| < 0.45 eps (inside the strip, hugging a
  branch point) the ladder loses its analyticity margin; there the kernel
  integral is done with Gauss-Legendre panels geometrically graded toward
  the singular direction.
* The amplitude on the upper edge of [1, inf) - needed by the post-threshold
  contour - is computed by quadrature on one eps-period past p = 1 and then
  propagated exactly by A(p + eps) = rho0(p + eps/2) A(p) *
  exp((i/eps)(int_l0(p) - int_l0(p + eps))), which follows from the R0
  difference equation.  The period part P is Fourier-analyzed on a line at
  height eps/2 where its coefficients are still above the quadrature noise.

All heavy entry points are vectorized over arrays of evaluation points and
share one batched kernel call; scalar wrappers return a QuadratureReport with
an honest error estimate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .branches import _l0_raw, _l1_raw, _q0_raw, int_l0, l0_prime, l1_prime, rho0
from .errors import ContourClash, QuadratureFailure

__all__ = [
    "ContourSpec",
    "QuadratureReport",
    "big_l0",
    "big_l1",
    "periodic_p",
    "periodic_p_fourier",
    "r0",
    "r_boundary",
    "amplitude_a",
    "amplitude_along",
    "upper_edge_amplitude",
]

# ---------------------------------------------------------------------
# kernel ladder constants
# ---------------------------------------------------------------------

_S_MAX = 8.0          # kernel truncation; sech^2(pi*8) ~ 4e-22
_S_STEP = 0.1         # trapezoid step; strip half-width 0.45 -> err ~ 5e-13
_CROSS_S = 6.5        # relocate if a cut crossing is within this many eps
_COLLAR_D = 0.45      # s-plane analyticity margin below which panels grade

_S_GRID = np.arange(-int(round(_S_MAX / _S_STEP)), int(round(_S_MAX / _S_STEP)) + 1) * _S_STEP
_KERNEL_W = 0.5 * np.pi * _S_STEP / np.cosh(np.pi * _S_GRID) ** 2

_GL6_X, _GL6_W = np.polynomial.legendre.leggauss(6)
_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)
_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)

_REGULAR_EST = 5e-12
_COLLAR_EST = 2e-9


@dataclass(frozen=True)
class ContourSpec:
    """A concrete integration contour.

    kind is one of 'VerticalLine', 'BentVertical' (kernel ladders),
    'Ray', 'SteepestDescent' (mode-integral contours; built in wavefield).
    anchor is the point the contour is attached to; nodes, when present,
    are the polyline vertices actually used; truncation_height is the
    parameter extent at which the tails were dropped.
    """

    kind: Literal["VerticalLine", "BentVertical", "Ray", "SteepestDescent"]
    anchor: complex
    nodes: tuple[complex, ...] | None = None
    truncation_height: float = _S_MAX


@dataclass(frozen=True)
class QuadratureReport:
    """Value of a quadrature together with an error estimate and node count."""

    value: complex
    est_error: float
    nodes_used: int


# =====================================================================
# batched kernel evaluation of L0 / L1
# =====================================================================


def _family_raw(fam: int):
    return _l0_raw if fam == 0 else _l1_raw


def _kernel_straight(fam: int, z: np.ndarray, eps: float, side) -> np.ndarray:
    """Trapezoid ladder for anchors whose vertical contour clears the cuts."""
    args = z[:, None] + 1j * eps * _S_GRID[None, :]
    side_b = np.broadcast_to(np.asarray(side), z.shape)[:, None]
    vals = _family_raw(fam)(args, np.broadcast_to(side_b, args.shape))
    return vals @ _KERNEL_W


def _kernel_graded(fam: int, z: complex, eps: float, side: int, d_s: float, c: float) -> complex:
    """Panel ladder for collar anchors: graded toward the singular column c."""
    sigma = max(d_s, 1e-4)
    cuts = {-_S_MAX, _S_MAX}
    lo, hi = max(c - 1.0, -_S_MAX), min(c + 1.0, _S_MAX)
    cuts.update((lo, hi))
    d = sigma
    while d < 1.0:
        for s in (c - d, c + d):
            if -_S_MAX < s < _S_MAX:
                cuts.add(s)
        d *= 2.0
    if -_S_MAX < c < _S_MAX:
        cuts.add(c)
    s = lo - 1.0
    while s > -_S_MAX:
        cuts.add(s)
        s -= 1.0
    s = hi + 1.0
    while s < _S_MAX:
        cuts.add(s)
        s += 1.0
    pts = np.array(sorted(cuts))
    mids = 0.5 * (pts[:-1] + pts[1:])
    halfs = 0.5 * (pts[1:] - pts[:-1])
    nodes = mids[:, None] + halfs[:, None] * _GL16_X[None, :]
    args = z + 1j * eps * nodes
    vals = _family_raw(fam)(args, np.full(args.shape, side))
    kern = 0.5 * np.pi / np.cosh(np.pi * nodes) ** 2
    return complex(np.sum(halfs[:, None] * _GL16_W[None, :] * kern * vals))


def _big_l_values(fam: int, p, eps: float, side=0) -> np.ndarray:
    """L0 (fam=0) or L1 (fam=1) on an array of points, cuts handled exactly."""
    z = np.atleast_1d(np.asarray(p, dtype=complex)).copy()
    side_arr = np.broadcast_to(np.asarray(side), z.shape).copy()
    a, b = z.real, z.imag

    if fam == 0:
        crossing = (np.abs(a) >= 1.0) & (np.abs(b) <= _CROSS_S * eps)
        sgn = np.where(a >= 0.0, 1.0, -1.0)
        m_steps = np.where(crossing, np.ceil((np.abs(a) - 0.5) / eps), 0).astype(int)
    else:
        crossing = (a <= 1.0) & (np.abs(b) <= _CROSS_S * eps)
        sgn = np.where(crossing, -1.0, 1.0)  # always shift right
        m_steps = np.where(crossing, np.ceil((1.5 - a) / eps), 0).astype(int)

    # telescoping the difference equation: with anchor q = p - s M eps,
    # L(p) = L(q) + s * eps * sum_{j=1..M} l'(p - s (j - 1/2) eps)
    corr = np.zeros_like(z)
    if np.any(crossing):
        deriv = l0_prime if fam == 0 else l1_prime
        m_max = int(m_steps.max())
        for j in range(1, m_max + 1):
            mask = m_steps >= j
            mids = z[mask] - sgn[mask] * (j - 0.5) * eps
            corr[mask] += sgn[mask] * eps * np.asarray(deriv(mids, side_arr[mask]))
        z = z - sgn * m_steps * eps
        a = z.real

    # analyticity margin of the straight ladder, in s units
    if fam == 0:
        d_s = np.where(np.abs(a) < 1.0, (1.0 - np.abs(a)) / eps, np.inf)
        col = -b / eps
    else:
        d_s = np.where(a > 1.0, (a - 1.0) / eps, np.inf)
        col = -b / eps
    # the graded ladder only pays off while the singular column still carries
    # kernel weight; past _CROSS_S eps from the axis that weight is ~1e-17
    collar = (d_s < _COLLAR_D) & (np.abs(b) <= _CROSS_S * eps)

    out = np.zeros_like(z)
    regular = ~collar
    if np.any(regular):
        out[regular] = _kernel_straight(fam, z[regular], eps, side_arr[regular])
    for idx in np.nonzero(collar)[0]:
        out[idx] = _kernel_graded(
            fam, complex(z[idx]), eps, int(side_arr[idx]), float(d_s[idx]), float(col[idx])
        )
    return out + corr


def big_l0(p, eps: float, side=0, contour: ContourSpec | None = None) -> QuadratureReport:
    """Smoothed branch function L0(p); see module docstring for the method.

    An explicit contour may force 'VerticalLine' (straight ladder, rejected if
    it would cross a cut) or 'BentVertical' (realized via the exact
    relocation); mode-integral contour kinds are rejected.
    """
    _check_kernel_contour(contour, p, eps, fam=0)
    val = _big_l_values(0, p, eps, side)
    est = _estimate_l_error(0, p, eps)
    return QuadratureReport(complex(val[0]), est, _S_GRID.size)


def big_l1(p, eps: float, side=0, contour: ContourSpec | None = None) -> QuadratureReport:
    """Smoothed continuation L1(p) on the plane cut along (-inf, 1]."""
    _check_kernel_contour(contour, p, eps, fam=1)
    val = _big_l_values(1, p, eps, side)
    est = _estimate_l_error(1, p, eps)
    return QuadratureReport(complex(val[0]), est, _S_GRID.size)


def _check_kernel_contour(contour: ContourSpec | None, p, eps: float, fam: int) -> None:
    if contour is None:
        return
    if contour.kind in ("Ray", "SteepestDescent"):
        raise ContourClash(f"{contour.kind} is a mode-integral contour, not a kernel ladder")
    if contour.kind == "VerticalLine":
        a = float(np.real(p))
        blocked = (abs(a) >= 1.0) if fam == 0 else (a <= 1.0)
        if blocked and abs(float(np.imag(p))) <= _CROSS_S * eps:
            raise ContourClash(
                "a straight vertical ladder through this point crosses a cut; "
                "use BentVertical (exact relocation) or the default"
            )


def _estimate_l_error(fam: int, p, eps: float) -> float:
    a = abs(float(np.real(p))) if fam == 0 else float(np.real(p))
    b = abs(float(np.imag(p)))
    if fam == 0:
        inside = a < 1.0
        margin = (1.0 - a) / eps if inside else np.inf
        relocated = (a >= 1.0) and (b <= _CROSS_S * eps)
    else:
        margin = (a - 1.0) / eps if a > 1.0 else np.inf
        relocated = (a <= 1.0) and (b <= _CROSS_S * eps)
    if relocated:
        return _REGULAR_EST + 1e-15 * (a + 1.0) / eps
    if margin < _COLLAR_D:
        return _COLLAR_EST
    return _REGULAR_EST


# =====================================================================
# the eps-periodic part P = L0 - L1
# =====================================================================


def periodic_p(p, eps: float) -> QuadratureReport:
    """P(p) = L0(p) - L1(p), analytic and eps-periodic for Im p > 0."""
    if float(np.imag(p)) <= 0.0:
        raise ContourClash("periodic part is defined in the open upper half plane")
    v0 = _big_l_values(0, p, eps)
    v1 = _big_l_values(1, p, eps)
    return QuadratureReport(complex(v0[0] - v1[0]), 2 * _REGULAR_EST, 2 * _S_GRID.size)


def periodic_p_fourier(eps: float, k_max: int = 6) -> np.ndarray:
    """First k_max Fourier coefficients P_k of P on its period.

    Sampling happens on the line Im p = eps/2, where the coefficients are
    damped by exp(-pi k) but the quadrature noise (~1e-13) is still far below
    them for k <= 8; past that the extraction is hopeless and ValueError says
    so.  Returns the array [P_1, ..., P_k_max] in the convention
    P(p) = sum_k P_k exp(2 pi i k (p - 1 - eps/2) / eps).
    """
    if not 1 <= k_max <= 8:
        raise ValueError("k_max must be between 1 and 8 (noise floor)")
    m = 256
    height = 0.5 * eps
    base = 1.0 + 0.5 * eps + 1j * height
    samples = base + eps * np.arange(m) / m
    vals = _big_l_values(0, samples, eps) - _big_l_values(1, samples, eps)
    coef = np.fft.fft(vals) / m
    k = np.arange(1, k_max + 1)
    return coef[1 : k_max + 1] * np.exp(2.0 * np.pi * k * height / eps)


# =====================================================================
# path integrals of (i/eps)(L0 - l0) and the derived amplitudes
# =====================================================================


def _partial_integral_matrix(nodes: np.ndarray) -> np.ndarray:
    """B[j, m] = int_{-1}^{nodes[j]} of the m-th Lagrange basis polynomial."""
    k = nodes.size
    v = np.vander(nodes, k, increasing=True)
    inv = np.linalg.inv(v)  # column m: monomial coefficients of basis m
    powers = np.arange(1, k + 1)
    upper = nodes[:, None] ** powers[None, :] / powers[None, :]
    lower = (-1.0) ** powers / powers
    anti = upper - lower[None, :]
    return anti @ inv


_B6 = _partial_integral_matrix(_GL6_X)


@dataclass(frozen=True)
class PathQuadrature:
    """Cumulative integral of (i/eps)(L0 - l0) along a polyline.

    lnA values are relative to the first vertex; gauss-level values allow
    amplitude evaluation at the integrand nodes of the outer mode integral.
    """

    points: np.ndarray
    gauss: np.ndarray
    lnA_points: np.ndarray
    lnA_gauss: np.ndarray
    est_error: float


def _g_values(q: np.ndarray, eps: float, side) -> np.ndarray:
    """(i/eps) * (L0(q) - l0(q)) batched."""
    shape = q.shape
    flat = q.ravel()
    side_flat = np.broadcast_to(np.asarray(side), shape).ravel()
    big = _big_l_values(0, flat, eps, side_flat)
    small = _l0_raw(flat, side_flat)
    return ((1j / eps) * (big - small)).reshape(shape)


def _cumulative_on_polyline(points: np.ndarray, eps: float, side) -> PathQuadrature:
    seg_a = points[:-1]
    seg_b = points[1:]
    mid = 0.5 * (seg_a + seg_b)
    half = 0.5 * (seg_b - seg_a)
    gauss = mid[:, None] + half[:, None] * _GL6_X[None, :]
    g = _g_values(gauss, eps, side)
    inc = half * (g @ _GL6_W)
    lnA_points = np.concatenate([[0.0 + 0.0j], np.cumsum(inc)])
    lnA_gauss = lnA_points[:-1, None] + half[:, None] * (g @ _B6.T)
    return PathQuadrature(points, gauss, lnA_points, lnA_gauss, 0.0)


def path_cumulative(
    points: Sequence[complex] | np.ndarray, eps: float, side=0, refine: bool = True
) -> PathQuadrature:
    """Integrate (i/eps)(L0 - l0) cumulatively along the polyline `points`.

    With refine=True a second pass at doubled resolution supplies the error
    estimate (and the finer value is returned).
    """
    pts = np.asarray(points, dtype=complex)
    if pts.ndim != 1 or pts.size < 2:
        raise ValueError("need at least two polyline vertices")
    coarse = _cumulative_on_polyline(pts, eps, side)
    if not refine:
        return coarse
    dense = np.empty(2 * pts.size - 1, dtype=complex)
    dense[0::2] = pts
    dense[1::2] = 0.5 * (pts[:-1] + pts[1:])
    fine = _cumulative_on_polyline(dense, eps, side)
    est = float(np.max(np.abs(fine.lnA_points[0::2] - coarse.lnA_points)))
    return PathQuadrature(pts, fine.gauss, fine.lnA_points[0::2], fine.lnA_gauss, est)


def _route_from_origin(p: complex) -> np.ndarray:
    """A polyline from 0 to p staying inside C0 (p off the cuts).

    Vertex spacing shrinks with the distance to the branch points at +-1 so
    the quadrature resolves the eps-scale structure when the route grazes or
    ends near a tip.
    """
    a, b = p.real, p.imag
    if b == 0.0 and abs(a) >= 1.0:
        raise ContourClash("point lies on a cut; use the upper-edge entry points")
    length = abs(p)
    if length == 0.0:
        raise ValueError("route target must differ from the origin")
    direction = p / length
    pts = [0.0 + 0.0j]
    t = 0.0
    while t < length:
        here = direction * t
        d_tip = min(abs(here - 1.0), abs(here + 1.0))
        step = min(0.25, max(0.3 * d_tip, 1e-9))
        t = min(t + step, length)
        pts.append(direction * t)
    return np.array(pts, dtype=complex)


def amplitude_a(p, eps: float) -> QuadratureReport:
    """A(p) = exp((i/eps) int_0^p (L0 - l0)) for p off the cuts.

    Points on the upper edge of [1, inf) are served by upper_edge_amplitude.
    """
    z = complex(p)
    if z == 0.0:
        return QuadratureReport(1.0 + 0.0j, 0.0, 0)
    if z.imag == 0.0 and z.real >= 1.0:
        val = upper_edge_amplitude(eps, np.array([z.real]))[0]
        return QuadratureReport(complex(val), 5e-10, 0)
    path = path_cumulative(_route_from_origin(z), eps)
    return QuadratureReport(
        complex(np.exp(path.lnA_points[-1])),
        float(2.0 * path.est_error) + 1e-12,
        path.gauss.size,
    )


def r0(p, eps: float) -> QuadratureReport:
    """R0(p) = exp((i/eps) int_0^p L0) = A(p) exp((i/eps) int_l0(p))."""
    z = complex(p)
    if z.imag == 0.0 and abs(z.real) >= 1.0:
        x = abs(z.real)  # R0 is even
        amp = upper_edge_amplitude(eps, np.array([x]))[0]
        val = amp * np.exp(1j / eps * int_l0(x, side=1))
        return QuadratureReport(complex(val), 5e-10, 0)
    rep = amplitude_a(z, eps)
    val = rep.value * np.exp(1j / eps * int_l0(z))
    return QuadratureReport(complex(val), rep.est_error, rep.nodes_used)


def r_boundary(p, eps: float) -> QuadratureReport:
    """Boundary values of R0 on the real axis (upper edge, evenness used)."""
    x = abs(float(np.real(p)))
    if float(np.imag(p)) != 0.0:
        raise ContourClash("r_boundary is the real-axis restriction; use r0 off axis")
    if x < 1.0:
        return r0(x, eps)
    amp = upper_edge_amplitude(eps, np.array([x]))[0]
    val = amp * np.exp(1j / eps * int_l0(x, side=1))
    return QuadratureReport(complex(val), 5e-10, 0)


# =====================================================================
# the upper edge of [1, inf): one-period quadrature + exact recursion
# =====================================================================

_BASE01_CACHE: dict[float, complex] = {}
_EDGE_PART_CACHE: dict[tuple[float, float], complex] = {}


def _lnA_at_one(eps: float) -> complex:
    """(i/eps) int_0^1 (L0 - l0) with panels graded into the eps-structure.

    The integrand is analytic on [0, 1) but carries a bounded sqrt cusp at 1
    (the branch function does, the smoothed one does not), so the grading has
    to run geometrically all the way down to ~1e-9 for the endpoint panels to
    lose their algebraic error.
    """
    if eps in _BASE01_CACHE:
        return _BASE01_CACHE[eps]
    pts = [0.0, 0.35, 0.7]
    d = min(4.0 * eps, 0.28)
    pts.append(1.0 - d)
    while d > 1e-9:
        d *= 0.5
        pts.append(1.0 - d)
    pts.append(1.0)
    path = path_cumulative(np.array(pts, dtype=complex), eps, refine=True)
    out = complex(path.lnA_points[-1])
    _BASE01_CACHE[eps] = out
    return out


def _geometric_leg(a: complex, b: complex, scale_at_a: float, coarse: float) -> list[complex]:
    """Vertices from a to b whose spacing grows geometrically away from a."""
    length = abs(b - a)
    direction = (b - a) / length
    pts = [a]
    d = scale_at_a
    while d < length:
        pts.append(a + direction * d)
        d = min(d * 2.0, d + coarse)
    pts.append(b)
    return pts


def _int_g_first_period(eps: float, frac_targets: np.ndarray) -> np.ndarray:
    """int_1^{1+frac} of (i/eps)(L0 - l0), boundary values from above.

    The edge carries inverse-sqrt singularities at 1 + (l + 1/2) eps, so the
    straight edge segment cannot be integrated through them.  Instead each
    target is reached by a polyline through the upper half plane (up from 1,
    across at height 0.45 eps, down onto the target), where the integrand is
    analytic; only the two endpoint approaches need geometric grading (a
    bounded sqrt cusp at 1, smooth but eps-scale structure above the target).
    Targets are refused within 1e-5 eps of a lattice singularity; graded
    panel stacks keep nodes of the outer mode quadrature a few 1e-5 eps away,
    and the descent grading below absorbs the sqrt growth at that distance.
    """
    out = np.zeros(frac_targets.shape, dtype=complex)
    h = 0.45 * eps
    for i, frac in enumerate(np.asarray(frac_targets, dtype=float)):
        if frac <= 1e-14:
            continue
        lattice = (np.round(frac / eps - 0.5) + 0.5) * eps
        if abs(frac - lattice) < 1e-5 * eps:
            raise QuadratureFailure(
                "edge amplitude requested within 1e-5*eps of a lattice singularity"
            )
        up = _geometric_leg(1.0 + 0.0j, 1.0 + 1j * h, 1e-9, 0.2 * eps)
        across_n = max(2, int(np.ceil(frac / (0.15 * eps))))
        across = list(1.0 + 1j * h + frac * np.arange(1, across_n + 1) / across_n)
        down = _geometric_leg(1.0 + frac + 0.0j, 1.0 + frac + 1j * h, 1e-10 * eps, 0.2 * eps)
        pts = np.array(up + across + list(reversed(down))[1:], dtype=complex)
        mid = 0.5 * (pts[:-1] + pts[1:])
        half = 0.5 * (pts[1:] - pts[:-1])
        nodes = mid[:, None] + half[:, None] * _GL8_X[None, :]
        g = _g_values(nodes, eps, 1)
        out[i] = np.sum(half[:, None] * _GL8_W[None, :] * g)
    return out


def _edge_parts(eps: float, frac: np.ndarray) -> np.ndarray:
    """Memoized first-period integrals; distinct targets computed once."""
    keys = np.round(frac / eps, 12)
    missing = [k for k in np.unique(keys) if (eps, float(k)) not in _EDGE_PART_CACHE]
    if missing:
        vals = _int_g_first_period(eps, np.array(missing) * eps)
        for k, v in zip(missing, vals):
            _EDGE_PART_CACHE[(eps, float(k))] = complex(v)
    return np.array([_EDGE_PART_CACHE[(eps, float(k))] for k in keys])


def upper_edge_amplitude(eps: float, xs: np.ndarray) -> np.ndarray:
    """A on the upper edge of [1, inf) at the points xs (array, each >= 1).

    One quadrature per distinct position within the first period; every
    further period is an exact closed-form recursion step, so arbitrarily
    long edge segments cost O(length/eps) cheap factor products.
    """
    xs = np.asarray(xs, dtype=float)
    if np.any(xs < 1.0 - 1e-12):
        raise ContourClash("upper_edge_amplitude expects points at or past 1")
    m = np.floor((xs - 1.0) / eps + 1e-12).astype(int)
    m = np.maximum(m, 0)
    frac = xs - 1.0 - m * eps
    neg = frac < 0.0
    m[neg] -= 1
    frac[neg] += eps

    lnA1 = _lnA_at_one(eps)
    part = _edge_parts(eps, frac)
    lnA_x0 = lnA1 + part

    out = np.exp(lnA_x0)
    m_max = int(m.max()) if m.size else 0
    if m_max > 0:
        x0 = 1.0 + frac
        ratio = np.ones_like(out)
        for j in range(m_max):
            mask = m > j
            if not np.any(mask):
                break
            mid = x0[mask] + (j + 0.5) * eps
            step = np.asarray(rho0(mid, side=1))
            ratio[mask] *= step
        # the int_l0 phase between x0 and x telescopes into one closed form
        phase = np.exp(
            (1j / eps)
            * (np.asarray(int_l0(x0, side=1)) - np.asarray(int_l0(xs, side=1)))
        )
        # A picks up int_l0(x0) - int_l0(x); rho products supply the rest
        out = out * ratio * phase
    return out


def amplitude_along(points, eps: float, side=0, refine: bool = True):
    """Amplitude A at every vertex of a polyline starting at a known base.

    The first vertex must be reachable from 0 by a straight route; returns
    (A_values_at_points, PathQuadrature) so callers can reuse the gauss-level
    cumulative for integrand evaluation.
    """
    pts = np.asarray(points, dtype=complex)
    lead = path_cumulative(_route_from_origin(complex(pts[0])), eps, refine=refine)
    along = path_cumulative(pts, eps, side=side, refine=refine)
    base = lead.lnA_points[-1]
    amps = np.exp(base + along.lnA_points)
    return amps, along, complex(base)
