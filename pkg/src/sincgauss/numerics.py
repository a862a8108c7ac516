"""Special functions, quadrature, and derivative-free maximization.

Self-contained numerical layer used by every other module: the regularized
Gauss hypergeometric function (complex parameters, non-positive integer c),
semi-infinite quadrature with oscillation-aware series acceleration, box
quadrature in 2/3 dimensions, and bounded maximization in one or two factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.special import loggamma


class NonConvergenceError(RuntimeError):
    """Quadrature or series did not reach the requested tolerance."""


class DivergenceError(ValueError):
    """Hypergeometric argument cannot be brought inside the unit disk."""


@dataclass(frozen=True)
class QuadSpec:
    """Tolerances and limits for the quadrature routines.

    ``oscillation_period_hint`` enables the oscillatory path of
    :func:`quad_semi_infinite`: the axis is split into panels of that width
    (zero-crossing spacing of the sinc factor, pi in scaled units) and the
    panel series is accelerated.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 4096
    oscillation_period_hint: Optional[float] = None

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.oscillation_period_hint is not None and self.oscillation_period_hint <= 0:
            raise ValueError("oscillation_period_hint must be positive")


@dataclass(frozen=True)
class OptimResult:
    argmax: tuple[float, ...]
    value: float
    evaluations: int
    converged: bool


def erf(x: float) -> float:
    """Error function (total, odd, |erf| < 1 for finite x).

    Delegates to the platform's correctly rounded libm implementation.
    """
    return math.erf(x)


# ---------------------------------------------------------------------------
# regularized Gauss hypergeometric function
# ---------------------------------------------------------------------------

_POLE_TOL = 1e-12


def _nonpositive_int(c: complex) -> Optional[int]:
    """Return m >= 0 if c is (numerically) the non-positive integer -m."""
    if abs(c.imag) > _POLE_TOL:
        return None
    r = round(c.real)
    if r <= 0 and abs(c.real - r) < _POLE_TOL:
        return -int(r)
    return None


def _reg2f1_series(a: complex, b: complex, c: complex, z: complex,
                   max_terms: int = 200000) -> complex:
    """Power series of 2F1(a,b;c;z)/Gamma(c) with the term and 1/Gamma fused.

    For c = -m the first m+1 coefficients vanish identically; the sum starts
    at order z^(m+1) where Gamma(c+k) first becomes finite (the shifted-series
    limit). One fused recurrence keeps every intermediate bounded, so no
    Gamma value is ever formed outside log space.
    """
    m = _nonpositive_int(c)
    if m is not None:
        k = m + 1
        t = complex(1.0)  # becomes (a)_k (b)_k z^k / k! * 1/Gamma(1)
        for i in range(k):
            t *= (a + i) * (b + i) * z / (i + 1)
    else:
        k = 0
        t = complex(np.exp(-loggamma(c)))
    s = t
    tiny_streak = 0
    while k < max_terms:
        t *= (a + k) * (b + k) * z / ((k + 1) * (c + k))
        s += t
        k += 1
        if not np.isfinite(abs(t)):
            raise OverflowError("intermediate term overflow in 2F1 series")
        if abs(t) <= 5e-17 * max(abs(s), 1e-300):
            tiny_streak += 1
            if tiny_streak >= 3:
                return s
        else:
            tiny_streak = 0
    raise NonConvergenceError("2F1 series did not converge")


def reg_hyp2f1(a, b, c, z):
    """Regularized Gauss hypergeometric function 2F1(a,b;c;z)/Gamma(c).

    Finite for every finite parameter set, including c a non-positive
    integer.  Complex parameters and argument are accepted.  Arguments with
    |z| >= 0.85 are routed through the Pfaff transformation
    2F1(a,b;c;z) = (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)) when that shrinks the
    argument; otherwise the series is summed directly up to |z| < 1.

    Returns a float when all inputs are real, else a complex number.
    """
    a_c, b_c, c_c, z_c = complex(a), complex(b), complex(c), complex(z)
    real_in = all(abs(v.imag) == 0 for v in (a_c, b_c, c_c, z_c))
    if z_c == 1:
        raise DivergenceError("z = 1 is outside the supported domain")
    zp = z_c / (z_c - 1)
    if abs(z_c) <= 0.85:
        out = _reg2f1_series(a_c, b_c, c_c, z_c)
    elif abs(zp) <= 0.85:
        out = (1 - z_c) ** (-a_c) * _reg2f1_series(a_c, c_c - b_c, c_c, zp)
    elif abs(z_c) < 1 - 1e-8:
        out = _reg2f1_series(a_c, b_c, c_c, z_c, max_terms=2_000_000)
    else:
        raise DivergenceError(
            f"|z| = {abs(z_c):.6g}: no transformation reaches |z| < 1 - 1e-8")
    return out.real if real_in else out


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_GL_NODES = (_GL_NODES + 1.0) / 2.0
_GL_WEIGHTS = _GL_WEIGHTS / 2.0


def gauss_legendre(n: int, a: float, b: float):
    """Nodes and weights of the n-point Gauss-Legendre rule on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return a + (x + 1.0) * (b - a) / 2.0, w * (b - a) / 2.0


def _panel_integrals(f, h: float, n_panels: int, start: float) -> np.ndarray:
    """16-point Gauss-Legendre integral of f over each of n_panels panels."""
    edges = start + h * np.arange(n_panels)
    x = edges[:, None] + h * _GL_NODES[None, :]
    vals = np.asarray(f(x.ravel()), dtype=float).reshape(n_panels, 16)
    return h * (vals @ _GL_WEIGHTS)


def _levin_u(S: np.ndarray, a: np.ndarray, n: int, k: int, beta: float = 1.0):
    """Explicit Levin u-transform estimate from partial sums S_n .. S_{n+k}."""
    num = 0.0
    den = 0.0
    for j in range(k + 1):
        i = n + j
        if abs(a[i]) < 1e-280:  # term too small to carry remainder information
            return None
        w = (-1) ** j * math.comb(k, j) * ((beta + i) / (beta + n + k)) ** (k - 1)
        om = (beta + i) * a[i]
        num += w * S[i] / om
        den += w / om
    if den == 0.0 or not math.isfinite(num) or not math.isfinite(den):
        return None
    return num / den


def _neville_at_zero(ts, ys) -> float:
    """Polynomial extrapolation of (t_i, y_i) to t = 0."""
    P = list(ys)
    n = len(P)
    for lvl in range(1, n):
        P = [(-ts[j + lvl] * P[j] + ts[j] * P[j + 1]) / (ts[j] - ts[j + lvl])
             for j in range(n - lvl)]
    return P[0]


def _richardson_doubling(S: np.ndarray):
    """Richardson extrapolation of S_N over geometrically spaced N.

    Power-law remainders (S_N ~ S - c_1/N - c_2/N^2 - ...) are polynomial in
    1/N, so Neville on doubling panel counts converges geometrically with a
    trustworthy successive-depth error estimate; the well-separated nodes
    avoid the float cancellation that limits high-order Levin windows.
    """
    n = len(S)
    counts = []
    c = 32
    while c <= n:
        counts.append(c)
        c *= 2
    if len(counts) < 3:
        return None
    ts = [1.0 / c for c in counts]
    ys = [S[c - 1] for c in counts]
    full = _neville_at_zero(ts, ys)
    drop = _neville_at_zero(ts[1:], ys[1:])
    return full, abs(full - drop)


def _accelerated_limit(S: np.ndarray, a: np.ndarray):
    """Best available series-limit estimate and its error estimate.

    Three candidates are raced: Levin-u windows anchored at the first panel
    (good on power-law tails), Levin-u windows ending at the latest panel
    (good on modulated or alternating tails), and Richardson extrapolation
    over doubling panel counts (power-law tails at tight tolerances).  Each
    candidate's error is estimated from the agreement of successive orders.
    """
    n_sums = len(S)
    best_val, best_err = S[-1], abs(a[-1])

    prev = None
    for k in range(2, min(n_sums, 17)):
        est = _levin_u(S, a, 0, k)
        if est is None:
            break
        if prev is not None:
            err = abs(est - prev)
            if err < best_err:
                best_val, best_err = est, err
        prev = est

    prev = None
    for k in (8, 10, 12):
        if n_sums < k + 1:
            break
        est = _levin_u(S, a, n_sums - 1 - k, k)
        if est is None:
            continue
        if prev is not None:
            err = abs(est - prev)
            if err < best_err:
                best_val, best_err = est, err
        prev = est

    rich = _richardson_doubling(S)
    if rich is not None and rich[1] < best_err:
        best_val, best_err = rich

    return best_val, best_err


def quad_semi_infinite(f: Callable[[np.ndarray], np.ndarray],
                       spec: QuadSpec = QuadSpec()) -> float:
    """Integral of f over [0, inf).

    Without an oscillation hint the integrand is handed to the adaptive
    QUADPACK transformation for infinite intervals.  With a hint h the axis
    is cut into panels [k h, (k+1) h) integrated by 16-point Gauss-Legendre;
    the partial-sum sequence is then accelerated with Levin u-transforms so
    that slowly decaying sinc tails (~1/v and ~1/v^2) converge to full
    precision from a few dozen panels.  Integrands damped fast enough are
    simply summed to exhaustion.
    """
    if spec.oscillation_period_hint is None:
        val, err = integrate.quad(f, 0.0, np.inf,
                                  epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                                  limit=spec.max_subdivisions)
        if err > 10 * max(spec.abs_tol, spec.rel_tol * abs(val)):
            raise NonConvergenceError(
                f"semi-infinite quadrature error estimate {err:.3e} above tolerance")
        return val

    h = spec.oscillation_period_hint
    block = 32
    a = np.empty(0)
    start = 0.0
    while len(a) < spec.max_subdivisions:
        a = np.concatenate([a, _panel_integrals(f, h, block, start)])
        start += block * h
        S = np.cumsum(a)
        scale = max(abs(S[-1]), spec.abs_tol / spec.rel_tol)
        tol = max(spec.abs_tol, spec.rel_tol * scale)
        if len(a) >= 2 * block and np.all(np.abs(a[-3:]) < 0.01 * tol):
            return float(S[-1])  # integrand exhausted; panels are GL-exact
        if not np.any(a[-block:]):
            continue  # nothing new yet; acceleration would extrapolate zeros
        val, err = _accelerated_limit(S, a)
        if err < 0.1 * tol:
            return float(val)
    raise NonConvergenceError(
        f"no convergence after {len(a)} panels of width {h:g}")


def quad_nd(f: Callable[..., float], bounds: Sequence[tuple[float, float]],
            spec: QuadSpec = QuadSpec()) -> float:
    """Adaptive tensor quadrature of f over a 2- or 3-dimensional box.

    f is called with scalar coordinates, one per axis.  Tolerances are split
    evenly across nesting levels; a per-level error above its share raises
    :class:`NonConvergenceError`.
    """
    dim = len(bounds)
    if dim not in (2, 3):
        raise ValueError("quad_nd supports 2 or 3 dimensions")
    eps_abs = spec.abs_tol / dim
    eps_rel = spec.rel_tol / dim

    def nest(level: int, coords: tuple) -> float:
        lo, hi = bounds[level]
        if level == dim - 1:
            g = lambda x: f(*coords, x)
        else:
            g = lambda x: nest(level + 1, coords + (x,))
        val, err = integrate.quad(g, lo, hi, epsabs=eps_abs, epsrel=eps_rel,
                                  limit=spec.max_subdivisions)
        if err > 10 * max(eps_abs, eps_rel * abs(val)) + 1e-300:
            raise NonConvergenceError(
                f"axis-{level} quadrature error {err:.3e} above tolerance")
        return val

    return nest(0, ())


# ---------------------------------------------------------------------------
# maximization
# ---------------------------------------------------------------------------

def maximize(f: Callable[..., float], bounds: Sequence[tuple[float, float]],
             xtol: float = 1e-6, max_evals: int = 4000) -> OptimResult:
    """Maximize f over one or two bounded factors, derivative-free.

    One factor uses bracketed golden-section/parabolic refinement.  Two
    factors run Nelder-Mead simplex descent from five deterministic starts
    (center plus the four quarter-box corners); the cosine-Gaussian overlap
    has a ridge on which a single start can stall.
    """
    evals = 0

    def counted(*x):
        nonlocal evals
        evals += 1
        return f(*x)

    if len(bounds) == 1:
        (lo, hi), = bounds
        res = optimize.minimize_scalar(
            lambda x: -counted(x), bounds=(lo, hi), method="bounded",
            options={"xatol": xtol, "maxiter": max_evals})
        x_best = (float(res.x),)
        converged = bool(res.success)
    elif len(bounds) == 2:
        (lo0, hi0), (lo1, hi1) = bounds
        starts = [
            (0.5 * (lo0 + hi0), 0.5 * (lo1 + hi1)),
            (lo0 + 0.25 * (hi0 - lo0), lo1 + 0.25 * (hi1 - lo1)),
            (lo0 + 0.75 * (hi0 - lo0), lo1 + 0.25 * (hi1 - lo1)),
            (lo0 + 0.25 * (hi0 - lo0), lo1 + 0.75 * (hi1 - lo1)),
            (lo0 + 0.75 * (hi0 - lo0), lo1 + 0.75 * (hi1 - lo1)),
        ]

        def neg_clipped(xy):
            x = min(max(xy[0], lo0), hi0)
            y = min(max(xy[1], lo1), hi1)
            return -counted(x, y)

        best = None
        converged = False
        for s in starts:
            res = optimize.minimize(
                neg_clipped, x0=np.asarray(s), method="Nelder-Mead",
                options={"xatol": xtol, "fatol": 1e-13,
                         "maxfev": max_evals // len(starts)})
            if best is None or res.fun < best.fun:
                best = res
                converged = bool(res.success)
        x_best = (float(min(max(best.x[0], lo0), hi0)),
                  float(min(max(best.x[1], lo1), hi1)))
    else:
        raise ValueError("maximize supports 1 or 2 factors")

    value = f(*x_best)
    if evals >= max_evals:
        converged = False
    return OptimResult(argmax=x_best, value=float(value),
                       evaluations=evals + 1, converged=converged)
