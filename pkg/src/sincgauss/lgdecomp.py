"""Laguerre-Gaussian decomposition of the Gaussian-approximated biphoton state.

The coincidence amplitude for pump indices (p, l >= 0), signal (p_s, l_s),
and idler (p_i, l_i) is the fully analytical finite sum

    C = N pi^2 delta(l, l_s+l_i)
        sum_{u,s,i} T_u T_s* T_i* sum_{n,m,f,v} binom(|l|,n) binom(u,m)
        binom(u-m,f) binom(m,v) Gamma[h] Gamma[b] D^d / (H^h B^b)
        reg2F1[h, b; 1+d; D^2/(H B)]

with the geometry H = w_p^2/4 + w_s^2/4 + g, D = -w_p^2/4 + g,
B = w_p^2/4 + w_i^2/4 + g, g = alpha L/(4 k_p), and per-summand indices
d = l_i + m - n - 2v,
h = (2 + 2s + l + l_i + 2(u - f) - 2n - 2v + |l_s|)/2,
b = (2 + 2f + 2i + l_i + 2m - 2v + |l_i|)/2.

For l <= 0 the amplitude is the conjugate of the all-indices-negated one.
A complex alpha - i beta factor yields the cosine-Gaussian amplitudes after
taking the real part.  Every summand is assembled in log space so that index
sums stay finite far beyond the factorial overflow point.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .model import CrystalOptics, PumpSpec
from .numerics import NonConvergenceError, QuadSpec, reg_hyp2f1

DEFAULT_QUAD = QuadSpec()

_I_POW = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)  # exact powers of i

#: tractability bounds of the quadrature oracle
_ORACLE_MAX_P = 4
_ORACLE_MAX_L = 8


@dataclass(frozen=True)
class ModeIndices:
    """Signal/idler LG indices and the detection-mode waists."""

    p_s: int
    l_s: int
    p_i: int
    l_i: int
    w_s: float
    w_i: float

    def __post_init__(self):
        if self.p_s < 0 or self.p_i < 0:
            raise ValueError("radial indices must be >= 0")
        if self.w_s <= 0 or self.w_i <= 0:
            raise ValueError("detection waists must be positive")


@dataclass(frozen=True)
class CoefficientBlock:
    """Geometry factors and per-summand exponents of the analytic sum."""

    H: complex
    D: complex
    B: complex
    d: int
    h: float
    b: float

    def __post_init__(self):
        if abs(self.D) ** 2 >= abs(self.H) * abs(self.B):
            raise ValueError(
                "hypergeometric argument |D^2/(HB)| >= 1; inputs are unphysical")

    @property
    def z(self) -> complex:
        return self.D * self.D / (self.H * self.B)


def _geometry(alpha, pump: PumpSpec, modes: ModeIndices, opt: CrystalOptics):
    g = alpha * opt.pm_scale
    wp2 = pump.waist ** 2 / 4.0
    H = wp2 + modes.w_s ** 2 / 4.0 + g
    D = -wp2 + g
    B = wp2 + modes.w_i ** 2 / 4.0 + g
    return H, D, B


def coefficient_block(alpha, pump: PumpSpec, modes: ModeIndices,
                      opt: CrystalOptics, u: int, s: int, i: int,
                      n: int, m: int, f: int, v: int) -> CoefficientBlock:
    """The (H, D, B, d, h, b) bundle for one summand of the analytic formula."""
    H, D, B = _geometry(alpha, pump, modes, opt)
    l, l_s, l_i = pump.l, modes.l_s, modes.l_i
    d = l_i + m - n - 2 * v
    h = 0.5 * (2 + 2 * s + l + l_i + 2 * (u - f) - 2 * n - 2 * v + abs(l_s))
    b = 0.5 * (2 + 2 * f + 2 * i + l_i + 2 * m - 2 * v + abs(l_i))
    return CoefficientBlock(complex(H), complex(D), complex(B), d, h, b)


# ---------------------------------------------------------------------------
# LG momentum-space modes
# ---------------------------------------------------------------------------

def _log_t_mag(u: int, p: int, l: int, w: float) -> float:
    return (0.5 * (math.lgamma(p + 1) + math.lgamma(p + abs(l) + 1) - math.log(math.pi))
            + (2 * u + abs(l) + 1) * math.log(w / math.sqrt(2.0))
            - math.lgamma(p - u + 1) - math.lgamma(abs(l) + u + 1) - math.lgamma(u + 1))


def t_coeff(u: int, p: int, l: int, w: float) -> complex:
    """Radial expansion coefficient T_u of the momentum-space LG mode."""
    if not 0 <= u <= p:
        raise ValueError("need 0 <= u <= p")
    phase = _I_POW[(2 * (p + u) + l) % 4]  # (-1)^(p+u) i^l, exactly
    return math.exp(_log_t_mag(u, p, l, w)) * phase


def lg_mode(p: int, l: int, w: float, rho, phi):
    """Momentum-space LG profile exp(-rho^2 w^2/4) e^(i l phi) sum_u T_u rho^(2u+|l|).

    Normalized: the plane integral of |lg_mode|^2 with measure rho drho dphi
    is 1.  Accepts scalar or array rho, phi.
    """
    rho = np.asarray(rho, dtype=float)
    radial = np.zeros(rho.shape, dtype=complex)
    for u in range(p + 1):
        radial = radial + t_coeff(u, p, l, w) * rho ** (2 * u + abs(l))
    out = np.exp(-rho ** 2 * w ** 2 / 4.0) * np.exp(1j * l * np.asarray(phi)) * radial
    return out if out.ndim else complex(out)


# ---------------------------------------------------------------------------
# analytic amplitudes
# ---------------------------------------------------------------------------

def _norm_prefactor(alpha, opt: CrystalOptics) -> float:
    """Self-normalization of the approximated state (real also for complex alpha).

    Real alpha: the Gaussian-state constant sqrt(2 L alpha/(k_p pi)), which is
    pump-independent.  Complex alpha - i beta: the cosine-Gaussian constant.
    """
    a = complex(alpha)
    if a.real <= 0:
        raise ValueError("Re(alpha) must be positive")
    L, kp = opt.length, opt.k_pump
    if a.imag == 0:
        return math.sqrt(2.0 * L * a.real / (kp * math.pi))
    al, be = a.real, abs(a.imag)
    return math.sqrt(4.0 * L / (math.pi * kp)
                     * (al ** 3 + al * be ** 2) / (2.0 * al ** 2 + be ** 2))


def _dpow_reg2f1(h: float, b: float, d: int, H: complex, B: complex, D: complex):
    """Fused D^d * reg2F1(h, b; 1+d; D^2/(HB)), stable through D -> 0.

    At the removable point D = 0 (pump-waist and phase-matching terms cancel)
    the d < 0 terms vanish like |D|^|d| and the naive product is 0 * inf; the
    first orders of the limit series are used instead.
    """
    HB = H * B
    z = D * D / HB
    if abs(z) < 1e-18:
        j0 = max(0, -d)
        total = 0.0 + 0.0j
        for k in (j0, j0 + 1):
            c = 1 + d + k
            poch = 1.0
            for j in range(k):
                poch *= (h + j) * (b + j) / (j + 1)
            total += poch * D ** (2 * k + d) / (HB ** k * math.gamma(c))
        return total
    return D ** d * reg_hyp2f1(h, b, 1 + d, z)


def amplitude_analytic(pump: PumpSpec, modes: ModeIndices, opt: CrystalOptics,
                       alpha) -> complex:
    """Coincidence amplitude from the closed-form sum; pump l must be >= 0.

    ``alpha`` may be complex (alpha - i beta) for cosine-Gaussian phase
    matching; the physical cosine-Gaussian amplitude is the real part of the
    returned value.
    """
    if pump.l < 0:
        raise ValueError("amplitude_analytic requires pump l >= 0; "
                         "use amplitude_conjugate for l < 0")
    l, l_s, l_i = pump.l, modes.l_s, modes.l_i
    if l_s + l_i != l:
        return 0.0 + 0.0j

    H, D, B = _geometry(alpha, pump, modes, opt)
    if abs(D) ** 2 >= abs(H) * abs(B):
        raise ValueError("hypergeometric argument outside the unit disk")
    # per-summand log assembly keeps Gamma ratios finite for large indices
    Hc, Dc, Bc = complex(H), complex(D), complex(B)
    logHc, logBc = np.log(Hc), np.log(Bc)

    # physical-phase bookkeeping: i^l (-i)^(l_s) (-i)^(l_i) = 1 on the shell
    # l = l_s + l_i, and the (-1)^(p+u) signs are carried exactly.
    p, p_s, p_i = pump.p, modes.p_s, modes.p_i
    w_p, w_s, w_i = pump.waist, modes.w_s, modes.w_i

    total = 0.0 + 0.0j
    for u in range(p + 1):
        log_tu = _log_t_mag(u, p, l, w_p)
        sign_u = (-1) ** (p + u)
        for s in range(p_s + 1):
            log_ts = _log_t_mag(s, p_s, l_s, w_s)
            sign_s = (-1) ** (p_s + s)
            for i in range(p_i + 1):
                log_ti = _log_t_mag(i, p_i, l_i, w_i)
                sign_i = (-1) ** (p_i + i)
                sign_T = sign_u * sign_s * sign_i
                log_T = log_tu + log_ts + log_ti
                for n in range(abs(l) + 1):
                    c1 = math.comb(abs(l), n)
                    for m in range(u + 1):
                        c2 = math.comb(u, m)
                        for f in range(u - m + 1):
                            c3 = math.comb(u - m, f)
                            for v in range(m + 1):
                                c4 = math.comb(m, v)
                                d = l_i + m - n - 2 * v
                                h = 0.5 * (2 + 2 * s + l + l_i + 2 * (u - f)
                                           - 2 * n - 2 * v + abs(l_s))
                                b = 0.5 * (2 + 2 * f + 2 * i + l_i + 2 * m
                                           - 2 * v + abs(l_i))
                                log_mag = (log_T + math.lgamma(h) + math.lgamma(b)
                                           - h * logHc - b * logBc)
                                core = _dpow_reg2f1(h, b, d, Hc, Bc, Dc)
                                total += (sign_T * c1 * c2 * c3 * c4
                                          * np.exp(log_mag) * core)
    N = _norm_prefactor(alpha, opt)
    return complex(N * math.pi ** 2 * total)


def amplitude_conjugate(pump: PumpSpec, modes: ModeIndices, opt: CrystalOptics,
                        alpha) -> complex:
    """Amplitude for pump l <= 0: conjugate of the all-OAM-negated amplitude."""
    if pump.l > 0:
        raise ValueError("amplitude_conjugate requires pump l <= 0")
    flipped_pump = PumpSpec(waist=pump.waist, p=pump.p, l=-pump.l, t0=pump.t0)
    flipped_modes = ModeIndices(p_s=modes.p_s, l_s=-modes.l_s,
                                p_i=modes.p_i, l_i=-modes.l_i,
                                w_s=modes.w_s, w_i=modes.w_i)
    return np.conj(amplitude_analytic(flipped_pump, flipped_modes, opt, alpha))


def amplitude(pump: PumpSpec, modes: ModeIndices, opt: CrystalOptics,
              alpha) -> complex:
    """Dispatch on the sign of the pump OAM."""
    if pump.l >= 0:
        return amplitude_analytic(pump, modes, opt, alpha)
    return amplitude_conjugate(pump, modes, opt, alpha)


# ---------------------------------------------------------------------------
# quadrature oracle
# ---------------------------------------------------------------------------

_GRID_CACHE: dict = {}


def _radial_profile(pj: int, lj: int, wj: float, rho: np.ndarray,
                    conjugate: bool) -> np.ndarray:
    out = np.zeros(rho.shape, dtype=complex)
    for u in range(pj + 1):
        t = t_coeff(u, pj, lj, wj)
        if conjugate:
            t = np.conj(t)
        out += t * rho ** (2 * u + abs(lj))
    return out


def _oracle_tensors(pump: PumpSpec, w_s: float, w_i: float, gamma: complex,
                    nr: int, nphi: int):
    """Shared 3-D grid tensors: pump x phase-matching on (rho_s, rho_i, dphi).

    Cached per parameter set; every mode tuple then contracts the same tensor
    with separable detection profiles.
    """
    key = (pump.p, pump.l, pump.waist, w_s, w_i, gamma, nr, nphi)
    hit = _GRID_CACHE.get(key)
    if hit is not None:
        return hit
    w_p = pump.waist
    R_s = math.sqrt(200.0) / w_s
    R_i = math.sqrt(200.0) / w_i
    xs, wq = np.polynomial.legendre.leggauss(nr)
    rs = (xs + 1.0) / 2.0 * R_s
    ws_q = wq / 2.0 * R_s
    ri = (xs + 1.0) / 2.0 * R_i
    wi_q = wq / 2.0 * R_i
    phi = 2.0 * math.pi * np.arange(nphi) / nphi

    RS = rs[:, None, None]
    RI = ri[None, :, None]
    PH = phi[None, None, :]
    zc = RS + RI * np.exp(1j * PH)               # q_s + q_i as a complex number
    zc_abs2 = np.abs(zc) ** 2
    lp = pump.l
    radial = np.zeros(zc.shape, dtype=float)
    for u in range(pump.p + 1):
        radial += (t_coeff(u, pump.p, lp, w_p) / _I_POW[lp % 4]).real * zc_abs2 ** u
    angular = zc ** lp if lp >= 0 else np.conj(zc) ** (-lp)
    pump_grid = np.exp(-w_p ** 2 * zc_abs2 / 4.0) * radial * _I_POW[lp % 4] * angular
    q_minus2 = RS ** 2 + RI ** 2 - 2.0 * RS * RI * np.cos(PH)
    shared = pump_grid * np.exp(-gamma * q_minus2) * RS * RI
    out = (rs, ws_q, ri, wi_q, phi, shared)
    if len(_GRID_CACHE) > 8:
        _GRID_CACHE.clear()
    _GRID_CACHE[key] = out
    return out


def _oracle_value(pump: PumpSpec, modes: ModeIndices, opt: CrystalOptics,
                  alpha, nr: int, nphi: int) -> complex:
    gamma = complex(alpha) * opt.pm_scale
    rs, ws_q, ri, wi_q, phi, shared = _oracle_tensors(
        pump, modes.w_s, modes.w_i, gamma, nr, nphi)
    det_s = (np.exp(-modes.w_s ** 2 * rs ** 2 / 4.0)
             * _radial_profile(modes.p_s, modes.l_s, modes.w_s, rs, conjugate=True))
    det_i = (np.exp(-modes.w_i ** 2 * ri ** 2 / 4.0)
             * _radial_profile(modes.p_i, modes.l_i, modes.w_i, ri, conjugate=True))
    ang = np.exp(-1j * modes.l_i * phi)
    val = np.einsum("i,j,k,ijk->", ws_q * det_s, wi_q * det_i, ang, shared,
                    optimize=True)
    val *= 2.0 * math.pi / nphi
    # absolute angular integral, evaluated on a uniform grid (exact for
    # integer harmonics): supplies 2 pi delta(l, l_s + l_i)
    k = pump.l - modes.l_s - modes.l_i
    mesh = np.exp(1j * k * 2.0 * math.pi * np.arange(64) / 64)
    val *= np.mean(mesh) * 2.0 * math.pi
    return complex(val * _norm_prefactor(alpha, opt))


def amplitude_oracle(pump: PumpSpec, modes: ModeIndices, opt: CrystalOptics,
                     alpha, spec: QuadSpec = DEFAULT_QUAD,
                     _base_nr: int = 72, _base_nphi: int = 160) -> complex:
    """Amplitude by direct quadrature of the momentum-space overlap.

    Global rotational invariance reduces the four transverse dimensions to
    (rho_s, rho_i, relative angle); the remaining absolute angle yields the
    OAM selection rule.  Small indices only: the grids are calibrated for
    p <= 4 and |l| <= 8.
    """
    for name, val, bound in (("p", pump.p, _ORACLE_MAX_P),
                             ("p_s", modes.p_s, _ORACLE_MAX_P),
                             ("p_i", modes.p_i, _ORACLE_MAX_P),
                             ("l", abs(pump.l), _ORACLE_MAX_L),
                             ("l_s", abs(modes.l_s), _ORACLE_MAX_L),
                             ("l_i", abs(modes.l_i), _ORACLE_MAX_L)):
        if val > bound:
            raise ValueError(f"oracle index {name}={val} beyond tractable bound {bound}")
    if complex(alpha).real <= 0:
        raise ValueError("Re(alpha) must be positive")

    # angular resolution must follow the exp(c * cos dphi) content of the grid
    w_p = pump.waist
    R_s = math.sqrt(200.0) / modes.w_s
    R_i = math.sqrt(200.0) / modes.w_i
    gamma = complex(alpha) * opt.pm_scale
    osc = (w_p ** 2 / 2.0 + 2.0 * abs(gamma)) * R_s * R_i
    nphi = max(_base_nphi, 16 * int((2.7 * osc + 60) // 16))
    nr = _base_nr

    coarse = _oracle_value(pump, modes, opt, alpha, nr, nphi)
    for _ in range(2):
        nr2, nphi2 = int(nr * 1.5), int(nphi * 1.5)
        fine = _oracle_value(pump, modes, opt, alpha, nr2, nphi2)
        scale = max(abs(fine), spec.abs_tol / spec.rel_tol)
        if abs(fine - coarse) <= 0.2 * spec.rel_tol * scale:
            return fine
        coarse, nr, nphi = fine, nr2, nphi2
    raise NonConvergenceError("oracle quadrature did not stabilize")


# ---------------------------------------------------------------------------
# tables and derived spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AmplitudeTable:
    """Truncated grid of coincidence amplitudes plus its captured weight."""

    pump_p: int
    pump_l: int
    alpha: complex
    p_max: int
    l_max: int
    entries: dict  # (p_s, l_s, p_i, l_i) -> complex
    captured_weight: float
    failures: dict = field(default_factory=dict)


def amplitude_table(pump: PumpSpec, opt: CrystalOptics, alpha,
                    p_max: int, l_max: int,
                    w_s: Optional[float] = None,
                    w_i: Optional[float] = None) -> AmplitudeTable:
    """Analytic amplitudes for all indices with p <= p_max, |l| <= l_max.

    Detection waists default to the pump waist.  Cosine-Gaussian (complex
    alpha) tables store the physical real-part amplitudes.  Per-entry
    failures are recorded instead of aborting the fill.
    """
    if p_max < 0 or l_max < 0:
        raise ValueError("truncation bounds must be >= 0")
    w_s = pump.waist if w_s is None else w_s
    w_i = pump.waist if w_i is None else w_i
    is_complex = complex(alpha).imag != 0.0
    entries = {}
    failures = {}
    for p_s in range(p_max + 1):
        for l_s in range(-l_max, l_max + 1):
            for p_i in range(p_max + 1):
                for l_i in range(-l_max, l_max + 1):
                    key = (p_s, l_s, p_i, l_i)
                    if l_s + l_i != pump.l:
                        entries[key] = 0.0 + 0.0j
                        continue
                    try:
                        modes = ModeIndices(p_s, l_s, p_i, l_i, w_s, w_i)
                        c = amplitude(pump, modes, opt, alpha)
                        entries[key] = complex(c.real) if is_complex else c
                    except (ValueError, NonConvergenceError, OverflowError) as exc:
                        failures[key] = str(exc)
    weight = float(sum(abs(c) ** 2 for c in entries.values()))
    return AmplitudeTable(pump_p=pump.p, pump_l=pump.l, alpha=complex(alpha),
                          p_max=p_max, l_max=l_max, entries=entries,
                          captured_weight=weight, failures=failures)


def schmidt_number(table: AmplitudeTable, warn_threshold: float = 0.99) -> float:
    """K = 1/sum(lambda^2) from singular values of the signal x idler matrix."""
    if table.captured_weight < warn_threshold:
        warnings.warn(
            f"captured weight {table.captured_weight:.4f} below {warn_threshold}; "
            "the Schmidt number is a truncated estimate", stacklevel=2)
    sig_modes = sorted({(k[0], k[1]) for k in table.entries})
    idl_modes = sorted({(k[2], k[3]) for k in table.entries})
    M = np.zeros((len(sig_modes), len(idl_modes)), dtype=complex)
    for (p_s, l_s, p_i, l_i), c in table.entries.items():
        M[sig_modes.index((p_s, l_s)), idl_modes.index((p_i, l_i))] = c
    svals = np.linalg.svd(M, compute_uv=False)
    lam = svals ** 2
    total = lam.sum()
    if total == 0:
        raise ValueError("empty amplitude table")
    lam = lam / total
    return float(1.0 / np.sum(lam ** 2))


def spiral_spectrum(table: AmplitudeTable) -> dict[int, float]:
    """OAM marginal of the signal photon: P(l_s) = sum over the rest of |C|^2.

    Probabilities are non-negative and sum to the captured weight.
    """
    out: dict[int, float] = {}
    for (p_s, l_s, p_i, l_i), c in table.entries.items():
        out[l_s] = out.get(l_s, 0.0) + abs(c) ** 2
    return dict(sorted(out.items()))
