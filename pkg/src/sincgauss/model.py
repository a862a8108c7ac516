"""Physical parameter types and the phase-mismatch function.

All quantities are SI; unit conversions happen at the CLI boundary only.
The degenerate-momentum assumption k_p ~ 2 k_s is baked in, so only the pump
wavenumber appears in the transverse term.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

FAMILIES = (
    "sinc-exact",
    "gaussian",
    "super-gaussian",
    "cosine-gaussian",
    "cosine-super-gaussian",
)


@dataclass(frozen=True)
class CrystalOptics:
    """Crystal length, pump wavenumber, and the three group velocities."""

    length: float          # m
    k_pump: float          # rad/m
    u_pump: float          # m/s
    u_signal: float        # m/s
    u_idler: float         # m/s

    def __post_init__(self):
        for name in ("length", "k_pump", "u_pump", "u_signal", "u_idler"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def pm_scale(self) -> float:
        """alpha-free phase-matching length scale L/(4 k_p), in m^2."""
        return self.length / (4.0 * self.k_pump)

    @property
    def group_delay_mismatch(self) -> float:
        """L |1/u_p - 1/u_s|: the pulse duration separating the spectral regimes."""
        return self.length * abs(1.0 / self.u_pump - 1.0 / self.u_signal)


@dataclass(frozen=True)
class PumpSpec:
    """Pump beam: LG spatial profile (waist, p, l) and Gaussian pulse duration."""

    waist: float           # m
    p: int = 0
    l: int = 0
    t0: float = 1e-12      # s

    def __post_init__(self):
        if self.waist <= 0:
            raise ValueError("waist must be positive")
        if self.t0 <= 0:
            raise ValueError("t0 must be positive")
        if self.p < 0:
            raise ValueError("radial index p must be >= 0")


@dataclass(frozen=True)
class ApproxSpec:
    """Approximation family plus its optimization factor(s).

    beta is ignored unless the family is cosine-Gaussian or
    cosine-super-Gaussian.
    """

    family: str
    alpha: float = 0.0
    beta: float = 0.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family != "sinc-exact" and self.alpha <= 0:
            raise ValueError("alpha must be positive for approximating families")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")

    @property
    def is_exact(self) -> bool:
        return self.family == "sinc-exact"

    @property
    def uses_beta(self) -> bool:
        return self.family in ("cosine-gaussian", "cosine-super-gaussian")

    @property
    def complex_alpha(self) -> complex:
        """The Euler-formula substitution alpha -> alpha - i beta."""
        return self.alpha - 1j * self.beta if self.uses_beta else complex(self.alpha)


@dataclass(frozen=True)
class TransverseKinematics:
    """|q_s - q_i| and the frequency deviations of signal and idler."""

    q_minus: float         # rad/m
    omega_s: float = 0.0   # rad/s
    omega_i: float = 0.0   # rad/s

    def __post_init__(self):
        if self.q_minus < 0:
            raise ValueError("q_minus magnitude must be >= 0")


def delta_kz(kin: TransverseKinematics, opt: CrystalOptics) -> float:
    """Longitudinal phase mismatch, rad/m.

    (Omega_s + Omega_i)/u_p - Omega_s/u_s - Omega_i/u_i + |q_-|^2/(2 k_p);
    depends on the transverse momenta only through |q_s - q_i|.
    """
    spectral = ((kin.omega_s + kin.omega_i) / opt.u_pump
                - kin.omega_s / opt.u_signal
                - kin.omega_i / opt.u_idler)
    return spectral + kin.q_minus ** 2 / (2.0 * opt.k_pump)


def phase_matching_value(x, approx: ApproxSpec, kind: str = "spatial"):
    """Phase-matching profile of the chosen family at dimensionless argument x.

    kind="spatial": x is the already-quadratic combination L|q_-|^2/(4 k_p);
    the families evaluate sinc(x), exp(-a x), exp(-a x^2), exp(-a x) cos(b x),
    exp(-a x^2) cos(b x).

    kind="spectral": x is L dk_z / 2 (sign-carrying); every family is even
    in x: sinc(x), exp(-a x^2), exp(-a x^4), exp(-a x^2) cos(b x^2),
    exp(-a x^4) cos(b x^2).
    """
    if kind not in ("spatial", "spectral"):
        raise ValueError("kind must be 'spatial' or 'spectral'")
    x = np.asarray(x, dtype=float)
    arg = x if kind == "spatial" else x * x
    fam = approx.family
    if fam == "sinc-exact":
        out = np.sinc(x / np.pi)
    elif fam == "gaussian":
        out = np.exp(-approx.alpha * arg)
    elif fam == "super-gaussian":
        out = np.exp(-approx.alpha * arg * arg)
    elif fam == "cosine-gaussian":
        out = np.exp(-approx.alpha * arg) * np.cos(approx.beta * arg)
    else:  # cosine-super-gaussian
        out = np.exp(-approx.alpha * arg * arg) * np.cos(approx.beta * arg)
    return out if out.ndim else float(out)


def load_preset(name: str) -> tuple[CrystalOptics, PumpSpec]:
    """Crystal/pump presets shipped as package data (not hard-coded)."""
    text = resources.files("sincgauss").joinpath("data/presets.json").read_text()
    presets = json.loads(text)
    if name not in presets:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(presets)}")
    entry = presets[name]
    opt = CrystalOptics(**entry["crystal"])
    pump = PumpSpec(**entry["pump"])
    return opt, pump
