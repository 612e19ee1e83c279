"""The full inequality ladder for measuring the global observable:
decoherence strength, packet dispersion, weak-coupling and K-exponent
conditions, the mass-moment threshold, the non-minimal-packet analysis,
species presets and aggregated verdict reports.

Strict inequalities are taken at face value; "much greater" conditions
are operationalized as a ratio above MUCH_GREATER_FACTOR (default 10).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from importlib import resources

from .core import ParameterError, PhysicalConstants, PhysicalScenario
from .despagnat import collapse_distinguishable, k_exponent
from .realclock import ClockChannel

MUCH_GREATER_FACTOR = 10.0
WEAK_COUPLING_RATIO = 0.1

PRESET_ENV_VAR = "DECOLAB_PRESET_PATH"


@dataclass(frozen=True)
class SpeciesPreset:
    name: str
    mass: float    # kg
    gamma: float   # J/T

    def __post_init__(self):
        if self.mass <= 0 or self.gamma <= 0:
            raise ParameterError("preset mass and gamma must be positive")


def load_presets(extra_paths: str | None = None) -> dict[str, SpeciesPreset]:
    """Bundled species presets, optionally extended by JSON files listed
    in the DECOLAB_PRESET_PATH environment variable (os.pathsep-separated).
    Later files override earlier names."""
    presets: dict[str, SpeciesPreset] = {}

    def absorb(records):
        for rec in records:
            p = SpeciesPreset(rec["name"], float(rec["mass_kg"]),
                              float(rec["gamma_J_per_T"]))
            presets[p.name] = p

    with resources.files("decolab").joinpath("presets.json").open() as fh:
        absorb(json.load(fh))
    paths = extra_paths if extra_paths is not None else os.environ.get(PRESET_ENV_VAR, "")
    for path in filter(None, paths.split(os.pathsep)):
        with open(path) as fh:
            absorb(json.load(fh))
    return presets


@dataclass(frozen=True)
class Check:
    """One inequality: passes iff lhs relates to rhs per direction."""

    name: str
    lhs: float
    rhs: float
    direction: str  # ">", "<", or ">>"
    note: str = ""

    @property
    def passed(self) -> bool:
        if self.direction == ">":
            return self.lhs > self.rhs
        if self.direction == "<":
            return self.lhs < self.rhs
        if self.direction == ">=":
            # identity links that hold with asymptotic equality
            return self.lhs >= self.rhs * (1.0 - 1e-12)
        if self.direction == ">>":
            return self.lhs > MUCH_GREATER_FACTOR * self.rhs
        raise ParameterError(f"unknown direction {self.direction!r}")

    @property
    def margin_log10(self) -> float:
        """log10(lhs/rhs), signed so that positive means satisfied for
        '>'-type checks and violated for '<'-type."""
        if self.lhs == 0.0:
            return -math.inf
        if self.rhs == 0.0:
            return math.inf
        ratio = self.lhs / self.rhs
        return math.log10(ratio) if ratio > 0.0 else math.nan


@dataclass(frozen=True)
class FeasibilityReport:
    checks: tuple[Check, ...]
    notes: tuple[str, ...] = field(default=())

    @property
    def overall(self) -> bool:
        return all(c.passed for c in self.checks)


def decoherence_bound(s: PhysicalScenario) -> Check:
    """Couplings strong enough for environmental decoherence:
    mu gamma1 gamma2 / (hbar d^2 v) > 1."""
    c = s.constants
    lhs = c.mu0 * s.gamma1 * s.gamma2 / (c.hbar * s.d ** 2 * s.v)
    return Check("decoherence_coupling", lhs, 1.0, ">")


def transverse_velocity(s: PhysicalScenario) -> float:
    """Lower bound hbar/(m d) on the sideways kick picked up in a pass."""
    return s.constants.hbar / (s.mass * s.d)


def packet_width(t: float, m: float, delta: float,
                 hbar: float = PhysicalConstants.hbar) -> float:
    """Gaussian packet dispersion (delta/2) sqrt(1 + 4 hbar^2 t^2/(m^2 delta^4))."""
    if t < 0 or m <= 0 or delta <= 0:
        raise ParameterError("need t >= 0 and positive m, delta")
    return 0.5 * delta * math.sqrt(1.0 + 4.0 * hbar ** 2 * t ** 2
                                   / (m ** 2 * delta ** 4))


def min_dispersion(t: float, m: float,
                   hbar: float = PhysicalConstants.hbar) -> float:
    """Minimized dispersion sqrt(hbar t / m) (optimal width delta^2 = 2 hbar t/m)."""
    if t < 0 or m <= 0:
        raise ParameterError("need t >= 0 and positive m")
    return math.sqrt(hbar * t / m)


def tau_upper_bound(s: PhysicalScenario) -> float:
    """Time-of-flight cap [m (gamma1 gamma2)^(2/3) mu^(2/3) / (hbar^(5/3) N)]^3,
    from combining the dispersion and coupling bounds.  hbar is used
    uniformly throughout."""
    c = s.constants
    rhs = (s.mass * (s.gamma1 * s.gamma2) ** (2.0 / 3.0)
           * c.mu0 ** (2.0 / 3.0) / (c.hbar ** (5.0 / 3.0) * s.N))
    return rhs ** 3


def mass_moment_threshold(n: int, ch: ClockChannel | None = None,
                          constants: PhysicalConstants | None = None) -> float:
    """Required scale T_P^(1/3) hbar^(5/3) N^(5/4) / mu^(2/3) that
    m (gamma1 gamma2)^(2/3) must greatly exceed for K < 1."""
    if n < 1:
        raise ParameterError("n must be >= 1")
    c = constants or PhysicalConstants()
    tp = ch.t_planck if ch is not None else c.t_planck
    return (tp ** (1.0 / 3.0) * c.hbar ** (5.0 / 3.0) * n ** 1.25
            / c.mu0 ** (2.0 / 3.0))


def mass_moment_check(s: PhysicalScenario, n: int | None = None) -> Check:
    n = s.N if n is None else n
    lhs = s.mass * (s.gamma1 * s.gamma2) ** (2.0 / 3.0)
    rhs = mass_moment_threshold(n, constants=s.constants)
    return Check("mass_moment", lhs, rhs, ">>")


def required_moment(n: int, mass: float,
                    constants: PhysicalConstants | None = None) -> float:
    """Magnetic moment (gamma1 = gamma2 = gamma) needed for the
    mass-moment condition to hold with the given mass and N."""
    if mass <= 0:
        raise ParameterError("mass must be positive")
    rhs = MUCH_GREATER_FACTOR * mass_moment_threshold(n, constants=constants)
    return (rhs / mass) ** 0.75


def appendix1_analysis(s: PhysicalScenario) -> FeasibilityReport:
    """Non-minimal packets with initial width delta = d/10.

    Chain: the exact dispersion at T is bounded below by hbar T/(0.1 m d);
    the traversed length l = v T is bounded above by mu gamma1 gamma2 T /
    (hbar d^2); requiring dispersion < traversal forces
    d <= 0.1 mu gamma1 gamma2 m / hbar^2.
    """
    c = s.constants
    t_total = s.N * s.tau
    delta = s.d / 10.0
    dx = packet_width(t_total, s.mass, delta, c.hbar)
    dx_lower = c.hbar * t_total / (0.1 * s.mass * s.d)
    length = s.v * t_total
    length_bound = c.mu0 * s.gamma1 * s.gamma2 * t_total / (c.hbar * s.d ** 2)
    d_max = 0.1 * c.mu0 * s.gamma1 * s.gamma2 * s.mass / c.hbar ** 2
    checks = (
        Check("dispersion_lower_bound", dx, dx_lower, ">=",
              note="exact packet width vs its linear-growth bound"),
        Check("traversal_vs_coupling", length_bound, length, ">",
              note="v below the decoherence cap keeps l under the bound"),
        Check("impact_parameter_cap", d_max, s.d, ">",
              note="dispersion < traversal forces d <= 0.1 mu g1 g2 m/hbar^2"),
    )
    return FeasibilityReport(checks, notes=(f"d_max = {d_max:.6g} m",))


def full_report(s: PhysicalScenario, n: int | None = None,
                weak_tol: float = WEAK_COUPLING_RATIO) -> FeasibilityReport:
    """All conditions at once: (a) coupling strength, (b) dispersion,
    (c) weak coupling, (d) K < 1, the tau cap, the mass-moment threshold
    and the packet analysis.  Overall verdict is their conjunction."""
    n = s.N if n is None else n
    c = s.constants
    ch = ClockChannel(c.t_planck, c.clock_exponent)
    t_total = n * s.tau

    f_close = c.mu0 * s.gamma1 * s.gamma2 / (c.hbar * s.d ** 3)  # rad/s
    bg_minus = s.B * abs(s.gamma_minus) / c.hbar
    kres = k_exponent(n, s.B, s.gamma1, s.gamma2, s.tau, ch, c.hbar)

    dx = min_dispersion(t_total, s.mass, c.hbar)
    checks = (
        decoherence_bound(s),
        Check("dispersion_below_impact", s.d, dx, ">",
              note=f"minimum dispersion {dx:.6g} m over T = N tau"),
        Check("weak_coupling", weak_tol, f_close / bg_minus if bg_minus else math.inf,
              ">", note="f hbar/(B |Gamma_-|) below the regime gate"),
        Check("k_exponent", 1.0, kres.k, ">",
              note=f"K = {kres.k:.6g}, lower bound {kres.lower_bound:.6g}"),
        Check("tau_cap", tau_upper_bound(s), s.tau, ">"),
        mass_moment_check(s, n),
    ) + appendix1_analysis(s).checks
    notes = (
        f"transverse velocity bound {transverse_velocity(s):.6g} m/s",
        f"integrated coupling threshold and K verdict: "
        f"{'distinguishable' if collapse_distinguishable(kres.k) else 'undecidable'}",
    )
    return FeasibilityReport(checks, notes=notes)
