"""Configuration types, unit conventions, and bath spectral densities.

Everything is expressed in natural units: ``hbar = k_B = 1``, frequencies and
temperatures in units of the oscillator frequency ``omega0`` (default 1.0),
energy currents and power in units of ``omega0**2``.  The working medium is a
harmonic oscillator coupled to two harmonically modulated Lorentzian baths
("hot" and "cold") and one statically coupled Ohmic bath ("mid").
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

__all__ = [
    "TrithermError",
    "ConfigError",
    "DomainError",
    "ConsistencyError",
    "WorkingMedium",
    "LorentzianBath",
    "OhmicBath",
    "MachineConfig",
    "bose_occupation",
    "spectral_lorentzian",
    "spectral_ohmic",
    "PARAM_PATHS",
    "apply_params",
]

# Validity-warning thresholds (warnings, not errors; see MachineConfig.validate)
KAPPA_WARN_THRESHOLD = 0.1
WIDTH_WARN_FRACTION = 0.5

# Series/exponential switch-over for the Bose function
_BOSE_SERIES_CUTOFF = 1e-5


class TrithermError(Exception):
    """Base class for all tritherm errors."""


class ConfigError(TrithermError, ValueError):
    """Invalid configuration value or structure."""


class DomainError(TrithermError, ValueError):
    """Operation evaluated outside its supported domain."""


class ConsistencyError(TrithermError, RuntimeError):
    """Internal consistency violated (signals a bug or an invalid
    hand-constructed input, e.g. a sign pattern forbidden by the second law)."""


def _positive(value, name, allow_zero=False):
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{name} must be a number, got {value!r}")
    if math.isnan(value) or math.isinf(value):
        raise ConfigError(f"{name} must be finite, got {value!r}")
    if allow_zero:
        if value < 0:
            raise ConfigError(f"{name} must be >= 0, got {value!r}")
    elif value <= 0:
        raise ConfigError(f"{name} must be > 0, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class WorkingMedium:
    """Harmonic-oscillator working medium.

    Attributes
    ----------
    omega0 : float
        Characteristic oscillator frequency.  Unit of all frequencies and
        temperatures; defaults to 1.0 (natural units).
    mass : float
        Oscillator mass, natural units.
    """

    omega0: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        _positive(self.omega0, "wm.omega0")
        _positive(self.mass, "wm.mass")


@dataclass(frozen=True)
class LorentzianBath:
    """Thermal bath with a Lorentzian spectral density.

    The spectral density is peaked at ``center`` with damping width ``width``
    and an amplitude parametrized by the dimensionless coupling ``kappa``
    (the dimensionful amplitude is ``kappa * center**2 * omega0**2``).
    ``kappa = 0`` denotes a decoupled bath (two-terminal reduction).

    Attributes
    ----------
    temperature : float
        Bath temperature (units of omega0).
    center : float
        Peak frequency of the spectral density (units of omega0).
    width : float
        Damping width of the peak (units of omega0).
    kappa : float
        Dimensionless coupling amplitude; perturbative regime is kappa << 1.
    """

    temperature: float
    center: float
    width: float
    kappa: float

    def __post_init__(self):
        _positive(self.temperature, "temperature")
        _positive(self.center, "center")
        _positive(self.width, "width")
        _positive(self.kappa, "kappa", allow_zero=True)

    def amplitude(self, omega0: float = 1.0) -> float:
        """Dimensionful spectral amplitude ``kappa * center**2 * omega0**2``."""
        return self.kappa * self.center ** 2 * omega0 ** 2


@dataclass(frozen=True)
class OhmicBath:
    """Statically coupled bath with a strictly Ohmic spectral density.

    ``gamma_m`` is the Ohmic damping strength.  In the weak-damping regime
    the period-averaged currents do not depend on it; it is retained for
    documentation of the physical setup only.
    """

    temperature: float
    gamma_m: float = 0.1

    def __post_init__(self):
        _positive(self.temperature, "temperature")
        _positive(self.gamma_m, "gamma_m")


@dataclass(frozen=True)
class MachineConfig:
    """Full parameter set of the driven three-terminal machine.

    The coupling modulation protocol is fixed: the hot and cold couplings are
    modulated in phase as ``cos(drive_freq * t)`` while the mid coupling is
    static.  The closed forms implemented in :mod:`tritherm.currents` assume
    this protocol; it is not configurable.

    Attributes
    ----------
    hot, cold : LorentzianBath
        The two dynamically coupled baths.
    mid : OhmicBath
        The statically coupled bath.
    wm : WorkingMedium
        The oscillator working medium.
    drive_freq : float
        Modulation frequency of the dynamical couplings; must satisfy
        ``0 < drive_freq < wm.omega0`` for evaluation.
    """

    hot: LorentzianBath
    cold: LorentzianBath
    mid: OhmicBath
    drive_freq: float
    wm: WorkingMedium = field(default_factory=WorkingMedium)

    def __post_init__(self):
        _positive(self.drive_freq, "drive_freq")

    @property
    def detuning(self) -> float:
        """Detuning of the two Lorentzian peaks, ``hot.center - cold.center``."""
        return self.hot.center - self.cold.center

    def validate(self, relax: bool = False,
                 kappa_warn: float = KAPPA_WARN_THRESHOLD,
                 width_warn: float = WIDTH_WARN_FRACTION) -> list[str]:
        """Check orderings and regime assumptions.

        Raises :class:`ConfigError` on hard violations (temperature ordering,
        drive frequency outside ``(0, omega0)``) and returns a list of
        validity warnings (perturbative couplings, underdamped widths,
        quantum regime), which evaluate fine but may leave the regime in
        which the closed forms are controlled.

        With ``relax=True`` equal temperatures are tolerated (test fixtures).
        """
        th, tm, tc = self.hot.temperature, self.mid.temperature, self.cold.temperature
        if relax:
            if not (th >= tm >= tc):
                raise ConfigError(
                    f"temperature ordering violated: need hot >= mid >= cold, "
                    f"got ({th}, {tm}, {tc})")
        elif not (th > tm > tc):
            raise ConfigError(
                f"temperature ordering violated: need hot.temperature > "
                f"mid.temperature > cold.temperature, got ({th}, {tm}, {tc})")
        w0 = self.wm.omega0
        if not (0.0 < self.drive_freq < w0):
            raise ConfigError(
                f"drive_freq must lie in (0, omega0) = (0, {w0}), got {self.drive_freq}")

        warnings = []
        if w0 <= th:
            warnings.append(
                f"quantum regime violated: omega0 = {w0} <= hot.temperature = {th}")
        for name, bath in (("hot", self.hot), ("cold", self.cold)):
            if bath.kappa >= kappa_warn:
                warnings.append(
                    f"{name}.kappa = {bath.kappa} >= {kappa_warn}: outside the "
                    f"perturbative regime, results are uncontrolled")
            if bath.width >= width_warn * w0:
                warnings.append(
                    f"{name}.width = {bath.width} >= {width_warn}*omega0: outside "
                    f"the underdamped regime")
        return warnings

    def to_dict(self) -> dict:
        return {
            "drive_freq": self.drive_freq,
            "wm": {"omega0": self.wm.omega0, "mass": self.wm.mass},
            "hot": {"temperature": self.hot.temperature, "center": self.hot.center,
                    "width": self.hot.width, "kappa": self.hot.kappa},
            "cold": {"temperature": self.cold.temperature, "center": self.cold.center,
                     "width": self.cold.width, "kappa": self.cold.kappa},
            "mid": {"temperature": self.mid.temperature, "gamma_m": self.mid.gamma_m},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MachineConfig":
        """Build a config from a nested mapping, naming offending fields."""
        if not isinstance(data, dict):
            raise ConfigError(f"config must be a mapping, got {type(data).__name__}")

        def section(name, required=True):
            sec = data.get(name)
            if sec is None:
                if required:
                    raise ConfigError(f"missing section: {name}")
                return {}
            if not isinstance(sec, dict):
                raise ConfigError(f"section {name} must be a mapping")
            return sec

        def num(sec, secname, key, default=None):
            if key not in sec:
                if default is not None:
                    return default
                raise ConfigError(f"missing field: {secname}.{key}")
            v = sec[key]
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise ConfigError(f"field {secname}.{key} must be a number, got {v!r}")
            return float(v)

        if "drive_freq" not in data:
            raise ConfigError("missing field: drive_freq")
        drive = data["drive_freq"]
        if not isinstance(drive, (int, float)) or isinstance(drive, bool):
            raise ConfigError(f"field drive_freq must be a number, got {drive!r}")

        wm_sec = section("wm", required=False)
        hot_sec = section("hot")
        cold_sec = section("cold")
        mid_sec = section("mid")

        def build(factory, secname, **kwargs):
            try:
                return factory(**kwargs)
            except ConfigError as exc:
                raise ConfigError(f"{secname}.{exc}") from None

        wm = build(WorkingMedium, "wm",
                   omega0=num(wm_sec, "wm", "omega0", 1.0),
                   mass=num(wm_sec, "wm", "mass", 1.0))
        hot = build(LorentzianBath, "hot",
                    temperature=num(hot_sec, "hot", "temperature"),
                    center=num(hot_sec, "hot", "center"),
                    width=num(hot_sec, "hot", "width"),
                    kappa=num(hot_sec, "hot", "kappa"))
        cold = build(LorentzianBath, "cold",
                     temperature=num(cold_sec, "cold", "temperature"),
                     center=num(cold_sec, "cold", "center"),
                     width=num(cold_sec, "cold", "width"),
                     kappa=num(cold_sec, "cold", "kappa"))
        mid = build(OhmicBath, "mid",
                    temperature=num(mid_sec, "mid", "temperature"),
                    gamma_m=num(mid_sec, "mid", "gamma_m", 0.1))
        return cls(hot=hot, cold=cold, mid=mid, wm=wm, drive_freq=float(drive))


# Dotted parameter paths accepted by overrides, sweeps, and searches.
PARAM_PATHS = (
    "drive_freq",
    "wm.omega0", "wm.mass",
    "hot.temperature", "hot.center", "hot.width", "hot.kappa",
    "cold.temperature", "cold.center", "cold.width", "cold.kappa",
    "mid.temperature", "mid.gamma_m",
)


def apply_params(config: MachineConfig, params: dict) -> MachineConfig:
    """Return a copy of ``config`` with dotted-path parameters replaced.

    ``params`` maps paths from :data:`PARAM_PATHS` (e.g. ``"hot.kappa"``)
    to new float values.
    """
    updates = {}
    for path, value in params.items():
        if path not in PARAM_PATHS:
            raise ConfigError(f"unknown parameter: {path!r} "
                              f"(expected one of {', '.join(PARAM_PATHS)})")
        if path == "drive_freq":
            updates["drive_freq"] = float(value)
        else:
            section, key = path.split(".")
            updates.setdefault(section, {})[key] = float(value)
    new = config
    if "drive_freq" in updates:
        new = replace(new, drive_freq=updates.pop("drive_freq"))
    for section, fields in updates.items():
        new = replace(new, **{section: replace(getattr(new, section), **fields)})
    return new


def bose_occupation(x: float) -> float:
    """Bose occupation number ``1 / (exp(x) - 1)``.

    Numerically stable over the full real line: for ``|x| < 1e-5`` the
    Laurent expansion ``1/x - 1/2 + x/12`` is used to avoid catastrophic
    cancellation, and negative arguments go through the reflection
    ``n_B(-x) = -1 - n_B(x)``, which therefore holds exactly.

    Parameters
    ----------
    x : float
        Dimensionless ratio (typically frequency / temperature); must be
        nonzero.

    Returns
    -------
    float
        The occupation number; negative (below -1) for x < 0.

    Raises
    ------
    DomainError
        If ``x == 0`` (diverging occupation).
    """
    if x == 0.0:
        raise DomainError("bose_occupation diverges at x = 0")
    if x < 0.0:
        return -1.0 - bose_occupation(-x)
    if x < _BOSE_SERIES_CUTOFF:
        return 1.0 / x - 0.5 + x / 12.0
    if x > 700.0:
        # expm1 would overflow; fall back to the underflow-safe form
        e = math.exp(-x)
        return e / (1.0 - e)
    return 1.0 / math.expm1(x)


def spectral_lorentzian(bath: LorentzianBath, wm: WorkingMedium, omega: float) -> float:
    """Lorentzian spectral density of a dynamically coupled bath.

    Evaluates ``d * M * gamma * omega / ((omega^2 - center^2)^2 +
    gamma^2 omega^2)`` with ``d = kappa * center**2 * omega0**2``.

    Parameters
    ----------
    bath : LorentzianBath
    wm : WorkingMedium
    omega : float
        Evaluation frequency, ``omega >= 0``.

    Returns
    -------
    float
        The spectral density value (0 at ``omega = 0``).
    """
    if omega < 0:
        raise DomainError(f"spectral density requires omega >= 0, got {omega}")
    d = bath.amplitude(wm.omega0)
    num = d * wm.mass * bath.width * omega
    den = (omega * omega - bath.center * bath.center) ** 2 \
        + bath.width * bath.width * omega * omega
    return num / den


def spectral_ohmic(bath: OhmicBath, wm: WorkingMedium, omega: float) -> float:
    """Strictly Ohmic spectral density ``M * gamma_m * omega``."""
    if omega < 0:
        raise DomainError(f"spectral density requires omega >= 0, got {omega}")
    return wm.mass * bath.gamma_m * omega
