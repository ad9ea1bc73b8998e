"""Device parameter records and the lumped-element circuit description.

Unit conventions used throughout the package:

* every public frequency is an ordinary frequency in Hz (not angular);
  conversion to angular frequencies happens inside the operations that
  need them,
* energies are quoted as frequencies E/h in Hz,
* times are in seconds, capacitances in farad, inductances in henry.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, fields

import numpy as np

from .errors import ConfigError

#: relative slack allowed on the t2 <= 2*t1 physicality bound
_T2_TOL = 1e-9

#: minimum E_J/E_C ratio before the charge-insensitive regime breaks down
TRANSMON_REGIME_RATIO = 20.0


@dataclass(frozen=True)
class DeviceParams:
    """Measured parameter record of a single transmon-resonator unit cell.

    Attributes
    ----------
    f_r0 : float
        Resonator frequency with the qubit in its ground state [Hz].
    q_factor : float
        Loaded quality factor of the resonator (dimensionless).
    f_01 : float
        Qubit 0-1 transition frequency [Hz].
    e_c : float
        Charging energy E_C/h [Hz].
    e_j : float
        Josephson energy E_J/h [Hz].
    g : float
        Qubit-resonator coupling g/2pi [Hz].
    chi : float
        Dispersive shift chi/2pi [Hz]; signed, negative for a qubit
        below the resonator.
    t1, t2, t2e : float
        Energy relaxation, Ramsey and echo coherence times [s].
    """

    f_r0: float
    q_factor: float
    f_01: float
    e_c: float
    e_j: float
    g: float
    chi: float
    t1: float
    t2: float
    t2e: float

    def __post_init__(self):
        self.validate()

    def validate(self):
        positive = ["f_r0", "q_factor", "f_01", "e_c", "e_j", "g", "t1", "t2", "t2e"]
        for name in positive:
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be strictly positive, got {value!r}")
        if not np.isfinite(self.chi):
            raise ConfigError(f"chi must be finite, got {self.chi!r}")
        if self.t2 > 2.0 * self.t1 * (1.0 + _T2_TOL):
            raise ConfigError(
                f"t2 = {self.t2:g} s exceeds the physical bound 2*t1 = {2 * self.t1:g} s"
            )
        if self.e_j / self.e_c <= TRANSMON_REGIME_RATIO:
            warnings.warn(
                f"e_j/e_c = {self.e_j / self.e_c:.1f} is outside the "
                f"charge-insensitive regime (> {TRANSMON_REGIME_RATIO:g})",
                stacklevel=2,
            )

    @property
    def kappa(self) -> float:
        """Total resonator linewidth kappa/2pi = f_r0 / Q [Hz]."""
        return self.f_r0 / self.q_factor

    @property
    def kappa_angular(self) -> float:
        """Total resonator energy decay rate kappa [rad/s]."""
        return 2.0 * np.pi * self.kappa

    @property
    def f_r1(self) -> float:
        """Resonator frequency with the qubit excited: f_r0 + 2*chi [Hz]."""
        return self.f_r0 + 2.0 * self.chi

    @property
    def gamma1(self) -> float:
        """Qubit energy relaxation rate 1/T1 [1/s]."""
        return 1.0 / self.t1


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived from a :class:`DeviceParams` record (all in Hz)."""

    delta0: float
    kappa: float
    anharmonicity: float


def derived_quantities(params: DeviceParams) -> DerivedParams:
    """Detuning, linewidth and leading-order anharmonicity of a device.

    delta0/2pi = f_01 - f_r0, kappa/2pi = f_r0/Q and the anharmonicity
    is -e_c to leading order.
    """
    if params.q_factor <= 0:
        raise ConfigError("q_factor must be strictly positive")
    return DerivedParams(
        delta0=params.f_01 - params.f_r0,
        kappa=params.f_r0 / params.q_factor,
        anharmonicity=-params.e_c,
    )


@dataclass(frozen=True)
class CircuitNetwork:
    """Lumped-element description of the unit cell.

    The two-node capacitance matrix is
    ``[[c_q + c_g, -c_g], [-c_g, c_r + c_g]]`` with the qubit node first;
    c_q is defined such that the diagonal qubit entry is c_q + c_g.

    Attributes
    ----------
    c_q : float
        Qubit shunt capacitance [F].
    c_r : float
        Resonator capacitance [F].
    c_g : float
        Qubit-resonator coupling capacitance [F]; zero decouples the two.
    l_r : float
        Resonator inductance [H].
    e_j : float
        Josephson energy E_J/h [Hz].
    """

    c_q: float
    c_r: float
    c_g: float
    l_r: float
    e_j: float

    def __post_init__(self):
        self.validate()

    def validate(self):
        for name in ("c_q", "c_r", "l_r", "e_j"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} must be strictly positive, got {value!r}")
        # c_g = 0 is allowed and describes a decoupled circuit
        if not np.isfinite(self.c_g) or self.c_g < 0:
            raise ConfigError(f"c_g must be non-negative, got {self.c_g!r}")
        c = self.capacitance_matrix()
        eigvals = np.linalg.eigvalsh(c)
        if np.any(eigvals <= 0):
            raise ConfigError("capacitance matrix is not positive definite")

    def capacitance_matrix(self) -> np.ndarray:
        return np.array(
            [[self.c_q + self.c_g, -self.c_g], [-self.c_g, self.c_r + self.c_g]]
        )


def reference_device() -> DeviceParams:
    """Nominal device record used by the CLI defaults and the test-suite."""
    return DeviceParams(
        f_r0=10.23e9,
        q_factor=2080.0,
        f_01=7.23e9,
        e_c=294e6,
        e_j=24.1e9,
        g=462e6,
        chi=-6.34e6,
        t1=4.10e-6,
        t2=5.65e-6,
        t2e=6.67e-6,
    )


# --- flat key = value serialization -----------------------------------------

_DEVICE_KEYS = {
    "f_r0_hz": "f_r0",
    "q_factor": "q_factor",
    "f_01_hz": "f_01",
    "e_c_hz": "e_c",
    "e_j_hz": "e_j",
    "g_hz": "g",
    "chi_hz": "chi",
    "t1_s": "t1",
    "t2_s": "t2",
    "t2e_s": "t2e",
}

_NETWORK_KEYS = {
    "c_q_f": "c_q",
    "c_r_f": "c_r",
    "c_g_f": "c_g",
    "l_r_h": "l_r",
    "e_j_hz": "e_j",
}


def parse_kv_text(text: str) -> dict[str, float]:
    """Parse flat ``key = value`` text; raises :class:`ConfigError` with the
    offending line number on malformed input."""
    out: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            out[key] = float(value.strip())
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: invalid number {value.strip()!r}") from exc
    return out


def format_kv_text(values: dict[str, float]) -> str:
    return "".join(f"{key} = {value!r}\n" for key, value in values.items())


def _from_kv(cls, key_map: dict[str, str], values: dict[str, float]):
    unknown = set(values) - set(key_map)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    missing = set(key_map) - set(values)
    if missing:
        raise ConfigError(f"missing keys: {', '.join(sorted(missing))}")
    return cls(**{attr: values[key] for key, attr in key_map.items()})


def device_params_to_text(params: DeviceParams) -> str:
    return format_kv_text({key: getattr(params, attr) for key, attr in _DEVICE_KEYS.items()})


def device_params_from_text(text: str) -> DeviceParams:
    return _from_kv(DeviceParams, _DEVICE_KEYS, parse_kv_text(text))


def circuit_network_to_text(net: CircuitNetwork) -> str:
    return format_kv_text({key: getattr(net, attr) for key, attr in _NETWORK_KEYS.items()})


def circuit_network_from_text(text: str) -> CircuitNetwork:
    return _from_kv(CircuitNetwork, _NETWORK_KEYS, parse_kv_text(text))


def as_dict(record) -> dict[str, float]:
    return {f.name: getattr(record, f.name) for f in fields(record)}
