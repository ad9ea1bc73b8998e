"""Dispersive readout relations and steady-state resonator line shapes.

Sign conventions: chi is defined such that the resonator sits at f_r0 with
the qubit in its ground state and at f_r1 = f_r0 + 2*chi with the qubit
excited. The bare (qubit-free) resonator frequency is the midpoint
f_r0 + chi, with the state-dependent pull of +/- chi about it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

MODES = ("transmission", "reflection")


@dataclass(frozen=True)
class ResonatorResponse:
    """Complex steady-state response sampled on a frequency axis."""

    f_axis: np.ndarray
    s_complex: np.ndarray
    mode: str

    def __post_init__(self):
        f = np.asarray(self.f_axis, dtype=float)
        s = np.asarray(self.s_complex, dtype=complex)
        object.__setattr__(self, "f_axis", f)
        object.__setattr__(self, "s_complex", s)
        if f.shape != s.shape:
            raise ValueError("f_axis and s_complex must have the same length")
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(s))):
            raise ValueError("response contains non-finite values")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


def chi_from_params(g: float, delta0: float, e_c: float) -> float:
    """Dispersive shift chi = -g^2 e_c / (delta0 (delta0 - e_c)).

    All inputs and the result are /2pi frequencies in Hz. Valid for a
    transmon dispersively detuned from the resonator; a warning is issued
    when |delta0| <= 10 g.
    """
    if delta0 == 0.0 or delta0 == e_c:
        raise ValueError("delta0 = 0 or delta0 = e_c sits on a pole of the relation")
    if abs(delta0) <= 10.0 * abs(g):
        warnings.warn(
            f"|delta0| = {abs(delta0):g} Hz is not large against 10*g = {10 * abs(g):g} Hz; "
            "the dispersive approximation is marginal",
            stacklevel=2,
        )
    return -(g**2) * e_c / (delta0 * (delta0 - e_c))


def g_from_chi(chi: float, delta0: float, e_c: float) -> float:
    """Invert :func:`chi_from_params` for the coupling g (Hz).

    Requires chi * delta0 * (delta0 - e_c) <= 0 so that the radicand
    -chi delta0 (delta0 - e_c) / e_c is non-negative.
    """
    if delta0 == 0.0 or delta0 == e_c:
        raise ValueError("delta0 = 0 or delta0 = e_c sits on a pole of the relation")
    radicand = -chi * delta0 * (delta0 - e_c) / e_c
    if radicand < 0:
        raise ValueError(
            "negative radicand: the signs of chi and delta0*(delta0 - e_c) are inconsistent"
        )
    return float(np.sqrt(radicand))


def _lorentzian(f_axis: np.ndarray, f_pole: float, kappa_ang: float, mode: str) -> np.ndarray:
    delta_ang = 2.0 * np.pi * (np.asarray(f_axis, dtype=float) - f_pole)
    if mode == "transmission":
        return (kappa_ang / 2.0) / (1j * delta_ang + kappa_ang / 2.0)
    return 1.0 - kappa_ang / (1j * delta_ang + kappa_ang / 2.0)


def steady_state_response(
    params,
    qubit_state: int,
    f_axis,
    drive_amp: complex = 1.0,
    mode: str = "transmission",
    baseline: complex = 0.0,
) -> ResonatorResponse:
    """Single-pole resonator response for a fixed qubit state.

    The pole sits at f_r0 + 2*chi*qubit_state, i.e. the measured ground-
    state frequency for state 0 and f_r1 for state 1 (the pull is +/- chi
    about the bare frequency f_r0 + chi). Transmission is a complex
    Lorentzian normalized to ``drive_amp`` on resonance; reflection is the
    standard one-port input-output response with the same pole. ``baseline``
    models a flat complex background (e.g. direct transmission far below
    the resonance).
    """
    if qubit_state not in (0, 1):
        raise ValueError(f"qubit_state must be 0 or 1, got {qubit_state!r}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    f_axis = np.asarray(f_axis, dtype=float)
    if f_axis.size == 0:
        raise ValueError("f_axis must be non-empty")
    f_pole = params.f_r0 + 2.0 * params.chi * qubit_state
    s = drive_amp * _lorentzian(f_axis, f_pole, params.kappa_angular, mode) + baseline
    return ResonatorResponse(f_axis=f_axis, s_complex=s, mode=mode)


def mixed_state_response(
    params,
    p1: float,
    f_axis,
    drive_amp: complex = 1.0,
    mode: str = "transmission",
    baseline: complex = 0.0,
) -> ResonatorResponse:
    """Complex-weighted sum of the two qubit-state responses.

    For a static mixture the excited-state weight equals ``p1``; during a
    long measurement pulse the caller passes the decay-averaged weight
    instead.
    """
    if not 0.0 <= p1 <= 1.0:
        raise ValueError(f"p1 must lie in [0, 1], got {p1!r}")
    r0 = steady_state_response(params, 0, f_axis, drive_amp, mode, baseline)
    r1 = steady_state_response(params, 1, f_axis, drive_amp, mode, baseline)
    s = (1.0 - p1) * r0.s_complex + p1 * r1.s_complex
    return ResonatorResponse(f_axis=r0.f_axis, s_complex=s, mode=mode)


def decay_averaged_weight(t1: float, readout_len: float) -> float:
    """Average excited-state population over a readout window.

    An excited qubit decaying with T1 spends a fraction
    (T1/tau)(1 - exp(-tau/T1)) of a window tau in the excited state; this
    is the effective weight of the shifted pole in a pulsed measurement.
    """
    if readout_len <= 0:
        raise ValueError("readout_len must be positive")
    x = readout_len / t1
    return float((1.0 - np.exp(-x)) / x)
