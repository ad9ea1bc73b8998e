"""Synthetic experiments and their inverse fits.

Every experiment the characterization pipeline needs is synthesized as a
noisy dataset (complex IQ points for resonator sweeps, reduced excited-state
populations for time-domain and spectroscopy sweeps) and paired with a
least-squares estimator that recovers the generating parameter.

Noise model: additive Gaussian of standard deviation
``noise_sigma / sqrt(averages)`` per sample and per quadrature, seeded.
The per-point SNR of a dataset is the signal scale (peak amplitude for IQ
sweeps, 1 for populations) divided by that effective sigma.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .calibration import DEFAULT_CALIBRATION, DriveCalibration
from .dispersive import (
    ResonatorResponse,
    decay_averaged_weight,
    mixed_state_response,
)
from .fitting import FitResult, fit_model, levenberg_marquardt
from .params import DeviceParams
from .transmon import diagonalize_transmon, transition_frequencies

KINDS = ("resonator_sweep", "qubit_spectroscopy", "rabi", "t1", "ramsey", "echo")

#: sweep kinds whose axis is a frequency
FREQUENCY_KINDS = ("resonator_sweep", "qubit_spectroscopy")


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep definition for one synthetic experiment.

    ``pi_pulse`` prepares the qubit in its excited state immediately before
    the measurement pulse (resonator sweeps only).
    """

    kind: str
    sweep_axis: np.ndarray
    drive_power_dbm: float = -20.0
    readout_power_dbm: float = -35.0
    readout_len: float = 16e-6
    qubit_pulse_len: float = 20e-9
    detuning: float = 0.0
    averages: int = 1
    noise_sigma: float = 0.0
    seed: int = 0
    pi_pulse: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unsupported experiment kind {self.kind!r}")
        axis = np.asarray(self.sweep_axis, dtype=float)
        object.__setattr__(self, "sweep_axis", axis)
        if axis.ndim != 1 or axis.size == 0:
            raise ValueError("sweep_axis must be a non-empty 1-d array")
        if np.any(np.diff(axis) < 0):
            raise ValueError("sweep_axis must be sorted")
        if int(self.averages) < 1:
            raise ValueError("averages must be >= 1")
        object.__setattr__(self, "averages", int(self.averages))
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be non-negative")
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def axis_name(self) -> str:
        return "f_hz" if self.kind in FREQUENCY_KINDS else "t_s"

    def effective_sigma(self) -> float:
        return self.noise_sigma / np.sqrt(self.averages)


@dataclass(frozen=True)
class Dataset:
    """Synthesized sweep: complex IQ points or a reduced p1 table."""

    kind: str
    axis: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.values)

    @property
    def axis_name(self) -> str:
        return "f_hz" if self.kind in FREQUENCY_KINDS else "t_s"


def rabi_decay_time(params: DeviceParams) -> float:
    """Decay time of driven Rabi oscillations, 2 / (1/T1 + 1/T2)."""
    return 2.0 / (1.0 / params.t1 + 1.0 / params.t2)


def qubit_spectroscopy_model(
    params: DeviceParams,
    drive_power_dbm: float,
    f_axis,
    calibration: DriveCalibration = DEFAULT_CALIBRATION,
) -> np.ndarray:
    """Steady-state p1 versus drive frequency under a continuous drive.

    The 0-1 line is the saturation Lorentzian
    p1 = (1/2) u / (1 + u + (2 pi (f - f_01))^2 T2^2) with u = W^2 T1 T2
    and W the angular Rabi rate; its FWHM is sqrt(1 + u)/(pi T2). The
    multi-photon lines at f_02/2 and f_03/3 use effective n-photon Rabi
    rates W_2 = sqrt(2) W^2/alpha and W_3 = (sqrt(6)/2) W^3/alpha^2
    (alpha = 2 pi e_c the angular anharmonicity), so their visibility
    thresholds scale as W^2 and W^3. Line positions are exact (charge-basis
    diagonalization); the multi-photon heights are qualitative.
    """
    f_axis = np.asarray(f_axis, dtype=float)
    lines = transition_frequencies(
        diagonalize_transmon(params.e_j, params.e_c, n_levels=4)
    )
    positions = (lines.f_01, lines.f_02_over_2, lines.f_03_over_3)
    omega = 2.0 * np.pi * calibration.spectroscopy_rabi(drive_power_dbm)
    alpha = 2.0 * np.pi * params.e_c
    rates = (
        omega,
        np.sqrt(2.0) * omega**2 / alpha,
        (np.sqrt(6.0) / 2.0) * omega**3 / alpha**2,
    )
    p1 = np.zeros_like(f_axis)
    for f_line, rate in zip(positions, rates):
        u = rate**2 * params.t1 * params.t2
        detuning_sq = (2.0 * np.pi * (f_axis - f_line) * params.t2) ** 2
        p1 += 0.5 * u / (1.0 + u + detuning_sq)
    return p1


def _p1_model(params: DeviceParams, cfg: ExperimentConfig,
              calibration: DriveCalibration) -> np.ndarray:
    t = cfg.sweep_axis
    if cfg.kind == "qubit_spectroscopy":
        return qubit_spectroscopy_model(params, cfg.drive_power_dbm, t, calibration)
    if cfg.kind == "rabi":
        f_rabi = calibration.rabi_frequency(cfg.drive_power_dbm)
        env = np.exp(-t / rabi_decay_time(params))
        return 0.5 * (1.0 - np.cos(2.0 * np.pi * f_rabi * t) * env)
    if cfg.kind == "t1":
        return np.exp(-t / params.t1)
    if cfg.kind == "ramsey":
        return 0.5 * (1.0 + np.cos(2.0 * np.pi * cfg.detuning * t) * np.exp(-t / params.t2))
    if cfg.kind == "echo":
        return np.exp(-t / params.t2e)
    raise ValueError(f"unsupported experiment kind {cfg.kind!r}")


def synthesize(
    params: DeviceParams,
    cfg: ExperimentConfig,
    calibration: DriveCalibration = DEFAULT_CALIBRATION,
) -> Dataset:
    """Generate the noisy dataset for one experiment.

    Resonator sweeps return complex IQ points; the excited-state weight is
    the T1-decay average of an initial pi-pulse over the readout window.
    All other kinds return the reduced p1 table of the pulsed sequence
    (the trace-level model and the matched-filter extraction live in
    :mod:`coaxsim.dynamics`; the reduction is exact because the readout
    model is linear in the prepared population).
    """
    rng = np.random.default_rng(cfg.seed)
    sigma = cfg.effective_sigma()
    meta = {
        "kind": cfg.kind,
        "seed": cfg.seed,
        "noise_sigma": cfg.noise_sigma,
        "averages": cfg.averages,
        "pi_pulse": cfg.pi_pulse,
        "drive_power_dbm": cfg.drive_power_dbm,
        "readout_power_dbm": cfg.readout_power_dbm,
        "detuning_hz": cfg.detuning,
    }
    if cfg.kind == "resonator_sweep":
        weight = decay_averaged_weight(params.t1, cfg.readout_len) if cfg.pi_pulse else 0.0
        resp = mixed_state_response(params, weight, cfg.sweep_axis)
        values = resp.s_complex + sigma * (
            rng.standard_normal(resp.s_complex.size)
            + 1j * rng.standard_normal(resp.s_complex.size)
        )
        meta["excited_weight"] = weight
        return Dataset(kind=cfg.kind, axis=resp.f_axis, values=values, meta=meta)

    p1 = _p1_model(params, cfg, calibration) + sigma * rng.standard_normal(cfg.sweep_axis.size)
    return Dataset(kind=cfg.kind, axis=cfg.sweep_axis.copy(), values=p1, meta=meta)


# --- resonator line-shape fits ------------------------------------------------


def _complex_lorentzian(f, f0, q, amp, base):
    kappa_ang = 2.0 * np.pi * f0 / q
    delta = 2.0 * np.pi * (f - f0)
    return amp * (kappa_ang / 2.0) / (1j * delta + kappa_ang / 2.0) + base


def _edge_baseline(s: np.ndarray) -> complex:
    k = max(2, s.size // 20)
    return 0.5 * (np.mean(s[:k]) + np.mean(s[-k:]))


def _width_at_sqrt_half(f: np.ndarray, y: np.ndarray, peak: int) -> float:
    """Full width of |s| at 1/sqrt(2) of the peak (the |s|^2 half-maximum)."""
    level = y[peak] / np.sqrt(2.0)
    above = np.nonzero(y >= level)[0]
    if above.size < 2:
        return 2.0 * (f[1] - f[0]) if f.size > 1 else 0.0
    return float(f[above[-1]] - f[above[0]])


def fit_lorentzian_complex(resp: ResonatorResponse) -> FitResult:
    """Single complex Lorentzian fit: (f0, Q, complex amp, complex baseline).

    Initialized from the peak location of |s - baseline| and its
    half-maximum width; the sweep must span at least three linewidths.
    """
    f, s = resp.f_axis, resp.s_complex
    base0 = _edge_baseline(s)
    y = np.abs(s - base0)
    peak = int(np.argmax(y))
    scale = float(np.max(np.abs(s)))
    if y[peak] <= 1e-9 * max(scale, 1e-300) or f.size < 8:
        return FitResult(
            names=("f0_hz", "q_factor", "amp_re", "amp_im", "base_re", "base_im"),
            values=np.array([float(np.mean(f)), np.nan, 0.0, 0.0, base0.real, base0.imag]),
            sigmas=np.full(6, np.nan),
            residual_norm=np.nan,
            converged=False,
            n_iter=0,
            meta={"degenerate": "no peak above the baseline"},
        )
    width = _width_at_sqrt_half(f, y, peak)
    span = f[-1] - f[0]
    if span < 3.0 * width:
        raise ValueError(f"sweep spans {span / max(width, 1e-300):.2f} linewidths; need >= 3")
    f0 = float(f[peak])
    q0 = min(max(f0 / max(width, 1e-6 * f0), 1.0), 1e9)
    amp0 = s[peak] - base0

    def model(x, p):
        return _complex_lorentzian(x, p[0], p[1], p[2] + 1j * p[3], p[4] + 1j * p[5])

    result = fit_model(
        model,
        f,
        s,
        [f0, q0, amp0.real, amp0.imag, base0.real, base0.imag],
        ("f0_hz", "q_factor", "amp_re", "amp_im", "base_re", "base_im"),
    )
    result.meta["kappa_hz"] = result["f0_hz"] / result["q_factor"]
    return result


def fit_double_lorentzian(resp: ResonatorResponse) -> FitResult:
    """Weighted two-pole complex Lorentzian fit.

    Reports the two pole frequencies with ``f_r0_hz`` the higher one (the
    ground-state pole of a negative-shift device) and ``weight`` the weight
    of the lower pole; the pull 2*chi = f_r1 - f_r0 is surfaced in
    ``meta['two_chi_hz']``. If only one pole is resolved the fit falls back
    to :func:`fit_lorentzian_complex` and sets ``meta['fallback_single']``.
    """
    f, s = resp.f_axis, resp.s_complex
    grid = f[1] - f[0] if f.size > 1 else 0.0

    # stage 1: capture the dominant pole, then look for a second one in the
    # residual - immune to the dominant peak's shoulders
    single = fit_lorentzian_complex(resp)
    if not single.converged:
        single.meta["fallback_single"] = True
        return single
    amp1 = single["amp_re"] + 1j * single["amp_im"]
    base1 = single["base_re"] + 1j * single["base_im"]
    f1, q1 = single["f0_hz"], single["q_factor"]
    residual = s - _complex_lorentzian(f, f1, q1, amp1, base1)
    window = max(3, f.size // 100)
    y2 = _smooth(np.abs(residual), window)
    kappa1 = f1 / q1
    near_first = np.abs(f - f1) <= max(kappa1, 3.0 * grid)
    y2_masked = np.where(near_first, 0.0, y2)
    second = int(np.argmax(y2_masked))
    edge = max(2, y2.size // 20)
    noise_floor = float(np.std(np.concatenate([y2[:edge], y2[-edge:]])))
    resolved = (
        y2_masked[second] > max(0.04 * abs(amp1), 4.0 * noise_floor)
        and abs(f[second] - f1) > max(0.5 * kappa1, 2.0 * grid)
    )
    if not resolved:
        single.meta["fallback_single"] = True
        return single

    h1, h2 = abs(amp1), float(y2_masked[second])
    w_lower = h2 / (h1 + h2) if f[second] < f1 else h1 / (h1 + h2)
    f_hi, f_lo = max(f1, float(f[second])), min(f1, float(f[second]))
    w0 = float(w_lower)
    q0 = q1
    amp0 = amp1 * (h1 + h2) / h1
    base0 = base1

    def model(x, p):
        f_r0, f_r1, w, q = p[0], p[1], p[2], p[3]
        amp, base = p[4] + 1j * p[5], p[6] + 1j * p[7]
        kappa_ang = 2.0 * np.pi * f_r0 / q
        l0 = (kappa_ang / 2.0) / (1j * 2.0 * np.pi * (x - f_r0) + kappa_ang / 2.0)
        l1 = (kappa_ang / 2.0) / (1j * 2.0 * np.pi * (x - f_r1) + kappa_ang / 2.0)
        return amp * ((1.0 - w) * l0 + w * l1) + base

    result = fit_model(
        model,
        f,
        s,
        [f_hi, f_lo, w0, q0, amp0.real, amp0.imag, base0.real, base0.imag],
        ("f_r0_hz", "f_r1_hz", "weight", "q_factor", "amp_re", "amp_im", "base_re", "base_im"),
    )
    # keep the labeling convention if the optimizer swapped the poles
    if result["f_r0_hz"] < result["f_r1_hz"]:
        v = result.values.copy()
        v[0], v[1] = result["f_r1_hz"], result["f_r0_hz"]
        v[2] = 1.0 - v[2]
        sig = result.sigmas.copy()
        sig[0], sig[1] = sig[1], sig[0]
        result = FitResult(result.names, v, sig, result.residual_norm,
                           result.converged, result.n_iter, result.meta)
    result.meta["two_chi_hz"] = result["f_r1_hz"] - result["f_r0_hz"]
    return result


def fit_lorentzian_real(axis, y) -> FitResult:
    """Plain Lorentzian line fit for real-valued spectroscopy data."""
    axis = np.asarray(axis, dtype=float)
    y = np.asarray(y, dtype=float)
    k = max(2, y.size // 20)
    base0 = 0.5 * (np.mean(y[:k]) + np.mean(y[-k:]))
    peak = int(np.argmax(y - base0))
    h0 = y[peak] - base0
    if h0 <= 0:
        raise ValueError("no line above the baseline")
    above = np.nonzero(y - base0 >= h0 / 2.0)[0]
    width = max(float(axis[above[-1]] - axis[above[0]]), axis[1] - axis[0])

    def model(x, p):
        f0, fwhm, height, base = p
        return height / (1.0 + ((x - f0) / (fwhm / 2.0)) ** 2) + base

    return fit_model(
        model,
        axis,
        y,
        [float(axis[peak]), width, h0, base0],
        ("f_center_hz", "fwhm_hz", "height", "offset"),
    )


# --- time-domain fits ---------------------------------------------------------


def _damped_exp(t: np.ndarray, decay_time: float) -> np.ndarray:
    # cap the exponent so a negative trial decay time rejects via a huge
    # (but finite) cost instead of an overflow warning
    return np.exp(np.minimum(-t / decay_time, 700.0))


def fit_decay(axis, values) -> FitResult:
    """Fit A exp(-t/T), initialized by log-linear regression.

    Constant (non-decaying) data yield T -> inf, flagged as non-converged;
    data that are nowhere positive raise ValueError.
    """
    axis = np.asarray(axis, dtype=float)
    values = np.asarray(values, dtype=float)
    if axis.size < 8:
        raise ValueError("need at least 8 points")
    pos = values > 0
    if not np.any(pos):
        raise ValueError("decay fit needs some positive samples")
    slope, intercept = np.polyfit(axis[pos], np.log(values[pos]), 1)
    if slope >= -1e-300:
        return FitResult(
            names=("amplitude", "decay_time_s"),
            values=np.array([float(np.mean(values)), np.inf]),
            sigmas=np.full(2, np.nan),
            residual_norm=np.nan,
            converged=False,
            n_iter=0,
            meta={"degenerate": "no decay detected"},
        )

    def model(t, p):
        return p[0] * np.exp(-t / p[1])

    result = fit_model(model, axis, values, [np.exp(intercept), -1.0 / slope],
                       ("amplitude", "decay_time_s"))
    span = axis[-1] - axis[0]
    if result.converged and span < 1.5 * result["decay_time_s"]:
        result.meta["span_warning"] = True
    return result


def _smooth(y: np.ndarray, window: int) -> np.ndarray:
    kernel = np.ones(window) / window
    return np.convolve(y, kernel, mode="same")


def fit_damped_cosine(axis, values, with_phase: bool = True) -> FitResult:
    """Fit A cos(2 pi f t + phi) exp(-t/T) + offset.

    The frequency is initialized from the discrete Fourier peak of the
    demeaned data (parabolic bin interpolation) and refined together with
    the other parameters. Requires at least 4 samples per period and a
    span of at least 2 periods of the detected oscillation. Without a free
    phase, monotone (oscillation-free) data raise ValueError.
    """
    axis = np.asarray(axis, dtype=float)
    values = np.asarray(values, dtype=float)
    if axis.size < 8:
        raise ValueError("need at least 8 points")
    dt = float(axis[1] - axis[0])
    span = float(axis[-1] - axis[0])

    detr = values - np.mean(values)
    if not with_phase:
        smooth = _smooth(detr, max(3, values.size // 32))
        diffs = np.diff(smooth)
        if np.all(diffs <= 0) or np.all(diffs >= 0):
            raise ValueError("no oscillation: the spectral weight sits at DC")

    spectrum = np.abs(np.fft.rfft(detr))
    if spectrum.size < 3:
        raise ValueError("sweep too short for a frequency estimate")
    k = 1 + int(np.argmax(spectrum[1:]))
    # parabolic refinement of the peak bin
    if 1 <= k < spectrum.size - 1:
        s_m, s_0, s_p = spectrum[k - 1], spectrum[k], spectrum[k + 1]
        denom = s_m - 2.0 * s_0 + s_p
        shift = 0.5 * (s_m - s_p) / denom if denom != 0 else 0.0
        shift = float(np.clip(shift, -0.5, 0.5))
    else:
        shift = 0.0
    f0 = (k + shift) / (axis.size * dt)
    if f0 > 1.0 / (4.0 * dt):
        raise ValueError(f"fewer than 4 samples per period at {f0:g} Hz")
    if span * f0 < 2.0:
        raise ValueError(f"sweep spans {span * f0:.2f} periods; need >= 2")

    amp0 = 2.0 * spectrum[k] / values.size
    phase0 = float(np.angle(np.fft.rfft(detr)[k]))
    offset0 = float(np.mean(values))
    t_decay0 = span / 2.0

    names = ("amplitude", "freq_hz", "phase_rad", "decay_time_s", "offset")
    if with_phase:
        def model(t, p):
            return p[0] * np.cos(2.0 * np.pi * p[1] * t + p[2]) * np.exp(-t / p[3]) + p[4]

        result = fit_model(model, axis, values, [amp0, f0, phase0, t_decay0, offset0], names)
    else:
        def residual(p):
            y = p[0] * np.cos(2.0 * np.pi * p[1] * axis) * np.exp(-axis / p[2]) + p[3]
            return y - values

        # the sign of the amplitude absorbs the phase
        a_signed = amp0 if abs(phase0) < np.pi / 2.0 else -amp0
        reduced = levenberg_marquardt(residual, [a_signed, f0, t_decay0, offset0],
                                      ("amplitude", "freq_hz", "decay_time_s", "offset"))
        values_full = np.insert(reduced.values, 2, 0.0)
        sigmas_full = np.insert(reduced.sigmas, 2, 0.0)
        result = FitResult(names, values_full, sigmas_full, reduced.residual_norm,
                           reduced.converged, reduced.n_iter, reduced.meta)
    if result.converged and result["decay_time_s"] > span:
        result.meta["decay_unresolved"] = True
    return result


def run_echo(
    params: DeviceParams,
    cfg: ExperimentConfig,
    calibration: DriveCalibration = DEFAULT_CALIBRATION,
) -> FitResult:
    """Synthesize an echo decay and fit its envelope."""
    if cfg.kind != "echo":
        cfg = replace(cfg, kind="echo")
    ds = synthesize(params, cfg, calibration)
    return fit_decay(ds.axis, ds.values)


# --- sweep defaults -----------------------------------------------------------


def default_config(
    kind: str,
    params: DeviceParams,
    pi_pulse: bool = False,
    detuning: float = 4.5e6,
    seed: int = 0,
    noise_sigma: float = 0.0,
    averages: int = 1,
) -> ExperimentConfig:
    """Sweep definitions sized for the reference device tolerances."""
    pad = 25e6
    if kind == "resonator_sweep":
        lo = min(params.f_r0, params.f_r1) - pad if pi_pulse else params.f_r0 - pad
        hi = params.f_r0 + pad
        axis = np.linspace(lo, hi, 901 if pi_pulse else 801)
        power = -20.0
    elif kind == "qubit_spectroscopy":
        axis = np.linspace(params.f_01 - 250e6, params.f_01 + 250e6, 1201)
        power = -35.0
    elif kind == "rabi":
        axis = np.linspace(0.0, 2.0e-6, 1024)
        power = -20.0
    elif kind == "t1":
        axis = np.linspace(0.0, 3.0 * params.t1, 2000)
        power = -20.0
    elif kind == "ramsey":
        axis = np.linspace(0.0, 2.5 * params.t2, 8000)
        power = -20.0
    elif kind == "echo":
        axis = np.linspace(0.0, 3.0 * params.t2e, 2000)
        power = -20.0
    else:
        raise ValueError(f"unsupported experiment kind {kind!r}")
    # resonator sweeps use a short probe pulse, so an excited qubit decays
    # only partially during the measurement; time-domain readout is long
    readout_len = 1e-6 if kind == "resonator_sweep" else 16e-6
    return ExperimentConfig(
        kind=kind,
        sweep_axis=axis,
        drive_power_dbm=power,
        readout_len=readout_len,
        detuning=detuning if kind == "ramsey" else 0.0,
        pi_pulse=pi_pulse and kind == "resonator_sweep",
        seed=seed,
        noise_sigma=noise_sigma,
        averages=averages,
    )
