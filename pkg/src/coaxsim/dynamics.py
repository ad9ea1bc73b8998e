"""Time-domain readout physics.

The pulsed measurement response is propagated with the closed three-variable
system for (<a>, <sigma_z>, <a sigma_z>) under a dispersive cavity drive and
qubit decay. With the drive frame rotating at the measurement frequency and
``delta_rm = f_center - f_drive`` (f_center the bare resonator frequency,
i.e. f_r0 + chi), the equations of motion are::

    d<a>/dt    = -i D <a>   - i X <a sz> - i eps(t)      - (k/2) <a>
    d<sz>/dt   = -g1 (1 + <sz>)
    d<a sz>/dt = -i D <a sz> - i X <a>   - i eps(t) <sz> - (k/2 + g1) <a sz> - g1 <a>

with D = 2 pi delta_rm, X = 2 pi chi, k = 2 pi f_r0 / Q and g1 = 1/T1.
The coefficient set was frozen against the density-matrix propagation in
:func:`lindblad_reference`; the <a sz> damping is k/2 + g1 (not 2 g1),
which is also required for the decayed state <a sz> = -<a> to be
stationary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .calibration import DEFAULT_CALIBRATION, DriveCalibration
from .errors import CutoffError
from .params import DeviceParams

#: the integration step must stay below 1/(STEP_RULE * fastest rate)
STEP_RULE = 50.0


@dataclass(frozen=True)
class ReadoutDrive:
    """Cavity measurement drive.

    Attributes
    ----------
    eps_rad : float
        Drive amplitude epsilon [rad/s].
    detuning_hz : float
        f_center - f_drive [Hz], where f_center = f_r0 + chi is the bare
        resonator frequency. Driving at the ground-state resonance f_r0
        therefore corresponds to ``detuning_hz = chi``.
    envelope : callable, optional
        Dimensionless envelope multiplying ``eps_rad``; defaults to a
        constant drive.
    """

    eps_rad: float
    detuning_hz: float
    envelope: Optional[Callable[[float], float]] = None

    def eps(self, t: float) -> float:
        if self.envelope is None:
            return self.eps_rad
        return self.eps_rad * self.envelope(t)


def drive_at_frequency(params: DeviceParams, eps_rad: float, freq_hz: float) -> ReadoutDrive:
    """Drive at an absolute frequency; detuning taken from the bare resonator."""
    f_center = params.f_r0 + params.chi
    return ReadoutDrive(eps_rad=eps_rad, detuning_hz=f_center - freq_hz)


@dataclass(frozen=True)
class CavityBlochState:
    """State of the reduced readout model at one instant."""

    a: complex
    sz: float
    asz: complex
    t: float = 0.0

    def __post_init__(self):
        if abs(self.sz) > 1.0 + 1e-9:
            raise ValueError(f"|sz| = {abs(self.sz)} exceeds 1")
        if not (np.isfinite(self.a) and np.isfinite(self.sz) and np.isfinite(self.asz)):
            raise ValueError("state components must be finite")


def qubit_state_init(qubit_state: int | float) -> CavityBlochState:
    """Vacuum-cavity initial state; ``qubit_state`` may be 0, 1 or a
    population p1 in between (sz = 2 p1 - 1)."""
    return CavityBlochState(a=0.0, sz=2.0 * float(qubit_state) - 1.0, asz=0.0)


@dataclass(frozen=True)
class CavityBlochTrace:
    """Integrated trajectory of the reduced model."""

    t_axis: np.ndarray
    a: np.ndarray
    sz: np.ndarray
    asz: np.ndarray

    def states(self) -> list[CavityBlochState]:
        return [
            CavityBlochState(a=complex(self.a[i]), sz=float(self.sz[i]),
                             asz=complex(self.asz[i]), t=float(self.t_axis[i]))
            for i in range(len(self.t_axis))
        ]


def max_step(params: DeviceParams, drive: ReadoutDrive) -> float:
    """Largest admissible integration step for the given rates."""
    delta_ang = 2.0 * np.pi * abs(drive.detuning_hz)
    chi_ang = 2.0 * np.pi * abs(params.chi)
    fastest = max(delta_ang, params.kappa_angular, chi_ang, params.gamma1)
    return 1.0 / (STEP_RULE * fastest)


def _check_axis(t_axis: np.ndarray) -> float:
    t_axis = np.asarray(t_axis, dtype=float)
    if t_axis.ndim != 1 or t_axis.size < 2:
        raise ValueError("t_axis must contain at least two samples")
    steps = np.diff(t_axis)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
        raise ValueError("t_axis must be uniformly sampled")
    return float(steps[0])


def integrate_cavity_bloch(
    params: DeviceParams,
    drive: ReadoutDrive,
    init: CavityBlochState,
    t_axis,
) -> CavityBlochTrace:
    """Fixed-step 4th-order integration of the reduced readout model.

    ``t_axis`` must be uniform with a step no larger than
    ``max_step(params, drive)``; violating the bound raises ValueError
    rather than silently losing accuracy.
    """
    t_axis = np.asarray(t_axis, dtype=float)
    dt = _check_axis(t_axis)
    bound = max_step(params, drive)
    if dt > bound * (1.0 + 1e-9):
        raise ValueError(
            f"time step {dt:.3e} s exceeds the stability bound {bound:.3e} s"
        )

    delta_ang = 2.0 * np.pi * drive.detuning_hz
    chi_ang = 2.0 * np.pi * params.chi
    kappa_half = params.kappa_angular / 2.0
    gamma1 = params.gamma1
    eps = drive.eps

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        a, sz, asz = y
        e = eps(t)
        da = -1j * delta_ang * a - 1j * chi_ang * asz - 1j * e - kappa_half * a
        dsz = -gamma1 * (1.0 + sz)
        dasz = (
            -1j * delta_ang * asz
            - 1j * chi_ang * a
            - 1j * e * sz
            - (kappa_half + gamma1) * asz
            - gamma1 * a
        )
        return np.array([da, dsz, dasz])

    y = np.array([init.a, init.sz, init.asz], dtype=complex)
    out = np.empty((t_axis.size, 3), dtype=complex)
    out[0] = y
    for i in range(t_axis.size - 1):
        t = t_axis[i]
        k1 = rhs(t, y)
        k2 = rhs(t + dt / 2.0, y + (dt / 2.0) * k1)
        k3 = rhs(t + dt / 2.0, y + (dt / 2.0) * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[i + 1] = y
    if not np.all(np.isfinite(out)):
        raise RuntimeError("non-finite value encountered during integration")
    return CavityBlochTrace(
        t_axis=t_axis, a=out[:, 0], sz=out[:, 1].real, asz=out[:, 2]
    )


def cavity_steady_state(params: DeviceParams, drive: ReadoutDrive, sz: float) -> complex:
    """Steady-state <a> with the qubit frozen at the given sz."""
    delta_ang = 2.0 * np.pi * drive.detuning_hz
    chi_ang = 2.0 * np.pi * params.chi
    return -1j * drive.eps_rad / (1j * (delta_ang + chi_ang * sz) + params.kappa_angular / 2.0)


# --- density-matrix oracle ---------------------------------------------------


@dataclass(frozen=True)
class LindbladTrace:
    """Expectation records from the full density-matrix propagation."""

    t_axis: np.ndarray
    a: np.ndarray
    sz: np.ndarray
    asz: np.ndarray
    top_level_occupation: float


def product_density_matrix(p1: float, fock_cutoff: int) -> np.ndarray:
    """(1-p1)|0><0| + p1|1><1| on the qubit, vacuum on the resonator.

    Basis ordering is qubit (ground first) tensor Fock.
    """
    if not 0.0 <= p1 <= 1.0:
        raise ValueError("p1 must lie in [0, 1]")
    rho_q = np.diag([1.0 - p1, p1]).astype(complex)
    rho_f = np.zeros((fock_cutoff, fock_cutoff), dtype=complex)
    rho_f[0, 0] = 1.0
    return np.kron(rho_q, rho_f)


def lindblad_reference(
    params: DeviceParams,
    drive: ReadoutDrive,
    rho0: np.ndarray,
    t_axis,
    fock_cutoff: int,
    rtol: float = 1e-9,
    atol: float = 1e-12,
) -> LindbladTrace:
    """Propagate the dispersive model as a full master equation.

    H = D a'a + X a'a sz + eps(t) (a + a') on qubit tensor Fock space with
    collapse operators sqrt(kappa) a and sqrt(gamma1) sigma-, all rates
    angular. Integration uses an adaptive Runge-Kutta method, deliberately
    independent of the fixed-step propagation it validates.

    Raises :class:`CutoffError` if the top Fock level acquires more than
    1e-6 population anywhere along the trajectory.
    """
    t_axis = np.asarray(t_axis, dtype=float)
    dim = 2 * fock_cutoff
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (dim, dim):
        raise ValueError(f"rho0 must be {dim}x{dim} for fock_cutoff={fock_cutoff}")

    a_f = np.diag(np.sqrt(np.arange(1, fock_cutoff)), k=1)
    i2, i_f = np.eye(2), np.eye(fock_cutoff)
    sz_q = np.diag([-1.0, 1.0])
    sm_q = np.array([[0.0, 1.0], [0.0, 0.0]])
    a_op = np.kron(i2, a_f)
    n_op = np.kron(i2, a_f.T @ a_f)
    sz_op = np.kron(sz_q, i_f)
    sm_op = np.kron(sm_q, i_f)
    asz_op = a_op @ sz_op

    delta_ang = 2.0 * np.pi * drive.detuning_hz
    chi_ang = 2.0 * np.pi * params.chi
    h_static = delta_ang * n_op + chi_ang * (n_op @ sz_op)
    h_drive = a_op + a_op.conj().T
    kappa, gamma1 = params.kappa_angular, params.gamma1

    collapse = [(kappa, a_op), (gamma1, sm_op)]
    anticomm = sum(g * (c.conj().T @ c) for g, c in collapse)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        rho = y.reshape(dim, dim)
        h = h_static + drive.eps(t) * h_drive
        drho = -1j * (h @ rho - rho @ h)
        for g, c in collapse:
            drho += g * (c @ rho @ c.conj().T)
        drho -= 0.5 * (anticomm @ rho + rho @ anticomm)
        return drho.ravel()

    sol = solve_ivp(
        rhs,
        (t_axis[0], t_axis[-1]),
        rho0.ravel(),
        t_eval=t_axis,
        rtol=rtol,
        atol=atol,
        method="RK45",
    )
    if not sol.success:
        raise RuntimeError(f"master-equation integration failed: {sol.message}")
    rhos = sol.y.T.reshape(-1, dim, dim)

    def expect(op: np.ndarray) -> np.ndarray:
        return np.einsum("tij,ji->t", rhos, op)

    # population of the highest Fock level, both qubit states
    top_idx = [fock_cutoff - 1, 2 * fock_cutoff - 1]
    top = float(np.max(np.abs(rhos[:, top_idx, top_idx].real)))
    if top > 1e-6:
        raise CutoffError(
            f"top Fock level reaches occupation {top:.2e} > 1e-6; "
            f"increase fock_cutoff beyond {fock_cutoff}"
        )
    return LindbladTrace(
        t_axis=t_axis,
        a=expect(a_op),
        sz=expect(sz_op).real,
        asz=expect(asz_op),
        top_level_occupation=top,
    )


# --- pulsed measurement traces ----------------------------------------------


@dataclass(frozen=True)
class ReadoutPulse:
    """Rectangular measurement pulse description."""

    duration: float
    power_dbm: float = -35.0
    freq_hz: Optional[float] = None  # defaults to the ground-state resonance

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError("readout pulse duration must be positive")


@dataclass(frozen=True)
class IQTrace:
    """Sampled complex amplitude versus time (the modeled ADC record)."""

    t_axis: np.ndarray
    s_complex: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.t_axis, dtype=float)
        s = np.asarray(self.s_complex, dtype=complex)
        object.__setattr__(self, "t_axis", t)
        object.__setattr__(self, "s_complex", s)
        if t.shape != s.shape:
            raise ValueError("t_axis and s_complex must have the same length")
        _check_axis(t)


def measurement_trace(
    params: DeviceParams,
    qubit_init: int,
    readout: ReadoutPulse,
    interference_offset: complex = 0.0,
    calibration: DriveCalibration = DEFAULT_CALIBRATION,
    t_axis=None,
) -> IQTrace:
    """Pulsed readout trace <a>(t) for a qubit prepared in 0 or 1.

    The constant ``interference_offset`` models the directly reflected
    component of the measurement pulse adding onto the cavity field at the
    detector; it shifts every sample inside the pulse window by the same
    complex value.
    """
    freq = params.f_r0 if readout.freq_hz is None else readout.freq_hz
    drive = drive_at_frequency(params, calibration.readout_eps(readout.power_dbm), freq)
    if t_axis is None:
        n = int(np.ceil(readout.duration / max_step(params, drive))) + 1
        t_axis = np.linspace(0.0, readout.duration, n)
    trace = integrate_cavity_bloch(params, drive, qubit_state_init(qubit_init), t_axis)
    return IQTrace(
        t_axis=trace.t_axis,
        s_complex=trace.a + interference_offset,
        meta={
            "qubit_init": qubit_init,
            "readout_power_dbm": readout.power_dbm,
            "readout_freq_hz": freq,
            "interference_offset": interference_offset,
        },
    )


@dataclass(frozen=True)
class PopulationEstimate:
    p1: float
    clamped: bool


def extract_population(trace: IQTrace, cal0: IQTrace, cal1: IQTrace) -> PopulationEstimate:
    """Matched-filter population estimate from calibrated traces.

    p1 = Re[ sum (s - s0) w / sum (s1 - s0) w ] with w = conj(s1 - s0).
    The estimate is linear in the trace, exact for the reduced readout
    model (whose solution is affine in the initial sz), and insensitive to
    any offset common to all three traces. Values outside [-0.05, 1.05]
    are clamped and flagged.
    """
    for cal in (cal0, cal1):
        if cal.t_axis.shape != trace.t_axis.shape or not np.allclose(
            cal.t_axis, trace.t_axis, rtol=1e-9, atol=0.0
        ):
            raise ValueError("all traces must share the same time axis")
    diff = cal1.s_complex - cal0.s_complex
    denom = float(np.sum(np.abs(diff) ** 2))
    scale = max(float(np.max(np.abs(cal0.s_complex))), float(np.max(np.abs(cal1.s_complex))), 1e-300)
    if denom <= (1e-12 * scale) ** 2 * diff.size:
        raise ValueError("degenerate calibration: the two reference traces coincide")
    p1 = float(np.real(np.sum((trace.s_complex - cal0.s_complex) * np.conj(diff)) / denom))
    clamped = not (-0.05 <= p1 <= 1.05)
    if clamped:
        p1 = float(np.clip(p1, -0.05, 1.05))
    return PopulationEstimate(p1=p1, clamped=clamped)
