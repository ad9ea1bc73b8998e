"""Single-qubit Clifford randomized benchmarking and residual-population
thermometry, both at the gate/channel level (no pulse shapes).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.constants import h as _H, k as _KB

from .fitting import FitResult, levenberg_marquardt
from .params import DeviceParams

# SU(2) representatives of the primitive generators
_SQ2 = 1.0 / np.sqrt(2.0)
_PRIMITIVES: dict[str, np.ndarray] = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, -1j], [-1j, 0]], dtype=complex),
    "Y": np.array([[0, -1], [1, 0]], dtype=complex),
    "X/2": _SQ2 * np.array([[1, -1j], [-1j, 1]], dtype=complex),
    "-X/2": _SQ2 * np.array([[1, 1j], [1j, 1]], dtype=complex),
    "Y/2": _SQ2 * np.array([[1, -1], [1, 1]], dtype=complex),
    "-Y/2": _SQ2 * np.array([[1, 1], [-1, 1]], dtype=complex),
}

#: generator order used for breadth-first enumeration (deterministic words)
_GENERATORS = ("X/2", "-X/2", "Y/2", "-Y/2", "X", "Y")


@dataclass(frozen=True)
class CliffordElement:
    """One of the 24 single-qubit Cliffords with its canonical pulse word.

    ``primitive_count`` counts the physical pulse slots of the canonical
    decomposition; the identity is realized as one explicit idle pulse, so
    its count is 1 and the group average is 45/24 = 1.875.
    """

    unitary: np.ndarray
    index: int
    primitive_count: int
    word: tuple[str, ...]


def _same_up_to_phase(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    return abs(abs(np.trace(u.conj().T @ v)) - 2.0) < tol


def build_clifford_group() -> list[CliffordElement]:
    """Enumerate the 24 single-qubit Cliffords over {+-X/2, +-Y/2, X, Y}.

    Breadth-first search assigns every element its shortest generator word
    (ties broken by the fixed generator order); words are recorded as
    applied left to right. The identity keeps index 0.
    """
    elements: list[CliffordElement] = [
        CliffordElement(unitary=np.eye(2, dtype=complex), index=0,
                        primitive_count=1, word=("I",))
    ]
    frontier = [0]
    while frontier and len(elements) < 24:
        next_frontier = []
        for idx in frontier:
            base = elements[idx]
            for name in _GENERATORS:
                u = _PRIMITIVES[name] @ base.unitary
                if any(_same_up_to_phase(u, el.unitary) for el in elements):
                    continue
                word = () if base.word == ("I",) else base.word
                new = CliffordElement(
                    unitary=u,
                    index=len(elements),
                    primitive_count=len(word) + 1,
                    word=word + (name,),
                )
                elements.append(new)
                next_frontier.append(new.index)
        frontier = next_frontier
    if len(elements) != 24:
        raise RuntimeError(f"Clifford enumeration found {len(elements)} elements")
    return elements


def mean_primitive_count(group: Sequence[CliffordElement]) -> float:
    return float(np.mean([el.primitive_count for el in group]))


def find_element(group: Sequence[CliffordElement], unitary: np.ndarray) -> CliffordElement:
    """Group element equal to ``unitary`` up to a global phase."""
    for el in group:
        if _same_up_to_phase(el.unitary, unitary):
            return el
    raise ValueError("unitary is not a Clifford element")


def rb_sequence(
    m: int, seed: int, group: Optional[Sequence[CliffordElement]] = None
) -> tuple[np.ndarray, CliffordElement]:
    """m uniformly random Cliffords plus the unique recovery element.

    The recovery element composes with the sequence (applied left to
    right) to the identity up to a global phase.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    group = list(group) if group is not None else build_clifford_group()
    rng = np.random.default_rng(seed)
    indices = rng.integers(0, len(group), size=m)
    total = np.eye(2, dtype=complex)
    for idx in indices:
        total = group[idx].unitary @ total
    recovery = find_element(group, total.conj().T)
    return indices, recovery


@dataclass(frozen=True)
class NoiseChannel:
    """Per-gate error channel.

    ``kind`` is ``"t1_t2"`` (amplitude damping for the T1 decay plus the
    extra pure dephasing required to meet T2 over one gate time) or
    ``"depolarizing"`` with probability ``p_depol``.
    """

    kind: str
    t_gate: float = 20e-9
    t1: float = np.inf
    t2: float = np.inf
    p_depol: float = 0.0

    def __post_init__(self):
        if self.kind not in ("t1_t2", "depolarizing"):
            raise ValueError(f"unknown channel kind {self.kind!r}")
        if self.kind == "depolarizing":
            if not 0.0 <= self.p_depol <= 1.0:
                raise ValueError("p_depol must lie in [0, 1]")
            return
        if self.t_gate <= 0 or self.t1 <= 0 or self.t2 <= 0:
            raise ValueError("t_gate, t1 and t2 must be positive")
        if self.t2 > 2.0 * self.t1 * (1.0 + 1e-9):
            raise ValueError("t2 must not exceed 2*t1")
        gamma = 1.0 - np.exp(-self.t_gate / self.t1)
        if not 0.0 <= gamma <= 1.0:
            raise ValueError("invalid amplitude-damping probability")

    def apply(self, rho: np.ndarray) -> np.ndarray:
        if self.kind == "depolarizing":
            return (1.0 - self.p_depol) * rho + self.p_depol * 0.5 * np.trace(rho) * np.eye(2)
        gamma = 1.0 - np.exp(-self.t_gate / self.t1)
        # amplitude damping toward the ground state (basis: |0>, |1>)
        k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - gamma)]], dtype=complex)
        k1 = np.array([[0.0, np.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
        out = k0 @ rho @ k0.conj().T + k1 @ rho @ k1.conj().T
        # extra pure dephasing so that coherences decay with T2 overall
        rate_phi = 1.0 / self.t2 - 0.5 / self.t1
        if rate_phi > 0:
            factor = np.exp(-self.t_gate * rate_phi)
            out = out * np.array([[1.0, factor], [factor, 1.0]])
        return out


@dataclass(frozen=True)
class RBTable:
    """Mean survival probability versus sequence length."""

    m_values: np.ndarray
    survival: np.ndarray
    stderr: np.ndarray
    n_seq: int
    noise_per: str
    meta: dict = field(default_factory=dict)


def simulate_rb(
    channel: NoiseChannel,
    m_list: Sequence[int],
    n_seq: int,
    seed: int = 0,
    noise_per: str = "primitive",
    group: Optional[Sequence[CliffordElement]] = None,
) -> RBTable:
    """Density-matrix simulation of randomized benchmarking.

    Each Clifford (including the recovery) is applied as its ideal unitary
    followed by the error channel ``primitive_count`` times
    (``noise_per="primitive"``) or exactly once (``noise_per="clifford"``).
    Survival is <0|rho|0> after the recovery, averaged over ``n_seq``
    random sequences with per-sequence seed streams.
    """
    if noise_per not in ("primitive", "clifford"):
        raise ValueError(f"noise_per must be 'primitive' or 'clifford', got {noise_per!r}")
    group = list(group) if group is not None else build_clifford_group()
    seeds = np.random.SeedSequence(seed).generate_state(len(m_list) * n_seq)
    means = np.empty(len(m_list))
    errs = np.empty(len(m_list))
    rho0 = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
    for i, m in enumerate(m_list):
        survivals = np.empty(n_seq)
        for s in range(n_seq):
            indices, recovery = rb_sequence(int(m), int(seeds[i * n_seq + s]), group)
            rho = rho0
            for idx in list(indices) + [recovery.index]:
                el = group[idx]
                rho = el.unitary @ rho @ el.unitary.conj().T
                repeats = el.primitive_count if noise_per == "primitive" else 1
                for _ in range(repeats):
                    rho = channel.apply(rho)
            survivals[s] = rho[0, 0].real
        means[i] = survivals.mean()
        errs[i] = survivals.std(ddof=1) / np.sqrt(n_seq) if n_seq > 1 else 0.0
    return RBTable(
        m_values=np.asarray(m_list, dtype=float),
        survival=means,
        stderr=errs,
        n_seq=n_seq,
        noise_per=noise_per,
        meta={"seed": seed, "channel": channel.kind},
    )


def fit_rb(table: RBTable, mean_primitives: float = 45.0 / 24.0) -> FitResult:
    """Fit survival = A p^m + B and derive gate fidelities.

    r_clifford = (1 - p)/2 is the average error per Clifford;
    f_primitive = 1 - r_clifford / mean_primitives spreads it over the
    canonical decomposition (1.875 pulse slots per Clifford on average).
    """
    m, y = table.m_values, table.survival
    if np.unique(m).size < 4:
        raise ValueError("need at least 4 distinct sequence lengths")
    tail = float(np.mean(y[-max(1, y.size // 4):]))
    b0 = min(max(tail, 0.0), 1.0)
    a0 = float(y[0] - b0)
    if abs(a0) < 1e-12:
        a0 = 0.5
    ratio = np.clip((y - b0) / a0, 1e-12, None)
    slope = np.polyfit(m, np.log(ratio), 1)[0]
    p0 = float(np.clip(np.exp(slope), 1e-6, 1.0))

    def residual(pvec):
        return pvec[0] * pvec[2] ** m + pvec[1] - y

    res = levenberg_marquardt(residual, [a0, b0, p0], ("A", "B", "p"))
    p = res["p"]
    converged = res.converged and 0.0 < p <= 1.0
    r_clifford = (1.0 - p) / 2.0
    f_primitive = 1.0 - r_clifford / mean_primitives
    sigma_p = res.sigma("p")
    values = np.concatenate([res.values, [r_clifford, f_primitive]])
    sigmas = np.concatenate([res.sigmas, [sigma_p / 2.0, sigma_p / (2.0 * mean_primitives)]])
    return FitResult(
        names=("A", "B", "p", "r_clifford", "f_primitive"),
        values=values,
        sigmas=sigmas,
        residual_norm=res.residual_norm,
        converged=converged,
        n_iter=res.n_iter,
        meta={"mean_primitives": mean_primitives},
    )


# --- thermometry ----------------------------------------------------------------


def temperature_bound(p1_residual: float, f_01: float) -> float:
    """Two-level Boltzmann temperature from a residual excited population.

    T = (h f_01 / k_B) / ln((1 - p1)/p1); p1 >= 0.5 would correspond to a
    negative temperature and raises ValueError.
    """
    if not 0.0 < p1_residual < 0.5:
        raise ValueError(f"p1_residual must lie in (0, 0.5), got {p1_residual!r}")
    return (_H * f_01 / _KB) / np.log((1.0 - p1_residual) / p1_residual)


def thermal_population(temperature: float, f_01: float) -> float:
    """Inverse of :func:`temperature_bound`: p1 = 1/(1 + exp(h f/kB T))."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    return 1.0 / (1.0 + np.exp(_H * f_01 / (_KB * temperature)))


@dataclass(frozen=True)
class ThermometryResult:
    rabi_amp_with_pi: float
    rabi_amp_without_pi: float
    p1_estimate: float


def simulate_thermometry(
    params: DeviceParams,
    p1_thermal: float,
    seed: int = 0,
    noise_sigma: float = 0.0,
    n_points: int = 101,
) -> ThermometryResult:
    """Residual-population measurement via Rabi oscillations on the 1-2 line.

    A three-level population model is driven resonantly on the 1-2
    transition over one full Rabi period, with and without an initial pi
    pulse on 0-1. The oscillation amplitude of the readout signal is
    proportional to the population available in level 1, so
    p1 = amp_without / (amp_with + amp_without).
    """
    if not 0.0 <= p1_thermal <= 0.3:
        raise ValueError("p1_thermal must lie in [0, 0.3]")
    rng = np.random.default_rng(seed)
    theta = np.linspace(0.0, 2.0 * np.pi, n_points)
    # arbitrary but distinct readout responses of the three levels
    response = np.array([0.0, 1.0, 1.6])

    def rabi_amplitude(pops: np.ndarray) -> float:
        p1_t = pops[1] * np.cos(theta / 2.0) ** 2 + pops[2] * np.sin(theta / 2.0) ** 2
        p2_t = pops[1] * np.sin(theta / 2.0) ** 2 + pops[2] * np.cos(theta / 2.0) ** 2
        signal = response[0] * pops[0] + response[1] * p1_t + response[2] * p2_t
        if noise_sigma > 0:
            signal = signal + noise_sigma * rng.standard_normal(signal.size)
        return 0.5 * float(np.max(signal) - np.min(signal))

    thermal = np.array([1.0 - p1_thermal, p1_thermal, 0.0])
    after_pi = thermal[[1, 0, 2]]
    amp_without = rabi_amplitude(thermal)
    amp_with = rabi_amplitude(after_pi)
    total = amp_with + amp_without
    p1_estimate = amp_without / total if total > 0 else 0.0
    return ThermometryResult(
        rabi_amp_with_pi=amp_with,
        rabi_amp_without_pi=amp_without,
        p1_estimate=float(p1_estimate),
    )
