"""Transmon spectrum from (E_J, E_C).

Exact charge-basis diagonalization, the standard large-E_J/E_C asymptotic
expansion, multi-photon transition frequencies, and the inverse map from
two measured spectral lines back to (E_J, E_C).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConvergenceError, CutoffError
from .params import TRANSMON_REGIME_RATIO

DEFAULT_CHARGE_CUTOFF = 15


@dataclass(frozen=True)
class TransmonLevels:
    """Eigenfrequencies E_n/h of a transmon, referenced to the ground state.

    ``energies[0]`` is zero by construction and the list is sorted in
    increasing order.
    """

    energies: np.ndarray
    n_g: float
    charge_cutoff: int

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        object.__setattr__(self, "energies", e)
        if e[0] != 0.0:
            raise ValueError("energies must be ground-referenced (energies[0] == 0)")
        if np.any(np.diff(e[: min(len(e), 4)]) <= 0):
            raise ValueError("the lowest levels must be strictly increasing")


class TransitionFrequencies(NamedTuple):
    f_01: float
    f_02_over_2: float
    f_03_over_3: float
    f_12: float


def _charge_hamiltonian(e_j: float, e_c: float, n_g: float, charge_cutoff: int) -> np.ndarray:
    n = np.arange(-charge_cutoff, charge_cutoff + 1)
    h = np.diag(4.0 * e_c * (n - n_g) ** 2).astype(float)
    off = -0.5 * e_j * np.ones(2 * charge_cutoff)
    h += np.diag(off, k=1) + np.diag(off, k=-1)
    return h


def diagonalize_transmon(
    e_j: float,
    e_c: float,
    n_g: float = 0.0,
    charge_cutoff: int = DEFAULT_CHARGE_CUTOFF,
    n_levels: int = 6,
) -> TransmonLevels:
    """Diagonalize the transmon in the charge basis.

    The Hamiltonian is 4*e_c*(n - n_g)^2 on the diagonal over charge states
    n in [-cutoff, +cutoff] with -e_j/2 hopping between adjacent charge
    states. Energies are in Hz (E/h) and ground-referenced.
    """
    if e_j <= 0 or e_c <= 0:
        raise ValueError("e_j and e_c must be strictly positive")
    if charge_cutoff < 10:
        raise CutoffError(f"charge_cutoff must be >= 10, got {charge_cutoff}")
    w = np.linalg.eigvalsh(_charge_hamiltonian(e_j, e_c, n_g, charge_cutoff))
    w = w - w[0]
    top = w[-1]
    if top - w[min(n_levels, len(w) - 1)] < 5.0 * e_j:
        raise CutoffError(
            f"charge_cutoff = {charge_cutoff} leaves the top of the spectrum "
            f"within 5*e_j of the requested levels; increase the cutoff"
        )
    return TransmonLevels(energies=w[:n_levels], n_g=n_g, charge_cutoff=charge_cutoff)


def charge_matrix_element(
    e_j: float,
    e_c: float,
    i: int = 0,
    j: int = 1,
    n_g: float = 0.0,
    charge_cutoff: int = DEFAULT_CHARGE_CUTOFF,
) -> float:
    """|<i| n |j>| between transmon eigenstates, in Cooper-pair units.

    For i, j = 0, 1 this approaches (e_j/(8 e_c))**0.25 / sqrt(2) deep in
    the transmon regime; the exact value is a few percent lower at
    moderate e_j/e_c.
    """
    n = np.arange(-charge_cutoff, charge_cutoff + 1)
    _, vecs = np.linalg.eigh(_charge_hamiltonian(e_j, e_c, n_g, charge_cutoff))
    return float(abs(vecs[:, i] @ (n * vecs[:, j])))


def charge_operator_in_eigenbasis(
    e_j: float,
    e_c: float,
    n_levels: int,
    n_g: float = 0.0,
    charge_cutoff: int = DEFAULT_CHARGE_CUTOFF,
) -> tuple[np.ndarray, np.ndarray]:
    """Lowest eigenenergies (ground-referenced, Hz) and the charge operator
    projected onto those eigenstates."""
    n = np.arange(-charge_cutoff, charge_cutoff + 1)
    w, vecs = np.linalg.eigh(_charge_hamiltonian(e_j, e_c, n_g, charge_cutoff))
    v = vecs[:, :n_levels]
    n_op = v.T @ (n[:, None] * v)
    return w[:n_levels] - w[0], n_op


def transition_frequencies(levels: TransmonLevels) -> TransitionFrequencies:
    """Single- and multi-photon transition frequencies f_0n/n and f_12."""
    e = levels.energies
    if len(e) < 4:
        raise ValueError("need at least 4 levels")
    return TransitionFrequencies(
        f_01=float(e[1]),
        f_02_over_2=float(e[2] / 2.0),
        f_03_over_3=float(e[3] / 3.0),
        f_12=float(e[2] - e[1]),
    )


def perturbative_levels(e_j: float, e_c: float, n_max: int = 6) -> TransmonLevels:
    """Closed-form level list from the standard asymptotic expansion.

    E_n = -E_J + sqrt(8 E_J E_C)(n + 1/2) - (E_C/12)(6n^2 + 6n + 3),
    ground-referenced. Valid deep in the transmon regime; used as a fast
    path and as a cross-check of the exact diagonalization.
    """
    if e_j / e_c <= TRANSMON_REGIME_RATIO:
        raise ValueError(
            f"asymptotic expansion requires e_j/e_c > {TRANSMON_REGIME_RATIO:g}, "
            f"got {e_j / e_c:.2f}"
        )
    n = np.arange(n_max, dtype=float)
    e = -e_j + np.sqrt(8.0 * e_j * e_c) * (n + 0.5) - (e_c / 12.0) * (6 * n**2 + 6 * n + 3)
    return TransmonLevels(energies=e - e[0], n_g=0.0, charge_cutoff=0)


def invert_spectroscopy(
    f_01: float,
    f_02_over_2: float,
    tol: float = 10e3,
    max_iter: int = 100,
    charge_cutoff: int = DEFAULT_CHARGE_CUTOFF,
) -> tuple[float, float]:
    """Recover (e_j, e_c) from the 0-1 line and the two-photon 0-2/2 line.

    Starts from the perturbative relations e_c ~ 2(f_01 - f_02/2) and
    e_j ~ (f_01 + e_c)^2 / (8 e_c), then Newton-refines on the exact
    diagonalization until both lines are matched within ``tol`` (Hz).
    """
    if not f_01 > f_02_over_2:
        raise ValueError(
            "expected f_01 > f_02/2 (negative anharmonicity); "
            f"got f_01 = {f_01:g}, f_02/2 = {f_02_over_2:g}"
        )
    e_c = 2.0 * (f_01 - f_02_over_2)
    e_j = (f_01 + e_c) ** 2 / (8.0 * e_c)
    x = np.array([e_j, e_c])
    target = np.array([f_01, f_02_over_2])

    def lines(p: np.ndarray) -> np.ndarray:
        lv = diagonalize_transmon(p[0], p[1], charge_cutoff=charge_cutoff, n_levels=4)
        return np.array([lv.energies[1], lv.energies[2] / 2.0])

    for _ in range(max_iter):
        r = lines(x) - target
        if np.max(np.abs(r)) < tol:
            return float(x[0]), float(x[1])
        jac = np.empty((2, 2))
        for k in range(2):
            step = x[k] * 1e-7
            xp = x.copy()
            xp[k] += step
            jac[:, k] = (lines(xp) - target - r) / step
        try:
            x = x - np.linalg.solve(jac, r)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError("singular Jacobian in spectroscopy inversion",
                                   best=(float(x[0]), float(x[1]))) from exc
        if x[0] <= 0 or x[1] <= 0:
            raise ConvergenceError("inversion left the physical domain",
                                   best=(float(e_j), float(e_c)))
    raise ConvergenceError(
        f"no convergence within {max_iter} iterations",
        best=(float(x[0]), float(x[1])),
    )
