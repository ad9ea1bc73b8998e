"""Damped Gauss-Newton least-squares core shared by every fit in the package.

The damping schedule is the classic Levenberg-Marquardt one: the damping
parameter starts at 1e-3, is divided by 10 on every accepted step and
multiplied by 10 on every rejected one; iteration stops when the relative
residual change of an accepted step falls below 1e-9 or after 200
iterations. Jacobians are evaluated by forward differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np


@dataclass(frozen=True)
class FitResult:
    """Estimates with standard-error proxies.

    ``sigmas`` come from the diagonal of the approximate inverse normal
    matrix scaled by the residual variance; they gate tolerances, they are
    not formal confidence intervals. ``meta`` carries fitter-specific
    flags (fallbacks, clamps, derived quantities).
    """

    names: tuple[str, ...]
    values: np.ndarray
    sigmas: np.ndarray
    residual_norm: float
    converged: bool
    n_iter: int
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        sigmas = np.asarray(self.sigmas, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "sigmas", sigmas)
        object.__setattr__(self, "names", tuple(self.names))
        if not (len(self.names) == values.size == sigmas.size):
            raise ValueError("names, values and sigmas must have equal lengths")
        if self.converged and not (
            np.isfinite(self.residual_norm) and np.all(np.isfinite(sigmas))
        ):
            raise ValueError("a converged fit must report finite residual_norm and sigmas")

    def __getitem__(self, name: str) -> float:
        return float(self.values[self.names.index(name)])

    def sigma(self, name: str) -> float:
        return float(self.sigmas[self.names.index(name)])

    def summary(self) -> str:
        lines = [
            f"converged = {self.converged}  n_iter = {self.n_iter}  "
            f"residual_norm = {self.residual_norm:.6g}"
        ]
        for name, value, sigma in zip(self.names, self.values, self.sigmas):
            lines.append(f"{name} = {value:.9g} +/- {sigma:.3g}")
        for key, value in self.meta.items():
            lines.append(f"# {key} = {value}")
        return "\n".join(lines)


def _jacobian(fun, x: np.ndarray, r0: np.ndarray) -> np.ndarray:
    jac = np.empty((r0.size, x.size))
    for k in range(x.size):
        step = 1e-7 * max(abs(x[k]), 1e-12)
        xs = x.copy()
        xs[k] += step
        jac[:, k] = (fun(xs) - r0) / step
    return jac


def levenberg_marquardt(
    fun: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float],
    names: Sequence[str],
    max_iter: int = 200,
    lam0: float = 1e-3,
    rtol: float = 1e-9,
    meta: dict | None = None,
) -> FitResult:
    """Minimize ||fun(x)||^2 and package the result.

    ``fun`` maps the parameter vector to a real residual vector (callers
    stack real and imaginary parts for complex data).
    """
    x = np.asarray(x0, dtype=float).copy()
    if x.ndim != 1:
        raise ValueError("x0 must be one-dimensional")
    r = np.asarray(fun(x), dtype=float)
    cost = float(r @ r)
    lam = lam0
    converged = False
    n_iter = 0
    floor = 1e-30 * max(1, r.size)

    while n_iter < max_iter:
        n_iter += 1
        jac = _jacobian(fun, x, r)
        jtj = jac.T @ jac
        jtr = jac.T @ r
        damping = np.diag(jtj).copy()
        damping[damping <= 0] = 1.0
        try:
            step = np.linalg.solve(jtj + lam * np.diag(damping), -jtr)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        trial = x + step
        r_trial = np.asarray(fun(trial), dtype=float)
        cost_trial = float(r_trial @ r_trial)
        if np.isfinite(cost_trial) and cost_trial < cost:
            drop = (cost - cost_trial) / max(cost, floor)
            x, r, cost = trial, r_trial, cost_trial
            lam = max(lam / 10.0, 1e-15)
            if drop < rtol or cost <= floor:
                converged = True
                break
        else:
            # a rejected step that barely changes the residual means the
            # optimum is resolved to working precision
            if np.isfinite(cost_trial) and abs(cost_trial - cost) <= rtol * max(cost, floor):
                converged = True
                break
            lam *= 10.0
            if lam > 1e12:
                break

    sigmas = _sigma_proxies(fun, x, r, cost)
    return FitResult(
        names=tuple(names),
        values=x,
        sigmas=sigmas,
        residual_norm=float(np.sqrt(cost)),
        converged=converged,
        n_iter=n_iter,
        meta=dict(meta or {}),
    )


def _sigma_proxies(fun, x: np.ndarray, r: np.ndarray, cost: float) -> np.ndarray:
    dof = r.size - x.size
    if dof <= 0:
        return np.full(x.size, np.nan)
    jac = _jacobian(fun, x, r)
    try:
        cov = np.linalg.pinv(jac.T @ jac) * (cost / dof)
    except np.linalg.LinAlgError:
        return np.full(x.size, np.nan)
    diag = np.diag(cov).copy()
    diag[diag < 0] = 0.0
    return np.sqrt(diag)


def fit_model(
    model: Callable[[np.ndarray, np.ndarray], np.ndarray],
    x: np.ndarray,
    y: np.ndarray,
    p0: Sequence[float],
    names: Sequence[str],
    **kwargs,
) -> FitResult:
    """Least-squares fit of ``model(x, params)`` to data ``y``.

    Complex data are fitted in the complex plane by stacking real and
    imaginary residuals.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if np.iscomplexobj(y):
        def residual(p: np.ndarray) -> np.ndarray:
            d = model(x, p) - y
            return np.concatenate([d.real, d.imag])
    else:
        def residual(p: np.ndarray) -> np.ndarray:
            return np.asarray(model(x, p) - y, dtype=float)

    return levenberg_marquardt(residual, p0, names, **kwargs)
