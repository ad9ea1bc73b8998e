"""Pydantic request/response schemas of the simulation service."""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..characterize import CharacterizationResult, PipelineReport
from ..experiments import Dataset, ExperimentConfig
from ..fitting import FitResult
from ..params import CircuitNetwork, DeviceParams


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DeviceParamsModel(StrictModel):
    f_r0_hz: float
    q_factor: float
    f_01_hz: float
    e_c_hz: float
    e_j_hz: float
    g_hz: float
    chi_hz: float
    t1_s: float
    t2_s: float
    t2e_s: float

    def to_domain(self) -> DeviceParams:
        return DeviceParams(
            f_r0=self.f_r0_hz, q_factor=self.q_factor, f_01=self.f_01_hz,
            e_c=self.e_c_hz, e_j=self.e_j_hz, g=self.g_hz, chi=self.chi_hz,
            t1=self.t1_s, t2=self.t2_s, t2e=self.t2e_s,
        )

    @classmethod
    def from_domain(cls, p: DeviceParams) -> "DeviceParamsModel":
        return cls(
            f_r0_hz=p.f_r0, q_factor=p.q_factor, f_01_hz=p.f_01, e_c_hz=p.e_c,
            e_j_hz=p.e_j, g_hz=p.g, chi_hz=p.chi, t1_s=p.t1, t2_s=p.t2, t2e_s=p.t2e,
        )


class CircuitNetworkModel(StrictModel):
    c_q_f: float
    c_r_f: float
    c_g_f: float
    l_r_h: float
    e_j_hz: float

    def to_domain(self) -> CircuitNetwork:
        return CircuitNetwork(
            c_q=self.c_q_f, c_r=self.c_r_f, c_g=self.c_g_f,
            l_r=self.l_r_h, e_j=self.e_j_hz,
        )


class QuantizeRequest(StrictModel):
    network: CircuitNetworkModel
    oracle: bool = False
    tolerance: float = Field(default=0.02, gt=0)


class OracleComparison(StrictModel):
    f_r0_hz: float
    f_01_hz: float
    g_hz: float
    two_chi_hz: float
    method: str
    f_r0_rel_dev: float
    g_rel_dev: float
    within_tolerance: bool


class QuantizeResponse(StrictModel):
    f_r0_hz: float
    e_c_hz: float
    g_hz: float
    f_01_hz: float
    oracle: Optional[OracleComparison] = None


class ExperimentConfigModel(StrictModel):
    kind: Literal["resonator_sweep", "qubit_spectroscopy", "rabi", "t1", "ramsey", "echo"]
    sweep_start: float
    sweep_stop: float
    sweep_points: int = Field(gt=1)
    drive_power_dbm: float = -20.0
    readout_power_dbm: float = -35.0
    readout_len_s: float = 16e-6
    qubit_pulse_len_s: float = 20e-9
    detuning_hz: float = 0.0
    averages: int = Field(default=1, ge=1)
    noise_sigma: float = Field(default=0.0, ge=0)
    seed: int = 0
    pi_pulse: bool = False

    def to_domain(self) -> ExperimentConfig:
        return ExperimentConfig(
            kind=self.kind,
            sweep_axis=np.linspace(self.sweep_start, self.sweep_stop, self.sweep_points),
            drive_power_dbm=self.drive_power_dbm,
            readout_power_dbm=self.readout_power_dbm,
            readout_len=self.readout_len_s,
            qubit_pulse_len=self.qubit_pulse_len_s,
            detuning=self.detuning_hz,
            averages=self.averages,
            noise_sigma=self.noise_sigma,
            seed=self.seed,
            pi_pulse=self.pi_pulse,
        )


class SimulateRequest(StrictModel):
    device: DeviceParamsModel
    experiment: ExperimentConfigModel
    seed: Optional[int] = None  # overrides experiment.seed when given


class DatasetModel(StrictModel):
    kind: str
    axis_name: str
    axis: list[float]
    p1: Optional[list[float]] = None
    re: Optional[list[float]] = None
    im: Optional[list[float]] = None
    meta: dict = Field(default_factory=dict)

    @classmethod
    def from_domain(cls, ds: Dataset) -> "DatasetModel":
        meta = {k: _plain(v) for k, v in ds.meta.items()}
        if ds.is_complex:
            return cls(kind=ds.kind, axis_name=ds.axis_name, axis=ds.axis.tolist(),
                       re=ds.values.real.tolist(), im=ds.values.imag.tolist(), meta=meta)
        return cls(kind=ds.kind, axis_name=ds.axis_name, axis=ds.axis.tolist(),
                   p1=np.asarray(ds.values, dtype=float).tolist(), meta=meta)

    def to_domain(self) -> Dataset:
        axis = np.asarray(self.axis, dtype=float)
        if self.p1 is not None:
            values = np.asarray(self.p1, dtype=float)
        else:
            values = np.asarray(self.re, dtype=float) + 1j * np.asarray(self.im, dtype=float)
        return Dataset(kind=self.kind, axis=axis, values=values, meta=dict(self.meta))


def _plain(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


class FitRequest(StrictModel):
    kind: Literal["resonator_sweep", "resonator_sweep_double", "qubit_spectroscopy",
                  "rabi", "t1", "ramsey", "echo"]
    dataset: DatasetModel


class FitResultModel(StrictModel):
    names: list[str]
    values: list[float]
    sigmas: list[float]
    residual_norm: float
    converged: bool
    n_iter: int
    meta: dict = Field(default_factory=dict)

    @classmethod
    def from_domain(cls, fit: FitResult) -> "FitResultModel":
        def finite(x: float) -> float:
            return float(x) if np.isfinite(x) else float("nan")

        return cls(
            names=list(fit.names),
            values=[finite(v) for v in fit.values],
            sigmas=[finite(s) for s in fit.sigmas],
            residual_norm=finite(fit.residual_norm),
            converged=fit.converged,
            n_iter=fit.n_iter,
            meta={k: _plain(v) for k, v in fit.meta.items()},
        )


class CharacterizeRequest(StrictModel):
    device: DeviceParamsModel
    seed: int = 0
    noise_sigma: float = Field(default=0.0, ge=0)
    averages: int = Field(default=1, ge=1)
    tolerance: float = Field(default=0.02, gt=0)
    include_datasets: bool = True


class ReportRowModel(StrictModel):
    name: str
    generated: float
    recovered: float
    rel_error: float
    tolerance: float
    passed: bool


class ReportModel(StrictModel):
    rows: list[ReportRowModel]
    provenance: dict
    all_pass: bool

    @classmethod
    def from_domain(cls, report: PipelineReport) -> "ReportModel":
        return cls(
            rows=[ReportRowModel(name=r.name, generated=r.generated, recovered=r.recovered,
                                 rel_error=r.rel_error, tolerance=r.tolerance, passed=r.passed)
                  for r in report.rows],
            provenance={k: _plain(v) for k, v in report.provenance.items()},
            all_pass=report.all_pass,
        )


class CharacterizeResponse(StrictModel):
    report: ReportModel
    datasets: dict[str, DatasetModel] = Field(default_factory=dict)

    @classmethod
    def from_domain(cls, result: CharacterizationResult,
                    include_datasets: bool = True) -> "CharacterizeResponse":
        datasets = {}
        if include_datasets:
            datasets = {name: DatasetModel.from_domain(ds)
                        for name, ds in result.datasets.items()}
        return cls(report=ReportModel.from_domain(result.report), datasets=datasets)
