"""FastAPI application exposing the simulation and fitting pipeline.

The CLI is a thin client of these endpoints; domain validation errors map
to HTTP 400, fit non-convergence is reported in-band via the ``converged``
flag of the result model.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..circuit import brute_force_spectrum, quantize_circuit
from ..characterize import run_characterization
from ..dispersive import ResonatorResponse
from ..errors import CoaxsimError
from ..experiments import (
    fit_damped_cosine,
    fit_decay,
    fit_double_lorentzian,
    fit_lorentzian_complex,
    fit_lorentzian_real,
    synthesize,
)
from ..transmon import diagonalize_transmon
from .models import (
    CharacterizeRequest,
    CharacterizeResponse,
    DatasetModel,
    FitRequest,
    FitResultModel,
    OracleComparison,
    QuantizeRequest,
    QuantizeResponse,
    SimulateRequest,
)


def create_app() -> FastAPI:
    app = FastAPI(title="coaxsim", version=__version__)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/quantize", response_model=QuantizeResponse)
    def quantize(request: QuantizeRequest) -> QuantizeResponse:
        try:
            net = request.network.to_domain()
            quant = quantize_circuit(net)
            f_01 = float(diagonalize_transmon(net.e_j, quant.e_c, n_levels=4).energies[1])
            oracle = None
            if request.oracle:
                brute = brute_force_spectrum(net)
                f_dev = abs(brute.f_r0 - quant.f_r0) / quant.f_r0
                g_dev = abs(brute.g - quant.g) / quant.g if quant.g else abs(brute.g)
                oracle = OracleComparison(
                    f_r0_hz=brute.f_r0,
                    f_01_hz=brute.f_01,
                    g_hz=brute.g,
                    two_chi_hz=brute.two_chi,
                    method=brute.method,
                    f_r0_rel_dev=f_dev,
                    g_rel_dev=g_dev,
                    within_tolerance=(f_dev <= request.tolerance and g_dev <= request.tolerance),
                )
        except (CoaxsimError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return QuantizeResponse(
            f_r0_hz=quant.f_r0, e_c_hz=quant.e_c, g_hz=quant.g, f_01_hz=f_01, oracle=oracle
        )

    @app.post("/simulate", response_model=DatasetModel)
    def simulate(request: SimulateRequest) -> DatasetModel:
        try:
            cfg = request.experiment.to_domain()
            if request.seed is not None:
                from dataclasses import replace

                cfg = replace(cfg, seed=request.seed)
            dataset = synthesize(request.device.to_domain(), cfg)
        except (CoaxsimError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return DatasetModel.from_domain(dataset)

    @app.post("/fit", response_model=FitResultModel)
    def fit(request: FitRequest) -> FitResultModel:
        try:
            ds = request.dataset.to_domain()
            if request.kind in ("resonator_sweep", "resonator_sweep_double"):
                if not ds.is_complex:
                    raise ValueError("resonator sweeps need complex (re, im) data")
                resp = ResonatorResponse(ds.axis, ds.values, "transmission")
                double = request.kind == "resonator_sweep_double" or ds.meta.get("pi_pulse")
                result = fit_double_lorentzian(resp) if double else fit_lorentzian_complex(resp)
            elif ds.is_complex:
                raise ValueError(f"{request.kind} datasets must carry p1 values")
            elif request.kind == "qubit_spectroscopy":
                result = fit_lorentzian_real(ds.axis, np.asarray(ds.values, dtype=float))
            elif request.kind in ("t1", "echo"):
                result = fit_decay(ds.axis, ds.values)
            elif request.kind == "rabi":
                result = fit_damped_cosine(ds.axis, ds.values, with_phase=False)
            elif request.kind == "ramsey":
                result = fit_damped_cosine(ds.axis, ds.values, with_phase=True)
            else:  # pragma: no cover - schema forbids it
                raise ValueError(f"unsupported fit kind {request.kind!r}")
        except (CoaxsimError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return FitResultModel.from_domain(result)

    @app.post("/characterize", response_model=CharacterizeResponse)
    def characterize(request: CharacterizeRequest) -> CharacterizeResponse:
        try:
            result = run_characterization(
                request.device.to_domain(),
                seed=request.seed,
                noise_sigma=request.noise_sigma,
                averages=request.averages,
                tolerance=request.tolerance,
            )
        except (CoaxsimError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return CharacterizeResponse.from_domain(result, request.include_datasets)

    return app


app = create_app()
