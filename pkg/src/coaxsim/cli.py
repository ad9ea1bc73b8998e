"""Command-line front-end.

The CLI is a thin client of the HTTP service: every command builds a
request model, sends it to the service (in-process by default, or to a
remote instance given via ``--server``) and writes any files locally from
the response. Exit codes: 0 ok, 1 input error, 2 fit non-convergence,
3 oracle or tolerance failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .characterize import PipelineReport, ReportRow
from .errors import ConfigError
from .experiments import FREQUENCY_KINDS, KINDS, default_config
from .io import read_dataset_csv, write_dataset_csv
from .params import device_params_from_text, parse_kv_text

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NO_CONVERGENCE = 2
EXIT_TOLERANCE = 3


class ServiceClient:
    """Minimal JSON client; in-process unless a server URL is given."""

    def __init__(self, server: str | None = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            from fastapi.testclient import TestClient

            from .service.app import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ConfigError(f"{path} failed ({response.status_code}): {detail}")
        return response.json()


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


def _device_payload(path: str) -> dict:
    params = device_params_from_text(_read_text(path))  # validates invariants
    return {
        "f_r0_hz": params.f_r0, "q_factor": params.q_factor, "f_01_hz": params.f_01,
        "e_c_hz": params.e_c, "e_j_hz": params.e_j, "g_hz": params.g,
        "chi_hz": params.chi, "t1_s": params.t1, "t2_s": params.t2, "t2e_s": params.t2e,
    }


def _network_payload(path: str) -> dict:
    values = parse_kv_text(_read_text(path))
    known = {"c_q_f", "c_r_f", "c_g_f", "l_r_h", "e_j_hz"}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(sorted(unknown))}")
    missing = known - set(values)
    if missing:
        raise ConfigError(f"missing keys: {', '.join(sorted(missing))}")
    return values


_EXPERIMENT_KEYS = {
    "kind": str,
    "sweep_start_s": float, "sweep_stop_s": float,
    "sweep_start_hz": float, "sweep_stop_hz": float,
    "sweep_points": int,
    "drive_power_dbm": float, "readout_power_dbm": float,
    "readout_len_s": float, "qubit_pulse_len_s": float,
    "detuning_hz": float, "averages": int, "noise_sigma": float,
    "seed": int, "pi_pulse": bool,
}


def _experiment_payload(path: str, kind: str | None) -> dict:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path} line {lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        key = key.strip()
        if key not in _EXPERIMENT_KEYS:
            raise ConfigError(f"{path} line {lineno}: unknown key {key!r}")
        raw[key] = value.strip()

    out: dict = {}
    for key, value in raw.items():
        cast = _EXPERIMENT_KEYS[key]
        try:
            if cast is bool:
                if value.lower() not in ("true", "false", "0", "1"):
                    raise ValueError(value)
                out[key] = value.lower() in ("true", "1")
            else:
                out[key] = cast(value)
        except ValueError as exc:
            raise ConfigError(f"{path}: invalid value for {key}: {value!r}") from exc

    cfg_kind = out.pop("kind", kind)
    if cfg_kind is None:
        raise ConfigError("experiment kind missing (set 'kind = ...' or pass --kind)")
    if kind is not None and cfg_kind != kind:
        raise ConfigError(f"--kind {kind} conflicts with config kind {cfg_kind}")
    if cfg_kind not in KINDS:
        raise ConfigError(f"unsupported experiment kind {cfg_kind!r}")
    unit = "hz" if cfg_kind in FREQUENCY_KINDS else "s"
    try:
        start = out.pop(f"sweep_start_{unit}")
        stop = out.pop(f"sweep_stop_{unit}")
    except KeyError:
        raise ConfigError(
            f"{cfg_kind} sweeps need sweep_start_{unit} and sweep_stop_{unit}"
        ) from None
    for leftover in ("sweep_start_s", "sweep_stop_s", "sweep_start_hz", "sweep_stop_hz"):
        if leftover in out:
            raise ConfigError(f"{leftover} does not match the {cfg_kind} axis unit")
    points = out.pop("sweep_points", 401)
    rename = {"readout_len_s": "readout_len_s", "qubit_pulse_len_s": "qubit_pulse_len_s"}
    payload = {"kind": cfg_kind, "sweep_start": start, "sweep_stop": stop,
               "sweep_points": points}
    payload.update({rename.get(k, k): v for k, v in out.items()})
    return payload


def _default_experiment_payload(kind: str, device_path: str, seed: int | None) -> dict:
    params = device_params_from_text(_read_text(device_path))
    cfg = default_config(kind, params, seed=seed or 0)
    return {
        "kind": kind,
        "sweep_start": float(cfg.sweep_axis[0]),
        "sweep_stop": float(cfg.sweep_axis[-1]),
        "sweep_points": int(cfg.sweep_axis.size),
        "drive_power_dbm": cfg.drive_power_dbm,
        "readout_len_s": cfg.readout_len,
        "detuning_hz": cfg.detuning,
        "seed": cfg.seed,
        "pi_pulse": cfg.pi_pulse,
    }


def _dataset_from_model(payload: dict):
    from .experiments import Dataset

    axis = np.asarray(payload["axis"], dtype=float)
    if payload.get("p1") is not None:
        values = np.asarray(payload["p1"], dtype=float)
    else:
        values = np.asarray(payload["re"], dtype=float) + 1j * np.asarray(
            payload["im"], dtype=float)
    return Dataset(kind=payload["kind"], axis=axis, values=values,
                   meta=dict(payload.get("meta", {})))


def _print_fit(payload: dict) -> None:
    print(f"converged = {payload['converged']}  n_iter = {payload['n_iter']}  "
          f"residual_norm = {payload['residual_norm']:.6g}")
    for name, value, sigma in zip(payload["names"], payload["values"], payload["sigmas"]):
        print(f"{name} = {value:.9g} +/- {sigma:.3g}")
    for key, value in payload.get("meta", {}).items():
        print(f"# {key} = {value}")


# --- subcommands ---------------------------------------------------------------


def cmd_quantize(args) -> int:
    client = ServiceClient(args.server)
    payload = {
        "network": _network_payload(args.config),
        "oracle": args.oracle,
        "tolerance": args.tolerance or 0.02,
    }
    result = client.post("/quantize", payload)
    print(f"f_r0_hz = {result['f_r0_hz']:.9g}")
    print(f"e_c_hz  = {result['e_c_hz']:.9g}")
    print(f"g_hz    = {result['g_hz']:.9g}")
    print(f"f_01_hz = {result['f_01_hz']:.9g}")
    oracle = result.get("oracle")
    if oracle:
        print(f"oracle ({oracle['method']}): f_r0_hz = {oracle['f_r0_hz']:.9g}  "
              f"f_01_hz = {oracle['f_01_hz']:.9g}  g_hz = {oracle['g_hz']:.9g}")
        print(f"oracle deviations: f_r0 {oracle['f_r0_rel_dev']:.3e}  "
              f"g {oracle['g_rel_dev']:.3e}")
        if not oracle["within_tolerance"]:
            print("oracle disagreement exceeds tolerance", file=sys.stderr)
            return EXIT_TOLERANCE
    return EXIT_OK


def cmd_simulate(args) -> int:
    client = ServiceClient(args.server)
    if args.experiment:
        experiment = _experiment_payload(args.experiment, args.kind)
    else:
        if not args.kind:
            raise ConfigError("--kind is required when no --experiment config is given")
        experiment = _default_experiment_payload(args.kind, args.config, args.seed)
    payload = {
        "device": _device_payload(args.config),
        "experiment": experiment,
        "seed": args.seed,
    }
    result = client.post("/simulate", payload)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = _dataset_from_model(result)
    out_path = out_dir / f"{dataset.kind}.csv"
    write_dataset_csv(out_path, dataset)
    print(f"wrote {out_path}")
    return EXIT_OK


def cmd_fit(args) -> int:
    client = ServiceClient(args.server)
    dataset = read_dataset_csv(args.dataset)
    kind = args.kind or dataset.meta.get("kind")
    if kind is None:
        raise ConfigError("--kind is required when the dataset has no sidecar metadata")
    if kind in KINDS and kind != dataset.kind and dataset.meta.get("kind"):
        raise ConfigError(f"--kind {kind} conflicts with dataset kind {dataset.kind}")
    model: dict = {"kind": dataset.kind, "axis_name": dataset.axis_name,
                   "axis": dataset.axis.tolist(), "meta": {}}
    if dataset.is_complex:
        model["re"] = dataset.values.real.tolist()
        model["im"] = dataset.values.imag.tolist()
    else:
        expected = ("rabi", "t1", "ramsey", "echo", "qubit_spectroscopy")
        if kind not in expected:
            raise ConfigError(f"{kind} fits need complex (re, im) data")
        model["p1"] = np.asarray(dataset.values, dtype=float).tolist()
    if dataset.meta.get("pi_pulse") and kind == "resonator_sweep":
        kind = "resonator_sweep_double"
    result = client.post("/fit", {"kind": kind, "dataset": model})
    _print_fit(result)
    return EXIT_OK if result["converged"] else EXIT_NO_CONVERGENCE


def cmd_characterize(args) -> int:
    client = ServiceClient(args.server)
    payload = {
        "device": _device_payload(args.config),
        "seed": args.seed or 0,
        "noise_sigma": args.noise_sigma,
        "averages": args.averages,
        "tolerance": args.tolerance or 0.02,
        "include_datasets": True,
    }
    result = client.post("/characterize", payload)
    report = PipelineReport(
        rows=tuple(ReportRow(**row) for row in result["report"]["rows"]),
        provenance=result["report"]["provenance"],
    )
    out_dir = Path(args.out)
    (out_dir / "datasets").mkdir(parents=True, exist_ok=True)
    (out_dir / "report.txt").write_text(report.render_text())
    (out_dir / "report.csv").write_text(report.to_csv_text())
    for name, model in result["datasets"].items():
        write_dataset_csv(out_dir / "datasets" / f"{name}.csv", _dataset_from_model(model))
    print(report.render_text(), end="")
    return EXIT_OK if report.all_pass else EXIT_TOLERANCE


def cmd_report(args) -> int:
    path = Path(args.path)
    if path.is_dir():
        path = path / "report.csv"
    rows = []
    lines = _read_text(path).splitlines()
    if not lines or lines[0] != "parameter,generated,recovered,rel_error,tolerance,passed":
        raise ConfigError(f"{path} is not a characterization report")
    for line in lines[1:]:
        name, gen, rec, rel, tol, passed = line.split(",")
        rows.append(ReportRow(
            name=name, generated=float(gen), recovered=float(rec),
            rel_error=float(rel), tolerance=float(tol), passed=bool(int(passed)),
        ))
    report = PipelineReport(rows=tuple(rows))
    print(report.render_text(), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coaxsim",
        description="Simulate and characterize a transmon-resonator unit cell",
    )
    parser.add_argument("--server", help="URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("quantize", help="quantize a circuit network config")
    p.add_argument("--config", required=True, help="circuit network config file")
    p.add_argument("--oracle", action="store_true",
                   help="cross-check against the coupled-Hamiltonian diagonalization")
    p.add_argument("--tolerance", type=float, default=None)
    p.set_defaults(fn=cmd_quantize)

    p = sub.add_parser("simulate", help="synthesize an experiment dataset")
    p.add_argument("--kind", choices=KINDS)
    p.add_argument("--config", required=True, help="device parameter config file")
    p.add_argument("--experiment", help="experiment config file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("fit", help="fit a dataset CSV")
    p.add_argument("dataset", help="dataset CSV path")
    p.add_argument("--kind", help="dataset kind (read from the sidecar when omitted)")
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("characterize", help="run the full recovery pipeline")
    p.add_argument("--config", required=True, help="device parameter config file")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--averages", type=int, default=1)
    p.add_argument("--tolerance", type=float, default=None)
    p.set_defaults(fn=cmd_characterize)

    p = sub.add_parser("report", help="render a stored characterization report")
    p.add_argument("path", help="report.csv or a characterization output directory")
    p.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
