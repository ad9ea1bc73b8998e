"""Dataset and trace serialization.

All datasets are plain CSV with a fixed single-line header; the axis column
is ``f_hz`` or ``t_s``, the value columns are either ``re,im`` (complex IQ
data) or ``p1`` (reduced populations). Randomized-benchmarking tables use
``m,survival,stderr``. Every writer emits floats through ``repr`` so a
fixed seed reproduces byte-identical files. Metadata travels in a
``<name>.meta`` sidecar in the same flat key = value format as the
configuration files.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .benchmarking import RBTable
from .dispersive import ResonatorResponse
from .dynamics import IQTrace
from .errors import ConfigError
from .experiments import Dataset

_AXIS_NAMES = ("f_hz", "t_s", "m")


def _format_rows(columns: dict[str, np.ndarray]) -> str:
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    lines = [",".join(names)]
    for i in range(arrays[0].size):
        lines.append(",".join(repr(float(a[i])) for a in arrays))
    return "\n".join(lines) + "\n"


def write_dataset_csv(path, dataset: Dataset) -> None:
    path = Path(path)
    if dataset.is_complex:
        text = _format_rows(
            {dataset.axis_name: dataset.axis,
             "re": dataset.values.real, "im": dataset.values.imag}
        )
    else:
        text = _format_rows({dataset.axis_name: dataset.axis, "p1": dataset.values})
    path.write_text(text)
    write_sidecar(path.with_name(path.name + ".meta"), dataset.meta)


def read_dataset_csv(path) -> Dataset:
    path = Path(path)
    try:
        with path.open() as fh:
            header = fh.readline().strip()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    names = header.split(",")
    if names[0] not in _AXIS_NAMES:
        raise ConfigError(f"{path}: unknown axis column {names[0]!r}")
    if names[1:] not in (["re", "im"], ["p1"], ["survival", "stderr"]):
        raise ConfigError(f"{path}: unknown value columns {names[1:]!r}")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed CSV body: {exc}") from exc
    if data.shape[1] != len(names):
        raise ConfigError(f"{path}: expected {len(names)} columns, found {data.shape[1]}")
    meta_path = path.with_name(path.name + ".meta")
    meta = read_sidecar(meta_path) if meta_path.exists() else {}
    kind = meta.get("kind", "resonator_sweep" if names[0] == "f_hz" else "t1")
    values = data[:, 1] + 1j * data[:, 2] if names[1] == "re" else data[:, 1]
    return Dataset(kind=str(kind), axis=data[:, 0], values=values, meta=meta)


def write_response_csv(path, resp: ResonatorResponse) -> None:
    Path(path).write_text(
        _format_rows({"f_hz": resp.f_axis, "re": resp.s_complex.real,
                      "im": resp.s_complex.imag})
    )


def write_trace_csv(path, trace: IQTrace) -> None:
    path = Path(path)
    path.write_text(
        _format_rows({"t_s": trace.t_axis, "re": trace.s_complex.real,
                      "im": trace.s_complex.imag})
    )
    if trace.meta:
        write_sidecar(path.with_name(path.name + ".meta"), trace.meta)


def write_rb_csv(path, table: RBTable) -> None:
    Path(path).write_text(
        _format_rows({"m": table.m_values, "survival": table.survival,
                      "stderr": table.stderr})
    )


def read_rb_csv(path) -> RBTable:
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().strip()
    if header != "m,survival,stderr":
        raise ConfigError(f"{path}: expected header 'm,survival,stderr', got {header!r}")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return RBTable(m_values=data[:, 0], survival=data[:, 1], stderr=data[:, 2],
                   n_seq=0, noise_per="unknown")


# --- sidecar metadata ---------------------------------------------------------


def _render_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, complex):
        return f"{value.real!r}{value.imag:+}j"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_sidecar(path, meta: dict) -> None:
    lines = [f"{key} = {_render_value(value)}" for key, value in meta.items()]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def _parse_value(text: str):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float, complex):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def read_sidecar(path) -> dict:
    meta: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path} line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        meta[key.strip()] = _parse_value(value.strip())
    return meta
