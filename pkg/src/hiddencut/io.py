"""Flat-file formats: statevectors (binary or JSON), planted instances,
features, distributions and solve reports.

Every JSON document carries a `meta` header with the package version, the
bit convention, the seed and the producing configuration; CSV files carry
the same header as leading `#` comment lines. Binary statevectors hold
interleaved re/im float64 pairs, little-endian, after a magic + qubit-count
header, so round-trips are bit-exact.
"""

from __future__ import annotations

import csv
import json
import struct
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import __version__
from .gf2 import to_bitstring, weight
from .purity import EntanglementFeature
from .statevec import PlantedInstance, PureState, SetPartition
from .wht import FourierDistribution

_MAGIC = b"HCSV"
BIT_CONVENTION = "little-endian: qubit i is bit i of the index, qubit 0 least significant"


def output_meta(config: dict[str, Any] | None = None, seed: int | None = None) -> dict[str, Any]:
    return {
        "version": __version__,
        "bit_convention": BIT_CONVENTION,
        "seed": seed,
        "config": config or {},
    }


def save_state_binary(path: str | Path, state: PureState) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", state.num_qubits))
        fh.write(np.ascontiguousarray(state.amplitudes, dtype="<c16").tobytes())


def load_state_binary(path: str | Path) -> PureState:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"{path}: not a statevector file")
        (n,) = struct.unpack("<I", fh.read(4))
        amps = np.frombuffer(fh.read(), dtype="<c16")
    return PureState(n, amps.astype(np.complex128))


def state_to_json(state: PureState) -> dict[str, Any]:
    re_im = np.empty(2 * state.dim)
    re_im[0::2] = state.amplitudes.real
    re_im[1::2] = state.amplitudes.imag
    return {"n": state.num_qubits, "re_im": re_im.tolist()}


def state_from_json(doc: dict[str, Any]) -> PureState:
    flat = np.asarray(doc["re_im"], dtype=np.float64)
    return PureState(int(doc["n"]), flat[0::2] + 1j * flat[1::2])


def save_instance(path: str | Path, instance: PlantedInstance,
                  meta: dict[str, Any] | None = None,
                  inline_state: bool = False) -> list[Path]:
    """Write instance metadata as JSON; the statevector goes to a binary
    sidecar unless inline_state asks for an embedded JSON record."""
    path = Path(path)
    doc: dict[str, Any] = {
        "meta": meta or output_meta(),
        "n": instance.num_qubits,
        "truth": instance.truth.as_lists(),
        "epsilon_certified": instance.epsilon_certified,
        "factor_spec": instance.factor_spec,
    }
    written = [path]
    if inline_state:
        doc["state"] = state_to_json(instance.state)
    else:
        sidecar = path.with_suffix(".state.bin")
        save_state_binary(sidecar, instance.state)
        doc["state_file"] = sidecar.name
        written.append(sidecar)
    path.write_text(json.dumps(doc, indent=2))
    return written


def load_instance(path: str | Path) -> PlantedInstance:
    path = Path(path)
    doc = json.loads(path.read_text())
    if "state" in doc:
        state = state_from_json(doc["state"])
    else:
        state = load_state_binary(path.parent / doc["state_file"])
    return PlantedInstance(
        state=state,
        truth=SetPartition.of(doc["truth"]),
        epsilon_certified=float(doc["epsilon_certified"]),
        factor_spec=doc.get("factor_spec", "unknown"),
    )


_FEATURE_MAGIC = b"HCEF"


def save_feature_binary(path: str | Path, feature: EntanglementFeature) -> None:
    """float64 purity array after a magic + qubit-count header."""
    with open(path, "wb") as fh:
        fh.write(_FEATURE_MAGIC)
        fh.write(struct.pack("<I", feature.num_qubits))
        fh.write(np.ascontiguousarray(feature.values, dtype="<f8").tobytes())


def load_feature_binary(path: str | Path) -> EntanglementFeature:
    with open(path, "rb") as fh:
        if fh.read(4) != _FEATURE_MAGIC:
            raise ValueError(f"{path}: not an entanglement-feature file")
        (n,) = struct.unpack("<I", fh.read(4))
        values = np.frombuffer(fh.read(), dtype="<f8")
    return EntanglementFeature(n, values.astype(np.float64))


def _write_csv(path: str | Path, header_meta: dict[str, Any],
               columns: list[str], rows: Iterable[Iterable[Any]]) -> None:
    with open(path, "w", newline="") as fh:
        for key, value in header_meta.items():
            fh.write(f"# {key}: {json.dumps(value)}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        writer.writerows(rows)


def save_feature_csv(path: str | Path, feature: EntanglementFeature,
                     meta: dict[str, Any] | None = None) -> None:
    n = feature.num_qubits
    rows = (
        (to_bitstring(x, n), weight(x), repr(float(feature.values[x])))
        for x in range(1 << n)
    )
    _write_csv(path, meta or output_meta(), ["mask", "weight", "purity"], rows)


def save_distribution_csv(path: str | Path, dist: FourierDistribution,
                          meta: dict[str, Any] | None = None) -> None:
    n = dist.num_qubits
    rows = (
        (to_bitstring(y, n), weight(y), repr(float(dist.probs[y])))
        for y in range(1 << n)
    )
    header = dict(meta or output_meta())
    header["copies_t"] = dist.copies_t
    _write_csv(path, header, ["outcome", "weight", "probability"], rows)


def distribution_to_json(dist: FourierDistribution) -> dict[str, Any]:
    return {
        "n": dist.num_qubits,
        "copies_t": dist.copies_t,
        "negative_mass": dist.negative_mass,
        "probs": dist.probs.tolist(),
    }


def save_reports_json(path: str | Path, reports: list[Any],
                      meta: dict[str, Any] | None = None) -> None:
    doc = {"meta": meta or output_meta(),
           "reports": [r.to_dict() for r in reports]}
    Path(path).write_text(json.dumps(doc, indent=2))


def save_report_table_csv(path: str | Path, reports: list[Any],
                          meta: dict[str, Any] | None = None) -> None:
    columns = ["trial", "n", "mode", "t", "epsilon", "copies", "success",
               "draws", "swap_tests", "rounds", "failure_reason"]
    rows = [
        (i, r.n, r.mode, r.t, r.epsilon, r.copies_consumed, r.success,
         r.draws, r.swap_tests, r.rounds, r.failure_reason or "")
        for i, r in enumerate(reports)
    ]
    _write_csv(path, meta or output_meta(), columns, rows)


def save_json(path: str | Path, payload: dict[str, Any],
              meta: dict[str, Any] | None = None) -> None:
    Path(path).write_text(json.dumps({"meta": meta or output_meta(), **payload}, indent=2))
