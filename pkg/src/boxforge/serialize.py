"""JSON/CSV serialization for boxes, realizations, wirings, and reports.

File formats (schemas ship in boxforge/schemas/):

* Box: {"scenario": [2, 2, 2], "copies": n, "table": [...]} with the table
  flat in row-major (x, y, a, b) order, each axis the integer encoding of
  the party's n-bit string (copy 1 in the most significant bit).
* Realization: complex numbers as [re, im] pairs; the state as an
  amplitude vector, measurements as explicit projector matrices.
* Wiring: truth-table bit arrays plus a schema version.
* Report: claim_id, parameters, verdict, evidence.
"""

from __future__ import annotations

import csv
import json
from importlib import resources

import numpy as np

from .analysis import VerificationReport
from .box_core import Box222, NCopyBox
from .quantum import ProjectiveMeasurement, PureState, QuantumRealization
from .wiring import (
    SingleCopyWiring,
    StochasticWiring,
    TwoCopyLocalWiring,
    TwoCopyWiring,
)

WIRING_SCHEMA_VERSION = 1


class FormatError(ValueError):
    """Raised when a file does not match its documented format."""


def _schema(name: str) -> dict:
    with resources.files("boxforge.schemas").joinpath(name).open() as fh:
        return json.load(fh)


def validate_against_schema(data: dict, schema_name: str) -> None:
    import jsonschema

    try:
        jsonschema.validate(data, _schema(schema_name))
    except jsonschema.ValidationError as exc:
        raise FormatError(f"{schema_name}: {exc.message}") from exc


# ---------------------------------------------------------------------------
# Boxes
# ---------------------------------------------------------------------------


def box_to_json_dict(box) -> dict:
    ncopy = box.as_ncopy() if isinstance(box, Box222) else box
    return {
        "scenario": [2, 2, 2],
        "copies": ncopy.n,
        "table": [float(v) for v in ncopy.table.reshape(-1)],
    }


def box_from_json_dict(data: dict):
    validate_against_schema(data, "box.schema.json")
    n = int(data["copies"])
    d = 2**n
    table = np.asarray(data["table"], dtype=float)
    if table.size != d**4:
        raise FormatError(f"table needs {d ** 4} entries for {n} copies")
    ncopy = NCopyBox(n=n, table=table.reshape(d, d, d, d))
    return ncopy.as_box222() if n == 1 else ncopy


# ---------------------------------------------------------------------------
# Realizations
# ---------------------------------------------------------------------------


def _complex_pairs(arr: np.ndarray) -> list:
    flat = np.asarray(arr, dtype=complex).reshape(-1)
    return [[float(v.real), float(v.imag)] for v in flat]


def _from_pairs(pairs, shape) -> np.ndarray:
    arr = np.array([complex(re, im) for re, im in pairs])
    return arr.reshape(shape)


def realization_to_json_dict(r: QuantumRealization) -> dict:
    def meas(m: ProjectiveMeasurement) -> dict:
        return {
            "dim": m.dim,
            "projectors": [_complex_pairs(p) for p in m.projectors],
        }

    return {
        "state": {
            "dim_a": r.state.dim_a,
            "dim_b": r.state.dim_b,
            "amplitudes": _complex_pairs(r.state.amplitudes),
        },
        "a_measurements": [meas(m) for m in r.a_measurements],
        "b_measurements": [meas(m) for m in r.b_measurements],
    }


def realization_from_json_dict(data: dict) -> QuantumRealization:
    validate_against_schema(data, "realization.schema.json")
    st = data["state"]
    state = PureState(
        dim_a=int(st["dim_a"]),
        dim_b=int(st["dim_b"]),
        amplitudes=_from_pairs(st["amplitudes"], (-1,)),
    )

    def meas(m: dict) -> ProjectiveMeasurement:
        dim = int(m["dim"])
        return ProjectiveMeasurement(
            dim=dim,
            projectors=tuple(
                _from_pairs(p, (dim, dim)) for p in m["projectors"]
            ),
        )

    return QuantumRealization(
        state=state,
        a_measurements=tuple(meas(m) for m in data["a_measurements"]),
        b_measurements=tuple(meas(m) for m in data["b_measurements"]),
    )


# ---------------------------------------------------------------------------
# Wirings
# ---------------------------------------------------------------------------


def wiring_to_json_dict(w) -> dict:
    base = {"schema_version": WIRING_SCHEMA_VERSION}
    if isinstance(w, SingleCopyWiring):
        base.update(
            kind="single_copy",
            input_a=w.input_a,
            input_b=w.input_b,
            output_a=w.output_a,
            output_b=w.output_b,
        )
    elif isinstance(w, TwoCopyLocalWiring):
        base.update(
            kind="two_copy_party",
            order=list(w.order),
            first_input=list(w.first_input),
            second_input=[list(r) for r in w.second_input],
            final_output=[[list(r) for r in plane] for plane in w.final_output],
        )
    elif isinstance(w, TwoCopyWiring):
        base.update(
            kind="two_copy",
            party_a=wiring_to_json_dict(w.party_a),
            party_b=wiring_to_json_dict(w.party_b),
        )
    elif isinstance(w, StochasticWiring):
        base.update(
            kind="stochastic",
            weights=list(w.weights),
            components=[wiring_to_json_dict(c) for c in w.components],
        )
    else:
        raise FormatError(f"not a wiring: {type(w).__name__}")
    return base


def wiring_from_json_dict(data: dict):
    validate_against_schema(data, "wiring.schema.json")
    kind = data["kind"]
    if kind == "single_copy":
        return SingleCopyWiring(
            input_a=int(data["input_a"]),
            input_b=int(data["input_b"]),
            output_a=int(data["output_a"]),
            output_b=int(data["output_b"]),
        )
    if kind == "two_copy_party":
        return TwoCopyLocalWiring(
            order=tuple(data["order"]),
            first_input=tuple(data["first_input"]),
            second_input=tuple(tuple(r) for r in data["second_input"]),
            final_output=tuple(
                tuple(tuple(r) for r in plane) for plane in data["final_output"]
            ),
        )
    if kind == "two_copy":
        return TwoCopyWiring(
            party_a=wiring_from_json_dict(data["party_a"]),
            party_b=wiring_from_json_dict(data["party_b"]),
        )
    if kind == "stochastic":
        return StochasticWiring(
            weights=tuple(data["weights"]),
            components=tuple(wiring_from_json_dict(c) for c in data["components"]),
        )
    raise FormatError(f"unknown wiring kind {kind!r}")


# ---------------------------------------------------------------------------
# Reports and files
# ---------------------------------------------------------------------------


def report_to_json_dict(report: VerificationReport) -> dict:
    data = report.to_json_dict()
    validate_against_schema(data, "report.schema.json")
    return data


def report_from_json_dict(data: dict) -> VerificationReport:
    validate_against_schema(data, "report.schema.json")
    return VerificationReport.from_json_dict(data)


def save_json(path: str, data: dict) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_csv(path: str, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def scan_results_rows(results) -> tuple:
    """(header, rows) for the scan-results CSV."""
    names = sorted({n for r in results for n in r.objectives})
    header = (
        ["wiring_a_block_x0", "wiring_a_block_x1", "wiring_b_block_x0",
         "wiring_b_block_x1"]
        + names
        + ["pareto", "gold", "best_for", "mixture_weights"]
    )
    rows = []
    for r in results:
        rows.append(
            list(r.blocks_a)
            + list(r.blocks_b)
            + [f"{r.objectives.get(n, float('nan')):.12g}" for n in names]
            + [
                int(r.pareto),
                int(r.gold),
                "|".join(r.best_for),
                "|".join(f"{w:g}" for w in r.mixture.weights) if r.mixture else "",
            ]
        )
    return header, rows
