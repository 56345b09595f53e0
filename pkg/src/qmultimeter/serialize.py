"""JSON codecs for states, observables, channels, kernels, and estimator output.

Complex entries travel as [re, im] pairs; floats round-trip at full binary
precision through the standard json encoder.
"""

from __future__ import annotations

import json

import numpy as np

from .divergence import DivergenceEstimate
from .postprocessing import PostProcessing
from .quantum import DensityState, Observable, QuantumChannel


def matrix_to_json(m: np.ndarray) -> dict:
    a = np.asarray(m, dtype=complex)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }


def matrix_from_json(doc: dict) -> np.ndarray:
    rows, cols = int(doc["rows"]), int(doc["cols"])
    entries = doc["entries"]
    if len(entries) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
    flat = np.array([complex(re, im) for re, im in entries])
    return flat.reshape(rows, cols)


def state_to_json(s: DensityState) -> dict:
    return {"dim": s.dim, "matrix": matrix_to_json(s.matrix)}


def state_from_json(doc: dict) -> DensityState:
    s = DensityState(matrix_from_json(doc["matrix"]))
    if s.dim != int(doc["dim"]):
        raise ValueError("declared dim does not match the matrix")
    return s


def observable_to_json(e: Observable) -> dict:
    return {
        "dim": e.dim,
        "outcomes": list(e.outcomes),
        "effects": {
            label: matrix_to_json(eff) for label, eff in zip(e.outcomes, e.effects)
        },
    }


def observable_from_json(doc: dict) -> Observable:
    outcomes = [str(x) for x in doc["outcomes"]]
    effects = [matrix_from_json(doc["effects"][label]) for label in outcomes]
    e = Observable(effects, outcomes=outcomes)
    if e.dim != int(doc["dim"]):
        raise ValueError("declared dim does not match the effects")
    return e


def channel_to_json(c: QuantumChannel) -> dict:
    return {
        "in_dim": c.in_dim,
        "out_dim": c.out_dim,
        "kraus": [matrix_to_json(k) for k in c.kraus],
    }


def channel_from_json(doc: dict) -> QuantumChannel:
    c = QuantumChannel([matrix_from_json(k) for k in doc["kraus"]])
    if (c.in_dim, c.out_dim) != (int(doc["in_dim"]), int(doc["out_dim"])):
        raise ValueError("declared dims do not match the Kraus operators")
    return c


def postprocessing_to_json(l: PostProcessing) -> dict:
    doc = {
        "n_in": l.n_in,
        "n_out": l.n_out,
        "entries": [float(x) for x in l.kernel.reshape(-1)],
    }
    if l.out_labels is not None:
        doc["out_labels"] = list(l.out_labels)
    return doc


def postprocessing_from_json(doc: dict) -> PostProcessing:
    n_in, n_out = int(doc["n_in"]), int(doc["n_out"])
    entries = np.asarray(doc["entries"], dtype=float)
    if entries.size != n_in * n_out:
        raise ValueError(f"expected {n_in * n_out} kernel entries, got {entries.size}")
    return PostProcessing(entries.reshape(n_in, n_out), out_labels=doc.get("out_labels"))


def estimate_to_json(est: DivergenceEstimate) -> dict:
    return {
        "value": est.value,
        "argmin": [state_to_json(s) for s in est.argmin],
        "method": est.method,
        "restarts": est.restarts,
        "converged": est.converged,
        "seed": est.seed,
    }


def save_json(doc: dict, path: str):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)
