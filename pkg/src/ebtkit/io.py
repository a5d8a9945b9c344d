"""JSON interchange for channels and states.

Every document is an object with ``"ebtkit-spec": 1`` and a ``"type"``.
Complex numbers are ``[re, im]`` pairs, matrices are row-major nested lists
of them, and vectors are flat lists of them.  Canonical text is produced by
:func:`dump_spec` (sorted keys, two-space indent, trailing newline), and
``dump_spec(load_spec(text)) == text`` for canonical ``text``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

from .builtins import UnknownBuiltin, make_builtin
from .channels import (
    Channel,
    ChoiMatrix,
    HolevoChannel,
    KrausChannel,
    cq_channel,
    point_channel,
    qc_channel,
)
from .errors import EbtError
from .states import DensityMatrix, PureState

SCHEMA_KEY = "ebtkit-spec"
SCHEMA_VERSION = 1
CHANNEL_TYPES = ("kraus", "holevo", "cq", "qc", "point", "choi", "builtin")


class SpecParseError(EbtError, ValueError):
    """Malformed document; ``where`` names the offending field or line."""

    def __init__(self, message: str, where: str = ""):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


# --- complex encoding ---------------------------------------------------------

def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.asarray(v).reshape(-1)]


def encode_matrix(m) -> list:
    return [[encode_complex(z) for z in row] for row in np.asarray(m)]


def _decode_scalar(x, where: str) -> complex:
    if isinstance(x, bool):
        raise SpecParseError("expected a number or [re, im] pair", where)
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in x):
        return complex(x[0], x[1])
    raise SpecParseError("expected a number or [re, im] pair", where)


def decode_vector(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise SpecParseError("expected a non-empty list of complex entries", where)
    return np.array([_decode_scalar(x, f"{where}[{i}]") for i, x in enumerate(obj)], dtype=complex)


def decode_matrix(obj, where: str) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise SpecParseError("expected a non-empty list of rows", where)
    rows = [decode_vector(r, f"{where}[{i}]") for i, r in enumerate(obj)]
    if len({len(r) for r in rows}) != 1:
        raise SpecParseError("rows have different lengths", where)
    return np.array(rows)


def _field(doc: dict, key: str, where: str = ""):
    if key not in doc:
        raise SpecParseError(f"missing field '{key}'", where or key)
    return doc[key]


def _int_field(doc: dict, key: str) -> int:
    v = _field(doc, key)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise SpecParseError("expected a positive integer", key)
    return v


# --- documents ------------------------------------------------------------------

@dataclass
class ChannelSpec:
    type: str
    data: dict[str, Any]
    channel: Channel

    def to_dict(self) -> dict[str, Any]:
        return {SCHEMA_KEY: SCHEMA_VERSION, "type": self.type, **self.data}


def dump_spec(doc) -> str:
    if isinstance(doc, ChannelSpec):
        doc = doc.to_dict()
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def parse_json(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise SpecParseError("top level must be a JSON object", "line 1")
    version = doc.get(SCHEMA_KEY)
    if version != SCHEMA_VERSION:
        raise SpecParseError(f"unsupported or missing schema version {version!r}", SCHEMA_KEY)
    return doc


def _parse_channel_doc(doc: dict) -> ChannelSpec:
    kind = _field(doc, "type")
    if kind not in CHANNEL_TYPES:
        raise SpecParseError(f"unknown channel type {kind!r}; expected one of {', '.join(CHANNEL_TYPES)}", "type")

    if kind == "kraus":
        raw = _field(doc, "operators")
        if not isinstance(raw, list) or not raw:
            raise SpecParseError("expected a non-empty list of matrices", "operators")
        ops = [decode_matrix(m, f"operators[{i}]") for i, m in enumerate(raw)]
        ch = KrausChannel(tuple(ops))
        _check_dims(doc, ch)
        return spec_from_channel(ch)
    if kind == "holevo":
        raw = _field(doc, "pairs")
        if not isinstance(raw, list) or not raw:
            raise SpecParseError("expected a non-empty list of pairs", "pairs")
        states, effects = [], []
        for i, p in enumerate(raw):
            if not isinstance(p, dict):
                raise SpecParseError("expected an object with 'state' and 'effect'", f"pairs[{i}]")
            states.append(decode_matrix(_field(p, "state", f"pairs[{i}].state"), f"pairs[{i}].state"))
            effects.append(decode_matrix(_field(p, "effect", f"pairs[{i}].effect"), f"pairs[{i}].effect"))
        ch = HolevoChannel(tuple(states), tuple(effects))
        _check_dims(doc, ch)
        return spec_from_channel(ch)
    if kind == "choi":
        d_in, d_out = _int_field(doc, "dim_in"), _int_field(doc, "dim_out")
        ch = ChoiMatrix(decode_matrix(_field(doc, "matrix"), "matrix"), d_in, d_out)
        return spec_from_channel(ch)
    if kind == "cq":
        states = [decode_matrix(m, f"states[{i}]") for i, m in enumerate(_list(doc, "states"))]
        basis = [decode_vector(v, f"basis[{i}]") for i, v in enumerate(_list(doc, "basis"))] if "basis" in doc else None
        ch = cq_channel(states, basis)
        data = {"states": [encode_matrix(m) for m in ch.states]}
        if basis is not None:
            data["basis"] = [encode_vector(v) for v in basis]
        return ChannelSpec("cq", data, ch)
    if kind == "qc":
        effects = [decode_matrix(m, f"effects[{i}]") for i, m in enumerate(_list(doc, "effects"))]
        basis = [decode_vector(v, f"basis[{i}]") for i, v in enumerate(_list(doc, "basis"))] if "basis" in doc else None
        ch = qc_channel(effects, basis)
        data = {"effects": [encode_matrix(m) for m in ch.effects]}
        if basis is not None:
            data["basis"] = [encode_vector(v) for v in basis]
        return ChannelSpec("qc", data, ch)
    if kind == "point":
        state = decode_matrix(_field(doc, "state"), "state")
        dim_in = _int_field(doc, "dim_in") if "dim_in" in doc else None
        ch = point_channel(state, dim_in)
        data = {"state": encode_matrix(ch.states[0])}
        if dim_in is not None:
            data["dim_in"] = dim_in
        return ChannelSpec("point", data, ch)

    name = _field(doc, "name")
    if not isinstance(name, str):
        raise SpecParseError("expected a string such as 'depolarizing:2:0.2'", "name")
    params = doc.get("params", [])
    if not isinstance(params, list):
        raise SpecParseError("expected a list", "params")
    full = ":".join([name] + [str(p) for p in params])
    state = decode_matrix(doc["state"], "state") if "state" in doc else None
    try:
        ch = make_builtin(full, state)
    except UnknownBuiltin as exc:
        raise SpecParseError(str(exc), "name") from exc
    data = {"name": name}
    if params:
        data["params"] = params
    if state is not None:
        data["state"] = encode_matrix(ch.states[0])
    return ChannelSpec("builtin", data, ch)


def _list(doc: dict, key: str) -> list:
    v = _field(doc, key)
    if not isinstance(v, list) or not v:
        raise SpecParseError("expected a non-empty list", key)
    return v


def _check_dims(doc: dict, ch: Channel) -> None:
    for key in ("dim_in", "dim_out"):
        if key in doc and doc[key] != getattr(ch, key):
            raise SpecParseError(f"declared {doc[key]} but the payload has {getattr(ch, key)}", key)


def spec_from_channel(ch: Channel) -> ChannelSpec:
    """Canonical document for a channel in its own representation."""
    if isinstance(ch, KrausChannel):
        data = {"dim_in": ch.dim_in, "dim_out": ch.dim_out, "operators": [encode_matrix(a) for a in ch.operators]}
        return ChannelSpec("kraus", data, ch)
    if isinstance(ch, HolevoChannel):
        pairs = [{"effect": encode_matrix(f), "state": encode_matrix(r)} for r, f in zip(ch.states, ch.effects)]
        return ChannelSpec("holevo", {"dim_in": ch.dim_in, "dim_out": ch.dim_out, "pairs": pairs}, ch)
    if isinstance(ch, ChoiMatrix):
        return ChannelSpec("choi", {"dim_in": ch.dim_in, "dim_out": ch.dim_out, "matrix": encode_matrix(ch.mat)}, ch)
    raise TypeError(f"not a channel: {type(ch).__name__}")


def load_spec(text: str) -> ChannelSpec:
    """Parse and validate a channel document.

    Raises :class:`SpecParseError` for malformed documents and the usual
    validation errors (``NotPsd``, ``InvalidState``, ...) for well-formed
    documents describing an invalid channel.
    """
    return _parse_channel_doc(parse_json(text))


def load_state(text: str) -> DensityMatrix:
    """A ``{"type": "state"}`` document with either ``matrix`` or ``vector``."""
    doc = parse_json(text)
    if doc.get("type") != "state":
        raise SpecParseError("expected type 'state'", "type")
    if "matrix" in doc:
        return DensityMatrix(decode_matrix(doc["matrix"], "matrix"))
    if "vector" in doc:
        return DensityMatrix(PureState(decode_vector(doc["vector"], "vector")).projector())
    raise SpecParseError("missing field 'matrix' or 'vector'", "matrix")


def dump_state(rho) -> str:
    mat = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return dump_spec({SCHEMA_KEY: SCHEMA_VERSION, "type": "state", "matrix": encode_matrix(mat)})
