"""JSON file formats for states, settings and hidden-variable models.

State::

    {"kind": "singlet"}
    {"kind": "werner", "x": 0.8}
    {"kind": "product", "bloch_a": [0, 0, 1], "bloch_b": [0, 0, -1]}
    {"kind": "matrix", "re": [[...4x4...]], "im": [[...4x4...]]}

Settings::

    {"a": [..], "a_perp": [..], "b": [..], "b_perp": [..]}

Model (``kind`` one of lt, lqt, lrt, rt)::

    {"kind": "lqt", "causes": [{"weight": w, "bloch_a": [..], "bloch_b": [..]}]}
    {"kind": "lt", "causes": [{"weight": w,
        "alice": [{"setting": [..], "mean": m}], "bob": [...]}]}
    {"kind": "lrt", "causes": [{"weight": w, "lambdas": [{"weight": p,
        "alice": [{"setting": [..], "response": r}], "bob": [...]}]}]}
    {"kind": "rt", "causes": [{"weight": w,
        "gamma": [{"a": [..], "b": [..], "value": g}]}]}
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .hv_models import (
    CommonCauseModel,
    HiddenResponses,
    LocalStates,
    LocalTables,
    NonlocalRealisticModel,
)
from .qubit_algebra import (
    SettingPair,
    ValidationError,
    bloch_vector,
    check_density_matrix,
    make_product,
    make_singlet,
    make_werner,
)


def read_json(path) -> dict:
    """Load a JSON file; OSError propagates, malformed content is a ValidationError."""
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed JSON ({exc})") from None


def _field(d: dict, name: str, what: str):
    if not isinstance(d, dict):
        raise ValidationError(f"{what} must be a JSON object")
    if name not in d:
        raise ValidationError(f"{what} is missing field {name!r}")
    return d[name]


def _vec3(v, what: str) -> np.ndarray:
    try:
        arr = np.asarray(v, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError(f"{what} must be an array of 3 numbers") from None
    if arr.shape != (3,):
        raise ValidationError(f"{what} must be an array of 3 numbers")
    return arr


def parse_state(spec: dict) -> np.ndarray:
    kind = _field(spec, "kind", "state")
    if kind == "singlet":
        return make_singlet()
    if kind == "werner":
        x = _field(spec, "x", "werner state")
        if not isinstance(x, (int, float)) or isinstance(x, bool):
            raise ValidationError("werner state field 'x' must be a number")
        return make_werner(x)
    if kind == "product":
        return make_product(_vec3(_field(spec, "bloch_a", "product state"), "bloch_a"),
                            _vec3(_field(spec, "bloch_b", "product state"), "bloch_b"))
    if kind == "matrix":
        try:
            re = np.asarray(_field(spec, "re", "matrix state"), dtype=float)
            im = np.asarray(spec.get("im", np.zeros((4, 4))), dtype=float)
        except (TypeError, ValueError):
            raise ValidationError("matrix state 're'/'im' must be 4x4 numeric arrays") from None
        if re.shape != (4, 4) or im.shape != (4, 4):
            raise ValidationError("matrix state 're'/'im' must be 4x4 numeric arrays")
        return check_density_matrix(re + 1j * im, dim=4)
    raise ValidationError(f"unknown state kind {kind!r}")


def matrix_spec(rho) -> dict:
    rho = np.asarray(rho, dtype=complex)
    return {"kind": "matrix", "re": rho.real.tolist(), "im": rho.imag.tolist()}


def parse_settings(spec: dict) -> tuple[SettingPair, SettingPair]:
    vecs = {k: _vec3(_field(spec, k, "settings"), k) for k in ("a", "a_perp", "b", "b_perp")}
    return SettingPair(vecs["a"], vecs["a_perp"]), SettingPair(vecs["b"], vecs["b_perp"])


def settings_spec(pa: SettingPair, pb: SettingPair) -> dict:
    return {"a": pa.main.tolist(), "a_perp": pa.perp.tolist(),
            "b": pb.main.tolist(), "b_perp": pb.perp.tolist()}


def _entries(rows, value_field: str, what: str):
    if not isinstance(rows, list):
        raise ValidationError(f"{what} must be a list")
    return [(_vec3(_field(r, "setting", what), "setting"), float(_field(r, value_field, what))) for r in rows]


def parse_model(spec: dict):
    kind = _field(spec, "kind", "model")
    causes = _field(spec, "causes", "model")
    if not isinstance(causes, list):
        raise ValidationError("model 'causes' must be a list")
    out = []
    for c in causes:
        w = float(_field(c, "weight", "cause"))
        if kind == "lqt":
            payload = LocalStates.from_bloch(_vec3(_field(c, "bloch_a", "cause"), "bloch_a"),
                                             _vec3(_field(c, "bloch_b", "cause"), "bloch_b"))
        elif kind == "lt":
            payload = LocalTables(_entries(_field(c, "alice", "cause"), "mean", "alice table"),
                                  _entries(_field(c, "bob", "cause"), "mean", "bob table"))
        elif kind == "lrt":
            lambdas = _field(c, "lambdas", "cause")
            if not isinstance(lambdas, list):
                raise ValidationError("cause 'lambdas' must be a list")
            payload = HiddenResponses(tuple(
                (float(_field(lam, "weight", "hidden value")),
                 _entries(_field(lam, "alice", "hidden value"), "response", "alice responses"),
                 _entries(_field(lam, "bob", "hidden value"), "response", "bob responses"))
                for lam in lambdas
            ))
        elif kind == "rt":
            gamma = _field(c, "gamma", "cause")
            if not isinstance(gamma, list):
                raise ValidationError("cause 'gamma' must be a list")
            payload = [((_vec3(_field(g, "a", "gamma"), "a"), _vec3(_field(g, "b", "gamma"), "b")),
                        float(_field(g, "value", "gamma"))) for g in gamma]
        else:
            raise ValidationError(f"unknown model kind {kind!r}")
        out.append((w, payload))
    if kind == "rt":
        return NonlocalRealisticModel(tuple(out))
    return CommonCauseModel(kind, tuple(out))


def _table_rows(table: dict, value_field: str) -> list:
    return [{"setting": list(k), value_field: v} for k, v in table.items()]


def model_to_dict(m) -> dict:
    if isinstance(m, NonlocalRealisticModel):
        return {"kind": "rt", "causes": [
            {"weight": w, "gamma": [{"a": list(ka), "b": list(kb), "value": g}
                                    for (ka, kb), g in table.items()]}
            for w, table in m.causes
        ]}
    causes = []
    for w, p in m.causes:
        if m.kind == "lqt":
            causes.append({"weight": w,
                           "bloch_a": bloch_vector(p.rho_a).tolist(),
                           "bloch_b": bloch_vector(p.rho_b).tolist()})
        elif m.kind == "lt":
            causes.append({"weight": w,
                           "alice": _table_rows(p.alice, "mean"),
                           "bob": _table_rows(p.bob, "mean")})
        else:
            causes.append({"weight": w, "lambdas": [
                {"weight": lw, "alice": _table_rows(ra, "response"), "bob": _table_rows(rb, "response")}
                for lw, ra, rb in p.lambdas
            ]})
    return {"kind": m.kind, "causes": causes}
