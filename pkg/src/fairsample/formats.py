"""JSON file formats for models and behaviors.

Probabilities are stored as decimal strings (shortest round-trip form) so
files do not pick up platform float-formatting drift; loaders re-validate
normalization tolerances.  Every file carries ``format_version`` (currently
1).
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import FormatError
from .lhv import BehaviorTable, JointModel, LhvModel, attach_selection

FORMAT_VERSION = 1


def encode_array(arr: np.ndarray) -> Any:
    if arr.ndim == 0:
        return repr(float(arr))
    return [encode_array(sub) for sub in arr]


def decode_array(data: Any, shape: tuple[int, ...], where: str) -> np.ndarray:
    def conv(x: Any) -> Any:
        if isinstance(x, list):
            return [conv(item) for item in x]
        return float(x)

    try:
        arr = np.array(conv(data), dtype=float)
    except (TypeError, ValueError) as err:
        raise FormatError(f"{where}: malformed probability array") from err
    if arr.shape != shape:
        raise FormatError(f"{where}: expected shape {shape}, got {arr.shape}")
    return arr


def _expect(obj: dict, key: str, where: str) -> Any:
    if key not in obj:
        raise FormatError(f"{where}: missing key {key!r}")
    return obj[key]


def _check_version(obj: dict, where: str) -> None:
    version = _expect(obj, "format_version", where)
    if version != FORMAT_VERSION:
        raise FormatError(f"{where}: unsupported format_version {version!r}")


# -- behaviors -----------------------------------------------------------------


def behavior_to_json(behavior: BehaviorTable) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": "behavior",
        "parties": behavior.n_parties,
        "setting_cards": list(behavior.setting_cards),
        "outcome_cards": list(behavior.outcome_cards),
        "probabilities": encode_array(behavior.tensor),
    }


def behavior_from_json(obj: dict) -> BehaviorTable:
    where = "behavior file"
    _check_version(obj, where)
    if _expect(obj, "kind", where) != "behavior":
        raise FormatError(f"{where}: kind must be 'behavior'")
    parties = int(_expect(obj, "parties", where))
    setting_cards = tuple(int(c) for c in _expect(obj, "setting_cards", where))
    outcome_cards = tuple(int(c) for c in _expect(obj, "outcome_cards", where))
    if len(setting_cards) != parties or len(outcome_cards) != parties:
        raise FormatError(f"{where}: cardinality lists must match the party count")
    shape = setting_cards + outcome_cards
    tensor = decode_array(_expect(obj, "probabilities", where), shape, where)
    if np.any(tensor < -1e-12):
        raise FormatError(f"{where}: negative probabilities")
    behavior = BehaviorTable(tensor, parties)
    if behavior.normalization_defect() > 1e-9:
        raise FormatError(f"{where}: probabilities do not sum to 1 per setting")
    return behavior


# -- models --------------------------------------------------------------------


def model_to_json(model: LhvModel, k_table: np.ndarray | None = None) -> dict:
    obj = {
        "format_version": FORMAT_VERSION,
        "kind": "lhv",
        "lambda_weights": encode_array(model.weights),
        "parties": [
            {
                "settings": int(r.shape[1]),
                "outcomes": int(r.shape[2]),
                "response": encode_array(r),
            }
            for r in model.responses
        ],
    }
    if k_table is not None:
        obj["postselection"] = {"type": "table", "values": encode_array(k_table)}
    return obj


def model_from_json(obj: dict) -> tuple[LhvModel, JointModel | None]:
    """Load a model; also returns the attached postselection when present."""
    where = "model file"
    _check_version(obj, where)
    if _expect(obj, "kind", where) != "lhv":
        raise FormatError(f"{where}: kind must be 'lhv'")
    weights_raw = _expect(obj, "lambda_weights", where)
    n_lambda = len(weights_raw)
    weights = decode_array(weights_raw, (n_lambda,), where)
    responses = []
    for i, party in enumerate(_expect(obj, "parties", where)):
        s = int(_expect(party, "settings", f"{where} party {i}"))
        o = int(_expect(party, "outcomes", f"{where} party {i}"))
        responses.append(
            decode_array(_expect(party, "response", f"{where} party {i}"), (n_lambda, s, o), where)
        )
    try:
        model = LhvModel(weights, tuple(responses))
    except Exception as err:
        raise FormatError(f"{where}: {err}") from err

    joint = None
    if "postselection" in obj:
        post = obj["postselection"]
        if _expect(post, "type", where) != "table":
            raise FormatError(f"{where}: unsupported postselection type")
        shape = (model.n_lambda,) + model.setting_cards + model.outcome_cards
        table = decode_array(_expect(post, "values", where), shape, where)
        if np.any(table < -1e-12) or np.any(table > 1 + 1e-12):
            raise FormatError(f"{where}: postselection table must hold probabilities")

        def rule(lam: int, outcomes: tuple[int, ...], settings: tuple[int, ...]) -> float:
            return float(table[(lam,) + tuple(settings) + tuple(outcomes)])

        joint = attach_selection(model, rule)
    return model, joint


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as err:
        raise FormatError(f"{path}: invalid JSON ({err})") from err


def dump_json(obj: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")
