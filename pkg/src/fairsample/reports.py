"""Human-readable and machine-readable rendering of verdicts and numerics.

JSON reports are deterministic: keys sorted, every numeric value rendered as
a decimal string with 17 significant digits, arrays as nested lists.  Exit
codes are the machine contract of the ``check`` command: 0 safe, 2 unsafe,
3 obstruction, 1 usage or input error.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .dsep import PathVerdict
from .verifier import FsaVerdict

TOOL_NAME = "fairsample"
TOOL_VERSION = "0.1.0"

EXIT_SAFE = 0
EXIT_ERROR = 1
EXIT_UNSAFE = 2
EXIT_OBSTRUCTION = 3


def normalize_numbers(value: Any) -> Any:
    """Recursively format numbers as 17-significant-digit decimal strings."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, np.ndarray):
        return normalize_numbers(value.tolist())
    if isinstance(value, dict):
        return {k: normalize_numbers(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [normalize_numbers(v) for v in value]
    return value


def report_json(obj: dict) -> str:
    return json.dumps(normalize_numbers(obj), sort_keys=True, indent=2) + "\n"


def witness_dict(verdict: PathVerdict | None) -> dict | None:
    if verdict is None:
        return None
    return {
        "path": verdict.path.render(),
        "status": verdict.status,
        "reason": verdict.reason,
        "blocking_node": verdict.blocking_node,
        "opened_colliders": [list(pair) for pair in verdict.opened_colliders],
    }


def exit_code_for(verdict: FsaVerdict) -> int:
    if verdict.obstruction:
        return EXIT_OBSTRUCTION
    return EXIT_SAFE if verdict.safe else EXIT_UNSAFE


def verdict_report(verdict: FsaVerdict, seed: int | None = None) -> dict:
    return {
        "format_version": 1,
        "kind": "check-report",
        "tool": TOOL_NAME,
        "version": TOOL_VERSION,
        "seed": seed,
        "safe": verdict.safe,
        "classification": verdict.classification,
        "exit_code": exit_code_for(verdict),
        "ci_witness": witness_dict(verdict.ci_witness),
        "cii_witness": witness_dict(verdict.cii_witness),
        "obstruction": list(verdict.obstruction),
        "pruned": list(verdict.pruned),
        "resolutions_checked": verdict.resolutions_checked,
        "notes": list(verdict.notes),
    }


def verdict_text(verdict: FsaVerdict) -> str:
    lines = []
    status = "SAFE" if verdict.safe else "UNSAFE"
    lines.append(f"verdict: {status} ({verdict.classification})")
    if verdict.obstruction:
        lines.append(
            "obstruction: outcomes feeding both the Bell functional and the "
            "postselection: " + ", ".join(verdict.obstruction)
        )
    if verdict.ci_witness is not None:
        lines.append(
            "measurement-independence witness: " + verdict.ci_witness.path.render()
        )
    if verdict.cii_witness is not None:
        lines.append("factorization witness: " + verdict.cii_witness.path.render())
    if verdict.resolutions_checked:
        lines.append(f"bidirected resolutions checked: {verdict.resolutions_checked}")
    if verdict.pruned:
        lines.append("pruned outcomes: " + ", ".join(verdict.pruned))
    for note in verdict.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def behavior_text(tensor: np.ndarray, n_parties: int) -> str:
    """Tabulate p(outcomes | settings) row per setting vector."""
    from itertools import product as _product

    setting_cards = tensor.shape[:n_parties]
    lines = []
    for settings in _product(*map(range, setting_cards)):
        block = tensor[tuple(settings)]
        cells = ", ".join(
            f"p({','.join(map(str, outcomes))})={block[outcomes]:.6f}"
            for outcomes in _product(*map(range, block.shape))
        )
        lines.append(f"settings {settings}: {cells}")
    return "\n".join(lines) + "\n"
