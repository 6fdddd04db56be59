"""Service handlers: pure functions from request models to response models.

The CLI calls these directly in local mode; the FastAPI app wraps them as
endpoints.  Library errors bubble up as :class:`FairSampleError` for the
caller to translate (HTTP 400 / CLI exit 1).
"""

from __future__ import annotations

import numpy as np

from ..demos import run_demo
from ..detection import safety_sweep
from ..dsl import parse_diagram
from ..errors import FairSampleError
from ..formats import behavior_from_json, behavior_to_json, encode_array, model_from_json
from ..lhv import (
    behavior_from_lhv,
    chsh,
    evaluate_functional,
    is_local,
    postselect,
    recompute_local_bound,
)
from ..multiparty import hybrid_bound, mermin3, svetlichny3
from ..reports import (
    EXIT_SAFE,
    EXIT_UNSAFE,
    behavior_text,
    exit_code_for,
    normalize_numbers,
    verdict_report,
    verdict_text,
)
from ..verifier import verify
from .schemas import (
    BellRequest,
    BellResponse,
    CheckRequest,
    CheckResponse,
    DemoResponse,
    HealthResponse,
    IsLocalRequest,
    IsLocalResponse,
    SimulateRequest,
    SimulateResponse,
    SweepRequest,
    SweepResponse,
)

_FUNCTIONALS = {
    "chsh": chsh,
    "mermin3": mermin3,
    "svetlichny3": svetlichny3,
}


MAX_CHECK_NODES = 32  # soft cap; path enumeration is exponential in principle


def handle_check(request: CheckRequest) -> CheckResponse:
    spec = parse_diagram(request.source)
    n_nodes = len(spec.diagram.names)
    if n_nodes > MAX_CHECK_NODES:
        raise FairSampleError(
            f"diagram has {n_nodes} nodes; the check service caps at "
            f"{MAX_CHECK_NODES} to keep path enumeration tractable"
        )
    verdict = verify(spec)
    report = verdict_report(verdict, seed=request.seed)
    return CheckResponse(
        report=report, text=verdict_text(verdict), exit_code=exit_code_for(verdict)
    )


def handle_simulate(request: SimulateRequest) -> SimulateResponse:
    model, joint = model_from_json(request.model)
    acceptance = None
    if request.postselect:
        if joint is None:
            raise FairSampleError("model file carries no postselection table")
        behavior = postselect(joint)
        acceptance = normalize_numbers(joint.acceptance_probabilities())
    else:
        behavior = behavior_from_lhv(model)

    functionals: dict[str, object] = {}
    wanted = "chsh" if behavior.tensor.shape == (2, 2, 2, 2) else None
    if behavior.tensor.shape == (2, 2, 2, 2, 2, 2):
        wanted = "mermin3"
    if wanted == "chsh":
        functional = chsh()
        functionals["chsh"] = {
            "value": evaluate_functional(behavior, functional),
            "local_bound": functional.local_bound,
        }
    elif wanted == "mermin3":
        for name in ("mermin3", "svetlichny3"):
            functional = _FUNCTIONALS[name]()
            functionals[name] = {
                "value": evaluate_functional(behavior, functional),
                "local_bound": functional.local_bound,
            }
    text = behavior_text(behavior.tensor, behavior.n_parties)
    for name, entry in functionals.items():
        text += f"{name} = {entry['value']:.6f} (local bound {entry['local_bound']:g})\n"
    return SimulateResponse(
        behavior=behavior_to_json(behavior),
        functionals=normalize_numbers(functionals),
        acceptance=acceptance,
        text=text,
    )


def handle_is_local(request: IsLocalRequest) -> IsLocalResponse:
    behavior = behavior_from_json(request.behavior)
    result = is_local(behavior, tol=request.tol)
    if result.local:
        text = f"local: yes (LP residual {result.residual:.2e})\n"
        return IsLocalResponse(
            local=True,
            residual=f"{result.residual:.17g}",
            weights=encode_array(np.asarray(result.weights)),
            certificate=None,
            text=text,
            exit_code=EXIT_SAFE,
        )
    certificate = {
        "coefficients": encode_array(result.certificate.coefficients),
        "value_on_behavior": f"{result.certificate_value:.17g}",
        "local_bound": f"{result.certificate.local_bound:.17g}",
    }
    text = (
        "local: no\n"
        f"separating functional value {result.certificate_value:.6f} "
        f"exceeds its local bound {result.certificate.local_bound:.6f}\n"
    )
    return IsLocalResponse(
        local=False,
        residual=f"{result.residual:.17g}",
        weights=None,
        certificate=certificate,
        text=text,
        exit_code=EXIT_UNSAFE,
    )


def handle_bell(request: BellRequest) -> BellResponse:
    behavior = behavior_from_json(request.behavior)
    functional = _FUNCTIONALS[request.functional]()
    value = evaluate_functional(behavior, functional)
    bound = recompute_local_bound(functional)
    hybrid = None
    if request.functional in ("mermin3", "svetlichny3"):
        hybrid = hybrid_bound(functional)
    text = f"{request.functional} = {value:.6f} (recomputed local bound {bound:g}"
    if hybrid is not None:
        text += f", hybrid bound {hybrid:g}"
    text += ")\n"
    return BellResponse(
        functional=request.functional,
        value=f"{value:.17g}",
        local_bound=f"{bound:.17g}",
        hybrid_bound=None if hybrid is None else f"{hybrid:.17g}",
        text=text,
    )


def handle_demo(name: str, seed: int = 0) -> DemoResponse:
    try:
        report, text = run_demo(name, seed)
    except KeyError as err:
        raise FairSampleError(str(err)) from err
    return DemoResponse(name=name, report=normalize_numbers(report), text=text)


def handle_sweep(request: SweepRequest) -> SweepResponse:
    report = safety_sweep(request.variant, request.n, request.seed)
    payload = {
        "variant": report.variant,
        "n_models": report.n_models,
        "seed": report.seed,
        "all_local": report.all_local,
        "max_chsh": report.max_chsh,
        "max_lp_residual": report.max_residual,
        "min_acceptance": report.min_acceptance,
        "failures": list(report.failures),
    }
    text = (
        f"variant {report.variant}: {report.n_models} models, "
        f"all postselected behaviors local: {report.all_local}\n"
        f"max CHSH {report.max_chsh:.9f} (bound 2), "
        f"max LP residual {report.max_residual:.2e}, "
        f"min acceptance {report.min_acceptance:.4f}\n"
    )
    return SweepResponse(report=normalize_numbers(payload), text=text)


def handle_health() -> HealthResponse:
    from ..reports import TOOL_NAME, TOOL_VERSION

    return HealthResponse(status="ok", tool=TOOL_NAME, version=TOOL_VERSION)
