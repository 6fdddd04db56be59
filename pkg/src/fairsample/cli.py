"""Command-line client for the verification service.

By default every subcommand dispatches in-process to the service handlers;
``--server URL`` sends the same request to a running instance instead.  The
machine contract is the exit code plus ``--json`` output; human-readable
text may change between versions.

Exit codes for ``check``: 0 safe, 2 unsafe, 3 obstruction, 1 error.
``is-local``: 0 local, 2 nonlocal.  The FAIRSAMPLE_SEED environment
variable overrides ``--seed``.
"""

from __future__ import annotations

import argparse
import os
import sys

from .demos import DEMO_NAMES
from .errors import FairSampleError
from .formats import load_json
from .reports import report_json
from .service import handlers
from .service.schemas import (
    BellRequest,
    BellResponse,
    CheckRequest,
    CheckResponse,
    DemoResponse,
    IsLocalRequest,
    IsLocalResponse,
    SimulateRequest,
    SimulateResponse,
    SweepRequest,
    SweepResponse,
)


def _effective_seed(seed: int | None) -> int | None:
    env = os.environ.get("FAIRSAMPLE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise FairSampleError(f"FAIRSAMPLE_SEED must be an integer, got {env!r}")
    return seed


class _Client:
    """Routes requests either to in-process handlers or over HTTP."""

    def __init__(self, server: str | None):
        self.server = server.rstrip("/") if server else None

    def _post(self, path: str, payload: dict, model):
        import httpx

        response = httpx.post(f"{self.server}{path}", json=payload, timeout=600.0)
        if response.status_code >= 400:
            raise FairSampleError(f"server error {response.status_code}: {response.text}")
        return model.model_validate(response.json())

    def check(self, request: CheckRequest) -> CheckResponse:
        if self.server:
            return self._post("/check", request.model_dump(), CheckResponse)
        return handlers.handle_check(request)

    def simulate(self, request: SimulateRequest) -> SimulateResponse:
        if self.server:
            return self._post("/simulate", request.model_dump(), SimulateResponse)
        return handlers.handle_simulate(request)

    def is_local(self, request: IsLocalRequest) -> IsLocalResponse:
        if self.server:
            return self._post("/is-local", request.model_dump(), IsLocalResponse)
        return handlers.handle_is_local(request)

    def bell(self, request: BellRequest) -> BellResponse:
        if self.server:
            return self._post("/bell", request.model_dump(), BellResponse)
        return handlers.handle_bell(request)

    def demo(self, name: str, seed: int) -> DemoResponse:
        if self.server:
            return self._post(f"/demo/{name}?seed={seed}", {}, DemoResponse)
        return handlers.handle_demo(name, seed)

    def sweep(self, request: SweepRequest) -> SweepResponse:
        if self.server:
            return self._post("/sweep", request.model_dump(), SweepResponse)
        return handlers.handle_sweep(request)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairsample",
        description="fair-sampling verdicts and Bell-scenario numerics",
    )
    parser.add_argument(
        "--server",
        metavar="URL",
        default=None,
        help="send requests to a running service instead of computing locally",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="verify a diagram file")
    p.add_argument("diagram")
    p.add_argument("--json", action="store_true")
    p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("simulate", help="behavior and functional values of a model file")
    p.add_argument("model")
    p.add_argument("--postselect", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("is-local", help="LP membership in the local polytope")
    p.add_argument("behavior")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("bell", help="evaluate a Bell functional on a behavior file")
    p.add_argument("behavior")
    p.add_argument(
        "--functional", required=True, choices=["chsh", "mermin3", "svetlichny3"]
    )
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("demo", help="run a built-in fixture end to end")
    p.add_argument("name", choices=list(DEMO_NAMES))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("sweep", help="detection-variant safety sweep")
    p.add_argument("--variant", required=True, choices=["constant", "lambda", "factorized"])
    p.add_argument("--n", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("fixture", help="print a built-in diagram source")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true", help="list fixture names and exit")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)

    return parser


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    client = _Client(args.server)
    try:
        if args.command == "check":
            request = CheckRequest(
                source=_read_text(args.diagram), seed=_effective_seed(args.seed)
            )
            response = client.check(request)
            sys.stdout.write(report_json(response.report) if args.json else response.text)
            return response.exit_code

        if args.command == "simulate":
            request = SimulateRequest(
                model=load_json(args.model),
                postselect=args.postselect,
                seed=_effective_seed(args.seed),
            )
            response = client.simulate(request)
            if args.json:
                payload = {
                    "behavior": response.behavior,
                    "functionals": response.functionals,
                    "acceptance": response.acceptance,
                }
                sys.stdout.write(report_json(payload))
            else:
                sys.stdout.write(response.text)
            return 0

        if args.command == "is-local":
            request = IsLocalRequest(behavior=load_json(args.behavior), tol=args.tol)
            response = client.is_local(request)
            if args.json:
                payload = response.model_dump()
                payload.pop("text")
                sys.stdout.write(report_json(payload))
            else:
                sys.stdout.write(response.text)
            return response.exit_code

        if args.command == "bell":
            request = BellRequest(
                behavior=load_json(args.behavior), functional=args.functional
            )
            response = client.bell(request)
            if args.json:
                payload = response.model_dump()
                payload.pop("text")
                sys.stdout.write(report_json(payload))
            else:
                sys.stdout.write(response.text)
            return 0

        if args.command == "demo":
            seed = _effective_seed(args.seed)
            response = client.demo(args.name, 0 if seed is None else seed)
            sys.stdout.write(report_json(response.report) if args.json else response.text)
            return 0

        if args.command == "sweep":
            request = SweepRequest(
                variant=args.variant,
                n=args.n,
                seed=_effective_seed(args.seed) or 0,
            )
            response = client.sweep(request)
            sys.stdout.write(report_json(response.report) if args.json else response.text)
            return 0

        if args.command == "fixture":
            from .fixtures import FIXTURE_NAMES, SOURCES

            if args.list or args.name is None:
                sys.stdout.write("\n".join(FIXTURE_NAMES) + "\n")
                return 0
            if args.name not in SOURCES:
                raise FairSampleError(
                    f"unknown fixture {args.name!r}; run 'fairsample fixture --list'"
                )
            sys.stdout.write(SOURCES[args.name])
            return 0

        if args.command == "serve":
            import uvicorn

            from .service import app

            uvicorn.run(app, host=args.host, port=args.port)
            return 0

    except FairSampleError as err:
        sys.stderr.write(f"error: {err}\n")
        return 1
    except OSError as err:
        sys.stderr.write(f"error: {err}\n")
        return 1

    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
