"""Command line front end.

A thin client for the HTTP service: every subcommand marshals files and
flags into a request, sends it to the API (in-process by default, or to a
remote server via --server) and writes the response out. Exit codes:
0 success, 1 usage or validation error, 2 degenerate data.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io as hio
from .errors import DomainError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DEGENERATE = 2

_SERVER_TIMEOUT = 600.0


class ServiceClient:
    """Speaks the service API, in-process unless a server URL is given."""

    def __init__(self, server: str | None = None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=_SERVER_TIMEOUT)
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service.app import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict):
        return self._client.post(path, json=payload)


def _fail(message: str, code: int = EXIT_USAGE) -> int:
    print(f"hdmean: error: {message}", file=sys.stderr)
    return code


def _dispatch(client: ServiceClient, path: str, payload: dict):
    """Returns (exit_code, body); a nonzero code means body is the error detail."""
    resp = client.post(path, payload)
    if resp.status_code == 200:
        return EXIT_OK, resp.json()
    try:
        detail = resp.json().get("detail")
    except Exception:
        detail = None
    if isinstance(detail, dict):
        code = EXIT_DEGENERATE if detail.get("code") == "degenerate-data" else EXIT_USAGE
        return code, detail
    return EXIT_USAGE, {"message": f"request failed with HTTP {resp.status_code}", "raw": detail}


def _seed_payload(args) -> dict:
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("HDMEAN_SEED", "0"))
    return {"master_seed": int(seed), "stream_id": 0}


def _law_payload(spec: str):
    if spec in ("auto", "normal"):
        return spec
    path = Path(spec)
    if not path.exists():
        raise DomainError(f"law file {spec!r} not found (expected 'auto', 'normal' or a JSON file)")
    payload = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(payload, dict) or "rho" not in payload:
        raise DomainError(f"law file {spec!r} must contain an object with a 'rho' list")
    return {"b": payload.get("b"), "rho": payload["rho"]}


def _print_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _report_error(detail: dict, code: int) -> int:
    return _fail(detail.get("message", "request failed"), code)


def cmd_test1(args) -> int:
    try:
        rows = hio.read_dataset_csv(args.data)
        law = _law_payload(args.law)
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        return _fail(str(exc))
    payload = {
        "rows": rows.tolist(),
        "variant": args.variant,
        "law": law,
        "seed": _seed_payload(args),
        "mc_draws": args.mc_draws,
        "method": "cf_inversion" if args.method == "cf" else "monte_carlo",
    }
    code, body = _dispatch(ServiceClient(args.server), "/tests/one-sample", payload)
    if code != EXIT_OK:
        return _report_error(body, code)
    _print_json(body)
    return EXIT_OK


def cmd_test2(args) -> int:
    try:
        rows1 = hio.read_dataset_csv(args.data1)
        rows2 = hio.read_dataset_csv(args.data2)
        law = _law_payload(args.law)
    except (DomainError, OSError, json.JSONDecodeError) as exc:
        return _fail(str(exc))
    if rows1.shape[1] != rows2.shape[1]:
        return _fail(
            f"column counts differ: {rows1.shape[1]} vs {rows2.shape[1]}"
        )
    payload = {
        "rows1": rows1.tolist(),
        "rows2": rows2.tolist(),
        "variant": args.variant,
        "law": law,
        "seed": _seed_payload(args),
        "mc_draws": args.mc_draws,
        "method": "cf_inversion" if args.method == "cf" else "monte_carlo",
    }
    code, body = _dispatch(ServiceClient(args.server), "/tests/two-sample", payload)
    if code != EXIT_OK:
        return _report_error(body, code)
    _print_json(body)
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        return _fail(f"cannot read config: {exc}")
    if not isinstance(config, dict):
        return _fail("config must be a JSON object")
    if args.seed is not None:
        config["seed"] = {"master_seed": int(args.seed), "stream_id": 0}
    elif "seed" not in config and "HDMEAN_SEED" in os.environ:
        config["seed"] = {"master_seed": int(os.environ["HDMEAN_SEED"]), "stream_id": 0}
    config.setdefault("workers", args.threads)
    code, body = _dispatch(ServiceClient(args.server), "/simulations/run", config)
    if code != EXIT_OK:
        return _report_error(body, code)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    hio.write_dataset_csv(out_dir / "draws.csv", np.asarray(body["draws"])[:, None])
    hio.write_dataset_csv(
        out_dir / "density.csv",
        np.asarray(body["density"]).reshape(-1, 3),
        header=["x", "empirical_density", "theoretical_density"],
    )
    (out_dir / "summary.json").write_text(
        json.dumps(body["summary"], indent=2) + "\n", encoding="utf-8"
    )
    print(f"wrote draws.csv, density.csv, summary.json to {out_dir}")
    return EXIT_OK


def cmd_matgen(args) -> int:
    payload: dict = {"model": args.model}
    if args.model == "spectrum":
        if not args.spectrum_file:
            return _fail("model 'spectrum' requires --spectrum-file")
        try:
            payload["spectrum"] = hio.read_spectrum_csv(args.spectrum_file).tolist()
        except (OSError, ValueError) as exc:
            return _fail(f"cannot read spectrum: {exc}")
        if args.seed is not None:
            payload["seed"] = int(args.seed)
    else:
        if args.p is None:
            return _fail(f"model {args.model!r} requires --p")
        payload["p"] = args.p
        if args.model in ("cs", "block"):
            if args.r is None:
                return _fail(f"model {args.model!r} requires --r")
            payload["r"] = args.r
        else:
            if args.gamma is None:
                return _fail("model 'ar1' requires --gamma")
            payload["gamma"] = args.gamma
    code, body = _dispatch(ServiceClient(args.server), "/matrices/generate", payload)
    if code != EXIT_OK:
        return _report_error(body, code)
    hio.write_matrix_csv(args.out, np.asarray(body["matrix"]))
    print(f"wrote {body['p']}x{body['p']} matrix to {args.out}")
    return EXIT_OK


def cmd_moments(args) -> int:
    try:
        corr4 = hio.read_matrix_csv(args.corr4)
    except (DomainError, OSError, ValueError) as exc:
        return _fail(str(exc))
    code, body = _dispatch(ServiceClient(args.server), "/moments/corr4-check", {"corr4": corr4.tolist()})
    if code != EXIT_OK:
        return _report_error(body, code)
    _print_json(body)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("hdmean.service.app:app", host=args.host, port=args.port)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hdmean",
        description="Mean tests for data with more dimensions than observations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--server", default=None, help="remote service URL (default: in-process)")
        sp.add_argument("--seed", type=int, default=None, help="master seed (fallback: HDMEAN_SEED, then 0)")

    sp = sub.add_parser("test1", help="one-sample mean test on a dataset CSV")
    sp.add_argument("data", help="CSV with one observation per row")
    sp.add_argument("--variant", choices=["tsd", "tp1"], default="tp1")
    sp.add_argument("--law", default="auto", help="'auto', 'normal', or a JSON law file {b, rho[]}")
    sp.add_argument("--mc-draws", type=int, default=200_000)
    sp.add_argument("--method", choices=["mc", "cf"], default="mc")
    common(sp)
    sp.set_defaults(func=cmd_test1)

    sp = sub.add_parser("test2", help="two-sample mean test on two dataset CSVs")
    sp.add_argument("data1")
    sp.add_argument("data2")
    sp.add_argument("--variant", choices=["tsd2", "tp2"], default="tp2")
    sp.add_argument("--law", default="auto", help="'auto', 'normal', or a JSON law file {b, rho[]}")
    sp.add_argument("--mc-draws", type=int, default=200_000)
    sp.add_argument("--method", choices=["mc", "cf"], default="mc")
    common(sp)
    sp.set_defaults(func=cmd_test2)

    sp = sub.add_parser("simulate", help="run a null-distribution experiment from a JSON config")
    sp.add_argument("config", help="experiment config JSON")
    sp.add_argument("--out-dir", default=".", help="directory for draws.csv, density.csv, summary.json")
    sp.add_argument("--threads", type=int, default=1, help="worker processes (results do not depend on this)")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("matgen", help="generate a correlation matrix CSV")
    sp.add_argument("--model", choices=["cs", "block", "ar1", "spectrum"], required=True)
    sp.add_argument("--p", type=int, default=None)
    sp.add_argument("--r", type=float, default=None)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--spectrum-file", default=None, help="one-line CSV of descending eigenvalues")
    sp.add_argument("out", help="output CSV path")
    common(sp)
    sp.set_defaults(func=cmd_matgen)

    sp = sub.add_parser("moments", help="closed-form vs pairing-oracle moments for a 4x4 matrix")
    sp.add_argument("corr4", help="4x4 correlation matrix CSV")
    common(sp)
    sp.set_defaults(func=cmd_moments)

    sp = sub.add_parser("serve", help="run the HTTP service")
    sp.add_argument("--host", default="127.0.0.1")
    sp.add_argument("--port", type=int, default=8000)
    sp.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except DomainError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
