"""Command-line front end.

The CLI is a thin client over the HTTP API: by default it mounts the FastAPI
app in-process; --server points it at a running instance instead.  Reports
are deterministic for a given config — anything wall-clock-dependent goes to
a run_meta.json sidecar next to the reports.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import datetime
import json
import pathlib
import sys

from .errors import ConfigError
from . import service

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


class Client:
    """Minimal POST client, in-process by default."""

    def __init__(self, server: str | None = None):
        if server:
            import httpx
            self._client = httpx.Client(base_url=server, timeout=None)
        else:
            from fastapi.testclient import TestClient
            from .api import app
            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> tuple[int, dict]:
        resp = self._client.post(path, json=payload)
        return resp.status_code, resp.json()


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="capstab",
                                 description="capillary hypersurface laboratory")
    ap.add_argument("--server", help="base URL of a running capstab API "
                    "(default: run in-process)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="TOML config file; flags override it")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--grid", type=int, help="number of profile samples")
        p.add_argument("--format", choices=("csv", "json"),
                       help="restrict outputs to one format")
        p.add_argument("--n", type=int, help="hypersurface dimension")
        p.add_argument("--theta", type=float, help="(lower) contact angle")
        p.add_argument("--theta-upper", dest="theta_upper", type=float)
        p.add_argument("--height", type=float, help="slab height / cylinder height")
        p.add_argument("--family",
                       choices=("cylinder", "cap", "sphere", "unduloid",
                                "nodoid", "slab"))
        p.add_argument("--param", help="parameter range min:max:count")
        p.add_argument("--radius", type=float)
        p.add_argument("--H", type=float, dest="H", help="mean curvature")
        p.add_argument("--neck", type=float, help="unduloid neck radius")
        p.add_argument("--period", choices=("half", "full"))
        p.add_argument("--eps-stab", dest="eps_stab", type=float)
        return p

    for name in ("generate", "check-identities", "stability", "testfn",
                 "sweep", "report"):
        add_common(sub.add_parser(name))
    return ap


def _resolve_config(args: argparse.Namespace) -> dict:
    cfg = {}
    if args.config:
        # accept flat keys as well as [surface]/[run]-style tables
        for key, val in service.load_config(args.config).items():
            if isinstance(val, dict):
                cfg.update(val)
            else:
                cfg[key] = val
    for key in ("grid", "n", "theta", "theta_upper", "height", "family",
                "param", "radius", "H", "neck", "period", "eps_stab",
                "format"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _write(out_dir: pathlib.Path, name: str, text: str):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text)


def _write_json(out_dir: pathlib.Path, name: str, payload: dict):
    _write(out_dir, name, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _sidecar(out_dir: pathlib.Path, extra: dict | None = None):
    meta = {"timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat()}
    if extra:
        meta.update(extra)
    _write_json(out_dir, "run_meta.json", meta)


def _fail(status: int, body: dict) -> int:
    print(json.dumps(body), file=sys.stderr)
    return EXIT_CONFIG if status in (400, 422) else EXIT_NUMERICAL


def _spec_from_cfg(cfg: dict) -> dict:
    keys = ("family", "n", "grid", "theta", "theta_upper", "height", "H",
            "radius", "neck", "period")
    spec = {k: cfg[k] for k in keys if k in cfg and cfg[k] is not None}
    if "family" not in spec:
        raise ConfigError("a surface family is required (--family)")
    return spec


def _cmd_generate(client: Client, cfg: dict, out_dir: pathlib.Path) -> int:
    spec = _spec_from_cfg(cfg)
    if cfg.get("param"):
        values = service.parse_range(cfg["param"])
        key = service.SWEEP_PARAM.get(spec["family"])
        if key is None:
            raise ConfigError(f"family {spec['family']!r} has no sweep parameter")
        manifest = []
        for i, val in enumerate(values):
            status, body = client.post("/generate",
                                       {"spec": {**spec, key: val}})
            if status != 200:
                return _fail(status, body)
            name = f"profile_{i:03d}.csv"
            _write(out_dir, name, body["csv"])
            manifest.append({"file": name, key: val,
                             "metadata": body["metadata"]})
        _write_json(out_dir, "manifest.json",
                    {"schema_version": service.SCHEMA_VERSION,
                     "param": key, "profiles": manifest})
        _sidecar(out_dir)
        print(f"wrote {len(values)} profiles to {out_dir}")
        return EXIT_OK
    status, body = client.post("/generate", {"spec": spec})
    if status != 200:
        return _fail(status, body)
    _write(out_dir, "profile.csv", body["csv"])
    meta = {k: v for k, v in body.items() if k != "csv"}
    _write_json(out_dir, "metadata.json", meta)
    _sidecar(out_dir)
    print(f"wrote profile.csv ({body['metadata']['grid']} samples) to {out_dir}")
    return EXIT_OK


def _cmd_identities(client: Client, cfg: dict, out_dir: pathlib.Path) -> int:
    status, body = client.post("/check-identities",
                               {"spec": _spec_from_cfg(cfg)})
    if status != 200:
        return _fail(status, body)
    fmt = cfg.get("format")
    if fmt in (None, "json"):
        _write_json(out_dir, "residuals.json", body)
    if fmt in (None, "csv"):
        _write(out_dir, "residuals.csv", service.residuals_csv(body))
    _sidecar(out_dir)
    worst = max(r["integral_rel"] for r in body["reports"]
                if r["integral_rel"] is not None)
    print(f"{len(body['reports'])} identity checks, worst relative residual "
          f"{worst:.3e}")
    return EXIT_OK


def _cmd_stability(client: Client, cfg: dict, out_dir: pathlib.Path) -> int:
    req = {"spec": _spec_from_cfg(cfg)}
    if cfg.get("eps_stab"):
        req["eps_stab"] = cfg["eps_stab"]
    status, body = client.post("/stability", req)
    if status != 200:
        return _fail(status, body)
    _write_json(out_dir, "stability.json", body)
    _sidecar(out_dir)
    st = body["stability"]
    print(f"verdict: {st['verdict']} (worst lambda {st['worst_lambda']:.6g} "
          f"at l={st['worst_l']})")
    return EXIT_OK


def _cmd_testfn(client: Client, cfg: dict, out_dir: pathlib.Path) -> int:
    status, body = client.post("/testfn", {"spec": _spec_from_cfg(cfg)})
    if status != 200:
        return _fail(status, body)
    _write_json(out_dir, "testfn.json", body)
    _sidecar(out_dir)
    for row in body["rows"]:
        if "error" in row:
            print(f"{row['function_id']}: {row['error']} ({row['message']})")
        else:
            print(f"{row['function_id']}: mean {row['mean_value']:.3e}, "
                  f"I(f,f) {row['index_value']:.6g}")
    return EXIT_OK


def _cmd_sweep(client: Client, cfg: dict, out_dir: pathlib.Path) -> int:
    if not cfg.get("param"):
        raise ConfigError("sweep requires --param min:max:count")
    spec = _spec_from_cfg(cfg)
    req = {"spec": spec, "values": service.parse_range(cfg["param"])}
    if cfg.get("eps_stab"):
        req["eps_stab"] = cfg["eps_stab"]
    status, body = client.post("/sweep", req)
    if status != 200:
        return _fail(status, body)
    timings = body.pop("timings", [])
    fmt = cfg.get("format")
    if fmt in (None, "json"):
        _write_json(out_dir, "sweep.json", body)
    if fmt in (None, "csv"):
        _write(out_dir, "sweep.csv", service.records_csv(body))
    _sidecar(out_dir, {"per_record_seconds": timings})
    print(f"sweep over {body['param']}: {body['succeeded']} succeeded, "
          f"{body['failed']} failed")
    if body["succeeded"] == 0:
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_report(client: Client, cfg: dict, out_dir: pathlib.Path) -> int:
    payloads = []
    for path in sorted(out_dir.glob("*.json")):
        if path.name in ("report.json", "run_meta.json", "manifest.json",
                         "metadata.json"):
            continue
        try:
            data = json.loads(path.read_text())
        except json.JSONDecodeError:
            continue
        if isinstance(data, dict) and ("records" in data or "stability" in data):
            payloads.append(data)
    status, body = client.post("/report", {"payloads": payloads})
    if status != 200:
        return _fail(status, body)
    _write_json(out_dir, "report.json", body)
    print(f"merged {len(payloads)} payloads: {body['succeeded']} records ok, "
          f"{body['failed']} failed")
    return EXIT_OK


COMMANDS = {
    "generate": _cmd_generate,
    "check-identities": _cmd_identities,
    "stability": _cmd_stability,
    "testfn": _cmd_testfn,
    "sweep": _cmd_sweep,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        client = Client(args.server)
        return COMMANDS[args.command](client, cfg, pathlib.Path(args.out))
    except ConfigError as exc:
        print(json.dumps({"error": "ConfigError", "message": str(exc)}),
              file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
