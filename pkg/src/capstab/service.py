"""Run orchestration shared by the HTTP API and the CLI.

Everything here is pure in/out of plain dicts so that reports are
deterministic: the same resolved configuration yields byte-identical JSON.
Wall-clock timings are returned separately so callers can segregate them
into a sidecar file.
"""

from __future__ import annotations

import hashlib
import json
import time

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from . import __version__
from .errors import CapstabError, ConfigError, SchemaMismatch
from .geometry import RevolutionSurface, areas, curvature_data
from .identities import first_variation_check, run_all_checks
from .profiles import (cylinder, find_halfspace_annulus, full_sphere,
                       solve_slab_capillary, spherical_cap, unduloid_slab)
from .stability import classify_stability
from .testfunctions import (eval_phi, eval_u_rotational, eval_v_family,
                            eval_w)

SCHEMA_VERSION = "1"

#: numerical defaults echoed into every report (reproducibility of verdicts)
DEFAULTS = {
    "grid": 2000,
    "integrator_rtol": 1e-11,
    "eps_stab": 1e-7,
    "fd_delta": 5e-3,
}

SWEEP_PARAM = {"cylinder": "height", "unduloid": "neck", "cap": "theta"}


def canonical_hash(obj) -> str:
    blob = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def load_config(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def resolve_spec(cfg: dict) -> dict:
    """Normalize a raw config/flag dict into a surface spec with defaults."""
    spec = {
        "family": cfg.get("family"),
        "n": int(cfg.get("n", 2)),
        "grid": int(cfg.get("grid", DEFAULTS["grid"])),
        "theta": cfg.get("theta"),
        "theta_upper": cfg.get("theta_upper"),
        "height": cfg.get("height"),
        "H": cfg.get("H"),
        "radius": cfg.get("radius"),
        "neck": cfg.get("neck"),
        "period": cfg.get("period", "half"),
    }
    if spec["family"] is None:
        raise ConfigError("a surface family is required (--family)")
    for key in ("theta", "theta_upper", "height", "H", "radius", "neck"):
        if spec[key] is not None:
            spec[key] = float(spec[key])
    if spec["grid"] < 16:
        raise ConfigError("grid must be at least 16 samples")
    return spec


def make_surface(spec: dict) -> RevolutionSurface:
    fam = spec["family"]
    n = spec["n"]
    grid = spec["grid"]
    if fam == "cylinder":
        r = spec.get("radius") or 1.0
        if spec.get("height") is None:
            raise ConfigError("cylinder requires a height")
        return cylinder(n, r, spec["height"], samples=grid)
    if fam == "cap":
        if spec.get("theta") is None:
            raise ConfigError("cap requires a contact angle theta")
        return spherical_cap(n, spec["theta"], R=spec.get("radius") or 1.0,
                             samples=grid)
    if fam == "sphere":
        return full_sphere(n, R=spec.get("radius") or 1.0, samples=grid)
    if fam == "unduloid":
        if spec.get("neck") is None:
            raise ConfigError("unduloid requires a neck radius")
        H = spec.get("H")
        if H is None:
            H = (n - 1) / n      # unit cylinder-radius normalization
        return unduloid_slab(n, H, spec["neck"], period=spec.get("period", "half"),
                             samples=grid)
    if fam == "nodoid":
        if spec.get("theta") is None:
            raise ConfigError("nodoid search requires theta")
        return find_halfspace_annulus(n, spec["theta"], H=spec.get("H") or 1.0,
                                      samples=grid)
    if fam == "slab":
        for key in ("theta", "theta_upper", "height", "H"):
            if spec.get(key) is None:
                raise ConfigError(f"slab family requires {key}")
        return solve_slab_capillary(n, spec["H"], spec["theta"],
                                    spec["theta_upper"], spec["height"],
                                    samples=grid)
    raise ConfigError(f"unknown family {fam!r}")


def surface_metadata(surface: RevolutionSurface) -> dict:
    prob = surface.problem
    lat, wetted, vol = areas(surface)
    cd = curvature_data(surface)
    return {
        "n": prob.n,
        "domain": prob.domain,
        "H": prob.H,
        "theta_lower": prob.theta_lower,
        "theta_upper": prob.theta_upper,
        "height": prob.height,
        "topology": surface.topology,
        "grid": surface.profile.m,
        "arclength": surface.profile.length,
        "lateral_area": lat,
        "wetted_areas": wetted,
        "enclosed_volume": vol,
        "H_check_max_error": float(np.max(np.abs(cd.H_check - prob.H))),
        "endpoint_residuals": surface.endpoint_residuals(),
        "surface_hash": surface.content_hash(),
    }


def _payload_shell(spec: dict) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "capstab_version": __version__,
        "defaults": DEFAULTS,
        "spec": spec,
        "config_hash": canonical_hash(spec),
    }


def generate_payload(spec: dict) -> dict:
    surface = make_surface(spec)
    out = _payload_shell(spec)
    out["csv"] = surface.profile.to_csv()
    out["metadata"] = surface_metadata(surface)
    return out


def identities_payload(spec: dict, first_variation: bool = True,
                       delta: float | None = None) -> dict:
    surface = make_surface(spec)
    reports = [r.to_dict() for r in run_all_checks(surface)]
    if first_variation:
        f = np.ones(surface.profile.m)
        rep = first_variation_check(surface, f,
                                    delta=delta or DEFAULTS["fd_delta"])
        reports.append(rep.to_dict())
    out = _payload_shell(spec)
    out["reports"] = reports
    return out


def stability_payload(spec: dict, eps_stab: float | None = None) -> dict:
    surface = make_surface(spec)
    rep = classify_stability(surface, eps_stab=eps_stab or DEFAULTS["eps_stab"])
    out = _payload_shell(spec)
    out["stability"] = rep.to_dict()
    out["surface_hash"] = surface.content_hash()
    return out


def testfn_payload(spec: dict, functions: list[str] | None = None) -> dict:
    surface = make_surface(spec)
    wanted = functions or ["phi", "v", "w", "u_rot"]
    evaluators = {"phi": eval_phi, "v": eval_v_family, "w": eval_w,
                  "u_rot": eval_u_rotational}
    rows = []
    for name in wanted:
        if name not in evaluators:
            raise ConfigError(f"unknown test function {name!r}")
        try:
            rows.append(evaluators[name](surface).to_dict())
        except (CapstabError, ValueError) as exc:
            rows.append({"function_id": name, "error": type(exc).__name__,
                         "message": str(exc)})
    out = _payload_shell(spec)
    out["rows"] = rows
    return out


def parse_range(text: str) -> list[float]:
    """min:max:count range syntax used by --param."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("param range must be min:max:count")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 1:
        raise ConfigError("param range count must be >= 1")
    return [float(v) for v in np.linspace(lo, hi, count)]


def sweep_payload(spec: dict, values: list[float],
                  eps_stab: float | None = None,
                  with_identities: bool = True) -> dict:
    fam = spec["family"]
    if fam not in SWEEP_PARAM:
        raise ConfigError(f"family {fam!r} has no sweep parameter")
    if not values:
        raise ConfigError("sweep needs at least one parameter value")
    key = SWEEP_PARAM[fam]
    eps = eps_stab or DEFAULTS["eps_stab"]

    records = []
    timings = []
    ok = 0
    for val in values:
        sp = dict(spec)
        sp[key] = float(val)
        t0 = time.perf_counter()
        rec = {"params": {key: float(val)}, "error": None}
        try:
            surface = make_surface(sp)
            rep = classify_stability(surface, eps_stab=eps)
            ell, lam = rep.worst
            rec.update(verdict=rep.verdict, worst_lambda=lam, worst_l=ell,
                       ell_stop=rep.ell_stop, surface_hash=surface.content_hash())
            if with_identities:
                rec["identity_residual"] = max(
                    r.integral_rel for r in run_all_checks(surface)
                    if r.integral_rel is not None)
            ok += 1
        except (CapstabError, ValueError) as exc:
            rec.update(verdict=None, worst_lambda=None, worst_l=None,
                       error={"type": type(exc).__name__, "message": str(exc)})
        records.append(rec)
        timings.append(time.perf_counter() - t0)

    base = {k: v for k, v in spec.items() if k != key}
    out = _payload_shell(base)
    out["param"] = key
    out["eps_stab"] = eps
    out["records"] = records
    out["succeeded"] = ok
    out["failed"] = len(records) - ok
    out["diagram"] = [
        {"param": r["params"][key], "verdict": r["verdict"],
         "worst_lambda": r["worst_lambda"], "worst_l": r["worst_l"]}
        for r in records]
    return out, timings


def merge_reports(payloads: list[dict]) -> dict:
    """Consolidate stability/sweep payloads; refuses mismatched provenance."""
    if not payloads:
        return {"schema_version": SCHEMA_VERSION, "records": [],
                "succeeded": 0, "failed": 0}
    versions = {p.get("schema_version") for p in payloads}
    if versions != {SCHEMA_VERSION}:
        raise SchemaMismatch(f"mixed schema versions {sorted(versions)}")
    hashes = {p.get("config_hash") for p in payloads}
    if len(hashes) > 1:
        raise SchemaMismatch("refusing to merge records with mismatched "
                             f"config hashes: {sorted(hashes)}")
    records = []
    for p in payloads:
        if "records" in p:
            records.extend(p["records"])
        elif "stability" in p:
            st = p["stability"]
            records.append({"params": p.get("spec", {}),
                            "verdict": st["verdict"],
                            "worst_lambda": st["worst_lambda"],
                            "worst_l": st["worst_l"], "error": None})
    ok = sum(1 for r in records if r.get("error") is None)
    lams = [r["worst_lambda"] for r in records
            if r.get("worst_lambda") is not None]
    return {
        "schema_version": SCHEMA_VERSION,
        "config_hash": payloads[0].get("config_hash"),
        "records": records,
        "succeeded": ok,
        "failed": len(records) - ok,
        "summary": {
            "verdicts": {v: sum(1 for r in records if r.get("verdict") == v)
                         for v in ("stable", "unstable", "marginal")},
            "min_worst_lambda": min(lams) if lams else None,
            "max_worst_lambda": max(lams) if lams else None,
        },
    }


def records_csv(payload: dict) -> str:
    """Flatten sweep records to CSV."""
    lines = ["param,verdict,worst_lambda,worst_l,identity_residual,error"]
    key = payload.get("param")
    for r in payload.get("records", []):
        pv = r["params"].get(key) if key else ""
        err = r["error"]["type"] if r.get("error") else ""
        lines.append(",".join([
            f"{pv:.17g}" if pv != "" else "",
            r.get("verdict") or "",
            f"{r['worst_lambda']:.17g}" if r.get("worst_lambda") is not None else "",
            str(r.get("worst_l")) if r.get("worst_l") is not None else "",
            f"{r['identity_residual']:.6g}" if r.get("identity_residual") is not None else "",
            err,
        ]))
    return "\n".join(lines) + "\n"


def residuals_csv(payload: dict) -> str:
    lines = ["identity,grid,max_pointwise,integral_abs,integral_rel,convergence_order"]
    for r in payload.get("reports", []):
        lines.append(",".join([
            r["identity"], str(r["grid"]),
            *(f"{r[k]:.6g}" if r.get(k) is not None else ""
              for k in ("max_pointwise", "integral_abs", "integral_rel",
                        "convergence_order")),
        ]))
    return "\n".join(lines) + "\n"
