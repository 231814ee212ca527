"""HTTP facade over the run orchestration.

Thin wrapper: request models validate the surface spec, handlers delegate to
the service layer, and the error hierarchy is mapped onto status codes
(400/422 for configuration problems, 409 for numerical failures) so clients
can translate them into exit codes.
"""

from __future__ import annotations

from typing import Literal, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__, errors
from . import service

app = FastAPI(title="capstab", version=__version__)


class SurfaceSpec(BaseModel):
    family: Literal["cylinder", "cap", "sphere", "unduloid", "nodoid", "slab"]
    n: int = Field(2, ge=2)
    grid: int = Field(service.DEFAULTS["grid"], ge=16)
    theta: Optional[float] = None
    theta_upper: Optional[float] = None
    height: Optional[float] = None
    H: Optional[float] = None
    radius: Optional[float] = None
    neck: Optional[float] = None
    period: Literal["half", "full"] = "half"


class GenerateRequest(BaseModel):
    spec: SurfaceSpec


class IdentitiesRequest(BaseModel):
    spec: SurfaceSpec
    first_variation: bool = True
    delta: Optional[float] = Field(None, gt=0)


class StabilityRequest(BaseModel):
    spec: SurfaceSpec
    eps_stab: Optional[float] = Field(None, gt=0)


class TestfnRequest(BaseModel):
    spec: SurfaceSpec
    functions: Optional[list[str]] = None


class SweepRequest(BaseModel):
    spec: SurfaceSpec
    values: list[float]
    eps_stab: Optional[float] = Field(None, gt=0)
    with_identities: bool = True


class ReportRequest(BaseModel):
    payloads: list[dict]


@app.exception_handler(errors.ConfigError)
async def _config_error(request: Request, exc: errors.ConfigError):
    return JSONResponse(status_code=400,
                        content={"error": type(exc).__name__, "message": str(exc)})


@app.exception_handler(errors.CapstabError)
async def _numerical_error(request: Request, exc: errors.CapstabError):
    return JSONResponse(status_code=409,
                        content={"error": type(exc).__name__, "message": str(exc)})


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError):
    return JSONResponse(status_code=400,
                        content={"error": "ValueError", "message": str(exc)})


def _spec_dict(spec: SurfaceSpec) -> dict:
    return service.resolve_spec(spec.model_dump())


@app.get("/health")
async def health():
    return {"status": "ok", "version": __version__,
            "schema_version": service.SCHEMA_VERSION}


@app.post("/generate")
async def generate(req: GenerateRequest):
    return service.generate_payload(_spec_dict(req.spec))


@app.post("/check-identities")
async def check_identities(req: IdentitiesRequest):
    return service.identities_payload(_spec_dict(req.spec),
                                      first_variation=req.first_variation,
                                      delta=req.delta)


@app.post("/stability")
async def stability(req: StabilityRequest):
    return service.stability_payload(_spec_dict(req.spec), eps_stab=req.eps_stab)


@app.post("/testfn")
async def testfn(req: TestfnRequest):
    return service.testfn_payload(_spec_dict(req.spec), functions=req.functions)


@app.post("/sweep")
async def sweep(req: SweepRequest):
    payload, timings = service.sweep_payload(_spec_dict(req.spec), req.values,
                                             eps_stab=req.eps_stab,
                                             with_identities=req.with_identities)
    payload["timings"] = timings   # stripped into the sidecar by the CLI
    return payload


@app.post("/report")
async def report(req: ReportRequest):
    return service.merge_reports(req.payloads)
