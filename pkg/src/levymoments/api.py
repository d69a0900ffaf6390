"""FastAPI surface over the service handlers.

POST endpoints mirror the CLI subcommands one-to-one; errors return
{"error": {"code": ..., "message": ...}} with 400 for domain violations and
409 for convergence failures.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import service as svc

app = FastAPI(
    title="levymoments",
    description="Moments of exponential functionals of Levy processes on a deterministic horizon",
    version="0.1.0",
)

_HTTP_STATUS = {"domain": 400, "convergence": 409, "io": 500}


@app.exception_handler(svc.ServiceError)
async def _service_error(_: Request, exc: svc.ServiceError):
    return JSONResponse(
        status_code=_HTTP_STATUS.get(exc.code, 500),
        content={"error": {"code": exc.code, "message": exc.message}},
    )


@app.get("/healthz")
def healthz():
    return {"status": "ok", "schema_version": svc.SCHEMA_VERSION}


@app.post("/v1/moment", response_model=svc.MomentResponse)
def moment(req: svc.MomentRequest):
    return svc.run_moment(req)


@app.post("/v1/bgamma", response_model=svc.BgammaResponse)
def bgamma(req: svc.BgammaRequest):
    return svc.run_bgamma(req)


@app.post("/v1/zeta", response_model=svc.ZetaResponse)
def zeta(req: svc.ZetaRequest):
    return svc.run_zeta(req)


@app.post("/v1/symmetric", response_model=svc.SymmetricResponse)
def symmetric(req: svc.SymmetricRequest):
    return svc.run_symmetric(req)


@app.post("/v1/verify-conv", response_model=svc.VerifyConvResponse)
def verify_conv(req: svc.VerifyConvRequest):
    return svc.run_verify_conv(req)


@app.post("/v1/mc", response_model=svc.McResponse)
def mc(req: svc.McRequest):
    return svc.run_mc(req)
