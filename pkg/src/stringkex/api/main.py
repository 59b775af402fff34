from __future__ import annotations

import logging

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse

from stringkex.attack import AttackInfeasibleError, recover_effective_key, recover_shared
from stringkex.core import (
    FIXED_POINT_SCAN_LIMIT,
    LengthMismatchError,
    ParameterError,
    RingParams,
    as_symbols,
    fixed_point_spectrum,
)
from stringkex.protocol import ProtocolConfig, default_entropy
from stringkex.simulation import simulate_exchange
from stringkex.transcript import TranscriptParseError, decode_hex, encode_hex

from .models import (
    AttackRequest,
    AttackResponse,
    ExchangeRequest,
    ExchangeResponse,
    FixedPointResponse,
    SecretsModel,
)

LOGGER = logging.getLogger("stringkex.api")

app = FastAPI(title="Stringkex Lab API", version="1.0.0")


@app.exception_handler(Exception)
async def unhandled_exception_handler(request: Request, exc: Exception) -> JSONResponse:
    LOGGER.exception("unhandled_error", extra={"path": request.url.path})
    return JSONResponse(status_code=500, content={"detail": "internal_error"})


def _hex(symbols: tuple[int, ...]) -> str:
    return encode_hex(symbols, width=None)


@app.post("/v1/exchange", response_model=ExchangeResponse)
async def post_exchange(body: ExchangeRequest) -> dict[str, object]:
    try:
        cfg = ProtocolConfig.build(p=body.p, w=body.w, k=body.K, digest=body.digest)
    except ParameterError as exc:
        raise HTTPException(status_code=422, detail="invalid_params") from exc

    try:
        run = simulate_exchange(cfg, body.N, body.M, default_entropy(body.seed))
    except AttackInfeasibleError as exc:
        LOGGER.info("attack_infeasible", extra={"component": exc.component})
        raise HTTPException(status_code=422, detail="attack_infeasible") from exc
    if not (run.agreed and run.broken):
        LOGGER.error("exchange_mismatch", extra={"agreed": run.agreed, "broken": run.broken})
    secrets = None
    if body.reveal_secrets:
        secrets = SecretsModel(a=_hex(run.alice_secret), b=_hex(run.bob_secret))
    return {
        "params": {"p": body.p, "w": body.w, "K": body.K, "digest": cfg.digest.name},
        "g": _hex(run.generator),
        "A": _hex(run.alice_public),
        "B": _hex(run.bob_public),
        "sa": _hex(run.alice_shared),
        "sb": _hex(run.bob_shared),
        "eve": _hex(run.eve_shared),
        "agreed": run.agreed,
        "broken": run.broken,
        "secrets": secrets,
    }


@app.post("/v1/attack", response_model=AttackResponse)
async def post_attack(body: AttackRequest) -> dict[str, object]:
    try:
        params = RingParams(p=body.p, w=body.w)
        g, public_a, public_b = (
            as_symbols(params, decode_hex(value)) for value in (body.g, body.A, body.B)
        )
    except (ParameterError, TranscriptParseError) as exc:
        raise HTTPException(status_code=422, detail="invalid_params") from exc
    if not len(g) == len(public_a) == len(public_b):
        raise HTTPException(status_code=422, detail="length_mismatch")
    try:
        key = recover_effective_key(params, g, public_a)
        shared = recover_shared(params, key, public_b)
    except AttackInfeasibleError as exc:
        LOGGER.info("attack_infeasible", extra={"component": exc.component})
        raise HTTPException(status_code=422, detail="attack_infeasible") from exc
    except LengthMismatchError as exc:
        raise HTTPException(status_code=422, detail="length_mismatch") from exc
    return {"e": _hex(key.e), "shared": _hex(shared)}


@app.get("/v1/params/fixed-points", response_model=FixedPointResponse)
async def get_fixed_points(
    p: int = Query(..., ge=2),
    w: int = Query(..., ge=1),
) -> dict[str, object]:
    if p > FIXED_POINT_SCAN_LIMIT:
        raise HTTPException(status_code=422, detail="scan_too_large")
    try:
        spectrum = fixed_point_spectrum(p, w)
    except ParameterError as exc:
        raise HTTPException(status_code=422, detail="invalid_params") from exc
    return {
        "p": p,
        "w": w,
        "count": sum(len(alphas) for _, alphas in spectrum),
        "fixed_xi": [xi for xi, _ in spectrum],
    }
