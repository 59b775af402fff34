from __future__ import annotations

from pydantic import BaseModel, Field

from ..protocol import ALICE_SECRET_LENGTH, BOB_SECRET_LENGTH, DEFAULT_DIGEST, DEFAULT_K


class ParamsModel(BaseModel):
    p: int = 256
    w: int = 2
    digest: str = DEFAULT_DIGEST


class ExchangeRequest(ParamsModel):
    K: int = Field(default=DEFAULT_K, ge=1, le=4096)
    N: int = Field(default=ALICE_SECRET_LENGTH, ge=1, le=65536)
    M: int = Field(default=BOB_SECRET_LENGTH, ge=1, le=65536)
    seed: int | None = None
    reveal_secrets: bool = False


class AttackRequest(ParamsModel):
    g: str
    A: str
    B: str


class SecretsModel(BaseModel):
    a: str
    b: str


class ExchangeResponse(BaseModel):
    params: dict[str, object]
    g: str
    A: str
    B: str
    sa: str
    sb: str
    eve: str
    agreed: bool
    broken: bool
    secrets: SecretsModel | None = None


class AttackResponse(BaseModel):
    e: str
    shared: str


class FixedPointResponse(BaseModel):
    p: int
    w: int
    count: int
    fixed_xi: list[int]
