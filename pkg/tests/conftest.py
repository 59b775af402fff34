from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
SRC = ROOT / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))

from stringkex.core import RingParams  # noqa: E402
from stringkex.protocol import ProtocolConfig  # noqa: E402


@pytest.fixture
def default_cfg() -> ProtocolConfig:
    return ProtocolConfig.build(p=256, w=2, k=127, digest="sha512")


@pytest.fixture
def micro_cfg() -> ProtocolConfig:
    return ProtocolConfig.build(p=8, w=2, k=1, digest="stub")


@pytest.fixture
def byte_params() -> RingParams:
    return RingParams(p=256, w=2)


@pytest.fixture
def micro_params() -> RingParams:
    return RingParams(p=8, w=2)
