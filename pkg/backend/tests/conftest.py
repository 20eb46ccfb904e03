from __future__ import annotations

from pathlib import Path
from typing import Optional, Tuple

import pytest

from src.abstraction.alts import explore
from src.abstraction.domain import AbstractState, Interval
from src.cgf.parser import parse_model
from src.imc.translate import to_imc
from src.utils.config import AnalysisConfig

MODELS_DIR = Path(__file__).resolve().parents[1] / "data" / "models"

GROUPIES = """
species X = ?a(1)@lam.X + !b(1)@del.Y
species Y = !a(1)@mu.X + ?b(1)@eta.Y
init X:1, Y:2
"""

GROUPIES_FAMILY = GROUPIES.replace("init X:1, Y:2", "init X:[1,2], Y:[1,2]")


def astate(**bounds: Tuple[int, Optional[int]]) -> AbstractState:
    """astate(X=(1, 2), Y=(0, None)) is {X:[1,2], Y:[0,inf]}."""
    return AbstractState({name: Interval(lo, hi) for name, (lo, hi) in bounds.items()})


@pytest.fixture
def models_dir() -> Path:
    return MODELS_DIR


@pytest.fixture
def groupies():
    return parse_model(GROUPIES)


@pytest.fixture
def groupies_family():
    return parse_model(GROUPIES_FAMILY)


@pytest.fixture
def groupies_alts(groupies_family):
    env, initial = groupies_family
    return explore(env, initial, widening=True)


@pytest.fixture
def groupies_imc(groupies_alts):
    return to_imc(groupies_alts, enum_cap=4096)


@pytest.fixture
def config() -> AnalysisConfig:
    return AnalysisConfig()


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for key in ("CGFA_STATE_CAP", "CGFA_ENUM_CAP", "CGFA_EPSILON", "CGFA_MAX_ITERS", "CGFA_WIDENING", "CGFA_WORKERS"):
        monkeypatch.delenv(key, raising=False)
