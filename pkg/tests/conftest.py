"""Shared fixtures."""

from __future__ import annotations

import random

import pytest

from processes.subprocesses.family.generator import GenConfig, generate
from processes.subprocesses.program.model import Program
from processes.subprocesses.program.parser import parse
from tests.builders import COIN, COUNTER, TWO_MEMBERS, family


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


@pytest.fixture
def counter() -> Program:
    return parse(COUNTER)


@pytest.fixture
def coin() -> Program:
    return parse(COIN)


@pytest.fixture
def two_members() -> Program:
    return parse(TWO_MEMBERS)


@pytest.fixture
def family3() -> Program:
    return family(3)


@pytest.fixture
def family_file(tmp_path):
    """Write an m-block family to disk and return its path."""

    def write(blocks: int, p: float = 0.01) -> str:
        path = tmp_path / f"family{blocks}.pm"
        path.write_text(generate(GenConfig(blocks=blocks, p=p)).source, encoding="utf-8")
        return str(path)

    return write
