"""Synthetic redundancy families: a pipeline of blocks, each protected by a switchable mechanism.

Every block owns a switch variable fixed by the init expression, so family
members differ only in their initial evaluation. A token runs through the
blocks one per step; it is either correct or erroneous, and a detected
mismatch of a comparison block stops the pipeline.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from helpers import config
from helpers.exceptions import InvalidConfig
from processes.subprocesses.program.model import (
    Binary,
    Branch,
    Command,
    Domain,
    Expr,
    IntLit,
    Program,
    Update,
    VarDecl,
    VarRef,
    conjunction,
    disjunction,
)
from processes.subprocesses.program.printer import format_probability, format_program
from processes.subprocesses.program.validate import validate

logger = logging.getLogger(__name__)

PC = "pc"
ERROR = "err"
STOP = "stop"


def switch_name(block: int) -> str:
    return f"s{block}"


def mechanism_probabilities(p: Fraction) -> dict[str, dict[str, Fraction]]:
    """Single-step probabilities of an erroneous output and of a detected fault, per mechanism."""
    q = 1 - p
    return {
        "none": {"error": p, "detected": Fraction(0)},
        "comparison": {"error": p * p, "detected": 2 * p * q},
        "voting": {"error": 3 * p * p * q + p**3, "detected": Fraction(0)},
    }


@dataclass(frozen=True)
class GenConfig:
    """Generator parameters.

    Args:
        blocks: number of pipeline blocks.
        p: fault probability of one replica execution.
        mechanisms: mechanisms every block may switch between.
        overrides: per-block mechanism subsets, keyed by 1-based block index.
        seed: seed of the per-block probability jitter.
        jitter: relative jitter of ``p`` per block; 0 disables it.
    """

    blocks: int
    p: float
    mechanisms: tuple[str, ...] = config.MECHANISMS
    overrides: tuple[tuple[int, tuple[str, ...]], ...] = ()
    seed: int = 0
    jitter: float = 0.0

    def __post_init__(self) -> None:
        if self.blocks < 1:
            raise InvalidConfig(f"At least one block is required, got {self.blocks}")
        if not 0 <= self.p <= 1:
            raise InvalidConfig(f"Fault probability must lie in [0, 1], got {self.p}")
        if not 0 <= self.jitter < 1:
            raise InvalidConfig(f"Jitter must lie in [0, 1), got {self.jitter}")
        for block in range(1, self.blocks + 1):
            allowed = self.block_mechanisms(block)
            if not allowed:
                raise InvalidConfig(f"Block {block} has no mechanism")
            unknown = set(allowed) - set(config.MECHANISMS)
            if unknown:
                raise InvalidConfig(f"Unknown mechanisms {sorted(unknown)} for block {block}")
        for block, _ in self.overrides:
            if not 1 <= block <= self.blocks:
                raise InvalidConfig(f"Override for block {block} outside 1..{self.blocks}")

    def block_mechanisms(self, block: int) -> tuple[str, ...]:
        """Mechanisms of ``block`` in canonical order, duplicates dropped."""
        chosen = dict(self.overrides).get(block, self.mechanisms)
        return tuple(name for name in config.MECHANISMS if name in chosen)


@dataclass
class GeneratedFamily:
    program: Program
    source: str
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def family_size(self) -> int:
        return int(self.metadata["family_size"])


def _eq(name: str, value: int) -> Expr:
    return Binary("=", VarRef(name), IntLit(value))


def _set(*pairs: tuple[str, int]) -> Update:
    return Update(tuple((name, IntLit(value)) for name, value in pairs))


def _branches(outcomes: list[tuple[Fraction, Update]]) -> tuple[Branch, ...]:
    return tuple(Branch(probability, update) for probability, update in outcomes if probability > 0)


def _block_probabilities(cfg: GenConfig) -> list[Fraction]:
    base = Fraction(str(cfg.p))
    if cfg.jitter == 0:
        return [base] * cfg.blocks
    rng = random.Random(cfg.seed)
    probabilities = []
    for _ in range(cfg.blocks):
        value = min(1.0, max(0.0, cfg.p * (1 + rng.uniform(-cfg.jitter, cfg.jitter))))
        probabilities.append(Fraction(f"{value:.6f}"))
    return probabilities


def _block_commands(block: int, mechanisms: tuple[str, ...], p: Fraction) -> list[Command]:
    running = conjunction([_eq(PC, block - 1), _eq(STOP, 0)])
    advance = (PC, block)
    commands = [Command(Binary("&", running, _eq(ERROR, 1)), _branches([(Fraction(1), _set(advance))]))]
    forms = mechanism_probabilities(p)
    for name in mechanisms:
        guard = conjunction([running, _eq(ERROR, 0), _eq(switch_name(block), config.MECHANISM_CODES[name])])
        error = forms[name]["error"]
        detected = forms[name]["detected"]
        outcomes = [
            (error, _set((ERROR, 1), advance)),
            (detected, _set((STOP, 1))),
            (1 - error - detected, _set(advance)),
        ]
        commands.append(Command(guard, _branches(outcomes), label=f"{name}{block}"))
    return commands


def generate(cfg: GenConfig) -> GeneratedFamily:
    """Program source and metadata of the family described by ``cfg``."""
    m = cfg.blocks
    declarations = [VarDecl(switch_name(block), Domain(0, 2), None, block - 1) for block in range(1, m + 1)]
    declarations += [
        VarDecl(PC, Domain(0, m), None, m),
        VarDecl(ERROR, Domain(0, 1), None, m + 1),
        VarDecl(STOP, Domain(0, 1), None, m + 2),
    ]

    probabilities = _block_probabilities(cfg)
    commands: list[Command] = []
    switches: list[Expr] = []
    for block in range(1, m + 1):
        allowed = cfg.block_mechanisms(block)
        commands += _block_commands(block, allowed, probabilities[block - 1])
        switches.append(disjunction([_eq(switch_name(block), config.MECHANISM_CODES[name]) for name in allowed]))
    init = conjunction([_eq(PC, 0), _eq(ERROR, 0), _eq(STOP, 0), *switches])

    program = Program(tuple(declarations), tuple(commands), init, has_init_block=True)
    validate(program)
    family_size = math.prod(len(cfg.block_mechanisms(block)) for block in range(1, m + 1))
    metadata = {
        "m": m,
        "p": cfg.p,
        "mechanisms": [list(cfg.block_mechanisms(block)) for block in range(1, m + 1)],
        "family_size": str(family_size),
        "probabilities": {
            name: {kind: format_probability(value) for kind, value in forms.items()}
            for name, forms in mechanism_probabilities(Fraction(str(cfg.p))).items()
        },
    }
    if cfg.jitter:
        metadata["block_p"] = [format_probability(value) for value in probabilities]
    logger.info("Generated %d-block family with %d members", m, family_size)
    return GeneratedFamily(program, format_program(program), metadata)
