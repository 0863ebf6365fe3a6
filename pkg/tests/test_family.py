"""Tests for the synthetic family generator."""

from __future__ import annotations

from fractions import Fraction

import pytest

from helpers import config
from helpers.exceptions import InvalidConfig
from processes.subprocesses.bdd.reorder import VarOrder
from processes.subprocesses.family.generator import GenConfig, generate, mechanism_probabilities, switch_name
from processes.subprocesses.program.evaluate import eval_expr
from processes.subprocesses.program.explicit import explicit_semantics
from processes.subprocesses.program.model import Binary, IntLit, VarRef
from processes.subprocesses.program.parser import parse
from processes.subprocesses.symbolic.encoding import Side, encode
from processes.subprocesses.symbolic.expressions import expr_to_bdd


def _pin(program, **switches):
    """Program whose init additionally fixes the given switches."""
    init = program.init
    for name, value in switches.items():
        init = Binary("&", init, Binary("=", VarRef(name), IntLit(value)))
    return program.with_init(init)


class TestMechanisms:
    def test_voting(self):
        forms = mechanism_probabilities(Fraction("0.1"))
        assert forms["voting"]["error"] == Fraction("0.028")
        assert forms["voting"]["detected"] == 0

    def test_comparison(self):
        forms = mechanism_probabilities(Fraction("0.1"))
        assert forms["comparison"]["error"] == Fraction("0.01")
        assert forms["comparison"]["detected"] == Fraction("0.18")

    def test_none(self):
        forms = mechanism_probabilities(Fraction("0.1"))
        assert forms["none"] == {"error": Fraction("0.1"), "detected": 0}

    def test_fault_free(self):
        for forms in mechanism_probabilities(Fraction(0)).values():
            assert forms == {"error": 0, "detected": 0}


class TestGenerate:
    def test_declarations(self):
        program = generate(GenConfig(blocks=3, p=0.01)).program
        assert program.names == ("s1", "s2", "s3", "pc", "err", "stop")
        assert program.domain("pc").upper == 3
        assert program.has_init_block

    @pytest.mark.parametrize("blocks", [1, 2, 4])
    def test_family_size_counts_initial_switch_settings(self, blocks):
        generated = generate(GenConfig(blocks=blocks, p=0.01))
        program = generated.program
        encoding = encode(program, VarOrder(program.names))
        table = encoding.new_table()
        members = table.sat_count(expr_to_bdd(table, encoding, program.init), encoding.side_bits(Side.ROW))
        assert generated.family_size == 3**blocks == members

    def test_metadata(self):
        metadata = generate(GenConfig(blocks=13, p=0.01)).metadata
        assert metadata["family_size"] == "1594323"
        assert metadata["m"] == 13
        assert metadata["probabilities"]["voting"]["error"] == "0.000298"
        assert "block_p" not in metadata

    def test_same_config_same_bytes(self):
        cfg = GenConfig(blocks=4, p=0.05, seed=7, jitter=0.2)
        assert generate(cfg).source == generate(GenConfig(blocks=4, p=0.05, seed=7, jitter=0.2)).source

    def test_source_reparses(self):
        generated = generate(GenConfig(blocks=3, p=0.02))
        assert parse(generated.source) == generated.program

    def test_jitter_varies_block_probabilities(self):
        metadata = generate(GenConfig(blocks=5, p=0.1, seed=3, jitter=0.5)).metadata
        block_p = [Fraction(value) for value in metadata["block_p"]]
        assert len(block_p) == 5
        assert all(Fraction("0.05") <= value <= Fraction("0.15") for value in block_p)
        assert len(set(block_p)) > 1

    def test_restricted_mechanisms(self):
        generated = generate(GenConfig(blocks=3, p=0.01, mechanisms=("voting", "none")))
        assert generated.family_size == 8
        assert generated.metadata["mechanisms"][0] == ["none", "voting"]

    def test_overrides(self):
        cfg = GenConfig(blocks=3, p=0.01, overrides=((2, ("comparison",)),))
        generated = generate(cfg)
        assert generated.family_size == 9
        assert not eval_expr(
            generated.program.init, {"s1": 0, "s2": 0, "s3": 0, "pc": 0, "err": 0, "stop": 0}
        )
        code = config.MECHANISM_CODES["comparison"]
        assert eval_expr(generated.program.init, {"s1": 0, "s2": code, "s3": 0, "pc": 0, "err": 0, "stop": 0})

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"blocks": 0, "p": 0.1},
            {"blocks": 2, "p": 1.5},
            {"blocks": 2, "p": -0.1},
            {"blocks": 2, "p": 0.1, "mechanisms": ("tmr",)},
            {"blocks": 2, "p": 0.1, "mechanisms": ()},
            {"blocks": 2, "p": 0.1, "jitter": 1.0},
            {"blocks": 2, "p": 0.1, "overrides": ((3, ("none",)),)},
        ],
    )
    def test_invalid_config(self, kwargs):
        with pytest.raises(InvalidConfig):
            GenConfig(**kwargs)


class TestMemberSemantics:
    @pytest.mark.parametrize(
        ("mechanism", "error", "stopped"),
        [("none", 0.1, 0.0), ("comparison", 0.01, 0.18), ("voting", 0.028, 0.0)],
    )
    def test_first_step(self, mechanism, error, stopped):
        program = generate(GenConfig(blocks=1, p=0.1)).program
        code = config.MECHANISM_CODES[mechanism]
        model = explicit_semantics(_pin(program, **{switch_name(1): code}))
        start = (code, 0, 0, 0)
        assert model.initial == frozenset({start})
        step = {target: float(value) for target, value in model.transitions[start].items()}
        assert step.get((code, 1, 1, 0), 0.0) == pytest.approx(error)
        assert step.get((code, 0, 0, 1), 0.0) == pytest.approx(stopped)
        assert step[(code, 1, 0, 0)] == pytest.approx(1 - error - stopped)

    def test_fault_free_pipeline_never_fails(self):
        program = generate(GenConfig(blocks=2, p=0.0)).program
        model = explicit_semantics(program)
        assert all(state[3] == 0 for state in model.states)
        assert all(state[4] == 0 for state in model.states)

    def test_error_is_carried_to_the_end(self):
        program = generate(GenConfig(blocks=2, p=0.5, mechanisms=("none",))).program
        model = explicit_semantics(program)
        assert model.transitions[(0, 0, 1, 1, 0)] == {(0, 0, 2, 1, 0): 1}
        assert model.transitions[(0, 0, 2, 1, 0)] == {(0, 0, 2, 1, 0): 1}
