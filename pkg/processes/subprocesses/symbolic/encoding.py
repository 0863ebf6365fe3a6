"""Binary encoding of program variables into row and column bits."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from enum import Enum

from helpers.exceptions import InvalidConfig
from processes.subprocesses.bdd.engine import NodeTable
from processes.subprocesses.bdd.reorder import VarOrder
from processes.subprocesses.program.model import Domain, Program


class Side(Enum):
    ROW = "r"
    COLUMN = "c"


def bit_width(domain: Domain) -> int:
    """Bits needed to number every value of ``domain``; one for singletons."""
    return max(1, (domain.size - 1).bit_length())


@dataclass(frozen=True)
class VarEncoding:
    """Bits of one variable, most significant first."""

    name: str
    domain: Domain
    width: int

    def bits(self, side: Side) -> tuple[str, ...]:
        return tuple(f"{self.name}.{side.value}{j}" for j in range(self.width - 1, -1, -1))

    @property
    def group(self) -> tuple[str, ...]:
        """Row and column bits interleaved pairwise, most significant pair first."""
        return tuple(bit for pair in zip(self.bits(Side.ROW), self.bits(Side.COLUMN), strict=True) for bit in pair)

    def code(self, value: int) -> int:
        return value - self.domain.lower

    def assignment(self, value: int, side: Side) -> dict[str, bool]:
        """Bit values encoding ``value``."""
        code = self.code(value)
        return {bit: bool(code >> (self.width - 1 - i) & 1) for i, bit in enumerate(self.bits(side))}

    def decode(self, assignment: Mapping[str, bool], side: Side) -> int:
        code = 0
        for bit in self.bits(side):
            code = (code << 1) | int(assignment[bit])
        return code + self.domain.lower


@dataclass(frozen=True)
class Encoding:
    """Bit allocation of a program under a variable order."""

    variables: tuple[VarEncoding, ...]
    order: VarOrder

    def __getitem__(self, name: str) -> VarEncoding:
        for var in self.variables:
            if var.name == name:
                return var
        raise KeyError(name)

    @property
    def names(self) -> tuple[str, ...]:
        """Variable names in declaration order."""
        return tuple(var.name for var in self.variables)

    @property
    def groups(self) -> dict[str, tuple[str, ...]]:
        return {var.name: var.group for var in self.variables}

    @property
    def bits(self) -> list[str]:
        """Level order: variables as ordered, each one's bits contiguous."""
        return self.order.expand(self.groups)

    def side_bits(self, side: Side) -> list[str]:
        return [bit for name in self.order for bit in self[name].bits(side)]

    @property
    def column_to_row(self) -> dict[str, str]:
        return dict(zip(self.side_bits(Side.COLUMN), self.side_bits(Side.ROW), strict=True))

    def new_table(self, node_limit: int | None = None, time_limit: float | None = None) -> NodeTable:
        return NodeTable(self.bits, node_limit=node_limit, time_limit=time_limit, groups=self.groups)

    def decode(self, assignment: Mapping[str, bool], side: Side = Side.ROW) -> tuple[int, ...]:
        """State tuple, in declaration order, encoded by ``assignment``."""
        return tuple(var.decode(assignment, side) for var in self.variables)

    def decode_evaluation(self, assignment: Mapping[str, bool], side: Side = Side.ROW) -> dict[str, int]:
        return dict(zip(self.names, self.decode(assignment, side), strict=True))


def encode(program: Program, order: VarOrder) -> Encoding:
    """Allocate ``ceil(log2 |D|)`` row and column bits per variable, laid out by ``order``."""
    try:
        order.check_covers(program.names)
    except InvalidConfig as e:
        raise InvalidConfig(f"Order does not fit the program: {e}") from e
    variables = tuple(VarEncoding(decl.name, decl.domain, bit_width(decl.domain)) for decl in program.declarations)
    return Encoding(variables, order)
