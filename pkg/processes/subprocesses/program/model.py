"""Immutable syntax tree of guarded-command programs."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from fractions import Fraction

ARITHMETIC_OPS = ("+", "-", "*", "/")
RELATIONAL_OPS = ("=", "!=", "<", "<=", ">", ">=")
BOOLEAN_OPS = ("&", "|", "=>")

Evaluation = Mapping[str, int]


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class BoolLit:
    value: bool


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class Unary:
    """``!`` on Booleans, ``-`` on integers."""

    op: str
    operand: Expr


@dataclass(frozen=True)
class Binary:
    op: str
    left: Expr
    right: Expr


Expr = IntLit | BoolLit | VarRef | Unary | Binary


def conjunction(parts: list[Expr]) -> Expr:
    """Left-folded ``&`` of ``parts``; ``true`` when empty."""
    if not parts:
        return BoolLit(True)
    result = parts[0]
    for part in parts[1:]:
        result = Binary("&", result, part)
    return result


def disjunction(parts: list[Expr]) -> Expr:
    """Left-folded ``|`` of ``parts``; ``false`` when empty."""
    if not parts:
        return BoolLit(False)
    result = parts[0]
    for part in parts[1:]:
        result = Binary("|", result, part)
    return result


@dataclass(frozen=True)
class Domain:
    """Inclusive integer interval."""

    lower: int
    upper: int

    @property
    def size(self) -> int:
        return self.upper - self.lower + 1

    def __contains__(self, value: object) -> bool:
        return isinstance(value, int) and self.lower <= value <= self.upper

    def values(self) -> range:
        return range(self.lower, self.upper + 1)


@dataclass(frozen=True)
class VarDecl:
    name: str
    domain: Domain
    initial: int | None = None
    index: int = 0

    @property
    def initial_value(self) -> int:
        """Declared initializer, or the lower bound when none is given."""
        return self.domain.lower if self.initial is None else self.initial


@dataclass(frozen=True)
class Update:
    """Simultaneous assignments; unassigned variables keep their value."""

    assignments: tuple[tuple[str, Expr], ...] = ()

    def as_dict(self) -> dict[str, Expr]:
        return dict(self.assignments)


@dataclass(frozen=True)
class Branch:
    probability: Fraction
    update: Update


@dataclass(frozen=True)
class Command:
    guard: Expr
    branches: tuple[Branch, ...]
    label: str | None = None


@dataclass(frozen=True)
class Program:
    """A program ``(Var, C, init)``.

    ``init`` always holds the initial-state expression: the init block when
    the source has one, otherwise the conjunction of declared initializers.
    """

    declarations: tuple[VarDecl, ...]
    commands: tuple[Command, ...]
    init: Expr
    has_init_block: bool = False
    _by_name: dict[str, VarDecl] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_name", {decl.name: decl for decl in self.declarations})

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(decl.name for decl in self.declarations)

    def decl(self, name: str) -> VarDecl:
        return self._by_name[name]

    def domain(self, name: str) -> Domain:
        return self._by_name[name].domain

    def declares(self, name: str) -> bool:
        return name in self._by_name

    def with_init(self, init: Expr) -> Program:
        """Same variables and commands with ``init`` as an explicit init block."""
        return Program(self.declarations, self.commands, init, has_init_block=True)


def declared_init(declarations: tuple[VarDecl, ...]) -> Expr:
    return conjunction([Binary("=", VarRef(d.name), IntLit(d.initial_value)) for d in declarations])
