"""Parser for the guarded-command language, built on a lark LALR grammar."""

from __future__ import annotations

import logging
from fractions import Fraction
from functools import cache

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError

from helpers.exceptions import ParseError, ValidationError
from processes.subprocesses.program.model import (
    Binary,
    BoolLit,
    Branch,
    Command,
    Domain,
    IntLit,
    Program,
    Unary,
    Update,
    VarDecl,
    VarRef,
    declared_init,
)
from processes.subprocesses.program.validate import validate

logger = logging.getLogger(__name__)

GRAMMAR = r"""
    start: model_type? statement*

    model_type: "dtmc"

    ?statement: var_decl
              | command
              | init_block

    var_decl: "var" NAME ":" "[" int_const ".." int_const "]" ["init" int_const] ";"
    init_block: "init" expr "endinit"

    command: "[" [NAME] "]" expr "->" branch ("+" branch)* ";"
    branch: probability ":" update  -> weighted_branch
          | update                  -> certain_branch
    probability: DECIMAL            -> decimal_probability
               | INT                -> integer_probability
               | INT "/" INT        -> rational_probability
    update: "true"                             -> keep_update
          | assignment ("&" assignment)*       -> assign_update
    assignment: "(" NAME "'" "=" expr ")"

    int_const: INT
             | "-" INT                -> negative_const

    ?expr: implies
    ?implies: or_expr
            | or_expr "=>" implies   -> implies_op
    ?or_expr: and_expr
            | or_expr "|" and_expr   -> or_op
    ?and_expr: not_expr
             | and_expr "&" not_expr -> and_op
    ?not_expr: relation
             | "!" not_expr          -> not_op
    ?relation: sum
             | sum "=" sum           -> eq_op
             | sum "!=" sum          -> ne_op
             | sum "<" sum           -> lt_op
             | sum "<=" sum          -> le_op
             | sum ">" sum           -> gt_op
             | sum ">=" sum          -> ge_op
    ?sum: product
        | sum "+" product            -> add_op
        | sum "-" product            -> sub_op
    ?product: unary
            | product "*" unary      -> mul_op
            | product "/" unary      -> div_op
    ?unary: atom
          | "-" unary                -> neg_op
    ?atom: INT                       -> int_lit
         | "true"                    -> true_lit
         | "false"                   -> false_lit
         | NAME                      -> var_ref
         | "(" expr ")"

    NAME: /[A-Za-z_][A-Za-z0-9_]*/
    INT: /[0-9]+/
    DECIMAL.2: /[0-9]+\.[0-9]+/
    COMMENT: "//" /[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""


def _binary(op: str):
    return lambda self, left, right: Binary(op, left, right)


@v_args(inline=True)
class _ToAst(Transformer):
    """Turns the parse tree into model objects; statements come out as tagged tuples."""

    def start(self, *items):
        return [item for item in items if item is not None]

    def model_type(self):
        return None

    def var_decl(self, name: Token, lower: int, upper: int, initial: int | None):
        return ("decl", name, Domain(lower, upper), initial)

    def init_block(self, expr):
        return ("init", expr)

    def command(self, label: Token | None, guard, *branches):
        return ("command", Command(guard, tuple(branches), str(label) if label is not None else None))

    def weighted_branch(self, probability: Fraction, update: Update):
        return Branch(probability, update)

    def certain_branch(self, update: Update):
        return Branch(Fraction(1), update)

    def decimal_probability(self, token: Token):
        return Fraction(str(token))

    def integer_probability(self, token: Token):
        return Fraction(int(token))

    def rational_probability(self, numerator: Token, denominator: Token):
        if int(denominator) == 0:
            raise ValidationError(f"Probability {numerator}/{denominator} has a zero denominator")
        return Fraction(int(numerator), int(denominator))

    def keep_update(self):
        return Update(())

    def assign_update(self, *assignments):
        return Update(tuple(assignments))

    def assignment(self, name: Token, expr):
        return (str(name), expr)

    def int_const(self, token: Token):
        return int(token)

    def negative_const(self, token: Token):
        return -int(token)

    def int_lit(self, token: Token):
        return IntLit(int(token))

    def true_lit(self):
        return BoolLit(True)

    def false_lit(self):
        return BoolLit(False)

    def var_ref(self, token: Token):
        return VarRef(str(token))

    def not_op(self, operand):
        return Unary("!", operand)

    def neg_op(self, operand):
        # literals fold so that printed negative constants reparse identically
        if isinstance(operand, IntLit):
            return IntLit(-operand.value)
        return Unary("-", operand)

    implies_op = _binary("=>")
    or_op = _binary("|")
    and_op = _binary("&")
    eq_op = _binary("=")
    ne_op = _binary("!=")
    lt_op = _binary("<")
    le_op = _binary("<=")
    gt_op = _binary(">")
    ge_op = _binary(">=")
    add_op = _binary("+")
    sub_op = _binary("-")
    mul_op = _binary("*")
    div_op = _binary("/")


@cache
def _parser() -> Lark:
    return Lark(GRAMMAR, parser="lalr", lexer="contextual", maybe_placeholders=True)


def parse(source: str) -> Program:
    """Parse and validate program source.

    Args:
        source: program text.

    Returns:
        The validated program. Without an init block its init expression is
        the conjunction of the declared initializers.

    Raises:
        ParseError: on a syntax error, with line and column.
        ValidationError: on duplicate or undeclared variables, type errors,
            bad domains or probabilities.
    """
    try:
        tree = _parser().parse(source)
    except UnexpectedToken as e:
        if e.token.type == "$END":
            raise ParseError(f"Unexpected end of input, expected one of {sorted(e.expected)}") from e
        raise ParseError(f"Unexpected {str(e.token)!r}, expected one of {sorted(e.expected)}", e.line, e.column) from e
    except UnexpectedCharacters as e:
        raise ParseError(f"Unexpected character {e.char!r}", e.line, e.column) from e
    except UnexpectedInput as e:
        raise ParseError("Unexpected end of input") from e

    try:
        statements = _ToAst().transform(tree)
    except VisitError as e:
        raise e.orig_exc from e

    declarations: list[VarDecl] = []
    commands: list[Command] = []
    init_blocks = []
    for statement in statements:
        match statement:
            case ("decl", name, domain, initial):
                declarations.append(VarDecl(str(name), domain, initial, len(declarations)))
            case ("command", command):
                commands.append(command)
            case ("init", expr):
                init_blocks.append(expr)
    if len(init_blocks) > 1:
        raise ValidationError("At most one init block is allowed")

    decls = tuple(declarations)
    if init_blocks:
        program = Program(decls, tuple(commands), init_blocks[0], has_init_block=True)
    else:
        program = Program(decls, tuple(commands), declared_init(decls))
    validate(program)
    logger.debug("Parsed %d variables and %d commands", len(decls), len(commands))
    return program
