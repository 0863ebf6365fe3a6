"""Reduced ordered decision diagrams with Boolean and real-valued terminals.

Nodes live in a ``NodeTable``: a unique table keyed by ``(level, low, high)``,
an operation cache and per-level node sets that make adjacent level swaps
cheap. Callers hold ``NodeRef`` handles; a handle registers its node as a
root for as long as it is alive, so the mark-and-sweep collector can run at
the entry of any public operation without losing live results. An operation
that runs into the node limit collects and starts over once.

Internally nodes are plain integers. ``FALSE`` and ``TRUE`` are always 0 and 1.
"""

from __future__ import annotations

import functools
import logging
import operator
import struct
import sys
import time
from collections.abc import Callable, Iterable, Iterator, Mapping, Sequence
from enum import Enum

from helpers import config
from helpers.exceptions import (
    IncompleteAssignment,
    KindMismatch,
    NodeLimitExceeded,
    SupportViolation,
    TimeBudgetExceeded,
)

logger = logging.getLogger(__name__)

Terminal = bool | float

TERMINAL_LEVEL = sys.maxsize
FALSE = 0
TRUE = 1


class Kind(Enum):
    """Terminal kind of a diagram."""

    BOOLEAN = "boolean"
    REAL = "real"


BOOLEAN_OPS = frozenset({"and", "or", "xor", "diff"})
REAL_OPS = frozenset({"plus", "times", "max", "min"})
MONADIC_OPS = {"gt_zero": Kind.REAL, "to_real": Kind.BOOLEAN}
COMMUTATIVE = frozenset({"and", "or", "xor", "plus", "times", "max", "min"})

_REAL_FUNCTIONS: dict[str, Callable[[float, float], float]] = {
    "plus": operator.add,
    "times": operator.mul,
    "max": max,
    "min": min,
}


def _terminal_key(value: Terminal) -> tuple[str, object]:
    if isinstance(value, bool):
        return ("b", value)
    return ("r", struct.pack(">d", float(value)))


class NodeRef:
    """Handle on a node of a ``NodeTable``; keeps the node alive while referenced."""

    __slots__ = ("node", "table")

    def __init__(self, table: NodeTable, node: int) -> None:
        self.table = table
        self.node = node
        table._incref(node)

    def __del__(self) -> None:
        table = getattr(self, "table", None)
        if table is not None:
            table._decref(self.node)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NodeRef) and other.table is self.table and other.node == self.node

    def __hash__(self) -> int:
        return hash((id(self.table), self.node))

    def __repr__(self) -> str:
        return f"NodeRef({self.node})"

    def __and__(self, other: NodeRef) -> NodeRef:
        return self.table.apply("and", self, other)

    def __or__(self, other: NodeRef) -> NodeRef:
        return self.table.apply("or", self, other)

    def __xor__(self, other: NodeRef) -> NodeRef:
        return self.table.apply("xor", self, other)

    def __invert__(self) -> NodeRef:
        return self.table.negate(self)


def _collecting(operation: Callable[..., NodeRef]) -> Callable[..., NodeRef]:
    """Run a public operation again after a collection when it hits the node limit.

    Only the outermost operation retries; nested public calls raise through it.
    """

    @functools.wraps(operation)
    def wrapper(self: NodeTable, *args, **kwargs) -> NodeRef:
        if self._busy:
            return operation(self, *args, **kwargs)
        self._busy = True
        try:
            try:
                return operation(self, *args, **kwargs)
            except NodeLimitExceeded:
                if self.collect_garbage() == 0:
                    raise
                logger.debug("Retrying %s after garbage collection", operation.__name__)
                return operation(self, *args, **kwargs)
        finally:
            self._busy = False

    return wrapper


class NodeTable:
    """Manager of hash-consed decision diagram nodes under one level order.

    Args:
        bits: bit-variable identifiers, top level first.
        node_limit: maximum number of nodes held by the table.
        time_limit: wall-clock budget in seconds, counted from construction.
        groups: optional map from group name (program variable) to its bits;
            the bits of each group must be contiguous in ``bits``.
        gc_ratio: share of ``node_limit`` above which a public operation
            first collects garbage.
    """

    def __init__(
        self,
        bits: Sequence[str],
        node_limit: int | None = None,
        time_limit: float | None = None,
        groups: Mapping[str, Sequence[str]] | None = None,
        gc_ratio: float | None = None,
    ) -> None:
        if len(set(bits)) != len(bits):
            raise ValueError(f"Duplicate bit identifiers in {list(bits)}")
        self._bits: list[str] = list(bits)
        self._level_of: dict[str, int] = {bit: level for level, bit in enumerate(self._bits)}
        self.groups: dict[str, tuple[str, ...]] | None = (
            {name: tuple(members) for name, members in groups.items()} if groups else None
        )
        self.node_limit = node_limit if node_limit is not None else config.NODE_LIMIT
        self.gc_ratio = gc_ratio if gc_ratio is not None else config.GC_RATIO
        self.deadline: float | None = None
        if time_limit is not None:
            self.set_time_limit(time_limit)

        self._nodes: dict[int, tuple[int, int, int]] = {}
        self._unique: dict[tuple[int, int, int], int] = {}
        self._by_level: list[set[int]] = [set() for _ in self._bits]
        self._kind: dict[int, Kind] = {}
        self._values: dict[int, Terminal] = {}
        self._terminal_ids: dict[tuple[str, object], int] = {}
        self._refs: dict[int, int] = {}
        self._cache: dict[tuple, int] = {}
        self._next_id = 0
        self._allocations = 0
        self._clock_suspended = False
        self._busy = False
        self.peak_nodes = 0
        self.collections = 0

        if self._const_node(False) != FALSE or self._const_node(True) != TRUE:
            raise AssertionError("Boolean terminals must be nodes 0 and 1")

    # ----------------------
    # Levels and bookkeeping
    # ----------------------

    @property
    def bits(self) -> tuple[str, ...]:
        """Bit identifiers in current level order."""
        return tuple(self._bits)

    @property
    def node_count(self) -> int:
        """Number of nodes currently held, terminals and garbage included."""
        return len(self._nodes)

    def level_of(self, bit: str) -> int:
        try:
            return self._level_of[bit]
        except KeyError as e:
            raise ValueError(f"Unknown bit {bit!r}") from e

    def set_time_limit(self, seconds: float | None) -> None:
        """Restart the wall-clock budget, or clear it with ``None``."""
        self.deadline = None if seconds is None else time.monotonic() + seconds

    def _incref(self, u: int) -> None:
        self._refs[u] = self._refs.get(u, 0) + 1

    def _decref(self, u: int) -> None:
        refs = self._refs
        count = refs.get(u, 0) - 1
        if count > 0:
            refs[u] = count
        else:
            refs.pop(u, None)

    def _ref(self, u: int) -> NodeRef:
        return NodeRef(self, u)

    def _unwrap(self, f: NodeRef) -> int:
        if not isinstance(f, NodeRef):
            raise TypeError(f"Expected NodeRef, got {type(f).__name__}")
        if f.table is not self:
            raise ValueError("NodeRef belongs to another NodeTable")
        return f.node

    def _check_clock(self) -> None:
        if self.deadline is not None and not self._clock_suspended and time.monotonic() > self.deadline:
            raise TimeBudgetExceeded("Wall-clock budget exhausted")

    def _checkpoint(self) -> None:
        """Entry hook of public operations: budget check and garbage collection."""
        self._check_clock()
        if len(self._nodes) > self.gc_ratio * self.node_limit:
            self.collect_garbage()

    def _reserve(self) -> None:
        if len(self._nodes) >= self.node_limit:
            raise NodeLimitExceeded(f"Node limit of {self.node_limit} reached")
        self._allocations += 1
        if self._allocations % config.TIME_CHECK_INTERVAL == 0:
            self._check_clock()

    def _remember(self, key: tuple, result: int) -> None:
        if len(self._cache) >= config.APPLY_CACHE_LIMIT:
            self._cache.clear()
        self._cache[key] = result

    # ----------------------
    # Node construction
    # ----------------------

    def _const_node(self, value: Terminal) -> int:
        key = _terminal_key(value)
        u = self._terminal_ids.get(key)
        if u is not None:
            return u
        self._reserve()
        u = self._next_id
        self._next_id += 1
        stored: Terminal = value if isinstance(value, bool) else float(value)
        self._nodes[u] = (TERMINAL_LEVEL, u, u)
        self._values[u] = stored
        self._kind[u] = Kind.BOOLEAN if isinstance(value, bool) else Kind.REAL
        self._terminal_ids[key] = u
        self.peak_nodes = max(self.peak_nodes, len(self._nodes))
        return u

    def _mk(self, level: int, low: int, high: int) -> int:
        if low == high:
            return low
        key = (level, low, high)
        u = self._unique.get(key)
        if u is not None:
            return u
        self._reserve()
        u = self._next_id
        self._next_id += 1
        self._nodes[u] = key
        self._unique[key] = u
        self._by_level[level].add(u)
        self._kind[u] = self._kind[low]
        if len(self._nodes) > self.peak_nodes:
            self.peak_nodes = len(self._nodes)
        return u

    def _cofactors(self, u: int, level: int) -> tuple[int, int]:
        node_level, low, high = self._nodes[u]
        if node_level == level:
            return low, high
        return u, u

    @property
    def false(self) -> NodeRef:
        return self._ref(FALSE)

    @property
    def true(self) -> NodeRef:
        return self._ref(TRUE)

    @_collecting
    def mk_const(self, value: Terminal) -> NodeRef:
        """Return the unique terminal for a Boolean or real value."""
        self._checkpoint()
        return self._ref(self._const_node(value))

    const = mk_const

    @_collecting
    def mk_node(self, level: int, low: NodeRef, high: NodeRef) -> NodeRef:
        """Return the node testing ``level`` with the given successors."""
        self._checkpoint()
        u, v = self._unwrap(low), self._unwrap(high)
        if not 0 <= level < len(self._bits):
            raise ValueError(f"Level {level} out of range")
        if level >= self._nodes[u][0] or level >= self._nodes[v][0]:
            raise ValueError(f"Level {level} must lie strictly above its successors")
        if self._kind[u] is not self._kind[v]:
            raise KindMismatch("Successors of one node must share a terminal kind")
        return self._ref(self._mk(level, u, v))

    @_collecting
    def var(self, bit: str) -> NodeRef:
        """Projection function of one bit."""
        self._checkpoint()
        return self._ref(self._mk(self.level_of(bit), FALSE, TRUE))

    @_collecting
    def cube(self, assignment: Mapping[str, bool]) -> NodeRef:
        """Conjunction of literals fixing each listed bit."""
        self._checkpoint()
        r = TRUE
        for level in sorted((self.level_of(bit) for bit in assignment), reverse=True):
            if assignment[self._bits[level]]:
                r = self._mk(level, FALSE, r)
            else:
                r = self._mk(level, r, FALSE)
        return self._ref(r)

    def kind(self, f: NodeRef) -> Kind:
        return self._kind[self._unwrap(f)]

    def value(self, f: NodeRef) -> Terminal | None:
        """Terminal value of ``f``, or None when ``f`` is a decision node."""
        return self._values.get(self._unwrap(f))

    def _expect(self, u: int, kind: Kind) -> None:
        if self._kind[u] is not kind:
            raise KindMismatch(f"Expected a {kind.value} diagram, got {self._kind[u].value}")

    # ----------------------
    # Apply family
    # ----------------------

    @_collecting
    def apply(self, op: str, f: NodeRef, g: NodeRef | None = None) -> NodeRef:
        """Pointwise ``op`` of ``f`` and ``g``.

        Boolean: and, or, xor, diff. Real: plus, times, max, min.
        Monadic (``g`` omitted): gt_zero (real to Boolean), to_real.
        """
        self._checkpoint()
        if op in MONADIC_OPS:
            if g is not None:
                raise ValueError(f"Operator {op!r} takes one operand")
            u = self._unwrap(f)
            self._expect(u, MONADIC_OPS[op])
            return self._ref(self._monadic(op, u))
        if op in BOOLEAN_OPS:
            kind = Kind.BOOLEAN
        elif op in REAL_OPS:
            kind = Kind.REAL
        else:
            raise ValueError(f"Unknown operator {op!r}")
        if g is None:
            raise ValueError(f"Operator {op!r} takes two operands")
        u, v = self._unwrap(f), self._unwrap(g)
        self._expect(u, kind)
        self._expect(v, kind)
        return self._ref(self._apply(op, u, v))

    def _terminal_case(self, op: str, u: int, v: int) -> int | None:
        if op == "and":
            if u == FALSE or v == FALSE:
                return FALSE
            if u == TRUE:
                return v
            if v == TRUE or u == v:
                return u
            return None
        if op == "or":
            if u == TRUE or v == TRUE:
                return TRUE
            if u == FALSE:
                return v
            if v == FALSE or u == v:
                return u
            return None
        if op == "xor":
            if u == v:
                return FALSE
            if u == FALSE:
                return v
            if v == FALSE:
                return u
            return None
        if op == "diff":
            if u == FALSE or v == TRUE or u == v:
                return FALSE
            if v == FALSE:
                return u
            return None
        a = self._values.get(u)
        b = self._values.get(v)
        if a is not None and b is not None:
            return self._const_node(float(_REAL_FUNCTIONS[op](a, b)))
        if op == "plus":
            if a == 0.0:
                return v
            if b == 0.0:
                return u
        elif op == "times":
            if a == 0.0:
                return u
            if b == 0.0:
                return v
            if a == 1.0:
                return v
            if b == 1.0:
                return u
        elif u == v:
            return u
        return None

    def _apply(self, op: str, u: int, v: int) -> int:
        r = self._terminal_case(op, u, v)
        if r is not None:
            return r
        if op in COMMUTATIVE and v < u:
            u, v = v, u
        key = (op, u, v)
        r = self._cache.get(key)
        if r is not None:
            return r
        nodes = self._nodes
        level = min(nodes[u][0], nodes[v][0])
        u0, u1 = self._cofactors(u, level)
        v0, v1 = self._cofactors(v, level)
        r = self._mk(level, self._apply(op, u0, v0), self._apply(op, u1, v1))
        self._remember(key, r)
        return r

    def _monadic(self, op: str, u: int) -> int:
        value = self._values.get(u)
        if value is not None:
            if op == "gt_zero":
                return TRUE if value > 0 else FALSE
            return self._const_node(1.0 if value else 0.0)
        key = (op, u)
        r = self._cache.get(key)
        if r is not None:
            return r
        level, low, high = self._nodes[u]
        r = self._mk(level, self._monadic(op, low), self._monadic(op, high))
        self._remember(key, r)
        return r

    def to_real(self, f: NodeRef) -> NodeRef:
        """Boolean diagram as a 0.0/1.0 real diagram."""
        return self.apply("to_real", f)

    def greater_than_zero(self, f: NodeRef) -> NodeRef:
        return self.apply("gt_zero", f)

    @_collecting
    def ite(self, f: NodeRef, g: NodeRef, h: NodeRef) -> NodeRef:
        """Pointwise if-then-else; ``f`` is Boolean, ``g`` and ``h`` share a kind."""
        self._checkpoint()
        u, v, w = self._unwrap(f), self._unwrap(g), self._unwrap(h)
        self._expect(u, Kind.BOOLEAN)
        if self._kind[v] is not self._kind[w]:
            raise KindMismatch("Both branches of ite must share a terminal kind")
        return self._ref(self._ite(u, v, w))

    @_collecting
    def negate(self, f: NodeRef) -> NodeRef:
        """Boolean complement, defined as ite(f, false, true)."""
        self._checkpoint()
        u = self._unwrap(f)
        self._expect(u, Kind.BOOLEAN)
        return self._ref(self._ite(u, FALSE, TRUE))

    def _ite(self, f: int, g: int, h: int) -> int:
        if f == TRUE:
            return g
        if f == FALSE:
            return h
        if g == h:
            return g
        if g == TRUE and h == FALSE:
            return f
        key = ("ite", f, g, h)
        r = self._cache.get(key)
        if r is not None:
            return r
        nodes = self._nodes
        level = min(nodes[f][0], nodes[g][0], nodes[h][0])
        f0, f1 = self._cofactors(f, level)
        g0, g1 = self._cofactors(g, level)
        h0, h1 = self._cofactors(h, level)
        r = self._mk(level, self._ite(f0, g0, h0), self._ite(f1, g1, h1))
        self._remember(key, r)
        return r

    # ----------------------
    # Abstraction and renaming
    # ----------------------

    def _levels_of(self, bits: Iterable[str]) -> frozenset[int]:
        return frozenset(self.level_of(bit) for bit in bits)

    @_collecting
    def exists_abstract(self, f: NodeRef, bits: Iterable[str]) -> NodeRef:
        """Existential quantification of ``f`` over ``bits``."""
        self._checkpoint()
        u = self._unwrap(f)
        self._expect(u, Kind.BOOLEAN)
        levels = self._levels_of(bits)
        if not levels:
            return self._ref(u)
        return self._ref(self._exists(u, levels, max(levels)))

    def _exists(self, u: int, levels: frozenset[int], top: int) -> int:
        level, low, high = self._nodes[u]
        if level > top:
            return u
        key = ("exists", u, levels)
        r = self._cache.get(key)
        if r is not None:
            return r
        r0 = self._exists(low, levels, top)
        if level in levels:
            r = TRUE if r0 == TRUE else self._apply("or", r0, self._exists(high, levels, top))
        else:
            r = self._mk(level, r0, self._exists(high, levels, top))
        self._remember(key, r)
        return r

    @_collecting
    def and_abstract(self, f: NodeRef, g: NodeRef, bits: Iterable[str]) -> NodeRef:
        """Relational product: exists ``bits`` of (f and g), without building f and g."""
        self._checkpoint()
        u, v = self._unwrap(f), self._unwrap(g)
        self._expect(u, Kind.BOOLEAN)
        self._expect(v, Kind.BOOLEAN)
        levels = self._levels_of(bits)
        if not levels:
            return self._ref(self._apply("and", u, v))
        return self._ref(self._and_exists(u, v, levels, max(levels)))

    def _and_exists(self, u: int, v: int, levels: frozenset[int], top: int) -> int:
        if u == FALSE or v == FALSE:
            return FALSE
        if u == TRUE and v == TRUE:
            return TRUE
        if u == TRUE or u == v:
            return self._exists(v, levels, top)
        if v == TRUE:
            return self._exists(u, levels, top)
        if v < u:
            u, v = v, u
        nodes = self._nodes
        level = min(nodes[u][0], nodes[v][0])
        if level > top:
            return self._apply("and", u, v)
        key = ("and_exists", u, v, levels)
        r = self._cache.get(key)
        if r is not None:
            return r
        u0, u1 = self._cofactors(u, level)
        v0, v1 = self._cofactors(v, level)
        r0 = self._and_exists(u0, v0, levels, top)
        if level in levels:
            r = TRUE if r0 == TRUE else self._apply("or", r0, self._and_exists(u1, v1, levels, top))
        else:
            r = self._mk(level, r0, self._and_exists(u1, v1, levels, top))
        self._remember(key, r)
        return r

    @_collecting
    def sum_abstract(self, f: NodeRef, bits: Iterable[str]) -> NodeRef:
        """Sum a real diagram over every assignment of ``bits``."""
        self._checkpoint()
        u = self._unwrap(f)
        self._expect(u, Kind.REAL)
        return self._ref(self._sum(u, tuple(sorted(self._levels_of(bits))), 0))

    def _sum(self, u: int, levels: tuple[int, ...], i: int) -> int:
        if i == len(levels):
            return u
        key = ("sum", u, levels, i)
        r = self._cache.get(key)
        if r is not None:
            return r
        q = levels[i]
        level, low, high = self._nodes[u]
        if level < q:
            r = self._mk(level, self._sum(low, levels, i), self._sum(high, levels, i))
        elif level == q:
            r = self._apply("plus", self._sum(low, levels, i + 1), self._sum(high, levels, i + 1))
        else:
            rest = self._sum(u, levels, i + 1)
            r = self._apply("plus", rest, rest)
        self._remember(key, r)
        return r

    @_collecting
    def rename(self, f: NodeRef, mapping: Mapping[str, str]) -> NodeRef:
        """Substitute bits by bits; targets must not already occur in ``f``."""
        self._checkpoint()
        u = self._unwrap(f)
        level_map = {self.level_of(src): self.level_of(dst) for src, dst in mapping.items()}
        clash = (set(level_map.values()) & self._support_levels(u)) - set(level_map)
        if clash:
            names = sorted(self._bits[level] for level in clash)
            raise ValueError(f"Rename targets already occur in the diagram: {names}")
        nodes = self._nodes
        memo: dict[int, int] = {}

        def walk(w: int) -> int:
            level, low, high = nodes[w]
            if level == TERMINAL_LEVEL:
                return w
            r = memo.get(w)
            if r is not None:
                return r
            r0, r1 = walk(low), walk(high)
            target = level_map.get(level, level)
            if target < nodes[r0][0] and target < nodes[r1][0]:
                r = self._mk(target, r0, r1)
            else:
                r = self._ite(self._mk(target, FALSE, TRUE), r1, r0)
            memo[w] = r
            return r

        return self._ref(walk(u))

    # ----------------------
    # Inspection
    # ----------------------

    def _reachable(self, roots: Iterable[int]) -> set[int]:
        nodes = self._nodes
        seen: set[int] = set()
        stack = list(roots)
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            level, low, high = nodes[u]
            if level != TERMINAL_LEVEL:
                stack.append(low)
                stack.append(high)
        return seen

    def size(self, f: NodeRef) -> int:
        """Number of distinct nodes reachable from ``f``, terminals included."""
        return len(self._reachable([self._unwrap(f)]))

    def shared_size(self, roots: Iterable[NodeRef]) -> int:
        """Number of distinct nodes reachable from any of ``roots``."""
        return len(self._reachable([self._unwrap(f) for f in roots]))

    def level_sizes(self, roots: Iterable[NodeRef]) -> list[int]:
        """Decision nodes per level among nodes reachable from ``roots``."""
        counts = [0] * len(self._bits)
        for u in self._reachable([self._unwrap(f) for f in roots]):
            level = self._nodes[u][0]
            if level != TERMINAL_LEVEL:
                counts[level] += 1
        return counts

    def _support_levels(self, u: int) -> set[int]:
        return {self._nodes[w][0] for w in self._reachable([u])} - {TERMINAL_LEVEL}

    def support(self, f: NodeRef) -> frozenset[str]:
        """Bits ``f`` depends on."""
        return frozenset(self._bits[level] for level in self._support_levels(self._unwrap(f)))

    def terminal_values(self, f: NodeRef) -> set[Terminal]:
        """Terminal values reachable from ``f``."""
        return {self._values[u] for u in self._reachable([self._unwrap(f)]) if u in self._values}

    def sat_count(self, f: NodeRef, support: Iterable[str]) -> int:
        """Exact number of assignments over ``support`` satisfying ``f``."""
        u = self._unwrap(f)
        self._expect(u, Kind.BOOLEAN)
        support_levels = sorted(self._levels_of(support))
        outside = self._support_levels(u) - set(support_levels)
        if outside:
            names = sorted(self._bits[level] for level in outside)
            raise SupportViolation(f"Diagram mentions bits outside the support: {names}")
        position = {level: i for i, level in enumerate(support_levels)}
        position[TERMINAL_LEVEL] = len(support_levels)
        nodes = self._nodes
        memo: dict[int, int] = {FALSE: 0, TRUE: 1}

        def count(w: int) -> int:
            r = memo.get(w)
            if r is not None:
                return r
            level, low, high = nodes[w]
            here = position[level]
            r = (count(low) << (position[nodes[low][0]] - here - 1)) + (
                count(high) << (position[nodes[high][0]] - here - 1)
            )
            memo[w] = r
            return r

        return count(u) << position[nodes[u][0]]

    def eval(self, f: NodeRef, assignment: Mapping[str, bool]) -> Terminal:
        """Follow the successors chosen by ``assignment`` down to a terminal."""
        u = self._unwrap(f)
        nodes = self._nodes
        while True:
            level, low, high = nodes[u]
            if level == TERMINAL_LEVEL:
                return self._values[u]
            bit = self._bits[level]
            if bit not in assignment:
                raise IncompleteAssignment(f"Assignment does not cover bit {bit!r}")
            u = high if assignment[bit] else low

    def iter_assignments(self, f: NodeRef, support: Iterable[str]) -> Iterator[dict[str, bool]]:
        """Yield every satisfying assignment of ``f`` over ``support``."""
        u = self._unwrap(f)
        self._expect(u, Kind.BOOLEAN)
        levels = sorted(self._levels_of(support))
        outside = self._support_levels(u) - set(levels)
        if outside:
            raise SupportViolation(f"Diagram mentions bits outside the support: {sorted(outside)}")
        nodes, bits = self._nodes, self._bits
        partial: dict[str, bool] = {}

        def walk(w: int, i: int) -> Iterator[dict[str, bool]]:
            if w == FALSE:
                return
            if i == len(levels):
                yield dict(partial)
                return
            level = levels[i]
            node_level, low, high = nodes[w]
            branches = ((False, low), (True, high)) if node_level == level else ((False, w), (True, w))
            for value, child in branches:
                partial[bits[level]] = value
                yield from walk(child, i + 1)
            del partial[bits[level]]

        yield from walk(u, 0)

    def iter_paths(self, f: NodeRef) -> Iterator[tuple[dict[str, bool], Terminal]]:
        """Yield (cube, value) for every path ending in a non-false, non-zero terminal."""
        nodes, bits, values = self._nodes, self._bits, self._values
        cube: dict[str, bool] = {}

        def walk(w: int) -> Iterator[tuple[dict[str, bool], Terminal]]:
            level, low, high = nodes[w]
            if level == TERMINAL_LEVEL:
                if values[w]:
                    yield dict(cube), values[w]
                return
            bit = bits[level]
            cube[bit] = False
            yield from walk(low)
            cube[bit] = True
            yield from walk(high)
            del cube[bit]

        yield from walk(self._unwrap(f))

    # ----------------------
    # Reordering primitive
    # ----------------------

    def swap_adjacent(self, level: int) -> None:
        """Exchange ``level`` and ``level + 1``; every handle keeps its function."""
        self._checkpoint()
        if not 0 <= level < len(self._bits) - 1:
            raise ValueError(f"No adjacent pair at level {level}")
        self._swap(level)

    def _dependent_nodes(self, i: int) -> list[int]:
        lower = self._by_level[i + 1]
        nodes = self._nodes
        return [u for u in self._by_level[i] if nodes[u][1] in lower or nodes[u][2] in lower]

    def _swap(self, i: int) -> None:
        j = i + 1
        dependent = self._dependent_nodes(i)
        if len(self._nodes) + 2 * len(dependent) > self.node_limit:
            self.collect_garbage()
            dependent = self._dependent_nodes(i)
            if len(self._nodes) + 2 * len(dependent) > self.node_limit:
                raise NodeLimitExceeded(f"Swapping levels {i} and {j} could exceed the node limit of {self.node_limit}")

        nodes, unique = self._nodes, self._unique
        upper, lower = self._by_level[i], self._by_level[j]
        for u in upper:
            del unique[nodes[u]]
        for u in lower:
            del unique[nodes[u]]
        new_upper: set[int] = set()
        new_lower: set[int] = set()
        self._by_level[i], self._by_level[j] = new_upper, new_lower

        # nodes of the lower variable move up unchanged
        for u in lower:
            _, low, high = nodes[u]
            key = (i, low, high)
            nodes[u] = key
            unique[key] = u
            new_upper.add(u)
        # upper nodes that skip the lower variable move down unchanged
        moved = set(dependent)
        for u in upper:
            if u in moved:
                continue
            _, low, high = nodes[u]
            key = (j, low, high)
            nodes[u] = key
            unique[key] = u
            new_lower.add(u)
        # the rest are rebuilt in place so that outside handles stay valid
        self._clock_suspended = True
        try:
            for u in dependent:
                _, low, high = nodes[u]
                v0, v1 = (nodes[low][1], nodes[low][2]) if low in lower else (low, low)
                w0, w1 = (nodes[high][1], nodes[high][2]) if high in lower else (high, high)
                p = self._mk(j, v0, w0)
                q = self._mk(j, v1, w1)
                key = (i, p, q)
                nodes[u] = key
                unique[key] = u
                new_upper.add(u)
        finally:
            self._clock_suspended = False

        bit_i, bit_j = self._bits[i], self._bits[j]
        self._bits[i], self._bits[j] = bit_j, bit_i
        self._level_of[bit_i], self._level_of[bit_j] = j, i
        self._cache.clear()

    # ----------------------
    # Garbage collection
    # ----------------------

    def collect_garbage(self) -> int:
        """Mark from registered handles, sweep everything else. Returns nodes freed."""
        live = self._reachable([FALSE, TRUE, *self._refs])
        dead = [u for u in self._nodes if u not in live]
        for u in dead:
            key = self._nodes.pop(u)
            del self._kind[u]
            if key[0] == TERMINAL_LEVEL:
                value = self._values.pop(u)
                del self._terminal_ids[_terminal_key(value)]
            else:
                del self._unique[key]
                self._by_level[key[0]].discard(u)
        self._cache.clear()
        self.collections += 1
        logger.debug("Garbage collection freed %d nodes, %d remain", len(dead), len(self._nodes))
        return len(dead)

    # ----------------------
    # Transfer, audit and debug output
    # ----------------------

    def copy_into(self, other: NodeTable, roots: Sequence[NodeRef]) -> list[NodeRef]:
        """Rebuild ``roots`` in ``other``, whose level order may differ."""
        other._checkpoint()
        nodes, values, bits = self._nodes, self._values, self._bits
        memo: dict[int, int] = {}

        def copy(u: int) -> int:
            r = memo.get(u)
            if r is not None:
                return r
            level, low, high = nodes[u]
            if level == TERMINAL_LEVEL:
                r = other._const_node(values[u])
            else:
                r0, r1 = copy(low), copy(high)
                target = other.level_of(bits[level])
                if target < other._nodes[r0][0] and target < other._nodes[r1][0]:
                    r = other._mk(target, r0, r1)
                else:
                    r = other._ite(other._mk(target, FALSE, TRUE), r1, r0)
            memo[u] = r
            return r

        copied = [copy(self._unwrap(f)) for f in roots]
        return [other._ref(u) for u in copied]

    def audit(self) -> list[str]:
        """Structural check of ordering, reduction and uniqueness. Empty when sound."""
        problems: list[str] = []
        triples: dict[tuple[int, int, int], int] = {}
        decision = 0
        for u, key in self._nodes.items():
            level, low, high = key
            if level == TERMINAL_LEVEL:
                continue
            decision += 1
            if low == high:
                problems.append(f"node {u} is redundant")
            for child in (low, high):
                if self._nodes[child][0] <= level:
                    problems.append(f"node {u} at level {level} points up to node {child}")
                if self._kind[child] is not self._kind[u]:
                    problems.append(f"node {u} mixes terminal kinds")
            if key in triples:
                problems.append(f"nodes {triples[key]} and {u} share {key}")
            triples[key] = u
            if self._unique.get(key) != u:
                problems.append(f"node {u} is missing from the unique table")
            if u not in self._by_level[level]:
                problems.append(f"node {u} is missing from its level set")
        if len(self._unique) != decision:
            problems.append(f"unique table holds {len(self._unique)} entries for {decision} nodes")
        return problems

    def to_dot(self, roots: Sequence[NodeRef]) -> str:
        """DOT text of the diagrams below ``roots``: solid 1-edges, dashed 0-edges."""
        lines = ["digraph diagram {"]
        for u in sorted(self._reachable([self._unwrap(f) for f in roots])):
            level, low, high = self._nodes[u]
            if level == TERMINAL_LEVEL:
                lines.append(f'  n{u} [shape=box, label="{self._values[u]}"];')
                continue
            lines.append(f'  n{u} [label="{self._bits[level]}"];')
            lines.append(f"  n{u} -> n{high};")
            lines.append(f"  n{u} -> n{low} [style=dashed];")
        lines.append("}")
        return "\n".join(lines)
