"""Group sifting over a NodeTable and rebuilding diagrams under a chosen order."""

from __future__ import annotations

import json
import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from helpers import config
from helpers.exceptions import InvalidConfig, NodeLimitExceeded
from processes.subprocesses.bdd.engine import NodeRef, NodeTable

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VarOrder:
    """Total order over program variables, first variable on top."""

    variables: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        if len(set(self.variables)) != len(self.variables):
            raise InvalidConfig(f"Variable order repeats a variable: {list(self.variables)}")

    def __iter__(self):
        return iter(self.variables)

    def __len__(self) -> int:
        return len(self.variables)

    def position(self, name: str) -> int:
        return self.variables.index(name)

    def check_covers(self, names: Sequence[str]) -> None:
        """Raise unless the order is a permutation of ``names``."""
        missing = set(names) - set(self.variables)
        extra = set(self.variables) - set(names)
        if missing or extra:
            raise InvalidConfig(
                f"Variable order must be a permutation of the program variables "
                f"(missing {sorted(missing)}, unknown {sorted(extra)})"
            )

    def expand(self, groups: Mapping[str, Sequence[str]]) -> list[str]:
        """Bit-level order: each variable's bits as one contiguous block."""
        self.check_covers(list(groups))
        return [bit for name in self.variables for bit in groups[name]]

    def to_json(self) -> str:
        return json.dumps(list(self.variables))

    @classmethod
    def from_json(cls, text: str) -> VarOrder:
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(name, str) for name in data):
            raise InvalidConfig("A variable order must be a JSON array of variable names")
        return cls(tuple(data))


@dataclass(frozen=True)
class SiftConfig:
    """Sifting parameters.

    Args:
        max_growth: a group stops moving in one direction once the shared
            size exceeds this factor times the size before its sift.
        passes: maximum number of full passes; later passes run only while
            the previous one shrank the diagrams.
    """

    max_growth: float = field(default_factory=lambda: config.MAX_GROWTH)
    passes: int = config.SIFT_PASSES

    def __post_init__(self) -> None:
        if not self.max_growth > 1:
            raise InvalidConfig(f"max_growth must exceed 1, got {self.max_growth}")
        if self.passes < 1:
            raise InvalidConfig(f"passes must be at least 1, got {self.passes}")


def table_groups(table: NodeTable) -> dict[str, tuple[str, ...]]:
    """Groups of the table with bits in current level order; single bits when undeclared."""
    if not table.groups:
        return {bit: (bit,) for bit in table.bits}
    return {
        name: tuple(sorted(bits, key=table.level_of)) for name, bits in table.groups.items()
    }


def current_order(table: NodeTable) -> VarOrder:
    """Group order of the table's present level arrangement."""
    owner = {bit: name for name, bits in table_groups(table).items() for bit in bits}
    names: list[str] = []
    for bit in table.bits:
        name = owner[bit]
        if not names or names[-1] != name:
            if name in names:
                raise ValueError(f"Bits of group {name!r} are not contiguous")
            names.append(name)
    return VarOrder(tuple(names))


class _Blocks:
    """Group blocks of a table, moved by adjacent level swaps."""

    def __init__(self, table: NodeTable) -> None:
        self.table = table
        self.names = list(current_order(table).variables)
        self.width = {name: len(bits) for name, bits in table_groups(table).items()}

    def start(self, index: int) -> int:
        return sum(self.width[name] for name in self.names[:index])

    def exchange(self, index: int) -> None:
        """Swap the blocks at ``index`` and ``index + 1``, keeping each block's internal order."""
        s = self.start(index)
        a = self.width[self.names[index]]
        b = self.width[self.names[index + 1]]
        done: list[int] = []
        try:
            for t in range(b):
                for level in range(s + a + t - 1, s + t - 1, -1):
                    self.table.swap_adjacent(level)
                    done.append(level)
        except NodeLimitExceeded:
            self.table.collect_garbage()
            for level in reversed(done):
                self.table.swap_adjacent(level)
            raise
        self.names[index], self.names[index + 1] = self.names[index + 1], self.names[index]

    def move(self, index: int, target: int) -> int:
        while index < target:
            self.exchange(index)
            index += 1
        while index > target:
            self.exchange(index - 1)
            index -= 1
        return index


def _measure(table: NodeTable, roots: Sequence[NodeRef]) -> int:
    table.collect_garbage()
    return table.shared_size(roots)


def _sift_group(blocks: _Blocks, roots: Sequence[NodeRef], name: str, cfg: SiftConfig) -> int:
    table = blocks.table
    start = blocks.names.index(name)
    start_size = table.shared_size(roots)
    ceiling = cfg.max_growth * start_size
    best_size, best_pos = start_size, start
    pos = start

    def consider(size: int) -> None:
        nonlocal best_size, best_pos
        if size < best_size or (size == best_size and abs(pos - start) < abs(best_pos - start)):
            best_size, best_pos = size, pos

    while pos < len(blocks.names) - 1:
        try:
            blocks.exchange(pos)
        except NodeLimitExceeded:
            logger.debug("Group %s hit the node limit moving down", name)
            break
        pos += 1
        size = _measure(table, roots)
        consider(size)
        if size > ceiling:
            break
    while pos > 0:
        try:
            blocks.exchange(pos - 1)
        except NodeLimitExceeded:
            logger.debug("Group %s hit the node limit moving up", name)
            break
        pos -= 1
        size = _measure(table, roots)
        consider(size)
        if pos < start and size > ceiling:
            break
    blocks.move(pos, best_pos)
    logger.debug("Group %s sifted from position %d to %d (%d -> %d nodes)", name, start, best_pos, start_size, best_size)
    return best_size


def _sift_pass(table: NodeTable, roots: Sequence[NodeRef], cfg: SiftConfig) -> int:
    blocks = _Blocks(table)
    groups = table_groups(table)
    per_level = table.level_sizes(roots)
    weight = {name: sum(per_level[table.level_of(bit)] for bit in bits) for name, bits in groups.items()}
    position = {name: i for i, name in enumerate(blocks.names)}
    queue = sorted(blocks.names, key=lambda name: (-weight[name], position[name]))
    size = table.shared_size(roots)
    for name in queue:
        size = _sift_group(blocks, roots, name, cfg)
    return size


def arrange(table: NodeTable, target: VarOrder) -> None:
    """Permute the table's group blocks in place into ``target``."""
    blocks = _Blocks(table)
    target.check_covers(blocks.names)
    for index, name in enumerate(target.variables):
        blocks.move(blocks.names.index(name), index)


def reorder(
    table: NodeTable,
    roots: Sequence[NodeRef],
    order: VarOrder,
    cfg: SiftConfig | None = None,
) -> VarOrder:
    """Sift the table's groups and return an order under which ``roots`` are no larger.

    Args:
        table: table holding ``roots``; reordered in place.
        roots: diagrams whose combined size is minimised.
        order: the table's current group order.
        cfg: sifting parameters.

    Returns:
        The group order the table is left in.

    Raises:
        ValueError: if ``order`` does not describe the table's arrangement.
        NodeLimitExceeded: if a partially applied block move cannot be undone.
    """
    cfg = cfg or SiftConfig()
    if current_order(table) != order:
        raise ValueError(f"Order {list(order.variables)} does not match the table's arrangement")
    if len(order) < 2:
        return order

    if all(table.value(f) is not None for f in roots):
        return order
    initial = _measure(table, roots)
    size = initial
    for number in range(1, cfg.passes + 1):
        result = _sift_pass(table, roots, cfg)
        logger.info("Sifting pass %d: %d -> %d nodes", number, size, result)
        if result >= size:
            break
        size = result

    if size > initial:
        logger.warning("Sifting ended larger (%d > %d); restoring the input order", size, initial)
        arrange(table, order)
        return order
    return current_order(table)


def rebuild_under(
    table: NodeTable,
    roots: Sequence[NodeRef],
    target: VarOrder,
) -> tuple[NodeTable, list[NodeRef]]:
    """Copy ``roots`` into a fresh table laid out by ``target``."""
    groups = table_groups(table)
    fresh = NodeTable(
        target.expand(groups),
        node_limit=table.node_limit,
        groups=table.groups,
        gc_ratio=table.gc_ratio,
    )
    fresh.deadline = table.deadline
    return fresh, table.copy_into(fresh, roots)
