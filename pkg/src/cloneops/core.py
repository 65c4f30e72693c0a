"""Finite domains, finitary operations and finitary relations.

Operations are stored as flat value tables over the domain {0..k-1}.
The table index of an argument tuple (x1..xn) is sum(x_i * k^(n-i)),
i.e. lexicographic with the first argument most significant.  All file
formats and enumeration orders in this package use that convention.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterable, Mapping, Sequence


class CapExceeded(RuntimeError):
    """A configurable resource cap (candidate budget, fragment size, ...) was hit."""


@dataclass(frozen=True)
class Domain:
    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"domain size must be at least 2, got {self.k}")

    @property
    def elements(self) -> range:
        return range(self.k)


def args_to_index(args: Sequence[int], k: int) -> int:
    idx = 0
    for x in args:
        idx = idx * k + x
    return idx


def index_to_args(idx: int, k: int, arity: int) -> tuple[int, ...]:
    out = [0] * arity
    for pos in range(arity - 1, -1, -1):
        idx, out[pos] = divmod(idx, k)
    return tuple(out)


@dataclass(frozen=True)
class Operation:
    domain: Domain
    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"arity must be positive, got {self.arity}")
        k = self.domain.k
        expected = k ** self.arity
        object.__setattr__(self, "table", tuple(self.table))
        if len(self.table) != expected:
            raise ValueError(
                f"table has {len(self.table)} entries, expected k^n = {expected}")
        for i, v in enumerate(self.table):
            if not 0 <= v < k:
                raise ValueError(f"table entry {v} at index {i} out of range 0..{k - 1}")

    def __call__(self, *args: int) -> int:
        return evaluate(self, args)

    def __repr__(self):
        t = list(self.table) if len(self.table) <= 32 else f"<{len(self.table)} entries>"
        return f"Operation(k={self.domain.k}, arity={self.arity}, table={t})"


@dataclass(frozen=True)
class Relation:
    domain: Domain
    arity: int
    tuples: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError(f"arity must be positive, got {self.arity}")
        k = self.domain.k
        seen = set()
        for t in self.tuples:
            if len(t) != self.arity:
                raise ValueError(f"tuple {t} has length {len(t)}, expected {self.arity}")
            for v in t:
                if not 0 <= v < k:
                    raise ValueError(f"tuple entry {v} out of range 0..{k - 1}")
            seen.add(tuple(int(v) for v in t))
        object.__setattr__(self, "tuples", tuple(sorted(seen)))

    @cached_property
    def _set(self) -> frozenset:
        return frozenset(self.tuples)

    def __contains__(self, t) -> bool:
        return tuple(t) in self._set

    def __len__(self):
        return len(self.tuples)

    def __repr__(self):
        ts = list(self.tuples) if len(self.tuples) <= 16 else f"<{len(self.tuples)} tuples>"
        return f"Relation(k={self.domain.k}, arity={self.arity}, tuples={ts})"


def relation(domain: Domain, arity: int, tuples: Iterable[Sequence[int]]) -> Relation:
    return Relation(domain, arity, tuple(tuple(t) for t in tuples))


def full_relation(domain: Domain, arity: int) -> Relation:
    return Relation(domain, arity, tuple(product(domain.elements, repeat=arity)))


def equality_relation(domain: Domain) -> Relation:
    return Relation(domain, 2, tuple((a, a) for a in domain.elements))


def make_projection(domain: Domain, arity: int, index: int) -> Operation:
    """The index-th projection of the given arity; index is 1-based."""
    if not 1 <= index <= arity:
        raise ValueError(f"projection index {index} out of range 1..{arity}")
    table = [args[index - 1] for args in product(domain.elements, repeat=arity)]
    return Operation(domain, arity, tuple(table))


def make_constant(domain: Domain, arity: int, value: int) -> Operation:
    if not 0 <= value < domain.k:
        raise ValueError(f"constant value {value} out of range 0..{domain.k - 1}")
    return Operation(domain, arity, (value,) * domain.k ** arity)


def sparse_op(domain: Domain, arity: int, values: Mapping[Sequence[int], int]) -> Operation:
    """Operation that is zero everywhere except at the explicitly listed points."""
    k = domain.k
    table = [0] * k ** arity
    for point, value in values.items():
        if len(point) != arity:
            raise ValueError(f"point {tuple(point)} has length {len(point)}, expected {arity}")
        table[args_to_index(point, k)] = value
    return Operation(domain, arity, tuple(table))


def is_projection(op: Operation) -> int | None:
    """Return the 1-based projected coordinate, or None if op is not a projection."""
    for i in range(op.arity):
        if all(args[i] == v
               for args, v in zip(product(op.domain.elements, repeat=op.arity), op.table)):
            return i + 1
    return None


def evaluate(op: Operation, args: Sequence[int]) -> int:
    if len(args) != op.arity:
        raise ValueError(f"expected {op.arity} arguments, got {len(args)}")
    k = op.domain.k
    for v in args:
        if not 0 <= v < k:
            raise ValueError(f"argument {v} out of range 0..{k - 1}")
    return op.table[args_to_index(args, k)]


def compose(outer: Operation, inners: Sequence[Operation]) -> Operation:
    """Pointwise composition outer(inner_1(x), ..., inner_n(x))."""
    if len(inners) != outer.arity:
        raise ValueError(f"outer arity {outer.arity} needs {outer.arity} inner operations, "
                         f"got {len(inners)}")
    if not inners:
        raise ValueError("composition needs at least one inner operation")
    m = inners[0].arity
    for g in inners:
        if g.domain != outer.domain:
            raise ValueError("inner operation domain differs from outer domain")
        if g.arity != m:
            raise ValueError("inner operations must all have the same arity")
    k = outer.domain.k
    tables = [g.table for g in inners]
    outer_table = outer.table
    result = [0] * k ** m
    for idx in range(k ** m):
        inner_idx = 0
        for t in tables:
            inner_idx = inner_idx * k + t[idx]
        result[idx] = outer_table[inner_idx]
    return Operation(outer.domain, m, tuple(result))


def minor(op: Operation, var_map: Sequence[int], target_arity: int | None = None) -> Operation:
    """Identification minor: result(y1..ym) = op(y_{var_map[0]}, ..., y_{var_map[n-1]}).

    var_map is 1-based with values in 1..m.
    """
    if len(var_map) != op.arity:
        raise ValueError(f"var_map has {len(var_map)} entries, expected {op.arity}")
    m = max(var_map) if target_arity is None else target_arity
    for v in var_map:
        if not 1 <= v <= m:
            raise ValueError(f"var_map value {v} out of range 1..{m}")
    k = op.domain.k
    table = []
    for args in product(op.domain.elements, repeat=m):
        table.append(op.table[args_to_index([args[v - 1] for v in var_map], k)])
    return Operation(op.domain, m, tuple(table))


def graph_of(op: Operation) -> Relation:
    """The (n+1)-ary relation {(x, op(x))}."""
    k = op.domain.k
    rows = tuple(args + (v,)
                 for args, v in zip(product(op.domain.elements, repeat=op.arity), op.table))
    return Relation(op.domain, op.arity + 1, rows)


def image_of(op: Operation) -> Relation:
    return Relation(op.domain, 1, tuple((v,) for v in set(op.table)))


def fix_of(op: Operation) -> Relation:
    k = op.domain.k
    fixed = [(z,) for z in op.domain.elements
             if op.table[args_to_index((z,) * op.arity, k)] == z]
    return Relation(op.domain, 1, tuple(fixed))


class KernelView:
    """Membership-only view of ker(op) when materialising it would exceed the cap.

    Supports `pair in view` where pair is a 2n-tuple; the two halves are
    argument tuples compared through op.
    """

    def __init__(self, op: Operation):
        self.op = op
        self.domain = op.domain
        self.arity = 2 * op.arity

    def __contains__(self, pair) -> bool:
        pair = tuple(pair)
        if len(pair) != self.arity:
            return False
        n = self.op.arity
        return evaluate(self.op, pair[:n]) == evaluate(self.op, pair[n:])


def kernel_of(op: Operation, entry_cap: int = 10_000_000) -> Relation | KernelView:
    """ker(op) as a 2n-ary relation of pairs of argument tuples with equal value.

    Materialised only when the total entry count (tuples times 2n) fits the
    cap; otherwise a KernelView handle supporting membership tests is returned.
    """
    n = op.arity
    classes: dict[int, list[int]] = {}
    for idx, v in enumerate(op.table):
        classes.setdefault(v, []).append(idx)
    pair_count = sum(len(c) ** 2 for c in classes.values())
    if pair_count * 2 * n > entry_cap:
        return KernelView(op)
    k = op.domain.k
    rows = []
    for members in classes.values():
        arg_tuples = [index_to_args(i, k, n) for i in members]
        for a in arg_tuples:
            for b in arg_tuples:
                rows.append(a + b)
    return Relation(op.domain, 2 * n, tuple(rows))
