"""Clone fragments (n-ary parts of generated clones) and subuniverse closure.

clone_fragment computes the least set of n-ary operations containing the
projections and closed under applying each generator; the ambient set is
finite so the worklist terminates.  For zero-absorbing {0,1}-valued
generators (any argument 0 forces value 0) there is a fast path: only the
variable identifications of the generators can produce new tables, because
a composition involving a non-projection member vanishes outside the single
point where that member is nonzero.  The fast path asserts the shape of its
intermediate results and falls back to the generic worklist if anything
unexpected appears.
"""
from __future__ import annotations

from itertools import product

import numpy as np

from .core import (CapExceeded, Domain, Operation, Relation, args_to_index,
                   make_projection)
from .commutation import OperationSet, _digit_matrix

FRAGMENT_CAP = 1_000_000
IDENTIFICATION_MAP_CAP = 10_000_000


def _zero_absorbing(op: Operation) -> bool:
    k = op.domain.k
    for args, v in zip(product(range(k), repeat=op.arity), op.table):
        if 0 in args and v != 0:
            return False
    return True


def _spike_applicable(generators: list[Operation]) -> bool:
    return all(set(g.table) <= {0, 1} and _zero_absorbing(g) for g in generators)


def _identification_tables(gen: Operation, arity: int) -> np.ndarray | None:
    """Tables of gen composed with projections in every way; one row per map.

    Returns None if some table is neither constant zero nor a single point
    mapped to 1 (the fast-path shape assumption fails).
    """
    k = gen.domain.k
    a = gen.arity
    args = _digit_matrix(k ** arity, arity, k)            # (k^n, n)
    gen_np = np.asarray(gen.table, dtype=np.uint8)
    pow_k = k ** np.arange(a - 1, -1, -1, dtype=np.int64)
    maps = _digit_matrix(arity ** a, a, arity)            # variable per argument slot
    out = np.empty((len(maps), k ** arity), dtype=np.uint8)
    for row, m in enumerate(maps):
        idx = args[:, m] @ pow_k
        out[row] = gen_np[idx]
    sums = out.sum(axis=1, dtype=np.int64)
    maxes = out.max(axis=1)
    if np.any((sums > 1) | (maxes > 1)):
        return None
    return np.unique(out, axis=0)


def _spike_fragment(domain: Domain, generators: list[Operation], arity: int,
                    cap: int) -> OperationSet | None:
    rows = [np.array([make_projection(domain, arity, i + 1).table for i in range(arity)],
                     dtype=np.uint8)]
    for gen in generators:
        if arity ** gen.arity > IDENTIFICATION_MAP_CAP:
            raise CapExceeded(
                f"{arity ** gen.arity} identification maps exceed the work cap")
        tables = _identification_tables(gen, arity)
        if tables is None:
            return None
        rows.append(tables)
    merged = np.unique(np.vstack(rows), axis=0)
    if len(merged) > cap:
        raise CapExceeded(f"fragment size {len(merged)} exceeds the cap of {cap}")
    return OperationSet(domain, {arity: merged})


def clone_fragment(generators: OperationSet, arity: int,
                   cap: int = FRAGMENT_CAP) -> OperationSet:
    """The arity-ary part of the clone generated by the given operations."""
    if arity < 1:
        raise ValueError("fragment arity must be positive")
    domain = generators.domain
    gens = sorted(generators.members(), key=lambda op: (op.arity, op.table))
    if not gens:
        return OperationSet.from_operations(
            domain, [make_projection(domain, arity, i + 1) for i in range(arity)])

    if _spike_applicable(gens):
        result = _spike_fragment(domain, gens, arity, cap)
        if result is not None:
            return result

    k = domain.k
    members: dict[tuple, None] = {}
    for i in range(arity):
        members.setdefault(make_projection(domain, arity, i + 1).table, None)
    frontier = list(members)
    while frontier:
        old = {t for t in members if t not in set(frontier)}
        current = list(members)
        new_tables = []
        for gen in gens:
            gt = gen.table
            for combo in product(current, repeat=gen.arity):
                if all(t in old for t in combo):
                    continue
                table = tuple(
                    gt[args_to_index([t[idx] for t in combo], k)]
                    for idx in range(k ** arity))
                if table not in members:
                    members[table] = None
                    new_tables.append(table)
                    if len(members) > cap:
                        raise CapExceeded(
                            f"fragment size {len(members)} exceeds the cap of {cap}")
        frontier = new_tables
    return OperationSet(domain, {arity: np.array(list(members), dtype=np.uint8)})


def fragment_contains(fragment: OperationSet, op: Operation) -> bool:
    if op.domain != fragment.domain:
        raise ValueError("operation domain differs from the fragment domain")
    return op in fragment


def subuniverse_closure(seed, ops: OperationSet) -> Relation:
    """Least superset of seed closed under componentwise application of ops."""
    seed = [tuple(t) for t in seed]
    if not seed:
        raise ValueError("seed must be nonempty")
    m = len(seed[0])
    if any(len(t) != m for t in seed):
        raise ValueError("seed tuples must all have the same arity")
    domain = ops.domain
    k = domain.k
    for t in seed:
        for v in t:
            if not 0 <= v < k:
                raise ValueError(f"seed entry {v} out of range 0..{k - 1}")
    members = sorted(ops.members(), key=lambda op: (op.arity, op.table))
    closed: set[tuple] = set(seed)
    frontier = list(dict.fromkeys(seed))
    while frontier:
        old = closed - set(frontier)
        current = sorted(closed)
        fresh = []
        for op in members:
            table = op.table
            for combo in product(current, repeat=op.arity):
                if all(t in old for t in combo):
                    continue
                image = tuple(table[args_to_index([t[i] for t in combo], k)]
                              for i in range(m))
                if image not in closed:
                    closed.add(image)
                    fresh.append(image)
        frontier = fresh
    return Relation(domain, m, tuple(closed))
