import random
from itertools import product

import numpy as np
import pytest

from cloneops import (CapExceeded, Domain, Operation, OperationSet, commutes,
                      enumerate_centraliser, enumerate_polymorphisms,
                      family_op, full_relation, graph_of, make_projection,
                      preserves, relation, sparse_op)
from cloneops.commutation import commute_mask, _ternary_pattern_mask


def unary(d, *values):
    return Operation(d, 1, tuple(values))


def expected_binary_catalog(d3):
    """The projections, the z family and the bordered family: 65 operations."""
    ops = [make_projection(d3, 2, 1), make_projection(d3, 2, 2)]
    ops += [family_op("z", (a,), d3) for a in range(3)]
    for c in (1, 2):
        for a in (0, c):
            for edges in product((0, c), repeat=4):
                if edges == (0, 0, 0, 0):
                    continue
                ops.append(family_op("fam", (a, edges), d3))
    return OperationSet.from_operations(d3, ops)


def test_commutes_examples(d3, t3):
    assert commutes(make_projection(d3, 1, 1), t3)
    assert commutes(unary(d3, 0, 0, 2), t3)
    assert not commutes(unary(d3, 0, 1, 1), t3)


def test_commutes_domain_mismatch(t3):
    with pytest.raises(ValueError):
        commutes(make_projection(Domain(2), 1, 1), t3)


def test_preserves_examples(d3):
    rng = random.Random(0)
    op = Operation(d3, 2, tuple(rng.randrange(3) for _ in range(9)))
    assert preserves(op, full_relation(d3, 2))
    assert preserves(unary(d3, 0, 0, 2), relation(d3, 1, [(0,), (2,)]))
    assert not preserves(unary(d3, 1, 1, 1), relation(d3, 1, [(0,), (2,)]))


def test_family_tables(d3):
    assert family_op("u", (2, 1), d3).table == (0, 0, 1)
    assert family_op("z", (0,), d3).table == (0,) * 9
    fam = family_op("fam", (0, (2, 2, 2, 2)), d3)
    assert fam.table == (0, 0, 2, 0, 0, 2, 2, 2, 0)
    assert family_op("delta", ((1, 2),), d3).table == (0, 0, 0, 0, 0, 1, 0, 0, 0)


def test_family_validation(d3):
    with pytest.raises(ValueError):
        family_op("u", (1, 0), d3)          # index must avoid 0 and 1
    with pytest.raises(ValueError):
        family_op("fam", (1, (2, 0, 0, 0)), d3)  # mixed nonzero values
    with pytest.raises(ValueError):
        family_op("fam", (0, (0, 0, 0, 0)), d3)
    with pytest.raises(ValueError):
        family_op("delta", ((1, 1),), d3)
    with pytest.raises(ValueError):
        family_op("zap", (0,), d3)


def test_unary_centraliser_exact(d3, unary_centraliser):
    expected = OperationSet.from_operations(
        d3, [make_projection(d3, 1, 1)] + [unary(d3, 0, 0, a) for a in range(3)])
    assert unary_centraliser == expected
    assert unary_centraliser.count(1) == 4


def test_binary_centraliser_is_the_catalog(d3, binary_centraliser):
    assert binary_centraliser.count(2) == 65
    assert binary_centraliser == expected_binary_catalog(d3)


def test_polymorphisms_of_graph_agree_with_centraliser(t3, binary_centraliser):
    polys = enumerate_polymorphisms([graph_of(t3)], 2)
    assert polys == binary_centraliser


def test_polymorphisms_full_relation():
    d2 = Domain(2)
    assert enumerate_polymorphisms([full_relation(d2, 1)], 2).count(2) == 16


def test_polymorphisms_unary_01(d3):
    rel01 = relation(d3, 1, [(0,), (1,)])
    got = enumerate_polymorphisms([rel01], 1)
    # oracle: brute force over the 27 unary tables
    expected = [t for t in product(range(3), repeat=3) if t[0] <= 1 and t[1] <= 1]
    assert got.count(1) == len(expected) == 12


def test_commutation_is_symmetric(d3, t3):
    rng = random.Random(1)
    ops = [Operation(d3, a, tuple(rng.randrange(3) for _ in range(3 ** a)))
           for a in (1, 1, 2, 2) for _ in range(3)]
    ops.append(t3)
    for f in ops:
        for g in ops:
            if f.arity * g.arity <= 8:
                assert commutes(f, g) == commutes(g, f)


def test_commutes_iff_preserves_graph(d3):
    rng = random.Random(2)
    for _ in range(30):
        fa, ga = rng.choice([1, 2]), rng.choice([1, 2])
        f = Operation(d3, fa, tuple(rng.randrange(3) for _ in range(3 ** fa)))
        g = Operation(d3, ga, tuple(rng.randrange(3) for _ in range(3 ** ga)))
        assert commutes(g, f) == preserves(g, graph_of(f))


def test_projections_commute_with_everything(d3):
    rng = random.Random(3)
    for _ in range(10):
        a = rng.choice([1, 2, 3])
        op = Operation(d3, a, tuple(rng.randrange(3) for _ in range(3 ** a)))
        for n in (1, 2):
            for i in range(1, n + 1):
                assert commutes(make_projection(d3, n, i), op)


def test_centraliser_is_composition_closed(d3, binary_centraliser):
    from cloneops import compose
    rng = random.Random(4)
    members = list(binary_centraliser.members(2))
    for _ in range(25):
        g = rng.choice(members)
        hs = [rng.choice(members) for _ in range(2)]
        assert compose(g, hs) in binary_centraliser


def test_implications_of_the_unary_approximation(d3, t3_set):
    c1 = enumerate_centraliser(t3_set, 1)
    slice2 = enumerate_centraliser(c1, 2)
    for g in slice2.members(2):
        for a in range(3):
            if g(1, 2) == 2:
                assert g(0, a) == a
            if g(2, 1) == 2:
                assert g(a, 0) == a
            if g(1, 2) in (0, 1):
                assert g(0, a) == 0
            if g(2, 1) in (0, 1):
                assert g(a, 0) == 0


def test_almost_conservative(d3, t3_set):
    c1 = enumerate_centraliser(t3_set, 1)
    slice2 = enumerate_centraliser(c1, 2)
    zero_unaries = [relation(d3, 1, [(v,) for v in sorted(s)])
                    for s in [{0}, {0, 1}, {0, 2}, {0, 1, 2}]]
    eq_01 = relation(d3, 2, [(0, 0), (0, 1), (1, 0), (1, 1), (2, 2)])
    eq_all = full_relation(d3, 2)
    for g in slice2.members(2):
        for rel in zero_unaries + [eq_01, eq_all]:
            assert preserves(g, rel)
    # the unary slice of the same approximation is almost conservative as well
    for g in enumerate_centraliser(c1, 1).members(1):
        for rel in zero_unaries:
            assert preserves(g, rel)


def test_arity_cap_and_budget(t3_set):
    with pytest.raises(ValueError):
        enumerate_centraliser(t3_set, 4)
    with pytest.raises(CapExceeded):
        enumerate_centraliser(t3_set, 2, budget=100)


def test_commute_mask_matches_scalar(d3, t3):
    rng = np.random.default_rng(5)
    tables = rng.integers(0, 3, size=(40, 9), dtype=np.uint8)
    mask = commute_mask(tables, t3, 2)
    for row, ok in zip(tables, mask):
        g = Operation(d3, 2, tuple(int(v) for v in row))
        assert commutes(g, t3) == bool(ok)


def test_ternary_pattern_matches_sweep(d3, t3):
    rng = np.random.default_rng(6)
    tables = rng.integers(0, 3, size=(120, 27), dtype=np.uint8)
    proj = np.array([[t[i] for t in product(range(3), repeat=3)] for i in range(3)],
                    dtype=np.uint8)
    tables = np.vstack([tables, proj])
    fast = _ternary_pattern_mask(tables, t3)
    slow = commute_mask(tables, t3, 3)
    assert np.array_equal(fast, slow)
    assert fast[-3:].all()  # the projections commute


def test_threads_give_identical_results(t3_set):
    single = enumerate_centraliser(t3_set, 2, threads=1)
    multi = enumerate_centraliser(t3_set, 2, threads=4)
    assert single == multi


def test_operation_set_rejects_mixed_domains(d3, t3):
    with pytest.raises(ValueError):
        OperationSet.from_operations(d3, [t3, make_projection(Domain(2), 1, 1)])
