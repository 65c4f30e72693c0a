import pytest

from cloneops import (Domain, FormatError, emit_operations, emit_relations,
                      full_relation, graph_of, make_projection,
                      parse_operations, parse_relations, parse_tuple_lists,
                      relation, snow_t)


def test_operation_round_trip(t3):
    text = emit_operations([("T", t3), ("e1", make_projection(Domain(3), 2, 1))])
    parsed = parse_operations(text)
    assert parsed == [("T", t3), ("e1", make_projection(Domain(3), 2, 1))]


def test_count_comment_is_skipped(t3):
    text = emit_operations([("T", t3)], count_comment=True)
    assert text.startswith("# count 1\n")
    assert parse_operations(text) == [("T", t3)]


def test_relation_round_trip(d3, t3):
    rels = [("g", graph_of(t3)), ("full", full_relation(d3, 2))]
    assert parse_relations(emit_relations(rels)) == rels


def test_tuple_lists_preserve_order(d3):
    text = "rel gamma\ndomain 3\narity 3\ntuples\n2 1 1\n1 2 1\nend\n"
    [(name, dom, rows)] = parse_tuple_lists(text)
    assert name == "gamma" and dom == d3
    assert rows == [(2, 1, 1), (1, 2, 1)]


def test_out_of_range_value_names_line_and_column():
    text = "op bad\ndomain 3\narity 1\ntable 0 3 1\n"
    with pytest.raises(FormatError) as err:
        parse_operations(text)
    assert err.value.line == 4
    assert err.value.col == 9
    assert "out of range" in str(err.value)


def test_relation_out_of_range():
    text = "rel bad\ndomain 2\narity 2\ntuples\n0 2\nend\n"
    with pytest.raises(FormatError) as err:
        parse_relations(text)
    assert err.value.line == 5
    assert err.value.col == 3


def test_truncated_table():
    with pytest.raises(FormatError) as err:
        parse_operations("op t\ndomain 2\narity 1\ntable 0\n")
    assert "end of input" in str(err.value)


def test_missing_keyword():
    with pytest.raises(FormatError) as err:
        parse_operations("op t\nsize 2\n")
    assert "expected 'domain'" in str(err.value)
    assert err.value.line == 2


def test_unterminated_relation():
    with pytest.raises(FormatError):
        parse_relations("rel r\ndomain 2\narity 1\ntuples\n0\n")


def test_multi_block_file(d3):
    r1 = relation(d3, 1, [(0,), (2,)])
    r2 = relation(d3, 2, [(1, 1)])
    text = emit_relations([("a", r1), ("b", r2)])
    assert parse_relations(text) == [("a", r1), ("b", r2)]


def test_empty_relation_keeps_declared_arity(d3):
    empty = relation(d3, 4, [])
    [(name, parsed)] = parse_relations(emit_relations([("none", empty)]))
    assert parsed.arity == 4 and parsed.tuples == ()
