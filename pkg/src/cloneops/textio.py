"""Plain-text file formats for operations and relations.

Operation blocks (whitespace separated, `#` starts a comment to end of line):

    op <name>
    domain <k>
    arity <n>
    table <k^n integers>

Relation blocks:

    rel <name>
    domain <k>
    arity <m>
    tuples
    <m integers per line>
    end

Out-of-range values are rejected with an error naming line and column.
"""
from __future__ import annotations

from .core import Domain, Operation, Relation


class FormatError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, column {col}: {message}")


class _Tokens:
    """Whitespace tokenizer tracking line/column, with # comments."""

    def __init__(self, text: str):
        self.items: list[tuple[str, int, int]] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            hash_pos = line.find("#")
            if hash_pos >= 0:
                line = line[:hash_pos]
            col = 0
            for part in line.split():
                col = line.index(part, col)
                self.items.append((part, lineno, col + 1))
                col += len(part)
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else None

    def next(self, what: str) -> tuple[str, int, int]:
        item = self.peek()
        if item is None:
            last = self.items[-1] if self.items else ("", 1, 1)
            raise FormatError(last[1], last[2], f"unexpected end of input, expected {what}")
        self.pos += 1
        return item

    def expect(self, keyword: str):
        tok, line, col = self.next(f"'{keyword}'")
        if tok != keyword:
            raise FormatError(line, col, f"expected '{keyword}', found '{tok}'")

    def integer(self, what: str, lo: int | None = None, hi: int | None = None) -> int:
        tok, line, col = self.next(what)
        try:
            value = int(tok)
        except ValueError:
            raise FormatError(line, col, f"expected {what}, found '{tok}'") from None
        if lo is not None and value < lo or hi is not None and value >= hi:
            bound = f">= {lo}" if hi is None else f"in 0..{hi - 1}"
            raise FormatError(line, col, f"{what} {value} out of range ({bound})")
        return value


def _parse_header(toks: _Tokens) -> tuple[str, int, int]:
    name, _, _ = toks.next("a name")
    toks.expect("domain")
    k = toks.integer("domain size", lo=2)
    toks.expect("arity")
    arity = toks.integer("arity", lo=1)
    return name, k, arity


def parse_operations(text: str) -> list[tuple[str, Operation]]:
    toks = _Tokens(text)
    out = []
    while toks.peek() is not None:
        toks.expect("op")
        name, k, arity = _parse_header(toks)
        toks.expect("table")
        table = [toks.integer("table entry", lo=0, hi=k) for _ in range(k ** arity)]
        out.append((name, Operation(Domain(k), arity, tuple(table))))
    return out


def _parse_relation_block(toks: _Tokens) -> tuple[str, Domain, int, list[tuple[int, ...]]]:
    name, k, arity = _parse_header(toks)
    toks.expect("tuples")
    rows = []
    while True:
        item = toks.peek()
        if item is None:
            raise FormatError(1, 1, "relation block not terminated by 'end'")
        if item[0] == "end":
            toks.next("'end'")
            break
        rows.append(tuple(toks.integer("tuple entry", lo=0, hi=k) for _ in range(arity)))
    return name, Domain(k), arity, rows


def parse_relations(text: str) -> list[tuple[str, Relation]]:
    toks = _Tokens(text)
    out = []
    while toks.peek() is not None:
        toks.expect("rel")
        name, dom, arity, rows = _parse_relation_block(toks)
        out.append((name, Relation(dom, arity, tuple(rows))))
    return out


def parse_tuple_lists(text: str) -> list[tuple[str, Domain, list[tuple[int, ...]]]]:
    """Like parse_relations but preserves file order and duplicates of the tuples.

    Used for generating systems, where the order of the tuples fixes the
    variable numbering downstream.
    """
    toks = _Tokens(text)
    out = []
    while toks.peek() is not None:
        toks.expect("rel")
        name, dom, _, rows = _parse_relation_block(toks)
        out.append((name, dom, rows))
    return out


def emit_operations(named_ops, count_comment: bool = False) -> str:
    named_ops = list(named_ops)
    lines = []
    if count_comment:
        lines.append(f"# count {len(named_ops)}")
    for name, op in named_ops:
        lines.append(f"op {name}")
        lines.append(f"domain {op.domain.k}")
        lines.append(f"arity {op.arity}")
        lines.append("table " + " ".join(map(str, op.table)))
    return "\n".join(lines) + "\n"


def emit_relations(named_rels) -> str:
    lines = []
    for name, rel in named_rels:
        lines.append(f"rel {name}")
        lines.append(f"domain {rel.domain.k}")
        lines.append(f"arity {rel.arity}")
        lines.append("tuples")
        for t in rel.tuples:
            lines.append(" ".join(map(str, t)))
        lines.append("end")
    return "\n".join(lines) + "\n"
