"""Primitive positive formulas over named finite relations.

A formula is a conjunction of relation atoms over free and existentially
quantified variables; its semantics is the projection of the satisfying set
to the free variables, optionally expanded through a coordinate duplication
map (for defined relations with repeated coordinates).

Evaluation is a backtracking search per free-variable assignment.  Atoms are
checked as soon as all their variables are bound; for functional relations
(graphs) an atom whose argument positions are bound forces the value of its
output variable.  Free variables that occur in no atom range over the whole
domain.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Mapping

from .core import Domain, Relation


@dataclass(frozen=True)
class PPFormula:
    domain: Domain
    free_vars: tuple[str, ...]
    exist_vars: tuple[str, ...]
    atoms: tuple[tuple[str, tuple[str, ...]], ...]
    alpha: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.free_vars:
            raise ValueError("a formula needs at least one free variable")
        declared = list(self.free_vars) + list(self.exist_vars)
        if len(set(declared)) != len(declared):
            raise ValueError("variable names must be unique")
        names = set(declared)
        for rel_name, vars_ in self.atoms:
            for v in vars_:
                if v not in names:
                    raise ValueError(f"atom over '{rel_name}' uses undeclared variable '{v}'")
        if self.alpha is not None:
            for a in self.alpha:
                if not 1 <= a <= len(self.free_vars):
                    raise ValueError(f"duplication map entry {a} out of range")

    @property
    def output_arity(self) -> int:
        return len(self.alpha) if self.alpha is not None else len(self.free_vars)

    @property
    def unconstrained_free(self) -> tuple[str, ...]:
        used = {v for _, vars_ in self.atoms for v in vars_}
        return tuple(v for v in self.free_vars if v not in used)


class RelationEnv(Mapping):
    """Named relations over a common domain; iteration keeps insertion order."""

    def __init__(self, items: Iterable[tuple[str, Relation]] | Mapping[str, Relation]):
        pairs = list(items.items()) if isinstance(items, Mapping) else list(items)
        if not pairs:
            raise ValueError("relation environment must not be empty")
        self._rels: dict[str, Relation] = {}
        domain = pairs[0][1].domain
        for name, rel in pairs:
            if rel.domain != domain:
                raise ValueError("all relations in an environment must share the domain")
            if name in self._rels:
                raise ValueError(f"duplicate relation name '{name}'")
            self._rels[name] = rel
        self.domain = domain

    def __getitem__(self, name: str) -> Relation:
        return self._rels[name]

    def __iter__(self):
        return iter(self._rels)

    def __len__(self):
        return len(self._rels)


def _functional_map(rel: Relation) -> dict | None:
    """prefix -> last value when rel is the graph of a function, else None."""
    seen = {}
    for t in rel.tuples:
        prefix = t[:-1]
        if prefix in seen:
            return None
        seen[prefix] = t[-1]
    return seen


class _Engine:
    def __init__(self, formula: PPFormula, env: RelationEnv):
        if env.domain != formula.domain:
            raise ValueError("formula and environment domains differ")
        self.k = formula.domain.k
        names = list(formula.free_vars) + list(formula.exist_vars)
        self.index = {v: i for i, v in enumerate(names)}
        self.values: list[int | None] = [None] * len(names)
        self.atoms = []
        occurrences: dict[int, set[int]] = {}
        for rel_name, vars_ in formula.atoms:
            if rel_name not in env:
                raise ValueError(f"missing relation '{rel_name}' in the environment")
            rel = env[rel_name]
            if rel.arity != len(vars_):
                raise ValueError(
                    f"atom over '{rel_name}' has {len(vars_)} variables, "
                    f"relation arity is {rel.arity}")
            var_idx = tuple(self.index[v] for v in vars_)
            aid = len(self.atoms)
            distinct = set(var_idx)
            functional = _functional_map(rel)
            # the output variable can only be forced when it appears nowhere else
            forceable = (functional is not None and len(var_idx) > 1
                         and var_idx[-1] not in var_idx[:-1])
            self.atoms.append({
                "members": rel._set, "vars": var_idx, "distinct": distinct,
                "unbound": len(distinct), "functional": functional if forceable else None,
            })
            for v in distinct:
                occurrences.setdefault(v, set()).add(aid)
        self.occ = {v: sorted(a) for v, a in occurrences.items()}
        self.trail: list[int] = []
        ordered = []
        for _, vars_ in formula.atoms:
            for v in vars_:
                i = self.index[v]
                if i not in ordered:
                    ordered.append(i)
        n_free = len(formula.free_vars)
        self.search_vars = [i for i in ordered if i >= n_free]

    def _assign(self, var: int, val: int) -> bool:
        """Assign var (and anything it forces); False on conflict.

        On conflict the decrement loop for the current variable still runs to
        completion, so that _undo's symmetric increments stay consistent.
        """
        queue = [(var, val)]
        while queue:
            v, value = queue.pop()
            if self.values[v] is not None:
                if self.values[v] != value:
                    return False
                continue
            self.values[v] = value
            self.trail.append(v)
            conflict = False
            for aid in self.occ.get(v, ()):
                atom = self.atoms[aid]
                atom["unbound"] -= 1
                if conflict:
                    continue
                if atom["unbound"] == 0:
                    if tuple(self.values[i] for i in atom["vars"]) not in atom["members"]:
                        conflict = True
                elif atom["unbound"] == 1 and atom["functional"] is not None:
                    out_var = atom["vars"][-1]
                    if self.values[out_var] is None:
                        prefix = tuple(self.values[i] for i in atom["vars"][:-1])
                        forced = atom["functional"].get(prefix)
                        if forced is None:
                            conflict = True
                        else:
                            queue.append((out_var, forced))
            if conflict:
                return False
        return True

    def _undo(self, mark: int):
        while len(self.trail) > mark:
            v = self.trail.pop()
            self.values[v] = None
            for aid in self.occ.get(v, ()):
                self.atoms[aid]["unbound"] += 1

    def _search(self, pos: int) -> bool:
        while pos < len(self.search_vars) and self.values[self.search_vars[pos]] is not None:
            pos += 1
        if pos == len(self.search_vars):
            return True
        var = self.search_vars[pos]
        for val in range(self.k):
            mark = len(self.trail)
            if self._assign(var, val) and self._search(pos + 1):
                return True
            self._undo(mark)
        return False

    def satisfiable_with(self, free_assignment: list[tuple[int, int]]) -> bool:
        mark = len(self.trail)
        ok = all(self._assign(v, val) for v, val in free_assignment)
        result = ok and self._search(0)
        self._undo(mark)
        return result


def eval_formula(formula: PPFormula, env: RelationEnv | Mapping[str, Relation]) -> Relation:
    """The relation defined by the formula: projection of the satisfying set."""
    if not isinstance(env, RelationEnv):
        env = RelationEnv(env)
    engine = _Engine(formula, env)
    k = formula.domain.k
    unconstrained = set(formula.unconstrained_free)
    constrained = [v for v in formula.free_vars if v not in unconstrained]
    con_idx = [engine.index[v] for v in constrained]
    sat_partials = []
    for combo in product(range(k), repeat=len(constrained)):
        if engine.satisfiable_with(list(zip(con_idx, combo))):
            sat_partials.append(dict(zip(constrained, combo)))
    free_pos_unconstrained = [i for i, v in enumerate(formula.free_vars) if v in unconstrained]
    rows = []
    for partial in sat_partials:
        for fill in product(range(k), repeat=len(free_pos_unconstrained)):
            row = [partial.get(v, 0) for v in formula.free_vars]
            for pos, val in zip(free_pos_unconstrained, fill):
                row[pos] = val
            if formula.alpha is not None:
                row = [row[a - 1] for a in formula.alpha]
            rows.append(tuple(row))
    return Relation(formula.domain, formula.output_arity, tuple(rows))


def formula_defines(formula: PPFormula, env, goal: Relation) -> bool:
    result = eval_formula(formula, env)
    if result.arity != goal.arity:
        raise ValueError(f"formula output arity {result.arity} differs from "
                         f"goal arity {goal.arity}")
    return result == goal


# ---------------------------------------------------------------------------
# text format

def emit_text(formula: PPFormula) -> str:
    lines = [f"domain {formula.domain.k}",
             "freevars " + " ".join(formula.free_vars),
             "exists " + " ".join(formula.exist_vars)]
    if formula.alpha is not None:
        lines.append("alpha " + " ".join(map(str, formula.alpha)))
    for rel_name, vars_ in formula.atoms:
        lines.append(f"atom {rel_name} " + " ".join(vars_))
    return "\n".join(lines) + "\n"


def parse_formula(text: str) -> PPFormula:
    from .textio import FormatError
    domain = None
    free: list[str] = []
    exist: list[str] = []
    alpha = None
    atoms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head, rest = parts[0], parts[1:]
        if head == "domain":
            if len(rest) != 1 or not rest[0].isdigit():
                raise FormatError(lineno, 1, "expected 'domain <k>'")
            domain = Domain(int(rest[0]))
        elif head == "freevars":
            free = rest
        elif head == "exists":
            exist = rest
        elif head == "alpha":
            try:
                alpha = tuple(int(x) for x in rest)
            except ValueError:
                raise FormatError(lineno, 1, "alpha entries must be integers") from None
        elif head == "atom":
            if len(rest) < 2:
                raise FormatError(lineno, 1, "atom needs a relation name and variables")
            atoms.append((rest[0], tuple(rest[1:])))
        else:
            raise FormatError(lineno, 1, f"unknown directive '{head}'")
    if domain is None:
        raise FormatError(1, 1, "formula is missing a 'domain' line")
    return PPFormula(domain, tuple(free), tuple(exist), tuple(atoms), alpha)


# ---------------------------------------------------------------------------
# SMT-LIB emission

def _smt_symbol(name: str) -> str:
    """Map a relation name to a legal SMT-LIB simple symbol."""
    if name == "=":
        return "eq"
    cleaned = "".join(c if c.isalnum() or c == "_" else f"_{ord(c)}_" for c in name)
    return cleaned if cleaned and not cleaned[0].isdigit() else f"r_{cleaned}"


def _smt_membership(name: str, rel: Relation) -> list[str]:
    """define-fun lines for membership in rel; graphs become value functions."""
    k = rel.domain.k
    name = _smt_symbol(name)
    args = [f"a{i}" for i in range(1, rel.arity + 1)]
    functional = _functional_map(rel) if rel.arity > 1 else None
    lines = []
    if functional is not None and len(functional) == k ** (rel.arity - 1):
        params = " ".join(f"({a} Int)" for a in args[:-1])
        body = "0"
        for prefix in sorted(functional, reverse=True):
            if functional[prefix] == 0:
                continue  # covered by the default branch
            cond = " ".join(f"(= {a} {v})" for a, v in zip(args, prefix))
            body = f"(ite (and {cond}) {functional[prefix]} {body})"
        lines.append(f"(define-fun val_{name} ({params}) Int {body})")
        params_all = " ".join(f"({a} Int)" for a in args)
        call = " ".join(args[:-1])
        lines.append(f"(define-fun mem_{name} ({params_all}) Bool "
                     f"(= (val_{name} {call}) {args[-1]}))")
    else:
        params_all = " ".join(f"({a} Int)" for a in args)
        if rel.tuples:
            disj = " ".join(
                "(and " + " ".join(f"(= {a} {v})" for a, v in zip(args, t)) + ")"
                for t in rel.tuples)
            body = f"(or {disj})" if len(rel.tuples) > 1 else disj
        else:
            body = "false"
        lines.append(f"(define-fun mem_{name} ({params_all}) Bool {body})")
    return lines


def emit_smt(formula: PPFormula, env, goal: Relation) -> str:
    """SMT-LIB 2.0 script asserting a disagreement between formula and goal.

    The solver answering `unsat` certifies that the formula defines the goal
    relation exactly.
    """
    if not isinstance(env, RelationEnv):
        env = RelationEnv(env)
    if goal.arity != formula.output_arity:
        raise ValueError("goal arity differs from the formula output arity")
    k = formula.domain.k
    out = ["; primitive positive definability check: unsat <=> formula defines goal",
           "(set-logic ALL)"]
    used = {rel_name for rel_name, _ in formula.atoms}
    for name in env:
        if name in used:
            out.extend(_smt_membership(name, env[name]))
    out.extend(_smt_membership("goal", goal))
    rng = []
    for v in formula.free_vars:
        out.append(f"(declare-const {v} Int)")
        rng.append(f"(and (<= 0 {v}) (< {v} {k}))")
    out.append("(assert (and " + " ".join(rng) + "))")
    atom_terms = [f"(mem_{_smt_symbol(rel_name)} " + " ".join(vars_) + ")"
                  for rel_name, vars_ in formula.atoms]
    if formula.exist_vars:
        binders = " ".join(f"({y} Int)" for y in formula.exist_vars)
        y_rng = [f"(and (<= 0 {y}) (< {y} {k}))" for y in formula.exist_vars]
        inner = " ".join(y_rng + atom_terms)
        body = f"(exists ({binders}) (and {inner}))"
    elif atom_terms:
        body = "(and " + " ".join(atom_terms) + ")" if len(atom_terms) > 1 else atom_terms[0]
    else:
        body = "true"
    alpha = formula.alpha or tuple(range(1, len(formula.free_vars) + 1))
    goal_args = " ".join(formula.free_vars[a - 1] for a in alpha)
    out.append(f"(assert (xor {body} (mem_goal {goal_args})))")
    out.append("(check-sat)")
    return "\n".join(out) + "\n"
