"""Synthesizing a primitive positive definition from a generating system.

A relation invariant under the polymorphisms of Q is definable from Q; the
synthesis iterates all column selections of each relation, names repeated
submatrix rows by shared variables, and keeps one atom per distinct
submatrix.  The formula is correct whenever the given tuples really
generate the target relation, which the validation step checks against an
independently computed closure.
"""
from cloneops import (Domain, OperationSet, RelationEnv, dedup_rows, emit_smt,
                      enumerate_centraliser, eval_formula, graph_of, snow_f,
                      snow_t, subuniverse_closure, synthesize_ppdef,
                      validate_synthesis)

dom = Domain(3)
t, f = snow_t(3), snow_f(3)
env = RelationEnv({"T": graph_of(t)})

# Two tuples generate the whole 9-tuple graph of f under the centraliser of
# T acting coordinatewise: check that first with the closure machinery.
gamma0 = [(1, 2, 1), (2, 1, 1)]
ts = OperationSet.from_operations(dom, [t])
slices = OperationSet.from_operations(
    dom, list(enumerate_centraliser(ts, 1).members())
    + list(enumerate_centraliser(ts, 2).members()))
closure = subuniverse_closure(gamma0, slices)
print("closure of the 2-element generating set == graph(f):",
      closure == graph_of(f))

# Synthesize the definition from the generating system.
gen = dedup_rows(gamma0, dom)
print("matrix rows:", gen.rows, "-> distinct:", gen.m_prime, "alpha:", gen.alpha)
result = synthesize_ppdef(env, gen)
print(result.stats_line())

# Validate against the goal rather than assuming the generation hypothesis.
print("defines graph(f):", validate_synthesis(result, env, graph_of(f)))

# The defined relation can also be compared tuple by tuple.
print("evaluated tuples:", eval_formula(result.formula, env).tuples)

# And the check can be exported for an external solver: the script asserts a
# disagreement, so `unsat` certifies the definition.
script = emit_smt(result.formula, env, graph_of(f))
print("solver script:", script.count("(mem_T"), "atom constraints,",
      len(script.splitlines()), "lines")
