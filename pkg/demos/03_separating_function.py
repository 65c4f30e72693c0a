"""The separating function and its five-atom definition.

For every k >= 3 the clone generated by the (k-1)^2-ary operation T misses
the (k-1)-ary function f (valued 1 exactly on (1..k-1) and its reversal),
yet the graph of f is definable from the graph of T by a primitive positive
formula with five atoms.  This script builds both objects, shows f is not a
composition of T with itself, and checks the formula.
"""
from cloneops import (Domain, OperationSet, clone_fragment, emit_text,
                      eval_formula, fragment_contains, graph_of, snow_f,
                      snow_pp_formula, snow_t, verify_separation)

for k in (3, 4):
    dom = Domain(k)
    n = k - 1
    t, f = snow_t(k), snow_f(k)
    print(f"k={k}: T is {t.arity}-ary, f is {f.arity}-ary")

    # The n-ary fragment of the clone generated by T contains only
    # projections, the constant zero and single-point indicators, so the
    # two-point function f cannot be a term of T.
    fragment = clone_fragment(OperationSet.from_operations(dom, [t]), n)
    print(f"  {n}-ary fragment of the generated clone: {fragment.count(n)} members")
    print(f"  f in fragment: {fragment_contains(fragment, f)}")

    # The five-atom formula over graph(T) defines graph(f) exactly.
    phi = snow_pp_formula(k)
    defined = eval_formula(phi, {"T": graph_of(t)})
    print(f"  formula atoms: {len(phi.atoms)}, existential variables: "
          f"{len(phi.exist_vars)}, defines graph(f): {defined == graph_of(f)}")

print("\nThe k=3 formula in text form:")
print(emit_text(snow_pp_formula(3)))

print("Verification report for k=3 (full evaluation):")
print(verify_separation(3, "full").render())

print("Verification report for k=5 (witnesses + sampling, smaller sample):")
print(verify_separation(5, "witness", samples=5000, seed=0).render())
