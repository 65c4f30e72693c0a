"""Finite operations, their derived relations, and commutation.

Walks through the core vocabulary: building value tables, composing them,
taking identification minors, and reading off the graph, image, fixed points
and kernel.  Ends with the commutation predicate that everything else in the
package is built on.
"""
from cloneops import (Domain, commutes, compose, evaluate, fix_of, graph_of,
                      image_of, kernel_of, make_constant, make_projection,
                      minor, preserves, snow_t, sparse_op)

dom = Domain(3)

# Projections and constants are the building blocks of every clone.
e1 = make_projection(dom, 2, 1)
e2 = make_projection(dom, 2, 2)
zero = make_constant(dom, 2, 0)
print("e1 table:", e1.table)
print("e2 table:", e2.table)

# The 4-ary separating operation over {0,1,2}: value 1 on exactly two
# argument squares, 0 everywhere else.
t = snow_t(3)
print("\nT(1,1,2,2) =", evaluate(t, (1, 1, 2, 2)))
print("T(1,2,1,2) =", evaluate(t, (1, 2, 1, 2)))
print("T(0,1,2,2) =", evaluate(t, (0, 1, 2, 2)), "(any 0 argument kills the value)")

# Composing T with projections produces the point indicator functions that
# make up its binary clone fragment.
delta = compose(t, [e1, e1, e2, e2])
print("\nT(x,x,y,y) as a table:", delta.table)
print("same thing as a sparse table:", sparse_op(dom, 2, {(1, 2): 1}).table)

# Identification minors collapse variables; identifying everything gives the
# diagonal restriction.
diag = minor(t, (1, 1, 1, 1))
print("T(x,x,x,x):", diag.table)

# Derived relations: graph, image, fixed points, kernel.
print("\nimage(T):", image_of(t).tuples)
print("fix(T):", fix_of(t).tuples)
ker = kernel_of(t)
print("kernel: the two preimages of 1 sit in one block:",
      (1, 1, 2, 2, 1, 2, 1, 2) in ker)
print("graph(T) has", len(graph_of(t)), "tuples")

# Commutation: g commutes with f when applying g to f-results of the rows of
# any argument matrix equals applying f to g-results of the columns.
ident = make_projection(dom, 1, 1)
u = sparse_op(dom, 1, {(2,): 2})     # sends 2 to 2, everything else to 0
v = sparse_op(dom, 1, {(1,): 1, (2,): 1})
print("\nidentity commutes with T:", commutes(ident, t))
print("u (0,0->0, 2->2) commutes with T:", commutes(u, t))
print("v (0->0, 1,2->1) commutes with T:", commutes(v, t))

# Commuting with f is the same as preserving the graph of f.
print("u preserves graph(T):", preserves(u, graph_of(t)))
