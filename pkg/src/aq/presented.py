"""Finitely presented Z-modules, subquotients, and homology of complexes
of presented modules, with induced maps (functoriality) throughout.
"""

from __future__ import annotations

from .abgroups import FGAbelianGroup
from .snf import (
    IntegerSolver,
    kernel_basis,
    lattice_basis,
    mat_vec,
    smith_normal_form,
)


class Presentation:
    """The Z-module Z^gens / colspan(rels); rels has `gens` rows."""

    __slots__ = ("gens", "rels", "_solver")

    def __init__(self, gens, rels=None):
        self.gens = int(gens)
        self.rels = [list(r) for r in rels] if rels else [[] for _ in range(gens)]
        self._solver = None
        assert len(self.rels) == self.gens or self.gens == 0

    @classmethod
    def from_moduli(cls, moduli):
        n = len(moduli)
        rels = [[moduli[i] if i == j else 0 for j in range(n)] for i in range(n)]
        rels = [
            [row[j] for j in range(n) if moduli[j] != 0] for row in rels
        ]
        return cls(n, rels)

    @classmethod
    def free(cls, rank):
        return cls(rank)

    def nrels(self):
        return len(self.rels[0]) if self.gens and self.rels and self.rels[0] else 0

    def rel_columns(self):
        return [[self.rels[i][j] for i in range(self.gens)] for j in range(self.nrels())]

    def invariants(self) -> FGAbelianGroup:
        if self.gens == 0:
            return FGAbelianGroup()
        return FGAbelianGroup.from_presentation_matrix(self.rels, self.gens)

    def _rel_solver(self):
        solver = getattr(self, "_solver", None)
        if solver is None:
            solver = IntegerSolver(self.rels)
            self._solver = solver
        return solver

    def contains_in_relations(self, vec):
        """Is `vec` in the relation lattice (i.e. zero in the module)?"""
        if self.nrels() == 0:
            return all(x == 0 for x in vec)
        return self._rel_solver().solve(vec) is not None

    def direct_sum(self, other):
        gens = self.gens + other.gens
        cols = []
        for c in self.rel_columns():
            cols.append(c + [0] * other.gens)
        for c in other.rel_columns():
            cols.append([0] * self.gens + c)
        return Presentation(gens, _cols_to_matrix(cols, gens))

    def __repr__(self):
        return f"Presentation(gens={self.gens}, rels={self.nrels()})"


def _cols_to_matrix(cols, rows):
    if not cols:
        return [[] for _ in range(rows)]
    return [[c[i] for c in cols] for i in range(rows)]


class Subquotient:
    """A subquotient L/B of Z^ambient: L spanned by `basis` columns,
    B by `rel_vectors` (ambient vectors that must lie in L).

    Provides canonical coordinates so that induced maps of chain maps can
    be written as integer matrices between canonical generator systems.
    """

    def __init__(self, ambient, basis_cols, rel_vectors):
        self.ambient = ambient
        self.basis = basis_cols  # list of length-`ambient` columns
        k = len(basis_cols)
        self._zmat = _cols_to_matrix(basis_cols, ambient)
        rel_in_z = []
        for v in rel_vectors:
            y = self.express(v)
            assert y is not None, "relation vector not inside the subgroup lattice"
            rel_in_z.append(y)
        self.rels_z = rel_in_z
        relmat = _cols_to_matrix(rel_in_z, k)
        if k:
            u, d, _ = smith_normal_form(relmat) if rel_in_z else (None, None, None)
            if rel_in_z:
                self._u = u
                self._diag = [
                    d[t][t] if t < min(len(d), len(d[0])) else 0 for t in range(k)
                ]
            else:
                self._u = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
                self._diag = [0] * k
        else:
            self._u = []
            self._diag = []

    def express(self, vec):
        """Coordinates of an ambient vector in the subgroup basis, or None."""
        if not self.basis:
            return [] if all(x == 0 for x in vec) else None
        solver = getattr(self, "_zsolver", None)
        if solver is None:
            solver = IntegerSolver(self._zmat)
            self._zsolver = solver
        return solver.solve(vec)

    def invariants(self) -> FGAbelianGroup:
        tor = [d for d in self._diag if d > 1]
        rank = sum(1 for d in self._diag if d == 0)
        return FGAbelianGroup.from_divisors(tor + [0] * rank)

    def canon(self, vec):
        """Canonical reduced coordinates of an ambient vector (must lie in L)."""
        y = self.express(vec)
        assert y is not None, "vector not in cycle lattice"
        return self.canon_z(y)

    def canon_z(self, y):
        w = mat_vec(self._u, y) if self._u else []
        out = []
        for x, d in zip(w, self._diag):
            if d == 1:
                continue
            out.append(x % d if d else x)
        return tuple(out)

    def canonical_generators(self):
        """Ambient vectors generating the subquotient, matching canon coords."""
        from .snf import invert_unimodular

        if not self.basis:
            return []
        uinv = invert_unimodular(self._u)
        gens = []
        for j, d in enumerate(self._diag):
            if d == 1:
                continue
            y = [uinv[i][j] for i in range(len(self._diag))]
            gens.append(mat_vec(self._zmat, y))
        return gens

    def is_zero_class(self, vec):
        return all(x == 0 for x in self.canon(vec))


def homology_of_complex(levels, diffs, degrees):
    """Homology of a presented-module chain complex.

    levels[n] is a Presentation; diffs[n] (for n >= 1) maps level n to
    level n-1, given on generators (shape g_{n-1} x g_n).  Returns
    {n: Subquotient} for n in `degrees`; each Subquotient lives in the
    ambient generators of level n.
    """
    out = {}
    for n in degrees:
        assert n + 1 < len(levels) or n + 1 == len(levels), "complex too short"
        out[n] = _homology_at(levels, diffs, n)
    return out


def _homology_at(levels, diffs, n):
    pn = levels[n]
    g = pn.gens
    if n == 0 or n >= len(diffs) or diffs[n] is None:
        cycles = [[1 if i == j else 0 for i in range(g)] for j in range(g)]
    else:
        d = diffs[n]
        below = levels[n - 1]
        cols = below.rel_columns()
        stacked = [d[i] + [c[i] for c in cols] for i in range(below.gens)]
        ker = kernel_basis(stacked, g + len(cols))
        projected = [v[:g] for v in ker]
        cycles = lattice_basis(projected, g)
    rel_vectors = pn.rel_columns()
    if n + 1 < len(levels) and n + 1 < len(diffs) and diffs[n + 1] is not None:
        dup = diffs[n + 1]
        for j in range(levels[n + 1].gens):
            rel_vectors.append([dup[i][j] for i in range(g)])
    return Subquotient(g, cycles, rel_vectors)


def induced_map(f, source: Subquotient, target: Subquotient):
    """Matrix of the map induced on homology by a chain map component `f`
    (shape target_ambient x source_ambient), in canonical coordinates.
    """
    cols = []
    for z in source.basis:
        v = mat_vec(f, z)
        cols.append(list(target.canon(v)))
    # columns indexed by source basis; compose with source canonical gens
    src_gens = source.canonical_generators()
    out = []
    for gvec in src_gens:
        v = mat_vec(f, gvec)
        out.append(list(target.canon(v)))
    # rows = target canonical coords
    if not out:
        return []
    return [list(col) for col in zip(*out)]


def complex_is_exact_composite(levels, diffs):
    """Check d_{n} after d_{n+1} lands in the relation lattice, all n."""
    from .snf import mat_mul

    for n in range(1, len(diffs) - 1):
        if diffs[n] is None or diffs[n + 1] is None:
            continue
        comp = mat_mul(diffs[n], diffs[n + 1])
        below = levels[n - 1]
        for j in range(len(comp[0]) if comp else 0):
            col = [comp[i][j] for i in range(len(comp))]
            if not below.contains_in_relations(col):
                return False
    return True
