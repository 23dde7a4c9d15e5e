"""Simplicial machinery: simplicial objects in three flavors (free/finite
algebras, presented abelian groups, free modules over a registered ring),
Moore homotopy and cohomotopy, the Dold-Kan correspondence, latching and
matching objects, extended Eilenberg-MacLane objects with path objects,
and bisimplicial diagonal / cosimplicial totalization with their E2 grids.
"""

from __future__ import annotations

from itertools import product

from .abgroups import FGAbelianGroup, FinAb
from .algebras import AlgebraError, AlgebraMap, FiniteAlgebra, FreeAlgebra
from .beck import XModule, semidirect_product
from .presented import (
    Presentation,
    Subquotient,
    homology_of_complex,
    induced_map,
)
from .rings import Ring
from .snf import smith_normal_form  # re-exported operation

__all__ = [
    "smith_normal_form", "SimplicialTheta", "SimplicialAbelian",
    "SimplicialFreeModule", "ChainComplex", "PresentedComplex",
    "dold_kan", "normalize_dk", "moore_homotopy", "cohomotopy",
    "CosimplicialAbelian", "latching", "matching", "eilenberg_maclane",
    "path_object", "BisimplicialAbelian", "diag", "diag_e2_page",
    "total_complex", "CosimplicialSimplicial", "tot", "tot_e2_page",
]


class SimplicialIdentityError(AlgebraError):
    pass


# ---------------------------------------------------------------------------
# containers

class _SimplicialBase:
    """levels[n]; faces[n][i]: level n -> n-1; degens[n][j]: n -> n+1."""

    def __init__(self, levels, faces, degens, truncation):
        self.levels = list(levels)
        self.faces = [list(f) if f else [] for f in faces]
        self.degens = [list(s) if s else [] for s in degens]
        self.truncation = truncation

    def check_identities(self):
        """All five simplicial identity families, mechanically, within the
        truncation; raises SimplicialIdentityError naming the failure."""
        t = self.truncation
        for n in range(2, t + 1):
            for i in range(n + 1):
                for j in range(i + 1, n + 1):
                    lhs = self._compose(self.faces[n - 1][i], self.faces[n][j])
                    rhs = self._compose(self.faces[n - 1][j - 1], self.faces[n][i])
                    if not self._maps_equal(lhs, rhs, n):
                        raise SimplicialIdentityError(
                            f"d_{i} d_{j} != d_{j-1} d_{i} at level {n}"
                        )
        for n in range(0, t):
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = self._compose(self.faces[n + 1][i], self.degens[n][j])
                    if not self._face_degen_expected(lhs, i, j, n):
                        raise SimplicialIdentityError(
                            f"d_{i} s_{j} identity fails at level {n}"
                        )
        for n in range(0, t - 1):
            for i in range(n + 1):
                for j in range(i, n + 1):
                    lhs = self._compose(self.degens[n + 1][i], self.degens[n][j])
                    rhs = self._compose(self.degens[n + 1][j + 1], self.degens[n][i])
                    if not self._maps_equal(lhs, rhs, n):
                        raise SimplicialIdentityError(
                            f"s_{i} s_{j} != s_{j+1} s_{i} at level {n}"
                        )

    # flavor hooks -----------------------------------------------------

    def _compose(self, outer, inner):
        raise NotImplementedError

    def _identity_on(self, n):
        raise NotImplementedError

    def _maps_equal(self, m1, m2, src_level):
        raise NotImplementedError

    def _face_degen_expected(self, lhs, i, j, n):
        if i == j or i == j + 1:
            return self._maps_equal(lhs, self._identity_on(n), n)
        if i < j:
            expected = self._compose(self.degens[n - 1][j - 1], self.faces[n][i])
        else:
            expected = self._compose(self.degens[n - 1][j], self.faces[n][i - 1])
        return self._maps_equal(lhs, expected, n)


class SimplicialTheta(_SimplicialBase):
    """Simplicial algebras over a group-like theory; levels are FreeAlgebra
    (resolutions) or FiniteAlgebra (Eilenberg-MacLane objects), maps are
    AlgebraMaps."""

    def __init__(self, theory, levels, faces, degens, truncation,
                 augmentation=None):
        super().__init__(levels, faces, degens, truncation)
        self.theory = theory
        self.augmentation = augmentation  # AlgebraMap level0 -> X

    def is_free_levelwise(self):
        return all(lv.is_free() for lv in self.levels)

    def _compose(self, outer: AlgebraMap, inner: AlgebraMap):
        src = inner.source
        sort = src.theory.sorts[0]
        if src.is_free():
            images = {
                g: outer.apply_free_element(inner.mapping[sort][g])
                for g in src.generators[sort]
            }
            return AlgebraMap.from_generator_images(src, outer.target, images)
        mapping = {
            s: {x: outer.mapping[s][y] for x, y in m.items()}
            for s, m in inner.mapping.items()
        }
        return AlgebraMap(src, outer.target, mapping, check=False)

    def _identity_on(self, n):
        lv = self.levels[n]
        sort = lv.theory.sorts[0]
        if lv.is_free():
            return AlgebraMap.from_generator_images(
                lv, lv, {g: lv.gen(g) for g in lv.generators[sort]}
            )
        return AlgebraMap(
            lv, lv, {s: {x: x for x in lv.carriers[s]} for s in lv.theory.sorts},
            check=False,
        )

    def _maps_equal(self, m1, m2, n):
        lv = self.levels[n]
        sort = lv.theory.sorts[0]
        if lv.is_free():
            return all(
                m1.mapping[sort][g] == m2.mapping[sort][g]
                for g in lv.generators[sort]
            )
        return m1.mapping == m2.mapping

    def structure_map(self, n):
        """The canonical map level n -> X (augmentation after d_0 chains)."""
        assert self.augmentation is not None
        m = self.augmentation
        chain = m
        for k in range(1, n + 1):
            chain = self._compose(chain, self.faces[k][0])
        return chain


class SimplicialAbelian(_SimplicialBase):
    """Levels are presented Z-modules, maps are integer matrices on
    generators.  Matrices may have zero rows, so compositions track their
    shapes through the level data explicitly."""

    def _mm(self, outer, inner, src_cols):
        rows = len(outer)
        out = [[0] * src_cols for _ in range(rows)]
        for i in range(rows):
            row_o = outer[i]
            for t in range(len(inner)):
                c = row_o[t]
                if c:
                    row_i = inner[t]
                    for j in range(src_cols):
                        out[i][j] += c * row_i[j]
        return out

    def _identity_on(self, n):
        g = self.levels[n].gens
        return [[1 if i == j else 0 for j in range(g)] for i in range(g)]

    def check_identities(self):
        # matrix equality holds modulo the target level's relations
        t = self.truncation
        for n in range(2, t + 1):
            g = self.levels[n].gens
            for i in range(n + 1):
                for j in range(i + 1, n + 1):
                    a = self._mm(self.faces[n - 1][i], self.faces[n][j], g)
                    b = self._mm(self.faces[n - 1][j - 1], self.faces[n][i], g)
                    if not _matrices_equal_mod(a, b, g, self.levels[n - 2]):
                        raise SimplicialIdentityError(
                            f"d_{i} d_{j} != d_{j-1} d_{i} at level {n}"
                        )
        for n in range(0, t):
            g = self.levels[n].gens
            for j in range(n + 1):
                for i in range(n + 2):
                    lhs = self._mm(self.faces[n + 1][i], self.degens[n][j], g)
                    if i == j or i == j + 1:
                        rhs = self._identity_on(n)
                    elif i < j:
                        rhs = self._mm(self.degens[n - 1][j - 1],
                                       self.faces[n][i], g)
                    else:
                        rhs = self._mm(self.degens[n - 1][j],
                                       self.faces[n][i - 1], g)
                    if not _matrices_equal_mod(lhs, rhs, g, self.levels[n]):
                        raise SimplicialIdentityError(
                            f"d_{i} s_{j} identity fails at level {n}"
                        )
        for n in range(0, t - 1):
            g = self.levels[n].gens
            for i in range(n + 1):
                for j in range(i, n + 1):
                    a = self._mm(self.degens[n + 1][i], self.degens[n][j], g)
                    b = self._mm(self.degens[n + 1][j + 1], self.degens[n][i], g)
                    if not _matrices_equal_mod(a, b, g, self.levels[n + 2]):
                        raise SimplicialIdentityError(
                            f"s_{i} s_{j} != s_{j+1} s_{i} at level {n}"
                        )


def _mat_mul_shaped(outer, inner, src_cols):
    rows = len(outer)
    out = [[0] * src_cols for _ in range(rows)]
    for i in range(rows):
        for t in range(len(inner)):
            c = outer[i][t]
            if c:
                for j in range(src_cols):
                    out[i][j] += c * inner[t][j]
    return out


def _matrices_equal_mod(m1, m2, cols, target: Presentation):
    rows = len(m1)
    if len(m2) != rows:
        return False
    for j in range(cols):
        col = [m1[i][j] - m2[i][j] for i in range(rows)]
        if not target.contains_in_relations(col):
            return False
    return True


class SimplicialFreeModule(_SimplicialBase):
    """Levels are free modules over a registered ring; maps are R-matrices."""

    def __init__(self, ring: Ring, ranks, faces, degens, truncation):
        super().__init__([Presentation.free(r) for r in ranks], faces, degens,
                         truncation)
        self.ring = ring
        self.ranks = list(ranks)

    def to_abelian(self) -> SimplicialAbelian:
        levels = []
        faces = [[]]
        degens = []
        from .rings import RModulePresentation, r_matrix_to_z

        for n, rk in enumerate(self.ranks):
            levels.append(RModulePresentation(self.ring, rk, []).z_presentation())
        faces = [
            [r_matrix_to_z(self.ring, m, self.ranks[n - 1], self.ranks[n])
             for m in self.faces[n]] if n else []
            for n in range(len(self.ranks))
        ]
        degens = [
            [r_matrix_to_z(self.ring, m, self.ranks[n + 1], self.ranks[n])
             for m in self.degens[n]]
            if n < len(self.ranks) - 1 else []
            for n in range(len(self.ranks))
        ]
        out = SimplicialAbelian(levels, faces, degens, self.truncation)
        return out

    def _compose(self, outer, inner):
        rows = len(outer)
        mid = len(inner)
        cols = len(inner[0]) if inner else 0
        r = self.ring
        out = [[r.zero() for _ in range(cols)] for _ in range(rows)]
        for i in range(rows):
            for t in range(mid):
                a = outer[i][t]
                if r.is_zero(a):
                    continue
                for j in range(cols):
                    # inner coefficients multiply on the left (left modules)
                    out[i][j] = r.add(out[i][j], r.mul(inner[t][j], a))
        return out

    def _identity_on(self, n):
        rk = self.ranks[n]
        return [[self.ring.one() if i == j else self.ring.zero()
                 for j in range(rk)] for i in range(rk)]

    def _maps_equal(self, m1, m2, n):
        if len(m1) != len(m2):
            return False
        r = self.ring
        return all(
            r.is_zero(r.add(a, r.neg(b)))
            for row1, row2 in zip(m1, m2) for a, b in zip(row1, row2)
        )


# ---------------------------------------------------------------------------
# chain complexes

class ChainComplex:
    """Nonnegatively graded complex of free modules over a ring;
    diffs[n]: degree n -> n-1 as an R-matrix (rows index degree n-1)."""

    def __init__(self, ring: Ring, ranks, diffs):
        self.ring = ring
        self.ranks = list(ranks)
        self.diffs = [None] + [
            [list(r) for r in m] for m in diffs[1:]
        ] if diffs else [None]
        self.validate()

    def validate(self):
        r = self.ring
        for n in range(1, len(self.ranks)):
            m = self.diffs[n]
            assert len(m) == self.ranks[n - 1]
            for row in m:
                assert len(row) == self.ranks[n]
        for n in range(2, len(self.ranks)):
            a, b = self.diffs[n - 1], self.diffs[n]
            rows = self.ranks[n - 2]
            cols = self.ranks[n]
            for i in range(rows):
                for j in range(cols):
                    # left-module maps compose with inner coefficients on
                    # the left (matters over noncommutative group rings)
                    acc = r.zero()
                    for t in range(self.ranks[n - 1]):
                        acc = r.add(acc, r.mul(b[t][j], a[i][t]))
                    assert r.is_zero(acc), "d d != 0"

    def __eq__(self, other):
        return (
            isinstance(other, ChainComplex)
            and self.ring == other.ring
            and self.ranks == other.ranks
            and self.diffs[1:] == other.diffs[1:]
        )


class PresentedComplex:
    """Nonnegatively graded complex of presented Z-modules."""

    def __init__(self, levels, diffs):
        self.levels = list(levels)
        self.diffs = list(diffs)  # diffs[0] = None

    def homology(self, degrees):
        groups = homology_of_complex(self.levels, self.diffs, degrees)
        return {n: groups[n].invariants() for n in degrees}

    def homology_subquotients(self, degrees):
        return homology_of_complex(self.levels, self.diffs, degrees)

    def __eq__(self, other):
        return (
            isinstance(other, PresentedComplex)
            and [(p.gens, p.rels) for p in self.levels]
            == [(p.gens, p.rels) for p in other.levels]
            and self.diffs[1:] == other.diffs[1:]
        )


# ---------------------------------------------------------------------------
# Dold-Kan

def surjections(n, k):
    """Monotone surjections [n] ->> [k] as value tuples, lexicographic."""
    out = []

    def rec(prefix, last):
        if len(prefix) == n + 1:
            if last == k:
                out.append(tuple(prefix))
            return
        remaining = n + 1 - len(prefix)
        for v in (last, last + 1):
            if v > k:
                continue
            if k - v <= remaining - 1:
                rec(prefix + [v], v)

    rec([0], 0)
    return out


def dk_summands(n, top):
    """Summand index [(sigma, k)] of a Dold-Kan level at degree n."""
    out = []
    for k in range(min(n, top) + 1):
        for sigma in surjections(n, k):
            out.append((sigma, k))
    return out


def _delta_coface(i, m):
    """The injection [m] -> [m+1] missing i, as a value tuple."""
    return tuple(v if v < i else v + 1 for v in range(m + 1))


def _sigma_codegen(j, m):
    """The surjection [m+1] -> [m] repeating j."""
    return tuple(v if v <= j else v - 1 for v in range(m + 2))


def _factor_epi_mono(values, k):
    """values: a monotone map [m] -> [k]; factor as delta . tau.

    Returns (tau values tuple, image tuple)."""
    image = sorted(set(values))
    rank = {v: i for i, v in enumerate(image)}
    tau = tuple(rank[v] for v in values)
    return tau, tuple(image)


def _dk_block(sigma, k, alpha, complex_diff_at, top):
    """Target summand and kind ('id' | 'd' | None) of the alpha-component
    out of summand (sigma, k)."""
    composite = tuple(sigma[a] for a in alpha)
    tau, image = _factor_epi_mono(composite, k)
    j = len(image) - 1
    if image == tuple(range(k + 1)):
        return (tau, k), "id"
    if image == tuple(range(k)):
        return (tau, k - 1), "d"
    return None, None


def dold_kan(cx, truncation=None):
    """The Dold-Kan simplicial object of a nonnegative chain complex.

    Accepts a ChainComplex (free modules over a ring) or a
    PresentedComplex, and tags the result with its summand layout so that
    normalize_dk can extract the complex back exactly.
    """
    presented = isinstance(cx, PresentedComplex)
    top = (len(cx.levels) if presented else len(cx.ranks)) - 1
    trunc = truncation if truncation is not None else top + 1

    layouts = [dk_summands(n, top) for n in range(trunc + 1)]

    def summand_size(k):
        if presented:
            return cx.levels[k].gens
        return cx.ranks[k]

    offsets = []
    sizes = []
    for n in range(trunc + 1):
        off = {}
        pos = 0
        for sm in layouts[n]:
            off[sm] = pos
            pos += summand_size(sm[1])
        offsets.append(off)
        sizes.append(pos)

    ring = None if presented else cx.ring

    def zero_mat(rows, cols):
        z = 0 if presented else ring.zero()
        return [[z] * cols for _ in range(rows)]

    def insert_block(mat, r0, c0, kind, k):
        if kind == "id":
            for t in range(summand_size(k)):
                mat[r0 + t][c0 + t] = 1 if presented else ring.one()
        else:
            d = cx.diffs[k]
            for i in range(len(d)):
                for j in range(len(d[0]) if d else 0):
                    mat[r0 + i][c0 + j] = d[i][j]

    def structure_matrix(n, m, alpha):
        mat = zero_mat(sizes[m], sizes[n])
        for sigma, k in layouts[n]:
            target, kind = _dk_block(sigma, k, alpha, None, top)
            if kind is None:
                continue
            tk = target[1]
            r0 = offsets[m][target]
            c0 = offsets[n][(sigma, k)]
            insert_block(mat, r0, c0, kind, k)
        return mat

    faces = [[]]
    degens = []
    for n in range(trunc + 1):
        if n >= 1:
            faces.append([
                structure_matrix(n, n - 1, _delta_coface(i, n - 1))
                for i in range(n + 1)
            ])
        if n < trunc:
            degens.append([
                structure_matrix(n, n + 1, _sigma_codegen(j, n))
                for j in range(n + 1)
            ])
        else:
            degens.append([])

    if presented:
        levels = []
        for n in range(trunc + 1):
            moduli_pres = [cx.levels[k] for _, k in layouts[n]]
            pres = Presentation.free(0)
            acc = None
            for p in moduli_pres:
                acc = p if acc is None else acc.direct_sum(p)
            levels.append(acc if acc is not None else Presentation.free(0))
        out = SimplicialAbelian(levels, faces, degens, trunc)
    else:
        out = SimplicialFreeModule(
            ring, [sizes[n] for n in range(trunc + 1)], faces, degens, trunc
        )
    out.dk_source = cx
    out.dk_layouts = layouts
    out.dk_offsets = offsets
    return out


def normalize_dk(v):
    """Inverse of dold_kan on tagged objects: extract the normalized
    complex, which reproduces the source complex on the nose."""
    if not hasattr(v, "dk_source"):
        raise AlgebraError("normalize_dk needs a Dold-Kan tagged object")
    cx = v.dk_source
    presented = isinstance(cx, PresentedComplex)
    top = (len(cx.levels) if presented else len(cx.ranks)) - 1
    out_levels = []
    out_diffs = [None]
    for k in range(top + 1):
        ident = (tuple(range(k + 1)), k)
        if presented:
            out_levels.append(cx.levels[k])
        else:
            out_levels.append(cx.ranks[k])
        if k >= 1:
            # component of d_k from identity summand at level k to identity
            # summand at level k-1
            mat = v.faces[k][k]
            r0 = v.dk_offsets[k - 1][(tuple(range(k)), k - 1)]
            c0 = v.dk_offsets[k][ident]
            size_r = cx.levels[k - 1].gens if presented else cx.ranks[k - 1]
            size_c = cx.levels[k].gens if presented else cx.ranks[k]
            block = [
                [mat[r0 + i][c0 + j] for j in range(size_c)]
                for i in range(size_r)
            ]
            out_diffs.append(block)
    if presented:
        return PresentedComplex(out_levels, out_diffs)
    return ChainComplex(cx.ring, out_levels, out_diffs)


def eilenberg_maclane_complex(group: FGAbelianGroup, n) -> PresentedComplex:
    """The complex with one group concentrated in degree n."""
    levels = [Presentation.free(0) for _ in range(n)] + [
        Presentation.from_moduli(list(group.torsion) + [0] * group.rank)
    ]
    diffs = [None] + [
        [[] for _ in range(levels[k - 1].gens)] for k in range(1, n + 1)
    ]
    diffs = [None]
    for k in range(1, n + 1):
        rows = levels[k - 1].gens
        cols = levels[k].gens
        diffs.append([[0] * cols for _ in range(rows)])
    return PresentedComplex(levels, diffs)


def k_object(group: FGAbelianGroup, n, truncation=None):
    """K(A, n) as a simplicial abelian object."""
    return dold_kan(eilenberg_maclane_complex(group, n),
                    truncation=truncation or n + 2)


# ---------------------------------------------------------------------------
# Moore homotopy and cohomotopy

def _normalized_quotient(v: SimplicialAbelian):
    """The degenerate-image quotient complex (isomorphic to the Moore
    complex) with the alternating-sum differential."""
    levels = []
    diffs = [None]
    for n in range(v.truncation + 1):
        pres = v.levels[n]
        cols = pres.rel_columns()
        if n >= 1:
            below = v.levels[n - 1]
            for s in v.degens[n - 1]:
                for j in range(below.gens):
                    cols.append([s[i][j] for i in range(pres.gens)])
        mat = [[c[i] for c in cols] for i in range(pres.gens)] if cols else None
        levels.append(Presentation(pres.gens, mat))
        if n >= 1:
            alt = _alternating_sum(v.faces[n])
            diffs.append(alt)
    return PresentedComplex(levels, diffs)


def _alternating_sum(mats):
    rows = len(mats[0])
    cols = len(mats[0][0]) if mats[0] else 0
    out = [[0] * cols for _ in range(rows)]
    for idx, m in enumerate(mats):
        sgn = 1 if idx % 2 == 0 else -1
        for i in range(rows):
            for j in range(cols):
                out[i][j] += sgn * m[i][j]
    return out


def moore_homotopy(v, degrees):
    """Homotopy groups of a simplicial abelian object: homology of the
    normalized (Moore) complex, computed on the degenerate-quotient model.
    """
    if isinstance(v, SimplicialFreeModule):
        v = v.to_abelian()
    top = max(degrees)
    if top + 1 > v.truncation:
        raise AlgebraError(
            f"truncation {v.truncation} too small for degree {top}"
        )
    quo = _normalized_quotient(v)
    return quo.homology(degrees)


def moore_subquotients(v, degrees):
    if isinstance(v, SimplicialFreeModule):
        v = v.to_abelian()
    quo = _normalized_quotient(v)
    return quo.homology_subquotients(degrees), quo


def unnormalized_homotopy(v, degrees):
    """Homology of the raw alternating-sum complex (cross-check route)."""
    if isinstance(v, SimplicialFreeModule):
        v = v.to_abelian()
    diffs = [None] + [
        _alternating_sum(v.faces[n]) for n in range(1, v.truncation + 1)
    ]
    return PresentedComplex(list(v.levels), diffs).homology(degrees)


class CosimplicialAbelian:
    """levels[n]: Presentation; cofaces[n]: list of n+2 matrices
    level n -> level n+1; codegens[n]: list of matrices level n -> n-1."""

    def __init__(self, levels, cofaces, codegens, truncation):
        self.levels = list(levels)
        self.cofaces = [list(c) for c in cofaces]
        self.codegens = [list(c) for c in codegens]
        self.truncation = truncation

    def total_cochain_complex(self) -> PresentedComplex:
        """Unnormalized complex with delta = alternating coface sum,
        reversed so chain machinery applies (degree n stored at index n)."""
        diffs = [None]
        for n in range(1, self.truncation + 1):
            diffs.append(_alternating_sum(self.cofaces[n - 1]))
        return PresentedComplex(list(self.levels), diffs)


def cohomotopy(w: CosimplicialAbelian, degrees):
    """Cohomotopy of a cosimplicial abelian object: cohomology of the
    associated cochain complex."""
    top = max(degrees)
    if top + 1 > w.truncation:
        raise AlgebraError("truncation too small")
    cx = w.total_cochain_complex()
    # cohomology at n: flip the complex
    out = {}
    for n in degrees:
        out[n] = _cohomology_at(cx.levels, cx.diffs, n).invariants()
    return out


def cohomotopy_subquotients(w: CosimplicialAbelian, degrees):
    cx = w.total_cochain_complex()
    return {n: _cohomology_at(cx.levels, cx.diffs, n) for n in degrees}


def _cohomology_at(levels, deltas, n):
    top = len(levels) - 1
    flipped_levels = list(reversed(levels))
    flipped_diffs = [None]
    for k in range(top, 0, -1):
        flipped_diffs.append(deltas[k])
    groups = homology_of_complex(flipped_levels, flipped_diffs, [top - n])
    return groups[top - n]


# ---------------------------------------------------------------------------
# latching and matching objects

def latching(v: SimplicialTheta, n):
    """The n-th latching object of a degreewise-free simplicial algebra:
    free on degeneracy classes s_J(generator), glued by the simplicial
    identities."""
    if n > v.truncation + 1:
        raise AlgebraError("degree beyond truncation")
    theory = v.theory
    if not v.is_free_levelwise():
        raise AlgebraError("latching objects need free levels")
    sort = theory.sorts[0]
    if n == 0:
        return FreeAlgebra(theory, {sort: []})
    # classes of pairs (j, g): s_j applied to generators of level n-1,
    # identified along s_i s_j = s_{j+1} s_i
    items = []
    for j in range(n):
        for g in v.levels[n - 1].generators[sort]:
            items.append((j, g))
    parent = {it: it for it in items}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    if n >= 2:
        for i in range(n - 1):
            for j in range(i, n - 1):
                # s_i s_j = s_{j+1} s_i on level n-2 generators
                for g in v.levels[n - 2].generators[sort]:
                    w1 = v.degens[n - 2][j].mapping[sort][g]
                    w2 = v.degens[n - 2][i].mapping[sort][g]
                    if _is_single_gen(w1) and _is_single_gen(w2):
                        union((i, _the_gen(w1)), ((j + 1), _the_gen(w2)))
    classes = sorted({find(it) for it in items})
    gens = [f"L{j}_{g}" for j, g in classes]
    return FreeAlgebra(theory, {sort: gens})


def _is_single_gen(word):
    return len(word) == 1 and word[0][1] == 1


def _the_gen(word):
    return word[0][0]


def _finab_of_level(pres: Presentation) -> FinAb:
    inv = pres.invariants()
    assert inv.rank == 0, "matching enumeration needs finite levels"
    # the level must already be in diagonal (moduli) form for enumeration
    return FinAb(list(inv.torsion) or [1])


def matching(v, n):
    """The n-th matching object of a simplicial abelian object with finite
    levels: compatible tuples (x_0, ..., x_n) with d_i x_j = d_{j-1} x_i
    for i < j.

    Returns (invariants of M_n, comparison map level_n -> M_n bijective?).
    Levels must be finite; this is the dual finite limit, enumerated.
    """
    if isinstance(v, SimplicialFreeModule):
        v = v.to_abelian()
    if n == 0:
        lv = v.levels[0]
        return FGAbelianGroup(), lv.invariants().is_trivial()
    below = _elements_of_presented(v.levels[n - 1])

    def face(level, i, vec):
        mat = v.faces[level][i]
        mods = _moduli_of(v.levels[level - 1])
        return tuple(
            sum(mat[r][c] * vec[c] for c in range(len(vec))) % (mods[r] or 1)
            if mods[r] else
            sum(mat[r][c] * vec[c] for c in range(len(vec)))
            for r in range(len(mat))
        )

    tuples = []
    for combo in product(below, repeat=n + 1):
        ok = True
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                if face(n - 1, i, combo[j]) != face(n - 1, j - 1, combo[i]):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            tuples.append(combo)
    mods_below = _moduli_of(v.levels[n - 1])

    def add_tuples(a, b):
        return tuple(
            tuple((x + y) % (m or 1) if m else x + y
                  for x, y, m in zip(va, vb, mods_below))
            for va, vb in zip(a, b)
        )

    zero = tuple(
        tuple(0 for _ in range(v.levels[n - 1].gens)) for _ in range(n + 1)
    )
    from .abgroups import invariants_from_addition

    inv = invariants_from_addition(tuples, add_tuples, zero)
    # canonical comparison x -> (d_0 x, ..., d_n x)
    level_els = _elements_of_presented(v.levels[n])
    images = set()
    injective = True
    for x in level_els:
        img = tuple(face(n, i, x) for i in range(n + 1))
        if img in images:
            injective = False
        images.add(img)
    bijective = injective and len(images) == len(tuples) and \
        images == set(tuples)
    return inv, bijective


def _moduli_of(pres: Presentation):
    """Moduli of a presentation whose relations are diagonal (0 = free)."""
    mods = [0] * pres.gens
    for col in pres.rel_columns():
        nz = [i for i, x in enumerate(col) if x]
        assert len(nz) == 1, "level presentation must be diagonal"
        mods[nz[0]] = abs(col[nz[0]])
    return mods


def _elements_of_presented(pres: Presentation):
    mods = _moduli_of(pres)
    assert all(m > 0 for m in mods) or pres.gens == 0, "finite levels required"
    return [tuple(t) for t in product(*(range(m) for m in mods))]


# ---------------------------------------------------------------------------
# extended Eilenberg-MacLane objects

def _power_xmodule(x, k: XModule, copies) -> XModule:
    """K^copies with the diagonal (blockwise) X-action."""
    moduli = list(k.carrier.moduli) * copies
    dim = len(k.carrier.moduli)
    action = {}
    for xe, mat in k.action.items():
        big = [[0] * (dim * copies) for _ in range(dim * copies)]
        for c in range(copies):
            for i in range(dim):
                for j in range(dim):
                    big[c * dim + i][c * dim + j] = mat[i][j]
        action[xe] = big
    return XModule(x, FinAb(moduli), action, name=f"{k.name}^{copies}")


VALIDATE_LEVEL_LIMIT = 80


def eilenberg_maclane(x, k: XModule, n, truncation=None):
    """The extended Eilenberg-MacLane object E^X(K, n): levels X below n,
    K x| X at n, degenerate sums above, faces from the Dold-Kan image of
    the module concentrated in degree n, semidirect with constant X."""
    if n < 1:
        raise AlgebraError("eilenberg_maclane needs n >= 1")
    trunc = truncation if truncation is not None else n + 2
    kernel = k_object(k.invariants(), n, truncation=trunc)
    dim = len(k.carrier.moduli)
    copies = [lv.gens // dim if dim else 0 for lv in kernel.levels]
    sort = x.theory.sorts[0]

    level_mods = [_power_xmodule(x, k, c) for c in copies]
    levels = []
    for i, km in enumerate(level_mods):
        validate = (km.carrier.order() * len(x.carriers[sort])
                    <= VALIDATE_LEVEL_LIMIT)
        levels.append(semidirect_product(km, x, name=f"E{i}", validate=validate))

    def lift_map(i, mat, target_idx):
        src = levels[i]
        tgt = levels[target_idx]
        km_src = level_mods[i]
        km_tgt = level_mods[target_idx]
        mapping = {}
        for ke in km_src.elements():
            img = km_tgt.carrier.reduce(
                tuple(
                    sum(mat[r][c] * ke[c] for c in range(len(ke)))
                    for r in range(len(km_tgt.carrier.moduli))
                )
            ) if km_tgt.carrier.moduli else ()
            for xe in x.carriers[sort]:
                mapping[src.label_of[(ke, xe)]] = tgt.label_of[(img, xe)]
        return AlgebraMap(src, tgt, {sort: mapping}, check=False)

    faces = [[]]
    degens = []
    for i in range(trunc + 1):
        if i >= 1:
            faces.append([
                lift_map(i, kernel.faces[i][a], i - 1) for a in range(i + 1)
            ])
        if i < trunc:
            degens.append([
                lift_map(i, kernel.degens[i][a], i + 1) for a in range(i + 1)
            ])
        else:
            degens.append([])

    aug = AlgebraMap(
        levels[0], x,
        {sort: {lab: levels[0].pair_of[lab][1]
                for lab in levels[0].carriers[sort]}},
        check=False,
    )
    em = SimplicialTheta(x.theory, levels, faces, degens, trunc,
                         augmentation=aug)
    em.kernel_part = kernel
    em.xmodule = k
    em.base = x
    em.degree = n
    em.level_xmodules = level_mods
    return em


def em_pi_checks(em, upto=None):
    """Homotopy prescription of an EM object: kernel Moore homotopy is K
    concentrated in the defining degree; pi_0 of the total object is X."""
    n = em.degree
    top = upto if upto is not None else em.truncation - 1
    kernel_pis = moore_homotopy(em.kernel_part, range(top + 1))
    expected = {
        i: (em.xmodule.invariants() if i == n else FGAbelianGroup())
        for i in range(top + 1)
    }
    pi0_ok = _pi0_is_x(em)
    return {
        "kernel_pis": kernel_pis,
        "kernel_ok": kernel_pis == expected,
        "pi0_ok": pi0_ok,
    }


def _pi0_is_x(em):
    from .algebras import find_isomorphism, quotient_by_normal_closure

    sort = em.base.theory.sorts[0]
    lvl0, lvl1 = em.levels[0], em.levels[1]
    relators = []
    for y in lvl1.carriers[sort]:
        d0 = em.faces[1][0].mapping[sort][y]
        d1 = em.faces[1][1].mapping[sort][y]
        relators.append(lvl0.gmul(d0, lvl0.ginv(d1, sort), sort))
    quo, _ = quotient_by_normal_closure(lvl0, relators)
    return find_isomorphism(quo, em.base) is not None


def path_object(em):
    """The path object of an EM object: the Dold-Kan image of the two-term
    complex [K + K -> K] semidirect X, with its two projections."""
    k = em.xmodule
    x = em.base
    n = em.degree
    trunc = em.truncation
    dim = len(k.carrier.moduli)
    moduli = list(k.carrier.moduli)
    levels = [Presentation.free(0) for _ in range(n - 1)]
    levels.append(Presentation.from_moduli(moduli))
    levels.append(Presentation.from_moduli(moduli * 2))
    diffs = [None]
    for t in range(1, n - 1):
        diffs.append([[0] * levels[t].gens for _ in range(levels[t - 1].gens)])
    if n >= 1:
        if n - 1 >= 1:
            diffs.append([[0] * levels[n - 1].gens
                          for _ in range(levels[n - 2].gens)])
        # boundary K + K -> K is (id, -id)
        bd = [[0] * (2 * dim) for _ in range(dim)]
        for i in range(dim):
            bd[i][i] = 1
            bd[i][dim + i] = -1
        diffs.append(bd)
    path_cx = PresentedComplex(levels, diffs)
    kernel = dold_kan(path_cx, truncation=trunc)
    copies = [lv.gens // dim if dim else 0 for lv in kernel.levels]
    sort = x.theory.sorts[0]
    level_mods = [_power_xmodule(x, k, c) for c in copies]
    lv_algs = []
    for i, km in enumerate(level_mods):
        validate = (km.carrier.order() * len(x.carriers[sort])
                    <= VALIDATE_LEVEL_LIMIT)
        lv_algs.append(
            semidirect_product(km, x, name=f"EI{i}", validate=validate)
        )

    def lift_map(i, mat, target_idx, tgt_algs, tgt_mods):
        src = lv_algs[i]
        tgt = tgt_algs[target_idx]
        km_tgt = tgt_mods[target_idx]
        mapping = {}
        for ke in level_mods[i].elements():
            img = km_tgt.carrier.reduce(
                tuple(
                    sum(mat[r][c] * ke[c] for c in range(len(ke)))
                    for r in range(len(km_tgt.carrier.moduli))
                )
            ) if km_tgt.carrier.moduli else ()
            for xe in x.carriers[sort]:
                mapping[src.label_of[(ke, xe)]] = tgt.label_of[(img, xe)]
        return AlgebraMap(src, tgt, {sort: mapping}, check=False)

    faces = [[]]
    degens = []
    for i in range(trunc + 1):
        if i >= 1:
            faces.append([
                lift_map(i, kernel.faces[i][a], i - 1, lv_algs, level_mods)
                for a in range(i + 1)
            ])
        if i < trunc:
            degens.append([
                lift_map(i, kernel.degens[i][a], i + 1, lv_algs, level_mods)
                for a in range(i + 1)
            ])
        else:
            degens.append([])
    aug = AlgebraMap(
        lv_algs[0], x,
        {sort: {lab: lv_algs[0].pair_of[lab][1]
                for lab in lv_algs[0].carriers[sort]}},
        check=False,
    )
    pe = SimplicialTheta(x.theory, lv_algs, faces, degens, trunc,
                         augmentation=aug)
    pe.kernel_part = kernel
    pe.xmodule = k
    pe.base = x
    pe.degree = n

    # chain projections K + K -> K (first and second copy)
    projections = []
    for which in (0, 1):
        proj_levels = []
        for i in range(trunc + 1):
            src = lv_algs[i]
            tgt = em.levels[i]
            src_mod = level_mods[i]
            tgt_mod = em.level_xmodules[i]
            pmat = _dk_chain_projection(
                kernel, em.kernel_part, i, dim, which
            )
            mapping = {}
            for ke in src_mod.elements():
                img = tgt_mod.carrier.reduce(
                    tuple(
                        sum(pmat[r][c] * ke[c] for c in range(len(ke)))
                        for r in range(len(tgt_mod.carrier.moduli))
                    )
                ) if tgt_mod.carrier.moduli else ()
                for xe in x.carriers[sort]:
                    mapping[src.label_of[(ke, xe)]] = tgt.label_of[(img, xe)]
            proj_levels.append(
                AlgebraMap(src, tgt, {sort: mapping}, check=False)
            )
        projections.append(proj_levels)
    pe.projections = projections
    return pe


def _dk_chain_projection(src_dk, tgt_dk, level, dim, which):
    """Matrix of the Dold-Kan image of the chain projection (pick one K
    copy at the top level, zero below) at a given simplicial level."""
    src_layout = src_dk.dk_layouts[level]
    tgt_layout = tgt_dk.dk_layouts[level]
    src_size = src_dk.levels[level].gens
    tgt_size = tgt_dk.levels[level].gens
    out = [[0] * src_size for _ in range(tgt_size)]
    src_off = src_dk.dk_offsets[level]
    tgt_off = tgt_dk.dk_offsets[level]
    n_src_top = len(src_dk.dk_source.levels) - 1
    n_tgt_top = len(tgt_dk.dk_source.levels) - 1
    for sigma, kk in src_layout:
        if kk != n_src_top:
            continue  # lower level of the path complex maps to zero
        if (sigma, n_tgt_top) not in tgt_off:
            continue
        r0 = tgt_off[(sigma, n_tgt_top)]
        c0 = src_off[(sigma, kk)]
        for i in range(dim):
            out[r0 + i][c0 + which * dim + i] = 1
    return out


# ---------------------------------------------------------------------------
# bisimplicial objects: diagonal, total complex, E2 grids

class BisimplicialAbelian:
    """levels[p][q]: Presentation; hfaces[p][q][i]: (p,q) -> (p-1,q);
    vfaces[p][q][j]: (p,q) -> (p,q-1); degeneracies likewise."""

    def __init__(self, levels, hfaces, vfaces, hdegens, vdegens, truncation):
        self.levels = levels
        self.hfaces = hfaces
        self.vfaces = vfaces
        self.hdegens = hdegens
        self.vdegens = vdegens
        self.truncation = truncation


def bisimplicial_from_double_complex(columns, hdiffs, truncation):
    """DK in both directions of a first-quadrant double complex.

    columns[s] is a PresentedComplex (the s-th column, graded by t);
    hdiffs[s]: chain map columns[s] -> columns[s-1] given per degree t.
    """
    smax = len(columns) - 1
    for s in range(1, smax + 1):
        for t in range(1, len(columns[s].levels)):
            lhs = _mat_mul_shaped(
                columns[s - 1].diffs[t], hdiffs[s][t],
                columns[s].levels[t].gens,
            )
            rhs = _mat_mul_shaped(
                hdiffs[s][t - 1], columns[s].diffs[t],
                columns[s].levels[t].gens,
            )
            if not _matrices_equal_mod(lhs, rhs, columns[s].levels[t].gens,
                                       columns[s - 1].levels[t - 1]):
                raise AlgebraError(
                    f"horizontal differential at ({s},{t}) is not a chain map"
                )
    verticals = [dold_kan(c, truncation=truncation) for c in columns]
    # horizontal chain maps induce simplicial maps between the DK images
    gamma_h = [None]
    for s in range(1, smax + 1):
        per_level = []
        for q in range(truncation + 1):
            src = verticals[s]
            tgt = verticals[s - 1]
            mat = [[0] * src.levels[q].gens for _ in range(tgt.levels[q].gens)]
            for sigma_k in src.dk_layouts[q]:
                sigma, kk = sigma_k
                if kk >= len(hdiffs[s]):
                    continue
                comp = hdiffs[s][kk]
                if not comp or not comp[0:]:
                    pass
                r0 = tgt.dk_offsets[q].get((sigma, kk))
                if r0 is None:
                    continue
                c0 = src.dk_offsets[q][sigma_k]
                for i in range(len(comp)):
                    for j in range(len(comp[0]) if comp else 0):
                        mat[r0 + i][c0 + j] = comp[i][j]
            per_level.append(mat)
        gamma_h.append(per_level)

    # now DK in the horizontal direction, per vertical level q
    levels = [[None] * (truncation + 1) for _ in range(truncation + 1)]
    hfaces = [[None] * (truncation + 1) for _ in range(truncation + 1)]
    vfaces = [[None] * (truncation + 1) for _ in range(truncation + 1)]
    hdegens = [[None] * (truncation + 1) for _ in range(truncation + 1)]
    vdegens = [[None] * (truncation + 1) for _ in range(truncation + 1)]

    layouts = [dk_summands(p, smax) for p in range(truncation + 1)]
    for q in range(truncation + 1):
        sizes = []
        offsets = []
        for p in range(truncation + 1):
            off = {}
            pos = 0
            for sm in layouts[p]:
                off[sm] = pos
                pos += verticals[sm[1]].levels[q].gens
            offsets.append(off)
            sizes.append(pos)
        for p in range(truncation + 1):
            pres = None
            for sm in layouts[p]:
                piece = verticals[sm[1]].levels[q]
                pres = piece if pres is None else pres.direct_sum(piece)
            levels[p][q] = pres if pres is not None else Presentation.free(0)

            def h_structure(alpha, m):
                mat = [[0] * sizes[p] for _ in range(sizes[m])]
                m_off = offsets[m]
                for sigma, kk in layouts[p]:
                    target, kind = _dk_block(sigma, kk, alpha, None, smax)
                    if kind is None:
                        continue
                    r0 = m_off[target]
                    c0 = offsets[p][(sigma, kk)]
                    if kind == "id":
                        for t in range(verticals[kk].levels[q].gens):
                            mat[r0 + t][c0 + t] = 1
                    else:
                        blk = gamma_h[kk][q]
                        for i in range(len(blk)):
                            for j in range(len(blk[0]) if blk else 0):
                                mat[r0 + i][c0 + j] = blk[i][j]
                return mat

            if p >= 1:
                hfaces[p][q] = [
                    h_structure(_delta_coface(i, p - 1), p - 1)
                    for i in range(p + 1)
                ]
            if p < truncation:
                hdegens[p][q] = [
                    h_structure(_sigma_codegen(j, p), p + 1)
                    for j in range(p + 1)
                ]
            # vertical structure: blockwise from each vertical object
            if q >= 1:
                vfaces[p][q] = [
                    _blockwise_vertical(
                        layouts[p], verticals, q, offsets[p], sizes[p],
                        lambda vert: vert.faces[q][jj],
                        target_level=q - 1,
                    )
                    for jj in range(q + 1)
                ]
            if q < truncation:
                vdegens[p][q] = [
                    _blockwise_vertical(
                        layouts[p], verticals, q, offsets[p], sizes[p],
                        lambda vert: vert.degens[q][jj],
                        target_level=q + 1,
                    )
                    for jj in range(q + 1)
                ]
    return BisimplicialAbelian(levels, hfaces, vfaces, hdegens, vdegens,
                               truncation)


def _blockwise_vertical(layout, verticals, q, offsets, size, pick, target_level):
    target_sizes = {}
    pos = 0
    t_off = {}
    for sm in layout:
        t_off[sm] = pos
        pos += verticals[sm[1]].levels[target_level].gens
    out = [[0] * size for _ in range(pos)]
    for sm in layout:
        vert = verticals[sm[1]]
        blk = pick(vert)
        r0 = t_off[sm]
        c0 = offsets[sm]
        for i in range(len(blk)):
            for j in range(len(blk[0]) if blk else 0):
                out[r0 + i][c0 + j] = blk[i][j]
    return out


def diag(b: BisimplicialAbelian) -> SimplicialAbelian:
    """The diagonal simplicial abelian object."""
    from .snf import mat_mul

    trunc = b.truncation
    levels = [b.levels[n][n] for n in range(trunc + 1)]
    faces = [[]]
    degens = []
    for n in range(trunc + 1):
        if n >= 1:
            fs = []
            for i in range(n + 1):
                fs.append(mat_mul(b.hfaces[n][n - 1][i], b.vfaces[n][n][i]))
            faces.append(fs)
        if n < trunc:
            ds = []
            for j in range(n + 1):
                ds.append(mat_mul(b.hdegens[n][n + 1][j], b.vdegens[n][n][j]))
            degens.append(ds)
        else:
            degens.append([])
    return SimplicialAbelian(levels, faces, degens, trunc)


def total_complex(b: BisimplicialAbelian) -> PresentedComplex:
    """Unnormalized total complex of the bisimplicial double complex."""
    trunc = b.truncation
    levels = []
    offsets = []
    for m in range(trunc + 1):
        pres = None
        off = {}
        pos = 0
        for p in range(m + 1):
            q = m - p
            off[(p, q)] = pos
            piece = b.levels[p][q]
            pos += piece.gens
            pres = piece if pres is None else pres.direct_sum(piece)
        offsets.append(off)
        levels.append(pres if pres is not None else Presentation.free(0))
    diffs = [None]
    for m in range(1, trunc + 1):
        rows = levels[m - 1].gens
        cols = levels[m].gens
        mat = [[0] * cols for _ in range(rows)]
        for p in range(m + 1):
            q = m - p
            c0 = offsets[m][(p, q)]
            if p >= 1:
                h = _alternating_sum(b.hfaces[p][q])
                r0 = offsets[m - 1][(p - 1, q)]
                for i in range(len(h)):
                    for j in range(len(h[0]) if h else 0):
                        mat[r0 + i][c0 + j] += h[i][j]
            if q >= 1:
                v = _alternating_sum(b.vfaces[p][q])
                r0 = offsets[m - 1][(p, q - 1)]
                sgn = 1 if p % 2 == 0 else -1
                for i in range(len(v)):
                    for j in range(len(v[0]) if v else 0):
                        mat[r0 + i][c0 + j] += sgn * v[i][j]
        diffs.append(mat)
    return PresentedComplex(levels, diffs)


def diag_e2_page(b: BisimplicialAbelian, smax, tmax):
    """E2 of the first-quadrant (diagonal) spectral sequence:
    E2[s][t] = pi_s of the horizontal complex of vertical homotopy groups."""
    trunc = b.truncation
    grid = {}
    for t in range(tmax + 1):
        # vertical homotopy at level t for each horizontal degree p
        cols = []
        for p in range(min(smax + 2, trunc) + 1):
            col = SimplicialAbelian(
                [b.levels[p][q] for q in range(trunc + 1)],
                [[]] + [b.vfaces[p][q] for q in range(1, trunc + 1)],
                [b.vdegens[p][q] for q in range(trunc)] + [[]],
                trunc,
            )
            subq, quo = moore_subquotients(col, [t])
            cols.append((subq[t], quo))
        levels = []
        diffs = [None]
        for p, (subq, _) in enumerate(cols):
            levels.append(Presentation.from_moduli(
                [d for d in subq._diag if d != 1]
            ))
            if p >= 1:
                prev = cols[p - 1][0]
                hsum = _alternating_sum(b.hfaces[p][t])
                diffs.append(induced_map(hsum, subq, prev))
        h = homology_of_complex(levels, diffs, range(min(smax, len(cols) - 2) + 1))
        for s in h:
            grid[(s, t)] = h[s].invariants()
    return grid


class CosimplicialSimplicial:
    """levels[s][t]; cofaces[s][t][i]: (s,t) -> (s+1,t) for s < smax;
    codegens[s][t][j]: (s,t) -> (s-1,t) for s >= 1;
    faces[s][t][j]: (s,t) -> (s,t-1)."""

    def __init__(self, levels, cofaces, faces, truncation, codegens=None):
        self.levels = levels
        self.cofaces = cofaces
        self.faces = faces
        self.codegens = codegens
        self.truncation = truncation


def _conormalized_lattices(w: CosimplicialSimplicial):
    """Per (s,t): a basis of the conormalized sublattice (joint kernel of
    the codegeneracies, modulo the level's relations)."""
    from .snf import kernel_basis, lattice_basis

    trunc = w.truncation
    out = {}
    for s in range(trunc + 1):
        for t in range(trunc + 1):
            g = w.levels[s][t].gens
            if s == 0 or w.codegens is None:
                out[(s, t)] = [
                    [1 if i == j else 0 for i in range(g)] for j in range(g)
                ]
                continue
            mats = w.codegens[s][t]
            below_rels = w.levels[s - 1][t].rel_columns()
            stacked = []
            aug_width = len(below_rels) * len(mats)
            rows_per = w.levels[s - 1][t].gens
            for mi, m in enumerate(mats):
                for r in range(rows_per):
                    row = list(m[r]) + [0] * aug_width
                    for ci, col in enumerate(below_rels):
                        row[g + mi * len(below_rels) + ci] = -col[r]
                    stacked.append(row)
            if not stacked:
                out[(s, t)] = [
                    [1 if i == j else 0 for i in range(g)] for j in range(g)
                ]
                continue
            ker = kernel_basis(stacked, g + aug_width)
            out[(s, t)] = lattice_basis([v[:g] for v in ker], g)
    return out


def tot(w: CosimplicialSimplicial):
    """Totalization of the conormalized (in the cosimplicial direction)
    double complex: a chain complex graded by t - s, stored with offset,
    with differential (alternating face sum) + (-1)^t (coface sum)."""
    from .snf import mat_vec, solve_integer

    trunc = w.truncation
    lattices = _conormalized_lattices(w)
    pieces = {}
    for (s, t), basis in lattices.items():
        g = w.levels[s][t].gens
        rels = []
        for col in w.levels[s][t].rel_columns():
            rels.append(col)
        sq = Subquotient(g, basis, _intersect_relations(basis, rels, g))
        pieces[(s, t)] = sq

    def express_in(sq: Subquotient, vec):
        y = sq.express(vec)
        assert y is not None, "differential leaves the conormalized part"
        return y

    offset = trunc
    levels = []
    offsets = []
    for idx in range(2 * trunc + 1):
        m = idx - offset
        off = {}
        pos = 0
        pres = None
        for s in range(trunc + 1):
            t = m + s
            if t < 0 or t > trunc:
                continue
            sq = pieces[(s, t)]
            k = len(sq.basis)
            off[(s, t)] = pos
            pos += k
            piece = Presentation(k, _cols_matrix(sq.rels_z, k))
            pres = piece if pres is None else pres.direct_sum(piece)
        offsets.append(off)
        levels.append(pres if pres is not None else Presentation.free(0))
    diffs = [None]
    for idx in range(1, 2 * trunc + 1):
        rows = levels[idx - 1].gens
        cols = levels[idx].gens
        mat = [[0] * cols for _ in range(rows)]
        for (s, t), c0 in offsets[idx].items():
            sq = pieces[(s, t)]
            for bi, basis_vec in enumerate(sq.basis):
                if t >= 1 and (s, t - 1) in offsets[idx - 1]:
                    v = _alternating_sum(w.faces[s][t])
                    img = mat_vec(v, basis_vec) if v else []
                    target = pieces[(s, t - 1)]
                    y = express_in(target, img)
                    r0 = offsets[idx - 1][(s, t - 1)]
                    for i, val in enumerate(y):
                        mat[r0 + i][c0 + bi] += val
                if s < trunc and (s + 1, t) in offsets[idx - 1]:
                    d = _alternating_sum(w.cofaces[s][t])
                    img = mat_vec(d, basis_vec) if d else []
                    target = pieces[(s + 1, t)]
                    y = express_in(target, img)
                    sgn = 1 if t % 2 == 0 else -1
                    r0 = offsets[idx - 1][(s + 1, t)]
                    for i, val in enumerate(y):
                        mat[r0 + i][c0 + bi] += sgn * val
        diffs.append(mat)
    cx = PresentedComplex(levels, diffs)
    cx.degree_offset = offset
    return cx


def _cols_matrix(cols, rows):
    if not cols:
        return None
    return [[c[i] for c in cols] for i in range(rows)]


def _intersect_relations(basis, rel_cols, ambient):
    """Generators of (relation lattice) intersected with span(basis)."""
    from .snf import kernel_basis

    if not rel_cols:
        return []
    k = len(basis)
    r = len(rel_cols)
    mat = []
    for i in range(ambient):
        mat.append([basis[j][i] for j in range(k)]
                   + [-rel_cols[j][i] for j in range(r)])
    out = []
    for v in kernel_basis(mat, k + r):
        vec = [0] * ambient
        for j in range(k):
            for i in range(ambient):
                vec[i] += v[j] * basis[j][i]
        out.append(vec)
    return out


def tot_homotopy(w: CosimplicialSimplicial, degrees):
    """pi_{t-s} of the totalization for the requested total degrees."""
    cx = tot(w)
    idx = {m: m + cx.degree_offset for m in degrees}
    safe = [i for i in idx.values() if 0 <= i < len(cx.levels)]
    h = cx.homology(safe)
    return {m: h[i] for m, i in idx.items() if i in h}


def tot_e2_page(w: CosimplicialSimplicial, smax, tmax):
    """E2[s][t] = pi^s (cosimplicial direction) of pi_t (simplicial)."""
    trunc = w.truncation
    grid = {}
    for t in range(tmax + 1):
        cols = []
        for s in range(trunc + 1):
            # unnormalized homotopy of the simplicial direction
            diffs = [None] + [
                _alternating_sum(w.faces[s][q]) for q in range(1, trunc + 1)
            ]
            cx = PresentedComplex([w.levels[s][q] for q in range(trunc + 1)],
                                  diffs)
            subq = cx.homology_subquotients([t])[t]
            cols.append(subq)
        levels = [
            Presentation.from_moduli([d for d in sq._diag if d != 1])
            for sq in cols
        ]
        # cochain complex in s: flip to chain shape for the helper
        deltas = [None]
        for s in range(1, trunc + 1):
            dsum = _alternating_sum(w.cofaces[s - 1][t])
            deltas.append(induced_map(dsum, cols[s - 1], cols[s]))
        for s in range(min(smax, trunc - 1) + 1):
            sq = _cohomology_at(levels, deltas, s)
            grid[(s, t)] = sq.invariants()
    return grid


# ---------------------------------------------------------------------------
# Hom duals used by the adjointness identity

def hom_cochain_of_simplicial(v: SimplicialAbelian, moduli, truncation=None):
    """Hom(v, G) for free levels: the cosimplicial abelian group with
    C^n = G^{rank v_n} and cofaces dual to the faces."""
    trunc = truncation if truncation is not None else v.truncation
    dim = len(moduli)
    levels = []
    cofaces = []
    for n in range(trunc + 1):
        assert v.levels[n].nrels() == 0, "hom dual needs free levels"
        levels.append(Presentation.from_moduli(moduli * v.levels[n].gens))
    for n in range(trunc):
        duals = []
        for i in range(n + 2):
            f = v.faces[n + 1][i]
            rows = v.levels[n].gens
            cols = v.levels[n + 1].gens
            dual = [[0] * (rows * dim) for _ in range(cols * dim)]
            for a in range(cols):
                for bidx in range(rows):
                    coef = f[bidx][a]
                    if coef:
                        for d in range(dim):
                            dual[a * dim + d][bidx * dim + d] = coef
            duals.append(dual)
        cofaces.append(duals)
    codegens = []
    return CosimplicialAbelian(levels, cofaces, codegens, trunc)


def hom_bicomplex_total_cohomology(b: BisimplicialAbelian, moduli, degrees):
    """Cohomology of the total complex of Hom(b, G) (free levels)."""
    trunc = b.truncation
    dim = len(moduli)
    # cochain bicomplex C^{p,q} = G^{rank b_{p,q}} with both deltas
    levels = {}
    for p in range(trunc + 1):
        for q in range(trunc + 1):
            levels[(p, q)] = b.levels[p][q].gens
    tot_levels = []
    offsets = []
    for m in range(2 * trunc + 1):
        off = {}
        pos = 0
        pres = None
        for p in range(min(m, trunc) + 1):
            q = m - p
            if q < 0 or q > trunc:
                continue
            off[(p, q)] = pos
            piece = Presentation.from_moduli(moduli * levels[(p, q)])
            pos += piece.gens
            pres = piece if pres is None else pres.direct_sum(piece)
        offsets.append(off)
        tot_levels.append(pres if pres is not None else Presentation.free(0))

    def dual_of(mat, rows, cols):
        dual = [[0] * (rows * dim) for _ in range(cols * dim)]
        for a in range(cols):
            for bidx in range(rows):
                c = mat[bidx][a]
                if c:
                    for d in range(dim):
                        dual[a * dim + d][bidx * dim + d] = c
        return dual

    deltas = [None]
    for m in range(1, 2 * trunc + 1):
        rows = tot_levels[m - 1].gens
        cols = tot_levels[m].gens
        mat = [[0] * rows for _ in range(cols)]
        # delta: C^{m-1} -> C^m; components from (p,q) with p+q = m-1
        for (p, q), c0 in offsets[m - 1].items():
            if p + 1 <= trunc and (p + 1, q) in offsets[m]:
                h = _alternating_sum(b.hfaces[p + 1][q])
                dual = dual_of(h, len(h), len(h[0]) if h else 0)
                r0 = offsets[m][(p + 1, q)]
                for i in range(len(dual)):
                    for j in range(len(dual[0]) if dual else 0):
                        mat[r0 + i][c0 + j] += dual[i][j]
            if q + 1 <= trunc and (p, q + 1) in offsets[m]:
                v = _alternating_sum(b.vfaces[p][q + 1])
                dual = dual_of(v, len(v), len(v[0]) if v else 0)
                sgn = 1 if p % 2 == 0 else -1
                r0 = offsets[m][(p, q + 1)]
                for i in range(len(dual)):
                    for j in range(len(dual[0]) if dual else 0):
                        mat[r0 + i][c0 + j] += sgn * dual[i][j]
        deltas.append(mat)
    out = {}
    for n in degrees:
        out[n] = _cohomology_at(tot_levels, deltas, n).invariants()
    return out
