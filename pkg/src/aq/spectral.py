"""E2 pages of the universal-coefficient, Tor, and reverse-Adams spectral
sequences in the settings where the graded homotopy category reduces to
graded modules, with collapse and convergence cross-checks against the
directly computed (co)homology.
"""

from __future__ import annotations

import random

from .abgroups import FGAbelianGroup
from .presented import Presentation
from .rings import (
    CoefficientModule,
    RModulePresentation,
    Ring,
    ext_groups,
    tor_groups,
)


class GradedModule:
    """A finitely supported nonnegatively graded module over a registered
    ring, each degree a finitely presented module."""

    def __init__(self, ring: Ring, components):
        self.ring = ring
        self.components = {
            int(d): m for d, m in components.items()
            if isinstance(m, RModulePresentation)
        }
        for d, m in self.components.items():
            assert d >= 0 and m.ring == ring

    @classmethod
    def concentrated(cls, module: RModulePresentation, degree=0):
        return cls(module.ring, {degree: module})

    def degrees(self):
        return sorted(self.components)

    def __getitem__(self, d):
        return self.components.get(d)


class SpectralPage:
    """An E2 grid with its (forced) d2 data and a convergence report."""

    def __init__(self, grid, quadrant, d2=None, convergence=None,
                 description=""):
        self.grid = dict(grid)
        self.quadrant = quadrant
        self.d2 = dict(d2 or {})
        self.convergence = convergence or []
        self.description = description
        self._validate()

    def _validate(self):
        for (s, t) in self.grid:
            assert s >= 0 and t >= 0, "grid must live in the stated quadrant"
        # d2 followed by d2 must vanish (trivially so for forced-zero data)
        for (s, t), mat in self.d2.items():
            nxt = (s + 2, t + 1) if self.quadrant == "first" else (s + 2, t + 1)
            if nxt in self.d2:
                comp = _matmul(self.d2[nxt], mat)
                assert all(all(x == 0 for x in row) for row in comp), \
                    "d2 . d2 != 0"

    def entry(self, s, t) -> FGAbelianGroup:
        return self.grid.get((s, t), FGAbelianGroup())

    def consistent(self):
        return all(row["consistent"] for row in self.convergence)

    def to_json(self):
        return {
            "quadrant": self.quadrant,
            "description": self.description,
            "grid": [
                {"s": s, "t": t, "group": self.grid[(s, t)].to_json()}
                for (s, t) in sorted(self.grid)
            ],
            "convergence": self.convergence,
        }


def _matmul(a, b):
    rows, mid = len(a), len(b)
    cols = len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        for t in range(mid):
            if a[i][t]:
                for j in range(cols):
                    out[i][j] += a[i][t] * b[t][j]
    return out


def _order_or_rank_consistent(groups, target: FGAbelianGroup):
    """|E_infty total| = |target| for finite groups, rank equality with
    matching torsion order otherwise."""
    total_rank = sum(g.rank for g in groups)
    tor = 1
    for g in groups:
        for t in g.torsion:
            tor *= t
    target_tor = 1
    for t in target.torsion:
        target_tor *= t
    return total_rank == target.rank and tor == target_tor


def uct_e2(h: GradedModule, g: CoefficientModule, smax, tmax,
           cohomology_values=None) -> SpectralPage:
    """E2^{s,t} = Ext^s(H_t, G), converging (over rings of global
    dimension <= 1, where the page is two columns) to H^{t-s}.

    cohomology_values: optional {n: FGAbelianGroup} to check the
    two-column exact sequence against directly computed cohomology.
    """
    ring = h.ring
    grid = {}
    for t in h.degrees():
        exts = ext_groups(h[t], g, smax)
        for s in range(smax + 1):
            if not exts[s].is_trivial():
                grid[(s, t)] = exts[s]
    d2 = {}
    two_column = all(s <= 1 for (s, t) in grid)
    if two_column:
        # d2 lands outside the support, so it is forced to vanish
        for (s, t) in grid:
            d2[(s, t)] = [[0] * max(1, _dim(grid[(s, t)]))
                          for _ in range(1)]
    convergence = []
    if cohomology_values is not None and two_column:
        for n, target in sorted(cohomology_values.items()):
            # cohomological degree n collects Hom(H_n, G) and
            # Ext^1(H_{n-1}, G): the diagonal s + t = n
            contributions = []
            for (s, t) in sorted(grid):
                if s + t == n and t <= tmax:
                    contributions.append(grid[(s, t)])
            ok = _order_or_rank_consistent(contributions, target)
            if ring.kind == "Z":
                # over Z the sequence splits, so full isomorphism holds
                total = FGAbelianGroup()
                for c in contributions:
                    total = total.direct_sum(c)
                ok = ok and total == target
            convergence.append({
                "degree": n,
                "page": [c.to_json() for c in contributions],
                "target": target.to_json(),
                "consistent": ok,
            })
    return SpectralPage(grid, "second", d2, convergence,
                        description="universal coefficients (Ext) page")


def _dim(group: FGAbelianGroup):
    return group.rank + len(group.torsion)


def tor_e2(h: GradedModule, g: CoefficientModule, smax, tmax,
           homology_values=None) -> SpectralPage:
    """E2_{s,t} = Tor_s(H_t, G), the homological (first quadrant) page."""
    ring = h.ring
    grid = {}
    for t in h.degrees():
        tors = tor_groups(h[t], g, smax)
        for s in range(smax + 1):
            if not tors[s].is_trivial():
                grid[(s, t)] = tors[s]
    d2 = {}
    two_column = all(s <= 1 for (s, t) in grid)
    convergence = []
    if homology_values is not None and two_column:
        for n, target in sorted(homology_values.items()):
            contributions = [
                grid[(s, t)] for (s, t) in sorted(grid) if s + t == n
            ]
            ok = _order_or_rank_consistent(contributions, target)
            if ring.kind == "Z":
                total = FGAbelianGroup()
                for c in contributions:
                    total = total.direct_sum(c)
                ok = ok and total == target
            convergence.append({
                "degree": n,
                "page": [c.to_json() for c in contributions],
                "target": target.to_json(),
                "consistent": ok,
            })
    return SpectralPage(grid, "first", d2, convergence,
                        description="homology universal coefficients (Tor) page")


def reverse_adams_e2(pi: GradedModule, g: CoefficientModule, variant,
                     smax, comparison=None) -> SpectralPage:
    """Reverse-Adams pages for abelian settings: the derived functors of
    (abelianization tensor G) or map(-, G) on a graded-module resolution,
    i.e. Tor/Ext of the homotopy module, degreewise.

    For pi concentrated in degree 0 the page is a single row collapsing
    exactly; `comparison` ({degree: group}) is then compared entrywise.
    """
    assert variant in ("homology", "cohomology")
    grid = {}
    for t in pi.degrees():
        if variant == "homology":
            vals = tor_groups(pi[t], g, smax)
        else:
            vals = ext_groups(pi[t], g, smax)
        for s in range(smax + 1):
            if not vals[s].is_trivial():
                grid[(s, t)] = vals[s]
    single_row = all(t == 0 for (_, t) in grid)
    convergence = []
    if comparison is not None:
        for n, target in sorted(comparison.items()):
            # both variants pair the derived degree s and the internal
            # degree t into total degree s + t
            contributions = [
                grid[(s, t)] for (s, t) in sorted(grid) if s + t == n
            ]
            if single_row:
                # collapse: a single contribution that must equal the target
                total = FGAbelianGroup()
                for c in contributions:
                    total = total.direct_sum(c)
                ok = total == target
            else:
                ok = _order_or_rank_consistent(contributions, target)
            convergence.append({
                "degree": n,
                "page": [c.to_json() for c in contributions],
                "target": target.to_json(),
                "consistent": ok,
            })
    quadrant = "first" if variant == "homology" else "second"
    return SpectralPage(grid, quadrant, {}, convergence,
                        description=f"reverse Adams ({variant}) page")


def bicomplex_checks(seed=20240817, trials=50, truncation=3):
    """The complete-setting checks: Eilenberg-Zilber equality of diagonal
    and total homology on random bisimplicial abelian fixtures, plus the
    Tot/diag Hom adjointness identity.  Returns an aggregate report."""
    from .simplicial import (
        PresentedComplex,
        bisimplicial_from_double_complex,
        cohomotopy,
        diag,
        hom_bicomplex_total_cohomology,
        hom_cochain_of_simplicial,
        moore_homotopy,
        total_complex,
    )

    rng = random.Random(seed)
    ez_pass = 0
    adj_pass = 0
    for trial in range(trials):
        if trial % 2 == 0:
            cols, hdiffs = _tensor_double_complex(rng, 2, 2)
        else:
            cols, hdiffs = _zero_vertical_double_complex(rng, 2, 2)
        b = bisimplicial_from_double_complex(cols, hdiffs, truncation)
        d = diag(b)
        pis = moore_homotopy(d, range(truncation))
        hs = total_complex(b).homology(range(truncation))
        if pis == hs:
            ez_pass += 1
        g = [2]
        lhs = hom_bicomplex_total_cohomology(b, g, range(truncation))
        rhs = cohomotopy(hom_cochain_of_simplicial(d, g), range(truncation))
        if lhs == rhs:
            adj_pass += 1
    return {
        "trials": trials,
        "eilenberg_zilber_pass": ez_pass,
        "adjointness_pass": adj_pass,
        "all_pass": ez_pass == trials and adj_pass == trials,
    }


def _tensor_double_complex(rng, smax, tmax):
    """The double complex C (x) D of two random free complexes: both
    directions carry nonzero differentials and commute by construction."""
    from .simplicial import PresentedComplex as PC

    def random_free_complex(length):
        ranks = [rng.randint(1, 2) for _ in range(length + 1)]
        diffs = [None]
        for n in range(1, length + 1):
            if n % 2 == 1:
                diffs.append([[rng.randint(-3, 3) for _ in range(ranks[n])]
                              for _ in range(ranks[n - 1])])
            else:
                diffs.append([[0] * ranks[n] for _ in range(ranks[n - 1])])
        return ranks, diffs

    c_ranks, c_diffs = random_free_complex(smax)
    d_ranks, d_diffs = random_free_complex(tmax)

    def kron(a, rows_a, cols_a, b, rows_b, cols_b):
        out = [[0] * (cols_a * cols_b) for _ in range(rows_a * rows_b)]
        for i in range(rows_a):
            for j in range(cols_a):
                if a[i][j]:
                    for p in range(rows_b):
                        for q in range(cols_b):
                            out[i * rows_b + p][j * cols_b + q] = \
                                a[i][j] * b[p][q]
        return out

    def ident(n):
        return [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    cols = []
    for s in range(smax + 1):
        levels = [Presentation.free(c_ranks[s] * d_ranks[t])
                  for t in range(tmax + 1)]
        diffs = [None]
        for t in range(1, tmax + 1):
            diffs.append(kron(
                ident(c_ranks[s]), c_ranks[s], c_ranks[s],
                d_diffs[t], d_ranks[t - 1], d_ranks[t],
            ))
        cols.append(PC(levels, diffs))
    hdiffs = [None]
    for s in range(1, smax + 1):
        per_degree = []
        for t in range(tmax + 1):
            per_degree.append(kron(
                c_diffs[s], c_ranks[s - 1], c_ranks[s],
                ident(d_ranks[t]), d_ranks[t], d_ranks[t],
            ))
        hdiffs.append(per_degree)
    return cols, hdiffs


def _zero_vertical_double_complex(rng, smax, tmax):
    from .simplicial import PresentedComplex as PC

    cols = []
    for s in range(smax + 1):
        levels = [Presentation.free(rng.randint(0, 2))
                  for _ in range(tmax + 1)]
        diffs = [None]
        for t in range(1, tmax + 1):
            diffs.append([[0] * levels[t].gens
                          for _ in range(levels[t - 1].gens)])
        cols.append(PC(levels, diffs))
    hdiffs = [None]
    for s in range(1, smax + 1):
        per_degree = []
        for t in range(tmax + 1):
            rows = cols[s - 1].levels[t].gens
            ncols = cols[s].levels[t].gens
            if s % 2 == 1:
                per_degree.append([[rng.randint(-2, 2) for _ in range(ncols)]
                                   for _ in range(rows)])
            else:
                per_degree.append([[0] * ncols for _ in range(rows)])
        hdiffs.append(per_degree)
    return cols, hdiffs
