from aq.abgroups import FGAbelianGroup
from aq.invariants import cohomology, homology_with_coeffs
from aq.resolutions import resolve_module
from aq.rings import CoefficientModule, RModulePresentation, Ring
from aq.spectral import (
    GradedModule,
    bicomplex_checks,
    reverse_adams_e2,
    tor_e2,
    uct_e2,
)


def G(*divs):
    return FGAbelianGroup.from_divisors(divs)


def test_uct_page_z4_z2_over_z():
    ring = Ring("Z")
    y = RModulePresentation.cyclic(ring, 4)
    h = GradedModule.concentrated(y)
    g = CoefficientModule.trivial(ring, [2])
    # direct cohomology for the convergence report
    v = resolve_module(y, length=4)
    hs = cohomology(v, g, [0, 1, 2, 3])
    page = uct_e2(h, g, smax=3, tmax=3,
                  cohomology_values={n: hs[n] for n in range(4)})
    # grid: Hom = Z/2 at (0,0), Ext^1 = Z/2 at (1,0)
    assert page.entry(0, 0) == G(2)
    assert page.entry(1, 0) == G(2)
    assert page.entry(2, 0) == G()
    # total degree t - s: H^0 at 0, H^1 at -1
    assert page.consistent(), page.convergence


def test_uct_zero_input_gives_zero_page():
    ring = Ring("Z")
    h = GradedModule(ring, {})
    g = CoefficientModule.trivial(ring, [2])
    page = uct_e2(h, g, smax=3, tmax=3)
    assert page.grid == {}


def test_uct_periodic_over_z4():
    ring = Ring("Zmod", m=4)
    h = GradedModule.concentrated(RModulePresentation.cyclic(ring, 2))
    g = CoefficientModule.trivial(ring, [2])
    page = uct_e2(h, g, smax=4, tmax=2)
    for s in range(5):
        assert page.entry(s, 0) == G(2)


def test_tor_page_against_homology_with_coeffs():
    ring = Ring("Z")
    y = RModulePresentation.cyclic(ring, 4)
    h = GradedModule.concentrated(y)
    g = CoefficientModule.trivial(ring, [2])
    v = resolve_module(y, length=4)
    hs = homology_with_coeffs(v, g, [0, 1, 2])
    page = tor_e2(h, g, smax=3, tmax=2, homology_values=hs)
    assert page.entry(0, 0) == G(2) and page.entry(1, 0) == G(2)
    assert page.consistent(), page.convergence


def test_tor_page_free_coefficients_single_column():
    ring = Ring("Z")
    h = GradedModule.concentrated(RModulePresentation.cyclic(ring, 4))
    g = CoefficientModule.trivial(ring, [0])
    page = tor_e2(h, g, smax=3, tmax=2)
    assert page.entry(0, 0) == G(4)
    assert all(s == 0 for (s, t) in page.grid)


def test_tor_page_free_h_collapses_to_tensor():
    ring = Ring("Z")
    h = GradedModule.concentrated(RModulePresentation(ring, 1, []))
    g = CoefficientModule.trivial(ring, [6])
    page = tor_e2(h, g, smax=2, tmax=1)
    assert page.entry(0, 0) == G(6)
    assert len(page.grid) == 1


def test_reverse_adams_homology_collapse():
    ring = Ring("Z")
    y = RModulePresentation.cyclic(ring, 4)
    pi = GradedModule.concentrated(y)
    g = CoefficientModule.trivial(ring, [2])
    v = resolve_module(y, length=4)
    hs = homology_with_coeffs(v, g, [0, 1, 2, 3])
    page = reverse_adams_e2(pi, g, "homology", smax=3, comparison=hs)
    assert page.entry(0, 0) == G(2) and page.entry(1, 0) == G(2)
    assert page.consistent(), page.convergence


def test_reverse_adams_cohomology_collapse():
    ring = Ring("Z")
    y = RModulePresentation.cyclic(ring, 4)
    pi = GradedModule.concentrated(y)
    g = CoefficientModule.trivial(ring, [2])
    v = resolve_module(y, length=4)
    hs = cohomology(v, g, [0, 1, 2, 3])
    page = reverse_adams_e2(pi, g, "cohomology", smax=3, comparison=hs)
    assert page.consistent(), page.convergence


def test_reverse_adams_zero_pi():
    ring = Ring("Z")
    pi = GradedModule(ring, {})
    g = CoefficientModule.trivial(ring, [2])
    page = reverse_adams_e2(pi, g, "homology", smax=3)
    assert page.grid == {}


def test_page_serialization_round_trip():
    ring = Ring("Z")
    h = GradedModule.concentrated(RModulePresentation.cyclic(ring, 4))
    g = CoefficientModule.trivial(ring, [2])
    page = uct_e2(h, g, smax=2, tmax=1)
    data = page.to_json()
    assert data["grid"][0]["group"] == {"rank": 0, "torsion": [2]}


def test_bicomplex_checks_pass():
    report = bicomplex_checks(trials=10)
    assert report["all_pass"], report
