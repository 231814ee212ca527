import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from capstab import profiles
from capstab.errors import NoMatch
from capstab.geometry import curvature_data, flux


def test_cylinder_exact():
    surf = profiles.cylinder(3, 0.8, 2.0, samples=400)
    p = surf.profile
    assert np.all(p.x == 0.8)
    assert np.all(p.alpha == -math.pi / 2)
    assert surf.problem.H == pytest.approx(2.0 / (3 * 0.8))
    res = surf.endpoint_residuals()
    assert all(abs(v) < 1e-12 for d in res.values() for v in d.values())


def test_unduloid_endpoints_and_flux(undu_half, undu_full):
    for surf, ncross in ((undu_half, 1), (undu_full, 2)):
        p = surf.profile
        assert p.alpha[0] == pytest.approx(-math.pi / 2, abs=1e-9)
        assert p.alpha[-1] == pytest.approx(-math.pi / 2, abs=1e-9)
        phi = flux(surf)
        assert np.max(np.abs(phi - phi[0])) <= 1e-7


def test_unduloid_full_period_is_twice_half():
    half = profiles.unduloid_slab(2, 0.6, 0.5, period="half", samples=600)
    full = profiles.unduloid_slab(2, 0.6, 0.5, period="full", samples=600)
    assert full.problem.height == pytest.approx(2 * half.problem.height, rel=1e-7)
    # full period runs neck -> bulge -> neck
    assert full.profile.x[0] == pytest.approx(0.5, abs=1e-8)
    assert full.profile.x[-1] == pytest.approx(0.5, abs=1e-8)
    # the full-period grid straddles the bulge rather than sampling it exactly
    assert half.profile.x.max() == pytest.approx(full.profile.x.max(), abs=1e-4)


def test_unduloid_bulge_radius_from_flux():
    # x^{n-1} - H x^n has the same value at neck and bulge
    n, H, neck = 3, 1.0, 0.4
    surf = profiles.unduloid_slab(n, H, neck, period="half", samples=600)
    bulge = surf.profile.x.max()
    lhs = neck ** (n - 1) - H * neck ** n
    rhs = bulge ** (n - 1) - H * bulge ** n
    assert lhs == pytest.approx(rhs, rel=1e-8)


def test_unduloid_round_trip_H():
    surf = profiles.unduloid_slab(2, 0.6, 0.5, period="half", samples=2000)
    cd = curvature_data(surf)
    n = surf.problem.n
    H_num = (cd.kappa1 + (n - 1) * cd.kappa2)[5:-5] / n
    assert np.max(np.abs(H_num - 0.6)) <= 1e-6


def test_shooting_idempotence():
    a = profiles.unduloid_slab(2, 0.6, 0.5, samples=500)
    b = profiles.unduloid_slab(2, 0.6, 0.5, samples=500)
    assert a.profile.to_csv() == b.profile.to_csv()
    assert a.content_hash() == b.content_hash()


def test_slab_shooting_reproduces_unduloid():
    u = profiles.unduloid_slab(2, 0.6, 0.5, period="half", samples=800)
    s = profiles.solve_slab_capillary(2, 0.6, math.pi / 2, math.pi / 2,
                                      u.problem.height, samples=800)
    assert s.profile.x.min() == pytest.approx(0.5, abs=1e-6)
    assert s.profile.x.max() == pytest.approx(u.profile.x.max(), abs=1e-6)
    res = s.endpoint_residuals()
    assert all(abs(v) < 1e-9 for d in res.values() for v in d.values())


def test_slab_shooting_general_angles():
    s = profiles.solve_slab_capillary(2, 0.8, 1.2, 1.9, 1.0, samples=800)
    res = s.endpoint_residuals()
    assert all(abs(v) < 1e-9 for d in res.values() for v in d.values())
    phi = flux(s)
    assert np.max(np.abs(phi - phi[0])) <= 1e-7


def test_halfspace_annulus_has_no_solution():
    with pytest.raises(NoMatch) as exc:
        profiles.find_halfspace_annulus(2, math.pi / 4, H=1.0,
                                        scan=40, samples=400)
    assert "defect" in str(exc.value).lower()


def test_cap_invalid_theta():
    with pytest.raises(ValueError):
        profiles.spherical_cap(2, 0.0)
    with pytest.raises(ValueError):
        profiles.spherical_cap(2, math.pi)


@settings(max_examples=8, deadline=None)
@given(neck=st.floats(0.2, 0.9), n=st.integers(2, 4))
def test_unduloid_flux_property(neck, n):
    H = (n - 1) / n
    surf = profiles.unduloid_slab(n, H, neck, period="half", samples=500)
    phi = flux(surf)
    # flux drift stays within 10x the integrator tolerance budget
    assert np.max(np.abs(phi - phi[0])) <= 10 * 1e-7
    assert surf.profile.x.min() == pytest.approx(neck, abs=1e-6)
