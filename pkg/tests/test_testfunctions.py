import math

import numpy as np
import pytest

from capstab import profiles, testfunctions as tf
from capstab.errors import DimensionUnsupported, NoSignChange


@pytest.mark.parametrize("theta", [math.pi / 6, math.pi / 4, math.pi / 3,
                                   math.pi / 2])
def test_phi_vanishes_on_caps(theta):
    # phi = 1 + H u + cos(theta) v is identically zero on spherical caps
    surf = profiles.spherical_cap(2, theta, samples=1000)
    rep = tf.eval_phi(surf)
    assert rep.details["max_abs"] <= 1e-9
    assert abs(rep.mean_value) <= 1e-7
    assert abs(rep.index_value) <= 1e-9


def test_phi_chain_on_cap(cap60):
    rep = tf.check_phi_identities(cap60)
    d = rep.details
    assert d["interior"] <= 1e-6
    assert d["normalderivative"] <= 1e-6
    assert d["sigma"] <= 1e-9
    assert d["eq5"] <= 1e-5
    assert abs(d["I_quadrature"] - d["I_closed_form"]) <= 1e-6


def test_phi_chain_rejects_slab(undu_half):
    # phi = 1 + H u + cos(theta) v is a half-space construction
    with pytest.raises(ValueError):
        tf.check_phi_identities(undu_half)
    with pytest.raises(ValueError):
        tf.eval_phi(undu_half)


def test_v_single_signed_cap(cap60):
    rep = tf.eval_v_family(cap60)
    assert not rep.sign_change
    # I(v,v) = -cot(theta) sigma(nu,nu) |boundary| = -pi here
    assert rep.index_value == pytest.approx(-math.pi, abs=1e-4)
    assert rep.residuals["single_sign_identity"] <= 1e-5


def test_v_family_unduloid(undu_full):
    rep = tf.eval_v_family(undu_full)
    assert rep.sign_change
    assert rep.details["crossings"] >= 2
    # v restricted to each sign is a Jacobi field with Neumann data:
    # both one-sided index values vanish
    assert rep.residuals["I_plus_vanishes"] <= 1e-6
    assert rep.residuals["I_minus_vanishes"] <= 1e-6
    # the balanced combination has exactly zero weighted mean
    assert rep.residuals["balanced_mean"] <= 1e-12
    assert rep.balance > 0.0


def test_w_requires_sign_change(cap60):
    with pytest.raises(NoSignChange):
        tf.eval_w(cap60)


def test_w_closed_form_wide_cap():
    surf = profiles.spherical_cap(2, 2.2, samples=1600)
    rep = tf.eval_w(surf)
    assert abs(rep.mean_value) <= 1e-10
    assert rep.residuals["closed_form"] <= 1e-3


def test_u_rotational():
    surf2 = profiles.spherical_cap(2, math.pi / 3, samples=400)
    rep = tf.eval_u_rotational(surf2)
    assert abs(rep.mean_value) <= 1e-12
    assert abs(rep.index_value) <= 1e-12
    surf3 = profiles.spherical_cap(3, math.pi / 3, samples=400)
    with pytest.raises(DimensionUnsupported):
        tf.eval_u_rotational(surf3)


def test_index_form_profile_matches_rayleigh(cap60):
    # quadrature index form of v agrees with the closed-form route
    rep = tf.eval_v_family(cap60)
    s, x = cap60.profile.s, cap60.profile.x
    assert np.isfinite(rep.index_value)
    assert rep.index_value < 0.0
