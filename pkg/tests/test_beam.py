"""Tests for the closed-form V-beam load-deflection model.

Expected values marked "hand" were computed by direct evaluation of the
defining expressions with independent arithmetic (see the oracle helpers
at the top); geometry throughout is the reference flexure
L=40, T=1.2, W=5, theta=7 deg with E=1800 MPa unless stated.
"""

import math

import numpy as np
import pytest

from graspsynth import (Branch, MaterialModel, MonostableIntermediates,
                        ValidationError, VBeamGeometry,
                        actuation_force, bistability_margin,
                        bistable_crossover, branch_loads, force_curve,
                        monostable_intermediates, normalize_deflection,
                        peak_force, solve_monostable_cubic)

GEOM = VBeamGeometry.from_degrees(40, 1.2, 5, 7)
MAT = MaterialModel(youngs_modulus_E=1800)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------

def oracle_k(t, x_o, y_o):
    """Cubic coefficients rewritten from scratch (kept apart on purpose)."""
    return (t * t * 4 / 675 + y_o * y_o / 42000,
            t * t * 16 / 45 - y_o * y_o * 17 / 2100 - x_o * 8 / 225,
            t * t * 16 / 3 - y_o * y_o * 96 / 175 - x_o * 32 / 15,
            -y_o * y_o * 48 / 5 - x_o * 32)


def oracle_cubic_root(t, x_o, y_o):
    """Bisection plus Newton polish on the cubic; no closed-form algebra.

    Valid in the monostable domain, where the cubic has a single real root:
    any sign-changing bracket contains it.
    """
    k1, k2, k3, k4 = oracle_k(t, x_o, y_o)

    def f(p):
        return ((k1 * p + k2) * p + k3) * p + k4

    lo, hi = -1.0, 1.0
    while f(lo) > 0:
        lo *= 2.0
        assert lo > -1e9, "no bracket on the negative side"
    while f(hi) < 0:
        hi *= 2.0
        assert hi < 1e9, "no bracket on the positive side"
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    p = 0.5 * (lo + hi)
    for _ in range(3):
        dfdp = (3 * k1 * p + 2 * k2) * p + k3
        if dfdp == 0:
            break
        p -= f(p) / dfdp
    return p


def random_monostable_states(n, seed):
    """Random (geometry, delta_y) pairs below the bistability crossover."""
    rng = np.random.default_rng(seed)
    states = []
    while len(states) < n:
        L = rng.uniform(20.0, 80.0)
        T = rng.uniform(0.01, 0.06) * L  # t = 2T/L in [0.02, 0.12]
        W = rng.uniform(2.0, 10.0)
        theta = math.radians(rng.uniform(0.0, 20.0))
        geom = VBeamGeometry(L, T, W, theta)
        dy_hi = min(0.15 * L, 0.999 * bistable_crossover(geom))
        dy = rng.uniform(1e-4 * L, dy_hi)
        if not bistability_margin(geom, dy)[1]:
            states.append((geom, dy))
    return states


# ---------------------------------------------------------------------------
# geometry and normalization
# ---------------------------------------------------------------------------

def test_geometry_validation():
    with pytest.raises(ValidationError, match="length_L"):
        VBeamGeometry(-1, 1.2, 5, 0.1)
    with pytest.raises(ValidationError, match="thickness_T"):
        VBeamGeometry(40, 0, 5, 0.1)
    with pytest.raises(ValidationError, match="width_W"):
        VBeamGeometry(40, 1.2, -5, 0.1)
    with pytest.raises(ValidationError, match="tilt_theta"):
        VBeamGeometry(40, 1.2, 5, math.pi / 2)
    with pytest.raises(ValidationError, match="slender"):
        VBeamGeometry(1.0, 1.2, 5, 0.1)


def test_normalize_reference_travel():
    nd = normalize_deflection(GEOM, 5.0)
    assert nd.x_o == pytest.approx(-0.030467, abs=5e-7)   # hand
    assert nd.y_o == pytest.approx(-0.248137, abs=5e-7)   # hand
    assert nd.t == pytest.approx(0.06, rel=1e-15)
    assert nd.delta_y == 5.0


def test_normalize_zero_travel():
    nd = normalize_deflection(GEOM, 0.0)
    assert nd.x_o == 0.0
    assert nd.y_o == 0.0


def test_normalize_untilted_kills_axial_term():
    g0 = VBeamGeometry.from_degrees(40, 1.2, 5, 0)
    nd = normalize_deflection(g0, 5.0)
    assert nd.x_o == 0.0
    assert nd.y_o == pytest.approx(-0.25, rel=1e-15)


def test_normalize_rejects_negative_travel():
    with pytest.raises(ValidationError):
        normalize_deflection(GEOM, -0.1)


def test_normalization_identities_random():
    rng = np.random.default_rng(7)
    for _ in range(300):
        L = rng.uniform(5.0, 200.0)
        T = rng.uniform(0.001, 0.4) * L
        W = rng.uniform(0.5, 20.0)
        th = rng.uniform(0.0, 1.4)
        dy = rng.uniform(0.0, 0.3 * L)
        nd = normalize_deflection(VBeamGeometry(L, T, W, th), dy)
        assert abs(nd.x_o + 2 * dy * math.sin(th) / L) <= 1e-12 * max(1, abs(nd.x_o))
        assert abs(nd.y_o + 2 * dy * math.cos(th) / L) <= 1e-12 * max(1, abs(nd.y_o))
        assert abs(nd.t - 2 * T / L) <= 1e-12 * nd.t


# ---------------------------------------------------------------------------
# bistability margin
# ---------------------------------------------------------------------------

def test_margin_reference_values():
    d1, ok = bistability_margin(GEOM, 5.0)
    assert d1 == pytest.approx(0.0656, abs=5e-5)          # hand
    assert ok is True
    d1, ok = bistability_margin(GEOM, 1.0)
    assert d1 == pytest.approx(-0.00233, abs=5e-6)        # hand
    assert ok is False


def test_margin_zero_travel_is_negative_constant():
    d1, ok = bistability_margin(GEOM, 0.0)
    assert d1 == pytest.approx(-21.46 * 1.2 ** 2 / 40 ** 2, rel=1e-12)
    assert ok is False


def test_margin_untilted_never_satisfied():
    rng = np.random.default_rng(11)
    for _ in range(200):
        L = rng.uniform(5.0, 200.0)
        T = rng.uniform(0.005, 0.2) * L
        geom = VBeamGeometry(L, T, 1.0, 0.0)
        dy = rng.uniform(0.0, 10.0 * L)
        d1, ok = bistability_margin(geom, dy)
        assert d1 < 0 and not ok


def test_crossover_matches_affine_root():
    dy_star = bistable_crossover(GEOM)
    assert dy_star == pytest.approx(1.137315, abs=1e-6)   # hand
    below, _ = bistability_margin(GEOM, dy_star * (1 - 1e-9))
    above, _ = bistability_margin(GEOM, dy_star * (1 + 1e-9))
    assert below < 0 <= above


def test_crossover_infinite_for_untilted_beam():
    g0 = VBeamGeometry.from_degrees(40, 1.2, 5, 0)
    assert bistable_crossover(g0) == math.inf


# ---------------------------------------------------------------------------
# monostable cubic
# ---------------------------------------------------------------------------

def test_intermediates_match_defining_expressions():
    nd = normalize_deflection(GEOM, 1.0)
    inter = monostable_intermediates(nd)
    k1, k2, k3, k4 = oracle_k(nd.t, nd.x_o, nd.y_o)
    assert inter.k1 == pytest.approx(k1, rel=1e-14)
    assert inter.k2 == pytest.approx(k2, rel=1e-14)
    assert inter.k3 == pytest.approx(k3, rel=1e-14)
    assert inter.k4 == pytest.approx(k4, rel=1e-14)
    assert inter.c1 == pytest.approx(-k2 ** 2 + 3 * k1 * k3, rel=1e-14)
    assert inter.k1 > 0


def test_cubic_root_reference_travel():
    nd = normalize_deflection(GEOM, 1.0)
    p = solve_monostable_cubic(monostable_intermediates(nd))
    assert p == pytest.approx(-8.8, rel=0.02)             # hand, 2 percent
    assert p == pytest.approx(oracle_cubic_root(nd.t, nd.x_o, nd.y_o), rel=1e-10)


def test_cubic_trivial_root_at_origin():
    inter = MonostableIntermediates(k1=1.0, k2=0.0, k3=0.0, k4=0.0,
                                    c1=0.0, c2=0.0, p1=0.0)
    assert solve_monostable_cubic(inter) == 0.0


def test_cubic_root_approaches_bistable_constant_at_crossover():
    dy = bistable_crossover(GEOM) * 0.999
    nd = normalize_deflection(GEOM, dy)
    p = solve_monostable_cubic(monostable_intermediates(nd))
    assert abs(p - (-9.8837)) / 9.8837 < 0.15


def test_cubic_residual_bound_random():
    for geom, dy in random_monostable_states(200, seed=3):
        nd = normalize_deflection(geom, dy)
        inter = monostable_intermediates(nd)
        p = solve_monostable_cubic(inter)
        assert abs(inter.cubic(p)) < 1e-9 * max(1.0, abs(inter.k4))


def test_cubic_vs_independent_rootfinder_random():
    for geom, dy in random_monostable_states(1000, seed=17):
        nd = normalize_deflection(geom, dy)
        p = solve_monostable_cubic(monostable_intermediates(nd))
        ref = oracle_cubic_root(nd.t, nd.x_o, nd.y_o)
        assert abs(p - ref) <= 1e-8 * max(abs(ref), 1e-12)


def test_closed_form_root_matches_continuation():
    # the closed-form expression stored in the intermediates is the same
    # branch the continuation tracks
    for geom, dy in random_monostable_states(100, seed=23):
        nd = normalize_deflection(geom, dy)
        inter = monostable_intermediates(nd)
        p = solve_monostable_cubic(inter)
        assert inter.p1 == pytest.approx(p, rel=1e-9, abs=1e-12)


# ---------------------------------------------------------------------------
# branch loads
# ---------------------------------------------------------------------------

def test_branch_loads_bistable_reference():
    st = branch_loads(GEOM, 5.0)
    assert st.branch is Branch.BISTABLE
    assert st.p_o == -9.8837
    assert st.f_o == pytest.approx(1.2064, abs=5e-5)      # hand: -4.8618 y_o
    assert st.m_o is None
    assert st.d1_value == pytest.approx(0.0656, abs=5e-5)


def test_branch_loads_monostable_reference():
    st = branch_loads(GEOM, 1.0)
    assert st.branch is Branch.MONOSTABLE
    assert st.f_o == pytest.approx(0.20, rel=0.05)        # hand
    assert st.p_o == pytest.approx(-8.8, rel=0.02)        # hand


def test_branch_loads_zero_travel():
    st = branch_loads(GEOM, 0.0)
    assert st.f_o == 0.0
    assert st.p_o == 0.0
    assert st.branch is Branch.MONOSTABLE


# ---------------------------------------------------------------------------
# actuation force
# ---------------------------------------------------------------------------

def test_force_reference_values():
    assert actuation_force(GEOM, MAT, 2.0) == pytest.approx(2.35, abs=0.01)  # hand
    assert actuation_force(GEOM, MAT, 5.0) == pytest.approx(0.02, abs=0.005) # hand
    assert actuation_force(GEOM, MAT, 0.0) == 0.0


def test_force_scales_linearly_with_modulus():
    rng = np.random.default_rng(5)
    for _ in range(50):
        alpha = rng.uniform(0.1, 10.0)
        dy = rng.uniform(0.1, 5.0)
        base = actuation_force(GEOM, MAT, dy)
        scaled = actuation_force(GEOM, MaterialModel(1800 * alpha), dy)
        assert scaled == pytest.approx(alpha * base, rel=1e-12)


def test_bistable_branch_force_is_affine():
    curve = force_curve(GEOM, MAT, 5.0, 500)
    mask = np.array([b is Branch.BISTABLE for b in curve.branches])
    dy = curve.delta_y[mask]
    f = curve.force[mask]
    slope, intercept = np.polyfit(dy, f, 1)
    residual = np.max(np.abs(f - (slope * dy + intercept)))
    assert residual < 1e-9
    assert intercept == pytest.approx(3.9026, abs=1e-3)   # hand
    assert slope == pytest.approx(-0.7760, abs=1e-3)      # hand


def test_untilted_small_travel_slope_is_guided_stiffness():
    # the model linearizes to the classical fixed-guided transverse
    # stiffness 12 E I / L^3 when the tilt vanishes
    g0 = VBeamGeometry.from_degrees(40, 1.2, 5, 0)
    k = actuation_force(g0, MAT, 1e-6) / 1e-6
    assert k == pytest.approx(12 * 1800 * g0.second_moment / 40 ** 3, rel=1e-4)


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

def test_curve_grid_and_crossover_tag():
    curve = force_curve(GEOM, MAT, 5.0, 500)
    assert len(curve) == 500
    assert curve.delta_y[0] == pytest.approx(0.01, rel=1e-12)
    assert curve.delta_y[-1] == pytest.approx(5.0, rel=1e-12)
    flips = [i for i in range(1, 500)
             if curve.branches[i] is not curve.branches[i - 1]]
    assert len(flips) == 1
    dy_flip = curve.delta_y[flips[0]]
    assert abs(dy_flip - bistable_crossover(GEOM)) <= 5.0 / 500
    assert curve.branches[0] is Branch.MONOSTABLE
    assert curve.branches[-1] is Branch.BISTABLE


def test_curve_two_samples():
    curve = force_curve(GEOM, MAT, 5.0, 2)
    assert np.allclose(curve.delta_y, [2.5, 5.0])


def test_curve_determinism():
    a = force_curve(GEOM, MAT, 5.0, 200)
    b = force_curve(GEOM, MAT, 5.0, 200)
    assert np.array_equal(a.delta_y, b.delta_y)
    assert np.array_equal(a.force, b.force)
    assert np.array_equal(a.f_o, b.f_o)
    assert np.array_equal(a.p_o, b.p_o)
    assert a.branches == b.branches


def test_curve_matches_pointwise_chain():
    curve = force_curve(GEOM, MAT, 5.0, 50)
    for i in (0, 10, 25, 49):
        dy = float(curve.delta_y[i])
        st = branch_loads(GEOM, dy)
        assert curve.p_o[i] == pytest.approx(st.p_o, rel=1e-9, abs=1e-12)
        assert curve.force[i] == pytest.approx(
            actuation_force(GEOM, MAT, dy), rel=1e-9, abs=1e-12)


def test_curve_validation():
    with pytest.raises(ValidationError):
        force_curve(GEOM, MAT, -1.0, 100)
    with pytest.raises(ValidationError):
        force_curve(GEOM, MAT, 5.0, 1)


def test_curve_immutable():
    curve = force_curve(GEOM, MAT, 5.0, 10)
    with pytest.raises(ValueError):
        curve.force[0] = 99.0


# ---------------------------------------------------------------------------
# peak extraction
# ---------------------------------------------------------------------------

def test_peak_near_crossover():
    dy_pk, f_pk = peak_force(force_curve(GEOM, MAT, 5.0, 2000))
    assert f_pk == pytest.approx(3.0, abs=0.1)            # hand: dense sweep
    assert dy_pk == pytest.approx(1.1, abs=0.1)


def test_peak_single_sample_and_ties():
    curve = force_curve(GEOM, MAT, 5.0, 2)
    sub = curve.with_force(np.array([1.5, 1.5]))
    dy_pk, f_pk = peak_force(sub)
    assert dy_pk == 2.5 and f_pk == 1.5                   # tie takes smaller travel


def test_material_validation():
    with pytest.raises(ValidationError):
        MaterialModel(-1.0)
    with pytest.raises(ValidationError):
        MaterialModel(1800.0, poisson_ratio=0.5)
