import math

import numpy as np
import pytest

from deltanls import (
    GridFunction,
    Params,
    ScalingPair,
    evaluate,
    gradient_norm_sq,
    j_functional,
    k_functional,
    l2_norm_sq,
    lp_norm_pow,
    scale,
    scaling_derivative,
    sigma,
)
from deltanls.groundstate import soliton_value, threshold_r

from conftest import random_smooth

P = 7.0
PAIRS = [ScalingPair(0.5, -1.0), ScalingPair(1.0, 0.0), ScalingPair(1.0, 1.0), ScalingPair(1.0, -2.0)]


class TestScalingPair:
    def test_mu_values(self):
        sp = ScalingPair(0.5, -1.0)
        assert sp.mu_bar == 2.0 and sp.mu_underbar == 0.0
        sp = ScalingPair(1.0, 1.0)
        assert sp.mu_bar == 3.0 and sp.mu_underbar == 1.0

    @pytest.mark.parametrize("a,b", [(0.0, 0.0), (-1.0, 0.0), (1.0, 3.0), (1.0, -3.0)])
    def test_invalid(self, a, b):
        with pytest.raises(ValueError):
            ScalingPair(a, b)


class TestEvaluate:
    def test_zero(self, grid, params):
        z = GridFunction(grid, np.zeros(grid.n_points, dtype=complex))
        rep = evaluate(z, params)
        assert rep.mass == rep.energy == rep.action == rep.virial == rep.nehari == 0.0

    def test_action_is_energy_plus_omega_mass(self, grid, params, rng):
        f = random_smooth(grid, rng)
        rep = evaluate(f, params)
        assert rep.action == rep.energy + rep.omega * rep.mass

    def test_ground_state_criticality(self, soliton, params):
        rep = evaluate(soliton, params)
        assert abs(rep.virial) < 1e-4   # O(h^2) at this grid; 1e-6 on the verify grids
        assert abs(rep.nehari) < 1e-3

    def test_free_soliton_action_is_l1(self, fine_grid, free_params):
        from deltanls.groundstate import threshold_l

        q = GridFunction(
            fine_grid, soliton_value(1.0, 0.0, P, fine_grid.x).astype(complex)
        )
        assert evaluate(q, free_params).action == pytest.approx(
            threshold_l(1.0, P), abs=1e-6
        )

    def test_requires_omega(self, soliton):
        with pytest.raises(ValueError):
            evaluate(soliton, Params(gamma=-1.0, p=P))


class TestKFunctional:
    def test_specializations(self, grid, params, rng):
        f = random_smooth(grid, rng)
        rep = evaluate(f, params)
        assert k_functional(f, params, ScalingPair(0.5, -1.0)) == pytest.approx(
            rep.virial, rel=1e-14, abs=1e-14
        )
        assert k_functional(f, params, ScalingPair(1.0, 0.0)) == pytest.approx(
            rep.nehari, rel=1e-14, abs=1e-14
        )

    def test_linear_combination_identity(self, grid, params, rng):
        # K^{a,b} = (a + b/2) I - b P identically
        for _ in range(5):
            f = random_smooth(grid, rng)
            rep = evaluate(f, params)
            for sp in PAIRS:
                expected = (sp.alpha + sp.beta / 2.0) * rep.nehari - sp.beta * rep.virial
                assert k_functional(f, params, sp) == pytest.approx(
                    expected, rel=1e-12, abs=1e-12
                )

    def test_vanishes_on_ground_state(self, soliton, params):
        for sp in PAIRS:
            assert abs(k_functional(soliton, params, sp)) < 1e-3


class TestJFunctional:
    def test_zero(self, grid, params):
        z = GridFunction(grid, np.zeros(grid.n_points, dtype=complex))
        assert j_functional(z, params, PAIRS[0]) == 0.0

    def test_equals_action_on_ground_state(self, soliton, params):
        # K(Q) = 0, so J(Q) = S(Q) = r_omega
        r = threshold_r(1.0, -1.0, P)
        for sp in PAIRS:
            assert j_functional(soliton, params, sp) == pytest.approx(r, abs=1e-3)

    def test_nonnegative_battery(self, grid, params, rng):
        for _ in range(30):
            f = random_smooth(grid, rng, amp=rng.uniform(0.05, 2.0))
            for sp in PAIRS:
                assert j_functional(f, params, sp) >= -1e-10

    def test_lower_bound(self, grid, params, rng):
        # mu_bar J >= |b| min{||f'||^2/2, w ||f||^2} - g|b|/2 |f(0)|^2 + (p-5)a/(p+1) ||f||_{p+1}^{p+1}
        gamma, omega = params.gamma, params.omega
        for _ in range(20):
            f = random_smooth(grid, rng, amp=rng.uniform(0.1, 1.5))
            grad = gradient_norm_sq(f)
            l2 = l2_norm_sq(f)
            lp1 = lp_norm_pow(f, P + 1.0)
            c0 = abs(f.center_value) ** 2
            for sp in PAIRS:
                bound = (
                    abs(sp.beta) * min(0.5 * grad, omega * l2)
                    - 0.5 * gamma * abs(sp.beta) * c0
                    + (P - 5.0) * sp.alpha / (P + 1.0) * lp1
                )
                assert sp.mu_bar * j_functional(f, params, sp) >= bound - 1e-9


class TestNormSandwich:
    def test_sandwich_when_virial_nonnegative(self, grid, params, rng):
        checked = 0
        for _ in range(40):
            f = random_smooth(grid, rng, amp=rng.uniform(0.02, 0.6))
            rep = evaluate(f, params)
            if rep.virial < 0:
                continue
            checked += 1
            assert rep.action <= rep.calh_norm_sq * (1 + 1e-12)
            assert rep.calh_norm_sq <= (P - 1.0) / (P - 5.0) * rep.action * (1 + 1e-12)
        assert checked > 10

    def test_k_positive_for_flattening_family(self, grid, params, rng):
        # bounded L2 mass, vanishing gradient: K eventually positive
        f = random_smooth(grid, rng)
        f = (1.0 / math.sqrt(l2_norm_sq(f))) * f
        for sp in PAIRS:
            signs = [k_functional(lam * f, params, sp) > 0 for lam in (1e-2, 1e-3, 1e-4)]
            assert signs[-1]


class TestScale:
    def test_identity_at_zero(self, soliton):
        assert scale(soliton, 0.0, PAIRS[0]) is soliton

    def test_l2_invariant_pair(self, grid, params, rng):
        # (1/2, -1): exponents cancel in the L2 norm
        f = random_smooth(grid, rng)
        sp = ScalingPair(0.5, -1.0)
        for lam in (-0.4, 0.3):
            scaled = scale(f, lam, sp)
            assert l2_norm_sq(scaled) == pytest.approx(l2_norm_sq(f), abs=1e-6)

    def test_group_law(self, grid, rng):
        f = random_smooth(grid, rng)
        sp = ScalingPair(1.0, 1.0)
        a = scale(scale(f, 0.2, sp), 0.1, sp)
        b = scale(f, 0.3, sp)
        assert np.max(np.abs(a.values - b.values)) < 1e-6

    def test_truncation_warning(self, grid):
        # wide data pushed outward loses mass at the boundary
        wide = GridFunction(grid, np.exp(-(grid.x / 25.0) ** 2).astype(complex))
        with pytest.warns(UserWarning, match="truncated"):
            scale(wide, 1.0, ScalingPair(1.0, 1.0))


class TestScalingDerivative:
    def test_matches_k(self, grid, params, rng):
        for _ in range(5):
            f = random_smooth(grid, rng)
            f = (1.0 / math.sqrt(l2_norm_sq(f))) * f
            for sp in PAIRS:
                k = k_functional(f, params, sp)
                d = scaling_derivative(f, params, sp)
                assert abs(d - k) <= 1e-4 * (1.0 + abs(k))

    def test_zero_data(self, grid, params):
        z = GridFunction(grid, np.zeros(grid.n_points, dtype=complex))
        assert scaling_derivative(z, params, PAIRS[0]) == 0.0

    def test_near_zero_on_ground_state(self, soliton, params):
        assert abs(scaling_derivative(soliton, params, ScalingPair(1.0, 0.0))) < 1e-3


class TestSigma:
    def test_p7(self):
        assert sigma(7.0) == 5.0

    def test_p9(self):
        assert sigma(9.0) == 3.0

    def test_monotone_to_one(self):
        vals = [sigma(p) for p in (6.0, 8.0, 12.0, 50.0, 500.0)]
        assert all(a > b for a, b in zip(vals, vals[1:]))
        assert vals[-1] > 1.0

    def test_invalid(self):
        with pytest.raises(ValueError):
            sigma(5.0)
