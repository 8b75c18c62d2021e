import math

import numpy as np
import pytest

from oracles import CyclotronOracle, lateral_deviation
from repmech import (
    DiscretePath,
    LagrangianSpec,
    SpacelikeSegment,
    action_gradient,
    constant_potential,
    discrete_action,
    extremize,
    minkowski_metric,
    reparam_invariance_residual,
    straight_chord_path,
    uniform_magnetic_potential,
)
from repmech.sweeps import draw_spec_state

MINK = minkowski_metric(4)
MASS_SPEC = LagrangianSpec(metric=MINK, mass=1.0)
START = np.zeros(4)
END = np.array([1.0, 0.3, 0.0, 0.0])


class TestDiscreteAction:
    def test_proper_length_of_split_chord(self):
        path = straight_chord_path(START, END, 1)
        assert discrete_action(MASS_SPEC, path) == pytest.approx(math.sqrt(0.91), abs=1e-15)

    def test_constant_potential_telescopes(self):
        a = np.array([0.4, 0.2, -0.1, 0.3])
        spec_a = LagrangianSpec(metric=MINK, mass=1.0, charge=1.0,
                                potential=constant_potential(a))
        expect = float(a @ (END - START))
        rng = np.random.default_rng(2)
        for _ in range(20):
            pert = 0.01 * rng.normal(size=(6, 4))
            path = straight_chord_path(START, END, 6, perturbation=pert)
            shift = discrete_action(spec_a, path) - discrete_action(MASS_SPEC, path)
            assert shift == pytest.approx(expect, abs=1e-12)

    def test_trivial_zero_action(self):
        spec = LagrangianSpec(metric=MINK, mass=0.0)
        path = straight_chord_path(START, END, 3)
        assert discrete_action(spec, path) == 0.0

    def test_spacelike_segment_rejected(self):
        path = DiscretePath(START, END, np.array([[0.1, 0.9, 0.0, 0.0]]))
        with pytest.raises(SpacelikeSegment):
            discrete_action(MASS_SPEC, path)


class TestReparamInvariance:
    def test_unit_steps_exact(self):
        path = straight_chord_path(START, END, 9)
        assert reparam_invariance_residual(MASS_SPEC, path, np.ones(10)) == 0.0

    def test_random_steps(self):
        rng = np.random.default_rng(4)
        path = straight_chord_path(START, END, 9)
        s = discrete_action(MASS_SPEC, path)
        for _ in range(50):
            dt = rng.uniform(0.1, 10.0, size=10)
            assert reparam_invariance_residual(MASS_SPEC, path, dt) <= 1e-12 * abs(s)

    def test_sweep_across_specs(self):
        rng = np.random.default_rng(8)
        worst = 0.0
        for _ in range(200):
            spec, x, v = draw_spec_state(rng, curved=False)
            k = int(rng.integers(1, 6))
            scale = rng.uniform(0.05, 0.2)
            start = x
            end = x + v * rng.uniform(0.5, 1.5)
            pert = scale * rng.normal(size=(k, spec.dim)) * 0.02
            try:
                path = straight_chord_path(start, end, k, perturbation=pert)
                s = discrete_action(spec, path)
            except Exception:
                continue
            dt = rng.uniform(0.1, 10.0, size=k + 1)
            res = reparam_invariance_residual(spec, path, dt)
            worst = max(worst, res / max(abs(s), 1.0))
        assert worst <= 1e-11

    def test_nonpositive_steps_rejected(self):
        path = straight_chord_path(START, END, 2)
        with pytest.raises(ValueError):
            reparam_invariance_residual(MASS_SPEC, path, [1.0, -1.0, 1.0])


class TestExtremize:
    def test_geodesic_recovered_from_perturbed_chord(self):
        rng = np.random.default_rng(1)
        pert = np.zeros((9, 4))
        pert[:, 2] = 0.02 * np.sin(np.linspace(0, np.pi, 9))
        pert[:, 3] = 0.015 * rng.normal(size=9) * 0.5
        path0 = straight_chord_path(START, END, 9, perturbation=pert)
        res = extremize(MASS_SPEC, path0)
        assert res.converged
        assert res.action == pytest.approx(math.sqrt(0.91), abs=1e-6)
        assert lateral_deviation(res.path.interior, START, END) <= 1e-6
        assert res.grad_norm_inf <= 1e-8
        assert res.degenerate_modes == 9  # longitudinal sliding modes

    def test_stationary_input_returns_immediately(self):
        res = extremize(MASS_SPEC, straight_chord_path(START, END, 9))
        assert res.iterations == 0
        assert res.grad_norm_inf <= 1e-10
        assert res.converged

    def test_straight_chord_gradient_is_zero(self):
        grad = action_gradient(MASS_SPEC, straight_chord_path(START, END, 9))
        assert np.max(np.abs(grad)) <= 1e-10

    def test_translation_invariance(self):
        shift = np.array([0.3, -0.2, 0.5, 0.1])
        rng = np.random.default_rng(3)
        pert = 0.015 * rng.normal(size=(5, 4))
        pert[:, 0] = 0.0
        res1 = extremize(MASS_SPEC, straight_chord_path(START, END, 5, pert))
        res2 = extremize(MASS_SPEC, straight_chord_path(START + shift, END + shift, 5, pert))
        assert np.max(np.abs(res2.path.interior - res1.path.interior - shift)) <= 1e-8

    def test_constant_potential_leaves_extremals_unchanged(self):
        a = np.array([0.4, 0.2, -0.1, 0.3])
        spec_a = LagrangianSpec(metric=MINK, mass=1.0, charge=1.0,
                                potential=constant_potential(a))
        rng = np.random.default_rng(5)
        pert = 0.015 * rng.normal(size=(5, 4))
        pert[:, 0] = 0.0
        res1 = extremize(MASS_SPEC, straight_chord_path(START, END, 5, pert))
        res2 = extremize(spec_a, straight_chord_path(START, END, 5, pert))
        assert np.max(np.abs(res2.path.interior - res1.path.interior)) <= 1e-6
        assert res2.action - res1.action == pytest.approx(float(a @ (END - START)), abs=1e-10)


class TestChargedArc:
    def make_problem(self, k):
        orbit = CyclotronOracle()
        spec = LagrangianSpec(metric=MINK, mass=1.0, charge=1.0,
                              potential=uniform_magnetic_potential(4, 1.0))
        t1 = 1.0
        start = np.array([0.0, *orbit.position(0.0), 0.0])
        end = np.array([t1, *orbit.position(t1), 0.0])
        interior = np.array([[t, *orbit.position(t), 0.0]
                             for t in np.linspace(0, t1, k + 2)[1:-1]])
        return orbit, spec, DiscretePath(start, end, interior), t1

    def test_converged_action_matches_analytic(self):
        orbit, spec, path0, t1 = self.make_problem(40)
        res = extremize(spec, path0)
        assert res.converged
        exact = orbit.action(0.0, t1)
        assert abs(res.action - exact) / abs(exact) <= 1e-5

    def test_refinement_order(self):
        actions = {}
        for k in (8, 16, 32):
            _, spec, path0, _ = self.make_problem(k)
            actions[k] = extremize(spec, path0).action
        # successive refinement differences shrink as (K+1)^-2
        d1 = abs(actions[8] - actions[16])
        d2 = abs(actions[16] - actions[32])
        order = math.log2(d1 / d2) / math.log2(2.0)
        assert abs(order - 2.0) <= 0.3
