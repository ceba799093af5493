import math

import numpy as np
import pytest

import holospots as hs
from holospots.errors import DegenerateFieldError, InvalidParameterError
from holospots.solvers import DEGENERACY_FLOOR, rebalance_weights

from .conftest import random_spots


class TestRandomSuperposition:
    def test_single_spot_is_conjugate(self, pupil64):
        spots = hs.SpotSet.from_points([[2e-5, -1e-5, 1e-5]])
        holo, trace = hs.rs(pupil64, spots, seed=11)
        theta = np.random.default_rng(11).random(1) * 2 * math.pi
        want = hs.wrap_phase(
            hs.spot_phase(pupil64, (2e-5, -1e-5, 1e-5), (pupil64.xs, pupil64.ys))
            + theta[0])
        diff = np.abs(np.mod(holo.phase - want + math.pi, 2 * math.pi) - math.pi)
        assert np.max(diff) < 1e-12
        rep = hs.quality_report(pupil64, holo, spots)
        assert rep.efficiency == pytest.approx(1.0, rel=1e-9)

    def test_seed_determinism(self, pupil64, rng):
        spots = random_spots(rng, 5)
        a, _ = hs.rs(pupil64, spots, seed=4)
        b, _ = hs.rs(pupil64, spots, seed=4)
        c, _ = hs.rs(pupil64, spots, seed=5)
        assert np.array_equal(a.phase, b.phase)
        assert not np.array_equal(a.phase, c.phase)

    def test_operation_count(self, pupil64, rng):
        spots = random_spots(rng, 7)
        _, trace = hs.rs(pupil64, spots, seed=0)
        assert trace.operation_count == pupil64.active_count * 7
        assert trace.records == ()


class TestWeightUpdate:
    def test_single_spot_weight_stays_one(self, pupil64):
        spots = hs.SpotSet.from_points([[1e-5, 1e-5, 0.0]])
        _, trace = hs.wgs(pupil64, spots, iterations=5, seed=2)
        for rec in trace.records:
            assert rec.weights[0] == 1.0

    def test_equal_magnitudes_keep_weights(self):
        w, mags, flag = rebalance_weights(np.array([0.7, 0.7]), np.array([3.0, 3.0]))
        assert np.array_equal(w, np.array([0.7, 0.7]))
        assert not flag

    def test_two_spot_arithmetic(self):
        # magnitudes (2, 1) with unit weights: mean 1.5 -> (0.75, 1.5)
        w, _, _ = rebalance_weights(np.ones(2), np.array([2.0, 1.0]))
        assert np.array_equal(w, np.array([0.75, 1.5]))

    def test_zero_magnitude_floored_and_flagged(self):
        w, mags, flag = rebalance_weights(np.ones(2), np.array([0.0, 2.0]))
        assert flag
        assert mags[0] == 2.0 * DEGENERACY_FLOOR
        assert np.all(w > 0)

    def test_all_zero_magnitudes_raise(self):
        with pytest.raises(DegenerateFieldError):
            rebalance_weights(np.ones(2), np.zeros(2))


class TestWeightedRun:
    def test_c1_equals_wgs_bitwise(self, rng):
        pupil = hs.build_pupil(48, illumination="uniform", seed=1)
        spots = random_spots(rng, 6)
        for seed in (0, 1):
            a, ta = hs.wgs(pupil, spots, iterations=6, seed=seed)
            b, tb = hs.cswgs(pupil, spots, iterations=6, compression=1.0, seed=seed)
            assert np.array_equal(a.phase, b.phase)
            assert ta.operation_count == tb.operation_count

    def test_uniformity_improves_over_start(self):
        # weighted refinement beats the random start on the 36-spot grid
        pupil = hs.build_pupil(128, illumination="uniform", seed=0)
        spots = hs.named_scenario("grid36").spot_set()
        u_rs, u_wgs = [], []
        for seed in range(10):
            h0, _ = hs.rs(pupil, spots, seed=seed)
            u_rs.append(hs.quality_report(pupil, h0, spots).uniformity)
            h5, _ = hs.wgs(pupil, spots, iterations=5, seed=seed)
            u_wgs.append(hs.quality_report(pupil, h5, spots).uniformity)
        assert np.mean(u_wgs) >= np.mean(u_rs)

    def test_weight_positivity(self, pupil64, rng):
        spots = random_spots(rng, 8)
        _, trace = hs.wgs(pupil64, spots, iterations=10, seed=3)
        assert not trace.degenerate
        for rec in trace.records:
            assert np.all(rec.weights > 0)

    def test_mean_preservation_identity(self, pupil64, rng):
        spots = random_spots(rng, 6)
        _, trace = hs.wgs(pupil64, spots, iterations=8, seed=9)
        prev = np.ones(spots.count)
        for rec in trace.records:
            lhs = float(np.sum(rec.weights / prev * rec.magnitudes))
            rhs = spots.count * float(np.mean(rec.magnitudes))
            assert abs(lhs - rhs) <= 1e-12 * abs(rhs)
            prev = rec.weights

    def test_worker_count_invariance(self, rng):
        pupil = hs.build_pupil(48, illumination="gaussian", waist=2e-4, seed=2)
        spots = random_spots(rng, 4)
        a, _ = hs.cswgs(pupil, spots, iterations=7, compression=0.25, seed=1,
                        workers=1)
        b, _ = hs.cswgs(pupil, spots, iterations=7, compression=0.25, seed=1,
                        workers=4)
        assert np.array_equal(a.phase, b.phase)


class TestCompressedRun:
    def test_operation_count_formula(self, rng):
        pupil = hs.build_pupil(32, illumination="uniform", seed=0)
        spots = random_spots(rng, 3)
        m, n = pupil.active_count, 3
        _, trace = hs.cswgs(pupil, spots, iterations=7, compression=0.3, seed=0)
        assert trace.operation_count == 2 * m * n + math.ceil(0.3 * m) * n * 5

    def test_window_sizes_in_trace(self, rng):
        pupil = hs.build_pupil(32, illumination="uniform", seed=0)
        spots = random_spots(rng, 3)
        _, trace = hs.cswgs(pupil, spots, iterations=6, compression=0.25, seed=0)
        sizes = [rec.subset_size for rec in trace.records]
        sub = math.ceil(0.25 * pupil.active_count)
        assert sizes == [sub] * 4 + [pupil.active_count] * 2

    def test_underdetermined_subset_warns(self, pupil64, rng):
        spots = random_spots(rng, 40)
        with pytest.warns(RuntimeWarning, match="underdetermined"):
            hs.cswgs(pupil64, spots, iterations=4, compression=1e-3, seed=0)

    def test_requires_two_iterations(self, pupil64, rng):
        spots = random_spots(rng, 2)
        with pytest.raises(InvalidParameterError):
            hs.cswgs(pupil64, spots, iterations=1, compression=0.5, seed=0)

    def test_beats_full_run_at_equal_budget(self):
        # two-cube pattern at a fixed operation budget: the compressed
        # run spends its budget on more iterations and evens out better
        pupil = hs.build_pupil(128, illumination="uniform", seed=0)
        spots = hs.named_scenario("cubes").spot_set()
        m, n = pupil.active_count, spots.count
        budget = 3 * m * n
        plan = hs.budget_controller("cswgs", m, n, budget, compression=2**-4)
        u_cs, u_wgs = [], []
        for seed in range(10):
            h, _ = hs.cswgs(pupil, spots, iterations=plan.iterations,
                            compression=2**-4, seed=seed)
            u_cs.append(hs.quality_report(pupil, h, spots).uniformity)
            h, _ = hs.wgs(pupil, spots, iterations=3, seed=seed)
            u_wgs.append(hs.quality_report(pupil, h, spots).uniformity)
        assert np.mean(u_cs) >= np.mean(u_wgs)


class TestBudgetController:
    def test_wgs_single_iteration_budget(self):
        plan = hs.budget_controller("wgs", 1600, 100, 1600 * 100)
        assert plan.iterations == 1 and not plan.over_budget

    def test_wgs_five_iteration_budget(self):
        plan = hs.budget_controller("wgs", 1600, 36, 5 * 1600 * 36)
        assert plan.iterations == 5 and not plan.over_budget
        assert plan.predicted_ops == 5 * 1600 * 36

    def test_cswgs_budget_inversion(self):
        m, n = 1600, 36
        budget = 2 * m * n + 8 * (m // 16) * n
        plan = hs.budget_controller("cswgs", m, n, budget, compression=1 / 16)
        assert plan.iterations == 10 and not plan.over_budget
        assert plan.predicted_ops == budget

    def test_minimums_flag_over_budget(self):
        assert hs.budget_controller("wgs", 1000, 10, 1).over_budget
        assert hs.budget_controller("wgs", 1000, 10, 1).iterations == 1
        plan = hs.budget_controller("cswgs", 1000, 10, 1000 * 10, compression=0.5)
        assert plan.iterations == 2 and plan.over_budget
        assert not hs.budget_controller("rs", 10, 1, 100).over_budget

    def test_predict_ops(self):
        assert hs.predict_ops("rs", 50, 3) == 150
        assert hs.predict_ops("wgs", 50, 3, 4) == 600
        assert hs.predict_ops("cswgs", 50, 3, 4, 0.1) == 300 + 5 * 3 * 2

    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            hs.budget_controller("wgs", 10, 1, 0)
        with pytest.raises(InvalidParameterError):
            hs.budget_controller("nope", 10, 1, 10)


class TestSolverConfig:
    def test_dispatch(self, pupil64, rng):
        spots = random_spots(rng, 3)
        for alg in ("rs", "wgs", "cswgs"):
            cfg = hs.SolverConfig(algorithm=alg, iterations=3, compression=0.5,
                                  seed=1)
            holo, trace = hs.solve(pupil64, spots, cfg)
            assert trace.algorithm == alg
            assert holo.phase.shape == (pupil64.active_count,)

    @pytest.mark.parametrize("kwargs", [
        dict(algorithm="x"), dict(algorithm="wgs", iterations=0),
        dict(algorithm="cswgs", iterations=1),
        dict(algorithm="cswgs", compression=0.0),
        dict(algorithm="cswgs", compression=1.5),
    ])
    def test_validation(self, kwargs):
        base = dict(algorithm="wgs", iterations=3, compression=0.5, seed=0)
        base.update(kwargs)
        with pytest.raises(InvalidParameterError):
            hs.SolverConfig(**base)


class TestDivergenceGuards:
    def test_overflowing_weights_raise(self):
        with pytest.raises(DegenerateFieldError, match="diverged"):
            hs.rebalance_weights(np.array([1e308, 1.0]), np.array([1e-30, 1.0]))

    def test_nan_hologram_rejected(self, pupil8):
        phase = np.zeros(pupil8.active_count)
        phase[0] = np.nan
        with pytest.raises(InvalidParameterError):
            hs.Hologram(phase, pupil8)
