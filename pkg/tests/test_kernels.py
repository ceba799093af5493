import math

import numpy as np
import pytest

import holospots as hs
from holospots.errors import GeometryMismatchError, InvalidParameterError
from holospots.kernels import effective_workers, reduce_complex

from .conftest import random_spots
from . import oracles


def _wrap_diff(a, b):
    return np.abs(np.mod(a - b + math.pi, 2 * math.pi) - math.pi)


class TestReduceComplex:
    def test_singleton(self):
        assert reduce_complex([1 + 0j]) == 1 + 0j

    def test_small_exact(self):
        assert reduce_complex([1, 2, 3, 4], chunk=2) == 10 + 0j

    def test_empty_is_zero(self):
        assert reduce_complex([], chunk=4) == 0j

    @pytest.mark.parametrize("n,chunk", [(10, 4), (16, 4), (17, 4), (64, 8),
                                         (1000, 16), (1025, 32), (5000, 7)])
    def test_matches_scalar_tree_bitwise(self, rng, n, chunk):
        vals = rng.normal(size=n) + 1j * rng.normal(size=n)
        got = reduce_complex(vals, chunk=chunk)
        want = oracles.tree_reduce_oracle(vals, chunk)
        assert got == want  # identical op order, identical bits

    def test_million_phasors_stable(self, rng):
        # same values, repeated reductions: bit-identical every time
        phi = rng.uniform(0, 2 * math.pi, 1_000_000)
        vals = np.exp(1j * phi)
        first = reduce_complex(vals)
        assert all(reduce_complex(vals) == first for _ in range(3))

    def test_chunk_validation(self):
        with pytest.raises(InvalidParameterError):
            reduce_complex([1 + 0j], chunk=0)


class TestSuperpose:
    def test_single_spot_constant_offset(self, pupil8):
        spots = hs.SpotSet.from_points([[0.0, 0.0, 0.0]])
        coeffs = hs.SpotCoefficients([1.0], [0.3])
        frag = hs.superpose(pupil8, spots, coeffs)
        assert np.all(np.abs(frag - 0.3) < 1e-12)

    def test_zero_sum_phase_convention(self, pupil8):
        spots = hs.SpotSet.from_points([[1e-5, 0, 0], [0, 1e-5, 0]])
        coeffs = hs.SpotCoefficients([0.0, 0.0], [0.1, 2.0])
        frag = hs.superpose(pupil8, spots, coeffs)
        assert np.all(frag == 0.0)

    def test_matches_oracle_small(self, rng):
        pupil = hs.build_pupil(4, illumination="uniform", seed=9)
        spots = random_spots(rng, 2)
        coeffs = hs.SpotCoefficients(rng.uniform(0.1, 2, 2), rng.uniform(-9, 9, 2))
        got = hs.superpose(pupil, spots, coeffs)
        want = oracles.superpose_oracle(pupil, spots, coeffs.amplitude, coeffs.theta)
        assert np.max(_wrap_diff(got, want)) < 1e-12

    def test_theta_two_pi_invariance_bitwise(self, pupil16g, rng):
        spots = random_spots(rng, 3)
        # dyadic offsets keep theta + 2*pi exactly representable
        theta = np.round(rng.uniform(0, 6.2, 3) * 2**20) / 2**20
        amp = rng.uniform(0.3, 1.5, 3)
        a = hs.superpose(pupil16g, spots, hs.SpotCoefficients(amp, theta))
        b = hs.superpose(pupil16g, spots,
                         hs.SpotCoefficients(amp, theta + 2.0 * math.pi))
        assert np.array_equal(a, b)

    def test_output_stays_wrapped(self, pupil16g, rng):
        spots = random_spots(rng, 4)
        coeffs = hs.SpotCoefficients(rng.uniform(0, 2, 4), rng.uniform(-50, 50, 4))
        frag = hs.superpose(pupil16g, spots, coeffs)
        assert frag.min() >= -math.pi and frag.max() < math.pi

    def test_range_fragment(self, pupil16g, rng):
        spots = random_spots(rng, 2)
        coeffs = hs.SpotCoefficients(np.ones(2), np.zeros(2))
        full = hs.superpose(pupil16g, spots, coeffs)
        part = hs.superpose(pupil16g, spots, coeffs, pixel_range=(10, 25))
        assert np.array_equal(part, full[10:25])

    def test_coefficient_validation(self, pupil8, rng):
        spots = random_spots(rng, 2)
        with pytest.raises(InvalidParameterError):
            hs.SpotCoefficients([-1.0, 1.0], [0.0, 0.0])
        with pytest.raises(InvalidParameterError):
            hs.superpose(pupil8, spots, hs.SpotCoefficients([1.0], [0.0]))
        with pytest.raises(InvalidParameterError):
            hs.superpose(pupil8, spots, hs.SpotCoefficients(np.ones(2), np.zeros(2)),
                         pixel_range=(0, pupil8.active_count + 1))


class TestForwardProject:
    def test_conjugate_spot_sums_all_power(self, pupil64):
        spot = (2e-5, -1e-5, 5e-5)
        spots = hs.SpotSet.from_points([spot])
        phase = hs.wrap_phase(hs.spot_phase(pupil64, spot, (pupil64.xs, pupil64.ys)))
        holo = hs.Hologram(phase, pupil64)
        field = hs.forward_project(pupil64, holo, spots)[0]
        m = pupil64.active_count
        assert abs(field - m) <= 1e-9 * m

    def test_origin_spot_is_plain_sum(self, pupil16g, rng):
        phase = hs.wrap_phase(rng.uniform(-3, 3, pupil16g.active_count))
        holo = hs.Hologram(phase, pupil16g)
        spots = hs.SpotSet.from_points([[0.0, 0.0, 0.0]])
        got = hs.forward_project(pupil16g, holo, spots)[0]
        want = np.sum(pupil16g.amplitude * np.exp(-1j * phase))
        assert abs(got - want) <= 1e-12 * abs(want)

    def test_matches_oracle(self, pupil8, rng):
        spots = random_spots(rng, 3)
        phase = hs.wrap_phase(rng.uniform(-3, 3, pupil8.active_count))
        holo = hs.Hologram(phase, pupil8)
        got = hs.forward_project(pupil8, holo, spots)
        want = oracles.forward_oracle(pupil8, phase, spots)
        assert np.all(np.abs(got - want) <= 1e-12 * np.abs(want))

    def test_empty_range_is_zero(self, pupil8, rng):
        spots = random_spots(rng, 2)
        holo = hs.Hologram(np.zeros(pupil8.active_count), pupil8)
        assert np.all(hs.forward_project(pupil8, holo, spots, (3, 3)) == 0)

    def test_geometry_mismatch(self, pupil8, pupil16g, rng):
        spots = random_spots(rng, 1)
        holo = hs.Hologram(np.zeros(pupil8.active_count), pupil8)
        with pytest.raises(GeometryMismatchError):
            hs.forward_project(pupil16g, holo, spots)

    def test_additive_over_aligned_split_bitwise(self, pupil64, rng):
        # a split on the chunk boundary of a two-chunk range reproduces
        # the full reduction exactly
        spots = random_spots(rng, 2)
        phase = hs.wrap_phase(rng.uniform(-3, 3, pupil64.active_count))
        holo = hs.Hologram(phase, pupil64)
        m = pupil64.active_count
        chunk = m // 2 + (m % 2)
        full = hs.forward_project(pupil64, holo, spots, (0, m), chunk=chunk)
        left = hs.forward_project(pupil64, holo, spots, (0, chunk), chunk=chunk)
        right = hs.forward_project(pupil64, holo, spots, (chunk, m), chunk=chunk)
        for k in range(spots.count):
            assert reduce_complex([left[k], right[k]], chunk=chunk) == full[k]

    def test_additive_over_any_split(self, pupil64, rng):
        spots = random_spots(rng, 3)
        phase = hs.wrap_phase(rng.uniform(-3, 3, pupil64.active_count))
        holo = hs.Hologram(phase, pupil64)
        m = pupil64.active_count
        cut = int(rng.integers(1, m - 1))
        full = hs.forward_project(pupil64, holo, spots)
        parts = (hs.forward_project(pupil64, holo, spots, (0, cut))
                 + hs.forward_project(pupil64, holo, spots, (cut, m)))
        assert np.all(np.abs(full - parts) <= 1e-12 * np.abs(full))

    def test_compressed_prefix_c1_bitwise(self, pupil64, rng):
        spots = random_spots(rng, 2)
        phase = hs.wrap_phase(rng.uniform(-3, 3, pupil64.active_count))
        holo = hs.Hologram(phase, pupil64)
        a = hs.forward_project(pupil64, holo, spots, (0, pupil64.active_count))
        b = hs.forward_project(pupil64, holo, spots, None)
        assert np.array_equal(a, b)


class TestWorkerDeterminism:
    def test_worker_pool_cap(self):
        assert effective_workers(4) == 4
        with pytest.raises(InvalidParameterError):
            effective_workers(0)

    def test_million_pixel_projection_worker_invariant(self, rng):
        # full-panel pupil: one spot, ~1e6 phasors through the tree
        pupil = hs.build_pupil(1152, seed=0)
        spots = hs.SpotSet.from_points([[1e-5, -2e-5, 0.0]])
        phase = hs.wrap_phase(rng.uniform(-3, 3, pupil.active_count))
        holo = hs.Hologram(phase, pupil)
        results = [hs.forward_project(pupil, holo, spots, workers=w)
                   for w in (1, 2, 8)]
        assert np.array_equal(results[0], results[1])
        assert np.array_equal(results[0], results[2])

    def test_superpose_worker_invariant(self, pupil64, rng):
        spots = random_spots(rng, 5)
        coeffs = hs.SpotCoefficients(rng.uniform(0, 2, 5), rng.uniform(-4, 4, 5))
        frags = [hs.superpose(pupil64, spots, coeffs, workers=w) for w in (1, 4)]
        assert np.array_equal(frags[0], frags[1])
