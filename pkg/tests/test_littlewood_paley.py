import numpy as np
import pytest
from hypothesis import given, strategies as st

from varcmo.core import ConfigError, ExponentFunction, Grid, PreconditionError, RangeError
from varcmo.littlewood_paley import (almost_orthogonality_table, band_project, build_family, conv_scale,
                                     discrete_square_function, freeze, hl_maximal, maximal_square_function,
                                     square_function, vector_maximal_report)
from varcmo.signals import band_noise, make_rng

seeds = st.integers(0, 2 ** 32 - 1)


def dense_circular(f, k):
    n = len(f)
    return np.array([sum(k[(i - m) % n] * f[m] for m in range(n)) for i in range(n)]) / n


def brute_maximal(f):
    n = len(f)
    a = np.abs(f)
    out = np.zeros(n)
    for i in range(n):
        for r in range(0, n // 2 + 1):
            idx = [(i + d) % n for d in range(-r, r + 1)][: min(2 * r + 1, n)]
            out[i] = max(out[i], a[idx].mean())
    return out


def tone(g, m):
    return np.exp(2j * np.pi * m * g.points)


class TestBuildFamily:
    def test_shannon_tiles_exactly(self, g8):
        fam = build_family(g8, 1, 7, "shannon_sharp")
        a = np.abs(g8.frequencies)
        cov = (a >= 1) & (a <= 128)
        assert np.all(fam.tiling_sum()[cov] == 1.0)
        assert np.all(fam.tiling_sum()[~cov] == 0.0)

    def test_meyer_tiles(self, g8):
        fam = build_family(g8, 1, 7, "meyer_smooth")
        cov = fam.covered()
        assert np.max(np.abs(fam.tiling_sum()[cov] - 1)) <= 1e-12
        assert np.max(np.abs(fam.energy_sum()[cov] - 1)) <= 1e-12

    @pytest.mark.parametrize("kind", ["meyer_smooth", "shannon_sharp"])
    def test_zero_frequency_excluded(self, g8, kind):
        fam = build_family(g8, window_kind=kind)
        for j in fam.scales:
            assert fam.analysis_hat[j][0] == 0
            assert abs(fam.kernel(j).mean()) < 1e-12

    @pytest.mark.parametrize("kind", ["meyer_smooth", "shannon_sharp"])
    def test_annulus_support(self, g8, kind):
        fam = build_family(g8, window_kind=kind)
        a = np.abs(g8.frequencies)
        for j in fam.scales:
            outside = (a < 2 ** (j - 1)) | (a > 2 ** (j + 1))
            assert np.all(fam.analysis_hat[j][outside] == 0)

    def test_core_lower_bound_positive(self, meyer8, shannon8):
        assert meyer8.core_lower_bound() >= 0.7
        assert shannon8.core_lower_bound() == 1.0

    def test_default_shifts_are_alias_free(self, meyer8, shannon8):
        assert meyer8.shift == 2 and meyer8.alias_free()
        assert shannon8.shift == 1 and shannon8.alias_free()

    def test_sampled_top_band_stops_below_its_nyquist(self, g8):
        fam = build_family(g8, 1, 4, "meyer_smooth")
        a = np.abs(g8.frequencies)
        assert np.all(fam.covered() == ((a >= 1) & (a < 32)))

    def test_meyer_shift_one_aliases(self, g8):
        assert not build_family(g8, 1, 6, "meyer_smooth", shift=1).alias_free()

    def test_config_errors(self, g8):
        with pytest.raises(ConfigError):
            build_family(g8, window_kind="haar")
        with pytest.raises(ConfigError):
            build_family(g8, 0, 3)
        with pytest.raises(ConfigError):
            build_family(g8, 3, 8)

    def test_sampling_check(self, g8):
        fam = build_family(g8, 1, 7, "meyer_smooth", shift=2)
        with pytest.raises(RangeError):
            fam.check_sampling()
        with pytest.raises(RangeError):
            discrete_square_function(np.zeros(256), fam)


class TestConvolution:
    def test_tone_eigenfunction(self, meyer8, g8):
        f = tone(g8, 3)
        for j in meyer8.scales:
            np.testing.assert_allclose(conv_scale(f, meyer8, j), meyer8.synthesis_hat[j][3] * f, atol=1e-12)

    def test_constant_annihilated(self, meyer8):
        for j in meyer8.scales:
            assert np.max(np.abs(conv_scale(np.full(256, 2.5), meyer8, j))) < 1e-13

    def test_dense_oracle(self, g6):
        fam = build_family(g6, window_kind="meyer_smooth")
        f = make_rng(5).standard_normal(64)
        for j in fam.scales:
            np.testing.assert_allclose(conv_scale(f, fam, j), dense_circular(f, fam.kernel(j)).real, atol=1e-12)

    @given(seeds)
    def test_band_projection_reconstructs(self, seed):
        fam = build_family(Grid(7))
        f = band_noise(fam, make_rng(seed))
        total = sum(conv_scale(conv_scale(f, fam, j, "analysis"), fam, j) for j in fam.scales)
        assert np.linalg.norm(total - f) <= 1e-10 * np.linalg.norm(f)


class TestSquareFunctions:
    def test_constant_gives_zero(self, meyer8):
        c = np.full(256, 1.7)
        assert np.max(square_function(c, meyer8)) < 1e-12
        assert np.max(discrete_square_function(c, meyer8)) < 1e-12
        assert np.max(maximal_square_function(c, meyer8)) < 1e-12

    @given(seeds)
    def test_parseval(self, seed):
        fam = build_family(Grid(7))
        f = band_noise(fam, make_rng(seed))
        assert np.sqrt(np.mean(square_function(f, fam) ** 2)) == pytest.approx(np.sqrt(np.mean(f ** 2)), rel=1e-10)

    def test_single_tone(self, shannon8, g8):
        # frequency 3 sits in exactly one shannon band
        G = square_function(tone(g8, 3), shannon8)
        np.testing.assert_allclose(G, 1.0, atol=1e-12)

    def test_every_probe_equals_full_square_function(self, meyer8, noise8):
        np.testing.assert_allclose(discrete_square_function(noise8, meyer8, "every"),
                                   square_function(noise8, meyer8), atol=1e-14)

    @given(seeds, st.sampled_from(["left", "center", "inf"]))
    def test_maximal_dominates(self, seed, probe):
        fam = build_family(Grid(7))
        f = band_noise(fam, make_rng(seed))
        assert np.all(maximal_square_function(f, fam) >= discrete_square_function(f, fam, probe) - 1e-15)

    def test_maximal_brute_force(self, meyer6, g6):
        f = np.cos(2 * np.pi * 5 * g6.points)
        out = maximal_square_function(f, meyer6)
        expect = np.zeros(64)
        for j in meyer6.scales:
            v = np.abs(conv_scale(f, meyer6, j, "analysis")) ** 2
            step = 64 >> meyer6.level(j)
            expect += np.repeat([v[k:k + step].max() for k in range(0, 64, step)], step)
        np.testing.assert_allclose(out, np.sqrt(expect), atol=1e-12)

    def test_freeze_policies(self):
        v = np.array([3.0, 1.0, 2.0, 5.0])
        np.testing.assert_array_equal(freeze(v, 1, "left"), [3, 2])
        np.testing.assert_array_equal(freeze(v, 1, "center"), [1, 5])
        np.testing.assert_array_equal(freeze(v, 1, "sup"), [3, 5])
        np.testing.assert_array_equal(freeze(v, 1, "inf"), [1, 2])
        with pytest.raises(PreconditionError):
            freeze(v, 1, "median")


class TestMaximal:
    def test_constant(self):
        np.testing.assert_allclose(hl_maximal(np.full(16, -2.0)), 2.0)

    def test_half_indicator(self):
        f = (np.arange(64) < 32).astype(float)
        assert np.all(hl_maximal(f) >= 0.5)

    @given(seeds)
    def test_brute_force(self, seed):
        f = make_rng(seed).standard_normal(32)
        np.testing.assert_allclose(hl_maximal(f), brute_maximal(f), rtol=1e-12)

    def test_spike(self):
        f = np.zeros(32)
        f[5] = 32.0
        np.testing.assert_allclose(hl_maximal(f), brute_maximal(f), rtol=1e-12)

    def test_vector_constant(self, g6):
        rep = vector_maximal_report([np.full(64, 3.0)], ExponentFunction.sinusoid(g6, 1.5, 0.3), 2.0)
        assert rep.ratio == pytest.approx(1.0)

    def test_vector_zero_degenerate(self, g6):
        rep = vector_maximal_report([np.zeros(64)] * 3, ExponentFunction.constant(g6, 1.0), 2.0)
        assert rep.degenerate and rep.lhs == 0 and rep.rhs == 0

    def test_vector_noise_bounded(self, g8):
        p = ExponentFunction.constant(g8, 1.0)
        ratios = [vector_maximal_report([make_rng(t, i).standard_normal(256) for i in range(8)], p, 2.0).ratio
                  for t in range(10)]
        assert 1 <= min(ratios) and max(ratios) < 5


class TestAlmostOrthogonality:
    def test_shannon_far_scales_vanish(self, shannon8):
        t = almost_orthogonality_table(shannon8)
        s = np.array(t.scales)
        far = np.abs(s[:, None] - s[None, :]) >= 2
        assert np.all(t.constants[far] == 0)

    def test_meyer_finite_and_decaying(self, meyer8):
        t = almost_orthogonality_table(meyer8)
        assert np.all(np.isfinite(t.constants))
        diag = np.diag(t.constants)
        assert np.all(diag > 0)
        s = np.array(t.scales)
        assert np.all(t.constants[np.abs(s[:, None] - s[None, :]) >= 2] == 0)
        assert t.max_constant < 10
