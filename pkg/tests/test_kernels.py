"""Oscillatory kernel construction, application, and spectral decay.

The spectral values are cross-checked against two independent oracles:
adaptive quadrature of the oscillatory integral, and (for the quadratic
phase) the Fresnel-integral closed form.
"""

import numpy as np
import pytest
from scipy.special import fresnel

from oscillab.errors import GridMismatch, UnderResolved, ValidationFailed
from oscillab.kernels import (Cutoff, Kernel, admissible_step, apply_T,
                              build_kernel, check_decay, kernel_spectrum,
                              kernel_spectrum_quadrature)
from oscillab.numerics import (Grid, SampledFunction, forward_transform,
                               inverse_transform, lp_norm)
from oscillab.phases import Phase, finite_type_spec


def cubic_setup(lam=128.0, half_width=2.0, u=0.5):
    ph = Phase.monomial(3)
    spec = finite_type_spec(ph, 0.0, 3, epsilon=1.0, support_halfwidth=u)
    grid = Grid.from_step(0.0, half_width, admissible_step(ph, spec, lam) * 0.999)
    return ph, spec, build_kernel(ph, spec, lam, grid)


def band_limited(grid, seed, hi):
    rng = np.random.default_rng(seed)
    fg = grid.freq_grid()
    vals = np.zeros(grid.n, dtype=np.complex128)
    sel = np.abs(fg.xs) <= hi
    vals[sel] = rng.normal(size=int(sel.sum())) + 1j * rng.normal(size=int(sel.sum()))
    from oscillab.numerics import SpectralFunction

    return inverse_transform(SpectralFunction(fg, vals, grid))


class TestBuildKernel:
    def test_value_at_origin_is_cutoff(self):
        _, _, K = cubic_setup()
        mid = K.grid.n // 2
        assert K.samples.values[mid] == pytest.approx(K.cutoff(0.0))

    def test_unimodularity(self):
        _, _, K = cubic_setup()
        psi = K.cutoff.samples(K.grid)
        assert np.max(np.abs(np.abs(K.samples.values) - psi)) <= 1e-12

    def test_mass_of_modulus_equals_cutoff_mass(self):
        _, _, K = cubic_setup(lam=256.0)
        g = K.grid
        assert abs(g.h * np.sum(np.abs(K.samples.values))
                   - g.h * np.sum(K.cutoff.samples(g))) <= 1e-12

    def test_under_resolved(self):
        ph = Phase.monomial(3)
        spec = finite_type_spec(ph, 0.0, 3, epsilon=1.0, support_halfwidth=0.5)
        with pytest.raises(UnderResolved) as exc:
            build_kernel(ph, spec, 4096.0, Grid(0.0, 2.0, 256))
        assert exc.value.min_step <= np.pi / (4 * 4096.0 * 0.75)

    def test_degenerate_phase_rejected(self):
        # a phase failing the finite-type gate cannot produce a kernel
        ph = Phase.monomial(3)
        spec = finite_type_spec(ph, 0.0, 2, epsilon=0.5, support_halfwidth=0.25)
        with pytest.raises(ValidationFailed):
            build_kernel(ph, spec, 16.0, Grid(0.0, 2.0, 4096))

    def test_lambda_below_one_rejected(self):
        ph = Phase.monomial(3)
        spec = finite_type_spec(ph, 0.0, 3, epsilon=1.0, support_halfwidth=0.5)
        with pytest.raises(ValueError):
            build_kernel(ph, spec, 0.5, Grid(0.0, 2.0, 4096))

    def test_cutoff_even_and_compact(self):
        c = Cutoff(0.0, 0.5)
        xs = np.linspace(-1, 1, 401)
        vals = c(xs)
        np.testing.assert_allclose(vals, vals[::-1], atol=0)
        assert np.all(vals[np.abs(xs) >= 0.5] == 0.0)
        assert np.all(vals >= 0.0)


class TestApplyT:
    def test_zero_input(self):
        _, _, K = cubic_setup()
        out = apply_T(K, SampledFunction(K.grid, np.zeros(K.grid.n)))
        assert np.all(out.values == 0)

    def test_impulse_gives_translated_kernel(self):
        _, _, K = cubic_setup()
        g = K.grid
        j = g.index_of(0.75)
        imp = np.zeros(g.n, dtype=complex)
        imp[j] = 1.0 / g.h
        out = apply_T(K, SampledFunction(g, imp))
        expected = np.roll(K.samples.values, j - g.n // 2)
        assert np.max(np.abs(out.values - expected)) <= 1e-10

    def test_fft_and_quadrature_modes_agree(self):
        _, _, K = cubic_setup(lam=64.0)
        f = band_limited(K.grid, 11, hi=10.0)
        a = apply_T(K, f, mode="fft")
        b = apply_T(K, f, mode="quadrature")
        scale = np.sqrt(K.grid.h * np.sum(np.abs(b.values) ** 2))
        err = np.sqrt(K.grid.h * np.sum(np.abs(a.values - b.values) ** 2))
        assert err <= 1e-8 * scale

    def test_grid_mismatch(self):
        _, _, K = cubic_setup()
        other = Grid(0.0, K.grid.half_width, K.grid.n * 2)
        with pytest.raises(GridMismatch):
            apply_T(K, SampledFunction(other, np.zeros(other.n)))

    def test_young_inequality(self):
        _, _, K = cubic_setup(lam=64.0)
        f = band_limited(K.grid, 5, hi=20.0)
        lhs = lp_norm(apply_T(K, f), 2)
        rhs = lp_norm(K.samples, 1) * lp_norm(f, 2)
        assert lhs <= rhs + 1e-10

    def test_modulation_covariance(self):
        # adding an affine part to the phase only modulates in and out
        lam = 64.0
        base = Phase.monomial(3)
        a, b = 0.4, 0.3
        mod = Phase.from_derivatives([
            lambda x: x**3 + a + b * x,
            lambda x: 3 * x**2 + b,
            lambda x: 6 * np.asarray(x, dtype=float),
            lambda x: np.full_like(np.asarray(x, dtype=float), 6.0),
            lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        ])
        spec0 = finite_type_spec(base, 0.0, 3, epsilon=1.0, support_halfwidth=0.5)
        spec1 = finite_type_spec(mod, 0.0, 3, epsilon=1.0, support_halfwidth=0.5)
        step = min(admissible_step(base, spec0, lam), admissible_step(mod, spec1, lam))
        grid = Grid.from_step(0.0, 2.0, step * 0.999)
        K0 = build_kernel(base, spec0, lam, grid)
        K1 = build_kernel(mod, spec1, lam, grid)
        f = band_limited(grid, 9, hi=8.0)
        f_demod = SampledFunction(grid, f.values * np.exp(-1j * lam * b * grid.xs))
        for p in (2.0, 3.0):
            n1 = lp_norm(apply_T(K1, f), p)
            n0 = lp_norm(apply_T(K0, f_demod), p)
            assert abs(n1 - n0) <= 1e-10 * max(n0, 1.0)


class TestSpectrum:
    def test_spot_check_against_quadrature(self):
        _, _, K = cubic_setup(lam=128.0, half_width=1.0)
        sf = kernel_spectrum(K)
        xs = sf.freq_grid.xs
        lam13 = 128.0 ** (1 / 3)
        picks = np.unique(np.concatenate([
            np.linspace(-lam13, lam13, 12),
            np.linspace(lam13, 100.0, 12),
            np.linspace(-100.0, -lam13, 8)]))
        idx = np.unique([int(np.argmin(np.abs(xs - p))) for p in picks])[:32]
        oracle = kernel_spectrum_quadrature(K, xs[idx])
        err = np.max(np.abs(sf.values[idx] - oracle)) / np.max(np.abs(oracle))
        assert err <= 1e-6

    def test_zero_frequency_is_plain_integral(self):
        _, _, K = cubic_setup(lam=64.0)
        sf = kernel_spectrum(K)
        mid = K.grid.n // 2
        oracle = kernel_spectrum_quadrature(K, [0.0])[0]
        assert abs(sf.values[mid] - oracle) <= 1e-8

    def test_without_oscillation_spectrum_is_cutoff_transform(self):
        ph, spec, K = cubic_setup(lam=64.0)
        flat = Kernel(ph, spec, K.lam, K.cutoff,
                      SampledFunction(K.grid, K.cutoff.samples(K.grid)))
        sf = kernel_spectrum(flat)
        direct = forward_transform(flat.samples)
        assert np.max(np.abs(sf.values - direct.values)) == 0.0

    def test_hermitian_kernel_symmetry(self):
        # odd phase + even cutoff make K(-x) = conj(K(x)); the transform of
        # such a kernel is real-valued, which is the conjugation symmetry
        # K^(xi) = conj(K^(xi)) on the grid
        _, _, K = cubic_setup(lam=64.0)
        kv = K.samples.values[1:]
        assert np.max(np.abs(kv - np.conj(kv[::-1]))) == 0.0
        sf = kernel_spectrum(K)
        scale = np.max(np.abs(sf.values))
        assert np.max(np.abs(sf.values.imag)) <= 1e-12 * scale

    def test_translation_phase_factor(self):
        lam, a = 64.0, 0.5
        ph = Phase.monomial(3)
        spec = finite_type_spec(ph, 0.0, 3, epsilon=1.0, support_halfwidth=0.5)
        grid = Grid.from_step(0.0, 2.0, admissible_step(ph, spec, lam) * 0.999)
        a = grid.h * round(a / grid.h)  # keep the shift on the grid
        K = build_kernel(ph, spec, lam, grid)
        shifted_phase = ph.translated(a)
        shifted_spec = finite_type_spec(shifted_phase, a, 3, epsilon=1.0,
                                        support_halfwidth=0.5)
        Ka = build_kernel(shifted_phase, shifted_spec, lam, grid)
        sf, sfa = kernel_spectrum(K), kernel_spectrum(Ka)
        xs = sf.freq_grid.xs
        expected = sf.values * np.exp(-1j * xs * a)
        assert np.max(np.abs(sfa.values - expected)) <= 1e-9 * np.max(np.abs(sf.values))


class TestFresnelOracle:
    def test_quadratic_phase_integral_closed_form(self):
        # secondary oracle: integral of exp(i lam x^2) over [0, b] via
        # Fresnel functions, against dense trapezoid summation
        lam, b = 200.0, 0.5
        z = b * np.sqrt(2 * lam / np.pi)
        S, C = fresnel(z)
        closed = np.sqrt(np.pi / (2 * lam)) * (C + 1j * S)
        xs = np.linspace(0.0, b, 200001)
        trap = np.trapezoid(np.exp(1j * lam * xs**2), xs)
        assert abs(trap - closed) <= 1e-8


class TestDecay:
    @pytest.mark.parametrize("ell", [2, 3])
    def test_normalized_sup_stable(self, ell):
        ph = Phase.monomial(ell)
        spec = finite_type_spec(ph, 0.0, ell, epsilon=1.0, support_halfwidth=0.5)
        sups, tails, fars = [], [], []
        for e in range(6, 11):
            lam = float(2**e)
            grid = Grid.from_step(0.0, 1.0, admissible_step(ph, spec, lam) * 0.999)
            rep = check_decay(build_kernel(ph, spec, lam, grid), N=4)
            sups.append(rep.sup_low * lam ** (1.0 / ell))
            tails.append(rep.tail_max)
            fars.append(rep.far_field)
        assert max(sups) / min(sups) < 3.0
        assert all(t <= 1.25 * tails[0] for t in tails)
        assert all(np.isfinite(f) for f in fars)

    def test_report_csv_columns(self, tmp_path):
        from oscillab.kernels import decay_reports_csv

        ph = Phase.monomial(2)
        spec = finite_type_spec(ph, 0.0, 2, epsilon=1.0, support_halfwidth=0.5)
        lam = 64.0
        grid = Grid.from_step(0.0, 1.0, admissible_step(ph, spec, lam) * 0.999)
        rep = check_decay(build_kernel(ph, spec, lam, grid))
        path = str(tmp_path / "decay.csv")
        decay_reports_csv([rep], path)
        rows = open(path).read().strip().splitlines()
        assert rows[0] == "lambda,ell,sup_low,tail_max,far_field"
        vals = rows[1].split(",")
        assert float(vals[0]) == lam and int(vals[1]) == 2
        assert float(vals[2]) == rep.sup_low

    def test_under_resolved_far_field(self):
        ph = Phase.monomial(2)
        spec = finite_type_spec(ph, 0.0, 2, epsilon=1.0, support_halfwidth=0.5)
        lam = 64.0
        grid = Grid.from_step(0.0, 1.0, admissible_step(ph, spec, lam) * 0.999)
        K = build_kernel(ph, spec, lam, grid)
        coarse = Kernel(K.phase, K.spec, 4 * lam, K.cutoff, K.samples)
        with pytest.raises(UnderResolved):
            check_decay(coarse)
