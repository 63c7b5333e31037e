import numpy as np
import pytest

from boson_chaos.fock import build_basis
from boson_chaos.hamiltonian import ModelParams, assemble
from boson_chaos.spectral import (
    GOE_MEAN_RATIO,
    POISSON_MEAN_RATIO,
    diagonalize,
    dos_histogram,
    mean_ratio_trimmed,
    pooled_mean_ratio,
    ratio_vs_energy,
    spacing_ratios,
    trim_levels,
)

from helpers import goe_spectra, poisson_spectrum


def test_two_boson_eigenvalues():
    table = build_basis(2, 2)
    ham = assemble(ModelParams(2, 2, j=0.5, u=4.0, w=0.0), table)
    decomp = diagonalize(ham)
    expected = np.array([2 - np.sqrt(5), 4.0, 2 + np.sqrt(5)])
    assert np.abs(decomp.eigenvalues - expected).max() <= 1e-12


def test_decomposition_invariants():
    table = build_basis(3, 3)
    ham = assemble(ModelParams.for_system(3, 3, w=0.6, phi=0.4), table)
    decomp = diagonalize(ham, check=True)  # residual + orthonormality bounds
    assert np.all(np.diff(decomp.eigenvalues) >= 0)


def test_trace_identity():
    table = build_basis(4, 4)
    ham = assemble(ModelParams.for_system(4, 4, w=1.1, phi=2.0), table)
    decomp = diagonalize(ham, compute_vectors=False)
    assert decomp.eigenvalues.sum() == pytest.approx(ham.trace(), rel=1e-9)


def test_diagonal_hamiltonian_spectrum():
    table = build_basis(3, 3)
    ham = assemble(ModelParams(3, 3, j=0.0, u=2.0, w=0.0), table)
    decomp = diagonalize(ham)
    assert np.abs(decomp.eigenvalues - np.sort(ham.diag)).max() <= 1e-12


def test_spacing_ratio_values():
    series = spacing_ratios([0.0, 1.0, 3.0, 4.0])
    assert np.allclose(series.ratios, [0.5, 0.5])
    assert np.array_equal(series.energies, [1.0, 3.0])

    equal = spacing_ratios(np.arange(50.0))
    assert np.all(equal.ratios == 1.0)
    assert equal.degenerate_pairs == 0


def test_spacing_ratio_degeneracies():
    series = spacing_ratios([0.0, 1.0, 1.0, 1.0, 2.0])
    # middle pair has both spacings zero -> ratio 0, counted
    assert series.degenerate_pairs == 1
    assert np.all(series.ratios >= 0) and np.all(series.ratios <= 1)


def test_spacing_ratio_needs_three_levels():
    with pytest.raises(ValueError):
        spacing_ratios([0.0, 1.0])


def test_affine_invariance():
    rng = np.random.default_rng(11)
    e = np.sort(rng.standard_normal(200))
    base = spacing_ratios(e).ratios
    doubled = spacing_ratios(2.0 * e).ratios
    assert np.array_equal(base, doubled)  # exact: spacings scale exactly by 2
    shifted = spacing_ratios(7.3 * e + 11.1).ratios
    assert np.abs(base - shifted).max() <= 1e-12


def test_goe_surrogate_mean_ratio():
    # small GOE blocks, one ratio each: the mean sits at the GOE value
    rng = np.random.default_rng(42)
    ratios = np.concatenate([spacing_ratios(e).ratios
                             for e in goe_spectra(rng, 3, 5000)])
    assert abs(ratios.mean() - GOE_MEAN_RATIO) <= 0.02


def test_poisson_surrogate_mean_ratio():
    rng = np.random.default_rng(43)
    series = spacing_ratios(poisson_spectrum(rng, 20001))
    assert abs(series.ratios.mean() - POISSON_MEAN_RATIO) <= 0.02


def test_trim_behaviour():
    e = np.arange(100.0)
    assert trim_levels(e, 0.10).size == 80
    with pytest.raises(ValueError):
        trim_levels(e, 0.5)
    with pytest.raises(ValueError):
        mean_ratio_trimmed(np.arange(4.0), trim=0.4)  # too few levels left


def test_trim_discards_pathological_edges():
    # central 80% equally spaced (all ratios 1), wild edges; a 10% trim
    # must leave exactly the central block
    rng = np.random.default_rng(5)
    center = np.arange(80.0)
    low = -1000.0 + np.sort(rng.uniform(0, 1, 10))
    high = 1000.0 + np.sort(rng.uniform(0, 1, 10))
    spectrum = np.concatenate([low, center, high])
    assert mean_ratio_trimmed(spectrum, trim=0.10) == 1.0
    assert spacing_ratios(spectrum).ratios.mean() < 1.0


def test_pooled_mean_ratio_matches_concatenation():
    rng = np.random.default_rng(9)
    sets = [poisson_spectrum(rng, 400) for _ in range(5)]
    mean, stderr, count = pooled_mean_ratio(sets, 0.10)
    manual = np.concatenate([spacing_ratios(trim_levels(e, 0.10)).ratios for e in sets])
    assert mean == pytest.approx(manual.mean())
    assert count == manual.size
    assert stderr > 0


def test_ratio_vs_energy_flat_poisson_profile():
    rng = np.random.default_rng(17)
    sets = [poisson_spectrum(rng, 1200) for _ in range(10)]
    profile = ratio_vs_energy(sets, window=100, n_particles=1)
    assert profile.shape[0] == 12
    assert np.abs(profile[:, 1] - POISSON_MEAN_RATIO).max() <= 0.02
    assert np.all(profile[:, 2] >= 50)


def test_ratio_vs_energy_pool_guard():
    rng = np.random.default_rng(18)
    with pytest.raises(ValueError, match="pooled"):
        ratio_vs_energy([poisson_spectrum(rng, 90)], window=30, n_particles=1)


def test_dos_histogram_normalization():
    rng = np.random.default_rng(23)
    sets = [np.sort(rng.standard_normal(500)) for _ in range(4)]
    centers, density = dos_histogram(sets, n_particles=2, bins=40)
    width = centers[1] - centers[0]
    assert abs(density.sum() * width - 1.0) <= 1e-12
    pooled = np.concatenate(sets) / 2
    assert centers.min() >= pooled.min() and centers.max() <= pooled.max()
    with pytest.raises(ValueError):
        dos_histogram(sets, n_particles=2, bins=5)
