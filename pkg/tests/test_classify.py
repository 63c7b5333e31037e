import numpy as np
import pytest

from boson_chaos.classify import (
    StateProfiles,
    classify_all,
    crowding,
    eigenbasis_weights,
    participation_ratio,
    pr_quantile_states,
    select_extremes,
)
from boson_chaos.fock import build_basis
from boson_chaos.hamiltonian import ModelParams, assemble
from boson_chaos.spectral import diagonalize
from boson_chaos.ensemble import sample_phases


def test_crowding_values():
    assert crowding((1,) * 8) == 1.0
    assert crowding((8, 0, 0, 0, 0, 0, 0, 0)) == 8.0
    assert crowding((2, 2, 0, 0, 0, 0, 2, 2)) == 2.0
    assert crowding((0, 2, 0, 1, 2, 3, 0, 0)) == 2.25


def test_participation_ratio_limits():
    dim = 12
    # a basis state that IS an eigenstate participates in exactly one
    assert participation_ratio(np.eye(dim)[3]) == 1.0
    # uniform spread over M eigenstates participates in M
    m = 6
    w = np.zeros(dim)
    w[:m] = 1.0 / m
    assert participation_ratio(w) == pytest.approx(m, rel=1e-12)


def test_participation_phase_invariance():
    rng = np.random.default_rng(2)
    c = rng.standard_normal(40)
    c /= np.linalg.norm(c)
    assert participation_ratio(c**2) == participation_ratio((-c) ** 2)


def test_eigenbasis_weights_reject_broken_basis():
    bad = np.eye(5)
    bad[0, 0] = 0.9
    with pytest.raises(RuntimeError):
        eigenbasis_weights(bad, 0)
    with pytest.raises(RuntimeError):
        participation_ratio(np.full(4, 0.3))


@pytest.fixture(scope="module")
def small_profiles():
    table = build_basis(4, 4)
    phis = sample_phases(77, 8)
    diagonals, vec_sets = [], []
    for phi in phis:
        ham = assemble(ModelParams.for_system(4, 4, w=0.6, phi=float(phi)), table)
        decomp = diagonalize(ham)
        diagonals.append(ham.diag)
        vec_sets.append(decomp.eigenvectors)
    return table, classify_all(table, diagonals, vec_sets)


def test_unique_mott_state(small_profiles):
    table, profiles = small_profiles
    mott = np.nonzero(profiles.crowding == 1.0)[0]
    assert mott.size == 1
    assert table.state(int(mott[0])) == (1, 1, 1, 1)


def test_crowding_spectrum_complete(small_profiles):
    table, profiles = small_profiles
    expected = {sum(n * n for n in table.state(k)) / 4 for k in range(table.dim)}
    assert set(np.round(profiles.crowding, 12)) == set(np.round(sorted(expected), 12))
    assert profiles.crowding.min() == 1.0
    assert profiles.crowding.max() == 4.0


def test_energy_tracks_crowding(small_profiles):
    table, profiles = small_profiles
    u = ModelParams.for_system(4, 4, w=0.6).u
    # phi-averaged E/N follows U(C-1)/2; cluster means must be close and
    # strictly increasing with C
    values = {}
    for c in np.unique(profiles.crowding):
        sel = profiles.crowding == c
        values[c] = profiles.energy_per_particle[sel].mean()
        assert values[c] == pytest.approx(u * (c - 1) / 2, abs=0.08)
    ordered = [values[c] for c in sorted(values)]
    assert np.all(np.diff(ordered) > 0)


def test_profile_bounds(small_profiles):
    table, profiles = small_profiles
    assert np.all(profiles.pr >= 1.0)
    assert np.all(profiles.pr <= table.dim)
    assert np.all(profiles.ipr > 0.0)
    assert np.all(profiles.ipr <= 1.0)
    # mean of PR is at least 1/mean of IPR (Jensen)
    assert np.all(profiles.pr >= 1.0 / profiles.ipr - 1e-9)


def test_select_extremes_deterministic(small_profiles):
    _, profiles = small_profiles
    top, bottom = select_extremes(profiles, 1.0, 3.0, 3)
    top2, bottom2 = select_extremes(profiles, 1.0, 3.0, 3)
    assert top == top2 and bottom == bottom2
    assert len(top) == len(bottom) == 3
    assert min(profiles.pr[top]) >= max(profiles.pr[bottom])


def test_select_extremes_errors(small_profiles):
    _, profiles = small_profiles
    with pytest.raises(ValueError):
        select_extremes(profiles, 9.0, 10.0, 1)  # empty range
    with pytest.raises(ValueError):
        select_extremes(profiles, 1.0, 1.1, 5)  # only the Mott state in range


def test_select_extremes_tie_break_by_rank():
    table = build_basis(2, 2)
    profiles_equal = StateProfiles(
        table=table,
        crowding=np.array([2.0, 1.0, 2.0]),
        energy_per_particle=np.zeros(3),
        pr=np.array([2.0, 2.0, 2.0]),
        ipr=np.full(3, 0.5),
        realizations=1,
    )
    top, bottom = select_extremes(profiles_equal, 0.0, 5.0, 1)
    assert top == [0] and bottom == [0]  # equal PR resolved by lowest rank


def test_pr_quantile_selection(small_profiles):
    _, profiles = small_profiles
    c_values, counts = np.unique(profiles.crowding, return_counts=True)
    c = float(c_values[np.argmax(counts)])
    ranks = pr_quantile_states(profiles, c, 4)
    prs = profiles.pr[ranks]
    assert np.all(np.diff(prs) >= 0)
    sel = np.abs(profiles.crowding - c) <= 1e-9
    assert prs[0] == profiles.pr[sel].min()
    assert prs[-1] == profiles.pr[sel].max()
    with pytest.raises(ValueError):
        pr_quantile_states(profiles, 1.0, 4)  # the Mott cluster has one state
