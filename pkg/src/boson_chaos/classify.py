"""Classification of occupation states: crowding, mean energy, participation.

Every basis state gets a profile (crowding parameter C, phi-averaged energy
per particle, participation ratio in the eigenbasis).   With the disorder
term averaged out the mean energy is set by the interaction alone, so
E_k/N = U(C-1)/2 and the states cluster in vertical columns of constant C.
"""

from dataclasses import dataclass

import numpy as np

from .fock import BasisTable

NORMALIZATION_TOL = 1e-10


def crowding(occupations) -> float:
    """C = (1/N) sum_i n_i^2; 1 for one particle per site, N for a single pile."""
    occ = np.asarray(occupations, dtype=float)
    n = occ.sum()
    if n <= 0:
        raise ValueError("state holds no particles")
    return float(np.sum(occ * occ) / n)


def eigenbasis_weights(eigenvectors: np.ndarray, basis_rank: int) -> np.ndarray:
    """|c_m|^2 of a basis state over the eigenbasis (row of the eigenvector
    matrix, squared).  Raises if the weights do not sum to 1, which signals
    a broken eigenbasis rather than a caller error."""
    w = eigenvectors[basis_rank, :] ** 2
    if abs(w.sum() - 1.0) > NORMALIZATION_TOL:
        raise RuntimeError(
            f"eigenbasis weights for state {basis_rank} sum to {w.sum():.12f}; "
            "eigenvector matrix is not orthonormal"
        )
    return w


def participation_ratio(weights) -> float:
    """PR = 1 / sum_m w_m^2: effective number of participating eigenstates."""
    w = np.asarray(weights, dtype=float)
    if abs(w.sum() - 1.0) > NORMALIZATION_TOL:
        raise RuntimeError(f"weights sum to {w.sum():.12f}, expected 1")
    return float(1.0 / np.sum(w * w))


@dataclass(frozen=True)
class StateProfiles:
    """Per-basis-state classification, averaged over disorder realizations.

    `pr` is the mean of per-realization participation ratios; `ipr` is the
    mean of per-realization inverse participation ratios (the quantity the
    survival probability relaxes to), kept separately since the two
    averaging orders differ.
    """

    table: BasisTable
    crowding: np.ndarray              # (dim,)
    energy_per_particle: np.ndarray   # (dim,) phi-averaged E_k / N
    pr: np.ndarray                    # (dim,)
    ipr: np.ndarray                   # (dim,)
    realizations: int

    @property
    def dim(self) -> int:
        return self.table.dim


def classify_all(table: BasisTable, diagonals, eigenvector_sets) -> StateProfiles:
    """Profile every basis state over an ensemble of realizations.

    `diagonals` are the per-realization <k|H|k> vectors; `eigenvector_sets`
    the matching eigenvector matrices.
    """
    diagonals = list(diagonals)
    eigenvector_sets = list(eigenvector_sets)
    if not diagonals or len(diagonals) != len(eigenvector_sets):
        raise ValueError("need matching, nonempty diagonal and eigenvector lists")

    states = table.states.astype(float)
    c = np.sum(states * states, axis=1) / table.n_particles

    energy = np.mean(np.stack(diagonals), axis=0) / table.n_particles

    ipr_runs = []
    for vecs in eigenvector_sets:
        w = vecs**2
        row_sums = w.sum(axis=1)
        if np.abs(row_sums - 1.0).max() > NORMALIZATION_TOL:
            raise RuntimeError("eigenvector matrix rows are not normalized")
        ipr_runs.append(np.sum(w * w, axis=1))
    ipr_stack = np.stack(ipr_runs)

    return StateProfiles(
        table=table,
        crowding=c,
        energy_per_particle=energy,
        pr=np.mean(1.0 / ipr_stack, axis=0),
        ipr=np.mean(ipr_stack, axis=0),
        realizations=len(diagonals),
    )


def select_extremes(profiles: StateProfiles, c_lo: float, c_hi: float,
                    k: int) -> tuple[list[int], list[int]]:
    """Top-k and bottom-k basis ranks by PR among states with C in [c_lo, c_hi).

    Ties are broken by ascending basis rank so the selection is
    deterministic.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    sel = np.nonzero((profiles.crowding >= c_lo) & (profiles.crowding < c_hi))[0]
    if sel.size == 0:
        raise ValueError(f"no states with crowding in [{c_lo}, {c_hi})")
    if sel.size < 2 * k:
        raise ValueError(
            f"only {sel.size} states in crowding range, need {2 * k} for k={k}"
        )
    pr = profiles.pr[sel]
    bottom = sel[np.lexsort((sel, pr))][:k]
    top = sel[np.lexsort((sel, -pr))][:k]
    return [int(i) for i in top], [int(i) for i in bottom]


def pr_quantile_states(profiles: StateProfiles, c_value: float, k: int,
                       c_tol: float = 1e-9) -> list[int]:
    """Basis ranks of k states at evenly spaced PR levels within one C cluster.

    The lowest- and highest-PR states are always included; the rest sit at
    evenly spaced positions of the PR-sorted cluster.
    """
    if k < 2:
        raise ValueError("need at least 2 states for a PR sweep")
    sel = np.nonzero(np.abs(profiles.crowding - c_value) <= c_tol)[0]
    if sel.size < 4:
        raise ValueError(
            f"crowding value {c_value} realized by only {sel.size} states (< 4)"
        )
    if sel.size < k:
        raise ValueError(f"cluster holds {sel.size} states, fewer than k={k}")
    order = sel[np.lexsort((sel, profiles.pr[sel]))]
    positions = np.round(np.linspace(0, order.size - 1, k)).astype(int)
    return [int(order[p]) for p in positions]
