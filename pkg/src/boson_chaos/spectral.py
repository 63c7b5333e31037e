"""Full diagonalization and level-spacing-ratio chaos diagnostics.

The ratio of consecutive level spacings r_n = min(s_n, s_{n-1}) /
max(s_n, s_{n-1}) needs no unfolding; its mean is ~0.5307 for GOE spectra
and 2 ln 2 - 1 ~ 0.3863 for uncorrelated (Poisson) spectra.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .hamiltonian import SparseHamiltonian

GOE_MEAN_RATIO = 0.5307          # large-matrix GOE average
POISSON_MEAN_RATIO = 2 * np.log(2) - 1


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and eigenvector matrix of one realization.

    Column m of `eigenvectors` is the eigenstate |E_m> expressed in the
    occupation basis.  `eigenvectors` is None for eigenvalues-only solves.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None

    @property
    def dim(self) -> int:
        return self.eigenvalues.size


def diagonalize(ham: SparseHamiltonian, compute_vectors: bool = True,
                check: bool = False) -> SpectralDecomposition:
    """Dense full-spectrum solve of a symmetric Hamiltonian.

    Every analysis downstream (ratios across the spectrum, survival
    probability over all eigencomponents) needs the complete spectrum, so
    a dense solver is used throughout.  `check=True` verifies residuals
    and orthonormality (costs an extra dim^3).
    """
    h = ham.to_dense()
    try:
        if compute_vectors:
            vals, vecs = scipy.linalg.eigh(h, driver="evd")
        else:
            vals = scipy.linalg.eigh(h, eigvals_only=True)
            vecs = None
    except scipy.linalg.LinAlgError as err:
        raise RuntimeError(f"eigensolver failed to converge (dim={ham.dim})") from err
    decomp = SpectralDecomposition(eigenvalues=vals, eigenvectors=vecs)
    if check and vecs is not None:
        scale = max(np.abs(vals).max(), 1.0)
        resid = np.linalg.norm(h @ vecs - vecs * vals, axis=0)
        if resid.max() > 1e-10 * scale:
            raise RuntimeError(f"eigenpair residual {resid.max():.3e} exceeds bound")
        ortho = np.abs(vecs.T @ vecs - np.eye(ham.dim)).max()
        if ortho > 1e-10:
            raise RuntimeError(f"eigenvector orthonormality defect {ortho:.3e}")
    return decomp


@dataclass(frozen=True)
class RatioSeries:
    """Consecutive-spacing ratios with the interior energies they sit at."""

    ratios: np.ndarray
    energies: np.ndarray
    degenerate_pairs: int  # positions where both adjacent spacings vanished


def spacing_ratios(eigenvalues) -> RatioSeries:
    """r_n = min(s_n, s_{n-1}) / max(s_n, s_{n-1}) for ascending energies.

    An exactly degenerate pair of spacings (0/0) is counted as ratio 0 and
    reported in `degenerate_pairs`.
    """
    e = np.asarray(eigenvalues, dtype=float)
    if e.size < 3:
        raise ValueError("need at least 3 levels for spacing ratios")
    if np.any(np.diff(e) < 0):
        raise ValueError("eigenvalues must be ascending")
    s = np.diff(e)
    lo = np.minimum(s[:-1], s[1:])
    hi = np.maximum(s[:-1], s[1:])
    degenerate = hi == 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(degenerate, 0.0, lo / np.where(hi == 0.0, 1.0, hi))
    return RatioSeries(ratios=r, energies=e[1:-1], degenerate_pairs=int(degenerate.sum()))


def trim_levels(eigenvalues, trim: float) -> np.ndarray:
    """Central part of a sorted spectrum, dropping a fraction at each edge."""
    if not 0.0 <= trim < 0.5:
        raise ValueError(f"trim fraction {trim} outside [0, 0.5)")
    e = np.asarray(eigenvalues, dtype=float)
    cut = int(np.floor(e.size * trim))
    return e[cut:e.size - cut]


def mean_ratio_trimmed(eigenvalues, trim: float = 0.10) -> float:
    """Mean spacing ratio over the central (1 - 2*trim) of the spectrum."""
    central = trim_levels(eigenvalues, trim)
    if central.size < 3:
        raise ValueError(f"only {central.size} levels left after trim {trim}")
    return float(spacing_ratios(central).ratios.mean())


def pooled_mean_ratio(eigenvalue_sets, trim: float = 0.10) -> tuple[float, float, int]:
    """Ensemble mean ratio: pool trimmed ratios across realizations.

    Returns (mean, standard error, pooled ratio count).
    """
    pools = [spacing_ratios(trim_levels(e, trim)).ratios for e in eigenvalue_sets]
    r = np.concatenate(pools)
    stderr = float(r.std(ddof=1) / np.sqrt(r.size)) if r.size > 1 else 0.0
    return float(r.mean()), stderr, r.size


def ratio_vs_energy(eigenvalue_sets, window: int, n_particles: int,
                    min_pool: int = 50) -> np.ndarray:
    """Energy-resolved mean ratio from windows of consecutive levels.

    Each realization is split into windows of `window` consecutive levels
    (the trailing remainder joins the last window); ratios and energies
    are pooled by window index across realizations.  Returns an array of
    rows (mean energy per particle, mean ratio, pooled ratio count).
    """
    if window < 2:
        raise ValueError("window must span at least 2 levels")
    sets = [np.asarray(e, dtype=float) for e in eigenvalue_sets]
    dim = sets[0].size
    n_windows = max(dim // window, 1)
    pooled_r = [[] for _ in range(n_windows)]
    pooled_e = [[] for _ in range(n_windows)]
    for e in sets:
        if e.size != dim:
            raise ValueError("all realizations must have equal dimension")
        series = spacing_ratios(e)
        # ratio index i sits at level index i+1
        w = np.minimum((np.arange(series.ratios.size) + 1) // window, n_windows - 1)
        for i in range(n_windows):
            sel = w == i
            pooled_r[i].append(series.ratios[sel])
            pooled_e[i].append(series.energies[sel])
    out = np.empty((n_windows, 3))
    for i in range(n_windows):
        r = np.concatenate(pooled_r[i])
        e = np.concatenate(pooled_e[i])
        if r.size < min_pool:
            raise ValueError(
                f"window {i} pooled only {r.size} spacings (< {min_pool}); "
                "use a larger window or more realizations"
            )
        out[i] = (e.mean() / n_particles, r.mean(), r.size)
    return out


def dos_histogram(eigenvalue_sets, n_particles: int, bins: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Normalized density-of-states histogram over E/N pooled across realizations.

    Returns (bin centers, density); the density integrates to 1.
    """
    if bins < 10:
        raise ValueError("use at least 10 bins")
    pooled = np.concatenate([np.asarray(e, dtype=float) for e in eigenvalue_sets]) / n_particles
    density, edges = np.histogram(pooled, bins=bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return centers, density
