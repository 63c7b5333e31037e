"""Assembly of the interacting Aubry-Andre Hamiltonian in the Fock basis.

H = -J sum_<i,j> b_i^dag b_j + (U/2) sum_i n_i (n_i - 1)
    + W sum_i cos(2 pi beta i + phi) n_i

on an open chain.  The quasiperiodic potential indexes sites 1..L inside
the cosine (a pure convention: shifting the base index only shifts phi).
"""

from dataclasses import dataclass
from math import pi, sqrt

import numpy as np
import scipy.sparse

from .fock import BasisTable, check_state

DEFAULT_BETA = 1.618
DEFAULT_HOPPING = 0.5


def default_interaction(n_particles: int) -> float:
    """U = 4/(N-1), the scaling that keeps all Hamiltonian terms comparable."""
    if n_particles < 2:
        raise ValueError("default interaction needs at least 2 particles")
    return 4.0 / (n_particles - 1)


@dataclass(frozen=True)
class ModelParams:
    """Couplings and geometry of one disorder realization."""

    n_particles: int
    n_sites: int
    j: float = DEFAULT_HOPPING  # hopping rate
    u: float = 0.0              # on-site interaction
    w: float = 0.0              # disorder amplitude
    beta: float = DEFAULT_BETA  # incommensuration parameter
    phi: float = 0.0            # disorder phase
    boundary: str = "open"

    def __post_init__(self):
        if self.n_particles < 1 or self.n_sites < 1:
            raise ValueError("n_particles and n_sites must be >= 1")
        if self.j < 0 or self.w < 0:
            raise ValueError("j and w must be non-negative")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if not 0.0 <= self.phi < 2 * pi:
            raise ValueError(f"phi={self.phi} outside [0, 2*pi)")
        if self.boundary not in ("open", "periodic"):
            raise ValueError(f"unknown boundary {self.boundary!r}")

    @classmethod
    def for_system(cls, n_particles: int, n_sites: int, w: float, phi: float = 0.0,
                   j: float | None = None, u: float | None = None,
                   beta: float | None = None) -> "ModelParams":
        """Standard parameter set: J = 1/2, U = 4/(N-1), beta = 1.618."""
        return cls(
            n_particles=n_particles,
            n_sites=n_sites,
            j=DEFAULT_HOPPING if j is None else j,
            u=default_interaction(n_particles) if u is None else u,
            w=w,
            beta=DEFAULT_BETA if beta is None else beta,
            phi=phi,
        )


def site_potential(params: ModelParams) -> np.ndarray:
    """W cos(2 pi beta i + phi) for sites i = 1..L."""
    i = np.arange(1, params.n_sites + 1, dtype=float)
    return params.w * np.cos(2 * pi * params.beta * i + params.phi)


def interaction_energy(occupations, u: float) -> float:
    """(U/2) sum_i n_i (n_i - 1)."""
    occ = np.asarray(occupations, dtype=float)
    return 0.5 * u * float(np.sum(occ * (occ - 1)))


def diagonal_expectation(occupations, params: ModelParams) -> float:
    """<k|H|k> for a single occupation state at the given phi."""
    occ = check_state(occupations, params.n_particles, params.n_sites)
    pot = site_potential(params)
    return interaction_energy(occ, params.u) + float(pot @ np.asarray(occ, dtype=float))


@dataclass(frozen=True)
class SparseHamiltonian:
    """Real symmetric Hamiltonian stored once: diagonal plus one entry per
    off-diagonal pair; the mirror is produced on densification, so symmetry
    is exact bit-for-bit."""

    dim: int
    diag: np.ndarray   # (dim,)
    rows: np.ndarray   # (nnz,) one index per unordered pair
    cols: np.ndarray
    vals: np.ndarray

    @property
    def offdiag_count(self) -> int:
        return self.rows.size

    def to_dense(self) -> np.ndarray:
        h = np.zeros((self.dim, self.dim))
        h[self.rows, self.cols] = self.vals
        h[self.cols, self.rows] = self.vals
        h[np.diag_indices(self.dim)] = self.diag
        return h

    def to_csr(self) -> scipy.sparse.csr_matrix:
        idx = np.arange(self.dim)
        r = np.concatenate([self.rows, self.cols, idx])
        c = np.concatenate([self.cols, self.rows, idx])
        v = np.concatenate([self.vals, self.vals, self.diag])
        return scipy.sparse.coo_matrix((v, (r, c)), shape=(self.dim, self.dim)).tocsr()

    def trace(self) -> float:
        return float(np.sum(self.diag))

    def write_coordinate_text(self, path) -> None:
        """Dump as symmetric coordinate text: 1-based row, col, value with 17
        significant digits; one entry per symmetric pair, diagonal included."""
        with open(path, "w") as fh:
            fh.write(f"% symmetric coordinate format, dim={self.dim}\n")
            for k in range(self.dim):
                fh.write(f"{k + 1} {k + 1} {self.diag[k]:.17g}\n")
            for r, c, v in zip(self.rows, self.cols, self.vals):
                lo, hi = (int(r), int(c)) if r <= c else (int(c), int(r))
                fh.write(f"{lo + 1} {hi + 1} {v:.17g}\n")


def read_coordinate_text(path) -> np.ndarray:
    """Read a matrix dumped by write_coordinate_text back to dense."""
    entries = []
    with open(path) as fh:
        for line in fh:
            if line.startswith("%"):
                continue
            r, c, v = line.split()
            entries.append((int(r) - 1, int(c) - 1, float(v)))
    dim = max(max(r, c) for r, c, _ in entries) + 1
    h = np.zeros((dim, dim))
    for r, c, v in entries:
        h[r, c] = v
        h[c, r] = v
    return h


def assemble(params: ModelParams, table: BasisTable) -> SparseHamiltonian:
    """Build the Hamiltonian of one realization in the occupation basis.

    Diagonal: interaction plus quasiperiodic potential.  Off-diagonal:
    -J sqrt(n_i (n_{i+1} + 1)) between states related by one
    nearest-neighbor hop (open boundary, no L-to-1 bond).  Each unordered
    pair is generated exactly once, from the rightward hop.
    """
    if (params.n_particles, params.n_sites) != (table.n_particles, table.n_sites):
        raise ValueError(
            f"params ({params.n_particles},{params.n_sites}) do not match "
            f"basis table ({table.n_particles},{table.n_sites})"
        )
    if params.boundary != "open":
        raise NotImplementedError("periodic boundary conditions are not implemented")

    states = table.states.astype(np.float64)
    pot = site_potential(params)
    diag = 0.5 * params.u * np.sum(states * (states - 1), axis=1) + states @ pot

    rows, cols, vals = [], [], []
    n_sites = params.n_sites
    for k in range(table.dim):
        occ = table.states[k]
        for i in range(n_sites - 1):
            n_i = int(occ[i])
            if n_i == 0:
                continue
            moved = list(occ)
            moved[i] = n_i - 1
            moved[i + 1] = int(occ[i + 1]) + 1
            kp = table.rank(moved)
            rows.append(k)
            cols.append(kp)
            vals.append(-params.j * sqrt(n_i * (int(occ[i + 1]) + 1)))

    return SparseHamiltonian(
        dim=table.dim,
        diag=np.asarray(diag, dtype=np.float64),
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        vals=np.asarray(vals, dtype=np.float64),
    )


def spectral_bounds(params: ModelParams, table: BasisTable) -> tuple[float, float]:
    """A-priori Gershgorin-type bounds on the spectrum, valid for any phi.

    Used to anchor fixed energy grids before any diagonalization has run.
    """
    states = table.states.astype(np.float64)
    inter = 0.5 * params.u * np.sum(states * (states - 1), axis=1)
    disorder_extent = params.w * states.sum(axis=1)  # |W sum cos(...) n_i| <= W N
    ref = assemble(
        ModelParams(params.n_particles, params.n_sites, j=params.j, u=params.u, w=0.0),
        table,
    )
    radius = np.zeros(table.dim)
    np.add.at(radius, ref.rows, np.abs(ref.vals))
    np.add.at(radius, ref.cols, np.abs(ref.vals))
    lo = float(np.min(inter - disorder_extent - radius))
    hi = float(np.max(inter + disorder_extent + radius))
    return lo, hi
