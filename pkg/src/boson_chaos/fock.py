"""Occupation-number (Fock) basis for N bosons on an L-site chain.

States are occupation tuples (n_1, ..., n_L) with sum(n_i) = N, enumerated
in descending lexicographic order, so (N,0,...,0) is first and (0,...,0,N)
is last.  Ranking is combinatorial (O(L) per state, no hash table).
"""

from dataclasses import dataclass
from math import comb, sqrt

import numpy as np

# Dense eigensolves scale as dim^3; refuse basis sizes that cannot be used.
DEFAULT_DIM_CAP = 100_000


def basis_dimension(n_particles: int, n_sites: int) -> int:
    """Number of ways to place n_particles bosons on n_sites sites."""
    return comb(n_particles + n_sites - 1, n_sites - 1)


def check_state(occupations, n_particles: int, n_sites: int) -> tuple:
    """Validate an occupation vector against (N, L); return it as a tuple."""
    occ = tuple(int(n) for n in occupations)
    if len(occ) != n_sites:
        raise ValueError(f"state has {len(occ)} sites, expected {n_sites}")
    if any(n < 0 for n in occ):
        raise ValueError(f"negative occupation in {occ}")
    if sum(occ) != n_particles:
        raise ValueError(f"state {occ} holds {sum(occ)} particles, expected {n_particles}")
    return occ


def _compositions(total: int, parts: int):
    """Yield compositions of `total` into `parts` parts, descending lex."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def composition_rank(occupations, n_particles: int, n_sites: int) -> int:
    """Ordinal of an occupation vector in the descending-lex enumeration.

    At each site the states sorted before the given one are those with a
    strictly larger occupation there (same prefix); they number
    comb(remaining - v + parts_left - 1, parts_left - 1) for each larger
    value v.
    """
    occ = check_state(occupations, n_particles, n_sites)
    rank = 0
    remaining = n_particles
    for j, n_j in enumerate(occ):
        parts_left = n_sites - j - 1
        if parts_left == 0:
            break
        for v in range(n_j + 1, remaining + 1):
            rank += comb(remaining - v + parts_left - 1, parts_left - 1)
        remaining -= n_j
    return rank


@dataclass(frozen=True)
class BasisTable:
    """Full occupation basis for (n_particles, n_sites), immutable."""

    n_particles: int
    n_sites: int
    states: np.ndarray  # (dim, L) int array, descending-lex order

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    def state(self, k: int) -> tuple:
        """Occupation tuple at ordinal k (the inverse of rank)."""
        if not 0 <= k < self.dim:
            raise ValueError(f"ordinal {k} outside [0, {self.dim})")
        return tuple(int(n) for n in self.states[k])

    def rank(self, occupations) -> int:
        """Ordinal of a state; states[rank(s)] == s."""
        return composition_rank(occupations, self.n_particles, self.n_sites)


def build_basis(n_particles: int, n_sites: int, max_dim: int = DEFAULT_DIM_CAP) -> BasisTable:
    """Enumerate the full occupation basis in descending-lex order.

    Raises ValueError for n_particles < 1, n_sites < 1, or when the basis
    dimension exceeds max_dim.
    """
    if n_particles < 1:
        raise ValueError(f"need at least one particle, got {n_particles}")
    if n_sites < 1:
        raise ValueError(f"need at least one site, got {n_sites}")
    dim = basis_dimension(n_particles, n_sites)
    if dim > max_dim:
        raise ValueError(
            f"basis dimension {dim} exceeds cap {max_dim}; "
            "raise max_dim explicitly if this size is intended"
        )
    states = np.empty((dim, n_sites), dtype=np.int16)
    for k, occ in enumerate(_compositions(n_particles, n_sites)):
        states[k] = occ
    states.setflags(write=False)
    return BasisTable(n_particles, n_sites, states)


def hop_image(occupations, src: int, dst: int):
    """Move one boson from site src to site dst (0-based indices).

    Returns (new_occupations, amplitude) with the bosonic matrix element
    sqrt(n_src * (n_dst + 1)) of the hop, or None when the source site is
    empty.
    """
    if src == dst:
        raise ValueError("source and destination sites coincide")
    occ = list(occupations)
    n_src = occ[src]
    if n_src == 0:
        return None
    n_dst = occ[dst]
    occ[src] = n_src - 1
    occ[dst] = n_dst + 1
    return tuple(occ), sqrt(n_src * (n_dst + 1))
