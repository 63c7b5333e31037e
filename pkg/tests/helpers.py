"""Independent oracles used by the tests.

Everything here is deliberately written from first principles (operator
application, matrix exponentials, random-matrix sampling) so it shares no
code path with the package implementations it checks.
"""

from math import cos, pi, sqrt

import numpy as np
import scipy.linalg


def goe_matrix(rng, dim):
    """One GOE draw: symmetric Gaussian matrix, off-diagonal variance 1/2."""
    a = rng.standard_normal((dim, dim))
    return (a + a.T) / 2.0


def goe_spectra(rng, dim, count):
    """Eigenvalue sets of `count` independent GOE matrices."""
    return [np.linalg.eigvalsh(goe_matrix(rng, dim)) for _ in range(count)]


def poisson_spectrum(rng, n_levels):
    """Uncorrelated spectrum: levels with i.i.d. exponential spacings."""
    return np.cumsum(rng.exponential(1.0, size=n_levels))


def brute_force_hamiltonian(table, j, u, w, beta, phi):
    """Hamiltonian built by term-by-term operator application.

    Applies annihilation then creation with their individual sqrt factors
    to every basis vector, summing over both hop directions of every bond,
    then adds the diagonal terms; independent of the package's single-hop
    assembly.
    """
    dim = table.dim
    n_sites = table.n_sites
    h = np.zeros((dim, dim))
    for k in range(dim):
        occ = table.state(k)
        # hopping: -J sum over neighbor pairs of b_i^dag b_j, both orders
        for i, jj in [(b, b + 1) for b in range(n_sites - 1)] + \
                     [(b + 1, b) for b in range(n_sites - 1)]:
            if occ[jj] == 0:
                continue
            lowered = list(occ)
            amp = sqrt(lowered[jj])
            lowered[jj] -= 1
            amp *= sqrt(lowered[i] + 1)
            lowered[i] += 1
            h[table.rank(lowered), k] += -j * amp
        # interaction and site potential
        diag = 0.0
        for i, n in enumerate(occ):
            diag += 0.5 * u * n * (n - 1)
            diag += w * cos(2 * pi * beta * (i + 1) + phi) * n
        h[k, k] += diag
    return h


def propagated_survival(h, initial_index, times):
    """SP(t) by stepwise unitary propagation with dense matrix exponentials.

    No eigendecomposition involved: the state is advanced from one grid
    time to the next by expm(-i H dt).
    """
    dim = h.shape[0]
    psi0 = np.zeros(dim, dtype=complex)
    psi0[initial_index] = 1.0
    psi = psi0.copy()
    sp = np.empty(len(times))
    prev_t = 0.0
    for i, t in enumerate(times):
        step = scipy.linalg.expm(-1j * h * (t - prev_t))
        psi = step @ psi
        sp[i] = abs(np.vdot(psi0, psi)) ** 2
        prev_t = t
    return sp
