"""Random test corpora: Hermitian matrices, density matrices, unitaries."""

import cmath
import math

import numpy as np


def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def random_density(rng, n, rank=None):
    rank = n if rank is None else rank
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_pure_vector(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def givens(n, p, q, theta, phi):
    g = np.eye(n, dtype=complex)
    c, s = math.cos(theta), math.sin(theta)
    g[p, p] = c
    g[q, q] = c
    g[p, q] = -s * cmath.exp(-1j * phi)
    g[q, p] = s * cmath.exp(1j * phi)
    return g


def random_unitary(rng, n, rotations=12):
    """Product of elementary complex rotations and a diagonal phase."""
    u = np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, n)))
    for _ in range(rotations):
        p, q = rng.choice(n, size=2, replace=False)
        u = givens(n, p, q, rng.uniform(0, 2 * np.pi), rng.uniform(0, 2 * np.pi)) @ u
    return u


def singlet_vector():
    return np.array([0, 1, -1, 0], dtype=complex) / math.sqrt(2)
