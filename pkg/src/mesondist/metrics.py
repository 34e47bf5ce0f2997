"""Fidelity and the Bures, Hilbert-Schmidt and trace distances.

Normalizations:

    D_B(rho, sigma)  = sqrt(1 - F),   F = (Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2
    D_HS(rho, sigma) = sqrt(Tr[(rho - sigma)^2]) / sqrt(2)
    D_tr(rho, sigma) = Tr|rho - sigma| / 2

Note the Bures convention is sqrt(1 - F), not sqrt(2 - 2 sqrt(F)). With
these choices all three distances lie in [0, 1] and coincide on pairs of
pure states.
"""

from __future__ import annotations

import enum
import math
from typing import NamedTuple

import numpy as np

from . import linalg
from .errors import DimensionError
from .states import DensityMatrix, as_density


class DistanceKind(str, enum.Enum):
    BURES = "bures"
    HS = "hs"
    TRACE = "trace"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, token) -> "DistanceKind":
        if isinstance(token, cls):
            return token
        aliases = {"hilbert-schmidt": cls.HS, "tr": cls.TRACE}
        token = str(token).strip().lower()
        if token in aliases:
            return aliases[token]
        return cls(token)


METRICS = tuple(DistanceKind)


class Distances(NamedTuple):
    bures: float
    hs: float
    trace: float

    def __getitem__(self, key):
        if isinstance(key, (str, DistanceKind)):
            return getattr(self, DistanceKind.parse(key).value)
        return tuple.__getitem__(self, key)


def _pair(rho, sigma) -> tuple[DensityMatrix, DensityMatrix]:
    rho, sigma = as_density(rho), as_density(sigma)
    if rho.dim != sigma.dim:
        raise DimensionError(f"states have different dimensions {rho.dim} and {sigma.dim}")
    return rho, sigma


def _fidelity(r: np.ndarray, s: np.ndarray) -> float:
    if np.array_equal(r, s):
        return 1.0
    root_s = linalg.matrix_sqrt_psd(s)
    inner = root_s @ r @ root_s
    inner = 0.5 * (inner + np.conj(inner.T))
    lam = linalg.clamp_spectrum(linalg.eigvalsh(inner))
    f = float(np.sum(np.sqrt(lam))) ** 2
    return min(max(f, 0.0), 1.0)


def fidelity(rho, sigma) -> float:
    """(Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2, clamped into [0, 1]."""
    rho, sigma = _pair(rho, sigma)
    return _fidelity(rho.mat, sigma.mat)


def _bures(r, s) -> float:
    gap = 1.0 - _fidelity(r, s)
    # below this the infidelity is pure round-off
    if gap <= 8 * r.shape[0] * np.finfo(float).eps:
        return 0.0
    return math.sqrt(gap)


def _hs(r, s) -> float:
    d = r - s
    return math.sqrt(float(np.sum(d.real**2 + d.imag**2)) / 2.0)


def _trace(r, s) -> float:
    return 0.5 * float(np.sum(np.abs(linalg.eigvalsh(r - s))))


def bures(rho, sigma) -> float:
    rho, sigma = _pair(rho, sigma)
    return _bures(rho.mat, sigma.mat)


def hilbert_schmidt(rho, sigma) -> float:
    rho, sigma = _pair(rho, sigma)
    return _hs(rho.mat, sigma.mat)


def trace_distance(rho, sigma) -> float:
    rho, sigma = _pair(rho, sigma)
    return _trace(rho.mat, sigma.mat)


_BY_KIND = {DistanceKind.BURES: _bures, DistanceKind.HS: _hs, DistanceKind.TRACE: _trace}


def distance(kind, rho, sigma) -> float:
    rho, sigma = _pair(rho, sigma)
    return _BY_KIND[DistanceKind.parse(kind)](rho.mat, sigma.mat)


def all_distances(rho, sigma) -> Distances:
    rho, sigma = _pair(rho, sigma)
    r, s = rho.mat, sigma.mat
    return Distances(_bures(r, s), _hs(r, s), _trace(r, s))
