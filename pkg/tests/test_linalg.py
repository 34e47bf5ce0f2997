import math

import numpy as np
import pytest
from helpers import givens, random_density, random_hermitian, random_unitary

from mesondist import linalg
from mesondist.errors import ConvergenceError, DimensionError, UnphysicalStateError
from mesondist.states import regeneration_operator, singlet


def test_adjoint_identity_and_involution(rng):
    assert np.array_equal(linalg.adjoint(linalg.identity(4)), np.eye(4))
    m = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    assert np.array_equal(linalg.adjoint(linalg.adjoint(m)), m)


def test_adjoint_of_nilpotent_block():
    out = linalg.adjoint([[0, 1j], [0, 0]])
    assert np.array_equal(out, np.array([[0, 0], [-1j, 0]]))


def test_results_are_read_only(rng):
    m = linalg.adjoint(rng.normal(size=(2, 2)))
    with pytest.raises(ValueError):
        m[0, 0] = 1.0


def test_as_matrix_rejects_bad_shapes_and_nan():
    with pytest.raises(DimensionError):
        linalg.as_matrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        linalg.as_matrix([[np.nan]])
    with pytest.raises(ValueError):
        linalg.as_scalar(complex(np.inf, 0))


def test_matmul():
    m = np.arange(9).reshape(3, 3)
    assert np.array_equal(linalg.matmul(np.eye(3), m), m)
    assert np.array_equal(linalg.matmul(linalg.diag(2, 3), linalg.diag(5, 7)), np.diag([10, 21]))
    with pytest.raises(DimensionError):
        linalg.matmul(np.eye(2), np.eye(3))


def test_regeneration_operator_is_not_unitary_for_real_f():
    u = regeneration_operator(0.1)
    prod = linalg.matmul(u, linalg.adjoint(u))
    # [[1, f], [f, 1]] [[1, f], [f, 1]]^dagger / (1 + f^2) has off-diagonal 2 Re f / (1 + |f|^2)
    assert prod[0, 1] == pytest.approx(0.2 / 1.01, abs=1e-15)
    assert prod[0, 1] == pytest.approx(0.19801980198, abs=1e-10)


@pytest.mark.parametrize(
    "mat, expected",
    [
        (np.eye(4), [1, 1, 1, 1]),
        ([[0, 1], [1, 0]], [1, -1]),
        (np.diag([-3.0, 5.0, 0.5]), [5, 0.5, -3]),
    ],
)
def test_eigenvalues_known(mat, expected):
    assert np.allclose(linalg.hermitian_eig(mat).values, expected, atol=1e-14)


def test_pauli_x_eigenvectors():
    eig = linalg.hermitian_eig([[0, 1], [1, 0]])
    for k, ref in enumerate([np.array([1, 1]) / math.sqrt(2), np.array([1, -1]) / math.sqrt(2)]):
        assert abs(abs(np.vdot(ref, eig.vectors[:, k])) - 1) < 1e-14


def test_singlet_spectrum_is_projector():
    rho = singlet().mat
    assert np.allclose(rho @ rho, rho, atol=0)
    assert np.allclose(linalg.hermitian_eig(rho).values, [1, 0, 0, 0], atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_reconstruction_and_orthonormality(rng, n):
    worst_rec = worst_orth = 0.0
    for _ in range(1000):
        h = random_hermitian(rng, n)
        eig = linalg.hermitian_eig(h)
        v = eig.vectors
        worst_rec = max(worst_rec, np.linalg.norm(eig.reconstruct() - h) / np.linalg.norm(h))
        worst_orth = max(worst_orth, np.max(np.abs(v.conj().T @ v - np.eye(n))))
        assert np.all(np.diff(eig.values) <= 0)
    assert worst_rec < 1e-10
    assert worst_orth < 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
def test_eigenvalues_agree_with_lapack(rng, n):
    for _ in range(200):
        h = random_hermitian(rng, n)
        assert np.allclose(linalg.eigvalsh(h), np.linalg.eigvalsh(h)[::-1], atol=1e-12)


def test_degenerate_and_scaled_inputs(rng):
    assert np.array_equal(linalg.eigvalsh(np.zeros((3, 3))), np.zeros(3))
    u = random_unitary(rng, 4)
    h = u @ np.diag([2.0, 2.0, -1.0, -1.0]) @ u.conj().T
    assert np.allclose(linalg.eigvalsh(h), [2, 2, -1, -1], atol=1e-13)
    tiny = random_hermitian(rng, 4, scale=1e-200)
    assert np.allclose(linalg.eigvalsh(tiny), np.linalg.eigvalsh(tiny)[::-1], atol=1e-212)


def test_hermitian_tolerance():
    h = np.array([[1.0, 0.5 + 1e-11], [0.5, 2.0]])
    linalg.hermitian_eig(h)  # within 1e-10: symmetrized silently
    with pytest.raises(UnphysicalStateError):
        linalg.hermitian_eig([[1.0, 0.5 + 1e-9], [0.5, 2.0]])


def test_sweep_cap_raises(monkeypatch, rng):
    monkeypatch.setattr(linalg, "MAX_SWEEPS", 1)
    with pytest.raises(ConvergenceError):
        linalg.hermitian_eig(random_hermitian(rng, 4))


def test_spectrum_invariant_under_rotations(rng):
    for _ in range(200):
        h = random_hermitian(rng, 4)
        u = random_unitary(rng, 4)
        assert np.allclose(linalg.eigvalsh(u @ h @ u.conj().T), linalg.eigvalsh(h), atol=1e-12)


def test_givens_helper_is_unitary():
    g = givens(3, 0, 2, 0.3, 1.1)
    assert np.allclose(g @ g.conj().T, np.eye(3), atol=1e-15)


def test_sqrt_known_values():
    assert np.allclose(linalg.matrix_sqrt_psd(np.diag([4.0, 1, 0, 0])), np.diag([2.0, 1, 0, 0]), atol=1e-15)
    assert np.allclose(linalg.matrix_sqrt_psd(np.eye(4) / 4), np.eye(4) / 2, atol=1e-15)
    rho = singlet().mat
    assert np.allclose(linalg.matrix_sqrt_psd(rho), rho, atol=1e-15)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sqrt_squares_back(rng, n):
    for _ in range(300):
        h = random_density(rng, n, rank=rng.integers(1, n + 1))
        r = linalg.matrix_sqrt_psd(h)
        assert np.max(np.abs(r @ r - h)) < 1e-9
        assert np.min(np.linalg.eigvalsh(r)) > -1e-12


def test_sqrt_matches_scipy(rng):
    scipy_linalg = pytest.importorskip("scipy.linalg")
    for _ in range(50):
        h = random_density(rng, 4)
        assert np.allclose(linalg.matrix_sqrt_psd(h), scipy_linalg.sqrtm(h), atol=1e-10)


def test_sqrt_clamps_and_rejects_negative_eigenvalues():
    r = linalg.matrix_sqrt_psd(np.diag([1.0, -5e-11]))
    assert np.array_equal(r, np.diag([1.0, 0.0]))
    with pytest.raises(UnphysicalStateError):
        linalg.matrix_sqrt_psd(np.diag([1.0, -1e-9]))


def test_abs_known_values(rng):
    assert np.allclose(linalg.matrix_abs(np.diag([3.0, -2.0])), np.diag([3.0, 2.0]), atol=1e-15)
    h = random_density(rng, 4)
    assert np.allclose(linalg.matrix_abs(h), h, atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_abs_spectrum(rng, n):
    for _ in range(300):
        h = random_hermitian(rng, n)
        got = np.sort(np.linalg.eigvalsh(linalg.matrix_abs(h)))
        assert np.allclose(got, np.sort(np.abs(np.linalg.eigvalsh(h))), atol=1e-10)


def test_abs_of_decoherence_difference():
    from mesondist.states import decohered_singlet

    for t in (0.1, 0.7, 3.0):
        d = singlet().mat - decohered_singlet(t, 1.0).mat
        assert linalg.trace(linalg.matrix_abs(d)).real == pytest.approx(1 - math.exp(-t), abs=1e-14)
        e = (1 - math.exp(-t)) / 2
        assert np.allclose(linalg.eigvalsh(d), [e, 0, 0, -e], atol=1e-15)
