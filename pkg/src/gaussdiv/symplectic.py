"""Symplectic linear algebra and covariance-matrix validity tests.

Quadratures are ordered (q1, p1, ..., qn, pn) in natural units, so the vacuum
variance is 1/2 and a covariance matrix ``sigma`` is physical iff
``sigma - (i/2) Omega >= 0`` for the antisymmetric form ``Omega``.

All Hermitian eigenproblems are solved after realification to a real
symmetric matrix of doubled size, which has the same spectrum with doubled
multiplicities; this keeps every heavy eigensolve real symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "symplectic_form",
    "hermitian_min_eig",
    "is_valid_covariance",
    "symplectic_eigenvalues",
    "is_symplectic",
    "EulerFactors",
    "euler_decompose",
    "random_symplectic",
    "GaussianState",
]

_BLOCK = np.array([[0.0, 1.0], [-1.0, 0.0]])


def symplectic_form(n: int) -> np.ndarray:
    """Antisymmetric form of ``n`` modes: block-diagonal [[0, 1], [-1, 0]].

    Args:
        n: number of modes, at least 1.

    Returns:
        The 2n x 2n form matrix.

    Raises:
        ValueError: if ``n`` is not a positive integer.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"mode count must be a positive integer, got {n}")
    return np.kron(np.eye(int(n)), _BLOCK)


def _realify(M: np.ndarray) -> np.ndarray:
    """[[Re M, -Im M], [Im M, Re M]]; real symmetric iff M is Hermitian."""
    return np.concatenate(
        [
            np.concatenate([M.real, -M.imag], axis=-1),
            np.concatenate([M.imag, M.real], axis=-1),
        ],
        axis=-2,
    )


def min_eig_hermitian_stack(M: np.ndarray) -> np.ndarray:
    """Smallest eigenvalue of each matrix in a stack of Hermitian matrices.

    No hermiticity check is performed; callers own that invariant.
    """
    return np.linalg.eigvalsh(_realify(np.asarray(M, dtype=complex)))[..., 0]


def hermitian_min_eig(M: np.ndarray) -> float:
    """Smallest eigenvalue of a complex Hermitian matrix.

    Args:
        M: Hermitian matrix (max-norm deviation from M^dagger at most
            1e-10 relative).

    Returns:
        The smallest (real) eigenvalue.

    Raises:
        ValueError: if ``M`` is not Hermitian within tolerance.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix")
    scale = np.abs(M).max()
    if scale > 0 and np.abs(M - M.conj().T).max() > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    return float(min_eig_hermitian_stack(M))


def is_valid_covariance(sigma: np.ndarray, tol: float = 1e-9) -> tuple[bool, float]:
    """Uncertainty-relation test ``sigma >= (i/2) Omega``.

    Args:
        sigma: real symmetric 2n x 2n matrix.
        tol: absolute tolerance on the eigenvalue margin.

    Returns:
        ``(valid, margin)`` where ``margin`` is the smallest eigenvalue of
        ``sigma - (i/2) Omega`` and ``valid`` means ``margin >= -tol``.

    Raises:
        ValueError: if ``sigma`` is not symmetric.
    """
    sigma = np.asarray(sigma, dtype=float)
    scale = max(1.0, np.abs(sigma).max())
    if np.abs(sigma - sigma.T).max() > 1e-10 * scale:
        raise ValueError("covariance matrix must be symmetric")
    n = sigma.shape[0] // 2
    margin = hermitian_min_eig(sigma - 0.5j * symplectic_form(n))
    return bool(margin >= -tol), margin


def symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Symplectic spectrum of a positive definite covariance matrix.

    The values are the moduli of the eigenvalues of ``i Omega sigma``, which
    come in n degenerate pairs; one representative per pair is returned,
    sorted ascending. Physical states have every value >= 1/2.

    Raises:
        ValueError: if ``sigma`` is not positive definite.
    """
    sigma = np.asarray(sigma, dtype=float)
    if np.linalg.eigvalsh(0.5 * (sigma + sigma.T))[0] <= 0:
        raise ValueError("covariance matrix must be positive definite")
    n = sigma.shape[0] // 2
    moduli = np.sort(np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ sigma)))
    return 0.5 * (moduli[0::2] + moduli[1::2])


def is_symplectic(S: np.ndarray, tol: float = 1e-9) -> bool:
    """True iff ``S Omega S^T = Omega`` within max-norm tolerance ``tol``."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        return False
    omega = symplectic_form(S.shape[0] // 2)
    return bool(np.abs(S @ omega @ S.T - omega).max() <= tol)


@dataclass(frozen=True)
class EulerFactors:
    """Rotation-squeeze-rotation factorization of a one-mode symplectic matrix.

    ``O1 @ diag(z, 1/z) @ O2`` reconstructs the input; both factors are
    proper rotations and ``z`` lies in (0, 1].
    """

    O1: np.ndarray
    O2: np.ndarray
    z: float

    def matrix(self) -> np.ndarray:
        return self.O1 @ np.diag([self.z, 1.0 / self.z]) @ self.O2


# Quarter-turn used to bring SVD singular values into increasing order while
# keeping both orthogonal factors proper rotations.
_QUARTER = np.array([[0.0, -1.0], [1.0, 0.0]])


def euler_decompose(S: np.ndarray) -> EulerFactors:
    """Factor a one-mode symplectic matrix as rotation * squeezer * rotation.

    ``z = 1/sigma_max(S)``; a tie at z = 1 (orthogonal input) is resolved
    with the second rotation set to the identity.

    Raises:
        ValueError: if ``S`` is not a 2x2 symplectic matrix.
    """
    S = np.asarray(S, dtype=float)
    if S.shape != (2, 2) or not is_symplectic(S, tol=1e-9):
        raise ValueError("input must be a 2x2 symplectic matrix")
    U, s, Vt = np.linalg.svd(S)
    if np.linalg.det(U) < 0:
        # det S = 1 forces det U = det V; flip one column of each.
        U = U @ np.diag([1.0, -1.0])
        Vt = np.diag([1.0, -1.0]) @ Vt
    z = 1.0 / s[0]
    if abs(s[0] - 1.0) <= 1e-12:
        return EulerFactors(O1=S.copy(), O2=np.eye(2), z=1.0)
    O1 = U @ _QUARTER.T
    O2 = _QUARTER @ Vt
    return EulerFactors(O1=O1, O2=O2, z=float(z))


def _haar_orthosymplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random orthogonal symplectic matrix (image of a Haar unitary)."""
    if n == 1:
        phi = rng.uniform(0.0, 2.0 * np.pi)
        c, s = np.cos(phi), np.sin(phi)
        return np.array([[c, -s], [s, c]])
    A = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    Q, R = np.linalg.qr(A)
    d = np.diagonal(R)
    Q = Q * (d / np.abs(d)).conj()
    O = np.zeros((2 * n, 2 * n))
    O[0::2, 0::2] = Q.real
    O[1::2, 1::2] = Q.real
    O[0::2, 1::2] = -Q.imag
    O[1::2, 0::2] = Q.imag
    return O


def random_symplectic(n: int, r_max: float, seed) -> np.ndarray:
    """Random symplectic matrix, deterministic for a fixed seed.

    Built as rotation * single-mode squeezers * rotation with the squeezing
    parameters drawn uniformly from [0, r_max].

    Args:
        n: mode count.
        r_max: upper bound of the squeezing parameter; must be positive.
        seed: anything accepted by ``numpy.random.default_rng``.
    """
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    rng = np.random.default_rng(seed)
    O1 = _haar_orthosymplectic(n, rng)
    rs = rng.uniform(0.0, r_max, n)
    Z = np.diag(np.stack([np.exp(rs), np.exp(-rs)], axis=1).ravel())
    O2 = _haar_orthosymplectic(n, rng)
    return O1 @ Z @ O2


@dataclass(frozen=True)
class GaussianState:
    """First and second moments of an n-mode Gaussian state.

    The uncertainty relation is deliberately *not* enforced at construction:
    maps that are not completely positive may produce invalid covariances
    that callers still need to inspect. Use :func:`is_valid_covariance`.
    """

    n: int
    D: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        D = np.array(self.D, dtype=float)
        sigma = np.array(self.sigma, dtype=float)
        if D.shape != (2 * self.n,):
            raise ValueError(f"displacement must have shape ({2 * self.n},)")
        if sigma.shape != (2 * self.n, 2 * self.n):
            raise ValueError(f"covariance must be {2 * self.n} x {2 * self.n}")
        if not (np.isfinite(D).all() and np.isfinite(sigma).all()):
            raise ValueError("moments must be finite")
        scale = max(1.0, np.abs(sigma).max())
        if np.abs(sigma - sigma.T).max() > 1e-8 * scale:
            raise ValueError("covariance matrix must be symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        D.setflags(write=False)
        sigma.setflags(write=False)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def vacuum(cls, n: int) -> "GaussianState":
        return cls(n, np.zeros(2 * n), 0.5 * np.eye(2 * n))

    def validity(self, tol: float = 1e-9) -> tuple[bool, float]:
        """Uncertainty-relation verdict and margin for this state."""
        return is_valid_covariance(self.sigma, tol)
