"""Gaussian maps (X, Y): state action, composition, and positivity tests.

A map acts as ``D -> X D`` and ``sigma -> X sigma X^T + Y``. It is completely
positive iff ``Y - (i/2) Omega + (i/2) X Omega X^T >= 0``; it is positive on
Gaussian inputs iff ``(1/2) X S S^T X^T + Y - (i/2) Omega >= 0`` for every
symplectic S. For one mode the latter reduces to a compact two-parameter scan
over rotated squeezers S S^T = O(theta) diag(z^2, z^-2) O(theta)^T.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import SingularMapError
from .symplectic import (
    GaussianState,
    hermitian_min_eig,
    min_eig_hermitian_stack,
    random_symplectic,
    symplectic_form,
)

__all__ = [
    "GaussianMap",
    "PositivityVerdict",
    "ScanSpec",
    "apply",
    "compose",
    "is_cp",
    "is_positive_one_mode",
    "is_positive_falsifier",
    "extend",
    "is_kpositive_falsifier",
    "quantum_limit_gap",
    "classify_positivity",
]

KLASS_CP = "CP"
KLASS_P = "P_not_CP"
KLASS_NP = "NP"


@dataclass(frozen=True)
class GaussianMap:
    """A Gaussian channel represented by the matrix pair (X, Y)."""

    n: int
    X: np.ndarray
    Y: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        Y = np.array(self.Y, dtype=float)
        d = 2 * self.n
        if X.shape != (d, d) or Y.shape != (d, d):
            raise ValueError(f"X and Y must be {d} x {d}")
        if not (np.isfinite(X).all() and np.isfinite(Y).all()):
            raise ValueError("X and Y must be finite")
        scale = max(1.0, np.abs(Y).max())
        if np.abs(Y - Y.T).max() > 1e-10 * scale:
            raise ValueError("Y must be symmetric")
        Y = 0.5 * (Y + Y.T)
        X.setflags(write=False)
        Y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @classmethod
    def identity(cls, n: int = 1) -> "GaussianMap":
        return cls(n, np.eye(2 * n), np.zeros((2 * n, 2 * n)))

    @classmethod
    def attenuator(cls, eta: float) -> "GaussianMap":
        """One-mode beam-splitter loss of transmissivity eta with a vacuum environment."""
        if not 0.0 < eta <= 1.0:
            raise ValueError("transmissivity must lie in (0, 1]")
        return cls(1, np.sqrt(eta) * np.eye(2), 0.5 * (1.0 - eta) * np.eye(2))

    @classmethod
    def amplifier(cls, gain: float, added_noise: float | None = None) -> "GaussianMap":
        """One-mode phase-insensitive amplifier; quantum-limited noise by default."""
        if added_noise is None:
            added_noise = 0.5 * abs(gain * gain - 1.0)
        return cls(1, gain * np.eye(2), added_noise * np.eye(2))

    @classmethod
    def transposition(cls) -> "GaussianMap":
        """Momentum flip (q, p) -> (q, -p); positive but not completely positive."""
        return cls(1, np.diag([1.0, -1.0]), np.zeros((2, 2)))


@dataclass(frozen=True)
class ScanSpec:
    """Grid and refinement controls for the one-mode positivity scan."""

    theta_points: int = 128
    z_points: int = 128
    log10_z_min: float = -6.0
    refine: bool = True
    refine_rounds: int = 3
    refine_iters: int = 40


@dataclass(frozen=True)
class PositivityVerdict:
    """Positivity class of a map with the margins that decided it."""

    klass: str
    cp_margin: float
    p_margin: float | None = None
    witness: np.ndarray | None = None
    falsifier_only: bool = False


def apply(m: GaussianMap, state: GaussianState) -> GaussianState:
    """Act on a state: D -> X D, sigma -> X sigma X^T + Y.

    Output validity is not enforced; maps that are not completely positive
    may produce covariances violating the uncertainty relation.
    """
    if m.n != state.n:
        raise ValueError("map and state mode counts differ")
    return GaussianState(m.n, m.X @ state.D, m.X @ state.sigma @ m.X.T + m.Y)


def compose(later: GaussianMap, earlier: GaussianMap) -> GaussianMap:
    """The map equal to ``earlier`` followed by ``later``."""
    if later.n != earlier.n:
        raise ValueError("map mode counts differ")
    X = later.X @ earlier.X
    Y = later.X @ earlier.Y @ later.X.T + later.Y
    return GaussianMap(later.n, X, 0.5 * (Y + Y.T))


def is_cp(m: GaussianMap, tol: float = 1e-9) -> tuple[bool, float]:
    """Complete-positivity test.

    Returns:
        ``(cp, margin)`` with ``margin`` the smallest eigenvalue of
        ``Y - (i/2) Omega + (i/2) X Omega X^T``.
    """
    omega = symplectic_form(m.n)
    M = m.Y.astype(complex) - 0.5j * omega + 0.5j * (m.X @ omega @ m.X.T)
    margin = hermitian_min_eig(M)
    return bool(margin >= -tol), margin


def _scan_min_eig(X: np.ndarray, Y: np.ndarray, theta, u):
    """Smallest eigenvalue of (1/2) X SS^T X^T + Y - (i/2) Omega on a grid.

    ``SS^T = O(theta) diag(10^(2u), 10^(-2u)) O(theta)^T``. Uses closed-form
    2x2 Hermitian eigenvalues with a determinant-based correction so that
    margins near zero stay accurate even when 10^(-2u) reaches 1e12.
    """
    theta = np.asarray(theta, dtype=float)
    u = np.asarray(u, dtype=float)
    z2 = 10.0 ** (2.0 * u)
    z2i = 10.0 ** (-2.0 * u)
    c, s = np.cos(theta), np.sin(theta)
    P11 = z2 * c * c + z2i * s * s
    P22 = z2 * s * s + z2i * c * c
    P12 = (z2 - z2i) * c * s
    x11, x12 = X[0, 0], X[0, 1]
    x21, x22 = X[1, 0], X[1, 1]
    A11 = 0.5 * (x11 * (x11 * P11 + x12 * P12) + x12 * (x11 * P12 + x12 * P22))
    A22 = 0.5 * (x21 * (x21 * P11 + x22 * P12) + x22 * (x21 * P12 + x22 * P22))
    A12 = 0.5 * (x21 * (x11 * P11 + x12 * P12) + x22 * (x11 * P12 + x12 * P22))
    R11, R22, R12 = A11 + Y[0, 0], A22 + Y[1, 1], A12 + Y[0, 1]
    half_tr = 0.5 * (R11 + R22)
    root = np.sqrt((0.5 * (R11 - R22)) ** 2 + R12 ** 2 + 0.25)
    lmax = half_tr + root
    # det(A + Y) expanded as det A + det Y + tr(A adj Y) avoids the huge
    # cancellation in R11 R22 - R12^2 at extreme squeezing.
    det_x = x11 * x22 - x12 * x21
    det_a = 0.25 * det_x * det_x * (z2 * z2i)
    det_y = Y[0, 0] * Y[1, 1] - Y[0, 1] * Y[1, 0]
    cross = A11 * Y[1, 1] + A22 * Y[0, 0] - 2.0 * A12 * Y[0, 1]
    det_m = det_a + det_y + cross - 0.25
    safe = np.where(lmax > 0, lmax, 1.0)
    return np.where(lmax > 0, det_m / safe, half_tr - root)


def _golden_min(f, a: float, b: float, iters: int) -> tuple[float, float]:
    """Golden-section minimum of a scalar function on [a, b]."""
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def is_positive_one_mode(
    m: GaussianMap, tol: float = 1e-9, grid: ScanSpec | None = None
) -> tuple[bool, float, np.ndarray]:
    """Positivity of a one-mode map on Gaussian inputs.

    Minimizes the smallest eigenvalue of ``(1/2) X SS^T X^T + Y - (i/2) Omega``
    over rotated squeezers (coarse grid, then golden-section refinement).
    The grid floor at log10 z = -6 is a documented scan-completeness
    assumption; below it the scanned eigenvalue is monotone in z for all
    tested map families.

    Returns:
        ``(positive, margin, witness)`` where ``witness`` is the minimizing
        symplectic matrix ``O(theta) diag(z, 1/z)``.

    Raises:
        SingularMapError: if X is singular.
    """
    if m.n != 1:
        raise ValueError("scan applies to one-mode maps only")
    if abs(np.linalg.det(m.X)) < 1e-12:
        raise SingularMapError("positivity scan requires invertible X")
    spec = grid or ScanSpec()
    thetas = np.linspace(0.0, np.pi, spec.theta_points, endpoint=False)[:, None]
    us = np.linspace(spec.log10_z_min, 0.0, spec.z_points)[None, :]
    vals = _scan_min_eig(m.X, m.Y, thetas, us)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    best_theta = float(thetas[i, 0])
    best_u = float(us[0, j])
    best = float(vals[i, j])

    if spec.refine:
        dth = np.pi / spec.theta_points
        du = -spec.log10_z_min / max(spec.z_points - 1, 1)
        for _ in range(spec.refine_rounds):
            best_u, fu = _golden_min(
                lambda u: float(_scan_min_eig(m.X, m.Y, best_theta, u)),
                max(spec.log10_z_min, best_u - du),
                min(0.0, best_u + du),
                spec.refine_iters,
            )
            best_theta, fth = _golden_min(
                lambda th: float(_scan_min_eig(m.X, m.Y, th, best_u)),
                best_theta - dth,
                best_theta + dth,
                spec.refine_iters,
            )
            best = min(best, fu, fth)

    z = 10.0 ** best_u
    c, s = np.cos(best_theta), np.sin(best_theta)
    witness = np.array([[c, -s], [s, c]]) @ np.diag([z, 1.0 / z])
    return bool(best >= -tol), best, witness


def extend(m: GaussianMap, k: int) -> GaussianMap:
    """Extension by k ancilla modes appended after the system modes."""
    if int(k) != k or k < 1:
        raise ValueError("ancilla count must be a positive integer")
    d, dk = 2 * m.n, 2 * int(k)
    X = np.eye(d + dk)
    X[:d, :d] = m.X
    Y = np.zeros((d + dk, d + dk))
    Y[:d, :d] = m.Y
    return GaussianMap(m.n + int(k), X, Y)


_DEFAULT_R_GRID = tuple(0.25 * i for i in range(1, 21))


def _embedded_tmsv(n_total: int, i: int, j: int, r: float) -> np.ndarray:
    """Covariance of modes i, j two-mode squeezed with strength r, rest vacuum."""
    sig = 0.5 * np.eye(2 * n_total)
    ch, sh = 0.5 * np.cosh(r), 0.5 * np.sinh(r)
    si, sj = slice(2 * i, 2 * i + 2), slice(2 * j, 2 * j + 2)
    sig[si, si] = ch * np.eye(2)
    sig[sj, sj] = ch * np.eye(2)
    lam = np.diag([1.0, -1.0])
    sig[si, sj] = sh * lam
    sig[sj, si] = sh * lam
    return sig


@lru_cache(maxsize=16)
def _witness_covariances(n: int, k: int, r_grid: tuple, samples: int, seed: int,
                         r_max: float) -> np.ndarray:
    """Stacked (n+k)-mode witness covariances: squeezed pairs, then random pure."""
    total = n + k
    covs = [
        _embedded_tmsv(total, i, n + j, r)
        for r in r_grid
        for i in range(n)
        for j in range(k)
    ]
    for idx in range(samples):
        S = random_symplectic(total, r_max, np.random.SeedSequence((seed, idx)))
        covs.append(0.5 * (S @ S.T))
    arr = np.array(covs)
    arr.setflags(write=False)
    return arr


def is_kpositive_falsifier(
    m: GaussianMap,
    k: int,
    r_grid=None,
    samples: int = 200,
    seed: int = 0,
    tol: float = 1e-9,
    r_max: float = 3.0,
) -> tuple[str, GaussianState | None]:
    """Sampling falsifier for k-positivity of the extended map.

    Probes the extension on two-mode-squeezed witnesses between every system
    mode and one ancilla (sweeping ``r_grid``), then on ``samples`` random
    pure states. Returns ``("violated", state)`` for the first witness whose
    output breaks the uncertainty relation, else ``("no-violation-found",
    None)``. A clean sweep is *not* a proof of k-positivity.
    """
    if int(k) != k or k < 1:
        raise ValueError("ancilla count must be a positive integer")
    grid = _DEFAULT_R_GRID if r_grid is None else tuple(float(r) for r in r_grid)
    covs = _witness_covariances(m.n, int(k), grid, int(samples), int(seed), float(r_max))
    ext = extend(m, k)
    omega = symplectic_form(ext.n)
    lhs = np.einsum("ab,kbc,dc->kad", ext.X, covs, ext.X) + ext.Y
    margins = min_eig_hermitian_stack(lhs.astype(complex) - 0.5j * omega)
    bad = np.flatnonzero(margins < -tol)
    if bad.size:
        state = GaussianState(ext.n, np.zeros(2 * ext.n), covs[bad[0]])
        return "violated", state
    return "no-violation-found", None


def is_positive_falsifier(
    m: GaussianMap,
    samples: int = 2000,
    seed: int = 0,
    tol: float = 1e-9,
    r_max: float = 3.0,
) -> tuple[str, np.ndarray | None]:
    """Monte Carlo falsifier for plain positivity of a multimode map.

    Samples random pure covariances (1/2) S S^T; the first one whose image
    violates the uncertainty relation is returned as a witness. No finite
    decision procedure is available for n >= 2, so a clean sweep only means
    "no violation found".
    """
    covs = []
    for idx in range(int(samples)):
        S = random_symplectic(m.n, r_max, np.random.SeedSequence((seed, idx)))
        covs.append(0.5 * (S @ S.T))
    covs = np.array(covs)
    omega = symplectic_form(m.n)
    lhs = np.einsum("ab,kbc,dc->kad", m.X, covs, m.X) + m.Y
    margins = min_eig_hermitian_stack(lhs.astype(complex) - 0.5j * omega)
    bad = np.flatnonzero(margins < -tol)
    if bad.size:
        return "violated", covs[bad[0]]
    return "no-violation-found", None


def quantum_limit_gap(m: GaussianMap) -> float:
    """Added noise relative to the quantum limit of a phase-insensitive map.

    For X = g*1 and Y = y*1 returns ``y - |g^2 - 1| / 2``; a negative value
    means the map amplifies (or contracts) with less noise than any
    completely positive phase-insensitive channel can.

    Raises:
        ValueError: if X or Y is not a scalar multiple of the identity.
    """
    d = 2 * m.n
    g = m.X[0, 0]
    y = m.Y[0, 0]
    if np.abs(m.X - g * np.eye(d)).max() > 1e-9 * max(1.0, abs(g)):
        raise ValueError("X is not a scalar multiple of the identity")
    if np.abs(m.Y - y * np.eye(d)).max() > 1e-9 * max(1.0, abs(y)):
        raise ValueError("Y is not a scalar multiple of the identity")
    return float(y - 0.5 * abs(g * g - 1.0))


def classify_positivity(
    m: GaussianMap,
    tol: float = 1e-9,
    grid: ScanSpec | None = None,
    samples: int = 2000,
    seed: int = 0,
) -> PositivityVerdict:
    """Full positivity classification of a map into CP / P_not_CP / NP.

    One-mode maps get the exact scan; multimode maps fall back to the Monte
    Carlo falsifier, flagged via ``falsifier_only``.
    """
    cp, cp_margin = is_cp(m, tol)
    if m.n == 1:
        if abs(np.linalg.det(m.X)) < 1e-12 and not cp:
            raise SingularMapError("cannot classify positivity: X is singular")
        p_margin = None
        witness = None
        if abs(np.linalg.det(m.X)) >= 1e-12:
            positive, p_margin, witness = is_positive_one_mode(m, tol, grid)
        if cp:
            return PositivityVerdict(KLASS_CP, cp_margin, p_margin)
        if p_margin is not None and p_margin >= -tol:
            return PositivityVerdict(KLASS_P, cp_margin, p_margin)
        return PositivityVerdict(KLASS_NP, cp_margin, p_margin, witness)
    if cp:
        return PositivityVerdict(KLASS_CP, cp_margin)
    verdict, witness_cov = is_positive_falsifier(m, samples=samples, seed=seed, tol=tol)
    if verdict == "violated":
        return PositivityVerdict(KLASS_NP, cp_margin, None, witness_cov,
                                 falsifier_only=True)
    return PositivityVerdict(KLASS_P, cp_margin, None, None, falsifier_only=True)
