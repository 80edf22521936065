"""Brute-force verifiers backing the test suite.

Independent of the main classification paths: witness states are built from
their defining blocks, and the CP/k-positivity equivalence is checked by
comparing the closed-form test with the sampling falsifier on both one and
two ancillas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channels import GaussianMap, is_cp, is_kpositive_falsifier
from .symplectic import GaussianState

__all__ = [
    "WitnessState",
    "tmsv_witness",
    "random_gaussian_map",
    "TheoremCheck",
    "verify_theorem1",
]


@dataclass(frozen=True)
class WitnessState:
    """Two-mode squeezed witness with its squeezing strength and mode pair."""

    r: float
    modes: tuple[int, int]
    covariance: np.ndarray


def tmsv_witness(r: float) -> WitnessState:
    """Two-mode squeezed vacuum of strength r.

    Covariance blocks: diagonal (1/2) cosh r on each mode, off-diagonal
    (1/2) sinh r diag(1, -1). Pure for every r, hence on the boundary of
    the uncertainty relation.
    """
    if r < 0:
        raise ValueError("squeezing strength must be nonnegative")
    ch, sh = 0.5 * np.cosh(r), 0.5 * np.sinh(r)
    cov = 0.5 * np.eye(4)
    cov[:2, :2] = ch * np.eye(2)
    cov[2:, 2:] = ch * np.eye(2)
    lam = np.diag([1.0, -1.0])
    cov[:2, 2:] = sh * lam
    cov[2:, :2] = sh * lam
    cov.setflags(write=False)
    return WitnessState(r=float(r), modes=(0, 1), covariance=cov)


def random_gaussian_map(n: int, spread: float, seed) -> GaussianMap:
    """Random map spanning the CP, P-not-CP, and NP classes.

    X entries are uniform in [-spread, spread]; Y = u A^T A - v with A
    uniform in [-1, 1] and the scalar ranges u in [0, 1.5], v in [-3, 1]
    calibrated so 500 one-mode draws at spread 2 contain at least 50 maps
    of each class.
    """
    if spread <= 0:
        raise ValueError("spread must be positive")
    rng = np.random.default_rng(seed)
    d = 2 * n
    X = rng.uniform(-spread, spread, (d, d))
    A = rng.uniform(-1.0, 1.0, (d, d))
    u = rng.uniform(0.0, 1.5)
    v = rng.uniform(-3.0, 1.0)
    return GaussianMap(n, X, u * (A.T @ A) - v * np.eye(d))


@dataclass(frozen=True)
class TheoremCheck:
    """Outcome of the CP vs one-ancilla-positivity equivalence check."""

    status: str  # "consistent" | "inconsistent" | "skipped"
    cp_margin: float
    falsified_k1: bool | None = None
    falsified_k2: bool | None = None
    evidence: GaussianState | None = None


def verify_theorem1(
    m: GaussianMap,
    r_grid=None,
    samples: int = 200,
    seed: int = 0,
    band: float = 1e-6,
    tol: float = 1e-9,
) -> TheoremCheck:
    """Check that the closed-form CP test agrees with the extension falsifier.

    Consistent means: the map is CP exactly when the one-ancilla falsifier
    finds no violation, and the two-ancilla falsifier never fires when the
    one-ancilla one does not. Maps with |cp_margin| below ``band`` are
    skipped: sampling cannot resolve the measure-zero boundary.
    """
    cp, cp_margin = is_cp(m, tol)
    if abs(cp_margin) < band:
        return TheoremCheck(status="skipped", cp_margin=cp_margin)
    v1, w1 = is_kpositive_falsifier(m, 1, r_grid, samples, seed, tol)
    v2, w2 = is_kpositive_falsifier(m, 2, r_grid, samples, seed, tol)
    k1 = v1 == "violated"
    k2 = v2 == "violated"
    consistent = (cp == (not k1)) and not (k2 and not k1)
    return TheoremCheck(
        status="consistent" if consistent else "inconsistent",
        cp_margin=cp_margin,
        falsified_k1=k1,
        falsified_k2=k2,
        evidence=w1 or w2,
    )
