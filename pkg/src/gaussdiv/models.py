"""Physically motivated process constructors and global-physicality checks.

A phase-insensitive process is generated from a pair of rate functions
(eps, mu) on [0, T]:

    X_t = e^{E(t)} 1,   Y_t = e^{2 E(t)} I(t) 1,

with E(t) = int_0^t eps_s ds and I(t) = int_0^t mu_r e^{-2 E(r)} dr. Global
complete positivity of the map from 0 to t is equivalent to

    Lambda_pm = +-1/2 + e^{2E(t)} (-+1/2 + I(t)) >= 0,

or, in integral form, int_0^t e^{-2E(r)} (mu_r -+ eps_r) dr >= 0 for all t;
both routes are implemented and cross-checked. The quantum Brownian motion
model supplies (eps, mu) = (-gamma_t, Delta_t) from second-order
time-convolutionless damping/diffusion coefficients for an Ohmic bath with
exponential cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .divisibility import GaussianProcess
from .quadrature import CumulativeIntegral

__all__ = [
    "RateProfile",
    "PiecewiseConstantRates",
    "CallableRates",
    "damping_profile",
    "phase_insensitive_process",
    "physicality_eigenvalues",
    "physicality_integrals",
    "PhysicalityResult",
    "is_physical",
    "QbmParams",
    "qbm_coefficients",
    "qbm_rate_profile",
    "qbm_process",
    "canonical_variance_product",
    "AmplificationWindow",
    "amplification_windows",
]


class RateProfile:
    """Gain/noise rate pair (eps, mu) on [0, horizon] with cached integrals.

    Subclasses provide vectorized ``eps``, ``mu``, the cumulative gain
    exponent ``log_gain`` (E), the damped noise integral ``noise_integral``
    (I), and ``weighted_gain_integral`` (H = int eps e^{-2E}), which backs
    the integral form of the physicality conditions.
    """

    horizon: float

    def eps(self, t):
        raise NotImplementedError

    def mu(self, t):
        raise NotImplementedError

    def log_gain(self, t):
        raise NotImplementedError

    def noise_integral(self, t):
        raise NotImplementedError

    def weighted_gain_integral(self, t):
        raise NotImplementedError


def _phi(e, dt):
    """int_0^dt e^{-2 e r} dr, stable for small and zero rates."""
    e = np.asarray(e, dtype=float)
    dt = np.asarray(dt, dtype=float)
    safe = np.where(e == 0.0, 1.0, e)
    return np.where(e == 0.0, dt, -np.expm1(-2.0 * safe * dt) / (2.0 * safe))


class PiecewiseConstantRates(RateProfile):
    """Rates constant on contiguous segments [t0, t1); closed-form integrals."""

    def __init__(self, segments):
        segs = [(float(a), float(b), float(e), float(m)) for a, b, e, m in segments]
        if not segs:
            raise ValueError("at least one segment required")
        if segs[0][0] != 0.0:
            raise ValueError("first segment must start at t = 0")
        for (a, b, _, _), (a2, _, _, _) in zip(segs, segs[1:]):
            if b != a2:
                raise ValueError("segments must be contiguous")
        if any(b <= a for a, b, _, _ in segs):
            raise ValueError("segments must have positive length")
        self._t0 = np.array([s[0] for s in segs])
        self._t1 = np.array([s[1] for s in segs])
        self._eps = np.array([s[2] for s in segs])
        self._mu = np.array([s[3] for s in segs])
        self.horizon = float(self._t1[-1])
        # Prefix values of E, I, H at segment starts.
        k = len(segs)
        E0 = np.zeros(k)
        I0 = np.zeros(k)
        H0 = np.zeros(k)
        for i in range(k - 1):
            dt = self._t1[i] - self._t0[i]
            w = np.exp(-2.0 * E0[i]) * _phi(self._eps[i], dt)
            E0[i + 1] = E0[i] + self._eps[i] * dt
            I0[i + 1] = I0[i] + self._mu[i] * w
            H0[i + 1] = H0[i] + self._eps[i] * w
        self._E0, self._I0, self._H0 = E0, I0, H0

    @property
    def segments(self) -> list[tuple[float, float, float, float]]:
        return list(zip(self._t0, self._t1, self._eps, self._mu))

    def _index(self, t):
        t = np.asarray(t, dtype=float)
        if (t < -1e-12).any() or (t > self.horizon * (1 + 1e-12)).any():
            raise ValueError("time outside the profile domain")
        return np.clip(np.searchsorted(self._t0, t, side="right") - 1,
                       0, len(self._t0) - 1)

    def eps(self, t):
        return self._eps[self._index(t)]

    def mu(self, t):
        return self._mu[self._index(t)]

    def log_gain(self, t):
        i = self._index(t)
        return self._E0[i] + self._eps[i] * (np.asarray(t, dtype=float) - self._t0[i])

    def noise_integral(self, t):
        i = self._index(t)
        dt = np.asarray(t, dtype=float) - self._t0[i]
        return self._I0[i] + self._mu[i] * np.exp(-2.0 * self._E0[i]) * _phi(self._eps[i], dt)

    def weighted_gain_integral(self, t):
        i = self._index(t)
        dt = np.asarray(t, dtype=float) - self._t0[i]
        return self._H0[i] + self._eps[i] * np.exp(-2.0 * self._E0[i]) * _phi(self._eps[i], dt)


class CallableRates(RateProfile):
    """Rates given as vectorized callables; integrals via adaptive quadrature.

    All caches are built at construction and read-only afterwards.
    """

    def __init__(self, eps_fn, mu_fn, horizon: float, *, abs_tol: float = 1e-10,
                 initial_intervals: int = 512):
        self.horizon = float(horizon)
        self._eps_fn = eps_fn
        self._mu_fn = mu_fn
        self._E = CumulativeIntegral(eps_fn, self.horizon, abs_tol=abs_tol,
                                     initial_intervals=initial_intervals)
        damp = lambda r: np.exp(-2.0 * self._E.values(r))
        self._I = CumulativeIntegral(lambda r: mu_fn(r) * damp(r), self.horizon,
                                     abs_tol=abs_tol,
                                     initial_intervals=initial_intervals)
        self._H = CumulativeIntegral(lambda r: eps_fn(r) * damp(r), self.horizon,
                                     abs_tol=abs_tol,
                                     initial_intervals=initial_intervals)

    def eps(self, t):
        return np.asarray(self._eps_fn(np.asarray(t, dtype=float)), dtype=float)

    def mu(self, t):
        return np.asarray(self._mu_fn(np.asarray(t, dtype=float)), dtype=float)

    def log_gain(self, t):
        return self._E.values(t)

    def noise_integral(self, t):
        return self._I.values(t)

    def weighted_gain_integral(self, t):
        return self._H.values(t)


def damping_profile(gamma: float, nu_inf: float = 0.5,
                    horizon: float = 10.0) -> PiecewiseConstantRates:
    """Constant-rate damping toward a thermal state of parameter nu_inf.

    eps = -gamma, mu = 2 gamma nu_inf, so Y_t = nu_inf (1 - e^{-2 gamma t}) 1.
    With nu_inf = 1/2 the rates sit exactly on the CP/NP border.
    """
    if gamma <= 0:
        raise ValueError("damping rate must be positive")
    return PiecewiseConstantRates([(0.0, horizon, -gamma, 2.0 * gamma * nu_inf)])


def phase_insensitive_process(rates: RateProfile) -> GaussianProcess:
    """Synthesize the one-mode process generated by a rate profile.

    Returns an analytic process with exact derivative evaluator
    dX = eps e^E 1, dY = (2 eps e^{2E} I + mu) 1.
    """
    eye = np.eye(2)

    def evaluate(t: float):
        g = np.exp(float(rates.log_gain(t)))
        return g * eye, (g * g * float(rates.noise_integral(t))) * eye

    def derivative(t: float):
        e = float(rates.eps(t))
        m = float(rates.mu(t))
        E = float(rates.log_gain(t))
        I = float(rates.noise_integral(t))
        g = np.exp(E)
        return (e * g) * eye, (2.0 * e * g * g * I + m) * eye

    return GaussianProcess(n=1, horizon=rates.horizon, evaluator=evaluate,
                           derivative=derivative, kind="rate-generated")


def physicality_eigenvalues(rates: RateProfile, t) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalue pair deciding complete positivity of the global map at t.

    Lambda_pm = +-1/2 + e^{2E(t)} (-+1/2 + I(t)); both must be nonnegative.
    Vectorized over t.
    """
    E = np.asarray(rates.log_gain(t), dtype=float)
    I = np.asarray(rates.noise_integral(t), dtype=float)
    g2 = np.exp(2.0 * E)
    return 0.5 + g2 * (I - 0.5), -0.5 + g2 * (I + 0.5)


def physicality_integrals(rates: RateProfile, t) -> tuple[np.ndarray, np.ndarray]:
    """Integral form of the physicality conditions, paired with Lambda_pm.

    Returns (int e^{-2E}(mu - eps), int e^{-2E}(mu + eps)); each equals
    e^{-2E(t)} times the corresponding eigenvalue, so signs must agree.
    """
    I = np.asarray(rates.noise_integral(t), dtype=float)
    H = np.asarray(rates.weighted_gain_integral(t), dtype=float)
    return I - H, I + H


@dataclass(frozen=True)
class PhysicalityResult:
    physical: bool
    violation_time: float | None


def is_physical(rates: RateProfile, grid: int = 400,
                tol: float = 1e-8) -> PhysicalityResult:
    """Global-physicality verdict of a rate profile over its horizon.

    Checks both integral conditions on the grid and cross-checks the
    eigenvalues; the first violation is located by bisection.
    """
    T = rates.horizon
    ts = np.linspace(0.0, T, grid + 1)[1:]

    def worst(t):
        gp, gm = physicality_integrals(rates, t)
        lp, lm = physicality_eigenvalues(rates, t)
        return np.minimum(np.minimum(gp, gm), np.minimum(lp, lm))

    vals = worst(ts)
    bad = np.flatnonzero(vals < -tol)
    if not bad.size:
        return PhysicalityResult(physical=True, violation_time=None)
    lo = 0.0 if bad[0] == 0 else float(ts[bad[0] - 1])
    hi = float(ts[bad[0]])
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if float(worst(np.array([mid]))[0]) < -tol:
            hi = mid
        else:
            lo = mid
    return PhysicalityResult(physical=False, violation_time=hi)


@dataclass(frozen=True)
class QbmParams:
    """Quantum Brownian motion: oscillator of frequency omega0 in an Ohmic
    bath with exponential cutoff omega_c, dimensionless coupling alpha,
    bath temperature T_bath (0 supported)."""

    omega0: float
    omega_c: float
    alpha: float
    T_bath: float = 0.0
    horizon: float | None = None

    def __post_init__(self):
        if self.omega0 <= 0 or self.omega_c <= 0 or self.alpha <= 0:
            raise ValueError("omega0, omega_c, alpha must be positive")
        if self.T_bath < 0:
            raise ValueError("bath temperature must be nonnegative")
        if self.horizon is None:
            object.__setattr__(self, "horizon", 30.0 / self.omega0)
        elif self.horizon <= 0:
            raise ValueError("horizon must be positive")


def _qbm_cos_kernel(p: QbmParams, s: np.ndarray) -> np.ndarray:
    """int_0^inf w e^{-w/wc} coth(w/2T) cos(w s) dw (coth -> 1 at T = 0).

    The coth series sums term by term to a trigamma function:
    Re[(a - is)^-2] + 2 T^2 Re[psi_1(T (a - is) + 1)] with a = 1/wc.
    """
    a = 1.0 / p.omega_c
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if p.T_bath == 0.0:
        return (a * a - s * s) / (a * a + s * s) ** 2
    T = p.T_bath
    vacuum = (a * a - s * s) / (a * a + s * s) ** 2
    thermal = np.array([
        float(mpmath.polygamma(1, complex(T * (a - 1j * si) + 1.0)).real)
        for si in s
    ])
    return vacuum + 2.0 * T * T * thermal


def _qbm_sin_kernel(p: QbmParams, s: np.ndarray) -> np.ndarray:
    """int_0^inf w e^{-w/wc} sin(w s) dw (temperature independent)."""
    a = 1.0 / p.omega_c
    return 2.0 * a * s / (a * a + s * s) ** 2


@lru_cache(maxsize=8)
def _qbm_integrals(p: QbmParams) -> tuple[CumulativeIntegral, CumulativeIntegral]:
    diffusion = CumulativeIntegral(
        lambda s: np.cos(p.omega0 * s) * _qbm_cos_kernel(p, s), p.horizon,
    )
    damping = CumulativeIntegral(
        lambda s: np.sin(p.omega0 * s) * _qbm_sin_kernel(p, s), p.horizon,
    )
    return diffusion, damping


def qbm_coefficients(p: QbmParams, t) -> tuple[np.ndarray, np.ndarray]:
    """(diffusion Delta_t, damping gamma_t), second-order time-convolutionless.

    Delta(t) = alpha^2 int_0^t cos(omega0 s) K_cos(s) ds and
    gamma(t) = alpha^2 int_0^t sin(omega0 s) K_sin(s) ds, with the bath
    kernels integrated in closed form for the Ohmic-exponential spectral
    density. Vectorized over t.
    """
    diffusion, damping = _qbm_integrals(p)
    a2 = p.alpha * p.alpha
    return a2 * diffusion.values(t), a2 * damping.values(t)


def qbm_rate_profile(p: QbmParams) -> CallableRates:
    """Rate profile (eps, mu) = (-gamma_t, Delta_t) of the Brownian motion model."""
    diffusion, damping = _qbm_integrals(p)
    a2 = p.alpha * p.alpha
    return CallableRates(
        eps_fn=lambda t: -a2 * damping.values(t),
        mu_fn=lambda t: a2 * diffusion.values(t),
        horizon=p.horizon,
    )


def qbm_process(p: QbmParams) -> GaussianProcess:
    """Phase-insensitive process generated by the Brownian motion rates."""
    return phase_insensitive_process(qbm_rate_profile(p))


def canonical_variance_product(rates: RateProfile, nu: float,
                               t: float) -> tuple[float, bool]:
    """Product of canonical variances of an initial thermal state under the map.

    Returns ``(e^{4E(t)} (nu + I(t))^2, violated)`` where ``violated`` flags
    an uncertainty-principle violation (product below 1/4 - 1e-10).
    """
    if nu < 0.5:
        raise ValueError("thermal parameter nu must be at least 1/2")
    E = float(rates.log_gain(t))
    I = float(rates.noise_integral(t))
    value = float(np.exp(4.0 * E) * (nu + I) ** 2)
    return value, value < 0.25 - 1e-10


@dataclass(frozen=True)
class AmplificationWindow:
    t_start: float
    t_end: float
    max_gap: float


def amplification_windows(rates: RateProfile,
                          grid: int = 400) -> list[AmplificationWindow]:
    """Maximal intervals of amplification beating the quantum limit.

    A window requires strict intermediate gain with sub-quantum-limit added
    noise: eps > 0 and 0 <= mu < eps. The boundary mu = eps (the
    quantum-limited amplifier) is excluded. ``max_gap`` is the largest
    eps - mu over the window's samples.
    """
    T = rates.horizon
    ts = (np.arange(grid) + 0.5) * (T / grid)
    eps = np.asarray(rates.eps(ts), dtype=float)
    mu = np.asarray(rates.mu(ts), dtype=float)
    active = (eps > 0.0) & (mu >= 0.0) & (mu < eps)

    def active_at(t: float) -> bool:
        e = float(rates.eps(t))
        m = float(rates.mu(t))
        return e > 0.0 and 0.0 <= m < e

    def refine(lo: float, hi: float, lo_active: bool) -> float:
        resolution = T / (100.0 * grid)
        while hi - lo > resolution:
            mid = 0.5 * (lo + hi)
            if active_at(mid) == lo_active:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    windows = []
    i = 0
    while i < grid:
        if not active[i]:
            i += 1
            continue
        j = i
        while j + 1 < grid and active[j + 1]:
            j += 1
        if i == 0:
            start = 0.0 if active_at(0.0) else refine(0.0, float(ts[0]), False)
        else:
            start = refine(float(ts[i - 1]), float(ts[i]), False)
        if j == grid - 1:
            end = T if active_at(T) else refine(float(ts[j]), T, True)
        else:
            end = refine(float(ts[j]), float(ts[j + 1]), True)
        gap = float((eps[i:j + 1] - mu[i:j + 1]).max())
        windows.append(AmplificationWindow(t_start=start, t_end=end, max_gap=gap))
        i = j + 1
    return windows
