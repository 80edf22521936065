"""Time-dependent Gaussian processes and their divisibility classification.

A process is a family (X_t, Y_t) starting at the identity map. Its
intermediate map between t and t + tau is

    X_tau(t) = X_{t+tau} X_t^{-1},   Y_tau(t) = Y_{t+tau} - X_tau Y_t X_tau^T.

For one mode, the first-order-in-tau behaviour of the intermediate maps is
captured by four local rates:

    eps   = (1/2) (d det X_t / dt) / det X_t
    delta = (det X_t)^2 det(d/dt (X_t^{-1} Y_t X_t^{-T}))
    kappa = d tr Y_t / dt - 2 tr(X_t' X_t^{-1} Y_t)
    mu    = sgn(kappa) sqrt(delta)   if delta >= 0, else -sqrt(|delta|)

and the point (eps, mu) classifies the process locally: completely positive
iff mu >= |eps|, positive iff 2 mu >= |eps| - eps, otherwise not positive.
A process is Markovian when every point is CP, weakly non-Markovian when some
point leaves CP but all stay positive, and strongly non-Markovian otherwise.
"""

from __future__ import annotations

import os
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .channels import GaussianMap, ScanSpec, is_positive_one_mode
from .errors import SingularMapError
from .symplectic import hermitian_min_eig, symplectic_form

__all__ = [
    "REGION_CP",
    "REGION_P",
    "REGION_NP",
    "CLASS_MARKOVIAN",
    "CLASS_WEAK",
    "CLASS_STRONG",
    "GaussianProcess",
    "LocalRates",
    "RegionSample",
    "Crossing",
    "DivisibilityReport",
    "TrajectoryPoint",
    "intermediate_map",
    "local_rates",
    "classify_point",
    "classify_process",
    "check_intermediate_cp",
    "check_intermediate_p_one_mode",
    "trajectory",
    "worker_count",
]

REGION_CP = "CP"
REGION_P = "P_not_CP"
REGION_NP = "NP"

CLASS_MARKOVIAN = "markovian"
CLASS_WEAK = "weak"
CLASS_STRONG = "strong"

_DET_FLOOR = 1e-12


def worker_count(threads: int | None = None) -> int:
    """Resolve a thread cap: explicit argument, else GAUSSDIV_THREADS (0 = auto)."""
    if threads is None:
        raw = os.environ.get("GAUSSDIV_THREADS")
        if raw is None:
            return 1
        threads = int(raw)
    if threads == 0:
        return os.cpu_count() or 1
    return max(1, threads)


@dataclass(frozen=True)
class GaussianProcess:
    """Time-parameterized family (X_t, Y_t) on [0, horizon].

    The evaluator maps a time to the matrix pair; the optional derivative
    evaluator returns (dX/dt, dY/dt) and is used instead of finite
    differences when present. Invertibility of X_t and constancy of the sign
    of det X_t are checked on sampling grids, not at construction.
    """

    n: int
    horizon: float
    evaluator: Callable[[float], tuple[np.ndarray, np.ndarray]]
    derivative: Callable[[float], tuple[np.ndarray, np.ndarray]] | None = None
    kind: str = "analytic"

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        X0, Y0 = self.evaluator(0.0)
        d = 2 * self.n
        if np.abs(np.asarray(X0) - np.eye(d)).max() > 1e-9:
            raise ValueError("process must start at the identity map (X_0 = 1)")
        if np.abs(np.asarray(Y0)).max() > 1e-9:
            raise ValueError("process must start at the identity map (Y_0 = 0)")

    def sample(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(X_t, Y_t) at a time inside [0, horizon]."""
        if not -1e-12 <= t <= self.horizon * (1 + 1e-12):
            raise ValueError(f"time {t} outside [0, {self.horizon}]")
        X, Y = self.evaluator(float(t))
        return np.asarray(X, dtype=float), np.asarray(Y, dtype=float)

    @classmethod
    def from_table(cls, times, Xs, Ys) -> "GaussianProcess":
        """Cubic-spline interpolation of tabulated (X_t, Y_t) samples.

        The derivative evaluator comes from the spline derivatives, so the
        rate formulas see C^1 data.
        """
        times = np.asarray(times, dtype=float)
        Xs = np.asarray(Xs, dtype=float)
        Ys = np.asarray(Ys, dtype=float)
        if times.ndim != 1 or len(times) < 4:
            raise ValueError("need at least four time samples for cubic splines")
        if times[0] != 0.0 or (np.diff(times) <= 0).any():
            raise ValueError("times must increase strictly from 0")
        n = Xs.shape[1] // 2
        sx = CubicSpline(times, Xs, axis=0)
        sy = CubicSpline(times, Ys, axis=0)
        dsx, dsy = sx.derivative(), sy.derivative()
        return cls(
            n=n,
            horizon=float(times[-1]),
            evaluator=lambda t: (sx(t), sy(t)),
            derivative=lambda t: (dsx(t), dsy(t)),
            kind="tabulated",
        )


@dataclass(frozen=True)
class LocalRates:
    """First-order invariants of the intermediate map at one time."""

    t: float
    eps: float
    delta: float
    kappa: float
    mu: float


@dataclass(frozen=True)
class RegionSample:
    rates: LocalRates
    region: str


@dataclass(frozen=True)
class Crossing:
    t: float
    from_region: str
    to_region: str


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    eps: float
    mu: float
    delta: float
    kappa: float
    region: str


@dataclass(frozen=True)
class DivisibilityReport:
    """Per-time region labels, boundary crossings, and the overall class."""

    samples: list[RegionSample]
    crossings: list[Crossing]
    klass: str

    @property
    def path(self) -> list[tuple[float, float]]:
        """The trajectory {(eps_s, mu_s)} over the sampling grid."""
        return [(s.rates.eps, s.rates.mu) for s in self.samples]

    def to_dict(self) -> dict:
        return {
            "class": self.klass,
            "crossings": [
                {"t": c.t, "from": c.from_region, "to": c.to_region}
                for c in self.crossings
            ],
            "samples": [
                {
                    "t": s.rates.t,
                    "eps": s.rates.eps,
                    "mu": s.rates.mu,
                    "delta": s.rates.delta,
                    "kappa": s.rates.kappa,
                    "region": s.region,
                }
                for s in self.samples
            ],
        }


def intermediate_map(proc: GaussianProcess, t: float, tau: float) -> GaussianMap:
    """The map carrying the evolving system from time t to t + tau.

    Raises:
        SingularMapError: if X_t is singular.
        ValueError: if [t, t + tau] leaves [0, horizon] or tau < 0.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    Xt, Yt = proc.sample(t)
    Xtt, Ytt = proc.sample(t + tau)
    if abs(np.linalg.det(Xt)) < _DET_FLOOR:
        raise SingularMapError(f"X_t singular at t = {t}", t=t)
    X_tau = np.linalg.solve(Xt.T, Xtt.T).T
    Y_tau = Ytt - X_tau @ Yt @ X_tau.T
    return GaussianMap(proc.n, X_tau, 0.5 * (Y_tau + Y_tau.T))


def local_rates(proc: GaussianProcess, t: float, h: float = 1e-4,
                tol_delta: float = 1e-12) -> LocalRates:
    """Local rates (eps, delta, kappa, mu) at an interior time.

    Derivatives come from the process's analytic derivative evaluator when
    present, else from central differences with step ``h`` (clamped near the
    domain ends).

    Raises:
        ValueError: if t is outside (0, horizon), or det X_t < 0 (the
            first-order expansion around the identity does not apply there;
            use the direct intermediate-map checks instead).
        SingularMapError: if X_t is singular.
    """
    if not 0.0 < t < proc.horizon:
        raise ValueError(f"rates are defined for t in (0, {proc.horizon})")
    X, Y = proc.sample(t)
    det_x = np.linalg.det(X)
    if abs(det_x) < _DET_FLOOR:
        raise SingularMapError(f"X_t singular at t = {t}", t=t)
    if det_x < 0:
        raise ValueError(
            "rate-based classification unsupported for det X_t < 0; "
            "use check_intermediate_cp / check_intermediate_p_one_mode"
        )
    if proc.derivative is not None:
        dX, dY = proc.derivative(t)
        dX = np.asarray(dX, dtype=float)
        dY = np.asarray(dY, dtype=float)
    else:
        h_eff = min(h, 0.5 * t, 0.5 * (proc.horizon - t))
        Xp, Yp = proc.sample(t + h_eff)
        Xm, Ym = proc.sample(t - h_eff)
        dX = (Xp - Xm) / (2.0 * h_eff)
        dY = (Yp - Ym) / (2.0 * h_eff)

    Xinv = np.linalg.inv(X)
    eps = 0.5 * np.trace(Xinv @ dX)
    M = dX @ Xinv @ Y
    core = dY - M - M.T
    # (det X)^2 det(d/dt(X^-1 Y X^-T)) collapses to det(core).
    delta = float(np.linalg.det(core))
    kappa = float(np.trace(dY) - 2.0 * np.trace(M))
    if abs(delta) <= tol_delta:
        mu = 0.0
    elif delta >= 0:
        sgn = 1.0 if kappa > 0 else (-1.0 if kappa < 0 else 0.0)
        mu = sgn * np.sqrt(delta)
    else:
        mu = -np.sqrt(-delta)
    return LocalRates(t=float(t), eps=float(eps), delta=delta, kappa=kappa, mu=float(mu))


def classify_point(eps: float, mu: float, margin: float = 1e-6) -> str:
    """Region of a rate point: CP, P_not_CP, or NP (closed inequalities)."""
    if mu >= abs(eps) - margin:
        return REGION_CP
    if 2.0 * mu >= abs(eps) - eps - margin:
        return REGION_P
    return REGION_NP


def _label(rates: LocalRates, margin: float, tol_delta: float) -> str:
    """Region label with the degenerate-noise overrides.

    delta < -tol_delta is never positive; a degenerate delta with strictly
    negative kappa removes noise along one quadrature, which fails even plain
    positivity (the squeezed-probe limit of the scan tends to kappa * tau).
    """
    if rates.delta < -tol_delta:
        return REGION_NP
    if abs(rates.delta) <= tol_delta and rates.kappa < -margin:
        return REGION_NP
    return classify_point(rates.eps, rates.mu, margin)


def _grid_times(horizon: float, n: int) -> np.ndarray:
    return (np.arange(n) + 0.5) * (horizon / n)


def _check_det_sign(proc: GaussianProcess, ts: np.ndarray) -> None:
    dets = np.array([np.linalg.det(proc.sample(t)[0]) for t in ts])
    small = np.abs(dets) < _DET_FLOOR
    if small.any():
        t_bad = float(ts[np.argmax(small)])
        raise SingularMapError(f"X_t singular at grid point t = {t_bad}", t=t_bad)
    signs = np.sign(dets)
    if (signs != signs[0]).any():
        flip = int(np.argmax(signs != signs[0]))
        t_bad = float(0.5 * (ts[flip - 1] + ts[flip])) if flip else float(ts[0])
        raise SingularMapError(
            f"det X_t changes sign near t = {t_bad}; X_t crosses a singularity",
            t=t_bad,
        )
    if signs[0] < 0:
        raise ValueError(
            "rate-based classification unsupported for det X_t < 0 processes"
        )


def _sampled_rates(proc: GaussianProcess, ts: np.ndarray, h: float,
                   threads: int | None) -> list[LocalRates]:
    workers = worker_count(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda t: local_rates(proc, t, h), ts))
    return [local_rates(proc, t, h) for t in ts]


def classify_process(
    proc: GaussianProcess,
    grid: int = 400,
    margin: float = 1e-6,
    h: float = 1e-4,
    tol_delta: float = 1e-12,
    threads: int | None = None,
) -> DivisibilityReport:
    """Classify a process as markovian / weak / strong over a sampling grid.

    Labels each of ``grid`` interior times, locates region crossings by
    bisection to time resolution horizon/(100*grid), and aggregates: all CP
    means Markovian, any NP means strongly non-Markovian, otherwise weakly.

    Raises:
        SingularMapError: on singular X_t or a det-sign flip, carrying the
            offending time.
    """
    if grid < 2:
        raise ValueError("grid must have at least two samples")
    ts = _grid_times(proc.horizon, grid)
    _check_det_sign(proc, ts)
    rates = _sampled_rates(proc, ts, h, threads)
    labels = [_label(r, margin, tol_delta) for r in rates]
    samples = [RegionSample(r, lab) for r, lab in zip(rates, labels)]

    def label_at(t: float) -> str:
        return _label(local_rates(proc, t, h, tol_delta), margin, tol_delta)

    resolution = proc.horizon / (100.0 * grid)
    crossings = []
    for i in range(1, len(ts)):
        if labels[i] == labels[i - 1]:
            continue
        lo, hi = float(ts[i - 1]), float(ts[i])
        lo_label, hi_label = labels[i - 1], labels[i]
        while hi - lo > resolution:
            mid = 0.5 * (lo + hi)
            if label_at(mid) == lo_label:
                lo = mid
            else:
                hi = mid
                hi_label = label_at(mid)
        crossings.append(Crossing(t=0.5 * (lo + hi), from_region=lo_label,
                                  to_region=hi_label))

    if any(lab == REGION_NP for lab in labels):
        klass = CLASS_STRONG
    elif any(lab != REGION_CP for lab in labels):
        klass = CLASS_WEAK
    else:
        klass = CLASS_MARKOVIAN
    return DivisibilityReport(samples=samples, crossings=crossings, klass=klass)


def check_intermediate_cp(proc: GaussianProcess, t: float, tau: float,
                          tol: float = 1e-9) -> tuple[bool, float]:
    """Direct complete-positivity check of the intermediate map at (t, tau)."""
    m = intermediate_map(proc, t, tau)
    omega = symplectic_form(m.n)
    M = 0.5j * (m.X @ omega @ m.X.T) + m.Y.astype(complex) - 0.5j * omega
    margin = hermitian_min_eig(M)
    return bool(margin >= -tol), margin


def check_intermediate_p_one_mode(
    proc: GaussianProcess, t: float, tau: float, tol: float = 1e-9,
    scan: ScanSpec | None = None,
) -> tuple[bool, float]:
    """Direct positivity check of the one-mode intermediate map at (t, tau)."""
    m = intermediate_map(proc, t, tau)
    positive, p_margin, _ = is_positive_one_mode(m, tol, scan)
    return positive, p_margin


def trajectory(
    proc: GaussianProcess,
    grid: int = 400,
    margin: float = 1e-6,
    h: float = 1e-4,
    tol_delta: float = 1e-12,
    threads: int | None = None,
) -> list[TrajectoryPoint]:
    """Rates and region label at each grid time, ordered by time."""
    if grid < 2:
        raise ValueError("grid must have at least two samples")
    ts = _grid_times(proc.horizon, grid)
    _check_det_sign(proc, ts)
    rates = _sampled_rates(proc, ts, h, threads)
    return [
        TrajectoryPoint(
            t=r.t, eps=r.eps, mu=r.mu, delta=r.delta, kappa=r.kappa,
            region=_label(r, margin, tol_delta),
        )
        for r in rates
    ]
