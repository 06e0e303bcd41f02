"""Time integration of the reduced Josephson equations.

Stepping is delegated to the Dormand-Prince 8(5,3) code shipped with scipy
(``scipy.integrate.ode('dop853')``).  Every accepted step is recorded as a
sample.  The energy h is checked on every sample; if the drift bound is
violated the run is repeated with a tenfold tighter tolerance.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import ode

from .errors import DomainError, EstimationError, NumericalError, StiffnessError
from .model import BOUNDARY_MARGIN, PhasePoint, canonical_phase, energy_scale

ENERGY_DRIFT_TOLERANCE = 1e-8
DEFAULT_RTOL = 1e-11
DEFAULT_DTAU_MAX = 0.1
# a failed step this close to the edge is reported as a boundary event
BOUNDARY_GUARD = 1e-4


@dataclass(frozen=True)
class StepStats:
    accepted: int
    rejected: int
    max_energy_drift: float
    boundary_event: bool = False
    rtol: float = DEFAULT_RTOL


@dataclass(frozen=True)
class Trajectory:
    tau: np.ndarray
    x: np.ndarray
    phi: np.ndarray  # canonical, in (-pi, pi]
    h: np.ndarray
    xi: float
    delta: float
    step_stats: StepStats
    phi_unwrapped: np.ndarray = field(repr=False, default=None)

    def __len__(self):
        return len(self.tau)

    def point(self, i: int) -> PhasePoint:
        return PhasePoint(float(self.x[i]), float(self.phi[i]))

    @property
    def start(self) -> PhasePoint:
        return self.point(0)

    @property
    def end(self) -> PhasePoint:
        return self.point(-1)


@dataclass(frozen=True)
class TrappingReport:
    trapped: bool
    side: str  # "left", "right" or "none"
    min_x: float
    max_x: float


@dataclass(frozen=True)
class PeriodEstimate:
    period: float
    relative_stderr: float
    cycles: int

    def __float__(self):
        return self.period


_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def relative_energy_drift(h: np.ndarray, xi: float, delta: float) -> float:
    """max |h - h(0)| measured against the energy scale of the surface."""
    scale = max(abs(float(h[0])), energy_scale(xi, delta))
    return float(np.max(np.abs(h - h[0]))) / scale


def _run(start: PhasePoint, xi: float, delta: float, tau_end: float,
         dtau_max: float, rtol: float):
    floor = BOUNDARY_MARGIN * (1.0 - BOUNDARY_MARGIN)

    def rhs(t, y):
        x, phi = y.tolist()  # plain floats: numpy scalar arithmetic is several times slower
        s = x * (1.0 - x)
        if s < floor:  # trial stages may poke past the edge; keep them finite
            s = floor
        r = math.sqrt(s)
        return [r * math.sin(phi), delta + (1.0 - 2.0 * x) * (math.cos(phi) / (2.0 * r) - xi)]

    samples: list[tuple[float, float, float]] = []
    hit_edge = []

    def solout(t, y):
        x, phi = y.tolist()
        samples.append((t, x, phi))
        if not (BOUNDARY_MARGIN <= x <= 1.0 - BOUNDARY_MARGIN):
            hit_edge.append(t)
            return -1
        return 0

    solver = ode(rhs).set_integrator("dop853", rtol=rtol, atol=rtol * 1e-2,
                                     nsteps=10**9, max_step=dtau_max)
    solver.set_solout(solout)
    solver.set_initial_value([start.x, start.phi], 0.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        solver.integrate(tau_end)
    iwork = getattr(solver._integrator, "iwork", None)
    accepted, rejected = (int(iwork[18]), int(iwork[19])) if iwork is not None else (len(samples) - 1, 0)

    boundary = bool(hit_edge)
    if not boundary and not solver.successful():
        x_last = samples[-1][1] if samples else start.x
        if min(x_last, 1.0 - x_last) < BOUNDARY_GUARD:
            boundary = True
        else:
            raise StiffnessError(f"step size underflow at tau={samples[-1][0] if samples else 0.0:g}")
    # drop a final sample that left the admissible strip
    while samples and not (BOUNDARY_MARGIN <= samples[-1][1] <= 1.0 - BOUNDARY_MARGIN):
        samples.pop()
    # solout may repeat the final time when integrate() is asked to land on it
    dedup = [samples[0]]
    for smp in samples[1:]:
        if smp[0] > dedup[-1][0]:
            dedup.append(smp)
    return np.array(dedup), accepted, rejected, boundary


def integrate(start: PhasePoint, xi: float, delta: float, tau_end: float,
              dtau_max: float = DEFAULT_DTAU_MAX, rtol: float = DEFAULT_RTOL,
              energy_drift_tolerance: float = ENERGY_DRIFT_TOLERANCE,
              max_refinements: int = 3) -> Trajectory:
    """Integrate the reduced Josephson equations from ``start`` up to ``tau_end``.

    A trajectory that reaches the boundary strip ends early with
    ``step_stats.boundary_event`` set; this is not an error.
    """
    if not start.interior:
        raise DomainError(f"start x={start.x!r} is not interior")
    if not (tau_end > 0.0) or not math.isfinite(tau_end):
        raise DomainError("tau_end must be positive and finite")
    if not dtau_max > 0.0:
        raise DomainError("dtau_max must be positive")
    for _ in range(max_refinements + 1):
        data, accepted, rejected, boundary = _run(start, xi, delta, tau_end, dtau_max, rtol)
        tau, x, phi_u = data[:, 0], data[:, 1], data[:, 2]
        s = x * (1.0 - x)
        h = delta * x - xi * s + np.sqrt(s) * np.cos(phi_u)
        drift = relative_energy_drift(h, xi, delta)
        if drift <= energy_drift_tolerance:
            break
        rtol *= 0.1
    else:
        raise NumericalError(f"energy drift {drift:.3g} above {energy_drift_tolerance:g} "
                             f"after {max_refinements} refinements")
    phi = np.pi - np.mod(np.pi - phi_u, 2 * np.pi)
    for arr in (tau, x, phi, h, phi_u):
        arr.flags.writeable = False
    return Trajectory(tau=tau, x=x, phi=phi, h=h, xi=float(xi), delta=float(delta),
                      step_stats=StepStats(accepted, rejected, drift, boundary, rtol),
                      phi_unwrapped=phi_u)


def detect_trapping(traj: Trajectory) -> TrappingReport:
    lo, hi = float(np.min(traj.x)), float(np.max(traj.x))
    if lo > 0.5:
        return TrappingReport(True, "left", lo, hi)
    if hi < 0.5:
        return TrappingReport(True, "right", lo, hi)
    return TrappingReport(False, "none", lo, hi)


def _crossing_intervals(tau: np.ndarray, x: np.ndarray, level: float, upward: bool) -> np.ndarray:
    a, b = (x[:-1], x[1:]) if upward else (-x[:-1], -x[1:])
    lv = level if upward else -level
    idx = np.nonzero((a < lv) & (b >= lv))[0]
    frac = (lv - a[idx]) / (b[idx] - a[idx])
    return np.diff(tau[idx] + frac * (tau[idx + 1] - tau[idx]))


def measure_period(traj: Trajectory, min_amplitude: float = 1e-12) -> PeriodEstimate:
    """Period from crossings of the time-averaged x, interpolated linearly.

    Intervals between successive upward crossings and between successive
    downward crossings are pooled.
    """
    tau, x = np.asarray(traj.tau), np.asarray(traj.x)
    if len(tau) < 3 or np.ptp(x) < min_amplitude:
        raise EstimationError("trajectory is not oscillatory")
    mean = _trapezoid(x, tau) / (tau[-1] - tau[0])
    intervals = np.concatenate([_crossing_intervals(tau, x, mean, True),
                                _crossing_intervals(tau, x, mean, False)])
    if len(intervals) < 2:
        raise EstimationError("need at least two full oscillations")
    period = float(np.mean(intervals))
    stderr = float(np.std(intervals, ddof=1) / math.sqrt(len(intervals))) / period
    return PeriodEstimate(period, stderr, len(intervals))


def reverse(pt: PhasePoint) -> PhasePoint:
    """Time-reversal partner: the flow is invariant under (tau, phi) -> (-tau, -phi)."""
    return PhasePoint(pt.x, canonical_phase(-pt.phi))

