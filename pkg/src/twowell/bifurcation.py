"""Fixed points of the Josephson flow, their stability, and the critical xi.

Stationary points satisfy sin(phi0) = 0, so phi0 is 0 or pi, together with
dphi/dtau = 0.  On a branch with c = cos(phi0) the stationarity residual is

    R(x) = delta + (1 - 2x) * (c / (2 sqrt(x(1-x))) - xi),

and R'(x) = h_xx = 2 xi - c / (4 (x(1-x))**1.5).  The zeros of R' are known in
closed form, so each branch splits into at most three monotone pieces, each
holding at most one root.  That makes root counting exact even when two roots
are about to merge at the fold.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from scipy.optimize import brentq, root

from .errors import DomainError, ParameterError, RefinementError
from .model import BOUNDARY_MARGIN, PhasePoint, energy_hessian

PHASES = {"0": 0.0, "pi": math.pi}
BRANCHES = ("P", "S", "S_plus", "S_minus", "unlabeled")
STABLE, SADDLE, MARGINAL = "stable_center", "unstable_saddle", "marginal"

CLASSIFY_TOLERANCE = 1e-9
MERGE_TOLERANCE = 1e-9
ROOT_XTOL = 1e-14
COUNT_PROBE = 1e-6


@dataclass(frozen=True)
class FixedPoint:
    x0: float
    phi0: str  # "0" or "pi", never a float
    branch: str
    stability: str
    residual: float

    def __post_init__(self):
        if self.phi0 not in PHASES:
            raise ParameterError(f"phi0 must be '0' or 'pi', got {self.phi0!r}")
        if self.branch not in BRANCHES:
            raise ParameterError(f"unknown branch {self.branch!r}")
        if self.stability not in (STABLE, SADDLE, MARGINAL):
            raise ParameterError(f"unknown stability {self.stability!r}")

    @property
    def phi(self) -> float:
        return PHASES[self.phi0]

    @property
    def point(self) -> PhasePoint:
        return PhasePoint(self.x0, self.phi)

    @property
    def stable(self) -> bool:
        return self.stability == STABLE

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "FixedPoint":
        return cls(x0=float(d["x0"]), phi0=str(d["phi0"]), branch=d["branch"],
                   stability=d["stability"], residual=float(d["residual"]))


@dataclass(frozen=True)
class CriticalResult:
    delta: float
    xi_c: float
    bracket: tuple[float, float]
    counts_below: tuple[int, int]  # (stable, unstable)
    counts_above: tuple[int, int]

    def to_dict(self) -> dict:
        return {"delta": self.delta, "xi_c": self.xi_c,
                "bracket_lo": self.bracket[0], "bracket_hi": self.bracket[1],
                "counts_below": list(self.counts_below),
                "counts_above": list(self.counts_above)}

    @classmethod
    def from_dict(cls, d: dict) -> "CriticalResult":
        return cls(delta=float(d["delta"]), xi_c=float(d["xi_c"]),
                   bracket=(float(d["bracket_lo"]), float(d["bracket_hi"])),
                   counts_below=tuple(int(v) for v in d["counts_below"]),
                   counts_above=tuple(int(v) for v in d["counts_above"]))


def _effective_delta(delta: float, eq9_as_printed: bool) -> float:
    # The literal printed condition, (1-2x)(c - 2 xi sqrt(s)) = delta sqrt(s),
    # is the flow residual with delta replaced by -delta/2.
    return -0.5 * delta if eq9_as_printed else delta


def _cos(phi0: str) -> float:
    return 1.0 if phi0 == "0" else -1.0


def stationarity_residual(x: float, phi0: str, xi: float, delta: float,
                          eq9_as_printed: bool = False) -> float:
    s = x * (1.0 - x)
    d = _effective_delta(delta, eq9_as_printed)
    return d + (1.0 - 2.0 * x) * (_cos(phi0) / (2.0 * math.sqrt(s)) - xi)


def saddle_node_condition(x: float, phi0: str, xi: float, delta: float,
                          eq9_as_printed: bool = False) -> tuple[float, float]:
    """Residual and its exact x-derivative; both vanish at a fold."""
    if not (BOUNDARY_MARGIN <= x <= 1.0 - BOUNDARY_MARGIN):
        raise DomainError(f"x={x!r} not in the interior")
    if phi0 not in PHASES:
        raise DomainError(f"phi0 must be '0' or 'pi', got {phi0!r}")
    s = x * (1.0 - x)
    f = stationarity_residual(x, phi0, xi, delta, eq9_as_printed)
    df = 2.0 * xi - _cos(phi0) / (4.0 * s * math.sqrt(s))
    return f, df


def _turning_points(c: float, xi: float) -> list[float]:
    """Zeros of R' on branch cos(phi0) = c, sorted."""
    if c * xi <= 0.0:
        return []
    s_star = (1.0 / (8.0 * abs(xi))) ** (2.0 / 3.0)
    disc = 1.0 - 4.0 * s_star
    if disc < 0.0:
        return []
    half = 0.5 * math.sqrt(disc)
    return sorted({0.5 - half, 0.5 + half})


def branch_roots(phi0: str, xi: float, delta: float,
                 eq9_as_printed: bool = False) -> list[float]:
    """All interior zeros of the stationarity residual on one phase branch."""
    c = _cos(phi0)

    def f(x):
        return stationarity_residual(x, phi0, xi, delta, eq9_as_printed)

    lo, hi = BOUNDARY_MARGIN, 1.0 - BOUNDARY_MARGIN
    knots = [lo] + [t for t in _turning_points(c, xi) if lo < t < hi] + [hi]
    values = [f(t) for t in knots]
    roots = []
    for (a, fa), (b, fb) in zip(zip(knots, values), zip(knots[1:], values[1:])):
        if fa == 0.0:
            roots.append(a)
        if fa * fb < 0.0:
            roots.append(brentq(f, a, b, xtol=ROOT_XTOL, rtol=1e-15, maxiter=200))
    if values[-1] == 0.0:
        roots.append(knots[-1])
    merged: list[float] = []
    for r in sorted(roots):
        if not merged or r - merged[-1] > MERGE_TOLERANCE:
            merged.append(r)
    return merged


def _hessian_det(x: float, phi0: str, xi: float, delta: float) -> float:
    h_xx, h_xphi, h_pp = energy_hessian(PhasePoint(x, PHASES[phi0]), xi, delta)
    return h_xx * h_pp - h_xphi * h_xphi


def classify(fp: FixedPoint | tuple[float, str], xi: float, delta: float,
             tolerance: float = CLASSIFY_TOLERANCE) -> str:
    """Stability from the linearized flow.

    The flow is (-h_phi, h_x), so its Jacobian is traceless with determinant
    equal to the Hessian determinant: eigenvalues are +-sqrt(-det).
    """
    x, phi0 = (fp.x0, fp.phi0) if isinstance(fp, FixedPoint) else fp
    det = _hessian_det(x, phi0, xi, delta)
    if abs(det) <= tolerance:
        return MARGINAL
    return STABLE if det > 0.0 else SADDLE


def find_fixed_points(xi: float, delta: float, eq9_as_printed: bool = False,
                      classify_tolerance: float = CLASSIFY_TOLERANCE) -> list[FixedPoint]:
    """Every stationary point, labeled P/S/S_plus/S_minus.

    For xi >= 0 the phi0 = pi branch carries S (it is monotone, one root) and
    the phi0 = 0 branch carries P and, above threshold, S_minus < P < S_plus.
    For xi < 0 the two phases swap roles.
    """
    if not (math.isfinite(xi) and math.isfinite(delta)):
        raise ParameterError("xi and delta must be finite")
    main, other = ("0", "pi") if xi >= 0 else ("pi", "0")
    labeled: list[tuple[float, str, str]] = []
    for x in branch_roots(other, xi, delta, eq9_as_printed):
        labeled.append((x, other, "S"))
    main_roots = branch_roots(main, xi, delta, eq9_as_printed)
    if len(main_roots) == 1:
        labeled.append((main_roots[0], main, "P"))
    elif len(main_roots) == 3:
        for x, name in zip(main_roots, ("S_minus", "P", "S_plus")):
            labeled.append((x, main, name))
    else:
        labeled.extend((x, main, "unlabeled") for x in main_roots)
    out = []
    for x, phi0, name in sorted(labeled, key=lambda t: (t[1] != "0", t[0])):
        out.append(FixedPoint(
            x0=x, phi0=phi0, branch=name,
            stability=classify((x, phi0), xi, delta, classify_tolerance),
            residual=stationarity_residual(x, phi0, xi, delta, eq9_as_printed)))
    return out


def census(points: list[FixedPoint]) -> tuple[int, int]:
    """(stable, unstable) counts."""
    return (sum(p.stability == STABLE for p in points),
            sum(p.stability == SADDLE for p in points))


def _multistable(xi: float, delta: float, eq9_as_printed: bool) -> bool:
    main = "0" if xi >= 0 else "pi"
    return len(branch_roots(main, xi, delta, eq9_as_printed)) > 1


def critical_xi(delta: float, eq9_as_printed: bool = False,
                width: float = 1e-9, monotonicity_probes: int = 64) -> CriticalResult:
    """Bisection on |xi| for the onset of the (3 stable, 1 unstable) regime."""
    if not math.isfinite(delta) or abs(delta) > 10.0:
        raise DomainError(f"|delta| must be <= 10, got {delta!r}")
    lo, hi = 0.0, 1.0
    while not _multistable(hi, delta, eq9_as_printed):
        lo, hi = hi, 2.0 * hi
        if hi > 1e6:
            raise RefinementError(f"no multistable regime found for delta={delta!r}")
    # the count must switch exactly once inside the starting bracket
    flags = [_multistable(lo + (hi - lo) * k / monotonicity_probes, delta, eq9_as_printed)
             for k in range(monotonicity_probes + 1)]
    if any(a and not b for a, b in zip(flags, flags[1:])):
        raise RefinementError("root count is not monotone in the bracket; shrink it")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if _multistable(mid, delta, eq9_as_printed):
            hi = mid
        else:
            lo = mid
    # census a little outside the bracket, where no point is marginal
    probe = COUNT_PROBE * max(1.0, hi)
    below = census(find_fixed_points(max(lo - probe, 0.0), delta, eq9_as_printed))
    above = census(find_fixed_points(hi + probe, delta, eq9_as_printed))
    return CriticalResult(delta=float(delta), xi_c=0.5 * (lo + hi), bracket=(lo, hi),
                          counts_below=below, counts_above=above)


def fold_point(delta: float, eq9_as_printed: bool = False) -> tuple[float, float]:
    """(x, xi) where the residual and its derivative vanish together, xi > 0.

    Solved directly by Newton iteration on the 2x2 system, independent of the
    bisection in :func:`critical_xi`.  At delta = 0 the fold degenerates into
    the symmetric pitchfork at (1/2, 1).
    """
    d = _effective_delta(delta, eq9_as_printed)
    if d == 0.0:
        return 0.5, 1.0

    def system(v):
        x, xi = v
        x = min(max(x, 1e-6), 1 - 1e-6)
        return list(saddle_node_condition(x, "0", xi, d))

    # the fold sits on the side of x = 1/2 opposite to the sign of delta
    guess = [0.5 - 0.2 * math.copysign(1.0, d), 1.0 + abs(d)]
    sol = root(system, guess, method="hybr", tol=1e-13)
    if max(abs(v) for v in sol.fun) > 1e-10:
        raise RefinementError(f"fold solve failed: {sol.message}")
    return float(sol.x[0]), float(sol.x[1])
