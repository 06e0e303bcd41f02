"""Harmonic (quadratic) fluctuations around stable fixed points.

Four coefficient variants are kept side by side and never substituted for
one another:

``paper_S``       closed-form coefficients for S at delta = 0, fluctuations
                  dn = 1/dphi = sqrt(N) / (sqrt(2) (1 + |xi|)**(1/4)).
``paper_Spm``     closed-form coefficients for S+- at delta = 0, |xi| > 1,
                  dn = 1/dphi = sqrt(N) / (sqrt(2|xi|) (xi**2 - 1)**(1/4)).
``javanainen_S``  the competing two-mode coefficients for S,
                  E_C = 2 g beta (1 + 0.5/|xi|), E2 = 0.5 g beta/|xi|, read
                  through dn = 1/dphi = (E_J/E_C)**(1/4).
``generic``       exact second derivatives of the mean-field energy at any
                  stable fixed point, E_J = d2H/dphi2, E_C = d2H/dn2, and the
                  oscillator ground state dn = (E_J/E_C)**(1/4)/sqrt(2),
                  dphi = 1/(2 dn).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .bifurcation import FixedPoint, find_fixed_points
from .errors import (ConfigurationError, DomainError, EstimationError,
                     NotACenterError, ParameterError)
from .model import ModelParams, energy_gradient, energy_hessian, reduced_energy

VARIANTS = ("paper_S", "paper_Spm", "javanainen_S", "generic")
CLI_VARIANTS = {"paper-s": "paper_S", "paper-spm": "paper_Spm",
                "javanainen": "javanainen_S", "generic": "generic"}


@dataclass(frozen=True)
class CoefficientSet:
    variant: str
    E1: float
    E2: float
    E_J: float
    E_C: float
    H0_at_fp: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CoefficientSet":
        return cls(variant=d["variant"], **{k: float(d[k]) for k in
                                            ("E1", "E2", "E_J", "E_C", "H0_at_fp")})


@dataclass(frozen=True)
class FluctuationReport:
    delta_n: float
    delta_phi: float
    coefficients: CoefficientSet
    fixed_point: FixedPoint
    params: ModelParams

    @property
    def variant(self) -> str:
        return self.coefficients.variant

    def to_dict(self) -> dict:
        return {"variant": self.variant, "delta_n": self.delta_n, "delta_phi": self.delta_phi,
                "coefficients": self.coefficients.to_dict(),
                "fixed_point": self.fixed_point.to_dict(),
                "params": asdict(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> "FluctuationReport":
        return cls(delta_n=float(d["delta_n"]), delta_phi=float(d["delta_phi"]),
                   coefficients=CoefficientSet.from_dict(d["coefficients"]),
                   fixed_point=FixedPoint.from_dict(d["fixed_point"]),
                   params=ModelParams(**d["params"]))


def normalize_variant(variant: str) -> str:
    v = CLI_VARIANTS.get(variant, variant)
    if v not in VARIANTS:
        raise ConfigurationError(f"unknown variant {variant!r}; choose from {sorted(CLI_VARIANTS)}")
    return v


def _gbeta_over_abs_xi(p: ModelParams) -> float:
    # g beta/|xi| = 2|gamma| sgn(g beta)/N; finite as g beta -> 0 (taken from above)
    sign = -1.0 if p.mean_field < 0 else 1.0
    return sign * 2.0 * abs(p.tunneling) / p.n_total


def _check_preconditions(fp: FixedPoint, p: ModelParams, variant: str) -> None:
    if not fp.stable:
        raise NotACenterError(f"fixed point {fp.branch} at x0={fp.x0:.6g} is {fp.stability}")
    if variant in ("paper_S", "javanainen_S", "paper_Spm") and p.delta != 0.0:
        raise ConfigurationError(f"variant {variant} is defined only for delta = 0")
    if variant in ("paper_S", "javanainen_S") and fp.branch != "S":
        raise ConfigurationError(f"variant {variant} applies to the S fixed point, got {fp.branch}")
    if variant == "paper_Spm":
        if fp.branch not in ("S_plus", "S_minus"):
            raise ConfigurationError(f"variant paper_Spm applies to S+-, got {fp.branch}")
        if abs(p.xi) <= 1.0:
            raise DomainError("variant paper_Spm requires |xi| > 1")


def coefficients(fp: FixedPoint, p: ModelParams, variant: str) -> CoefficientSet:
    variant = normalize_variant(variant)
    _check_preconditions(fp, p, variant)
    N, gb, xi = p.n_total, p.mean_field, p.xi
    pt = fp.point
    h_at = 2.0 * p.tunneling * N * reduced_energy(pt, xi, p.delta)
    if variant == "paper_S":
        a = _gbeta_over_abs_xi(p)
        return CoefficientSet(variant, 0.0, a, a * N**2 / 2, 2 * gb / (1 + abs(xi)), h_at)
    if variant == "javanainen_S":
        a = _gbeta_over_abs_xi(p)
        return CoefficientSet(variant, 0.0, 0.5 * a, a * N**2 / 2, 2 * gb + a, h_at)
    if variant == "paper_Spm":
        sign = 1.0 if fp.branch == "S_plus" else -1.0
        return CoefficientSet(variant, sign * 0.5 * gb * N * math.sqrt(1 - xi**-2),
                              -gb * xi**2, -gb * N**2 / (2 * xi**2),
                              -2 * gb * (xi**2 - 1), h_at)
    # generic: derivatives of H = H0 + 2 gamma N h(n/N, phi)
    two_gamma = 2.0 * p.tunneling
    h_x, _ = energy_gradient(pt, xi, p.delta)
    h_xx, h_xphi, h_pp = energy_hessian(pt, xi, p.delta)
    return CoefficientSet(variant, E1=two_gamma * h_x, E2=two_gamma * h_xphi,
                          E_J=two_gamma * N * h_pp, E_C=two_gamma * h_xx / N, H0_at_fp=h_at)


def predict(fp: FixedPoint, p: ModelParams, variant: str) -> FluctuationReport:
    variant = normalize_variant(variant)
    coef = coefficients(fp, p, variant)
    N, xi = p.n_total, abs(p.xi)
    if variant == "paper_S":
        dn = math.sqrt(N) / (math.sqrt(2.0) * (1.0 + xi) ** 0.25)
        dphi = 1.0 / dn
    elif variant == "paper_Spm":
        dn = math.sqrt(N) / (math.sqrt(2.0 * xi) * (xi**2 - 1.0) ** 0.25)
        dphi = 1.0 / dn
    else:
        ratio = coef.E_J / coef.E_C if coef.E_C != 0.0 else math.copysign(math.inf, coef.E_J)
        if not (ratio > 0.0) or not math.isfinite(ratio):
            raise NotACenterError(f"E_J/E_C = {ratio!r} is not a positive finite number")
        if variant == "javanainen_S":
            dn = ratio**0.25
            dphi = 1.0 / dn
        else:
            dn = ratio**0.25 / math.sqrt(2.0)
            dphi = 0.5 / dn
    return FluctuationReport(dn, dphi, coef, fp, p)


def fixed_point_for(p: ModelParams, branch: str) -> FixedPoint:
    """The fixed point with the given branch label for these parameters."""
    for fp in find_fixed_points(p.xi, p.delta):
        if fp.branch == branch:
            return fp
    raise DomainError(f"no {branch} fixed point at xi={p.xi:g}, delta={p.delta:g}")


def oscillator_frequency(coef: CoefficientSet) -> float:
    """Small-oscillation angular frequency sqrt(E_J E_C) in physical time."""
    prod = coef.E_J * coef.E_C
    if prod <= 0.0:
        raise NotACenterError("E_J E_C must be positive")
    return math.sqrt(prod)


def critical_asymptote(n_total: int, xi: float) -> float:
    """Near-threshold number fluctuation sqrt(N/2) [2(|xi|-1)]**(-1/4)."""
    if abs(xi) <= 1.0:
        raise DomainError("critical asymptote requires |xi| > 1")
    return math.sqrt(n_total / 2.0) * (2.0 * (abs(xi) - 1.0)) ** -0.25


def critical_phase_asymptote(n_total: int, xi: float) -> float:
    if abs(xi) <= 1.0:
        raise DomainError("critical asymptote requires |xi| > 1")
    return math.sqrt(2.0 / n_total) * (2.0 * (abs(xi) - 1.0)) ** 0.25


# regime thresholds on |xi| across the whole N sweep
WEAK_MIN_XI = 50.0
STRONG_MAX_XI = 0.02


def loglog_fit(control: np.ndarray, values: np.ndarray) -> tuple[float, float]:
    """Least-squares slope of log(values) against log(control) and its standard error."""
    control, values = np.asarray(control, float), np.asarray(values, float)
    if len(control) < 4:
        raise EstimationError("need at least 4 sweep points for a fit")
    lx, ly = np.log(control), np.log(values)
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, res, *_ = np.linalg.lstsq(A, ly, rcond=None)
    dof = len(lx) - 2
    resid = ly - A @ coef
    sigma2 = float(resid @ resid) / dof
    cov = sigma2 * np.linalg.inv(A.T @ A)
    return float(coef[0]), float(math.sqrt(cov[0, 0]))


def scaling_sweep(p_base: ModelParams, regime: str, variant: str | None = None,
                  points: int = 13, decades: float = 3.0) -> tuple[np.ndarray, np.ndarray]:
    """(control, delta_n) for one of the three regimes.

    weak/strong: N runs over ``decades`` decades upward from p_base.n_total
    with g beta/gamma held fixed (same trap, more atoms), S fixed point.
    critical: |xi| - 1 runs over [1e-4, 1e-2] at fixed N, S+ fixed point.
    """
    if points < 4:
        raise EstimationError("need at least 4 sweep points for a fit")
    if p_base.tilt != 0.0:
        raise ConfigurationError("scaling sweeps are defined at delta = 0")
    sign = -1.0 if p_base.xi < 0 else 1.0
    if regime in ("weak", "strong"):
        variant = normalize_variant(variant or "paper_S")
        ns = np.unique(np.rint(p_base.n_total * np.logspace(0, decades, points)).astype(int))
        ratio = p_base.mean_field / p_base.tunneling
        xis = np.abs(ratio * ns / 2)
        if regime == "weak" and xis.min() < WEAK_MIN_XI:
            raise DomainError(f"weak regime needs |xi| >= {WEAK_MIN_XI:g}, sweep starts at {xis.min():.3g}")
        if regime == "strong" and xis.max() > STRONG_MAX_XI:
            raise DomainError(f"strong regime needs |xi| <= {STRONG_MAX_XI:g}, sweep reaches {xis.max():.3g}")
        out = []
        for n in ns:
            p = ModelParams(int(n), p_base.tunneling, p_base.mean_field, 0.0)
            out.append(predict(fixed_point_for(p, "S"), p, variant).delta_n)
        return ns.astype(float), np.array(out)
    if regime == "critical":
        variant = normalize_variant(variant or "paper_Spm")
        eps = np.logspace(-4, -2, points)
        out = []
        for e in eps:
            p = ModelParams.from_reduced(sign * (1.0 + e), 0.0, p_base.n_total)
            out.append(predict(fixed_point_for(p, "S_plus"), p, variant).delta_n)
        return eps, np.array(out)
    raise ParameterError(f"unknown regime {regime!r}")


def scaling_exponents(p_base: ModelParams, regime: str, variant: str | None = None,
                      points: int = 13) -> tuple[float, float]:
    control, dn = scaling_sweep(p_base, regime, variant, points)
    return loglog_fit(control, dn)
