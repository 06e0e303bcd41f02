"""Two-mode parameters, reduced units and the mean-field energy surface.

Units: hbar = 1, every coupling is an angular frequency.  With
xi = g*beta*N / (2*gamma) and delta = Delta / (2*gamma) the mean-field energy
per particle in units of 2*gamma reads

    h(x, phi) = delta*x - xi*x*(1 - x) + sqrt(x*(1 - x))*cos(phi),

so that H - H0 = 2*gamma*N*h.  Reduced time is tau = 2*gamma*t and the
Josephson equations become

    dx/dtau   = sqrt(x(1-x)) sin(phi)                              = -dh/dphi
    dphi/dtau = delta - xi(1-2x) + (1-2x) cos(phi) / (2 sqrt(x(1-x))) = +dh/dx

The orientation of phi follows these equations (the "explicit" Josephson
form); the alternative orientation is the relabeling phi -> -phi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, SingularityError

BOUNDARY_MARGIN = 1e-9


def canonical_phase(phi: float) -> float:
    """Representative of ``phi`` modulo 2*pi in (-pi, pi]."""
    return math.pi - (math.pi - phi) % (2 * math.pi)


@dataclass(frozen=True)
class ModelParams:
    """Physical couplings of the two-mode Hamiltonian.

    ``mean_field`` is the product g*beta; the two factors never appear
    separately.
    """

    n_total: int
    tunneling: float
    mean_field: float
    tilt: float = 0.0

    def __post_init__(self):
        if int(self.n_total) != self.n_total or self.n_total < 1:
            raise ParameterError(f"n_total must be a positive integer, got {self.n_total!r}")
        object.__setattr__(self, "n_total", int(self.n_total))
        for name in ("tunneling", "mean_field", "tilt"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_reduced(cls, xi: float, delta: float, n_total: int) -> "ModelParams":
        """Physical parameters with gamma = 1/2, so that 2*gamma = 1."""
        return cls(n_total=n_total, tunneling=0.5, mean_field=xi / n_total, tilt=delta)

    def _require_tunneling(self) -> None:
        if self.tunneling == 0.0:
            raise ParameterError("tunneling must be nonzero (reduced parameters divide by 2*gamma)")

    @property
    def xi(self) -> float:
        self._require_tunneling()
        return self.mean_field * self.n_total / (2 * self.tunneling)

    @property
    def delta(self) -> float:
        self._require_tunneling()
        return self.tilt / (2 * self.tunneling)

    @property
    def h0(self) -> float:
        """Constant separating the Fock Hamiltonian from N * 2*gamma * h.

        Expanding the quadratic terms of the Fock Hamiltonian at fixed N gives
        -Delta*N/2 + g*beta*N**2/2.
        """
        return -self.tilt * self.n_total / 2 + self.mean_field * self.n_total**2 / 2


def reduced_params(p: ModelParams) -> tuple[float, float]:
    return p.xi, p.delta


@dataclass(frozen=True)
class PhasePoint:
    """A point (x, phi) on the cylinder; phi is stored in (-pi, pi]."""

    x: float
    phi: float

    def __post_init__(self):
        x = float(self.x)
        if not (0.0 <= x <= 1.0):
            raise DomainError(f"population fraction x={x!r} outside [0, 1]")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "phi", canonical_phase(float(self.phi)))

    @property
    def interior(self) -> bool:
        return BOUNDARY_MARGIN <= self.x <= 1.0 - BOUNDARY_MARGIN


def _require_interior(x: float, margin: float = BOUNDARY_MARGIN) -> None:
    if not (margin <= x <= 1.0 - margin):
        raise SingularityError(f"x={x!r} within {margin:g} of the boundary")


def reduced_energy(pt: PhasePoint, xi: float, delta: float) -> float:
    x = pt.x
    s = x * (1.0 - x)
    return delta * x - xi * s + math.sqrt(s) * math.cos(pt.phi)


def energy_scale(xi: float, delta: float) -> float:
    """Upper bound of |h| over the whole cylinder."""
    return abs(delta) + abs(xi) / 4 + 0.5


def energy_gradient(pt: PhasePoint, xi: float, delta: float) -> tuple[float, float]:
    """(dh/dx, dh/dphi), exact."""
    x = pt.x
    _require_interior(x)
    s = x * (1.0 - x)
    r = math.sqrt(s)
    # grouped so that (1 - 2x) multiplies a small difference near x = 1/2
    h_x = delta + (1.0 - 2.0 * x) * (math.cos(pt.phi) / (2.0 * r) - xi)
    h_phi = -r * math.sin(pt.phi)
    return h_x, h_phi


def flow_field(pt: PhasePoint, xi: float, delta: float) -> tuple[float, float]:
    """Reduced-time velocities (dx/dtau, dphi/dtau) of the Josephson equations."""
    h_x, h_phi = energy_gradient(pt, xi, delta)
    return -h_phi, h_x


def energy_hessian(pt: PhasePoint, xi: float, delta: float) -> tuple[float, float, float]:
    """Analytic (h_xx, h_xphi, h_phiphi).

    Uses (1-2x)**2 = 1 - 4x(1-x) to collapse h_xx to 2*xi - cos(phi)/(4 s**1.5).
    """
    x = pt.x
    _require_interior(x)
    s = x * (1.0 - x)
    r = math.sqrt(s)
    c, sn = math.cos(pt.phi), math.sin(pt.phi)
    h_xx = 2.0 * xi - c / (4.0 * s * r)
    h_xphi = -(1.0 - 2.0 * x) * sn / (2.0 * r)
    h_phiphi = -r * c
    return h_xx, h_xphi, h_phiphi


def energy_surface(x: np.ndarray, phi: np.ndarray, xi: float, delta: float) -> np.ndarray:
    """Vectorized h over broadcastable arrays ``x`` and ``phi``."""
    x = np.asarray(x, dtype=float)
    if np.any((x < 0.0) | (x > 1.0)):
        raise DomainError("population fraction outside [0, 1]")
    s = x * (1.0 - x)
    return delta * x - xi * s + np.sqrt(s) * np.cos(phi)
