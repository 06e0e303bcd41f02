"""Exact diagonalization of the two-mode Hamiltonian in the fixed-N Fock sector.

Basis state |n> has n atoms in the left well and N - n in the right one:

    <n|H|n>   = Delta (2n - N)/2 + (g beta/2)(n**2 + (N - n)**2)
    <n+1|H|n> = gamma sqrt((n + 1)(N - n))

The matrix is real symmetric tridiagonal, handed to LAPACK through
``scipy.linalg.eigh_tridiagonal``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import gammaln

from .bifurcation import FixedPoint, find_fixed_points
from .errors import CapacityError, ConfigurationError, DomainError, NumericalError
from .fluctuation import predict
from .model import ModelParams, canonical_phase, reduced_energy

N_CAP = 20000
FULL_SPECTRUM_MAX_N = 2000
PHASE_GRID = 4096


@dataclass(frozen=True)
class FockHamiltonian:
    params: ModelParams
    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def n_total(self) -> int:
        return self.params.n_total

    @property
    def dim(self) -> int:
        return self.params.n_total + 1

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def expectation(self, v: np.ndarray) -> float:
        return float(np.real(np.vdot(v, self.apply(v))))


@dataclass(frozen=True)
class QuantumGroundReport:
    energy: float
    state: np.ndarray
    mean_n: float
    delta_n: float
    phase_grid: np.ndarray
    phase_distribution: np.ndarray
    delta_phi_circular: float
    mean_phase: float

    def to_dict(self, with_arrays: bool = True) -> dict:
        d = {"energy": self.energy, "mean_n": self.mean_n, "delta_n": self.delta_n,
             "delta_phi_circular": self.delta_phi_circular, "mean_phase": self.mean_phase,
             "n_total": len(self.state) - 1, "phase_grid_size": len(self.phase_grid)}
        if with_arrays:
            d["state"] = self.state.tolist()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "QuantumGroundReport":
        if "state" not in d:
            raise ConfigurationError("report was exported without amplitudes")
        return state_report(np.asarray(d["state"], float), float(d["energy"]),
                            int(d["phase_grid_size"]))


@dataclass(frozen=True)
class LocalizedState:
    mean_n: float
    delta_n: float
    state: np.ndarray


@dataclass(frozen=True)
class DoubletReport:
    gap: float
    energies: tuple[float, float]
    localized: tuple[LocalizedState, LocalizedState]  # sorted by mean_n

    @property
    def localized_delta_n(self) -> tuple[float, float]:
        return self.localized[0].delta_n, self.localized[1].delta_n

    def to_dict(self) -> dict:
        return {"gap": self.gap, "energies": list(self.energies),
                "localized": [{"mean_n": s.mean_n, "delta_n": s.delta_n} for s in self.localized]}


def build(p: ModelParams, cap: int = N_CAP) -> FockHamiltonian:
    N = p.n_total
    if N > cap:
        raise CapacityError(f"N={N} above the cap of {cap}")
    n = np.arange(N + 1, dtype=float)
    diag = p.tilt * (2 * n - N) / 2 + 0.5 * p.mean_field * (n**2 + (N - n) ** 2)
    off = p.tunneling * np.sqrt((n[:-1] + 1) * (N - n[:-1]))
    diag.flags.writeable = False
    off.flags.writeable = False
    return FockHamiltonian(p, diag, off)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    return -v if v[k] < 0 else v


def low_spectrum(h: FockHamiltonian, k: int) -> list[tuple[float, np.ndarray]]:
    """The k lowest eigenpairs, energies ascending, eigenvector signs fixed."""
    if not (1 <= k <= h.dim):
        raise DomainError(f"k={k} outside [1, {h.dim}]")
    try:
        if h.n_total <= FULL_SPECTRUM_MAX_N:
            w, v = eigh_tridiagonal(h.diag, h.offdiag, lapack_driver="stemr")
            w, v = w[:k], v[:, :k]
        else:
            w, v = eigh_tridiagonal(h.diag, h.offdiag, select="i", select_range=(0, k - 1))
    except LinAlgError as exc:
        raise NumericalError(f"tridiagonal eigensolver failed for N={h.n_total}, "
                             f"|diag|max={np.max(np.abs(h.diag)):.3g}, "
                             f"|off|max={np.max(np.abs(h.offdiag)) if h.n_total else 0:.3g}: {exc}")
    return [(float(w[i]), _fix_sign(v[:, i].copy())) for i in range(k)]


def number_moments(state: np.ndarray) -> tuple[float, float]:
    p = np.abs(state) ** 2
    n = np.arange(len(state), dtype=float)
    mean = float(p @ n)
    var = float(p @ (n - mean) ** 2)
    return mean, math.sqrt(max(var, 0.0))


def phase_distribution(state: np.ndarray, grid: int = PHASE_GRID) -> tuple[np.ndarray, np.ndarray]:
    """P(phi) = |<phi|psi>|**2 normalized as a density on (-pi, pi].

    Relative-phase states |phi> ~ sum_n exp(i n phi)|n>.  The uniform grid
    phi_k = -pi + 2 pi (k+1)/M integrates the density exactly when M > N.
    """
    N = len(state) - 1
    M = max(grid, N + 1)
    k = np.arange(M)
    phis = -np.pi + 2 * np.pi * (k + 1) / M
    alt = state * np.where(np.arange(N + 1) % 2 == 0, 1.0, -1.0)
    amp = np.fft.fft(alt, M)[(k + 1) % M]
    return phis, np.abs(amp) ** 2 / (2 * np.pi)


def state_report(state: np.ndarray, energy: float, grid: int = PHASE_GRID) -> QuantumGroundReport:
    state = np.asarray(state, dtype=float)
    mean, dn = number_moments(state)
    phis, P = phase_distribution(state, grid)
    # first trigonometric moment; equals sum_n c_n c_{n+1} for real amplitudes
    moment = complex(np.sum(P * np.exp(1j * phis)) * (2 * np.pi / len(phis)))
    R = min(abs(moment), 1.0)
    circ = math.sqrt(-2.0 * math.log(R)) if R > 0 else math.inf
    state.flags.writeable = False
    return QuantumGroundReport(energy=float(energy), state=state, mean_n=mean, delta_n=dn,
                               phase_grid=phis, phase_distribution=P,
                               delta_phi_circular=circ,
                               mean_phase=canonical_phase(math.atan2(moment.imag, moment.real)))


def ground_state(h: FockHamiltonian, grid: int = PHASE_GRID) -> QuantumGroundReport:
    (e0, v0), = low_spectrum(h, 1)
    return state_report(v0, e0, grid)


def _require_doublet_regime(p: ModelParams) -> None:
    if p.tilt != 0.0:
        raise ConfigurationError("localized doublet requires delta = 0")
    if abs(p.xi) <= 1.0:
        raise ConfigurationError("localized doublet requires |xi| > 1")
    if p.mean_field >= 0.0:
        raise ConfigurationError("S+- are energy minima only for attractive coupling (g beta < 0)")


def localized_doublet(h: FockHamiltonian) -> DoubletReport:
    """Localized states built from the two lowest eigenstates.

    The number operator is diagonalized inside span{|g>, |e>}.  For exact
    parity eigenstates this yields (|g> +- |e>)/sqrt(2); when the doublet is
    degenerate to machine precision it still recovers the localized pair,
    whatever rotation the eigensolver returned.
    """
    p = h.params
    _require_doublet_regime(p)
    (e0, g), (e1, e) = low_spectrum(h, 2)
    V = np.column_stack([g, e])
    n = np.arange(h.dim, dtype=float)
    _, U = np.linalg.eigh(V.T @ (n[:, None] * V))
    states = []
    for i in range(2):
        v = _fix_sign(V @ U[:, i])
        v /= np.linalg.norm(v)
        mean, dn = number_moments(v)
        states.append(LocalizedState(mean, dn, v))
    states.sort(key=lambda s: s.mean_n)
    return DoubletReport(gap=max(e1 - e0, 0.0), energies=(e0, e1), localized=tuple(states))


def tilt_localized(p: ModelParams, tilt_delta: float,
                   grid: int = PHASE_GRID) -> tuple[QuantumGroundReport, QuantumGroundReport]:
    """Ground states under a small reduced tilt of either sign, sorted by mean_n.

    ``tilt_delta * N`` should dominate the doublet gap yet stay small against
    every other energy scale.
    """
    _require_doublet_regime(p)
    if tilt_delta == 0.0:
        raise ConfigurationError("tilt localization needs a nonzero tilt")
    out = []
    for sign in (1.0, -1.0):
        q = ModelParams(p.n_total, p.tunneling, p.mean_field, sign * abs(tilt_delta) * 2 * p.tunneling)
        out.append(ground_state(build(q), grid))
    return tuple(sorted(out, key=lambda r: r.mean_n))


def ground_fixed_point(p: ModelParams) -> FixedPoint:
    """Stable fixed point with the lowest mean-field energy 2 gamma N h."""
    stable = [fp for fp in find_fixed_points(p.xi, p.delta) if fp.stable]
    if not stable:
        raise NumericalError(f"no stable fixed point at xi={p.xi:g}, delta={p.delta:g}")
    return min(stable, key=lambda fp: p.tunneling * reduced_energy(fp.point, p.xi, p.delta))


def compare_with_semiclassical(p: ModelParams, variant: str,
                               tilt_localize: float | None = None) -> dict:
    """Exact fluctuations next to the prediction at the classical ground fixed point.

    When the classical minimum is the degenerate S+- pair the exact ground
    state is a cat-like superposition, so the comparison uses the localized
    doublet states (or tilt-localized ground states if ``tilt_localize``).
    """
    fp = ground_fixed_point(p)
    report = predict(fp, p, variant)
    doublet = p.tilt == 0.0 and fp.branch in ("S_plus", "S_minus")
    if doublet and tilt_localize:
        states = tilt_localized(p, tilt_localize)
        mode = "tilt-localized"
        exact = float(np.mean([s.delta_n for s in states]))
        exact_phi = float(np.mean([s.delta_phi_circular for s in states]))
    elif doublet:
        d = localized_doublet(build(p))
        mode = "doublet"
        exact = float(np.mean(d.localized_delta_n))
        exact_phi = None
    else:
        g = ground_state(build(p))
        mode = "ground"
        exact, exact_phi = g.delta_n, g.delta_phi_circular
    return {"variant": report.variant, "mode": mode, "fixed_point": fp.to_dict(),
            "exact_delta_n": exact, "predicted_delta_n": report.delta_n,
            "ratio": report.delta_n / exact,
            "exact_delta_phi_circular": exact_phi, "predicted_delta_phi": report.delta_phi}


def coherent_state(n_total: int, x: float, phi: float) -> np.ndarray:
    """Fixed-N (SU(2)) coherent state with population fraction x and phase phi."""
    n = np.arange(n_total + 1, dtype=float)
    with np.errstate(divide="ignore"):
        logmag = 0.5 * (gammaln(n_total + 1) - gammaln(n + 1) - gammaln(n_total - n + 1)
                        + n * np.log(x) + (n_total - n) * np.log1p(-x))
    return np.exp(logmag) * np.exp(1j * n * phi)


def classical_energy(p: ModelParams, x: float, phi: float) -> float:
    """Mean-field energy 2 gamma N h(x, phi) plus the Fock-sector constant."""
    s = x * (1.0 - x)
    h = p.delta * x - p.xi * s + math.sqrt(s) * math.cos(phi)
    return 2 * p.tunneling * p.n_total * h + p.h0
