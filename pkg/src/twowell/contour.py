"""Energy contour grids over the (x, phi) cylinder and their discrete critical points."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bifurcation import FixedPoint, find_fixed_points
from .errors import ParameterError
from .io import csv_text
from .model import BOUNDARY_MARGIN


@dataclass(frozen=True)
class ContourGrid:
    xi: float
    delta: float
    x_axis: np.ndarray
    phi_axis: np.ndarray
    values: np.ndarray  # shape (len(phi_axis), len(x_axis))
    overlay: tuple[FixedPoint, ...]

    def to_csv(self) -> str:
        header = ["phi\\x"] + [repr(float(x)) for x in self.x_axis]
        rows = ([float(phi)] + [float(v) for v in row]
                for phi, row in zip(self.phi_axis, self.values))
        return csv_text(header, rows)

    def overlay_dict(self) -> dict:
        return {"xi": self.xi, "delta": self.delta,
                "fixed_points": [fp.to_dict() for fp in self.overlay]}


def parse_grid(spec: str | int) -> tuple[int, int]:
    """'401x400' -> (401, 400); a bare integer n means n x-nodes and n phi-nodes."""
    text = str(spec).lower()
    try:
        if "x" in text:
            a, b = text.split("x")
            nx, nphi = int(a), int(b)
        else:
            nx = nphi = int(text)
    except ValueError as exc:
        raise ParameterError(f"bad grid specification {spec!r}") from exc
    if nx < 3 or nphi < 4:
        raise ParameterError("grid needs at least 3 x-nodes and 4 phi-nodes")
    return nx, nphi


def contour_grid(xi: float, delta: float, nx: int = 401, nphi: int = 400,
                 eq9_as_printed: bool = False) -> ContourGrid:
    """h on a uniform grid.

    The x axis runs over [margin, 1 - margin] and is built symmetric about
    1/2, so a delta = 0 grid is exactly mirror symmetric.  The phi axis is
    uniform on (-pi, pi]; with an even count both 0 and pi are nodes.
    """
    half = 0.5 - BOUNDARY_MARGIN
    u = np.linspace(-half, half, nx)
    u = 0.5 * (u - u[::-1])  # exact antisymmetry
    x = 0.5 + u
    s = 0.25 - u * u
    phi = -np.pi + 2 * np.pi * np.arange(1, nphi + 1) / nphi
    values = (delta * x)[None, :] - xi * s[None, :] + np.sqrt(s)[None, :] * np.cos(phi)[:, None]
    if not np.all(np.isfinite(values)):
        raise ParameterError("non-finite contour values")
    overlay = tuple(find_fixed_points(xi, delta, eq9_as_printed))
    return ContourGrid(float(xi), float(delta), x, phi, values, overlay)


# neighbours of a node in cyclic order: (dphi, dx)
_RING = ((-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1))


def grid_critical_points(grid: ContourGrid) -> list[tuple[int, int, str]]:
    """Discrete maxima, minima and saddles as (phi_index, x_index, kind).

    Interior x nodes only; phi wraps around.  A saddle has four sign changes
    of h(neighbour) - h(node) around the 8-ring.
    """
    v = grid.values
    nphi, nx = v.shape
    centre = v[:, 1:-1]
    diffs = np.stack([np.roll(v, -dp, axis=0)[:, 1 + dx: nx - 1 + dx] - centre
                      for dp, dx in _RING])
    maxima = np.all(diffs < 0, axis=0)
    minima = np.all(diffs > 0, axis=0)
    signs = np.sign(diffs)
    changes = np.sum(signs != np.roll(signs, -1, axis=0), axis=0)
    saddles = (changes >= 4) & np.all(signs != 0, axis=0)
    out = []
    for kind, mask in (("max", maxima), ("min", minima), ("saddle", saddles)):
        for ip, ix in zip(*np.nonzero(mask)):
            out.append((int(ip), int(ix) + 1, kind))
    return sorted(out, key=lambda t: (t[1], t[0]))
