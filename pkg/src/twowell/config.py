"""Run configuration: defaults < key=value config file < command-line flags."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigurationError, OutputError, ParameterError
from .model import ModelParams

PHYSICAL_KEYS = ("gamma", "gbeta", "tilt")
REDUCED_KEYS = ("xi", "delta")
TOLERANCE_KEYS = ("energy_drift_tol", "classify_tol", "rtol")


@dataclass
class RunConfig:
    xi: float | None = None
    delta: float | None = None
    n_atoms: int | None = None
    gamma: float | None = None
    gbeta: float | None = None
    tilt: float | None = None
    variant: str = "generic"
    branch: str | None = None
    out: str | None = None
    grid: str = "401x400"
    tau_end: float = 100.0
    x0: float = 0.5
    phi0: float = 0.1
    dtau_max: float = 0.1
    rtol: float = 1e-11
    energy_drift_tol: float = 1e-8
    classify_tol: float = 1e-9
    eq9_as_printed: bool = False
    tilt_localize: float | None = None
    compare: str | None = None
    overlay: str | None = None
    summary: str | None = None
    amplitudes_out: str | None = None
    phase_out: str | None = None
    deltas: str | None = None
    # sweep
    target: str = "fluct"
    axis: str = "n-atoms"
    values: str | None = None
    start: float | None = None
    stop: float | None = None
    num: int = 13
    log: bool = False
    hold: str = "ratio"
    workers: int = 1
    fit: bool = False
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        for key in TOLERANCE_KEYS:
            if not getattr(self, key) > 0:
                raise ConfigurationError(f"tolerance {key} must be positive")

    @property
    def mode(self) -> str:
        phys = any(getattr(self, k) is not None for k in PHYSICAL_KEYS)
        red = any(getattr(self, k) is not None for k in REDUCED_KEYS)
        if phys and red:
            raise ConfigurationError("give either physical (--gamma/--gbeta/--tilt) or "
                                     "reduced (--xi/--delta) parameters, not both")
        return "physical" if phys else "reduced"

    def reduced(self) -> tuple[float, float]:
        if self.mode == "physical":
            p = self.params()
            return p.xi, p.delta
        return (self.xi or 0.0), (self.delta or 0.0)

    def params(self) -> ModelParams:
        """ModelParams; reduced input fixes gamma = 1/2 so that 2*gamma = 1."""
        if self.n_atoms is None:
            raise ConfigurationError("this command needs --n-atoms")
        if self.mode == "physical":
            if self.gamma is None or self.gbeta is None:
                raise ConfigurationError("physical input needs both --gamma and --gbeta")
            return ModelParams(self.n_atoms, self.gamma, self.gbeta, self.tilt or 0.0)
        xi, delta = self.reduced()
        return ModelParams.from_reduced(xi, delta, self.n_atoms)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw) -> object:
    kind = _FIELD_TYPES[key]
    if raw is None or not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if "bool" in kind:
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            value = float(text)
            if not math.isfinite(value):
                raise ValueError(text)
            return value
    except ValueError as exc:
        raise ParameterError(f"bad value for {key}: {raw!r}") from exc
    return text


def normalize_key(key: str) -> str:
    k = key.strip().lstrip("-").replace("-", "_")
    if k not in _FIELD_TYPES or k == "extra":
        raise ConfigurationError(f"unknown configuration key {key!r}")
    return k


def read_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OutputError(f"cannot read config {path}: {exc}") from exc
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        k = normalize_key(key)
        out[k] = _coerce(k, value)
    return out


def resolve(file_values: dict | None = None, cli_values: dict | None = None) -> RunConfig:
    """Merge layers; later layers win, ``None`` in the CLI layer means 'not given'."""
    merged: dict = {}
    for layer in (file_values or {}, cli_values or {}):
        for key, value in layer.items():
            if value is None:
                continue
            k = normalize_key(key)
            merged[k] = _coerce(k, value)
    return RunConfig(**merged)
