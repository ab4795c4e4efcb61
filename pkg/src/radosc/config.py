"""Run configuration: flat ``key = value`` files with CLI overrides."""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .darboux import DEFAULT_EPSILONS
from .errors import ConfigError, GridError
from .grid import RadialGrid, WindowSpec
from .specfun import Z_MAX

__all__ = ["RunConfig", "parse_complex", "format_complex", "parse_config_text", "load_config"]

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_COMPLEX_RE = re.compile(rf"^\s*([+-]?{_NUM})?\s*(?:([+-])\s*({_NUM})?\s*[ij])?\s*$")
_IMAG_RE = re.compile(rf"^\s*([+-]?)\s*({_NUM})?\s*[ij]\s*$")


def parse_complex(text: str) -> complex:
    """Parse ``re+imi`` literals such as ``11+5i``, ``3+1e-3i``, ``7-2.5i`` or ``4``.

    A ``re,im`` pair is accepted too. ``j`` may replace ``i``.
    """
    t = text.strip()
    if "," in t:
        parts = t.split(",")
        if len(parts) != 2:
            raise ConfigError(f"expected 're,im', got {text!r}")
        try:
            return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise ConfigError(f"malformed complex pair {text!r}") from None
    m = _IMAG_RE.match(t)
    if t and m is not None:
        im_part = float(m.group(2)) if m.group(2) else 1.0
        return complex(0.0, -im_part if m.group(1) == "-" else im_part)
    m = _COMPLEX_RE.match(t)
    if not t or m is None or (m.group(1) is None and m.group(2) is None):
        raise ConfigError(f"malformed complex literal {text!r}")
    re_part = float(m.group(1)) if m.group(1) else 0.0
    im_part = 0.0
    if m.group(2):
        im_part = float(m.group(3)) if m.group(3) else 1.0
        if m.group(2) == "-":
            im_part = -im_part
    return complex(re_part, im_part)


def format_complex(z: complex) -> str:
    """Inverse of :func:`parse_complex` with shortest round-trip digits."""
    sign = "-" if math.copysign(1.0, z.imag) < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


@dataclass(frozen=True)
class RunConfig:
    """Every tunable of a CLI run.

    ``l_max`` and ``s_max`` bound the canonical tabulation and suite, ``l``
    is the angular momentum of the deformation, ``deformed_s_max`` bounds
    the deformed states, and ``tol`` (when set) replaces every residual
    tolerance of a verification run.
    """

    r_min: float = 1e-3
    r_max: float = 8.0
    n_points: int = 4001
    r_lo: float = 0.2
    r_hi: float = 6.0
    l: int = 0
    l_max: int = 5
    s_max: int = 5
    deformed_s_max: int = 4
    epsilon: tuple = DEFAULT_EPSILONS
    tol: Optional[float] = None
    out: str = "radosc-out"
    seed: int = 0
    z_max: float = Z_MAX
    n_test: int = 3

    def __post_init__(self):
        try:
            grid = self.grid
            WindowSpec(self.r_lo, self.r_hi).validate(grid)
        except GridError as exc:
            raise ConfigError(str(exc)) from None
        for key in ("l", "l_max", "s_max", "deformed_s_max", "n_test"):
            if getattr(self, key) < 0:
                raise ConfigError(f"{key} must be >= 0")
        if self.n_test < 2:
            raise ConfigError("n_test must be at least 2 (the non-adjointness witness needs a pair)")
        if self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if self.tol is not None and not (self.tol > 0 and math.isfinite(self.tol)):
            raise ConfigError("tol must be a positive finite number")
        if self.r_max ** 2 > self.z_max:
            raise ConfigError(f"r_max^2 = {self.r_max ** 2:g} exceeds the series cutoff z_max = {self.z_max:g}")
        if not self.out:
            raise ConfigError("out must be a non-empty path")

    @property
    def grid(self) -> RadialGrid:
        return RadialGrid(self.r_min, self.r_max, self.n_points)

    @property
    def window(self) -> WindowSpec:
        return WindowSpec(self.r_lo, self.r_hi)

    def require_deformation(self) -> None:
        """Check that the deformation constants are usable (non-empty, ``Im != 0``)."""
        if not self.epsilon:
            raise ConfigError("epsilon list is empty")
        for e in self.epsilon:
            if e.imag == 0:
                raise ConfigError(f"epsilon {format_complex(e)} needs a non-zero imaginary part")

    def override(self, **changes) -> "RunConfig":
        """Copy with the non-``None`` entries of ``changes`` applied."""
        return _build(self, {k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> dict:
        d = asdict(self)
        d["epsilon"] = [[e.real, e.imag] for e in self.epsilon]
        return d


_INT_KEYS = {"n_points", "l", "l_max", "s_max", "deformed_s_max", "seed", "n_test"}
_FLOAT_KEYS = {"r_min", "r_max", "r_lo", "r_hi", "z_max"}
_KEYS = {f.name for f in fields(RunConfig)}


def _coerce(key: str, raw):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(text)
        if key in _FLOAT_KEYS:
            return float(text)
    except ValueError:
        raise ConfigError(f"invalid value for {key}: {raw!r}") from None
    if key == "tol":
        if text.lower() in ("", "none", "default"):
            return None
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"invalid value for tol: {raw!r}") from None
    if key == "epsilon":
        return tuple(parse_complex(p) for p in _split_list(text))
    return text


def _split_list(text: str) -> list:
    return [p.strip() for p in re.split(r"[,;]", text) if p.strip()]


def _build(base: RunConfig, values: dict) -> RunConfig:
    unknown = set(values) - _KEYS
    if unknown:
        raise ConfigError(f"unknown configuration key(s): {', '.join(sorted(unknown))}")
    coerced = {k: _coerce(k, v) for k, v in values.items()}
    if "epsilon" in coerced:
        coerced["epsilon"] = tuple(complex(e) for e in coerced["epsilon"])
    try:
        return replace(base, **coerced)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def parse_config_text(text: str, base: RunConfig | None = None) -> RunConfig:
    """Parse ``key = value`` lines; ``#`` starts a comment.

    ``epsilon`` takes a list of ``re+imi`` literals separated by commas or
    semicolons.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: missing key")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = value
    return _build(base or RunConfig(), values)


def load_config(path: str | Path, base: RunConfig | None = None) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, base)
