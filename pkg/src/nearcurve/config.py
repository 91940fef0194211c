"""Flat typed key-value experiment configs with dotted-key nesting.

Unknown keys are hard errors: silent config drift destroys reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError

MODES = ("count", "detect", "coverage", "goodset", "qnd", "identities", "scaling")

# key -> (type tag, default); required keys carry the REQUIRED sentinel
_REQUIRED = object()

SCHEMA: dict[str, tuple[str, object]] = {
    "curve": ("str", _REQUIRED),
    "mode": ("str", None),
    "B": ("interval", (0.0, 1.0)),
    "theta.lambda": ("float", 0.0),
    "theta.gamma": ("floats", ()),
    "c": ("float", 1.0),
    "M": ("float", None),
    "psi_list": ("floats", (0.3,)),
    "Q_list": ("ints", (1024,)),
    "seed": ("int", 0),
    "output_dir": ("str", "out"),
    "grid.points": ("int", 500),
    "guard": ("float", 1e-9),
    "qnd.alpha": ("float", 1.0 / 3.0),
    "qnd.eps": ("floats", (0.1, 0.0562, 0.0316, 0.0178, 0.01, 0.00562, 0.00316, 0.00178, 0.001)),
    "qnd.samples": ("int", 4000),
    "coverage.rho_scale": ("float", 1.0),
    "identities.draws": ("int", 200),
    "count.write_triples": ("bool", True),
    "scaling.svg": ("bool", False),
}


def _parse_value(kind: str, raw: str, key: str):
    raw = raw.strip()
    try:
        if kind == "str":
            return raw
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in ("true", "yes", "1"):
                return True
            if low in ("false", "no", "0"):
                return False
            raise ValueError(raw)
        if kind == "interval":
            parts = [float(v) for v in raw.split(",")]
            if len(parts) != 2:
                raise ValueError(raw)
            return (parts[0], parts[1])
        if kind == "floats":
            return tuple(float(v) for v in raw.split(",") if v.strip())
        if kind == "ints":
            return tuple(int(v) for v in raw.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r} as {kind}") from exc
    raise ConfigError(f"key {key!r}: unknown type tag {kind}")


@dataclass
class ExperimentConfig:
    """Validated experiment parameters (one value per schema key)."""

    curve: str
    mode: Optional[str]
    B: tuple[float, float]
    theta_lambda: float
    theta_gamma: tuple[float, ...]
    c: float
    M: Optional[float]
    psi_list: tuple[float, ...]
    Q_list: tuple[int, ...]
    seed: int
    output_dir: str
    grid_points: int
    guard: float
    qnd_alpha: float
    qnd_eps: tuple[float, ...]
    qnd_samples: int
    coverage_rho_scale: float
    identities_draws: int
    count_write_triples: bool
    scaling_svg: bool
    raw: dict = field(default_factory=dict)


def parse_config_text(text: str) -> ExperimentConfig:
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r} (line {lineno})")
        if key in values:
            raise ConfigError(f"duplicate config key {key!r} (line {lineno})")
        values[key] = _parse_value(SCHEMA[key][0], raw, key)

    resolved: dict[str, object] = {}
    for key, (kind, default) in SCHEMA.items():
        if key in values:
            resolved[key] = values[key]
        elif default is _REQUIRED:
            raise ConfigError(f"missing required config key {key!r}")
        else:
            resolved[key] = default

    if resolved["mode"] is not None and resolved["mode"] not in MODES:
        raise ConfigError(f"unknown mode {resolved['mode']!r}; expected one of {MODES}")
    q_list = resolved["Q_list"]
    if any(b <= a for a, b in zip(q_list, q_list[1:])):
        raise ConfigError("Q_list must be strictly ascending")
    if resolved["B"][0] >= resolved["B"][1]:
        raise ConfigError("B must be a nonempty interval lo,hi")

    return ExperimentConfig(
        curve=resolved["curve"],
        mode=resolved["mode"],
        B=resolved["B"],
        theta_lambda=resolved["theta.lambda"],
        theta_gamma=resolved["theta.gamma"],
        c=resolved["c"],
        M=resolved["M"],
        psi_list=resolved["psi_list"],
        Q_list=resolved["Q_list"],
        seed=resolved["seed"],
        output_dir=resolved["output_dir"],
        grid_points=resolved["grid.points"],
        guard=resolved["guard"],
        qnd_alpha=resolved["qnd.alpha"],
        qnd_eps=resolved["qnd.eps"],
        qnd_samples=resolved["qnd.samples"],
        coverage_rho_scale=resolved["coverage.rho_scale"],
        identities_draws=resolved["identities.draws"],
        count_write_triples=resolved["count.write_triples"],
        scaling_svg=resolved["scaling.svg"],
        raw=resolved,
    )


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
