"""Strict key-value configuration for the pipelines.

Format: one `key = value` per line, `#` comments, blank lines ignored.
Unknown keys are errors; physical quantities carry units in the key names
so silent unit mistakes cannot parse.
"""

from dataclasses import dataclass, field
from typing import List, Optional

from .freewave import RadialData, bump_data, zero_moment_data
from .simulator import SimConfig


class ConfigError(ValueError):
    pass


_FLOAT_KEYS = {
    "k_length",
    "g_amplitude",
    "h_length",
    "cfl",
    "r_max_length",
    "t_max_time",
    "p_power",
    "blowup_threshold",
    "eps",
    "agreement_tol",
}
_STR_KEYS = {"profile_family", "g_samples"}
_INT_KEYS = {"snapshot_stride"}
_LIST_KEYS = {"eps_list"}
_ALL_KEYS = _FLOAT_KEYS | _STR_KEYS | _INT_KEYS | _LIST_KEYS

_PROFILES = ("bump", "zero_moment")


@dataclass
class RunConfig:
    data: RadialData
    sim: SimConfig
    eps: Optional[float]
    eps_list: List[float]
    snapshot_stride: int
    agreement_tol: float
    raw: dict = field(default_factory=dict)


def _sampled_data(spec_text: str, k: float) -> RadialData:
    """RadialData from explicit `r:value` speed-profile samples, linearly
    interpolated and clamped to zero for r >= k."""
    import numpy as np

    pairs = []
    for tok in spec_text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ":" not in tok:
            raise ConfigError(f"g_samples entry {tok!r}: expected 'r:value'")
        r_s, v_s = tok.split(":", 1)
        try:
            pairs.append((float(r_s), float(v_s)))
        except ValueError:
            raise ConfigError(f"g_samples entry {tok!r}: not numeric") from None
    if len(pairs) < 2:
        raise ConfigError("g_samples needs at least two samples")
    pairs.sort()
    rs = np.array([p[0] for p in pairs])
    vs = np.array([p[1] for p in pairs])

    def g(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < k, np.interp(r, rs, vs), 0.0)

    return RadialData(k=k, g=g, name="sampled")


def parse_config(text: str) -> RunConfig:
    """Parse config text into typed pipeline configuration.

    Defaults: bump profile with k = 1, h = k/512, cfl = 0.5,
    t_max = 40, r_max = k + t_max + 1.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    if "profile_family" in raw and "g_samples" in raw:
        raise ConfigError("ambiguous data: both profile_family and g_samples given")

    def as_float(key, default=None):
        if key not in raw:
            return default
        try:
            return float(raw[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: expected a number, got {raw[key]!r}") from None

    def as_int(key, default=None):
        if key not in raw:
            return default
        try:
            return int(raw[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: expected an integer, got {raw[key]!r}") from None

    k = as_float("k_length", 1.0)
    amplitude = as_float("g_amplitude", 1.0)
    if k < 1:
        raise ConfigError(f"k_length must be >= 1, got {k}")
    if "g_samples" in raw:
        data = _sampled_data(raw["g_samples"], k)
    else:
        family = raw.get("profile_family", "bump")
        if family not in _PROFILES:
            raise ConfigError(f"profile_family must be one of {_PROFILES}, got {family!r}")
        data = bump_data(k, amplitude) if family == "bump" else zero_moment_data(k, amplitude)

    h = as_float("h_length", k / 512.0)
    cfl = as_float("cfl", 0.5)
    t_max = as_float("t_max_time", 40.0)
    r_max = as_float("r_max_length", k + t_max + 1.0)
    p = as_float("p_power", 2.0)
    threshold = as_float("blowup_threshold", 1e8)
    try:
        sim = SimConfig(
            h=h, r_max=r_max, t_max=t_max, cfl=cfl, p=p, blowup_threshold=threshold
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    eps = as_float("eps")
    eps_list = []
    if "eps_list" in raw:
        try:
            eps_list = [float(tok) for tok in raw["eps_list"].split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(f"eps_list: expected comma-separated numbers") from None
        if not eps_list:
            raise ConfigError("eps_list is empty")
        if any(e <= 0 for e in eps_list):
            raise ConfigError("eps_list entries must be positive")

    return RunConfig(
        data=data,
        sim=sim,
        eps=eps,
        eps_list=eps_list,
        snapshot_stride=as_int("snapshot_stride", 1),
        agreement_tol=as_float("agreement_tol", 0.02),
        raw=raw,
    )


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return parse_config(text)
