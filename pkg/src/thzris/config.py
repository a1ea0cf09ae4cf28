"""Scenario parameterisation for the RIS-assisted indoor THz downlink.

All heights are absolute (metres above the floor); the ``*_rel`` derived
attributes are measured from the UE height, which is the reference plane for
every LoS and pathloss formula.  Gains and the SIR threshold are stored as
linear ratios.  JSON config files may give them in dB through a ``_db`` key
suffix (``tau_db``, ``g_a_db``, ...).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

SPEED_OF_LIGHT = 299_792_458.0

HIGH_RIS = "high-ris"
LOW_RIS = "low-ris"


class ConfigError(ValueError):
    """Base class for invalid scenario descriptions."""


class MissingField(ConfigError):
    pass


class UnknownField(ConfigError):
    pass


class NonPositiveValue(ConfigError):
    pass


class GeometryViolation(ConfigError):
    pass


class OffsetOutOfDisk(ConfigError):
    pass


_FLOAT_FIELDS = (
    "lambda_a", "lambda_b", "radius", "h_a", "h_u", "h_r", "h_b", "r_b", "v0",
    "p_a", "freq", "k_abs", "g_a", "g_u", "g_ris", "n_elements", "l_x", "l_y",
    "tau", "ue_offset",
)
_FIELDS = _FLOAT_FIELDS + ("n_antennas", "precoder_mags")

# zero is meaningful for these (no blockages, no absorption, RIS overhead, UE at centre)
_NON_NEGATIVE = {"lambda_b", "k_abs", "v0", "ue_offset"}

# only dimensionless quantities accept a dB spelling
_DB_FIELDS = {"tau", "g_a", "g_u", "g_ris"}

# fields derived from others when omitted
_OPTIONAL = {"l_x", "l_y", "precoder_mags"}

PAPER_DEFAULTS: dict[str, Any] = {
    "lambda_a": 1.0,
    "lambda_b": 2.0,
    "radius": math.sqrt(140.0),
    "h_a": 3.0,
    "h_u": 1.0,
    "h_r": 0.75 * 3.0,
    "h_b": 1.63,
    "r_b": 0.22,
    "v0": math.sqrt(2.0),
    "p_a": 1e-3,
    "n_antennas": 10,
    "freq": 0.3e12,
    "k_abs": 0.075,
    "g_a": 1e3,
    "g_u": 1e3,
    "g_ris": 1.0,
    "n_elements": 1e13,
    "tau": 10 ** 0.2,
    "ue_offset": 0.0,
}


@dataclass(frozen=True)
class NetworkConfig:
    lambda_a: float
    lambda_b: float
    radius: float
    h_a: float
    h_u: float
    h_r: float
    h_b: float
    r_b: float
    v0: float
    p_a: float
    n_antennas: int
    precoder_mags: tuple[float, ...]
    freq: float
    k_abs: float
    g_a: float
    g_u: float
    g_ris: float
    n_elements: float
    l_x: float
    l_y: float
    tau: float
    ue_offset: float = 0.0

    h_a_rel: float = field(init=False, repr=False)
    h_b_rel: float = field(init=False, repr=False)
    h_r_rel: float = field(init=False, repr=False)
    beta_d: float = field(init=False, repr=False)
    beta_r: float = field(init=False, repr=False)
    beta_ar: float = field(init=False, repr=False)
    sum_f: float = field(init=False, repr=False)
    sum_f2: float = field(init=False, repr=False)
    scenario: str = field(init=False, repr=False)

    def __post_init__(self):
        derived = {
            "h_a_rel": self.h_a - self.h_u,
            "h_b_rel": self.h_b - self.h_u,
            "h_r_rel": self.h_r - self.h_u,
        }
        blockage_width = 2.0 * self.lambda_b * self.r_b
        derived["beta_d"] = blockage_width * abs(derived["h_b_rel"] / derived["h_a_rel"])
        derived["beta_r"] = blockage_width * abs(derived["h_b_rel"] / derived["h_r_rel"])
        low = self.h_r <= self.h_b
        # AP-RIS links are never blocked when the RIS sits above the blockages
        derived["beta_ar"] = (
            blockage_width * abs((self.h_b - self.h_r) / (self.h_a - self.h_r)) if low else 0.0
        )
        derived["sum_f"] = float(sum(self.precoder_mags))
        derived["sum_f2"] = float(sum(m * m for m in self.precoder_mags))
        derived["scenario"] = LOW_RIS if low else HIGH_RIS
        for key, value in derived.items():
            object.__setattr__(self, key, value)

    @property
    def low_ris(self) -> bool:
        return self.scenario == LOW_RIS

    @property
    def ap_ris_blockable(self) -> bool:
        """True when some AP-RIS link can actually be blocked (beta_ar > 0)."""
        return self.beta_ar > 0.0

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.freq

    @property
    def mean_ap_count(self) -> float:
        return self.lambda_a * math.pi * self.radius ** 2

    def to_dict(self) -> dict[str, Any]:
        out = {name: getattr(self, name) for name in _FIELDS}
        out["precoder_mags"] = list(self.precoder_mags)
        return out

    def with_changes(self, **changes) -> "NetworkConfig":
        """Validated copy with some fields replaced (accepts ``_db`` keys)."""
        raw = self.to_dict()
        for key in changes:
            base = key[:-3] if key.endswith("_db") else key
            raw.pop(base, None)
        # element size follows the carrier unless pinned explicitly
        if "freq" in changes:
            for key in ("l_x", "l_y"):
                if key not in changes:
                    raw.pop(key, None)
        raw.update(changes)
        return validate(raw, defaults=None)


def _as_float(name: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{name}: expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ConfigError(f"{name}: must be finite, got {value!r}")
    return out


def validate(raw: Mapping[str, Any], defaults: Mapping[str, Any] | None = PAPER_DEFAULTS) -> NetworkConfig:
    """Build a :class:`NetworkConfig` from a plain mapping.

    Keys missing from ``raw`` are taken from ``defaults`` (the reference
    parameter set unless overridden); pass ``defaults=None`` to require every
    field.  ``<name>_db`` keys are converted to linear ratios.
    """
    if not isinstance(raw, Mapping):
        raise ConfigError(f"config must be a JSON object, got {type(raw).__name__}")

    values: dict[str, Any] = {}
    for key, value in raw.items():
        if key.endswith("_db") and key[:-3] in _DB_FIELDS:
            name = key[:-3]
            if name in raw:
                raise ConfigError(f"{name}: given both linear and dB values")
            values[name] = 10.0 ** (_as_float(key, value) / 10.0)
        elif key in _FIELDS:
            if value is None:
                raise MissingField(f"{key}: null is not a value")
            values[key] = value
        else:
            raise UnknownField(f"unknown config key {key!r}")

    for name in _FIELDS:
        if name in values or name in _OPTIONAL:
            continue
        if defaults is not None and name in defaults:
            values[name] = defaults[name]
        elif name == "ue_offset":
            values[name] = 0.0
        else:
            raise MissingField(f"{name}: required")

    for name in _FLOAT_FIELDS:
        if name in values:
            values[name] = _as_float(name, values[name])

    n_ant = values["n_antennas"]
    if isinstance(n_ant, bool) or not isinstance(n_ant, (int, float)) or float(n_ant) != int(n_ant):
        raise ConfigError(f"n_antennas: expected an integer, got {n_ant!r}")
    values["n_antennas"] = int(n_ant)
    if values["n_antennas"] < 1:
        raise NonPositiveValue("n_antennas: must be >= 1")

    for name in _FLOAT_FIELDS:
        if name not in values:
            continue
        v = values[name]
        if name in _NON_NEGATIVE:
            if v < 0.0:
                raise NonPositiveValue(f"{name}: must be >= 0, got {v}")
        elif v <= 0.0:
            raise NonPositiveValue(f"{name}: must be > 0, got {v}")

    half_wave = SPEED_OF_LIGHT / (2.0 * values["freq"])
    values.setdefault("l_x", half_wave)
    values.setdefault("l_y", half_wave)

    mags = values.get("precoder_mags")
    if mags is None:
        mags = (1.0,) * values["n_antennas"]
    if isinstance(mags, (str, bytes)) or not hasattr(mags, "__len__"):
        raise ConfigError("precoder_mags: expected a list of numbers")
    mags = tuple(_as_float("precoder_mags", m) for m in mags)
    if len(mags) != values["n_antennas"]:
        raise ConfigError(
            f"precoder_mags: length {len(mags)} does not match n_antennas={values['n_antennas']}"
        )
    if any(m < 0.0 for m in mags) or sum(mags) <= 0.0:
        raise NonPositiveValue("precoder_mags: magnitudes must be >= 0 with a positive sum")
    values["precoder_mags"] = mags

    if values["h_u"] >= values["h_a"]:
        raise GeometryViolation(f"h_u={values['h_u']} must be below h_a={values['h_a']}")
    if values["h_u"] >= values["h_r"]:
        raise GeometryViolation(f"h_u={values['h_u']} must be below h_r={values['h_r']}")
    if values["h_r"] >= values["h_a"]:
        raise GeometryViolation(f"h_r={values['h_r']} must be below the ceiling h_a={values['h_a']}")
    if values["ue_offset"] >= values["radius"]:
        raise OffsetOutOfDisk(
            f"ue_offset={values['ue_offset']} must be inside the disk of radius {values['radius']}"
        )

    return NetworkConfig(**values)


def default_paper_config() -> NetworkConfig:
    """The evaluation parameter set: P_A = 1 mW, N_A = 10, f = 0.3 THz, ..."""
    return validate(PAPER_DEFAULTS, defaults=None)


def load_config(path: str | Path) -> NetworkConfig:
    """Read a JSON config file; missing keys fall back to the default parameter set."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return validate(raw)
