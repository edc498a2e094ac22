"""Sectioned key-value config files and run manifests.

Config files are INI-style; command-line flags override file values. A
manifest (JSON) is written next to every output with enough information to
regenerate it bit-exactly.
"""

from __future__ import annotations

import configparser
import hashlib
import json
from dataclasses import dataclass
from typing import Any

from . import __version__
from .dynamics import NeighborSampling
from .payoff import PayoffParams
from .scenario import Variant

__all__ = ["ConfigError", "Settings", "load_config", "manifest", "write_manifest"]


class ConfigError(ValueError):
    """Bad config file or flag value; maps to exit code 2."""


PAYOFF_KEYS = {"mode", "p", "alpha", "beta", "r_e", "r_s", "r_t", "r_d", "theta", "property_value"}
SCENARIO_KEYS = {"variant", "gamma", "random_stay_prob", "seed"}
DYNAMICS_KEYS = {"timesteps", "seed", "neighbor_sampling", "pin_priority", "swap_mixed_payoffs"}
NETWORK_KEYS = {"source", "path", "seed", "n", "k", "rewire_prob", "paper"}
SWEEP_KEYS = {"variants", "thetas", "gammas", "runs", "master_seed", "workers", "window"}

_SECTION_KEYS = {
    "network": NETWORK_KEYS,
    "payoff": PAYOFF_KEYS,
    "scenario": SCENARIO_KEYS,
    "dynamics": DYNAMICS_KEYS,
    "sweep": SWEEP_KEYS,
}


@dataclass
class Settings:
    """Resolved configuration as plain nested dicts, one per section."""

    sections: dict[str, dict[str, str]]

    def get(self, section: str, key: str, default: str | None = None) -> str | None:
        return self.sections.get(section, {}).get(key, default)

    def set(self, section: str, key: str, value: Any) -> None:
        self.sections.setdefault(section, {})[key] = str(value)

    def digest(self) -> str:
        canon = json.dumps(self.sections, sort_keys=True)
        return hashlib.blake2b(canon.encode(), digest_size=8).hexdigest()

    def payoff_params(self) -> PayoffParams:
        sec = self.sections.get("payoff", {})
        try:
            return PayoffParams(
                p=float(sec.get("p", 0.5)),
                alpha=float(sec.get("alpha", 0.4)),
                beta=float(sec.get("beta", 0.2)),
                r_E=float(sec.get("r_e", 0.5)),
                r_S=float(sec.get("r_s", 0.07)),
                r_T=float(sec.get("r_t", 0.5)),
                r_D=float(sec.get("r_d", 0.4)),
                theta=float(sec.get("theta", 0.0)),
                property_value=float(sec.get("property_value", 1.0)),
            )
        except ValueError as exc:
            raise ConfigError(f"[payoff]: {exc}") from None

    def payoff_mode(self) -> str:
        mode = self.get("payoff", "mode", "paper")
        if mode not in ("paper", "formula"):
            raise ConfigError(f"[payoff] mode must be paper or formula, got {mode!r}")
        return mode

    def variant(self) -> Variant:
        raw = self.get("scenario", "variant", "randomised-highest")
        try:
            return Variant(raw)
        except ValueError:
            choices = ", ".join(v.value for v in Variant)
            raise ConfigError(f"[scenario] variant must be one of {choices}, got {raw!r}") from None

    def neighbor_sampling(self) -> NeighborSampling:
        raw = self.get("dynamics", "neighbor_sampling", "one-random-neighbor")
        try:
            return NeighborSampling(raw)
        except ValueError:
            raise ConfigError(f"[dynamics] unknown neighbor_sampling {raw!r}") from None

    def boolean(self, section: str, key: str, default: bool = False) -> bool:
        raw = self.get(section, key)
        if raw is None:
            return default
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"[{section}] {key} must be boolean, got {raw!r}")


def parse_gamma(raw: str) -> float:
    """Priority fraction; accepts '0.57', '57%', or bare percents > 1."""
    text = raw.strip()
    percent = text.endswith("%")
    if percent:
        text = text[:-1]
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"invalid gamma {raw!r}") from None
    if percent or value > 1.0:
        value /= 100.0
    if not 0.0 <= value <= 1.0:
        raise ConfigError(f"gamma out of range: {raw!r}")
    return value


def load_config(path: str | None) -> Settings:
    settings = Settings(sections={})
    if path is None:
        return settings
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    for section in parser.sections():
        if section not in _SECTION_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        for key, value in parser.items(section):
            if key not in _SECTION_KEYS[section]:
                raise ConfigError(f"unknown config key [{section}] {key}")
            settings.set(section, key, value)
    return settings


def manifest(settings: Settings, **extra) -> dict:
    data = {
        "tool": "evacgame",
        "version": __version__,
        "config_digest": settings.digest(),
        "config": settings.sections,
    }
    data.update(extra)
    return data


def write_manifest(path, settings: Settings, **extra) -> None:
    with open(path, "w") as fh:
        json.dump(manifest(settings, **extra), fh, indent=2, sort_keys=True)
        fh.write("\n")
