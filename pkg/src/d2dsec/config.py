"""Scenario configuration and config-file parsing."""

from dataclasses import dataclass, field

import yaml


def db2lin(x_db):
    """Convert a dB quantity to linear scale."""
    return 10.0 ** (x_db / 10.0)


@dataclass
class SystemConfig:
    """All scenario scalars for one simulation setup.

    Powers and noise are stored in linear scale. The config file may give
    them in dB via the ``*_db`` keys (see ``load_config``).
    """

    M: int = 2            # BS antennas
    K_L: int = 8          # legitimate users
    K_E: int = 2          # eavesdroppers
    N: int = 1            # D2D channels (relays), N <= K_L
    P_B: float = 10.0     # BS power budget (linear)
    P_U: float = 10.0     # per-relay power budget (linear)
    sigma2: float = 1.0   # noise variance (linear)
    beta: float = 0.5     # information-leakage cap (bits/s/Hz)
    c0: float = 10.0      # reference path gain (linear, 10 dB)
    d0: float = 30.0      # reference distance
    eta: float = 3.0      # path-loss exponent (not given by the model source; urban default)
    area_side: float = 100.0
    legit_center: tuple = (0.0, 0.0)
    eve_center: tuple = (100.0, 0.0)
    delta: float = 1e-4   # convergence tolerance on R_min (bits)
    t_max: int = 100      # outer-iteration cap
    seed: int = 0

    def __post_init__(self):
        if self.N > self.K_L:
            raise ValueError(f"N={self.N} exceeds K_L={self.K_L}")
        for name in ("P_B", "P_U", "sigma2", "c0", "d0", "eta"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.area_side < 0:
            raise ValueError("area_side must be nonnegative")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        self.legit_center = tuple(float(c) for c in self.legit_center)
        self.eve_center = tuple(float(c) for c in self.eve_center)


# keys that accept a dB variant in the config file
_DB_KEYS = ("p_b", "p_u", "sigma2", "c0")

_KEY_MAP = {
    "m": "M", "k_l": "K_L", "k_e": "K_E", "n": "N",
    "p_b": "P_B", "p_u": "P_U", "sigma2": "sigma2", "beta": "beta",
    "c0": "c0", "d0": "d0", "eta": "eta", "area_side": "area_side",
    "legit_center": "legit_center", "eve_center": "eve_center",
    "delta": "delta", "t_max": "t_max", "seed": "seed",
}


def config_from_dict(raw: dict) -> SystemConfig:
    """Build a SystemConfig from a flat key-value mapping.

    Keys are the lower-case field names; ``p_b_db``, ``p_u_db``,
    ``sigma2_db`` and ``c0_db`` are accepted as dB-scale alternatives and
    converted with x_lin = 10^(x_dB/10).
    """
    kwargs = {}
    for key, val in raw.items():
        key = key.lower()
        if key.endswith("_db") and key[:-3] in _DB_KEYS:
            kwargs[_KEY_MAP[key[:-3]]] = db2lin(float(val))
        elif key in _KEY_MAP:
            kwargs[_KEY_MAP[key]] = val
        else:
            raise KeyError(f"unknown config key: {key}")
    return SystemConfig(**kwargs)


def load_config(path) -> SystemConfig:
    """Read a YAML config file into a SystemConfig."""
    with open(path) as f:
        raw = yaml.safe_load(f) or {}
    return config_from_dict(raw)
