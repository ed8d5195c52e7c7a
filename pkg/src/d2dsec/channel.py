"""Geometry, path loss, Rayleigh fading and relay selection."""

from dataclasses import dataclass, field

import numpy as np

from .config import SystemConfig

# minimum link distance; avoids singular gains when nodes coincide
D_MIN = 1.0


@dataclass(frozen=True)
class NodePositions:
    """2-D positions of the BS, legitimate users and eavesdroppers."""

    bs: np.ndarray        # (2,)
    legit: np.ndarray     # (K_L, 2)
    eve: np.ndarray       # (K_E, 2)


@dataclass
class ChannelRealization:
    """One draw of all complex channel gains plus the relay set.

    h[k]     : BS -> legitimate user k, shape (K_L, M)
    g[m]     : BS -> eavesdropper m, shape (K_E, M)
    h_d2d[k, j] : user j -> user k (diagonal unused, stored as 0)
    g_d2d[m, j] : user j -> eavesdropper m
    relays   : ordered relay indices {j_1, ..., j_N} subset of K_L
    n_of     : inverse map, user index -> D2D channel index
    """

    h: np.ndarray
    g: np.ndarray
    h_d2d: np.ndarray
    g_d2d: np.ndarray
    relays: list
    n_of: dict = field(init=False)

    def __post_init__(self):
        self.relays = [int(j) for j in self.relays]
        if len(set(self.relays)) != len(self.relays):
            raise ValueError("relay indices must be distinct")
        K_L = self.h.shape[0]
        if any(j < 0 or j >= K_L for j in self.relays):
            raise ValueError("relay index out of range")
        self.n_of = {j: n for n, j in enumerate(self.relays)}


def path_gain(d, cfg: SystemConfig):
    """Distance-based power gain c0 * (d/d0)^(-eta)."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("distance must be strictly positive")
    return cfg.c0 * (d / cfg.d0) ** (-cfg.eta)


def sample_geometry(cfg: SystemConfig, rng: np.random.Generator) -> NodePositions:
    """Drop users uniformly in their squares; the BS sits at legit_center."""
    bs = np.asarray(cfg.legit_center, dtype=float)
    legit = np.asarray(cfg.legit_center) + cfg.area_side * (
        rng.uniform(-0.5, 0.5, size=(cfg.K_L, 2)))
    eve = np.asarray(cfg.eve_center) + cfg.area_side * (
        rng.uniform(-0.5, 0.5, size=(cfg.K_E, 2)))
    return NodePositions(bs=bs, legit=legit, eve=eve)


def select_relays(cfg: SystemConfig, rng: np.random.Generator) -> list:
    """Uniform draw of N distinct relay users, without replacement."""
    if cfg.N > cfg.K_L:
        raise ValueError("cannot select more relays than users")
    return [int(j) for j in rng.choice(cfg.K_L, size=cfg.N, replace=False)]


def _cn(rng, shape):
    """i.i.d. CN(0,1) draws (unit total variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _dist(a, b):
    d = np.linalg.norm(np.asarray(a, dtype=float) - np.asarray(b, dtype=float), axis=-1)
    return np.maximum(d, D_MIN)


def sample_channels(pos: NodePositions, cfg: SystemConfig,
                    rng: np.random.Generator) -> ChannelRealization:
    """Draw all small-scale fades, apply path loss, and pick the relay set.

    Every complex gain is sqrt(path_gain(d)) * CN(0,1), i.i.d. across links
    and antennas. All link types share the same path-loss model.
    """
    d_bu = _dist(pos.legit, pos.bs)                    # (K_L,)
    d_be = _dist(pos.eve, pos.bs)                      # (K_E,)
    d_uu = _dist(pos.legit[:, None, :], pos.legit[None, :, :])   # (K_L, K_L)
    d_ue = _dist(pos.eve[:, None, :], pos.legit[None, :, :])     # (K_E, K_L)

    h = np.sqrt(path_gain(d_bu, cfg))[:, None] * _cn(rng, (cfg.K_L, cfg.M))
    g = np.sqrt(path_gain(d_be, cfg))[:, None] * _cn(rng, (cfg.K_E, cfg.M))
    h_d2d = np.sqrt(path_gain(d_uu, cfg)) * _cn(rng, (cfg.K_L, cfg.K_L))
    np.fill_diagonal(h_d2d, 0.0)
    g_d2d = np.sqrt(path_gain(d_ue, cfg)) * _cn(rng, (cfg.K_E, cfg.K_L))
    relays = select_relays(cfg, rng)
    return ChannelRealization(h=h, g=g, h_d2d=h_d2d, g_d2d=g_d2d, relays=relays)


def generate_realization(cfg: SystemConfig, seed=None) -> ChannelRealization:
    """Geometry + channels from a single seed (cfg.seed when not given)."""
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    pos = sample_geometry(cfg, rng)
    return sample_channels(pos, cfg, rng)
