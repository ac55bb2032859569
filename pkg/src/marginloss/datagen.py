"""Seeded synthetic binary data with ``Pr(y* = 1 | x) = G(x^T beta0)``.

Random numbers come from numpy's PCG64.  The integer seed is expanded by
``SeedSequence(seed).spawn(3)`` into three independent child streams used,
in order, for features, labels and contamination, so changing (say) the
contamination rate never perturbs the features or the clean labels.
Contamination draws are taken even when the rates are zero.
"""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .data import Dataset
from .distributions import LOGISTIC, SymmetricCdf, get_cdf
from .errors import ParameterError

__all__ = ["FeatureLaw", "Contamination", "GenConfig", "GenInfo", "generate", "streams", "load_config"]

CLUSTER_MU = 1.0


class FeatureLaw(str, enum.Enum):
    STANDARD_GAUSSIAN = "standard_gaussian"
    UNIFORM_PM1 = "uniform_pm1"
    TWO_CLUSTER = "two_cluster"


@dataclass(frozen=True)
class Contamination:
    label_flip_rate: float = 0.0
    leverage_rate: float = 0.0
    leverage_scale: float = 1.0

    def __post_init__(self):
        for name in ("label_flip_rate", "leverage_rate"):
            r = getattr(self, name)
            if not 0.0 <= r <= 1.0:
                raise ParameterError(f"{name} must lie in [0, 1], got {r}")
        if not np.isfinite(self.leverage_scale):
            raise ParameterError("leverage_scale must be finite")


@dataclass(frozen=True)
class GenConfig:
    n: int
    beta0: tuple
    feature_law: FeatureLaw = FeatureLaw.STANDARD_GAUSSIAN
    link: SymmetricCdf = LOGISTIC
    contamination: Optional[Contamination] = None
    seed: int = 0

    def __post_init__(self):
        if int(self.n) < 1:
            raise ParameterError(f"n must be at least 1, got {self.n}")
        beta0 = tuple(float(b) for b in np.atleast_1d(self.beta0))
        if not beta0 or not np.isfinite(beta0).all():
            raise ParameterError("beta0 must be a nonempty finite vector")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "beta0", beta0)
        object.__setattr__(self, "feature_law", FeatureLaw(self.feature_law))
        object.__setattr__(self, "link", get_cdf(self.link))
        if isinstance(self.contamination, dict):
            object.__setattr__(self, "contamination", Contamination(**self.contamination))
        if int(self.seed) < 0:
            raise ParameterError("seed must be nonnegative")
        object.__setattr__(self, "seed", int(self.seed))

    @classmethod
    def from_dict(cls, d: dict) -> "GenConfig":
        allowed = {"n", "beta0", "feature_law", "link", "contamination", "seed"}
        unknown = set(d) - allowed
        if unknown:
            raise ParameterError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "beta0": list(self.beta0),
            "feature_law": self.feature_law.value,
            "link": self.link.name,
            "contamination": asdict(self.contamination) if self.contamination else None,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class GenInfo:
    flipped: np.ndarray
    leveraged: np.ndarray
    clean_y: np.ndarray
    prob: np.ndarray = field(repr=False)


def streams(seed: int):
    """The three child generators ``(features, labels, contamination)``."""
    children = np.random.SeedSequence(seed).spawn(3)
    return tuple(np.random.Generator(np.random.PCG64(c)) for c in children)


def _features(rng, law: FeatureLaw, n: int, p: int) -> np.ndarray:
    if law is FeatureLaw.STANDARD_GAUSSIAN:
        return rng.standard_normal((n, p))
    if law is FeatureLaw.UNIFORM_PM1:
        return rng.uniform(-1.0, 1.0, (n, p))
    signs = np.where(rng.random((n, p)) < 0.5, -1.0, 1.0)
    return CLUSTER_MU * signs + rng.standard_normal((n, p))


def generate(cfg: GenConfig, return_info: bool = False):
    """Draw a :class:`Dataset` (and optionally a :class:`GenInfo`)."""
    f_rng, y_rng, c_rng = streams(cfg.seed)
    beta0 = np.asarray(cfg.beta0)
    X = _features(f_rng, cfg.feature_law, cfg.n, beta0.size)
    prob = np.asarray(cfg.link.cdf(X @ beta0))
    y = np.where(y_rng.random(cfg.n) < prob, 1, -1).astype(np.int8)
    clean = y.copy()

    cont = cfg.contamination or Contamination()
    flipped = c_rng.random(cfg.n) < cont.label_flip_rate
    leveraged = c_rng.random(cfg.n) < cont.leverage_rate
    y[flipped] *= -1
    X[leveraged] *= cont.leverage_scale

    data = Dataset(X, y)
    if return_info:
        return data, GenInfo(flipped, leveraged, clean, prob)
    return data


def load_config(path) -> GenConfig:
    with open(path) as fh:
        return GenConfig.from_dict(json.load(fh))
