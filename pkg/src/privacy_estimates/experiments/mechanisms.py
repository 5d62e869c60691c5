"""Synthetic training algorithms with known privacy guarantees."""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError


class Mechanism(ABC):
    """A randomized training algorithm over a synthetic data domain.

    Examples are rows of a 2-D array. ``loss`` is the per-example loss of a
    trained model; lower loss suggests membership.
    """

    name: str = "mechanism"

    @abstractmethod
    def draw_base(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Base training set shared by both worlds of the game."""

    @abstractmethod
    def draw_candidates(self, rng: np.random.Generator, size: int, offset: int) -> np.ndarray:
        """Pool of candidate challenge points, disjoint from any base set."""

    @abstractmethod
    def pair_up(self, rng: np.random.Generator, chosen: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Split selected candidates into challenge pairs (z0, z1)."""

    @abstractmethod
    def train(self, data: np.ndarray, rng: np.random.Generator):
        ...

    @abstractmethod
    def loss(self, model, points: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def draw_reference(self, rng: np.random.Generator, k: int, offset: int) -> np.ndarray:
        """Fresh non-member points used to calibrate loss thresholds."""

    @property
    def pair_size(self) -> int:
        """Candidates consumed per challenge pair."""
        return 2


@dataclass
class RandomizedResponse(Mechanism):
    """Releases every training record's bit, flipped with prob 1/(1+e^eps).

    Records are ``(key, bit)``. A challenge pair is one fresh key carrying bit
    0 in z0 and bit 1 in z1, so the released bit at that key is the only
    evidence about which one was trained on.
    """

    eps_true: float
    name: str = "randomized_response"

    def __post_init__(self):
        if not (self.eps_true >= 0) or math.isinf(self.eps_true):
            raise DomainError("eps_true must be finite and nonnegative")

    @property
    def flip_probability(self) -> float:
        return 1.0 / (1.0 + math.exp(self.eps_true))

    @property
    def pair_size(self) -> int:
        return 1

    def draw_base(self, rng, n):
        keys = np.arange(n, dtype=np.int64)
        return np.column_stack([keys, rng.integers(0, 2, size=n)])

    def draw_candidates(self, rng, size, offset):
        keys = offset + np.arange(size, dtype=np.int64)
        return np.column_stack([keys, np.zeros(size, dtype=np.int64)])

    def pair_up(self, rng, chosen):
        z0 = chosen.copy()
        z0[:, 1] = 0
        z1 = chosen.copy()
        z1[:, 1] = 1
        return z0, z1

    def train(self, data, rng):
        flips = rng.random(len(data)) < self.flip_probability
        return dict(zip(data[:, 0].tolist(), (data[:, 1] ^ flips).tolist()))

    def loss(self, model, points):
        # unseen keys get the uninformative loss 1/2
        out = np.empty(len(points))
        for i, (key, bit) in enumerate(points.tolist()):
            released = model.get(key)
            out[i] = 0.5 if released is None else float(released != bit)
        return out

    def draw_reference(self, rng, k, offset):
        keys = offset + np.arange(k, dtype=np.int64)
        return np.column_stack([keys, rng.integers(0, 2, size=k)])


@dataclass
class GaussianMean(Mechanism):
    """Noisy sum of norm-clipped vectors (classical Gaussian mechanism).

    The noise scale 2C sqrt(2 ln(1.25/delta)) / eps covers replacing one
    record; the guarantee is stated for eps <= 1 and is not tight, so eps is
    an upper bound on the true privacy loss. The loss of a point z is
    -<z, theta> / C^2.
    """

    eps: float
    delta: float
    dimension: int = 16
    clip_norm: float = 1.0
    name: str = "gaussian_mean"

    def __post_init__(self):
        if not (self.eps > 0) or not (0 < self.delta < 1):
            raise DomainError("gaussian_mean needs eps > 0 and 0 < delta < 1")
        if self.dimension < 1 or not (self.clip_norm > 0):
            raise DomainError("dimension and clip_norm must be positive")

    @property
    def noise_scale(self) -> float:
        return 2.0 * self.clip_norm * math.sqrt(2.0 * math.log(1.25 / self.delta)) / self.eps

    def _points(self, rng, k):
        # isotropic directions; norms spread over (0, 1.5 C] so some get clipped
        g = rng.standard_normal((k, self.dimension))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        return g * (self.clip_norm * 1.5 * rng.random((k, 1)))

    def draw_base(self, rng, n):
        return self._points(rng, n)

    def draw_candidates(self, rng, size, offset):
        return self._points(rng, size)

    def pair_up(self, rng, chosen):
        half = len(chosen) // 2
        return chosen[:half], chosen[half : 2 * half]

    def _clip(self, x):
        norms = np.linalg.norm(x, axis=1, keepdims=True)
        return x * np.minimum(1.0, self.clip_norm / np.maximum(norms, 1e-300))

    def train(self, data, rng):
        total = self._clip(data).sum(axis=0) if len(data) else np.zeros(self.dimension)
        return total + self.noise_scale * rng.standard_normal(self.dimension)

    def loss(self, model, points):
        return -(self._clip(points) @ model) / self.clip_norm**2

    def draw_reference(self, rng, k, offset):
        return self._points(rng, k)
