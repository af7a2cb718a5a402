"""Deterministic text embeddings.

The embedder hashes unigram and adjacent-bigram features into a fixed
256-dimensional signed vector (FNV-1a 64-bit, hashing-trick sign from the
top hash bit) and L2-normalizes the result. It is bit-exact across runs and
platforms, which is what lets every ranking operation in the retrieval
engine be checked against brute-force oracles.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, EmptyList

DIMENSION = 256

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64_MASK = 0xFFFFFFFFFFFFFFFF

# Unicode alphanumerics, underscore excluded; applied to lowercased text.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class EmbedderSpec:
    """Self-description serialized into index headers so persisted indexes
    refuse to load under a different embedding scheme."""

    dimension: int = DIMENSION
    feature_orders: tuple[str, ...] = ("unigram", "bigram")
    hash_name: str = "fnv1a64"
    version: str = "1"

    def __post_init__(self) -> None:
        if self.dimension < 16:
            raise ValueError(f"embedder dimension must be >= 16, got {self.dimension}")

    def to_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "feature_orders": list(self.feature_orders),
            "hash_name": self.hash_name,
            "version": self.version,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EmbedderSpec":
        return cls(
            dimension=data["dimension"],
            feature_orders=tuple(data["feature_orders"]),
            hash_name=data["hash_name"],
            version=data["version"],
        )


@dataclass(frozen=True)
class Embedding:
    """A unit-norm (or all-zero) vector of DIMENSION float64 components."""

    values: np.ndarray = field(repr=False)

    @property
    def dimension(self) -> int:
        return int(self.values.shape[0])

    @property
    def is_zero(self) -> bool:
        return not self.values.any()

    def tolist(self) -> list[float]:
        return [float(v) for v in self.values]

    @classmethod
    def from_values(cls, values: list[float]) -> "Embedding":
        return cls(np.asarray(values, dtype=np.float64))


def tokenize(text: str) -> list[str]:
    """Lowercase and split on maximal runs of non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash."""
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _U64_MASK
    return h


def _feature_slot(feature: str) -> tuple[int, float]:
    h = fnv1a64(feature.encode("utf-8"))
    sign = 1.0 if (h >> 63) == 0 else -1.0
    return h % DIMENSION, sign


# Feature hashing is the hot loop of index builds; the slot of a feature
# string never changes, so memoize it process-wide.
_SLOT_CACHE: dict[str, tuple[int, float]] = {}


def _features(tokens: list[str]) -> list[str]:
    feats = list(tokens)
    for left, right in zip(tokens, tokens[1:]):
        feats.append(left + "_" + right)
    return feats


def embed(text: str) -> Embedding:
    """Hash unigram and adjacent-bigram features of ``text`` into a signed
    accumulator vector, then L2-normalize (the all-zero vector stays zero).
    """
    values = np.zeros(DIMENSION, dtype=np.float64)
    for feature in _features(tokenize(text)):
        slot = _SLOT_CACHE.get(feature)
        if slot is None:
            slot = _feature_slot(feature)
            _SLOT_CACHE[feature] = slot
        values[slot[0]] += slot[1]
    norm = float(np.linalg.norm(values))
    if norm > 0.0:
        values /= norm
    return Embedding(values)


def cosine(a: Embedding, b: Embedding) -> float:
    """Dot product of two already-normalized embeddings; 0.0 when either is
    the zero vector."""
    if a.dimension != b.dimension:
        raise DimensionMismatch(
            f"embedding dimensions differ: {a.dimension} vs {b.dimension}"
        )
    if a.is_zero or b.is_zero:
        return 0.0
    return float(np.dot(a.values, b.values))


def centroid(embeddings: list[Embedding]) -> Embedding:
    """Component-wise mean of the inputs, L2-normalized (zero stays zero)."""
    if not embeddings:
        raise EmptyList("centroid requires at least one embedding")
    dim = embeddings[0].dimension
    for e in embeddings[1:]:
        if e.dimension != dim:
            raise DimensionMismatch(
                f"embedding dimensions differ: {dim} vs {e.dimension}"
            )
    mean = np.mean([e.values for e in embeddings], axis=0)
    norm = float(np.linalg.norm(mean))
    if norm > 0.0:
        mean = mean / norm
    else:
        mean = np.zeros(dim, dtype=np.float64)
    return Embedding(mean)
