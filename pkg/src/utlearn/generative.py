"""Ground-truth synthesis: a unitary transform, column-sparse codes and data.

The data matrix is built as ``P = W*.T @ Z*`` so that ``W* @ P = Z*`` holds to
rounding error. Sparse codes follow the random-support Gaussian model: each
column gets ``s`` nonzeros at uniformly random rows, with values drawn
i.i.d. from ``N(0, n / (s * N))``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDimensionError, InvalidSparsityError
from .seeding import derive_rng

__all__ = [
    "SamplerConfig",
    "GenerativeModel",
    "random_unitary",
    "sample_sparse_coeffs",
    "synthesize",
]


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    n_cols: int
    s: int
    seed: int = 0
    normalize: bool = False

    def __post_init__(self):
        if self.n < 1 or self.n_cols < 1:
            raise InvalidDimensionError(
                f"need n >= 1 and n_cols >= 1, got n={self.n}, n_cols={self.n_cols}"
            )
        if not 1 <= self.s <= self.n:
            raise InvalidSparsityError(f"need 1 <= s <= n={self.n}, got s={self.s}")


@dataclass(frozen=True, eq=False)
class GenerativeModel:
    """Exact generative model ``W* P = Z*`` with ``s``-sparse columns in ``Z*``."""

    w_star: np.ndarray
    z_star: np.ndarray
    p: np.ndarray
    n: int
    n_cols: int
    s: int
    normalized: bool = False


def random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-distributed orthogonal ``n x n`` matrix.

    QR of a standard Gaussian matrix, with the columns of Q flipped so that
    R has a positive diagonal.
    """
    if n < 1:
        raise InvalidDimensionError(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def _random_supports(n: int, n_cols: int, s: int, rng: np.random.Generator) -> np.ndarray:
    # Partial Fisher-Yates run on all columns at once; returns (s, n_cols) row indices.
    perm = np.tile(np.arange(n), (n_cols, 1))
    cols = np.arange(n_cols)
    for i in range(s):
        j = rng.integers(i, n, size=n_cols)
        picked = perm[cols, j]
        perm[cols, j] = perm[:, i]
        perm[:, i] = picked
    return perm[:, :s].T


def sample_sparse_coeffs(cfg: SamplerConfig, rng=None) -> np.ndarray:
    """Draw an ``n x n_cols`` matrix with exactly ``s`` Gaussian nonzeros per column.

    ``rng`` overrides the stream derived from ``cfg.seed``.
    """
    if cfg.s > cfg.n:
        raise InvalidSparsityError(f"s={cfg.s} exceeds n={cfg.n}")
    if rng is None:
        rng = derive_rng(cfg.seed, "z_star")
    else:
        rng = np.random.default_rng(rng)
    rows = _random_supports(cfg.n, cfg.n_cols, cfg.s, rng)
    std = np.sqrt(cfg.n / (cfg.s * cfg.n_cols))
    values = rng.normal(0.0, std, size=(cfg.s, cfg.n_cols))
    z = np.zeros((cfg.n, cfg.n_cols))
    z[rows, np.arange(cfg.n_cols)] = values
    return z


def synthesize(cfg: SamplerConfig) -> GenerativeModel:
    """Build ``(W*, Z*, P)`` for ``cfg``; optionally rescale to ``||P||_2 = 1``."""
    w_star = random_unitary(cfg.n, derive_rng(cfg.seed, "w_star"))
    z_star = sample_sparse_coeffs(cfg)
    if cfg.normalize:
        # ||P||_2 == ||Z*||_2 because W* is orthogonal; dividing Z* keeps W* P = Z*.
        z_star = z_star / np.linalg.norm(z_star, 2)
    p = w_star.T @ z_star
    return GenerativeModel(
        w_star=w_star,
        z_star=z_star,
        p=p,
        n=cfg.n,
        n_cols=cfg.n_cols,
        s=cfg.s,
        normalized=cfg.normalize,
    )
