"""Alternating minimization for unitary sparsifying transform learning.

Solves

    min_{W, Z} ||W P - Z||_F^2   s.t.  W.T W = I,  ||Z[:, j]||_0 <= s

by alternating two exact block minimizations:

* sparse coding, ``Z = H_s(W P)`` column by column, and
* a Procrustes transform update, ``W = V U.T`` from the SVD ``P Z.T = U S V.T``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import epsilon_bound
from .errors import (
    ConfigurationError,
    InvalidSparsityError,
    NumericError,
    ShapeError,
)
from .generative import GenerativeModel
from .seeding import derive_rng

__all__ = [
    "INIT_KINDS",
    "LearnerConfig",
    "IterationRecord",
    "RunTrace",
    "hard_threshold",
    "sparse_code",
    "operator_update",
    "objective",
    "run",
    "dct_matrix",
    "make_initializer",
]

INIT_KINDS = ("eps", "rand", "id", "dct", "unif", "zero")
EPS_MULTIPLIER = 0.49


def _check_sparsity(s: int, n: int) -> None:
    if not 1 <= s <= n:
        raise InvalidSparsityError(f"need 1 <= s <= {n}, got s={s}")


def _keep_largest(x: np.ndarray, s: int) -> np.ndarray:
    # Column-wise H_s on a 2-D array; ties at the cut go to the lowest row index.
    mag = np.abs(x)
    n = x.shape[0]
    cut = np.partition(mag, n - s, axis=0)[n - s]
    keep = mag >= cut
    tied = np.flatnonzero(keep.sum(axis=0) > s)
    if tied.size:
        order = np.argsort(-mag[:, tied], axis=0, kind="stable")[:s]
        fixed = np.zeros((n, tied.size), dtype=bool)
        np.put_along_axis(fixed, order, True, axis=0)
        keep[:, tied] = fixed
    return np.where(keep, x, 0.0)


def hard_threshold(v, s: int) -> np.ndarray:
    """Keep the ``s`` largest-magnitude entries of ``v`` and zero the rest.

    Kept entries are copied unchanged. Ties at the cut are resolved in favour
    of the lower index.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ShapeError(f"expected a vector, got shape {v.shape}")
    _check_sparsity(s, v.shape[0])
    return _keep_largest(v[:, None], s)[:, 0]


def sparse_code(w, p, s: int) -> np.ndarray:
    """Column-wise ``H_s(w @ p)``, the exact minimizer of ``||w p - Z||_F`` over s-sparse Z."""
    w = np.asarray(w, dtype=float)
    p = np.asarray(p, dtype=float)
    if w.ndim != 2 or p.ndim != 2 or w.shape[1] != p.shape[0]:
        raise ShapeError(f"cannot apply {w.shape} transform to {p.shape} data")
    _check_sparsity(s, w.shape[0])
    return _keep_largest(w @ p, s)


def _procrustes(p: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, bool]:
    if p.shape != z.shape:
        raise ShapeError(f"data {p.shape} and codes {z.shape} differ in shape")
    if not (np.all(np.isfinite(p)) and np.all(np.isfinite(z))):
        raise NumericError("non-finite entries in Procrustes inputs")
    cross = p @ z.T
    if not cross.any():
        return np.eye(p.shape[0]), True
    u, _, vt = np.linalg.svd(cross)
    return vt.T @ u.T, False


def operator_update(p, z) -> np.ndarray:
    """Unitary minimizer of ``||W p - z||_F``.

    With the full SVD ``p z.T = U S V.T`` the minimizer is ``V U.T``. When
    ``p z.T`` is exactly zero every orthogonal matrix is optimal and the
    identity is returned.
    """
    w, _ = _procrustes(np.asarray(p, dtype=float), np.asarray(z, dtype=float))
    return w


def objective(w, z, p) -> float:
    w, z, p = (np.asarray(a, dtype=float) for a in (w, z, p))
    if w.shape[1] != p.shape[0] or (w.shape[0], p.shape[1]) != z.shape:
        raise ShapeError(f"shapes {w.shape}, {z.shape}, {p.shape} do not conform")
    r = w @ p - z
    return float(np.vdot(r, r))


@dataclass(frozen=True)
class LearnerConfig:
    s: int
    max_iters: int
    trace_against: GenerativeModel | None = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ConfigurationError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.s < 1:
            raise InvalidSparsityError(f"s must be >= 1, got {self.s}")


@dataclass(frozen=True)
class IterationRecord:
    t: int
    objective: float
    err_w: float | None = None
    err_z: float | None = None
    degenerate: bool = False


@dataclass
class RunTrace:
    """Per-iteration history of one run.

    ``err_w0`` is ``||W^0 - W*||_F`` when ground truth was supplied, so the
    first sparse-coding step can be checked against the initial error.
    """

    records: list[IterationRecord] = field(default_factory=list)
    w: np.ndarray | None = None
    z: np.ndarray | None = None
    err_w0: float | None = None

    @property
    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    @property
    def err_w(self) -> np.ndarray:
        return np.array([np.nan if r.err_w is None else r.err_w for r in self.records])

    @property
    def err_z(self) -> np.ndarray:
        return np.array([np.nan if r.err_z is None else r.err_z for r in self.records])

    @property
    def has_ground_truth(self) -> bool:
        return bool(self.records) and all(
            r.err_w is not None and r.err_z is not None for r in self.records
        )

    def first_below(self, threshold: float) -> int | None:
        """First iteration whose objective is ``<= threshold``."""
        for r in self.records:
            if r.objective <= threshold:
                return r.t
        return None


def run(p, w0, cfg: LearnerConfig) -> RunTrace:
    """Run exactly ``cfg.max_iters`` sparse-coding / transform-update sweeps from ``w0``."""
    p = np.asarray(p, dtype=float)
    w = np.asarray(w0, dtype=float)
    n = p.shape[0]
    if w.shape != (n, n):
        raise ShapeError(f"initial transform must be {(n, n)}, got {w.shape}")
    _check_sparsity(cfg.s, n)
    truth = cfg.trace_against
    if truth is not None and truth.p.shape != p.shape:
        raise ShapeError("ground-truth model does not match the data shape")

    trace = RunTrace()
    if truth is not None:
        trace.err_w0 = float(np.linalg.norm(w - truth.w_star))
    z = None
    for t in range(1, cfg.max_iters + 1):
        z = _keep_largest(w @ p, cfg.s)
        w, degenerate = _procrustes(p, z)
        err_w = err_z = None
        if truth is not None:
            err_w = float(np.linalg.norm(w - truth.w_star))
            err_z = float(np.linalg.norm(z - truth.z_star))
        trace.records.append(
            IterationRecord(t, objective(w, z, p), err_w, err_z, degenerate)
        )
    trace.w, trace.z = w, z
    return trace


def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix, ``M[i, j] = c_i sqrt(2/n) cos(pi (2j+1) i / (2n))``."""
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    m = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * j + 1) * i / (2 * n))
    m[0] /= np.sqrt(2.0)
    return m


def make_initializer(kind: str, model: GenerativeModel | None, seed=0, *, n: int | None = None,
                     multiplier: float = EPS_MULTIPLIER) -> np.ndarray:
    """Initial transform of the given kind.

    ``model`` supplies the dimension and, for ``'eps'``, the ground truth:
    the result is ``W* + eps * G / ||G||_F`` with ``G`` standard Gaussian and
    ``eps`` from :func:`utlearn.analysis.epsilon_bound`. The other kinds only
    need ``n``, which may be passed directly when no model exists.
    """
    if kind not in INIT_KINDS:
        raise ConfigurationError(f"unknown initializer {kind!r}; choose from {INIT_KINDS}")
    if n is None:
        if model is None:
            raise ConfigurationError("either a model or n is required")
        n = model.n
    rng = derive_rng(seed, "init", INIT_KINDS.index(kind)) if isinstance(seed, int) \
        else np.random.default_rng(seed)
    if kind == "eps":
        if model is None:
            raise ConfigurationError("'eps' initialization needs ground truth (W*, Z*)")
        eps = epsilon_bound(model.z_star, multiplier)
        g = rng.standard_normal((n, n))
        return model.w_star + eps * (g / np.linalg.norm(g))
    if kind == "rand":
        return rng.standard_normal((n, n))
    if kind == "id":
        return np.eye(n)
    if kind == "dct":
        return dct_matrix(n)
    if kind == "unif":
        return rng.uniform(0.0, 1.0, size=(n, n))
    return np.zeros((n, n))
