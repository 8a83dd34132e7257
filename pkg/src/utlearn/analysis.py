"""Contraction factors, initialization radius and recursion checks.

For a ground-truth code matrix ``Z*`` (n x N) two contraction factors are
available:

* ``q1 = max_k ||D_k Z* Dt_k||_2`` for codes with orthonormal rows, and
* ``q2 = kappa(Z*)**4 * max_k ||D_k (Z* Z*.T Z*) Dt_k||_2`` in general,

where ``D_k`` zeroes row ``k`` and ``Dt_k`` keeps only the columns in which
row ``k`` of ``Z*`` is nonzero. Row indices are zero-based throughout.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .errors import DegenerateModelError, InvalidDimensionError, ShapeError, SingularModelError
from .generative import SamplerConfig, sample_sparse_coeffs
from .seeding import derive_rng

if TYPE_CHECKING:
    from .learner import RunTrace

__all__ = [
    "SpectralReport",
    "ConjectureResult",
    "RecursionCheck",
    "masked_spectral_norm",
    "compute_q1",
    "compute_q2",
    "condition_number",
    "beta_min",
    "epsilon_bound",
    "spectral_report",
    "verify_recursion",
    "support_superset_check",
    "monte_carlo_conjecture",
]

DEFAULT_SLACK = 0.05
ACTIVATION_LEVEL = 1e-2


def _spectral_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.svd(a, compute_uv=False)[0])


def masked_spectral_norm(z, k: int, support=None) -> float:
    """Spectral norm of ``z`` with row ``k`` zeroed, restricted to the support columns of row ``k``.

    The support is taken from row ``k`` of ``support`` (default: ``z`` itself),
    which lets the same mask be applied to a product such as ``Z* Z*.T Z*``.
    An empty support gives 0.
    """
    z = np.asarray(z, dtype=float)
    ref = z if support is None else np.asarray(support)
    if z.ndim != 2 or ref.shape != z.shape:
        raise ShapeError(f"bad shapes {z.shape} / {ref.shape}")
    if not 0 <= k < z.shape[0]:
        raise IndexError(f"row index {k} out of range for {z.shape[0]} rows")
    cols = np.flatnonzero(ref[k])
    # Deleting row k leaves the same nonzero singular values as zeroing it.
    return _spectral_norm(np.delete(z[:, cols], k, axis=0))


def _max_masked(m: np.ndarray, support: np.ndarray) -> float:
    return max((masked_spectral_norm(m, k, support) for k in range(m.shape[0])), default=0.0)


def compute_q1(z_star) -> float:
    z_star = np.asarray(z_star, dtype=float)
    return _max_masked(z_star, z_star)


def condition_number(z) -> float:
    """Ratio of largest to smallest of the ``n`` singular values of an ``n x N`` matrix.

    Raises :class:`SingularModelError` if the rows are (numerically) linearly dependent.
    """
    z = np.asarray(z, dtype=float)
    n, n_cols = z.shape
    if n > n_cols:
        raise SingularModelError(f"{n} x {n_cols} matrix cannot have full row rank")
    sv = np.linalg.svd(z, compute_uv=False)
    tol = sv[0] * max(z.shape) * np.finfo(float).eps if sv.size else 0.0
    if sv.size == 0 or sv[-1] <= tol:
        raise SingularModelError("coefficient matrix is rank deficient")
    return float(sv[0] / sv[-1])


def compute_q2(z_star) -> float:
    z_star = np.asarray(z_star, dtype=float)
    kappa = condition_number(z_star)
    triple = (z_star @ z_star.T) @ z_star
    return kappa**4 * _max_masked(triple, z_star)


def beta_min(z_star) -> float:
    """Smallest nonzero magnitude over all l2-normalized columns of ``z_star``."""
    z_star = np.asarray(z_star, dtype=float)
    norms = np.linalg.norm(z_star, axis=0)
    if z_star.shape[1] == 0 or np.any(norms == 0):
        raise DegenerateModelError("coefficient matrix has a zero column")
    mags = np.abs(z_star) / norms
    return float(mags[mags > 0].min())


def epsilon_bound(z_star, multiplier: float = 0.49) -> float:
    return multiplier * beta_min(z_star)


@dataclass(frozen=True)
class SpectralReport:
    q1: float
    q2: float
    kappa: float
    epsilon: float
    beta_min: float

    def as_items(self) -> list[tuple[str, float]]:
        return [("q1", self.q1), ("q2", self.q2), ("kappa", self.kappa),
                ("epsilon", self.epsilon), ("beta_min", self.beta_min)]


def spectral_report(z_star, multiplier: float = 0.49) -> SpectralReport:
    """Collect both contraction factors, ``kappa(Z*)`` and the eps radius.

    A rank-deficient ``z_star`` yields ``kappa = q2 = inf`` here instead of raising.
    """
    z_star = np.asarray(z_star, dtype=float)
    try:
        kappa = condition_number(z_star)
        q2 = compute_q2(z_star)
    except SingularModelError:
        kappa = q2 = float("inf")
    beta = beta_min(z_star)
    return SpectralReport(
        q1=compute_q1(z_star), q2=q2, kappa=kappa,
        epsilon=multiplier * beta, beta_min=beta,
    )


@dataclass(frozen=True)
class RecursionCheck:
    """Outcome of the two per-iteration inequalities at iteration ``t``.

    ``z_ratio = err_z(t) / err_w(t-1)`` and ``w_ratio = err_w(t) / err_z(t)``;
    a 0/0 ratio is reported as 0. Inactive iterations always pass.
    """

    t: int
    active: bool
    z_ok: bool
    w_ok: bool
    z_ratio: float
    w_ratio: float

    @property
    def passed(self) -> bool:
        return not self.active or (self.z_ok and self.w_ok)


def _ratio(num: float, den: float) -> float:
    if num == 0.0:
        return 0.0
    return num / den if den > 0 else float("inf")


def verify_recursion(trace: "RunTrace", report: SpectralReport, slack: float = DEFAULT_SLACK,
                     *, activation: float = ACTIVATION_LEVEL, atol: float = 0.0
                     ) -> list[RecursionCheck]:
    """Check ``err_z(t) <= err_w(t-1)`` and ``err_w(t) <= q2 err_z(t)`` along a trace.

    Both right-hand sides are inflated by ``(1 + slack)`` and then by ``atol``.
    An iteration is checked only once ``err_w(t-1) < activation``, because the
    contraction is asymptotic. ``atol`` defaults to 0; pass a round-off floor
    (about 1e-13 for n = 50) to keep checks meaningful after the iterates have
    converged to machine precision.
    """
    if not trace.has_ground_truth or trace.err_w0 is None:
        raise ValueError("trace carries no ground-truth errors")
    checks = []
    prev_w = trace.err_w0
    for rec in trace.records:
        active = prev_w < activation
        z_ok = rec.err_z <= prev_w * (1 + slack) + atol
        w_ok = rec.err_w <= report.q2 * rec.err_z * (1 + slack) + atol
        checks.append(RecursionCheck(
            t=rec.t, active=active, z_ok=bool(z_ok), w_ok=bool(w_ok),
            z_ratio=_ratio(rec.err_z, prev_w), w_ratio=_ratio(rec.err_w, rec.err_z),
        ))
        prev_w = rec.err_w
    return checks


def support_superset_check(z, z_star) -> bool:
    """True iff every nonzero of ``z_star`` is also a nonzero of ``z``."""
    z = np.asarray(z)
    z_star = np.asarray(z_star)
    if z.shape != z_star.shape:
        raise ShapeError(f"shape mismatch {z.shape} vs {z_star.shape}")
    return bool(np.all((z_star == 0) | (z != 0)))


@dataclass
class ConjectureResult:
    n: int
    n_cols: int
    s: int
    trials: int
    q_values: list[float] = field(default_factory=list)

    @property
    def fraction_below_one(self) -> float:
        return float(np.mean(np.asarray(self.q_values) < 1.0)) if self.q_values else 0.0

    @property
    def median(self) -> float:
        return float(np.median(self.q_values))

    @property
    def max(self) -> float:
        return float(np.max(self.q_values))


def _conjecture_trial(n: int, n_cols: int, s: int, seed: int, trial: int) -> float:
    cfg = SamplerConfig(n=n, n_cols=n_cols, s=s, seed=seed)
    z = sample_sparse_coeffs(cfg, rng=derive_rng(seed, "conjecture", n_cols, trial))
    try:
        return compute_q2(z)
    except SingularModelError:
        return float("inf")


def monte_carlo_conjecture(n: int, s: int, n_cols_list: Sequence[int], trials: int,
                           seed: int = 0, workers: int = 1) -> list[ConjectureResult]:
    """Distribution of ``q2`` over random-support Gaussian codes, one result per ``N``.

    Trial ``i`` at sample count ``N`` always uses the stream derived from
    ``(seed, N, i)``, so results do not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if any(N < n for N in n_cols_list):
        raise InvalidDimensionError(f"every N must be >= n={n}")
    results = []
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for n_cols in n_cols_list:
            qs = pool.map(lambda i: _conjecture_trial(n, n_cols, s, seed, i), range(trials))
            results.append(ConjectureResult(n=n, n_cols=int(n_cols), s=s, trials=trials,
                                            q_values=list(qs)))
    return results
