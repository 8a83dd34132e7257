from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from utlearn.analysis import epsilon_bound
from utlearn.errors import ConfigurationError, InvalidSparsityError, NumericError, ShapeError
from utlearn.generative import SamplerConfig, random_unitary, synthesize
from utlearn.learner import (
    INIT_KINDS,
    LearnerConfig,
    dct_matrix,
    hard_threshold,
    make_initializer,
    objective,
    operator_update,
    run,
    sparse_code,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def best_sparse_by_enumeration(y, s):
    """Minimum of ||y - x||^2 over s-sparse x, by trying every support."""
    best = np.inf
    for supp in combinations(range(y.size), s):
        x = np.zeros_like(y)
        x[list(supp)] = y[list(supp)]
        best = min(best, float(np.sum((y - x) ** 2)))
    return best


def rotation_grid(step=1e-4):
    theta = np.arange(0.0, 2 * np.pi, step)
    c, s = np.cos(theta), np.sin(theta)
    rot = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    ref = np.stack([np.stack([c, s], -1), np.stack([s, -c], -1)], -2)
    return np.concatenate([rot, ref])


# hard_threshold

def test_hard_threshold_examples():
    assert hard_threshold([3.0, -1.0, 2.0], 2).tolist() == [3.0, 0.0, 2.0]
    assert hard_threshold([0.0, 0.0, 0.0], 2).tolist() == [0.0, 0.0, 0.0]
    v = np.array([0.5, -2.0, 7.0, 1e-9])
    assert np.array_equal(hard_threshold(v, 4), v)


def test_hard_threshold_ties_keep_lowest_index():
    assert hard_threshold([1.0, -1.0, 1.0, 0.5], 2).tolist() == [1.0, -1.0, 0.0, 0.0]
    assert hard_threshold([2.0, 1.0, -1.0, 1.0], 2).tolist() == [2.0, 1.0, 0.0, 0.0]


@pytest.mark.parametrize("s", [0, 4, -1])
def test_hard_threshold_rejects_bad_sparsity(s):
    with pytest.raises(InvalidSparsityError):
        hard_threshold([1.0, 2.0, 3.0], s)


@given(arrays(float, st.integers(1, 12), elements=finite), st.data())
def test_hard_threshold_properties(v, data):
    s = data.draw(st.integers(1, v.size))
    out = hard_threshold(v, s)
    kept = out != 0
    assert np.count_nonzero(out) <= s
    assert np.array_equal(out[kept], v[kept])
    # every dropped magnitude is no larger than every kept one
    idx = np.argsort(-np.abs(v), kind="stable")[:s]
    mask = np.zeros(v.size, bool)
    mask[idx] = True
    assert np.array_equal(out, np.where(mask, v, 0.0))


# sparse_code

def test_sparse_code_reduces_to_threshold():
    z = sparse_code(np.eye(3), np.array([[3.0], [-1.0], [2.0]]), 2)
    assert z[:, 0].tolist() == [3.0, 0.0, 2.0]


def test_sparse_code_recovers_truth(small_model):
    z = sparse_code(small_model.w_star, small_model.p, small_model.s)
    # W* P equals Z* only up to rounding, so entries of Z* may shift by a few ulps
    assert np.array_equal(z != 0, small_model.z_star != 0)
    assert np.allclose(z, small_model.z_star, atol=1e-14, rtol=0)


def test_sparse_code_shape_error():
    with pytest.raises(ShapeError):
        sparse_code(np.eye(3), np.ones((4, 2)), 1)


def test_sparse_code_matches_enumeration(rng):
    w = rng.standard_normal((4, 4))
    p = rng.standard_normal((4, 6))
    z = sparse_code(w, p, 2)
    y = w @ p
    for j in range(6):
        assert np.sum((y[:, j] - z[:, j]) ** 2) == best_sparse_by_enumeration(y[:, j], 2)


# operator_update

def test_operator_update_identity_cases(rng):
    assert np.allclose(operator_update(np.eye(3), np.eye(3)), np.eye(3), atol=1e-12)
    a = rng.standard_normal((4, 9))
    assert np.allclose(operator_update(a, a), np.eye(4), atol=1e-10)


def test_operator_update_zero_cross_product_gives_identity():
    assert np.array_equal(operator_update(np.ones((3, 5)), np.zeros((3, 5))), np.eye(3))


def test_operator_update_errors():
    with pytest.raises(ShapeError):
        operator_update(np.ones((2, 3)), np.ones((2, 4)))
    bad = np.ones((2, 3))
    bad[0, 0] = np.nan
    with pytest.raises(NumericError):
        operator_update(bad, np.ones((2, 3)))


def test_operator_update_matches_rotation_grid(rng):
    grid = rotation_grid()
    p = rng.standard_normal((2, 7))
    z = rng.standard_normal((2, 7))
    w = operator_update(p, z)
    grid_obj = np.sum((grid @ p - z) ** 2, axis=(1, 2))
    assert abs(objective(w, z, p) - grid_obj.min()) <= 1e-6
    assert objective(w, z, p) <= grid_obj.min() + 1e-12


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(1, 20), st.integers(0, 2**32 - 1))
def test_procrustes_beats_random_unitaries(n, n_cols, seed):
    gen = np.random.default_rng(seed)
    p = gen.standard_normal((n, n_cols))
    z = gen.standard_normal((n, n_cols))
    w = operator_update(p, z)
    assert np.linalg.norm(w.T @ w - np.eye(n)) <= 1e-8
    best = objective(w, z, p)
    for _ in range(100):
        q = random_unitary(n, gen)
        assert best <= objective(q, z, p) + 1e-10


# objective

def test_objective_examples(small_model, rng):
    m = small_model
    assert objective(m.w_star, m.z_star, m.p) <= 1e-18
    assert objective(np.eye(m.n), np.zeros_like(m.p), m.p) == pytest.approx(
        np.linalg.norm(m.p) ** 2, rel=1e-14
    )
    w, z, p = rng.standard_normal((3, 3)), rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    r = w @ p - z
    total = sum(r[i, j] ** 2 for i in range(3) for j in range(3))
    assert objective(w, z, p) == pytest.approx(total, rel=1e-13)


def test_objective_shape_error():
    with pytest.raises(ShapeError):
        objective(np.eye(2), np.zeros((3, 4)), np.zeros((2, 4)))


# run

def test_learner_config_validation():
    with pytest.raises(ConfigurationError):
        LearnerConfig(s=1, max_iters=0)
    with pytest.raises(InvalidSparsityError):
        run(np.ones((3, 4)), np.eye(3), LearnerConfig(s=5, max_iters=1))


def test_run_from_truth_stays_at_truth(small_model):
    m = small_model
    trace = run(m.p, m.w_star, LearnerConfig(m.s, 5, m))
    assert len(trace.records) == 5
    assert trace.err_w0 == 0.0
    assert np.all(trace.err_w <= 1e-8)


@pytest.mark.parametrize("kind", INIT_KINDS)
def test_run_monotone_and_unitary(kind, small_model):
    m = small_model
    w0 = make_initializer(kind, m, seed=5)
    trace = run(m.p, w0, LearnerConfig(m.s, 40, m))
    obj = trace.objectives
    assert np.all(np.diff(obj) <= 1e-12)
    assert np.linalg.norm(trace.w.T @ trace.w - np.eye(m.n)) <= 1e-8
    assert np.count_nonzero(trace.z, axis=0).max() <= m.s


def test_zero_init_marks_first_iteration_degenerate(small_model):
    m = small_model
    trace = run(m.p, np.zeros((m.n, m.n)), LearnerConfig(m.s, 3, m))
    assert trace.records[0].degenerate
    assert not any(r.degenerate for r in trace.records[1:])
    assert trace.records[0].err_z == pytest.approx(np.linalg.norm(m.z_star))


def test_run_s_equals_n_fits_exactly_at_first_iteration(rng):
    p = rng.standard_normal((5, 30))
    trace = run(p, np.eye(5), LearnerConfig(5, 1))
    assert trace.records[0].objective <= 1e-24
    assert trace.records[0].err_w is None


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 7), st.integers(2, 30), st.integers(0, 2**32 - 1), st.data())
def test_run_objective_monotone_property(n, n_cols, seed, data):
    s = data.draw(st.integers(1, n))
    gen = np.random.default_rng(seed)
    p = gen.standard_normal((n, n_cols))
    trace = run(p, gen.standard_normal((n, n)), LearnerConfig(s, 15))
    assert np.all(np.diff(trace.objectives) <= 1e-12)
    assert np.linalg.norm(trace.w.T @ trace.w - np.eye(n)) <= 1e-8


# initializers

def test_dct_matrix_against_scipy():
    from scipy.fft import dct

    for n in (1, 4, 7, 50):
        assert np.allclose(dct_matrix(n), dct(np.eye(n), norm="ortho", axis=0), atol=1e-13)


def test_dct_matrix_n4():
    m = dct_matrix(4)
    assert np.linalg.norm(m.T @ m - np.eye(4)) <= 1e-12
    assert np.allclose(m[0], 0.5, atol=1e-15)
    assert m[1, 0] == pytest.approx(np.sqrt(0.5) * np.cos(np.pi / 8))


def test_initializer_kinds(small_model):
    m = small_model
    assert np.array_equal(make_initializer("zero", None, n=3), np.zeros((3, 3)))
    assert np.array_equal(make_initializer("id", m), np.eye(m.n))
    u = make_initializer("unif", m, seed=1)
    assert u.min() >= 0.0 and u.max() < 1.0
    assert np.array_equal(make_initializer("rand", m, seed=4), make_initializer("rand", m, seed=4))
    w0 = make_initializer("eps", m, seed=2)
    assert abs(np.linalg.norm(w0 - m.w_star) - epsilon_bound(m.z_star)) <= 1e-12


def test_initializer_errors(small_model):
    with pytest.raises(ConfigurationError):
        make_initializer("bogus", small_model)
    with pytest.raises(ConfigurationError):
        make_initializer("eps", None, n=4)
