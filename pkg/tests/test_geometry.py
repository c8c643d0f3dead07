import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skewprod import corpus
from skewprod.errors import ComponentError, InputError, RankDeficientError
from skewprod.geometry import (
    Immersion, ProductAmbient, frames, gram_schmidt, induced_metric, normal_completion, sample_points,
)


def test_ambient_validation():
    assert ProductAmbient((1, -1, 1)).n == 3
    with pytest.raises(InputError):
        ProductAmbient((1, 1))
    with pytest.raises(InputError):
        ProductAmbient((1, 2))


def test_immersion_validation():
    ok = dict(params=["x"], components=["x", "x^2"], domain=[(0, 1)], signs=[1, -1])
    Immersion.from_strings(**ok)
    with pytest.raises(InputError, match="distinct"):
        Immersion.from_strings(**{**ok, "params": ["x", "x"], "domain": [(0, 1), (0, 1)],
                                  "components": ["x", "x", "x"], "signs": [1, -1, 1]})
    with pytest.raises(InputError, match="reserved"):
        Immersion.from_strings(**{**ok, "params": ["pi"], "components": ["pi", "pi"]})
    with pytest.raises(InputError, match="components"):
        Immersion.from_strings(**{**ok, "components": ["x"]})
    with pytest.raises(InputError, match="interval"):
        Immersion.from_strings(**{**ok, "domain": [(1, 0)]})
    with pytest.raises(InputError, match="interval"):
        Immersion.from_strings(**{**ok, "domain": [(0, float("inf"))]})


def test_component_error_carries_index():
    with pytest.raises(ComponentError) as err:
        Immersion.from_strings(["x", "y"], ["x", "x++y", "y"], [(0, 1), (0, 1)], [1, -1, 1])
    d = err.value.to_dict()
    assert d["component"] == 1 and d["kind"] == "parse-error"


def test_reference_metric(ex43):
    for pd in ex43.data:
        x = pd.point[0]
        np.testing.assert_allclose(pd.frame.g_induced, np.diag([5, 10 / 3, 2, x * x, x * x]), atol=1e-10)


def test_gram_schmidt_factorisation():
    jac = np.random.default_rng(3).normal(size=(6, 3))
    E, R = gram_schmidt(jac)
    np.testing.assert_allclose(E @ R, jac, atol=1e-13)
    np.testing.assert_allclose(E.T @ E, np.eye(3), atol=1e-13)
    assert np.allclose(R, np.triu(R)) and np.all(np.diag(R) > 0)


def test_rank_deficiency_detected():
    with pytest.raises(RankDeficientError):
        gram_schmidt(np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]]))
    imm = Immersion.from_strings(["x", "y"], ["x", "x", "x"], [(0, 1), (0, 1)], [1, -1, 1])
    with pytest.raises(RankDeficientError):
        induced_metric(imm, [0.5, 0.5])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n - 1), st.integers(0, 10**6))))
def test_normal_completion_is_orthonormal_complement(args):
    n, d, seed = args
    E, _ = gram_schmidt(np.random.default_rng(seed).normal(size=(n, d)))
    Xi = normal_completion(E)
    full = np.hstack([E, Xi])
    np.testing.assert_allclose(full.T @ full, np.eye(n), atol=1e-12)


def test_normal_completion_prefers_largest_residual():
    E = np.array([[1.0], [0.0], [0.0]])
    Xi = normal_completion(E)
    np.testing.assert_allclose(np.abs(Xi), [[0, 0], [1, 0], [0, 1]], atol=1e-15)


def test_param_coords_inverts_jacobian(ex43):
    pd = ex43.data[5]
    coeffs = np.array([0.3, -1.0, 2.0, 0.5, 0.1])
    np.testing.assert_allclose(pd.frame.param_coords(pd.frame.jacobian @ coeffs), coeffs, atol=1e-12)


def test_sampling_grid_and_random():
    imm = corpus.example43().immersion
    pts = sample_points(imm)
    assert pts.shape == (243 + 16, 5)
    lo = np.array([b[0] for b in imm.domain])
    hi = np.array([b[1] for b in imm.domain])
    assert np.all(pts > lo) and np.all(pts < hi)
    np.testing.assert_array_equal(pts, sample_points(imm))
    assert not np.array_equal(pts, sample_points(imm, seed=1))


def test_sampling_cap_collapses_trailing_parameters():
    imm = corpus.example43().immersion
    pts = sample_points(imm, grid=4, random=0)
    # 4^5 exceeds the cap; the last two parameters sit at their midpoints
    assert len(pts) == 64
    assert np.allclose(pts[:, 3], np.pi) and np.allclose(pts[:, 4], np.pi)


def test_sampling_per_parameter_grid():
    imm = corpus.example43().immersion
    pts = sample_points(imm, grid=[3, 3, 3, 1, 1], random=0)
    assert len(pts) == 27


def test_frames_single_point():
    fp = frames(corpus.sphere(1.5), [1.0, 0.5])
    assert fp.tangent_frame.shape == (3, 2) and fp.normal_frame.shape == (3, 1)
