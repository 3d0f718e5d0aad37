# =============================================================================
# RL Curriculum Scheduler - Testing the Q Network Numerics
# =============================================================================
'''
RL Curriculum Scheduler - Testing the Q Network Numerics
-
Forward and backward passes, the Huber loss, RMSProp and softmax.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# used for automatic testing
import pytest

# used for the arithmetic
import numpy as np

# used for the network code
from src.curriculum_scheduler_py import (
    DimensionError,
    MlpParams,
    RmsPropState,
    backward,
    forward,
    huber,
    init_params,
    rmsprop_step,
    softmax,
)


# =============================================================================
# Helpers
# =============================================================================
def _loss(params: MlpParams, x: np.ndarray, c: np.ndarray) -> float:
    out, _ = forward(params, x)
    return float(np.sum(c * out))


# =============================================================================
# Gradients
# =============================================================================
@pytest.mark.parametrize('sizes', [
    [3, 4, 2],
    [5, 7, 7, 3],
    [2, 1, 4],
    [6, 3, 3, 3, 2],
    [4, 8, 1],
])
def test_backward_matches_finite_differences(sizes):
    rng = np.random.default_rng(sum(sizes))
    params = init_params(sizes, rng)
    x = rng.normal(size = (3, sizes[0]))
    c = rng.normal(size = (3, sizes[-1]))

    _, cache = forward(params, x)
    grads = backward(params, cache, c)

    eps = 1e-6
    for arrays, grad_arrays in [
            (params.weights, grads.weights),
            (params.biases, grads.biases),
    ]:
        for array, grad in zip(arrays, grad_arrays):
            assert grad.shape == array.shape
            for idx in np.ndindex(array.shape):
                saved = array[idx]
                array[idx] = saved + eps
                up = _loss(params, x, c)
                array[idx] = saved - eps
                down = _loss(params, x, c)
                array[idx] = saved
                numeric = (up - down) / (2 * eps)
                scale = max(1.0, abs(numeric), abs(grad[idx]))
                assert abs(numeric - grad[idx]) / scale < 1e-4


def test_forward_single_vector_matches_batch():
    params = init_params([4, 5, 3], np.random.default_rng(0))
    x = np.random.default_rng(1).normal(size = (2, 4))
    batch, _ = forward(params, x)
    single, cache = forward(params, x[1])
    assert single.shape == (3,)
    assert cache.squeezed
    np.testing.assert_allclose(single, batch[1], rtol = 0, atol = 1e-15)


def test_forward_rejects_wrong_input_size():
    params = MlpParams.Zeros([4, 2, 3])
    with pytest.raises(DimensionError):
        forward(params, np.zeros(5))


def test_backward_rejects_wrong_gradient_shape():
    params = MlpParams.Zeros([4, 2, 3])
    _, cache = forward(params, np.zeros((2, 4)))
    with pytest.raises(DimensionError):
        backward(params, cache, np.zeros((2, 2)))


def test_params_reject_unchained_layers():
    with pytest.raises(DimensionError):
        MlpParams(
            weights = [np.zeros((3, 4)), np.zeros((2, 5))],
            biases = [np.zeros(3), np.zeros(2)]
        )


def test_init_params_bounds_and_determinism():
    sizes = [200, 16, 8]
    a = init_params(sizes, np.random.default_rng(3))
    b = init_params(sizes, np.random.default_rng(3))
    for wa, wb, fan_in in zip(a.weights, b.weights, sizes[:-1]):
        assert np.array_equal(wa, wb)
        assert np.all(np.abs(wa) <= 1.0 / np.sqrt(fan_in))
    assert a.sizes == sizes


def test_params_dict_round_trip():
    params = init_params([3, 2, 2], np.random.default_rng(5))
    again = MlpParams.FromDict(params.ToDict())
    assert again.sizes == params.sizes
    for w, v in zip(params.Arrays(), again.Arrays()):
        assert np.array_equal(w, v)


# =============================================================================
# Huber Loss
# =============================================================================
@pytest.mark.parametrize('delta', [0.5, 1.0, 2.0])
def test_huber_is_continuous_at_the_threshold(delta):
    for edge in (delta, -delta):
        inside_value, inside_grad = huber(edge, delta)
        outside = np.nextafter(edge, np.sign(edge) * np.inf)
        outside_value, outside_grad = huber(outside, delta)
        assert inside_value == pytest.approx(0.5 * delta * delta, abs = 1e-12)
        assert abs(inside_value - outside_value) < 1e-12
        assert abs(inside_grad - outside_grad) < 1e-12


def test_huber_branches():
    values, grads = huber(np.array([0.5, -3.0, 2.0]), 1.0)
    np.testing.assert_allclose(values, [0.125, 2.5, 1.5])
    np.testing.assert_allclose(grads, [0.5, -1.0, 1.0])
    with pytest.raises(ValueError):
        huber(1.0, 0.0)


# =============================================================================
# RMSProp
# =============================================================================
def test_rmsprop_single_step_hand_computed():
    params = MlpParams(weights = [np.array([[1.0]])], biases = [np.array([-2.0])])
    grads = MlpParams(weights = [np.array([[0.5]])], biases = [np.array([-0.1])])
    state = RmsPropState.Zeros(params, 0.99, 1e-8)

    new_params, new_state = rmsprop_step(params, grads, state, 0.01)

    v_w = 0.01 * 0.25
    v_b = 0.01 * 0.01
    assert new_state.square_avg.weights[0][0, 0] == pytest.approx(v_w, abs = 1e-15)
    assert new_params.weights[0][0, 0] \
        == pytest.approx(1.0 - 0.01 * 0.5 / np.sqrt(v_w + 1e-8), abs = 1e-10)
    assert new_params.biases[0][0] \
        == pytest.approx(-2.0 + 0.01 * 0.1 / np.sqrt(v_b + 1e-8), abs = 1e-10)
    # inputs are left untouched
    assert params.weights[0][0, 0] == 1.0
    assert state.square_avg.weights[0][0, 0] == 0.0


# =============================================================================
# Softmax
# =============================================================================
def test_softmax_rows_are_distributions():
    x = np.random.default_rng(2).normal(scale = 50.0, size = (4, 8))
    p = softmax(x)
    np.testing.assert_allclose(p.sum(axis = 1), 1.0, atol = 1e-12)
    assert np.all(p >= 0.0)
    np.testing.assert_allclose(softmax(np.zeros(8)), np.full(8, 0.125))


# =============================================================================
# End of File
# =============================================================================
