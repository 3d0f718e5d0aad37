# =============================================================================
# RL Curriculum Scheduler - Testing Against Reference Loops
# =============================================================================
'''
RL Curriculum Scheduler - Testing Against Reference Loops
-
Straight-line numpy versions of the TSCL and DQN decision loops, run for 500
steps on the linear arms with the same seed as the library run. Both must
choose the same tasks and end in the same state.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# used for automatic testing
import pytest

# used for the reference loops
import math
from collections import deque
import numpy as np

# testing students
from .arm_environments import LinearArms

# used for the library runs
from src.curriculum_scheduler_py import (
    DqnConfig,
    DqnScheduler,
    SchedulerConfig,
    TsclConfig,
    TsclScheduler,
    init_params,
    run_experiment,
)


# =============================================================================
# Constants
# =============================================================================
STEPS = 500
INTERVAL = 10
SEED = 21


# =============================================================================
# TSCL Reference
# =============================================================================
def _tscl_reference(alpha: float, epsilon: float):
    env = LinearArms()
    k = env.num_tasks
    rng = np.random.default_rng(SEED)
    q = np.zeros(k)
    h = np.zeros(k)
    queue = deque(range(1, k))
    current = 0
    actions, rewards = [], []

    for t in range(1, STEPS + 1):
        actions.append(current)
        env.TrainOn(current, rng)
        if t % INTERVAL:
            continue
        x = env.EvalScore(current)
        reward = x - h[current]
        h[current] = x
        q[current] = alpha * reward + (1.0 - alpha) * q[current]
        rewards.append(reward)
        if queue:
            current = queue.popleft()
        elif rng.random() < epsilon:
            current = int(rng.integers(k))
        else:
            current = int(np.argmax(np.abs(q)))
    return actions, rewards, q, h


@pytest.mark.parametrize('alpha, epsilon', [(0.1, 0.1), (0.3, 0.3)])
def test_tscl_matches_the_reference_loop(alpha, epsilon):
    env = LinearArms()
    scheduler = TsclScheduler(
        env.profiles,
        TsclConfig(alpha = alpha, epsilon = epsilon)
    )
    log = run_experiment(SchedulerConfig(STEPS, seed = SEED), env, scheduler)
    actions, rewards, q, h = _tscl_reference(alpha, epsilon)

    assert [r.action for r in log.records] == actions
    assert [r.reward for r in log.records if r.reward is not None] \
        == pytest.approx(rewards, abs = 1e-12)
    np.testing.assert_allclose(scheduler.table.q, q, rtol = 0, atol = 1e-12)
    np.testing.assert_allclose(scheduler.table.h, h, rtol = 0, atol = 1e-12)


# =============================================================================
# DQN Reference
# =============================================================================
CONFIG = dict(
    hidden_sizes = [8],
    replay_capacity = 20,
    replay_min = 5,
    minibatch_size = 4,
    decay_horizon = 100,
    warmup_steps = 50,
    action_interval = INTERVAL,
    lr = 1e-3,
)


def _epsilon(step: int) -> float:
    w, horizon = CONFIG['warmup_steps'], CONFIG['decay_horizon']
    if step < w:
        return 1.0
    if step - w >= horizon:
        return 0.01
    return max(0.01, math.exp(-math.log(1.0 / 0.01) / horizon * (step - w)))


def _q(net, x):
    (w1, b1), (w2, b2) = net
    hidden = np.tanh(x @ w1.T + b1)
    return hidden @ w2.T + b2, hidden


def _dqn_reference():
    env = LinearArms()
    k = env.num_tasks
    rng = np.random.default_rng(SEED)
    gamma, tau, lr = 0.99, 0.005, CONFIG['lr']
    rho, stabilizer = 0.99, 1e-8
    w = CONFIG['warmup_steps']
    pool = [1, 2]

    params = init_params([env.state_dim, 8, k], rng)
    online = [[a.copy() for a in pair]
        for pair in zip(params.weights, params.biases)]
    target = [[a.copy() for a in pair] for pair in online]
    square = [[np.zeros_like(a) for a in pair] for pair in online]
    buffer = deque(maxlen = CONFIG['replay_capacity'])

    state = env.ObserveState()
    current = pool[rng.integers(len(pool))]
    previous_score = env.EvalScore(current)
    actions, epsilons = [], []
    eps = _epsilon(0)

    for t in range(1, STEPS + 1):
        actions.append(current)
        epsilons.append(eps)
        env.TrainOn(current, rng)
        if t % INTERVAL:
            continue

        score = env.EvalScore(current)
        reward = score - previous_score
        next_state = env.ObserveState()
        eps = _epsilon(t)
        if t < w:
            current = pool[rng.integers(len(pool))]
        else:
            buffer.append((state, current, reward, next_state))
            if len(buffer) >= CONFIG['replay_min']:
                idx = rng.choice(len(buffer), size = 4, replace = False)
                batch = [buffer[int(i)] for i in idx]
                s0 = np.stack([b[0] for b in batch])
                a0 = np.array([b[1] for b in batch])
                r0 = np.array([b[2] for b in batch])
                s1 = np.stack([b[3] for b in batch])
                y = r0 + gamma * _q(target, s1)[0].max(axis = 1)

                rows = np.arange(len(batch))
                q, hidden = _q(online, s0)
                g = np.zeros_like(q)
                g[rows, a0] = np.clip(q[rows, a0] - y, -1.0, 1.0) / len(batch)
                grads = [
                    [g.T @ hidden, g.sum(axis = 0)],
                ]
                g_hidden = (g @ online[1][0]) * (1.0 - hidden * hidden)
                grads.insert(0, [g_hidden.T @ s0, g_hidden.sum(axis = 0)])

                for layer in range(2):
                    for j in range(2):
                        v = rho * square[layer][j] \
                            + (1.0 - rho) * grads[layer][j] * grads[layer][j]
                        square[layer][j] = v
                        online[layer][j] = online[layer][j] \
                            - lr * grads[layer][j] / np.sqrt(v + stabilizer)
                target = [
                    [tau * o + (1.0 - tau) * p for o, p in zip(op, tp)]
                    for op, tp in zip(online, target)
                ]

            if rng.random() < eps:
                current = int(rng.integers(k))
            else:
                current = int(np.argmax(_q(target, next_state)[0]))
        previous_score = env.EvalScore(current)
        state = next_state

    return actions, epsilons, online, target, buffer


def test_dqn_matches_the_reference_loop():
    env = LinearArms()
    config = DqnConfig(**CONFIG)
    scheduler = DqnScheduler(env.profiles, config, env.state_dim)
    run = SchedulerConfig(
        STEPS,
        action_interval = INTERVAL,
        warmup_steps = CONFIG['warmup_steps'],
        seed = SEED
    )
    log = run_experiment(run, env, scheduler)
    actions, epsilons, online, target, buffer = _dqn_reference()

    assert [r.action for r in log.records] == actions
    assert [r.epsilon for r in log.records] \
        == pytest.approx(epsilons, abs = 1e-12)

    assert scheduler.buffer.size == len(buffer)
    for stored, expected in zip(scheduler.buffer.storage, buffer):
        assert stored.action == expected[1]
        assert stored.reward == pytest.approx(expected[2], abs = 1e-12)
        np.testing.assert_allclose(stored.state_next, expected[3], atol = 1e-12)

    for net, reference in ((scheduler.online, online), (scheduler.target, target)):
        for layer, (w, b) in enumerate(reference):
            np.testing.assert_allclose(net.weights[layer], w, rtol = 0, atol = 1e-10)
            np.testing.assert_allclose(net.biases[layer], b, rtol = 0, atol = 1e-10)


# =============================================================================
# End of File
# =============================================================================
