# =============================================================================
# RL Curriculum Scheduler - Testing the Baselines
# =============================================================================
'''
RL Curriculum Scheduler - Testing the Baselines
-
Uniform and proportional sampling, with and without a warm-up.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# used for automatic testing
import pytest

# used for the arithmetic
import numpy as np

# testing students
from .arm_environments import (
    LinearArms,
    arm_profiles,
)

# used for the baselines
from src.curriculum_scheduler_py import (
    BaselineConfig,
    BaselineScheduler,
    ConfigError,
    DecisionSource,
    ExperimentSpec,
    SchedulerConfig,
    SchedulerKind,
    SyntheticCalibration,
    WarmupPool,
    baseline_select,
    run_experiment,
)


# =============================================================================
# Helpers
# =============================================================================
def _draw_shares(config: BaselineConfig, profiles, draws: int, step: int = 10):
    rng = np.random.default_rng(0)
    counts = np.zeros(len(profiles))
    for _ in range(draws):
        counts[baseline_select(config, step, profiles, rng)] += 1
    return counts / draws


def _baseline_run(kind: SchedulerKind, total_steps: int = 100, **kwargs):
    env = LinearArms()
    config = BaselineConfig(kind, **kwargs)
    scheduler = BaselineScheduler(env.profiles, config)
    run = SchedulerConfig(
        total_steps,
        action_interval = config.action_interval,
        warmup_steps = config.warmup_steps,
        seed = 2
    )
    return run_experiment(run, env, scheduler), env


# =============================================================================
# Sampling
# =============================================================================
def test_proportional_follows_the_data_weights():
    profiles = SyntheticCalibration.Default().profiles
    weights = np.array([p.data_weight for p in profiles])
    shares = _draw_shares(
        BaselineConfig(SchedulerKind.PROPORTIONAL),
        profiles,
        100000
    )
    assert 0.5 * np.abs(shares - weights).sum() < 0.01
    ru = [p.name for p in profiles].index('Ru')
    assert shares[ru] == pytest.approx(0.3321 / 1.0001, abs = 0.01)


def test_uniform_ignores_the_data_weights():
    profiles = SyntheticCalibration.Default().profiles
    shares = _draw_shares(BaselineConfig(SchedulerKind.UNIFORM), profiles, 100000)
    assert 0.5 * np.abs(shares - 1.0 / len(profiles)).sum() < 0.01


def test_warmup_draws_from_the_pool():
    profiles = arm_profiles()
    eligible = _draw_shares(
        BaselineConfig(SchedulerKind.UNIFORM, warmup_steps = 50),
        profiles,
        2000,
        step = 20
    )
    assert eligible[0] == 0.0
    assert eligible[1] > 0.4 and eligible[2] > 0.4

    every = _draw_shares(
        BaselineConfig(
            SchedulerKind.PROPORTIONAL,
            warmup_steps = 50,
            warmup_pool = WarmupPool.ALL
        ),
        profiles,
        3000,
        step = 20
    )
    assert np.all(every > 0.25)


def test_single_task_is_always_drawn():
    profiles = arm_profiles((1.0,), eligible = (True,))
    for kind in (SchedulerKind.UNIFORM, SchedulerKind.PROPORTIONAL):
        assert _draw_shares(BaselineConfig(kind), profiles, 50).tolist() == [1.0]


def test_empty_task_set_is_rejected():
    with pytest.raises(ConfigError):
        baseline_select(
            config = BaselineConfig(SchedulerKind.UNIFORM),
            step = 0,
            profiles = [],
            rng = np.random.default_rng(0)
        )


def test_only_baseline_kinds_are_accepted():
    with pytest.raises(ConfigError):
        BaselineConfig(SchedulerKind.DQN)
    with pytest.raises(ConfigError):
        BaselineConfig(SchedulerKind.UNIFORM, action_interval = 0)


# =============================================================================
# Runs
# =============================================================================
def test_rewards_are_consecutive_score_changes():
    log, env = _baseline_run(SchedulerKind.UNIFORM)
    rewarded = [r for r in log.records if r.reward is not None]
    assert [r.step for r in rewarded] == list(range(10, 101, 10))
    for r in rewarded:
        # ten steps on one arm, scored before and after on that arm
        assert r.reward == pytest.approx(10 * env.slopes[r.action], abs = 1e-12)
        assert r.decision_source == DecisionSource.RANDOM


def test_warmup_decisions_carry_no_reward():
    log, _ = _baseline_run(SchedulerKind.PROPORTIONAL, warmup_steps = 40)
    assert all(r.reward is None for r in log.records if r.step < 40)
    assert all(r.action in (1, 2) for r in log.records if r.step <= 40)
    assert all(
        r.decision_source == DecisionSource.WARMUP
        for r in log.records if r.step <= 40
    )
    assert log.records[39].reward is not None


def test_per_step_draws():
    log, _ = _baseline_run(SchedulerKind.UNIFORM, action_interval = 1)
    assert all(r.reward is not None for r in log.records)
    assert len({r.action for r in log.records[:30]}) == 3


@pytest.mark.parametrize('name', [
    'desk_uniform', 'desk_uniform_nowarmup',
    'desk_proportional', 'desk_proportional_nowarmup',
    'full_uniform', 'full_proportional',
])
def test_shipped_baselines_draw_every_step(name):
    spec = ExperimentSpec(f'specs/{name}.yaml').Read()
    assert spec.action_interval == 1
    assert spec.RunConfig(spec.seeds[0]).action_interval == 1


def test_config_snapshot_names_the_baseline():
    log, _ = _baseline_run(SchedulerKind.PROPORTIONAL)
    assert log.config_snapshot['scheduler']['kind'] == 'proportional'


# =============================================================================
# End of File
# =============================================================================
