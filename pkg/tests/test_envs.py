# =============================================================================
# RL Curriculum Scheduler - Testing the Students
# =============================================================================
'''
RL Curriculum Scheduler - Testing the Students
-
Synthetic transfer student dynamics and calibration files, and the tiny
learned student.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# used for automatic testing
import pytest

# used for the arithmetic
import numpy as np

# used for the students
from src.curriculum_scheduler_py import (
    ConfigError,
    EnvironmentKind,
    EvalTarget,
    ReadError,
    SyntheticCalibration,
    SyntheticTransferStudent,
    TinyLearnedStudent,
    eval_score,
    make_environment,
    observe_state,
    student_learning_rate,
    synthetic_step,
)


# =============================================================================
# Helpers
# =============================================================================
def _two_task_source(**overrides) -> dict:
    ''' Two independent tasks with noise-free, uniform-rate dynamics. '''
    source = {
        'calibration_version': 1,
        'tasks': [
            {'name': 'small', 'data_weight': 0.1, 'floor': 1.0},
            {'name': 'large', 'data_weight': 0.9, 'floor': 2.0,
                'warmup_eligible': True},
        ],
        'ceiling': 7.0,
        'initial_loss': 5.0,
        'rate': 0.1,
        'transfer_matrix': [[1.0, 0.0], [0.0, 1.0]],
        'transfer_gap': 0.0,
        'forget_rate': 0.0,
        'overfit_rate': 0.0,
        'exposure_relax': 0.0,
        'corpus_batches': 1000,
        'lr_warmup': 0,
        'obs_noise': 0.0,
        'eval_noise': 0.0,
        'step_noise': 0.0,
        'probes_per_task': 3,
    }
    source.update(overrides)
    return source


def _student(**overrides) -> SyntheticTransferStudent:
    return SyntheticTransferStudent(
        SyntheticCalibration.FromDict(_two_task_source(**overrides))
    )


# =============================================================================
# Learning Rate
# =============================================================================
@pytest.mark.parametrize('step, warmup, expected', [
    (1, 0, 1.0),
    (5, 10, 0.5),
    (10, 10, 1.0),
    (40, 10, 0.5),
])
def test_student_learning_rate(step, warmup, expected):
    assert student_learning_rate(step, warmup) == pytest.approx(expected)


# =============================================================================
# Synthetic Dynamics
# =============================================================================
def test_decay_matches_closed_form():
    student = _student()
    rng = np.random.default_rng(0)
    for m in range(1, 51):
        synthetic_step(student, 0, rng)
        assert student.losses[0] \
            == pytest.approx(1.0 + 4.0 * 0.9 ** m, abs = 1e-12)
    assert student.losses[1] == 5.0
    assert student.step == 50


def test_losses_stay_within_floor_and_ceiling():
    student = _student(rate = 1.0, step_noise = 0.5)
    rng = np.random.default_rng(1)
    for _ in range(200):
        student.TrainOn(int(rng.integers(2)), rng)
        assert np.all(student.losses >= [1.0, 2.0])
        assert np.all(student.losses <= 7.0)


def test_step_noise_comes_from_the_run_generator():
    a = _student(step_noise = 0.1)
    b = _student(step_noise = 0.1)
    for student in (a, b):
        rng = np.random.default_rng(3)
        for _ in range(20):
            student.TrainOn(1, rng)
    assert np.array_equal(a.losses, b.losses)


def test_forgetting_of_untrained_tasks():
    student = _student(forget_rate = 0.01)
    synthetic_step(student, 0, np.random.default_rng(0))
    assert student.losses[1] == pytest.approx(5.0 + 0.01 * (7.0 - 5.0))


def test_overtraining_small_data_raises_its_loss():
    student = _student(
        rate = 0.01,
        overfit_rate = 0.05,
        corpus_batches = 100
    )
    student.keep_trajectory = True
    rng = np.random.default_rng(0)
    for _ in range(200):
        student.TrainOn(0, rng)
    # ten batches of data: exposure passes one epoch after ten steps
    assert student.exposure[0] == pytest.approx(20.0)
    lowest = min(losses[0] for _, _, losses in student.trajectory)
    assert student.losses[0] > lowest + 1.0


def test_transfer_is_asymmetric_between_family_members():
    cal = SyntheticCalibration.Default()
    names = [p.name for p in cal.profiles]
    az, tr = names.index('Az'), names.index('Tr')
    rng = np.random.default_rng(0)

    student = SyntheticTransferStudent(cal)
    start = student.losses.copy()
    for _ in range(500):
        student.TrainOn(tr, rng)
    az_gain = start[az] - student.losses[az]

    student.Reset(0)
    for _ in range(500):
        student.TrainOn(az, rng)
    tr_gain = start[tr] - student.losses[tr]

    assert az_gain > 0.0 and tr_gain > 0.0
    assert az_gain > 1.5 * tr_gain


def test_evaluation_is_read_only():
    student = SyntheticTransferStudent()
    rng = np.random.default_rng(0)
    for k in range(30):
        student.TrainOn(k % student.num_tasks, rng)
    losses = student.losses.copy()
    first = (
        student.ObserveState(),
        [student.EvalScore(k) for k in range(student.num_tasks)],
        student.EvalMixed(),
        student.EvaluateAll(),
    )
    second = (
        observe_state(student),
        [eval_score(student, k) for k in range(student.num_tasks)],
        eval_score(student, EvalTarget.MIXED),
        student.EvaluateAll(),
    )
    assert np.array_equal(first[0], second[0])
    assert first[1] == second[1]
    assert first[2] == second[2]
    assert np.array_equal(first[3], second[3])
    assert np.array_equal(student.losses, losses)
    assert student.step == 30


def test_observation_noise_is_keyed_by_seed_and_step():
    a = SyntheticTransferStudent()
    b = SyntheticTransferStudent()
    a.Reset(5)
    b.Reset(5)
    assert np.array_equal(a.ObserveState(), b.ObserveState())
    b.Reset(6)
    assert not np.array_equal(a.ObserveState(), b.ObserveState())
    assert a.ObserveState().shape == (a.state_dim,)
    assert np.all(a.ObserveState() >= 0.0)


def test_evaluate_all_is_noise_free():
    student = SyntheticTransferStudent()
    np.testing.assert_array_equal(student.EvaluateAll(), -student.losses)


def test_eval_score_needs_a_task_for_the_current_target():
    student = _student()
    with pytest.raises(ValueError):
        eval_score(student, EvalTarget.CURRENT)
    with pytest.raises(ValueError):
        student.EvalScore(2)
    assert eval_score(student, EvalTarget.MIXED) == -5.0


def test_trajectory_dump(tmp_path):
    student = _student()
    with pytest.raises(ConfigError):
        student.DumpTrajectory(tmp_path / 'traj.csv')

    student = SyntheticTransferStudent(student.calibration, keep_trajectory = True)
    rng = np.random.default_rng(0)
    student.TrainOn(0, rng)
    student.TrainOn(1, rng)
    student.DumpTrajectory(tmp_path / 'traj.csv')
    lines = (tmp_path / 'traj.csv').read_text().splitlines()
    assert lines[0] == 'step,task,small,large'
    assert [line.split(',')[:2] for line in lines[1:]] == [['1', '0'], ['2', '1']]

    student.Reset(1)
    assert student.trajectory == []


# =============================================================================
# Calibration
# =============================================================================
def test_default_calibration():
    cal = SyntheticCalibration.Default()
    names = [p.name for p in cal.profiles]
    assert names == ['Az', 'Be', 'Gl', 'Sk', 'Tr', 'Ru', 'Pt', 'Cs']
    assert sum(p.data_weight for p in cal.profiles) == pytest.approx(1.0)
    assert [p.warmup_eligible for p in cal.profiles] == [False] * 4 + [True] * 4
    az, be, tr = 0, 1, 4
    assert cal.transfer[tr, az] == 0.7
    assert cal.transfer[az, tr] == 0.2
    assert cal.transfer[az, be] == 0.05
    assert cal.transfer[az, az] == 1.0
    assert cal.transfer_gap[az] == 0.6 and cal.transfer_gap[tr] == 0.2
    assert cal.probes_per_task * len(names) == 200


def test_calibration_snapshot_rebuilds_the_same_dynamics():
    cal = SyntheticCalibration.Default()
    again = SyntheticCalibration.FromDict(cal.ToDict())
    np.testing.assert_array_equal(again.transfer, cal.transfer)
    np.testing.assert_array_equal(again.floors, cal.floors)
    np.testing.assert_array_equal(again.transfer_gap, cal.transfer_gap)
    assert [p.data_weight for p in again.profiles] \
        == pytest.approx([p.data_weight for p in cal.profiles])


def test_calibration_overrides():
    cal = SyntheticCalibration.FromDict(_two_task_source())
    faster = cal.WithOverrides({'rate': 0.5, 'forget_rate': [0.0, 0.1]})
    assert faster.rate == 0.5
    assert faster.forget_rate.tolist() == [0.0, 0.1]
    assert cal.rate == 0.1
    assert cal.WithOverrides(None) is cal
    with pytest.raises(ValueError):
        cal.WithOverrides({'tasks': []})


@pytest.mark.parametrize('bad', [
    {'calibration_version': 2},
    {'tasks': []},
    {'ceiling': 1.5},
    {'rate': -0.1},
    {'rate': 'fast'},
    {'transfer_matrix': [[1.0, 0.0]]},
    {'transfer_matrix': [[1.0, 1.0], [0.0, 1.0]]},
    {'transfer_matrix': [[1.0, -0.1], [0.0, 1.0]]},
    {'forget_rate': [0.0]},
    {'exposure_relax': 1.0},
    {'corpus_batches': 0},
])
def test_calibration_rejects_invalid_values(bad):
    with pytest.raises((TypeError, ValueError, ConfigError)):
        SyntheticCalibration.FromDict(_two_task_source(**bad))


def test_calibration_read_errors(tmp_path):
    with pytest.raises(ReadError):
        SyntheticCalibration.Read(tmp_path / 'missing.yaml')
    broken = tmp_path / 'broken.yaml'
    broken.write_text('tasks: [unclosed\n')
    with pytest.raises(ReadError):
        SyntheticCalibration.Read(broken)
    invalid = tmp_path / 'invalid.yaml'
    invalid.write_text('calibration_version: 1\ntasks: []\n')
    with pytest.raises(ReadError):
        SyntheticCalibration.Read(invalid)


def test_make_environment():
    student = make_environment(
        EnvironmentKind.SYNTHETIC,
        overrides = {'obs_noise': 0.0}
    )
    assert isinstance(student, SyntheticTransferStudent)
    assert student.calibration.obs_noise == 0.0
    assert student.ConfigDict()['kind'] == 'synthetic'

    with pytest.raises(ConfigError):
        make_environment(EnvironmentKind.SYNTHETIC, overrides = {'bogus': 1})
    with pytest.raises(ConfigError):
        make_environment(EnvironmentKind.LEARNED, overrides = {'hidden': -1})


# =============================================================================
# Tiny Learned Student
# =============================================================================
def _learned() -> TinyLearnedStudent:
    return TinyLearnedStudent(settings = {'probes_per_task': 4, 'probe_batch': 5})


def test_learned_state_recomputes_probe_losses():
    student = _learned()
    state = student.ObserveState()
    assert state.shape == (student.state_dim,) == (8 * 4,)
    for k in range(student.num_tasks):
        x, y = student.probe_sets[k]
        expected = student.Losses(k, x, y).reshape(4, 5).mean(axis = 1)
        np.testing.assert_allclose(state[4 * k:4 * (k + 1)], expected, atol = 1e-12)


def test_learned_student_improves_with_training():
    student = _learned()
    rng = np.random.default_rng(0)
    before = student.EvalScore(5)
    for _ in range(100):
        student.TrainOn(5, rng)
    assert student.EvalScore(5) > before
    assert student.step == 100


def test_learned_student_reset_is_deterministic():
    a = _learned()
    b = _learned()
    rng_a, rng_b = np.random.default_rng(2), np.random.default_rng(2)
    for _ in range(10):
        a.TrainOn(0, rng_a)
        b.TrainOn(0, rng_b)
    assert np.array_equal(a.ObserveState(), b.ObserveState())
    a.Reset(0)
    assert np.array_equal(a.ObserveState(), _learned().ObserveState())


def test_learned_evaluation_is_read_only():
    student = _learned()
    first = student.EvaluateAll()
    student.EvalMixed()
    student.ObserveState()
    np.testing.assert_array_equal(student.EvaluateAll(), first)
    assert student.EvalMixed() == pytest.approx(float(np.mean(first)))


def test_learned_student_rejects_unknown_settings():
    with pytest.raises(ValueError):
        TinyLearnedStudent(settings = {'depth': 3})


# =============================================================================
# End of File
# =============================================================================
