# =============================================================================
# RL Curriculum Scheduler - Student Environments
# =============================================================================
'''
RL Curriculum Scheduler - Student Environments
-
Contains the student contract the schedulers train, and the two built-in
students:

- `SyntheticTransferStudent` - per-task losses with closed-form dynamics
    (decay toward a floor, transfer between task pairs, forgetting and an
    over-training penalty), calibrated from a versioned YAML file.
- `TinyLearnedStudent` - a small multi-task classifier (shared tanh layer
    and per-task softmax heads) trained by gradient descent on synthetic
    per-task datasets.

Evaluation and state observation never change the student. Their noise
comes from generators keyed by `(seed, step, ...)`, not from the run's
generator.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# core objects
from .core import (
    StateVector, # state vectors
    TaskId, # task index
    TaskProfile, # task descriptions
    validate_profiles, # task set validation
    write_atomic, # atomic file writing
)

# custom errors
from .errors import (
    AbstractError, # abstract method error
    ConfigError, # invalid configuration
    ReadError, # invalid calibration file
)

# generic objects
from .generic_objects import (
    OBJ, # base object model
    VerbosityLevel, # verbosity levels
)

# used for the learned student's softmax heads
from .neural import softmax

# supported options
from .supported_options import (
    EnvironmentKind, # built-in students
    EvalTarget, # evaluation targets
)

# used for the trajectory dump
import csv
import io

# used for copying the calibration source
import copy

# used for diagnostic logging
import logging

# used for all of the arithmetic
import numpy as np

# used for file paths
from pathlib import Path

# used for type hinting
from typing import (
    Any, # any type
    Dict, # dictionary data type
    List, # list data type
    Optional, # nullable data type
    Sequence, # read-only sequences
    Tuple, # tuple data type
    Union, # multiple types
)


# =============================================================================
# Logging + Constants
# =============================================================================
logger = logging.getLogger(__name__)

CALIBRATION_VERSION: int = 1
''' Version of the synthetic calibration format. '''
DEFAULT_CALIBRATION: Path = \
    Path(__file__).parent / 'calibration' / 'synthetic_v1.yaml'
''' Calibration shipped with the package. '''

# keys of the noise generators
_KEY_OBSERVE: int = 1
_KEY_EVAL: int = 2
_KEY_MIXED: int = 3


# =============================================================================
# Keyed Normal Draws
# =============================================================================
def keyed_normal(
        key: Sequence[int],
        size: Optional[int] = None
) -> Union[float, np.ndarray]:
    ''' Standard normal draws from a generator seeded by `key` alone. '''
    gen = np.random.default_rng([int(k) for k in key])
    if size is None:
        return float(gen.standard_normal())
    return gen.standard_normal(size)


# =============================================================================
# Student Learning Rate
# =============================================================================
def student_learning_rate(step: int, warmup: int) -> float:
    '''
    Student Learning Rate
    -
    Relative learning rate of the student at `step` (1-based): rises
    linearly over `warmup` steps, then decays with `sqrt(warmup / step)`.
    A warm-up of `0` gives a constant rate of 1.

    Parameters
    -
    - step : `int`
        - Training step.
    - warmup : `int`
        - Length of the student's learning-rate warm-up.

    Returns
    -
    - `float`
        - The multiplier, in `(0, 1]`.
    '''

    if warmup <= 0:
        return 1.0
    step = max(step, 1)
    if step < warmup:
        return step / warmup
    return float(np.sqrt(warmup / step))


# =============================================================================
# Student Environment Contract
# =============================================================================
class StudentEnvironment(OBJ):
    '''
    Student Environment Contract
    -
    A multi-task learner the schedulers train. `TrainOn` advances exactly one
    training step; every other method is read-only.

    Fields
    -
    - profiles : `List<TaskProfile>`
    - probes_per_task : `int`
    - seed : `int`
    - step : `int` (training steps since `Reset`)

    Methods
    -
    - ConfigDict() : `dict` << abstract >>
    - EvalMixed() : `float` << abstract >>
    - EvalScore(task) : `float` << abstract >>
    - EvaluateAll() : `ndarray` << abstract >>
    - ObserveState() : `ndarray` << abstract >>
    - Reset(seed) << abstract >>
    - TrainOn(task, rng) << abstract >>
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            profiles: Sequence[TaskProfile],
            probes_per_task: int
    ) -> None:
        validate_profiles(profiles)
        if probes_per_task < 1:
            raise ConfigError(
                f'`probes_per_task` must be >= 1, got {probes_per_task}'
            )
        self.profiles: List[TaskProfile] = list(profiles)
        ''' Task set. '''
        self.probes_per_task = probes_per_task
        ''' Entries of the state vector per task. '''
        self.seed: int = 0
        ''' Seed given to the last `Reset`. '''
        self.step: int = 0
        ''' Training steps since the last `Reset`. '''

    # ====================
    # Property - Task Count
    @property
    def num_tasks(self) -> int:
        ''' Number of tasks (K). '''
        return len(self.profiles)

    # ===================
    # Property - State Dim
    @property
    def state_dim(self) -> int:
        ''' Size of the state vector (`K x probes_per_task`). '''
        return self.num_tasks * self.probes_per_task

    # ====================
    # Property - Task Names
    @property
    def task_names(self) -> List[str]:
        ''' Task labels, in index order. '''
        return [p.name for p in self.profiles]

    # =============================
    # Method - Configuration Dict
    def ConfigDict(self) -> Dict[str, Any]:
        ''' Settings for the log's configuration snapshot. '''
        raise AbstractError(
            f'StudentEnvironment().ConfigDict() has not been defined in ' \
            + f'{self.__class__}'
        )

    # ===================
    # Method - Eval Mixed
    def EvalMixed(self) -> float:
        ''' Score on an equally weighted sample of every task. '''
        raise AbstractError(
            f'StudentEnvironment().EvalMixed() has not been defined in ' \
            + f'{self.__class__}'
        )

    # ===================
    # Method - Eval Score
    def EvalScore(self, task: TaskId) -> float:
        ''' Score (negative loss) on the task's development data. '''
        raise AbstractError(
            f'StudentEnvironment().EvalScore() has not been defined in ' \
            + f'{self.__class__}'
        )

    # =====================
    # Method - Evaluate All
    def EvaluateAll(self) -> np.ndarray:
        ''' Noise-free score of every task. '''
        raise AbstractError(
            f'StudentEnvironment().EvaluateAll() has not been defined in ' \
            + f'{self.__class__}'
        )

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['task_names', 'step']
        return ['task_names', 'probes_per_task', 'seed', 'step']

    # ======================
    # Method - Observe State
    def ObserveState(self) -> StateVector:
        ''' Per-probe losses, grouped in K blocks. '''
        raise AbstractError(
            f'StudentEnvironment().ObserveState() has not been defined in ' \
            + f'{self.__class__}'
        )

    # ==============
    # Method - Reset
    def Reset(self, seed: int) -> None:
        ''' Restores the untrained student. '''
        raise AbstractError(
            f'StudentEnvironment().Reset() has not been defined in ' \
            + f'{self.__class__}'
        )

    # =================
    # Method - Train On
    def TrainOn(self, task: TaskId, rng: np.random.Generator) -> None:
        ''' One training step on a minibatch of `task`. '''
        raise AbstractError(
            f'StudentEnvironment().TrainOn() has not been defined in ' \
            + f'{self.__class__}'
        )

    # =======================
    # Method - Validate Task
    def _CheckTask(self, task: TaskId) -> None:
        if not 0 <= task < self.num_tasks:
            raise ValueError(
                f'Invalid task {task} for {self.num_tasks} tasks'
            )


# =============================================================================
# Synthetic Calibration
# =============================================================================
class SyntheticCalibration(OBJ):
    '''
    Synthetic Calibration
    -
    Constants of the synthetic student, read from a versioned YAML file.

    Fields
    -
    - profiles : `List<TaskProfile>` (data weights normalized)
    - families : `List<int>`
    - floors : `ndarray`
    - ceiling : `float`
    - initial_loss : `float`
    - rate : `float`
    - transfer : `ndarray` (`K x K`, row = trained task)
    - transfer_gap : `ndarray`
    - forget_rate : `ndarray`
    - overfit_rate : `ndarray`
    - exposure_relax : `float`
    - corpus_batches : `float`
    - lr_warmup : `int`
    - obs_noise : `float`
    - eval_noise : `float`
    - step_noise : `float`
    - probes_per_task : `int`
    - source : `dict` (the dictionary it was read from)

    Methods
    -
    - Default() : `SyntheticCalibration` << class >>
    - FromDict(data) : `SyntheticCalibration` << class >>
    - Read(file_name) : `SyntheticCalibration` << class >>
    - WithOverrides(overrides) : `SyntheticCalibration`
    '''

    SCALAR_KEYS: Tuple[str, ...] = (
        'ceiling', 'initial_loss', 'rate', 'exposure_relax', 'corpus_batches',
        'obs_noise', 'eval_noise', 'step_noise',
    )
    ''' Scalar keys that can be overridden. '''
    OVERRIDE_KEYS: Tuple[str, ...] = SCALAR_KEYS + (
        'lr_warmup', 'probes_per_task', 'transfer', 'transfer_matrix',
        'transfer_gap', 'forget_rate', 'overfit_rate', 'floors',
    )
    ''' Every key that can be overridden. '''

    # ====================
    # Method - Constructor
    def __init__(self, source: Dict[str, Any]) -> None:
        '''
        Synthetic Calibration Constructor
        -
        Validates a calibration dictionary and derives the arrays.

        Parameters
        -
        - source : `dict`
            - Calibration as read from the YAML file.

        Returns
        -
        None
        '''

        # validate the version
        version = source.get('calibration_version', None)
        if version != CALIBRATION_VERSION:
            raise ValueError(
                f'Calibration Version (`calibration_version`) must be ' \
                + f'{CALIBRATION_VERSION}, got {version!r}'
            )
        self.source: Dict[str, Any] = copy.deepcopy(source)
        ''' The dictionary the calibration was read from. '''

        # tasks (data weights are normalized)
        tasks = source.get('tasks', None)
        if not isinstance(tasks, list) or len(tasks) == 0:
            raise ValueError('Failed to read Calibration Tasks (`tasks`)')
        profiles = [TaskProfile.FromDict(t, i) for i, t in enumerate(tasks)]
        total = sum(p.data_weight for p in profiles)
        self.profiles: List[TaskProfile] = [
            TaskProfile(p.id, p.name, p.data_weight / total, p.warmup_eligible)
            for p in profiles
        ]
        ''' Task set. '''
        validate_profiles(self.profiles)
        num_tasks = len(self.profiles)
        self.families: List[int] = [
            int(t.get('family', i)) for i, t in enumerate(tasks)
        ]
        ''' Family of each task (tasks of a family transfer strongly). '''
        if 'floors' in source:
            self.floors = self._PerTask(source, 'floors', num_tasks)
        else:
            self.floors = np.array([
                self._Number(t, 'floor', f'tasks[{i}].floor')
                for i, t in enumerate(tasks)
            ])
        ''' Lowest reachable loss per task. '''

        # scalars
        self.ceiling = self._Number(source, 'ceiling')
        ''' Highest loss. '''
        self.initial_loss = self._Number(source, 'initial_loss')
        ''' Loss of the untrained student. '''
        self.rate = self._Number(source, 'rate')
        ''' Fraction of the distance to the floor removed per step. '''
        self.exposure_relax = self._Number(source, 'exposure_relax')
        ''' Decay of the per-task data exposure per step. '''
        self.corpus_batches = self._Number(source, 'corpus_batches')
        ''' Minibatches in the whole corpus (scales the per-task data). '''
        self.obs_noise = self._Number(source, 'obs_noise')
        ''' Standard deviation of the probe noise. '''
        self.eval_noise = self._Number(source, 'eval_noise')
        ''' Standard deviation of the evaluation noise. '''
        self.step_noise = self._Number(source, 'step_noise')
        ''' Standard deviation of the training-step noise. '''
        self.lr_warmup = int(self._Number(source, 'lr_warmup'))
        ''' Length of the student's learning-rate warm-up. '''
        self.probes_per_task = int(self._Number(source, 'probes_per_task'))
        ''' Entries of the state vector per task. '''

        # per-task rates
        self.forget_rate = self._PerTask(source, 'forget_rate', num_tasks)
        ''' Drift toward the ceiling while untrained. '''
        self.overfit_rate = self._PerTask(source, 'overfit_rate', num_tasks)
        ''' Loss increase per unit of exposure above one epoch. '''
        gap = source.get('transfer_gap', None)
        if isinstance(gap, dict):
            for key in ('lrl', 'hrl'):
                if key not in gap:
                    raise ValueError(f'Failed to read `transfer_gap.{key}`')
            self.transfer_gap = np.array([
                float(gap['hrl'] if p.warmup_eligible else gap['lrl'])
                for p in self.profiles
            ])
        else:
            self.transfer_gap = self._PerTask(source, 'transfer_gap', num_tasks)
        ''' Distance above the floor where transfer stops. '''

        # transfer matrix
        if 'transfer_matrix' in source:
            self.transfer = np.array(source['transfer_matrix'], dtype = float)
            if self.transfer.shape != (num_tasks, num_tasks):
                raise ValueError(
                    f'Transfer Matrix (`transfer_matrix`) must be ' \
                    + f'{num_tasks}x{num_tasks}, got {self.transfer.shape}'
                )
        else:
            self.transfer = self._FamilyTransfer(source.get('transfer', None))
        ''' `transfer[j][i]` is the benefit to task `i` of training `j`. '''

        self._Validate()

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'SyntheticCalibration':
        return SyntheticCalibration(self.source)

    # ================================
    # Method - Default Calibration
    @classmethod
    def Default(cls) -> 'SyntheticCalibration':
        ''' The calibration shipped with the package. '''
        return cls.Read(DEFAULT_CALIBRATION)

    # ===============================
    # Method - Create from Dictionary
    @classmethod
    def FromDict(cls, data: object) -> 'SyntheticCalibration':
        ''' Creates a calibration from a dictionary read from a file. '''
        if not isinstance(data, dict):
            raise TypeError(
                f'Calibration expected a `dict` type, got `{type(data)}`'
            )
        return cls(data)

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['profiles', 'rate']
        elif lvl == VerbosityLevel.LONG:
            return ['profiles', 'rate', 'floors', 'transfer']
        else:
            return ['profiles', 'families', 'floors', 'ceiling',
                'initial_loss', 'rate', 'transfer', 'transfer_gap',
                'forget_rate', 'overfit_rate', 'exposure_relax',
                'corpus_batches', 'lr_warmup', 'obs_noise', 'eval_noise',
                'step_noise', 'probes_per_task']

    # ==================
    # Method - Read File
    @classmethod
    def Read(cls, file_name: Union[str, Path]) -> 'SyntheticCalibration':
        '''
        Read File
        -
        Reads a calibration from a YAML file.

        Parameters
        -
        - file_name : `str | Path`
            - Name + Directory of the calibration file.

        Returns
        -
        - `SyntheticCalibration`
            - The calibration.
        '''

        # import yaml module
        import yaml # type: ignore

        try:
            with open(file_name, 'r', encoding = 'utf-8') as file:
                data = yaml.safe_load(file)
        except (OSError, yaml.YAMLError) as e:
            raise ReadError(f'Could not parse calibration `{file_name}`: {e}')
        try:
            return cls.FromDict(data)
        except (TypeError, ValueError, ConfigError) as e:
            raise ReadError(f'Invalid calibration `{file_name}`: {e}')

    # ==================
    # Method - To Dict
    def ToDict(self) -> Dict[str, Any]:
        ''' Resolved calibration (every per-task value explicit). '''
        return {
            'calibration_version': CALIBRATION_VERSION,
            'tasks': [
                {**p.ToDict(), 'family': f, 'floor': float(floor)}
                for p, f, floor in zip(
                    self.profiles, self.families, self.floors
                )
            ],
            'ceiling': self.ceiling,
            'initial_loss': self.initial_loss,
            'rate': self.rate,
            'transfer_matrix': self.transfer.tolist(),
            'transfer_gap': self.transfer_gap.tolist(),
            'forget_rate': self.forget_rate.tolist(),
            'overfit_rate': self.overfit_rate.tolist(),
            'exposure_relax': self.exposure_relax,
            'corpus_batches': self.corpus_batches,
            'lr_warmup': self.lr_warmup,
            'obs_noise': self.obs_noise,
            'eval_noise': self.eval_noise,
            'step_noise': self.step_noise,
            'probes_per_task': self.probes_per_task,
        }

    # =======================
    # Method - With Overrides
    def WithOverrides(
            self,
            overrides: Optional[Dict[str, Any]]
    ) -> 'SyntheticCalibration':
        ''' A new calibration with some top-level keys replaced. '''
        if not overrides:
            return self
        unknown = sorted(set(overrides) - set(self.OVERRIDE_KEYS))
        if unknown:
            raise ValueError(
                f'Unknown calibration override(s) {unknown}, expected any ' \
                + f'of {list(self.OVERRIDE_KEYS)}'
            )
        source = copy.deepcopy(self.source)
        source.update(copy.deepcopy(overrides))
        return SyntheticCalibration(source)

    # =========================
    # Method - Family Transfer
    def _FamilyTransfer(self, coeffs: object) -> np.ndarray:
        ''' Transfer matrix built from the family pairs. '''
        if not isinstance(coeffs, dict):
            raise ValueError('Failed to read Transfer Coefficients (`transfer`)')
        for key in ('self', 'hrl_to_lrl', 'lrl_to_hrl', 'other'):
            if key not in coeffs:
                raise ValueError(f'Failed to read `transfer.{key}`')
        num_tasks = len(self.profiles)
        matrix = np.full((num_tasks, num_tasks), float(coeffs['other']))
        for j, trained in enumerate(self.profiles):
            for i, helped in enumerate(self.profiles):
                if i == j:
                    matrix[j, i] = float(coeffs['self'])
                elif self.families[i] == self.families[j]:
                    if trained.warmup_eligible and not helped.warmup_eligible:
                        matrix[j, i] = float(coeffs['hrl_to_lrl'])
                    elif helped.warmup_eligible \
                            and not trained.warmup_eligible:
                        matrix[j, i] = float(coeffs['lrl_to_hrl'])
        return matrix

    # ==================
    # Method - Read Number
    @staticmethod
    def _Number(
            data: Dict[str, Any],
            key: str,
            label: Optional[str] = None
    ) -> float:
        ''' Reads a non-negative number. '''
        label = label or key
        value = data.get(key, None)
        if value is None:
            raise ValueError(f'Failed to read Calibration (`{label}`)')
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError(
                f'Calibration (`{label}`) expected a number, got ' \
                + f'`{type(value)}`'
            )
        if value < 0:
            raise ValueError(f'Calibration (`{label}`) must be >= 0')
        return float(value)

    # =======================
    # Method - Per-Task Values
    @classmethod
    def _PerTask(
            cls,
            data: Dict[str, Any],
            key: str,
            num_tasks: int
    ) -> np.ndarray:
        ''' Reads a scalar (applied to every task) or a list of K numbers. '''
        value = data.get(key, None)
        if isinstance(value, list):
            if len(value) != num_tasks:
                raise ValueError(
                    f'Calibration (`{key}`) expected {num_tasks} values, got ' \
                    + f'{len(value)}'
                )
            return np.array([
                cls._Number({key: v}, key, f'{key}[{i}]')
                for i, v in enumerate(value)
            ])
        return np.full(num_tasks, cls._Number(data, key))

    # =================
    # Method - Validate
    def _Validate(self) -> None:
        ''' Checks the cross-field constraints. '''
        if np.any(self.floors >= self.ceiling):
            raise ValueError('Every floor must be below the `ceiling`')
        if np.any(self.transfer < 0):
            raise ValueError('Transfer coefficients must be >= 0')
        for i in range(len(self.profiles)):
            column = np.delete(self.transfer[:, i], i)
            if column.size and self.transfer[i, i] <= column.max():
                raise ValueError(
                    f'Transfer to task `{self.profiles[i].name}` must be ' \
                    + f'largest from training the task itself'
                )
        if self.exposure_relax >= 1.0:
            raise ValueError('`exposure_relax` must be < 1')
        if self.corpus_batches <= 0:
            raise ValueError('`corpus_batches` must be > 0')
        if self.probes_per_task < 1:
            raise ValueError('`probes_per_task` must be >= 1')


# =============================================================================
# Synthetic Transfer Student
# =============================================================================
class SyntheticTransferStudent(StudentEnvironment):
    '''
    Synthetic Transfer Student
    -
    Per-task losses with closed-form dynamics. See `synthetic_step`.

    Fields
    -
    - calibration : `SyntheticCalibration`
    - losses : `ndarray` (current loss per task)
    - exposure : `ndarray` (recent epochs of data seen per task)
    - keep_trajectory : `bool`
    - trajectory : `List<Tuple<int, int, List<float>>>`
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            calibration: Optional[SyntheticCalibration] = None,
            keep_trajectory: bool = False
    ) -> None:
        calibration = calibration or SyntheticCalibration.Default()
        super().__init__(calibration.profiles, calibration.probes_per_task)
        self.calibration = calibration
        ''' Constants of the dynamics. '''
        self.keep_trajectory = keep_trajectory
        ''' Whether each step's losses are kept for `DumpTrajectory`. '''
        self.losses: np.ndarray = np.empty(0)
        ''' Current loss per task. '''
        self.exposure: np.ndarray = np.empty(0)
        ''' Recent epochs of data seen per task. '''
        self.trajectory: List[Tuple[int, int, List[float]]] = []
        ''' `(step, trained task, losses)` per step, when kept. '''
        self.Reset(0)

    # =============================
    # Method - Configuration Dict
    def ConfigDict(self) -> Dict[str, Any]:
        return {
            'kind': EnvironmentKind.SYNTHETIC.value,
            'calibration': self.calibration.ToDict(),
        }

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'SyntheticTransferStudent':
        student = SyntheticTransferStudent(
            self.calibration,
            self.keep_trajectory
        )
        student.seed = self.seed
        student.step = self.step
        student.losses = self.losses.copy()
        student.exposure = self.exposure.copy()
        student.trajectory = [(s, t, list(l)) for s, t, l in self.trajectory]
        return student

    # ========================
    # Method - Dump Trajectory
    def DumpTrajectory(self, file_name: Union[str, Path]) -> None:
        '''
        Dump Trajectory
        -
        Writes the kept per-step losses as CSV: `step`, `task` (the trained
        task) and one column per task.

        Parameters
        -
        - file_name : `str | Path`
            - Name + Directory of the CSV file.

        Returns
        -
        None
        '''

        if not self.keep_trajectory:
            raise ConfigError(
                'The trajectory was not kept (set `keep_trajectory`)'
            )
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator = '\n')
        writer.writerow(['step', 'task'] + self.task_names)
        for step, task, losses in self.trajectory:
            writer.writerow([step, task] + losses)
        write_atomic(file_name, buffer.getvalue())

    # ===================
    # Method - Eval Mixed
    def EvalMixed(self) -> float:
        noise = 0.0
        if self.calibration.eval_noise:
            noise = self.calibration.eval_noise \
                * float(keyed_normal([self.seed, self.step, _KEY_MIXED]))
        return -(float(np.mean(self.losses)) + noise)

    # ===================
    # Method - Eval Score
    def EvalScore(self, task: TaskId) -> float:
        self._CheckTask(task)
        noise = 0.0
        if self.calibration.eval_noise:
            noise = self.calibration.eval_noise * float(
                keyed_normal([self.seed, self.step, _KEY_EVAL, task])
            )
        return -(float(self.losses[task]) + noise)

    # =====================
    # Method - Evaluate All
    def EvaluateAll(self) -> np.ndarray:
        return -self.losses.copy()

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['step', 'losses']
        return ['task_names', 'seed', 'step', 'losses', 'exposure']

    # ======================
    # Method - Learning Rate
    def LearningRate(self, step: int) -> float:
        ''' Learning-rate multiplier at `step` (1-based). '''
        return student_learning_rate(step, self.calibration.lr_warmup)

    # ======================
    # Method - Observe State
    def ObserveState(self) -> StateVector:
        state = np.repeat(self.losses, self.probes_per_task)
        if self.calibration.obs_noise:
            state = state + self.calibration.obs_noise * np.asarray(
                keyed_normal(
                    [self.seed, self.step, _KEY_OBSERVE],
                    self.state_dim
                )
            )
        return np.maximum(state, 0.0)

    # ==============
    # Method - Reset
    def Reset(self, seed: int) -> None:
        cal = self.calibration
        self.seed = int(seed)
        self.step = 0
        self.losses = np.clip(
            np.full(self.num_tasks, cal.initial_loss),
            cal.floors,
            cal.ceiling
        )
        self.exposure = np.zeros(self.num_tasks)
        self.trajectory = []

    # =================
    # Method - Train On
    def TrainOn(self, task: TaskId, rng: np.random.Generator) -> None:
        synthetic_step(self, task, rng)


# =============================================================================
# Synthetic Step
# =============================================================================
def synthetic_step(
        student: SyntheticTransferStudent,
        task: TaskId,
        rng: np.random.Generator
) -> SyntheticTransferStudent:
    '''
    Synthetic Step
    -
    One training step of the synthetic student on `task` (`j`). With `eta`
    the student's learning-rate multiplier, for every task `i`:

    - `l_i -= eta.rate.M[j][i].max(0, l_i - (floor_i + gap_i))`, where the
        gap applies only for `i != j`;
    - untrained tasks drift up: `l_i += eta.forget_i.(ceiling - l_i)`;
    - the exposure of `j` grows by one over its data size in batches, and
        `l_j += eta.overfit_j.max(0, exposure_j - 1)`;
    - optional step noise (drawn from `rng`), then clamping to
        `[floor_i, ceiling]`.

    Parameters
    -
    - student : `SyntheticTransferStudent`
        - Student updated in place.
    - task : `int`
        - Task trained.
    - rng : `Generator`
        - Random generator (only used when `step_noise > 0`).

    Returns
    -
    - `SyntheticTransferStudent`
        - The same student.
    '''

    student._CheckTask(task)
    cal = student.calibration
    losses = student.losses
    step = student.step + 1
    eta = student.LearningRate(step)

    # transfer toward the (gapped) floors
    targets = cal.floors + cal.transfer_gap
    targets[task] = cal.floors[task]
    updated = losses - eta * cal.rate * cal.transfer[task] \
        * np.maximum(0.0, losses - targets)

    # forgetting of the untrained tasks
    untrained = np.arange(student.num_tasks) != task
    updated[untrained] += eta * cal.forget_rate[untrained] \
        * (cal.ceiling - losses[untrained])

    # over-training of small data
    student.exposure *= (1.0 - cal.exposure_relax)
    data_batches = student.profiles[task].data_weight * cal.corpus_batches
    student.exposure[task] += 1.0 / max(data_batches, 1.0)
    updated[task] += eta * cal.overfit_rate[task] \
        * max(0.0, student.exposure[task] - 1.0)

    if cal.step_noise:
        updated = updated + cal.step_noise * rng.standard_normal(
            student.num_tasks
        )

    student.losses = np.clip(updated, cal.floors, cal.ceiling)
    student.step = step
    if student.keep_trajectory:
        student.trajectory.append((step, task, student.losses.tolist()))
    return student


# =============================================================================
# Observe State
# =============================================================================
def observe_state(student: StudentEnvironment) -> StateVector:
    ''' The student's state vector (read-only). '''
    return student.ObserveState()


# =============================================================================
# Evaluation Score
# =============================================================================
def eval_score(
        student: StudentEnvironment,
        target: Union[TaskId, EvalTarget]
) -> float:
    ''' Score on a task's development data, or on the mixed sample. '''
    if isinstance(target, EvalTarget):
        if target != EvalTarget.MIXED:
            raise ValueError(
                f'`{target.value}` needs a task: pass the task id instead'
            )
        return student.EvalMixed()
    return student.EvalScore(target)


# =============================================================================
# Tiny Learned Student
# =============================================================================
class TinyLearnedStudent(StudentEnvironment):
    '''
    Tiny Learned Student
    -
    Multi-task classifier: a shared `tanh` layer and one softmax head per
    task, trained by plain gradient descent on cross-entropy.

    Each task's data comes from a random linear labelling map; tasks of the
    same family share most of their map, so training one helps the other.
    Training sets are sized by the data weights and cycled (reshuffled with
    the run's generator each epoch); evaluation uses held-out data and a
    fixed set of probe batches.

    Fields
    -
    - settings : `dict`
    - families : `List<int>`
    - w1, b1 : `ndarray` (shared layer)
    - w2, b2 : `ndarray` (per-task heads, indexed by task)
    '''

    DEFAULTS: Dict[str, Any] = {
        'input_dim': 16,
        'hidden': 32,
        'classes': 4,
        'total_examples': 4000,
        'eval_examples': 200,
        'batch_size': 16,
        'lr': 0.1,
        'probes_per_task': 25,
        'probe_batch': 10,
        'task_spread': 0.5,
        'label_noise': 0.1,
    }
    ''' Default settings. '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            profiles: Optional[Sequence[TaskProfile]] = None,
            families: Optional[Sequence[int]] = None,
            settings: Optional[Dict[str, Any]] = None
    ) -> None:
        if profiles is None:
            default = SyntheticCalibration.Default()
            profiles = default.profiles
            families = default.families if families is None else families
        merged = dict(self.DEFAULTS)
        for key, value in (settings or {}).items():
            if key not in self.DEFAULTS:
                raise ValueError(
                    f'Unknown learned-student setting `{key}`, expected any ' \
                    + f'of {list(self.DEFAULTS)}'
                )
            if isinstance(value, bool) \
                    or not isinstance(value, (int, float)) or value <= 0:
                raise ValueError(
                    f'Learned-student setting `{key}` must be a positive ' \
                    + f'number, got {value!r}'
                )
            merged[key] = value
        super().__init__(profiles, int(merged['probes_per_task']))
        self.settings: Dict[str, Any] = merged
        ''' Sizes and rates of the classifier and its data. '''
        self.families: List[int] = list(
            range(self.num_tasks) if families is None else families
        )
        ''' Family of each task. '''
        if len(self.families) != self.num_tasks:
            raise ConfigError(
                f'{len(self.families)} families given for {self.num_tasks} ' \
                + f'tasks'
            )
        self.Reset(0)

    # =============================
    # Method - Configuration Dict
    def ConfigDict(self) -> Dict[str, Any]:
        return {
            'kind': EnvironmentKind.LEARNED.value,
            'tasks': [p.ToDict() for p in self.profiles],
            'families': self.families,
            'settings': self.settings,
        }

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'TinyLearnedStudent':
        student = TinyLearnedStudent(
            self.profiles,
            self.families,
            self.settings
        )
        student.Reset(self.seed)
        for name in ('w1', 'b1', 'w2', 'b2'):
            setattr(student, name, getattr(self, name).copy())
        student.order = [o.copy() for o in self.order]
        student.cursor = list(self.cursor)
        student.step = self.step
        return student

    # ===================
    # Method - Eval Mixed
    def EvalMixed(self) -> float:
        return float(np.mean(self.EvaluateAll()))

    # ===================
    # Method - Eval Score
    def EvalScore(self, task: TaskId) -> float:
        self._CheckTask(task)
        x, y = self.eval_sets[task]
        return -float(np.mean(self.Losses(task, x, y)))

    # =====================
    # Method - Evaluate All
    def EvaluateAll(self) -> np.ndarray:
        return np.array([
            -float(np.mean(self.Losses(k, *self.eval_sets[k])))
            for k in range(self.num_tasks)
        ])

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['task_names', 'step']
        return ['task_names', 'families', 'settings', 'seed', 'step']

    # ===============
    # Method - Losses
    def Losses(self, task: TaskId, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        ''' Per-example cross-entropy of the task's head. '''
        _, probs = self._Forward(task, x)
        return -np.log(np.maximum(probs[np.arange(len(y)), y], 1e-300))

    # ======================
    # Method - Observe State
    def ObserveState(self) -> StateVector:
        blocks = []
        for k in range(self.num_tasks):
            x, y = self.probe_sets[k]
            losses = self.Losses(k, x, y).reshape(
                self.probes_per_task,
                int(self.settings['probe_batch'])
            )
            blocks.append(losses.mean(axis = 1))
        return np.concatenate(blocks)

    # ==============
    # Method - Reset
    def Reset(self, seed: int) -> None:
        '''
        Reset
        -
        Regenerates the datasets and the initial parameters from `seed`.

        Parameters
        -
        - seed : `int`
            - Seed of the data and parameter generators.

        Returns
        -
        None
        '''

        s = self.settings
        d, h, c = int(s['input_dim']), int(s['hidden']), int(s['classes'])
        self.seed = int(seed)
        self.step = 0

        # labelling maps: one per family, perturbed per task
        data_rng = np.random.default_rng([self.seed, 101])
        family_maps = {
            f: data_rng.standard_normal((c, d))
            for f in sorted(set(self.families))
        }
        maps = [
            family_maps[f] + s['task_spread'] * data_rng.standard_normal((c, d))
            for f in self.families
        ]

        def sample(k: int, n: int) -> Tuple[np.ndarray, np.ndarray]:
            x = data_rng.standard_normal((n, d))
            logits = x @ maps[k].T \
                + s['label_noise'] * data_rng.standard_normal((n, c))
            return x, np.argmax(logits, axis = 1)

        batch = int(s['batch_size'])
        self.train_sets: List[Tuple[np.ndarray, np.ndarray]] = [
            sample(k, max(batch, int(round(p.data_weight * s['total_examples']))))
            for k, p in enumerate(self.profiles)
        ]
        ''' Training examples per task. '''
        self.eval_sets: List[Tuple[np.ndarray, np.ndarray]] = [
            sample(k, int(s['eval_examples'])) for k in range(self.num_tasks)
        ]
        ''' Held-out development examples per task. '''
        self.probe_sets: List[Tuple[np.ndarray, np.ndarray]] = [
            sample(k, self.probes_per_task * int(s['probe_batch']))
            for k in range(self.num_tasks)
        ]
        ''' Probe batches per task (for the state vector). '''

        # parameters
        param_rng = np.random.default_rng([self.seed, 102])
        self.w1 = param_rng.uniform(-1, 1, (h, d)) / np.sqrt(d)
        ''' Shared layer weights. '''
        self.b1 = np.zeros(h)
        ''' Shared layer biases. '''
        self.w2 = param_rng.uniform(-1, 1, (self.num_tasks, c, h)) / np.sqrt(h)
        ''' Head weights per task. '''
        self.b2 = np.zeros((self.num_tasks, c))
        ''' Head biases per task. '''

        # data cycling
        self.order: List[np.ndarray] = [
            np.arange(len(y)) for _, y in self.train_sets
        ]
        ''' Visiting order of each training set. '''
        self.cursor: List[int] = [0] * self.num_tasks
        ''' Position in each visiting order. '''

    # =================
    # Method - Train On
    def TrainOn(self, task: TaskId, rng: np.random.Generator) -> None:
        self._CheckTask(task)
        batch = int(self.settings['batch_size'])
        x_all, y_all = self.train_sets[task]

        # next minibatch, reshuffling when the epoch ends
        if self.cursor[task] + batch > len(y_all):
            self.order[task] = rng.permutation(len(y_all))
            self.cursor[task] = 0
        idx = self.order[task][self.cursor[task]:self.cursor[task] + batch]
        self.cursor[task] += batch
        x, y = x_all[idx], y_all[idx]

        # gradients of the mean cross-entropy
        hidden, probs = self._Forward(task, x)
        g = probs.copy()
        g[np.arange(len(y)), y] -= 1.0
        g /= len(y)
        grad_w2 = g.T @ hidden
        grad_b2 = g.sum(axis = 0)
        g_hidden = (g @ self.w2[task]) * (1.0 - hidden * hidden)
        grad_w1 = g_hidden.T @ x
        grad_b1 = g_hidden.sum(axis = 0)

        lr = float(self.settings['lr'])
        self.w2[task] -= lr * grad_w2
        self.b2[task] -= lr * grad_b2
        self.w1 -= lr * grad_w1
        self.b1 -= lr * grad_b1
        self.step += 1

    # ======================
    # Method - Forward Pass
    def _Forward(
            self,
            task: TaskId,
            x: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        ''' Hidden activations and class probabilities of the task's head. '''
        hidden = np.tanh(x @ self.w1.T + self.b1)
        return hidden, softmax(hidden @ self.w2[task].T + self.b2[task])


# =============================================================================
# Make Environment
# =============================================================================
def make_environment(
        kind: EnvironmentKind,
        calibration: Optional[Union[str, Path]] = None,
        overrides: Optional[Dict[str, Any]] = None,
        keep_trajectory: bool = False
) -> StudentEnvironment:
    '''
    Make Environment
    -
    Builds a built-in student.

    Parameters
    -
    - kind : `EnvironmentKind`
        - Which student.
    - calibration : `str | Path | None`
        - Calibration file. Defaults to the packaged calibration. The learned
            student only reads its task set and families.
    - overrides : `dict | None`
        - Calibration overrides (synthetic) or classifier settings (learned).
    - keep_trajectory : `bool`
        - Keep per-step losses of the synthetic student.

    Returns
    -
    - `StudentEnvironment`
        - The student.
    '''

    base = SyntheticCalibration.Read(calibration or DEFAULT_CALIBRATION)
    try:
        if kind == EnvironmentKind.SYNTHETIC:
            return SyntheticTransferStudent(
                base.WithOverrides(overrides),
                keep_trajectory
            )
        return TinyLearnedStudent(base.profiles, base.families, overrides)
    except (TypeError, ValueError) as e:
        raise ConfigError(f'Invalid environment configuration: {e}')


# =============================================================================
# End of File
# =============================================================================
