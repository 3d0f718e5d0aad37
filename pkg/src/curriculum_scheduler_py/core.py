# =============================================================================
# RL Curriculum Scheduler - Core
# =============================================================================
'''
RL Curriculum Scheduler - Core
-
Contains the objects shared by every scheduler and student environment: task
profiles, scores, step records, the experiment log, the scheduler contract,
and the outer training loop (`run_experiment`).

Timing of the loop: the action for steps `1..n` is chosen before step 1. At
each step `t` the student trains once on the current action; when `t` is a
multiple of the action interval `n`, the scheduler observes the student and
chooses the action for steps `t+1..t+n`. The scheduler always draws from the
run's random generator before the student does for the same step.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# custom errors
from .errors import (
    AbstractError, # abstract method error
    ConfigError, # invalid configuration
    DimensionError, # state vector shape mismatch
    NonFiniteError, # NaN scores
    ReadError, # invalid log files
    RunAbortError, # aborted runs
)

# generic objects
from .generic_objects import (
    OBJ, # base object model
    VerbosityLevel, # verbosity levels
)

# supported options
from .supported_options import (
    DecisionSource, # how an action was chosen
    EvalTarget, # data the reward score is computed on
    WarmupPool, # tasks drawn during warm-up
)

# used for writing the logs
import csv
import io
import json
import os
import tempfile

# used for diagnostic logging
import logging

# used for all of the arithmetic and random generators
import numpy as np

# used for file paths
from pathlib import Path

# used for type hinting
from typing import (
    TYPE_CHECKING, # imports only needed by mypy
    Any, # any type
    Callable, # functions
    Dict, # dictionary data type
    List, # list data type
    Optional, # nullable data type
    Sequence, # read-only sequences
    Tuple, # tuple data type
    Union, # multiple types
)
from typing_extensions import TypeAlias

if TYPE_CHECKING:
    from .envs import StudentEnvironment


# =============================================================================
# Logging + Constants
# =============================================================================
logger = logging.getLogger(__name__)

LOG_FORMAT_VERSION: int = 1
''' Version of the JSON experiment log format. '''
CSV_COLUMNS: List[str] = [
    'step', 'action', 'reward', 'score', 'epsilon', 'decision_source'
]
''' Columns of the per-step CSV log. '''
WEIGHT_TOLERANCE: float = 1e-9
''' Allowed deviation of the sum of task data weights from 1. '''

TaskId: TypeAlias = int
''' Index of a task, in `[0, K-1]`. '''
StateVector: TypeAlias = np.ndarray
''' `D = K x probes_per_task` per-probe losses, grouped by task. '''


# =============================================================================
# Atomic File Writing
# =============================================================================
def write_atomic(file_name: Union[str, Path], text: str) -> None:
    '''
    Atomic File Writing
    -
    Writes `text` to a temporary file next to `file_name` and then renames it
    into place, so readers never see a half-written file.

    Parameters
    -
    - file_name : `str | Path`
        - Name + Directory of the file to write.
    - text : `str`
        - Full contents of the file.

    Returns
    -
    None
    '''

    path = Path(file_name)
    path.parent.mkdir(parents = True, exist_ok = True)
    fd, tmp_name = tempfile.mkstemp(
        prefix = f'.{path.name}.',
        suffix = '.tmp',
        dir = path.parent
    )
    try:
        with os.fdopen(fd, 'w', encoding = 'utf-8', newline = '') as file:
            file.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        if os.path.exists(tmp_name): os.remove(tmp_name)
        raise


# =============================================================================
# Task Profile
# =============================================================================
class TaskProfile(OBJ):
    '''
    Task Profile
    -
    Describes one of the K tasks the student can be trained on.

    Fields
    -
    - id : `int` << readonly >>
    - name : `str` << readonly >>
    - data_weight : `float` << readonly >>
    - warmup_eligible : `bool` << readonly >>

    Methods
    -
    - TaskProfile(id, name, data_weight, warmup_eligible) << constructor >>
    - Duplicate() : `TaskProfile` << override >>
    - FromDict(data, id) : `TaskProfile` << class >>
    - GetData(lvl : `VerbosityLevel`) : `List<str>` << override >>
    - ToDict() : `dict`
    '''

    # =======================
    # Method - Equality Check
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TaskProfile): return False
        return (
            (self._id == other._id)
            and (self._name == other._name)
            and (self._data_weight == other._data_weight)
            and (self._warmup_eligible == other._warmup_eligible)
        )

    # ====================
    # Method - Constructor
    def __init__(
            self,
            id: int,
            name: str,
            data_weight: float,
            warmup_eligible: bool = False
    ) -> None:
        '''
        Task Profile Constructor
        -
        Creates a new `TaskProfile` object.

        Parameters
        -
        - id : `int`
            - Index of the task.
        - name : `str`
            - Label of the task (e.g. `Az`).
        - data_weight : `float`
            - Fraction of the training data that belongs to the task, in
                `(0, 1]`.
        - warmup_eligible : `bool`
            - Whether the task may be drawn during the warm-up (high-resource
                tasks). Defaults to `False`.

        Returns
        -
        None
        '''

        if not isinstance(id, int) or id < 0:
            raise ValueError(f'Task ID (`id`) must be an int >= 0, got {id!r}')
        if not isinstance(name, str) or not name:
            raise ValueError(f'Task Name (`name`) must be a non-empty str')
        if not (0.0 < float(data_weight) <= 1.0):
            raise ValueError(
                f'Task Data Weight (`data_weight`) of `{name}` must be in ' \
                + f'(0, 1], got {data_weight!r}'
            )

        self._id: int = id
        ''' Index of the task. '''
        self._name: str = name
        ''' Label of the task. '''
        self._data_weight: float = float(data_weight)
        ''' Fraction of the training data that belongs to the task. '''
        self._warmup_eligible: bool = bool(warmup_eligible)
        ''' Whether the task may be drawn during the warm-up. '''

    # =============
    # Property - ID
    @property
    def id(self) -> int:
        ''' Index of the task. '''
        return self._id

    # ===============
    # Property - Name
    @property
    def name(self) -> str:
        ''' Label of the task. '''
        return self._name

    # ======================
    # Property - Data Weight
    @property
    def data_weight(self) -> float:
        ''' Fraction of the training data that belongs to the task. '''
        return self._data_weight

    # ==========================
    # Property - Warm-up Eligible
    @property
    def warmup_eligible(self) -> bool:
        ''' Whether the task may be drawn during the warm-up. '''
        return self._warmup_eligible

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'TaskProfile':
        return TaskProfile(
            self._id,
            self._name,
            self._data_weight,
            self._warmup_eligible
        )

    # ===============================
    # Method - Create from Dictionary
    @classmethod
    def FromDict(cls, data: object, id: int) -> 'TaskProfile':
        '''
        Create from Dictionary
        -
        Creates a task profile from a dictionary read from a file.

        Parameters
        -
        - data : `object`
            - Value read from the file, expected to be a `dict` with the keys
                `name`, `data_weight` and (optionally) `warmup_eligible`.
        - id : `int`
            - Index of the task (its position in the task list).

        Returns
        -
        - `TaskProfile`
            - The task profile.
        '''

        if not isinstance(data, dict):
            raise TypeError(
                f'Task #{id} expected a `dict` type, got `{type(data)}`'
            )
        for key in ('name', 'data_weight'):
            if data.get(key, None) is None:
                raise ValueError(f'Failed to read Task #{id} (`{key}`)')
        weight = data['data_weight']
        if isinstance(weight, bool) or not isinstance(weight, (int, float)):
            raise TypeError(
                f'Task #{id} Data Weight (`data_weight`) expected a number, ' \
                + f'got `{type(weight)}`'
            )
        eligible = data.get('warmup_eligible', False)
        if not isinstance(eligible, bool):
            raise TypeError(
                f'Task #{id} Warm-up Eligible (`warmup_eligible`) expected ' \
                + f'a `bool` type, got `{type(eligible)}`'
            )
        return cls(id, str(data['name']), float(weight), eligible)

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['id', 'name']
        elif lvl == VerbosityLevel.LONG:
            return ['id', 'name', 'data_weight', 'warmup_eligible']
        else:
            return ['_id', '_name', '_data_weight', '_warmup_eligible']

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self) -> Dict[str, Any]:
        return {
            'name': self._name,
            'data_weight': self._data_weight,
            'warmup_eligible': self._warmup_eligible,
        }


# =============================================================================
# Validate Task Profiles
# =============================================================================
def validate_profiles(profiles: Sequence[TaskProfile]) -> None:
    '''
    Validate Task Profiles
    -
    Checks that a task set is usable: non-empty, ids `0..K-1` in order, data
    weights summing to 1 and at least one warm-up eligible task.

    Parameters
    -
    - profiles : `Sequence<TaskProfile>`
        - The task set.

    Returns
    -
    None
    '''

    if len(profiles) == 0:
        raise ConfigError('The task set is empty')
    for i, profile in enumerate(profiles):
        if profile.id != i:
            raise ConfigError(
                f'Task `{profile.name}` has id {profile.id}, expected {i}'
            )
    total = sum(p.data_weight for p in profiles)
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        raise ConfigError(
            f'Task data weights must sum to 1 (within {WEIGHT_TOLERANCE}), ' \
            + f'got {total!r}'
        )
    if not any(p.warmup_eligible for p in profiles):
        raise ConfigError('At least one task must be warm-up eligible')


# =============================================================================
# Warm-up Pool Tasks
# =============================================================================
def warmup_pool_tasks(
        profiles: Sequence[TaskProfile],
        pool: WarmupPool
) -> List[TaskId]:
    ''' Tasks that may be drawn during the warm-up, in index order. '''
    if pool == WarmupPool.ALL:
        return [p.id for p in profiles]
    return [p.id for p in profiles if p.warmup_eligible]


# =============================================================================
# Score
# =============================================================================
class Score(OBJ):
    '''
    Score
    -
    Negative cross-entropy of the student on evaluation data (higher is
    better). Always finite.

    Fields
    -
    - value : `float` << readonly >>
    '''

    # =======================
    # Method - Equality Check
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Score): return False
        return self._value == other._value

    # ====================
    # Method - Constructor
    def __init__(self, value: float) -> None:
        value = float(value)
        if not np.isfinite(value):
            raise NonFiniteError(f'Score must be finite, got {value!r}')
        self._value: float = value
        ''' Score value. '''

    # ================
    # Property - Value
    @property
    def value(self) -> float:
        ''' Score value. '''
        return self._value

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'Score':
        return Score(self._value)

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        return ['value']


# =============================================================================
# Compute Reward
# =============================================================================
def compute_reward(x_curr: Score, x_prev: Score) -> float:
    ''' `X_t - X_{t-1}`: positive when the loss decreased. '''
    return x_curr.value - x_prev.value


# =============================================================================
# Step Record
# =============================================================================
class StepRecord(OBJ):
    '''
    Step Record
    -
    One row of the experiment log: the task trained at a step, and (on
    decision steps) the reward and score the scheduler observed.

    Fields
    -
    - step : `int`
    - action : `int`
    - reward : `float | None`
    - score : `float | None`
    - epsilon : `float | None`
    - decision_source : `DecisionSource`
    '''

    # =======================
    # Method - Equality Check
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StepRecord): return False
        return self.ToRow() == other.ToRow()

    # ====================
    # Method - Constructor
    def __init__(
            self,
            step: int,
            action: TaskId,
            decision_source: DecisionSource,
            reward: Optional[float] = None,
            score: Optional[float] = None,
            epsilon: Optional[float] = None
    ) -> None:
        if (reward is None) != (score is None):
            raise ValueError(
                f'Step {step}: reward and score must be present together'
            )
        if epsilon is not None and not (0.0 <= epsilon <= 1.0):
            raise ValueError(f'Step {step}: epsilon {epsilon!r} not in [0, 1]')
        self.step = int(step)
        ''' Training step (1-based). '''
        self.action = int(action)
        ''' Task trained at this step. '''
        self.decision_source = decision_source
        ''' How the action was chosen. '''
        self.reward = None if reward is None else float(reward)
        ''' Reward observed at this step (decision steps only). '''
        self.score = None if score is None else float(score)
        ''' Score the reward was computed from (decision steps only). '''
        self.epsilon = None if epsilon is None else float(epsilon)
        ''' Exploration rate of the decision that chose the action. '''

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'StepRecord':
        return StepRecord(
            self.step,
            self.action,
            self.decision_source,
            self.reward,
            self.score,
            self.epsilon
        )

    # ===============================
    # Method - Create from Dictionary
    @classmethod
    def FromDict(cls, data: Dict[str, Any]) -> 'StepRecord':
        ''' Reads a record written by `ToDict`. '''
        return cls(
            step = int(data['step']),
            action = int(data['action']),
            decision_source = DecisionSource(data['decision_source']),
            reward = data.get('reward', None),
            score = data.get('score', None),
            epsilon = data.get('epsilon', None)
        )

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['step', 'action']
        return [
            'step', 'action', 'reward', 'score', 'epsilon', 'decision_source'
        ]

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self) -> Dict[str, Any]:
        return dict(zip(CSV_COLUMNS, self.ToRow()))

    # ======================
    # Method - Convert to Row
    def ToRow(self) -> List[Any]:
        ''' Values in `CSV_COLUMNS` order (missing values are `None`). '''
        return [
            self.step,
            self.action,
            self.reward,
            self.score,
            self.epsilon,
            self.decision_source.value,
        ]


# =============================================================================
# Experiment Log
# =============================================================================
class ExperimentLog(OBJ):
    '''
    Experiment Log
    -
    Structured record of one run: one `StepRecord` per training step, the
    periodic evaluation trace, recorded state vectors and scheduler table
    snapshots.

    Fields
    -
    - config_snapshot : `dict`
    - evaluations : `List<Tuple<int, List<float>>>`
    - records : `List<StepRecord>`
    - seed : `int`
    - states : `Dict<int, List<float>>`
    - table_snapshots : `List<dict>`
    - task_names : `List<str>`

    Methods
    -
    - Append(record)
    - Duplicate() : `ExperimentLog` << override >>
    - FromJson(file_name) : `ExperimentLog` << class >>
    - GetData(lvl : `VerbosityLevel`) : `List<str>` << override >>
    - RewardCount() : `int`
    - ToCsv() : `str`
    - ToEvalCsv() : `str`
    - ToJson() : `str`
    - Write(prefix)
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            seed: int,
            task_names: Sequence[str],
            config_snapshot: Optional[Dict[str, Any]] = None
    ) -> None:
        self.seed = int(seed)
        ''' Seed of the run's random generator. '''
        self.task_names: List[str] = list(task_names)
        ''' Task labels, in index order. '''
        self.config_snapshot: Dict[str, Any] = dict(config_snapshot or {})
        ''' Full serialized configuration of the run. '''
        self.records: List[StepRecord] = []
        ''' One record per training step, strictly increasing in step. '''
        self.evaluations: List[Tuple[int, List[float]]] = []
        ''' `(step, per-task noise-free scores)` every evaluation cadence. '''
        self.states: Dict[int, List[float]] = {}
        ''' State vectors observed at decision steps, by step. '''
        self.table_snapshots: List[Dict[str, Any]] = []
        ''' Periodic snapshots of the scheduler's value table. '''

    # ==================
    # Method - Add Record
    def Append(self, record: StepRecord) -> None:
        ''' Adds a record, keeping the steps strictly increasing. '''
        if self.records and record.step <= self.records[-1].step:
            raise ValueError(
                f'Record step {record.step} does not follow step ' \
                + f'{self.records[-1].step}'
            )
        self.records.append(record)

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'ExperimentLog':
        log = ExperimentLog(
            self.seed,
            self.task_names,
            json.loads(json.dumps(self.config_snapshot))
        )
        log.records = [r.Duplicate() for r in self.records]
        log.evaluations = [(s, list(v)) for s, v in self.evaluations]
        log.states = {s: list(v) for s, v in self.states.items()}
        log.table_snapshots = json.loads(json.dumps(self.table_snapshots))
        return log

    # ==========================
    # Method - Read from JSON Log
    @classmethod
    def FromJson(cls, file_name: Union[str, Path]) -> 'ExperimentLog':
        '''
        Read from JSON Log
        -
        Reads a log written by `Write` (the `.json` document).

        Parameters
        -
        - file_name : `str | Path`
            - Name + Directory of the JSON log.

        Returns
        -
        - `ExperimentLog`
            - The log.
        '''

        try:
            with open(file_name, 'r', encoding = 'utf-8') as file:
                data = json.load(file)
            if data.get('format_version', None) != LOG_FORMAT_VERSION:
                raise ValueError(
                    f'format_version {data.get("format_version")!r} is not ' \
                    + f'{LOG_FORMAT_VERSION}'
                )
            log = cls(
                seed = data['seed'],
                task_names = data['task_names'],
                config_snapshot = data['config_snapshot']
            )
            for record in data['records']:
                log.Append(StepRecord.FromDict(record))
            log.evaluations = [
                (int(e['step']), [float(x) for x in e['scores']])
                for e in data.get('evaluations', [])
            ]
            log.states = {
                int(step): [float(x) for x in values]
                for step, values in data.get('states', {}).items()
            }
            log.table_snapshots = list(data.get('table_snapshots', []))
        except (OSError, KeyError, TypeError, ValueError) as e:
            raise ReadError(f'`{file_name}` is not a valid experiment log: {e}')
        return log

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['seed', 'task_names']
        elif lvl == VerbosityLevel.LONG:
            return ['seed', 'task_names', 'records', 'evaluations']
        else:
            return [
                'seed', 'task_names', 'config_snapshot', 'records',
                'evaluations', 'states', 'table_snapshots'
            ]

    # =====================
    # Method - Reward Count
    def RewardCount(self) -> int:
        ''' Number of records that carry a reward observation. '''
        return sum(1 for r in self.records if r.reward is not None)

    # ===================
    # Method - CSV Output
    def ToCsv(self) -> str:
        ''' Per-step CSV (missing values are empty fields). '''
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator = '\n')
        writer.writerow(CSV_COLUMNS)
        for record in self.records:
            writer.writerow(record.ToRow())
        return buffer.getvalue()

    # ==============================
    # Method - Evaluation CSV Output
    def ToEvalCsv(self) -> str:
        ''' Evaluation trace CSV: `step` then one column per task. '''
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator = '\n')
        writer.writerow(['step'] + self.task_names)
        for step, scores in self.evaluations:
            writer.writerow([step] + list(scores))
        return buffer.getvalue()

    # ====================
    # Method - JSON Output
    def ToJson(self) -> str:
        ''' JSON document embedding the configuration snapshot. '''
        return json.dumps(
            {
                'format_version': LOG_FORMAT_VERSION,
                'seed': self.seed,
                'task_names': self.task_names,
                'config_snapshot': self.config_snapshot,
                'records': [r.ToDict() for r in self.records],
                'evaluations': [
                    {'step': step, 'scores': scores}
                    for step, scores in self.evaluations
                ],
                'states': {
                    str(step): values
                    for step, values in sorted(self.states.items())
                },
                'table_snapshots': self.table_snapshots,
            },
            indent = 1
        ) + '\n'

    # =====================
    # Method - Write to Disk
    def Write(self, prefix: Union[str, Path]) -> List[Path]:
        '''
        Write to Disk
        -
        Atomically writes `<prefix>.csv`, `<prefix>.json` and
        `<prefix>_eval.csv`.

        Parameters
        -
        - prefix : `str | Path`
            - Directory + file name without extension.

        Returns
        -
        - `List<Path>`
            - The files written.
        '''

        prefix = Path(prefix)
        outputs = [
            (prefix.with_name(prefix.name + '.csv'), self.ToCsv()),
            (prefix.with_name(prefix.name + '.json'), self.ToJson()),
            (prefix.with_name(prefix.name + '_eval.csv'), self.ToEvalCsv()),
        ]
        for path, text in outputs:
            write_atomic(path, text)
        return [path for path, _ in outputs]


# =============================================================================
# Scheduler Configuration
# =============================================================================
class SchedulerConfig(OBJ):
    '''
    Scheduler Configuration
    -
    Run-level settings shared by every scheduler.

    Fields
    -
    - total_steps : `int`
    - action_interval : `int`
    - warmup_steps : `int`
    - epsilon : `float | None` (fixed epsilon, `None` when scheduled)
    - seed : `int`
    - eval_every : `int` (`0` disables the evaluation trace)
    - eval_target : `EvalTarget`
    - warmup_pool : `WarmupPool`
    - record_states : `bool`
    - table_snapshot_every : `int`
    - checkpoint_every : `int`
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            total_steps: int,
            action_interval: int = 10,
            warmup_steps: int = 0,
            seed: int = 0,
            epsilon: Optional[float] = None,
            eval_every: int = 0,
            eval_target: EvalTarget = EvalTarget.CURRENT,
            warmup_pool: WarmupPool = WarmupPool.ELIGIBLE,
            record_states: bool = False,
            table_snapshot_every: int = 0,
            checkpoint_every: int = 0
    ) -> None:
        self.total_steps = total_steps
        ''' Number of training steps. '''
        self.action_interval = action_interval
        ''' Steps between scheduler decisions (`n`). '''
        self.warmup_steps = warmup_steps
        ''' Length of the warm-up (`w`). '''
        self.seed = seed
        ''' Seed of the run's random generator. '''
        self.epsilon = epsilon
        ''' Fixed exploration rate, `None` when the scheduler decays it. '''
        self.eval_every = eval_every
        ''' Steps between entries of the evaluation trace. '''
        self.eval_target = eval_target
        ''' Data the reward score is computed on. '''
        self.warmup_pool = warmup_pool
        ''' Tasks drawn during the warm-up. '''
        self.record_states = record_states
        ''' Whether observed state vectors are stored in the log. '''
        self.table_snapshot_every = table_snapshot_every
        ''' Steps between value-table snapshots (`0` disables). '''
        self.checkpoint_every = checkpoint_every
        ''' Steps between agent checkpoints (`0` disables). '''
        self.Validate()

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'SchedulerConfig':
        return SchedulerConfig(**self.ToDict(raw = True))

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['total_steps', 'action_interval', 'warmup_steps', 'seed']
        return list(self.ToDict().keys())

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self, raw: bool = False) -> Dict[str, Any]:
        ''' Settings by name (enums as values unless `raw`). '''
        return {
            'total_steps': self.total_steps,
            'action_interval': self.action_interval,
            'warmup_steps': self.warmup_steps,
            'seed': self.seed,
            'epsilon': self.epsilon,
            'eval_every': self.eval_every,
            'eval_target': \
                self.eval_target if raw else self.eval_target.value,
            'warmup_pool': \
                self.warmup_pool if raw else self.warmup_pool.value,
            'record_states': self.record_states,
            'table_snapshot_every': self.table_snapshot_every,
            'checkpoint_every': self.checkpoint_every,
        }

    # =================
    # Method - Validate
    def Validate(self) -> None:
        ''' Raises `ConfigError` when a setting is out of range. '''
        for key in (
                'total_steps', 'warmup_steps', 'seed', 'eval_every',
                'table_snapshot_every', 'checkpoint_every'
        ):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int) \
                    or value < 0:
                raise ConfigError(f'`{key}` must be an int >= 0, got {value!r}')
        if isinstance(self.action_interval, bool) \
                or not isinstance(self.action_interval, int) \
                or self.action_interval < 1:
            raise ConfigError(
                f'`action_interval` must be an int >= 1, got ' \
                + f'{self.action_interval!r}'
            )
        if self.warmup_steps > self.total_steps:
            raise ConfigError(
                f'`warmup_steps` ({self.warmup_steps}) exceeds `total_steps` ' \
                + f'({self.total_steps})'
            )
        if self.eval_every and self.eval_every % self.action_interval:
            raise ConfigError(
                f'`action_interval` ({self.action_interval}) must divide ' \
                + f'`eval_every` ({self.eval_every})'
            )
        if self.epsilon is not None and not (0.0 <= self.epsilon <= 1.0):
            raise ConfigError(f'`epsilon` must be in [0, 1], got {self.epsilon}')
        if not isinstance(self.eval_target, EvalTarget):
            raise ConfigError(f'Invalid `eval_target` {self.eval_target!r}')
        if not isinstance(self.warmup_pool, WarmupPool):
            raise ConfigError(f'Invalid `warmup_pool` {self.warmup_pool!r}')


# =============================================================================
# Evaluator
# =============================================================================
class Evaluator(object):
    '''
    Evaluator
    -
    Read-only view of the student handed to schedulers at decision points.
    Scores come from the configured evaluation target; non-finite values
    abort the run.
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            env: 'StudentEnvironment',
            target: EvalTarget = EvalTarget.CURRENT
    ) -> None:
        self.env = env
        ''' Student being evaluated. '''
        self.target = target
        ''' Data the score is computed on. '''
        self.step: int = 0
        ''' Current training step (set by the run loop). '''
        self._state_cache: Optional[Tuple[int, StateVector]] = None
        ''' Last observed state and the step it was observed at. '''

    # ==============
    # Method - Score
    def Score(self, task: TaskId) -> Score:
        '''
        Score
        -
        Scores the student on the task's development data (or on the mixed
        sample when the target is `mixed`).

        Parameters
        -
        - task : `int`
            - Task the score refers to (the task that was trained).

        Returns
        -
        - `Score`
            - The score.
        '''

        if self.target == EvalTarget.MIXED:
            value = self.env.EvalMixed()
        else:
            value = self.env.EvalScore(task)
        try:
            return Score(value)
        except NonFiniteError:
            raise RunAbortError(
                f'Student returned a non-finite score ({value!r}) at step ' \
                + f'{self.step} for task {self.env.task_names[task]} ' \
                + f'(#{task})',
                step = self.step,
                task = task
            )

    # ==============
    # Method - State
    def State(self) -> StateVector:
        ''' The student's state vector at the current step. '''
        if self._state_cache is not None \
                and self._state_cache[0] == self.step:
            return self._state_cache[1]
        state = np.asarray(self.env.ObserveState(), dtype = np.float64)
        if state.shape != (self.env.state_dim,):
            raise DimensionError(
                f'State has shape {state.shape}, expected ' \
                + f'({self.env.state_dim},)'
            )
        if not np.all(np.isfinite(state)):
            raise RunAbortError(
                f'Student returned a non-finite state vector at step ' \
                + f'{self.step}',
                step = self.step,
                task = -1
            )
        self._state_cache = (self.step, state)
        return state

    # ==================
    # Method - Has State
    def Observed(self) -> bool:
        ''' Whether the state was observed at the current step. '''
        return self._state_cache is not None \
            and self._state_cache[0] == self.step


# =============================================================================
# Decision
# =============================================================================
class Decision(OBJ):
    '''
    Decision
    -
    Outcome of a scheduler decision point: the next action and how it was
    chosen, plus the reward and score observed (if any).
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            action: TaskId,
            source: DecisionSource,
            epsilon: Optional[float] = None,
            reward: Optional[float] = None,
            score: Optional[float] = None
    ) -> None:
        self.action = int(action)
        ''' Task to train on until the next decision. '''
        self.source = source
        ''' How the action was chosen. '''
        self.epsilon = epsilon
        ''' Exploration rate in force. '''
        self.reward = reward
        ''' Reward observed at this decision point. '''
        self.score = score
        ''' Score the reward was computed from. '''

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'Decision':
        return Decision(
            self.action, self.source, self.epsilon, self.reward, self.score
        )

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['action', 'source']
        return ['action', 'source', 'epsilon', 'reward', 'score']


# =============================================================================
# Consecutive Reward Tracker
# =============================================================================
class ConsecutiveReward(object):
    '''
    Consecutive Reward Tracker
    -
    Computes `X_t - X_{t-1}` between consecutive decision points, where both
    scores are measured on the same evaluation target. With the `current`
    target that target is the task trained during the interval, so its
    previous score is taken when the task is chosen.
    '''

    # ====================
    # Method - Constructor
    def __init__(self) -> None:
        self.previous: Optional[Score] = None
        ''' Score on the target of the running interval, at its start. '''

    # ==============
    # Method - Prime
    def Prime(self, evaluator: Evaluator, action: TaskId) -> None:
        ''' Records the starting score of the interval training `action`. '''
        self.previous = evaluator.Score(action)

    # ================
    # Method - Observe
    def Observe(
            self,
            evaluator: Evaluator,
            action: TaskId
    ) -> Tuple[float, Score]:
        '''
        Observe
        -
        Scores the interval that trained `action`.

        Parameters
        -
        - evaluator : `Evaluator`
            - View of the student.
        - action : `int`
            - Task trained during the interval.

        Returns
        -
        - `Tuple<float, Score>`
            - The reward and the score at the end of the interval.
        '''

        current = evaluator.Score(action)
        previous = self.previous if self.previous is not None else current
        return compute_reward(current, previous), current

    # ===============
    # Method - Advance
    def Advance(
            self,
            evaluator: Evaluator,
            current: Score,
            next_action: TaskId
    ) -> None:
        ''' Starts the next interval, re-scoring only when the target moved. '''
        if evaluator.target == EvalTarget.MIXED:
            self.previous = current
        else:
            self.previous = evaluator.Score(next_action)


# =============================================================================
# Scheduler Contract
# =============================================================================
class Scheduler(OBJ):
    '''
    Scheduler Contract
    -
    Parent of every scheduler. The run loop calls `Begin` once before step 1
    and `Decide` at every multiple of the action interval.

    Fields
    -
    - profiles : `List<TaskProfile>`
    - warmup_steps : `int`
    - action_interval : `int`
    - state_dim : `int | None` (`None` when no state is used)
    - fixed_epsilon : `float | None`

    Methods
    -
    - Begin(evaluator, rng) : `Decision` << abstract >>
    - ConfigDict() : `dict` << abstract >>
    - Decide(step, evaluator, rng) : `Decision` << abstract >>
    - Snapshot() : `dict | None`
    '''

    kind: str = ''
    ''' Name of the scheduler (a `SchedulerKind` value). '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            profiles: Sequence[TaskProfile],
            warmup_steps: int,
            action_interval: int,
            state_dim: Optional[int] = None
    ) -> None:
        validate_profiles(profiles)
        if warmup_steps < 0:
            raise ConfigError(f'`warmup_steps` must be >= 0, got {warmup_steps}')
        if action_interval < 1:
            raise ConfigError(
                f'`action_interval` must be >= 1, got {action_interval}'
            )
        self.profiles: List[TaskProfile] = list(profiles)
        ''' Task set the scheduler chooses from. '''
        self.warmup_steps = warmup_steps
        ''' Length of the warm-up. '''
        self.action_interval = action_interval
        ''' Steps between decisions. '''
        self.state_dim = state_dim
        ''' Size of the state vectors the scheduler reads. '''
        self.fixed_epsilon: Optional[float] = None
        ''' Constant exploration rate, when the scheduler has one. '''

    # =======================
    # Property - Task Count
    @property
    def num_tasks(self) -> int:
        ''' Number of tasks (K). '''
        return len(self.profiles)

    # ==============
    # Method - Begin
    def Begin(self, evaluator: Evaluator, rng: np.random.Generator) -> Decision:
        ''' Chooses the action for the first interval. '''
        raise AbstractError(
            f'Scheduler().Begin() has not been defined in {self.__class__}'
        )

    # =============================
    # Method - Configuration Dict
    def ConfigDict(self) -> Dict[str, Any]:
        ''' Scheduler settings for the log's configuration snapshot. '''
        raise AbstractError(
            f'Scheduler().ConfigDict() has not been defined in ' \
            + f'{self.__class__}'
        )

    # ===============
    # Method - Decide
    def Decide(
            self,
            step: int,
            evaluator: Evaluator,
            rng: np.random.Generator
    ) -> Decision:
        ''' Observes the student and chooses the next action. '''
        raise AbstractError(
            f'Scheduler().Decide() has not been defined in {self.__class__}'
        )

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'Scheduler':
        import copy
        return copy.deepcopy(self)

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['kind', 'num_tasks']
        return ['kind', 'num_tasks', 'warmup_steps', 'action_interval']

    # =================
    # Method - Snapshot
    def Snapshot(self) -> Optional[Dict[str, Any]]:
        ''' Serializable view of the scheduler's value table, if any. '''
        return None


# =============================================================================
# Run Experiment
# =============================================================================
def run_experiment(
        config: SchedulerConfig,
        env: 'StudentEnvironment',
        scheduler: Scheduler,
        config_snapshot: Optional[Dict[str, Any]] = None,
        on_checkpoint: Optional[Callable[[int, Scheduler], None]] = None
) -> ExperimentLog:
    '''
    Run Experiment
    -
    Trains the student for `config.total_steps` steps under the scheduler's
    curriculum and logs every step.

    Parameters
    -
    - config : `SchedulerConfig`
        - Run-level settings.
    - env : `StudentEnvironment`
        - The student. Reset with `config.seed` before the first step.
    - scheduler : `Scheduler`
        - A freshly built scheduler for the same task set.
    - config_snapshot : `dict | None`
        - Configuration stored in the log. Defaults to the run, scheduler and
            environment settings.
    - on_checkpoint : `Callable | None`
        - Called as `on_checkpoint(step, scheduler)` every
            `config.checkpoint_every` steps.

    Returns
    -
    - `ExperimentLog`
        - One `StepRecord` per step.
    '''

    # validate that the scheduler and the student agree
    if env.num_tasks != scheduler.num_tasks:
        raise ConfigError(
            f'Environment has {env.num_tasks} tasks but the scheduler has ' \
            + f'{scheduler.num_tasks}'
        )
    if scheduler.state_dim is not None \
            and scheduler.state_dim != env.state_dim:
        raise ConfigError(
            f'Scheduler expects states of size {scheduler.state_dim}, the ' \
            + f'environment produces {env.state_dim}'
        )
    if scheduler.warmup_steps != config.warmup_steps \
            or scheduler.action_interval != config.action_interval:
        raise ConfigError(
            f'Scheduler (w={scheduler.warmup_steps}, ' \
            + f'n={scheduler.action_interval}) does not match the run ' \
            + f'configuration (w={config.warmup_steps}, ' \
            + f'n={config.action_interval})'
        )
    if config.epsilon is not None and scheduler.fixed_epsilon is not None \
            and config.epsilon != scheduler.fixed_epsilon:
        raise ConfigError(
            f'Run epsilon {config.epsilon} does not match the scheduler ' \
            + f'epsilon {scheduler.fixed_epsilon}'
        )

    # build the log
    if config_snapshot is None:
        config_snapshot = {
            'run': config.ToDict(),
            'scheduler': scheduler.ConfigDict(),
            'environment': env.ConfigDict(),
        }
    log = ExperimentLog(config.seed, env.task_names, config_snapshot)

    # nothing to train
    if config.total_steps == 0:
        logger.info(f'{scheduler.kind} seed {config.seed}: 0 steps, empty log')
        return log

    # one generator for the whole run
    rng = np.random.default_rng(config.seed)
    env.Reset(config.seed)
    evaluator = Evaluator(env, config.eval_target)
    logger.info(
        f'Starting {scheduler.kind} run: seed {config.seed}, ' \
        + f'{config.total_steps} steps, n={config.action_interval}, ' \
        + f'w={config.warmup_steps}'
    )

    # initial decision (step 0)
    decision = scheduler.Begin(evaluator, rng)
    if config.record_states or evaluator.Observed():
        log.states[0] = evaluator.State().tolist()

    # training loop
    for t in range(1, config.total_steps + 1):
        action = decision.action
        source = decision.source
        epsilon = decision.epsilon
        env.TrainOn(action, rng)
        evaluator.step = t

        if t % config.action_interval == 0:
            decision = scheduler.Decide(t, evaluator, rng)
            record = StepRecord(
                t,
                action,
                source,
                reward = decision.reward,
                score = decision.score,
                epsilon = epsilon
            )
            logger.debug(
                f'step {t}: trained {action}, reward {decision.reward}, ' \
                + f'next {decision.action} ({decision.source.value})'
            )
            # a scheduler that reads states always leaves them in the log
            if config.record_states or evaluator.Observed():
                log.states[t] = evaluator.State().tolist()
        else:
            record = StepRecord(t, action, source, epsilon = epsilon)
        log.Append(record)

        if config.eval_every and t % config.eval_every == 0:
            log.evaluations.append((t, env.EvaluateAll().tolist()))
        if config.table_snapshot_every \
                and t % config.table_snapshot_every == 0:
            snapshot = scheduler.Snapshot()
            if snapshot is not None:
                log.table_snapshots.append({'step': t, **snapshot})
        if on_checkpoint is not None and config.checkpoint_every \
                and t % config.checkpoint_every == 0:
            on_checkpoint(t, scheduler)

    logger.info(
        f'Finished {scheduler.kind} run: seed {config.seed}, ' \
        + f'{len(log.records)} steps, {log.RewardCount()} rewards'
    )
    return log


# =============================================================================
# End of File
# =============================================================================
