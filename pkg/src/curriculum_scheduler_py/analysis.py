# =============================================================================
# RL Curriculum Scheduler - Analysis
# =============================================================================
'''
RL Curriculum Scheduler - Analysis
-
Read-only analyses of finished runs:

- `action_proportions` - share of training steps per task, per window and
    over the whole run.
- `probe_q_network` / `probe_matrix` - how a trained DQN agent responds when
    one task's losses are amplified in an observed state.
- `steps_to_best` - step at which a rolling mean of the small-data tasks'
    macro-average score peaks.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# core objects
from .core import (
    ExperimentLog, # run logs
    StateVector, # state vectors
    TaskId, # task index
)

# DQN checkpoints
from .dqn import AgentCheckpoint

# custom errors
from .errors import DimensionError

# generic objects
from .generic_objects import (
    OBJ, # base object model
    VerbosityLevel, # verbosity levels
)

# network evaluation
from .neural import (
    forward, # forward pass
    softmax, # probabilities
)

# used for the CSV tables
import csv
import io

# used for diagnostic logging
import logging

# used for all of the arithmetic
import numpy as np

# used for type hinting
from typing import (
    Any, # any type
    Dict, # dictionary data type
    List, # list data type
    Optional, # nullable data type
    Sequence, # read-only sequences
    Tuple, # tuple data type
)


# =============================================================================
# Logging + Constants
# =============================================================================
logger = logging.getLogger(__name__)

TIE_TOLERANCE: float = 1e-12
''' Window means closer than this count as tied. '''


# =============================================================================
# Proportion Window
# =============================================================================
class ProportionWindow(OBJ):
    '''
    Proportion Window
    -
    Task counts over the steps `window_start + 1 .. window_start + width`
    (the last window of a run may be shorter).

    Fields
    -
    - window_start : `int`
    - counts : `ndarray` (steps per task)
    - fractions : `ndarray` (counts normalized, summing to 1)
    '''

    # ====================
    # Method - Constructor
    def __init__(self, window_start: int, counts: Sequence[int]) -> None:
        self.window_start = int(window_start)
        ''' Step before the first step of the window. '''
        self.counts: np.ndarray = np.asarray(counts, dtype = np.int64)
        ''' Steps trained on each task. '''
        total = int(self.counts.sum())
        if total <= 0:
            raise ValueError(f'Window {window_start} holds no steps')
        self.fractions: np.ndarray = self.counts / total
        ''' Share of the window's steps per task. '''

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'ProportionWindow':
        return ProportionWindow(self.window_start, self.counts.copy())

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['window_start', 'fractions']
        return ['window_start', 'counts', 'fractions']


# =============================================================================
# Action Proportions
# =============================================================================
def action_proportions(
        log: ExperimentLog,
        window: int = 1000
) -> Tuple[List[ProportionWindow], np.ndarray]:
    '''
    Action Proportions
    -
    Splits the run into fixed-width windows of steps and counts the task
    trained at each step.

    Parameters
    -
    - log : `ExperimentLog`
        - A non-empty run log.
    - window : `int`
        - Steps per window.

    Returns
    -
    - `Tuple<List<ProportionWindow>, ndarray>`
        - The windows, and the whole-run fraction per task (the window
            counts summed, then normalized).
    '''

    if window <= 0:
        raise ValueError(f'`window` must be > 0, got {window}')
    if not log.records:
        raise ValueError('Cannot compute proportions of an empty log')

    num_tasks = len(log.task_names)
    counts: Dict[int, np.ndarray] = {}
    for record in log.records:
        start = ((record.step - 1) // window) * window
        if start not in counts:
            counts[start] = np.zeros(num_tasks, dtype = np.int64)
        counts[start][record.action] += 1

    windows = [ProportionWindow(s, counts[s]) for s in sorted(counts)]
    totals = np.sum([w.counts for w in windows], axis = 0)
    return windows, totals / totals.sum()


# =============================================================================
# Proportions CSV
# =============================================================================
def proportions_csv(
        windows: Sequence[ProportionWindow],
        task_names: Sequence[str]
) -> str:
    ''' CSV with one row per window: `window_start` then a fraction per task. '''
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator = '\n')
    writer.writerow(['window_start'] + list(task_names))
    for w in windows:
        writer.writerow([w.window_start] + w.fractions.tolist())
    return buffer.getvalue()


# =============================================================================
# Probe Q Network
# =============================================================================
def probe_q_network(
        checkpoint: AgentCheckpoint,
        base_state: StateVector,
        task: TaskId,
        amplification: float = 5.0
) -> np.ndarray:
    '''
    Probe Q Network
    -
    Multiplies the task's block of the state by `amplification` and returns
    the softmax of the online network's outputs on the modified state.

    Parameters
    -
    - checkpoint : `AgentCheckpoint`
        - The trained agent.
    - base_state : `StateVector`
        - A state observed during a run.
    - task : `int`
        - Task whose block is amplified.
    - amplification : `float`
        - Multiplier of the block.

    Returns
    -
    - `ndarray`
        - K probabilities.
    '''

    state = np.array(base_state, dtype = np.float64)
    if state.shape != (checkpoint.state_dim,):
        raise DimensionError(
            f'State has shape {state.shape}, the checkpoint expects ' \
            + f'({checkpoint.state_dim},)'
        )
    num_tasks = checkpoint.num_tasks
    if checkpoint.state_dim % num_tasks:
        raise DimensionError(
            f'State size {checkpoint.state_dim} is not a multiple of the ' \
            + f'{num_tasks} tasks'
        )
    if not 0 <= task < num_tasks:
        raise ValueError(f'Invalid task {task} for {num_tasks} tasks')

    block = checkpoint.state_dim // num_tasks
    state[task * block:(task + 1) * block] *= amplification
    q, _ = forward(checkpoint.online, state)
    return softmax(q)


# =============================================================================
# Probe Matrix
# =============================================================================
class ProbeMatrix(OBJ):
    '''
    Probe Matrix
    -
    Row `i` holds the agent's action probabilities when task `i`'s losses
    are amplified.

    Fields
    -
    - values : `ndarray` (`K x K`)
    - task_names : `List<str>`
    - amplification : `float`
    - step : `int | None` (step of the base state)
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            values: np.ndarray,
            task_names: Sequence[str],
            amplification: float,
            step: Optional[int] = None
    ) -> None:
        self.values: np.ndarray = np.asarray(values, dtype = np.float64)
        ''' Probabilities, one row per amplified task. '''
        self.task_names: List[str] = list(task_names)
        ''' Task labels, in index order. '''
        self.amplification = float(amplification)
        ''' Multiplier of the amplified block. '''
        self.step = step
        ''' Step the base state was observed at. '''
        k = len(self.task_names)
        if self.values.shape != (k, k):
            raise DimensionError(
                f'Probe matrix has shape {self.values.shape}, expected ({k}, {k})'
            )

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'ProbeMatrix':
        return ProbeMatrix(
            self.values.copy(),
            self.task_names,
            self.amplification,
            self.step
        )

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['task_names', 'step']
        return ['task_names', 'step', 'amplification', 'values']

    # ===================
    # Method - CSV Output
    def ToCsv(self) -> str:
        ''' One row per amplified task, one column per action. '''
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator = '\n')
        writer.writerow(['amplified'] + self.task_names)
        for name, row in zip(self.task_names, self.values.tolist()):
            writer.writerow([name] + row)
        return buffer.getvalue()

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self) -> Dict[str, Any]:
        return {
            'step': self.step,
            'amplification': self.amplification,
            'task_names': self.task_names,
            'matrix': self.values.tolist(),
        }


def probe_matrix(
        checkpoint: AgentCheckpoint,
        base_state: StateVector,
        task_names: Optional[Sequence[str]] = None,
        amplification: float = 5.0,
        step: Optional[int] = None
) -> ProbeMatrix:
    ''' Probes every task in turn. '''
    num_tasks = checkpoint.num_tasks
    names = list(task_names) if task_names is not None \
        else [str(k) for k in range(num_tasks)]
    rows = [
        probe_q_network(checkpoint, base_state, k, amplification)
        for k in range(num_tasks)
    ]
    return ProbeMatrix(np.stack(rows), names, amplification, step)


# =============================================================================
# Low-Resource Tasks
# =============================================================================
def low_resource_tasks(log: ExperimentLog) -> List[TaskId]:
    '''
    Low-Resource Tasks
    -
    Tasks that are not warm-up eligible, read from the environment section of
    the log's configuration snapshot. Every task when the snapshot does not
    describe the task set.

    Parameters
    -
    - log : `ExperimentLog`
        - The run log.

    Returns
    -
    - `List<int>`
        - Task ids, in index order.
    '''

    env = log.config_snapshot.get('environment', {}) or {}
    tasks = env.get('tasks', None)
    if tasks is None:
        tasks = (env.get('calibration', {}) or {}).get('tasks', None)
    if not isinstance(tasks, list) or len(tasks) != len(log.task_names):
        logger.debug('No task set in the log, using every task')
        return list(range(len(log.task_names)))
    low = [i for i, t in enumerate(tasks) if not t.get('warmup_eligible', False)]
    return low or list(range(len(log.task_names)))


# =============================================================================
# Macro Trace
# =============================================================================
def macro_trace(
        log: ExperimentLog,
        tasks: Optional[Sequence[TaskId]] = None
) -> List[Tuple[int, float]]:
    ''' `(step, mean score over tasks)` for each entry of the evaluation trace. '''
    tasks = list(tasks) if tasks is not None else low_resource_tasks(log)
    return [
        (step, float(np.mean([scores[k] for k in tasks])))
        for step, scores in log.evaluations
    ]


def final_macro_score(
        log: ExperimentLog,
        tasks: Optional[Sequence[TaskId]] = None
) -> float:
    ''' Last entry of the macro trace. '''
    trace = macro_trace(log, tasks)
    if not trace:
        raise ValueError('The log has no evaluation trace')
    return trace[-1][1]


# =============================================================================
# Steps to Best
# =============================================================================
def steps_to_best(
        trace: Sequence[Tuple[int, float]],
        ensemble_width: int = 4
) -> int:
    '''
    Steps to Best
    -
    Slides a window of `ensemble_width` consecutive trace entries and returns
    the step of the last entry of the window with the largest mean. Means
    within `TIE_TOLERANCE` of the best count as tied and the earliest window
    wins.

    Parameters
    -
    - trace : `Sequence<Tuple<int, float>>`
        - `(step, value)` pairs in step order.
    - ensemble_width : `int`
        - Entries averaged per window.

    Returns
    -
    - `int`
        - The step.
    '''

    if ensemble_width < 1:
        raise ValueError(f'`ensemble_width` must be >= 1, got {ensemble_width}')
    if len(trace) < ensemble_width:
        raise ValueError(
            f'The trace has {len(trace)} entries, fewer than the ensemble ' \
            + f'width {ensemble_width}'
        )
    values = np.array([v for _, v in trace], dtype = np.float64)
    means = np.array([
        float(np.mean(values[i:i + ensemble_width]))
        for i in range(len(values) - ensemble_width + 1)
    ])
    best = int(np.flatnonzero(means >= means.max() - TIE_TOLERANCE)[0])
    return int(trace[best + ensemble_width - 1][0])


def log_steps_to_best(log: ExperimentLog, ensemble_width: int = 4) -> int:
    ''' `steps_to_best` of the log's small-data macro trace. '''
    return steps_to_best(macro_trace(log), ensemble_width)


# =============================================================================
# End of File
# =============================================================================
