# =============================================================================
# RL Curriculum Scheduler - Teacher-Student Curriculum Learning
# =============================================================================
'''
RL Curriculum Scheduler - Teacher-Student Curriculum Learning
-
Contains the bandit scheduler that keeps an exponentially smoothed estimate
of each task's learning progress and trains on the task whose estimate has
the largest absolute value (epsilon-greedy).
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# core objects
from .core import (
    Decision, # outcome of a decision point
    Evaluator, # read-only view of the student
    Scheduler, # scheduler contract
    Score, # evaluation score
    TaskId, # task index
    TaskProfile, # task descriptions
    warmup_pool_tasks, # tasks drawn during warm-up
)

# custom errors
from .errors import (
    ConfigError, # invalid configuration
    ReadError, # invalid snapshots
)

# generic objects
from .generic_objects import (
    VerbosityLevel, # verbosity levels
    OBJ, # base object model
)

# supported options
from .supported_options import (
    DecisionSource, # how an action was chosen
    SchedulerKind, # scheduler names
    WarmupPool, # tasks drawn during warm-up
)

# used for the unvisited queue
from collections import deque

# used for diagnostic logging
import logging

# used for the value table and random draws
import numpy as np

# used for type hinting
from typing import (
    Any, # any type
    Deque, # double-ended queue
    Dict, # dictionary data type
    List, # list data type
    Optional, # nullable data type
    Sequence, # read-only sequences
    Tuple, # tuple data type
    Union, # multiple types
)


# =============================================================================
# Logging
# =============================================================================
logger = logging.getLogger(__name__)


# =============================================================================
# Return Table
# =============================================================================
class ReturnTable(OBJ):
    '''
    Return Table
    -
    Per-task expected returns, last observed scores and the queue of tasks
    that have not been visited yet. Every entry starts at 0.

    Fields
    -
    - q : `ndarray` (expected return per task)
    - h : `ndarray` (last observed score per task)
    - unvisited : `Deque<int>`
    - visits : `ndarray` (number of observations per task)
    '''

    # ====================
    # Method - Constructor
    def __init__(self, num_tasks: int) -> None:
        if num_tasks < 1:
            raise ConfigError('The TSCL action set is empty')
        self.q: np.ndarray = np.zeros(num_tasks)
        ''' Exponentially smoothed reward per task. '''
        self.h: np.ndarray = np.zeros(num_tasks)
        ''' Score observed the last time each task was trained. '''
        self.unvisited: Deque[TaskId] = deque()
        ''' Tasks still to be visited once, in order. '''
        self.visits: np.ndarray = np.zeros(num_tasks, dtype = np.int64)
        ''' Number of observations recorded per task. '''

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'ReturnTable':
        table = ReturnTable(len(self.q))
        table.q = self.q.copy()
        table.h = self.h.copy()
        table.unvisited = deque(self.unvisited)
        table.visits = self.visits.copy()
        return table

    # ===============================
    # Method - Create from Dictionary
    @classmethod
    def FromDict(cls, data: Dict[str, Any]) -> 'ReturnTable':
        ''' Reads a snapshot written by `ToDict`. '''
        try:
            table = cls(len(data['q']))
            table.q = np.array(data['q'], dtype = np.float64)
            table.h = np.array(data['h'], dtype = np.float64)
            table.unvisited = deque(int(a) for a in data['unvisited'])
            table.visits = np.array(data['visits'], dtype = np.int64)
        except (KeyError, TypeError, ValueError) as e:
            raise ReadError(f'Invalid return table snapshot: {e!r}')
        if not (len(table.h) == len(table.q) == len(table.visits)):
            raise ReadError('Return table snapshot has mismatched lengths')
        return table

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['q', 'unvisited']
        return ['q', 'h', 'unvisited', 'visits']

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self) -> Dict[str, Any]:
        return {
            'q': self.q.tolist(),
            'h': self.h.tolist(),
            'unvisited': list(self.unvisited),
            'visits': self.visits.tolist(),
        }


# =============================================================================
# TSCL Configuration
# =============================================================================
class TsclConfig(OBJ):
    '''
    TSCL Configuration
    -
    Settings of the bandit scheduler.

    Fields
    -
    - alpha : `float` (smoothing coefficient, in `(0, 1]`)
    - epsilon : `float` (fixed exploration rate, in `[0, 1]`)
    - warmup_steps : `int`
    - action_interval : `int`
    - warmup_pool : `WarmupPool`
    - warmup_tasks : `Tuple<int> | None` (`None` means every task)
    - freeze_q_during_warmup : `bool`
    - skip_first_reward : `bool`
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            alpha: float = 0.1,
            epsilon: float = 0.1,
            warmup_steps: int = 0,
            action_interval: int = 10,
            warmup_pool: WarmupPool = WarmupPool.ELIGIBLE,
            warmup_tasks: Optional[Sequence[TaskId]] = None,
            freeze_q_during_warmup: bool = False,
            skip_first_reward: bool = False
    ) -> None:
        if not (0.0 < alpha <= 1.0):
            raise ConfigError(f'TSCL `alpha` must be in (0, 1], got {alpha}')
        if not (0.0 <= epsilon <= 1.0):
            raise ConfigError(f'TSCL `epsilon` must be in [0, 1], got {epsilon}')
        if warmup_steps < 0:
            raise ConfigError(f'`warmup_steps` must be >= 0, got {warmup_steps}')
        if action_interval < 1:
            raise ConfigError(
                f'`action_interval` must be >= 1, got {action_interval}'
            )
        if warmup_tasks is not None and len(warmup_tasks) == 0:
            raise ConfigError('The TSCL warm-up pool is empty')

        self.alpha = float(alpha)
        ''' Smoothing coefficient of the expected returns. '''
        self.epsilon = float(epsilon)
        ''' Probability of a random action after the warm-up. '''
        self.warmup_steps = warmup_steps
        ''' Length of the warm-up. '''
        self.action_interval = action_interval
        ''' Steps between decisions. '''
        self.warmup_pool = warmup_pool
        ''' Which tasks the warm-up draws from. '''
        self.warmup_tasks: Optional[Tuple[TaskId, ...]] = \
            None if warmup_tasks is None else tuple(warmup_tasks)
        ''' Task ids of the warm-up pool (`None` means every task). '''
        self.freeze_q_during_warmup = freeze_q_during_warmup
        ''' Only record scores (not returns) while in the warm-up. '''
        self.skip_first_reward = skip_first_reward
        ''' Skip the return update on the first observation of each task. '''

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'TsclConfig':
        return TsclConfig(**self.ToDict(raw = True))

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['alpha', 'epsilon', 'warmup_steps']
        return list(self.ToDict().keys())

    # ============================
    # Method - Literal Warm-up Mode
    @property
    def queue_first(self) -> bool:
        ''' Whether the unvisited queue drains before the warm-up ends. '''
        return self.warmup_steps == 0 or self.warmup_pool == WarmupPool.ALL

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self, raw: bool = False) -> Dict[str, Any]:
        return {
            'alpha': self.alpha,
            'epsilon': self.epsilon,
            'warmup_steps': self.warmup_steps,
            'action_interval': self.action_interval,
            'warmup_pool': self.warmup_pool if raw else self.warmup_pool.value,
            'warmup_tasks': self.warmup_tasks if raw else (
                None if self.warmup_tasks is None else list(self.warmup_tasks)
            ),
            'freeze_q_during_warmup': self.freeze_q_during_warmup,
            'skip_first_reward': self.skip_first_reward,
        }


# =============================================================================
# TSCL Observe
# =============================================================================
def tscl_observe(
        table: ReturnTable,
        action: TaskId,
        x_t: Union[Score, float],
        alpha: float,
        update_q: bool = True
) -> float:
    '''
    TSCL Observe
    -
    Records the score obtained after training `action`:
    `reward = x_t - h[a]`, `h[a] = x_t`,
    `q[a] = alpha.reward + (1 - alpha).q[a]`.

    Parameters
    -
    - table : `ReturnTable`
        - Table updated in place.
    - action : `int`
        - Task that was trained.
    - x_t : `Score | float`
        - Score of the student on that task.
    - alpha : `float`
        - Smoothing coefficient.
    - update_q : `bool`
        - When `False` only the score history is updated. Defaults to `True`.

    Returns
    -
    - `float`
        - The reward.
    '''

    x = x_t.value if isinstance(x_t, Score) else float(x_t)
    if not 0 <= action < len(table.q):
        raise ValueError(f'Invalid action {action} for {len(table.q)} tasks')
    if not np.isfinite(x):
        raise ValueError(f'Score for task {action} is not finite: {x!r}')

    reward = x - float(table.h[action])
    table.h[action] = x
    if update_q:
        table.q[action] = alpha * reward + (1.0 - alpha) * table.q[action]
    table.visits[action] += 1
    return reward


# =============================================================================
# TSCL Select
# =============================================================================
def tscl_select(
        table: ReturnTable,
        step: int,
        config: TsclConfig,
        rng: np.random.Generator
) -> Tuple[TaskId, DecisionSource]:
    '''
    TSCL Select
    -
    Chooses the next task. In order: the front of the unvisited queue (held
    back until the warm-up ends when the warm-up only draws from eligible
    tasks); a random task from the warm-up pool while `step < w`; a random
    task with probability epsilon; otherwise the task with the largest
    `|q|`, the lowest index winning ties.

    Parameters
    -
    - table : `ReturnTable`
        - Current return table (the queue is popped in place).
    - step : `int`
        - Step of the decision point.
    - config : `TsclConfig`
        - Scheduler settings.
    - rng : `Generator`
        - Random generator. Outside the queue branch exactly one uniform draw
            is made, followed by one integer draw on the random branches.

    Returns
    -
    - `Tuple<int, DecisionSource>`
        - The task and how it was chosen.
    '''

    num_tasks = len(table.q)
    if num_tasks == 0:
        raise ConfigError('The TSCL action set is empty')

    in_warmup = step < config.warmup_steps
    if table.unvisited and (config.queue_first or not in_warmup):
        return int(table.unvisited.popleft()), DecisionSource.UNVISITED_QUEUE

    r = rng.random()
    if in_warmup:
        pool = config.warmup_tasks or tuple(range(num_tasks))
        return int(pool[rng.integers(len(pool))]), DecisionSource.WARMUP
    if r < config.epsilon:
        return int(rng.integers(num_tasks)), DecisionSource.RANDOM

    # argmax returns the first maximum
    return int(np.argmax(np.abs(table.q))), DecisionSource.GREEDY


# =============================================================================
# TSCL Scheduler
# =============================================================================
class TsclScheduler(Scheduler):
    '''
    TSCL Scheduler
    -
    Runs the bandit against a student: at each decision point it scores the
    task trained during the interval, updates the return table and picks the
    next task.

    In literal mode (no warm-up, or a warm-up drawing from every task) the
    first task is task 0 and the remaining tasks are queued. Otherwise the
    warm-up draws from the eligible tasks and every task is queued for a
    first visit once the warm-up ends.
    '''

    kind = SchedulerKind.TSCL.value

    # ====================
    # Method - Constructor
    def __init__(
            self,
            profiles: Sequence[TaskProfile],
            config: TsclConfig
    ) -> None:
        super().__init__(profiles, config.warmup_steps, config.action_interval)
        if config.warmup_tasks is None \
                and config.warmup_pool == WarmupPool.ELIGIBLE:
            settings = config.ToDict(raw = True)
            settings['warmup_tasks'] = warmup_pool_tasks(
                self.profiles,
                WarmupPool.ELIGIBLE
            )
            config = TsclConfig(**settings)
        if config.warmup_tasks is not None \
                and max(config.warmup_tasks) >= self.num_tasks:
            raise ConfigError(
                f'Warm-up tasks {config.warmup_tasks} exceed the task count ' \
                + f'{self.num_tasks}'
            )
        self.config = config
        ''' Scheduler settings. '''
        self.table = ReturnTable(self.num_tasks)
        ''' Expected returns, score history and unvisited queue. '''
        self.current: TaskId = 0
        ''' Task trained during the running interval. '''
        self.fixed_epsilon = config.epsilon

    # ==============
    # Method - Begin
    def Begin(self, evaluator: Evaluator, rng: np.random.Generator) -> Decision:
        if self.config.queue_first:
            self.table.unvisited = deque(range(1, self.num_tasks))
            self.current = 0
            source = DecisionSource.UNVISITED_QUEUE
        else:
            self.table.unvisited = deque(range(self.num_tasks))
            self.current, source = tscl_select(self.table, 0, self.config, rng)
        return Decision(self.current, source, self.config.epsilon)

    # =============================
    # Method - Configuration Dict
    def ConfigDict(self) -> Dict[str, Any]:
        return {'kind': self.kind, **self.config.ToDict()}

    # ===============
    # Method - Decide
    def Decide(
            self,
            step: int,
            evaluator: Evaluator,
            rng: np.random.Generator
    ) -> Decision:
        action = self.current
        score = evaluator.Score(action)
        update_q = not (
            (self.config.freeze_q_during_warmup
                and step < self.config.warmup_steps)
            or (self.config.skip_first_reward
                and self.table.visits[action] == 0)
        )
        reward = tscl_observe(
            self.table,
            action,
            score,
            self.config.alpha,
            update_q
        )
        self.current, source = tscl_select(self.table, step, self.config, rng)
        return Decision(
            self.current,
            source,
            self.config.epsilon,
            reward,
            score.value
        )

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['kind', 'current']
        return ['kind', 'current', 'config', 'table']

    # =================
    # Method - Snapshot
    def Snapshot(self) -> Optional[Dict[str, Any]]:
        return self.table.ToDict()


# =============================================================================
# End of File
# =============================================================================
