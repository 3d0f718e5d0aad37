# =============================================================================
# RL Curriculum Scheduler - Baseline Schedulers
# =============================================================================
'''
RL Curriculum Scheduler - Baseline Schedulers
-
Contains the non-adaptive schedulers used as comparison arms: after an
optional warm-up on the eligible tasks, every decision draws a task either
uniformly or in proportion to the tasks' data weights.

The scores and consecutive rewards of the intervals are still logged, so
baseline logs can be compared with the adaptive ones.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# core objects
from .core import (
    ConsecutiveReward, # consecutive score changes
    Decision, # outcome of a decision point
    Evaluator, # read-only view of the student
    Scheduler, # scheduler contract
    TaskId, # task index
    TaskProfile, # task descriptions
    warmup_pool_tasks, # tasks drawn during warm-up
)

# custom errors
from .errors import ConfigError

# generic objects
from .generic_objects import (
    OBJ, # base object model
    VerbosityLevel, # verbosity levels
)

# supported options
from .supported_options import (
    DecisionSource, # how an action was chosen
    SchedulerKind, # scheduler names
    WarmupPool, # tasks drawn during warm-up
)

# used for diagnostic logging
import logging

# used for the random draws
import numpy as np

# used for type hinting
from typing import (
    Any, # any type
    Dict, # dictionary data type
    List, # list data type
    Sequence, # read-only sequences
)


# =============================================================================
# Logging
# =============================================================================
logger = logging.getLogger(__name__)


# =============================================================================
# Baseline Configuration
# =============================================================================
class BaselineConfig(OBJ):
    '''
    Baseline Configuration
    -
    Settings of a baseline scheduler.

    Fields
    -
    - kind : `SchedulerKind` (`uniform` or `proportional`)
    - warmup_steps : `int` (`0` disables the warm-up)
    - action_interval : `int`
    - warmup_pool : `WarmupPool`
    '''

    KINDS = (SchedulerKind.UNIFORM, SchedulerKind.PROPORTIONAL)
    ''' Scheduler kinds that are baselines. '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            kind: SchedulerKind,
            warmup_steps: int = 0,
            action_interval: int = 10,
            warmup_pool: WarmupPool = WarmupPool.ELIGIBLE
    ) -> None:
        if kind not in self.KINDS:
            raise ConfigError(
                f'`{kind}` is not a baseline, expected any of ' \
                + f'{[k.value for k in self.KINDS]}'
            )
        if warmup_steps < 0:
            raise ConfigError(f'`warmup_steps` must be >= 0, got {warmup_steps}')
        if action_interval < 1:
            raise ConfigError(
                f'`action_interval` must be >= 1, got {action_interval}'
            )
        self.kind = kind
        ''' Distribution of the post-warm-up draws. '''
        self.warmup_steps = warmup_steps
        ''' Length of the warm-up. '''
        self.action_interval = action_interval
        ''' Steps between draws. '''
        self.warmup_pool = warmup_pool
        ''' Tasks drawn during the warm-up. '''

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'BaselineConfig':
        return BaselineConfig(**self.ToDict(raw = True))

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        return ['kind', 'warmup_steps', 'action_interval', 'warmup_pool']

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self, raw: bool = False) -> Dict[str, Any]:
        return {
            'kind': self.kind if raw else self.kind.value,
            'warmup_steps': self.warmup_steps,
            'action_interval': self.action_interval,
            'warmup_pool': self.warmup_pool if raw else self.warmup_pool.value,
        }


# =============================================================================
# Baseline Select
# =============================================================================
def baseline_select(
        config: BaselineConfig,
        step: int,
        profiles: Sequence[TaskProfile],
        rng: np.random.Generator
) -> TaskId:
    '''
    Baseline Select
    -
    Draws the next task: uniformly from the warm-up pool while
    `step < warmup_steps`, then uniformly from every task (`uniform`) or from
    the categorical distribution of the data weights (`proportional`).

    Parameters
    -
    - config : `BaselineConfig`
        - Baseline settings.
    - step : `int`
        - Step of the decision point.
    - profiles : `Sequence<TaskProfile>`
        - Task set.
    - rng : `Generator`
        - Random generator (one draw per call).

    Returns
    -
    - `int`
        - The task.
    '''

    if len(profiles) == 0:
        raise ConfigError('The baseline action set is empty')
    if step < config.warmup_steps:
        pool = warmup_pool_tasks(profiles, config.warmup_pool)
        if not pool:
            raise ConfigError('The warm-up pool is empty')
        return int(pool[rng.integers(len(pool))])

    if config.kind == SchedulerKind.UNIFORM:
        return int(rng.integers(len(profiles)))

    weights = np.array([p.data_weight for p in profiles], dtype = np.float64)
    total = weights.sum()
    if total <= 0:
        raise ConfigError('Proportional sampling needs a nonzero data weight')
    return int(rng.choice(len(profiles), p = weights / total))


# =============================================================================
# Baseline Scheduler
# =============================================================================
class BaselineScheduler(Scheduler):
    '''
    Baseline Scheduler
    -
    Draws every task with `baseline_select`. Outside the warm-up the decision
    also reports the consecutive reward of the interval.
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            profiles: Sequence[TaskProfile],
            config: BaselineConfig
    ) -> None:
        super().__init__(profiles, config.warmup_steps, config.action_interval)
        self.config = config
        ''' Baseline settings. '''
        self.kind = config.kind.value
        self.rewards = ConsecutiveReward()
        ''' Tracks the score at the start of the running interval. '''
        self.current: TaskId = 0
        ''' Task trained during the running interval. '''

    # ==============
    # Method - Begin
    def Begin(self, evaluator: Evaluator, rng: np.random.Generator) -> Decision:
        self.current = baseline_select(self.config, 0, self.profiles, rng)
        self.rewards.Prime(evaluator, self.current)
        return Decision(self.current, self._Source(0))

    # =============================
    # Method - Configuration Dict
    def ConfigDict(self) -> Dict[str, Any]:
        return self.config.ToDict()

    # ===============
    # Method - Decide
    def Decide(
            self,
            step: int,
            evaluator: Evaluator,
            rng: np.random.Generator
    ) -> Decision:
        reward, score = self.rewards.Observe(evaluator, self.current)
        self.current = baseline_select(self.config, step, self.profiles, rng)
        source = self._Source(step)
        if source == DecisionSource.WARMUP:
            # no reward observation during the warm-up
            decision = Decision(self.current, source)
        else:
            decision = Decision(
                self.current,
                source,
                reward = reward,
                score = score.value
            )
        self.rewards.Advance(evaluator, score, self.current)
        return decision

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['kind', 'current']
        return ['kind', 'current', 'config']

    # =====================
    # Method - Draw Source
    def _Source(self, step: int) -> DecisionSource:
        if step < self.warmup_steps:
            return DecisionSource.WARMUP
        return DecisionSource.RANDOM


# =============================================================================
# End of File
# =============================================================================
