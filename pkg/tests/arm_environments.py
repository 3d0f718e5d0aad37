# =============================================================================
# RL Curriculum Scheduler - Testing Students
# =============================================================================
'''
RL Curriculum Scheduler - Testing Students
-
Small deterministic students for the scheduler tests: every task ("arm") has
a loss that falls by a fixed amount each time it is trained, down to zero.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# used for building the students
from src.curriculum_scheduler_py import (
    StudentEnvironment,
    TaskProfile,
)

# used for the losses
import numpy as np

# used for type hinting
from typing import (
    Any,
    Dict,
    List,
    Optional,
    Sequence,
)


# =============================================================================
# Profiles
# =============================================================================
def arm_profiles(
        weights: Sequence[float] = (0.2, 0.3, 0.5),
        eligible: Optional[Sequence[bool]] = None
) -> List[TaskProfile]:
    ''' Profiles `arm0..armK-1`; the first arm is not warm-up eligible. '''
    if eligible is None:
        eligible = [i > 0 for i in range(len(weights))]
    return [
        TaskProfile(i, f'arm{i}', w, e)
        for i, (w, e) in enumerate(zip(weights, eligible))
    ]


# =============================================================================
# Linear Arms
# =============================================================================
class LinearArms(StudentEnvironment):
    '''
    Linear Arms
    -
    Loss of arm `k` starts at `start` and falls by `slopes[k]` per training
    step on `k` (never below 0). Scores are the negated losses, and the state
    repeats each loss `probes_per_task` times. Never draws from the run's
    generator.
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            slopes: Sequence[float] = (0.001, 0.003, 0.002),
            start: float = 5.0,
            probes_per_task: int = 2,
            profiles: Optional[Sequence[TaskProfile]] = None
    ) -> None:
        super().__init__(
            profiles if profiles is not None else arm_profiles(
                [1.0 / len(slopes)] * len(slopes)
            ),
            probes_per_task
        )
        self.slopes = np.array(slopes, dtype = np.float64)
        self.start = start
        self.Reset(0)

    def ConfigDict(self) -> Dict[str, Any]:
        return {'kind': 'linear_arms', 'slopes': self.slopes.tolist()}

    def EvalMixed(self) -> float:
        return -float(np.mean(self.losses))

    def EvalScore(self, task: int) -> float:
        self._CheckTask(task)
        return -float(self.losses[task])

    def EvaluateAll(self) -> np.ndarray:
        return -self.losses.copy()

    def ObserveState(self) -> np.ndarray:
        return np.repeat(self.losses, self.probes_per_task)

    def Reset(self, seed: int) -> None:
        self.seed = seed
        self.step = 0
        self.losses = np.full(len(self.slopes), self.start)

    def TrainOn(self, task: int, rng: np.random.Generator) -> None:
        self._CheckTask(task)
        self.losses[task] = max(0.0, self.losses[task] - self.slopes[task])
        self.step += 1


# =============================================================================
# Broken Arms
# =============================================================================
class NanArms(LinearArms):
    ''' Linear arms whose score turns NaN after `nan_after` training steps. '''

    def __init__(self, nan_after: int, **kwargs: Any) -> None:
        self.nan_after = nan_after
        super().__init__(**kwargs)

    def EvalScore(self, task: int) -> float:
        if self.step >= self.nan_after:
            return float('nan')
        return super().EvalScore(task)


# =============================================================================
# End of File
# =============================================================================
