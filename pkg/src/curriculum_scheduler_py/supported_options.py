# =============================================================================
# RL Curriculum Scheduler - Supported Options
# =============================================================================
'''
RL Curriculum Scheduler - Supported Options
-
Contains the objects that contain the collections of options (schedulers,
environments, evaluation targets, ...) supported by the package.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# used for creating enumerators
from .generic_objects import (
    EnumParent, # parent enum class
)


# =============================================================================
# Supported Schedulers Enum
# =============================================================================
class SchedulerKind(EnumParent):
    '''
    Supported Schedulers Enum
    -
    Collection of all schedulers that can choose the task the student trains
    on next.
    '''

    TSCL = 'tscl'
    ''' Teacher-Student Curriculum Learning (bandit over smoothed returns). '''

    DQN = 'dqn'
    ''' Deep Q Network with experience replay and a soft-updated target. '''

    UNIFORM = 'uniform'
    ''' Baseline - each task with probability 1/K. '''

    PROPORTIONAL = 'proportional'
    ''' Baseline - each task with probability equal to its data weight. '''


# =============================================================================
# Supported Environments Enum
# =============================================================================
class EnvironmentKind(EnumParent):
    '''
    Supported Environments Enum
    -
    Collection of all built-in student environments.
    '''

    SYNTHETIC = 'synthetic'
    ''' Synthetic transfer student (closed-form loss dynamics). '''

    LEARNED = 'learned'
    ''' Tiny learned multi-task classifier. '''


# =============================================================================
# Evaluation Targets Enum
# =============================================================================
class EvalTarget(EnumParent):
    '''
    Evaluation Targets Enum
    -
    Data on which the score used for rewards is computed.
    '''

    CURRENT = 'current'
    ''' Development data of the task being trained. '''

    MIXED = 'mixed'
    ''' A fixed mixed sample over all tasks (equal weights). '''


# =============================================================================
# Warm-up Pools Enum
# =============================================================================
class WarmupPool(EnumParent):
    '''
    Warm-up Pools Enum
    -
    Tasks that may be drawn during the warm-up period.
    '''

    ELIGIBLE = 'eligible'
    ''' Only the warm-up eligible (high-resource) tasks. '''

    ALL = 'all'
    ''' Every task (the literal TSCL listing). '''


# =============================================================================
# Decision Sources Enum
# =============================================================================
class DecisionSource(EnumParent):
    '''
    Decision Sources Enum
    -
    How the scheduler arrived at an action.
    '''

    WARMUP = 'Warmup'
    ''' Random draw from the warm-up pool. '''

    RANDOM = 'Random'
    ''' Exploration draw (epsilon branch) or a baseline draw. '''

    GREEDY = 'Greedy'
    ''' Arg-max of the scheduler's value estimates. '''

    UNVISITED_QUEUE = 'UnvisitedQueue'
    ''' Forced first visit of a task. '''


# =============================================================================
# End of File
# =============================================================================
