# =============================================================================
# RL Curriculum Scheduler - Custom Errors
# =============================================================================
'''
RL Curriculum Scheduler - Custom Errors
-
Contains definitions for all custom errors implemented in the project.
'''
# =============================================================================


# =============================================================================
# Abstract Method Error
# =============================================================================
class AbstractError(Exception):
    ''' Abstract Error. Used when an object defines an abstract function. '''


# =============================================================================
# Configuration Error
# =============================================================================
class ConfigError(Exception):
    ''' Configuration Error. Used when an experiment, scheduler or environment
        configuration is invalid (e.g. a task-count mismatch between the
        environment and the scheduler, or an empty action set). '''


# =============================================================================
# Dimension Error
# =============================================================================
class DimensionError(ValueError):
    ''' Dimension Error. Used when a state vector, transition or network
        parameter does not have the expected shape. '''


# =============================================================================
# File Type Error
# =============================================================================
class FileTypeError(Exception):
    ''' File Type Error. Used when an invalid file type was encountered. '''


# =============================================================================
# Non-Finite Value Error
# =============================================================================
class NonFiniteError(ArithmeticError):
    ''' Non-Finite Value Error. Used when a score, loss or network output is
        NaN or infinite. '''


# =============================================================================
# Read Error
# =============================================================================
class ReadError(Exception):
    ''' File Read Error. Used when an experiment spec, log or checkpoint file
        being read is invalid. '''


# =============================================================================
# Replay Not Ready Error
# =============================================================================
class ReplayNotReadyError(Exception):
    ''' Replay Not Ready Error. Used when a minibatch is requested from a
        replay buffer that holds fewer transitions than its minimum size. '''


# =============================================================================
# Run Abort Error
# =============================================================================
class RunAbortError(RuntimeError):
    ''' Run Abort Error. Used when an experiment run cannot continue (e.g. the
        student produced a NaN score). The message names the step and the
        task. '''

    # ====================
    # Method - Constructor
    def __init__(self, message: str, step: int, task: int) -> None:
        super().__init__(message)
        self.step = step
        ''' Step at which the run aborted. '''
        self.task = task
        ''' Task that was being trained or evaluated. '''


# =============================================================================
# End of File
# =============================================================================
