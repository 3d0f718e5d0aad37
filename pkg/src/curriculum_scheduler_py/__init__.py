# =============================================================================
# RL Curriculum Scheduler
# =============================================================================
'''
RL Curriculum Scheduler
-
Schedulers that choose which task a multi-task student trains on next (a
bandit over learning progress, a deep Q-network over the student's loss
profile, and uniform / proportional baselines), the students they are tested
on, and the analyses of their runs.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# used for analysing runs
from .analysis import (
    ProbeMatrix,
    ProportionWindow,
    action_proportions,
    final_macro_score,
    log_steps_to_best,
    low_resource_tasks,
    macro_trace,
    probe_matrix,
    probe_q_network,
    proportions_csv,
    steps_to_best,
)

# used for the baseline schedulers
from .baselines import (
    BaselineConfig,
    BaselineScheduler,
    baseline_select,
)

# used for the command line
from .cli import (
    build_parser,
    cmd_probe,
    cmd_report,
    cmd_run,
    main,
    run_one,
)

# used for the shared objects and the training loop
from .core import (
    ConsecutiveReward,
    Decision,
    Evaluator,
    ExperimentLog,
    Scheduler,
    SchedulerConfig,
    Score,
    StepRecord,
    TaskProfile,
    compute_reward,
    run_experiment,
    validate_profiles,
    warmup_pool_tasks,
    write_atomic,
)

# used for the DQN scheduler
from .dqn import (
    AgentCheckpoint,
    DqnConfig,
    DqnScheduler,
    EpsilonSchedule,
    ReplayBuffer,
    Transition,
    dqn_loss_and_grads,
    dqn_select,
    dqn_train_step,
    epsilon_at,
    push_transition,
    sample_minibatch,
    soft_update,
    td_targets,
)

# used for the student environments
from .envs import (
    StudentEnvironment,
    SyntheticCalibration,
    SyntheticTransferStudent,
    TinyLearnedStudent,
    eval_score,
    make_environment,
    observe_state,
    student_learning_rate,
    synthetic_step,
)

# used for the custom errors
from .errors import (
    AbstractError,
    ConfigError,
    DimensionError,
    FileTypeError,
    NonFiniteError,
    ReadError,
    ReplayNotReadyError,
    RunAbortError,
)

# used for reading experiment specs
from .experiment_spec import ExperimentSpec

# used for generic objects
from .generic_objects import (
    FileType,
    VerbosityLevel,
)

# used for the Q network
from .neural import (
    ForwardCache,
    MlpParams,
    RmsPropState,
    backward,
    forward,
    huber,
    init_params,
    rmsprop_step,
    softmax,
)

# used for getting the supported options
from .supported_options import (
    DecisionSource,
    EnvironmentKind,
    EvalTarget,
    SchedulerKind,
    WarmupPool,
)

# used for the TSCL scheduler
from .tscl import (
    ReturnTable,
    TsclConfig,
    TsclScheduler,
    tscl_observe,
    tscl_select,
)


# =============================================================================
# End of File
# =============================================================================
