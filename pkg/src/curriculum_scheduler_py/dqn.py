# =============================================================================
# RL Curriculum Scheduler - Deep Q Network
# =============================================================================
'''
RL Curriculum Scheduler - Deep Q Network
-
Contains the Deep Q Network scheduler: a bounded replay memory, the epsilon
decay schedule, temporal-difference targets, Huber-loss training of the
online network with RMSProp, and soft updates of the target network.

The task is continuing, so no transition is terminal.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# core objects
from .core import (
    ConsecutiveReward, # consecutive-score rewards
    Decision, # outcome of a decision point
    Evaluator, # read-only view of the student
    Scheduler, # scheduler contract
    StateVector, # state vectors
    TaskId, # task index
    TaskProfile, # task descriptions
    warmup_pool_tasks, # tasks drawn during warm-up
    write_atomic, # atomic file writing
)

# custom errors
from .errors import (
    ConfigError, # invalid configuration
    DimensionError, # shape mismatch
    NonFiniteError, # NaN network outputs
    ReadError, # invalid checkpoints
    ReplayNotReadyError, # replay gate not met
    RunAbortError, # aborted runs
)

# generic objects
from .generic_objects import (
    OBJ, # base object model
    VerbosityLevel, # verbosity levels
)

# network
from .neural import (
    MlpParams, # network parameters
    RmsPropState, # optimizer state
    backward, # backpropagation
    forward, # forward pass
    huber, # huber loss
    init_params, # parameter initialization
    rmsprop_step, # optimizer step
)

# supported options
from .supported_options import (
    DecisionSource, # how an action was chosen
    SchedulerKind, # scheduler names
    WarmupPool, # tasks drawn during warm-up
)

# used for the replay memory
from collections import deque

# used for checkpoints
import json

# used for diagnostic logging
import logging

# used for the epsilon decay
import math

# used for all of the arithmetic
import numpy as np

# used for file paths
from pathlib import Path

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
# Logging + Constants
# =============================================================================
logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT_VERSION: int = 1
''' Version of the agent checkpoint format. '''


# =============================================================================
# Transition
# =============================================================================
class Transition(OBJ):
    '''
    Transition
    -
    One experience tuple `(S_{t-1}, A_{t-1}, R_t, S_t)`.

    Fields
    -
    - state_prev : `ndarray`
    - action : `int`
    - reward : `float`
    - state_next : `ndarray`
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            state_prev: StateVector,
            action: TaskId,
            reward: float,
            state_next: StateVector
    ) -> None:
        state_prev = np.asarray(state_prev, dtype = np.float64)
        state_next = np.asarray(state_next, dtype = np.float64)
        if state_prev.ndim != 1 or state_prev.shape != state_next.shape:
            raise DimensionError(
                f'Transition states have shapes {state_prev.shape} and ' \
                + f'{state_next.shape}'
            )
        if not math.isfinite(reward):
            raise NonFiniteError(f'Transition reward is not finite: {reward!r}')
        self.state_prev = state_prev
        ''' State before the action. '''
        self.action = int(action)
        ''' Task trained. '''
        self.reward = float(reward)
        ''' Reward obtained. '''
        self.state_next = state_next
        ''' State after the action. '''

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'Transition':
        return Transition(
            self.state_prev.copy(),
            self.action,
            self.reward,
            self.state_next.copy()
        )

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['action', 'reward']
        return ['action', 'reward', 'state_prev', 'state_next']


# =============================================================================
# Replay Buffer
# =============================================================================
class ReplayBuffer(OBJ):
    '''
    Replay Buffer
    -
    Bounded FIFO store of transitions. The oldest transition is evicted when
    the buffer is full; sampling is gated until `min_capacity` transitions
    are stored.

    Fields
    -
    - capacity : `int`
    - min_capacity : `int`
    - state_dim : `int`
    - storage : `Deque<Transition>`
    - pushed : `int` (transitions pushed over the buffer's lifetime)
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            capacity: int,
            min_capacity: int,
            state_dim: int
    ) -> None:
        if capacity < 1 or not (1 <= min_capacity <= capacity):
            raise ConfigError(
                f'Replay sizes must satisfy 1 <= min ({min_capacity}) <= ' \
                + f'capacity ({capacity})'
            )
        self.capacity = capacity
        ''' Maximum number of stored transitions. '''
        self.min_capacity = min_capacity
        ''' Number of stored transitions needed before sampling. '''
        self.state_dim = state_dim
        ''' Size of the stored state vectors. '''
        self.storage: Deque[Transition] = deque(maxlen = capacity)
        ''' Stored transitions, oldest first. '''
        self.pushed: int = 0
        ''' Transitions pushed over the buffer's lifetime. '''

    # ============
    # Method - len
    def __len__(self) -> int:
        return len(self.storage)

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'ReplayBuffer':
        buf = ReplayBuffer(self.capacity, self.min_capacity, self.state_dim)
        buf.storage.extend(t.Duplicate() for t in self.storage)
        buf.pushed = self.pushed
        return buf

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['size', 'capacity', 'min_capacity']
        return ['size', 'capacity', 'min_capacity', 'pushed', 'storage']

    # ================
    # Property - Ready
    @property
    def ready(self) -> bool:
        ''' Whether enough transitions are stored to sample. '''
        return len(self.storage) >= self.min_capacity

    # ===============
    # Property - Size
    @property
    def size(self) -> int:
        ''' Number of stored transitions. '''
        return len(self.storage)

    # =====================
    # Method - Statistics
    def Stats(self) -> Dict[str, int]:
        ''' Sizes and counters stored in checkpoints. '''
        return {
            'size': self.size,
            'capacity': self.capacity,
            'min_capacity': self.min_capacity,
            'pushed': self.pushed,
        }


# =============================================================================
# Push Transition
# =============================================================================
def push_transition(buf: ReplayBuffer, t: Transition) -> ReplayBuffer:
    ''' Appends `t`, evicting the oldest transition when full. '''
    if t.state_prev.shape != (buf.state_dim,):
        raise DimensionError(
            f'Transition states have shape {t.state_prev.shape}, buffer ' \
            + f'stores ({buf.state_dim},)'
        )
    buf.storage.append(t)
    buf.pushed += 1
    return buf


# =============================================================================
# Sample Minibatch
# =============================================================================
def sample_minibatch(
        buf: ReplayBuffer,
        m: int,
        rng: np.random.Generator
) -> List[Transition]:
    '''
    Sample Minibatch
    -
    Draws `m` distinct transitions uniformly (one `rng.choice` call without
    replacement).

    Parameters
    -
    - buf : `ReplayBuffer`
        - Replay memory.
    - m : `int`
        - Minibatch size.
    - rng : `Generator`
        - Random generator.

    Returns
    -
    - `List<Transition>`
        - The sampled transitions, in draw order.
    '''

    if not buf.ready:
        raise ReplayNotReadyError(
            f'Replay buffer holds {buf.size} transitions, needs ' \
            + f'{buf.min_capacity} before sampling'
        )
    if not 1 <= m <= buf.size:
        raise ValueError(
            f'Minibatch size {m} not in [1, {buf.size}] (buffer size)'
        )
    indices = rng.choice(buf.size, size = m, replace = False)
    return [buf.storage[int(i)] for i in indices]


# =============================================================================
# Epsilon Schedule
# =============================================================================
class EpsilonSchedule(OBJ):
    '''
    Epsilon Schedule
    -
    Exploration rate of the DQN scheduler: `eps_start` during the warm-up,
    then an exponential decay that reaches `eps_min` exactly
    `decay_horizon` steps after the warm-up ends.

    Fields
    -
    - eps_start : `float`
    - eps_min : `float`
    - warmup_steps : `int`
    - decay_horizon : `int`
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            eps_start: float = 1.0,
            eps_min: float = 0.01,
            warmup_steps: int = 0,
            decay_horizon: int = 50000
    ) -> None:
        if not (0.0 < eps_min <= eps_start <= 1.0):
            raise ConfigError(
                f'Epsilon bounds must satisfy 0 < eps_min ({eps_min}) <= ' \
                + f'eps_start ({eps_start}) <= 1'
            )
        if warmup_steps < 0 or decay_horizon < 1:
            raise ConfigError(
                f'Invalid epsilon schedule: warmup_steps={warmup_steps}, ' \
                + f'decay_horizon={decay_horizon}'
            )
        self.eps_start = float(eps_start)
        ''' Exploration rate during the warm-up. '''
        self.eps_min = float(eps_min)
        ''' Floor of the exploration rate. '''
        self.warmup_steps = warmup_steps
        ''' Step at which the decay starts. '''
        self.decay_horizon = decay_horizon
        ''' Steps from the end of the warm-up to `eps_min`. '''

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'EpsilonSchedule':
        return EpsilonSchedule(
            self.eps_start,
            self.eps_min,
            self.warmup_steps,
            self.decay_horizon
        )

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        return ['eps_start', 'eps_min', 'warmup_steps', 'decay_horizon']

    # ===================
    # Property - Decay Rate
    @property
    def decay_rate(self) -> float:
        ''' `ln(eps_start / eps_min) / decay_horizon`. '''
        return math.log(self.eps_start / self.eps_min) / self.decay_horizon


# =============================================================================
# Epsilon at Step
# =============================================================================
def epsilon_at(step: int, schedule: EpsilonSchedule) -> float:
    '''
    Epsilon at Step
    -
    Exploration rate at `step`. Nonincreasing in `step` and always in
    `[eps_min, eps_start]`.

    Parameters
    -
    - step : `int`
        - Training step (`>= 0`).
    - schedule : `EpsilonSchedule`
        - The schedule.

    Returns
    -
    - `float`
        - The exploration rate.
    '''

    if step < 0:
        raise ValueError(f'Step must be >= 0, got {step}')
    if step < schedule.warmup_steps:
        return schedule.eps_start
    elapsed = step - schedule.warmup_steps
    if elapsed >= schedule.decay_horizon:
        return schedule.eps_min
    return max(
        schedule.eps_min,
        schedule.eps_start * math.exp(-schedule.decay_rate * elapsed)
    )


# =============================================================================
# DQN Configuration
# =============================================================================
class DqnConfig(OBJ):
    '''
    DQN Configuration
    -
    Hyperparameters of the DQN scheduler.

    Fields
    -
    - gamma : `float` (discount, in `[0, 1]`)
    - tau : `float` (soft-update coefficient, in `(0, 1]`)
    - lr : `float` (learning rate of the online network)
    - minibatch_size : `int`
    - hidden_sizes : `Tuple<int>`
    - replay_capacity : `int` (`c`)
    - replay_min : `int` (`c_min`)
    - eps_start : `float`
    - eps_min : `float`
    - decay_horizon : `int`
    - warmup_steps : `int`
    - action_interval : `int`
    - warmup_pool : `WarmupPool`
    - huber_delta : `float`
    - rms_rho : `float`
    - rms_stabilizer : `float`
    - select_with_online : `bool`
    - train_steps_per_decision : `int`
    - reward_scale : `float` (factor on the rewards stored for training)
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            gamma: float = 0.99,
            tau: float = 0.005,
            lr: float = 2.5e-4,
            minibatch_size: int = 32,
            hidden_sizes: Sequence[int] = (512, 512),
            replay_capacity: int = 10000,
            replay_min: int = 1000,
            eps_start: float = 1.0,
            eps_min: float = 0.01,
            decay_horizon: int = 50000,
            warmup_steps: int = 0,
            action_interval: int = 10,
            warmup_pool: WarmupPool = WarmupPool.ELIGIBLE,
            huber_delta: float = 1.0,
            rms_rho: float = 0.99,
            rms_stabilizer: float = 1e-8,
            select_with_online: bool = False,
            train_steps_per_decision: int = 1,
            reward_scale: float = 1.0
    ) -> None:
        self.gamma = float(gamma)
        ''' Discount of the bootstrapped value. '''
        self.tau = float(tau)
        ''' Soft-update coefficient. '''
        self.lr = float(lr)
        ''' Learning rate of the online network. '''
        self.minibatch_size = minibatch_size
        ''' Transitions per training step. '''
        self.hidden_sizes: Tuple[int, ...] = tuple(int(h) for h in hidden_sizes)
        ''' Widths of the hidden layers. '''
        self.replay_capacity = replay_capacity
        ''' Maximum size of the replay memory. '''
        self.replay_min = replay_min
        ''' Replay size needed before training. '''
        self.eps_start = float(eps_start)
        ''' Exploration rate during the warm-up. '''
        self.eps_min = float(eps_min)
        ''' Floor of the exploration rate. '''
        self.decay_horizon = decay_horizon
        ''' Steps from the end of the warm-up to `eps_min`. '''
        self.warmup_steps = warmup_steps
        ''' Length of the warm-up. '''
        self.action_interval = action_interval
        ''' Steps between decisions. '''
        self.warmup_pool = warmup_pool
        ''' Which tasks the warm-up draws from. '''
        self.huber_delta = float(huber_delta)
        ''' Threshold of the Huber loss. '''
        self.rms_rho = float(rms_rho)
        ''' RMSProp decay. '''
        self.rms_stabilizer = float(rms_stabilizer)
        ''' RMSProp stabilizer. '''
        self.select_with_online = select_with_online
        ''' Choose greedy actions with the online network instead of the
            target network. '''
        self.train_steps_per_decision = train_steps_per_decision
        ''' Training steps run at each post-warm-up decision. '''
        self.reward_scale = float(reward_scale)
        ''' Factor applied to rewards before they enter the replay memory.
            Logged rewards are never scaled. '''
        self.Validate()

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'DqnConfig':
        return DqnConfig(**self.ToDict(raw = True))

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['gamma', 'tau', 'lr', 'hidden_sizes']
        return list(self.ToDict().keys())

    # =================
    # Method - Schedule
    def Schedule(self) -> EpsilonSchedule:
        ''' The epsilon schedule these settings describe. '''
        return EpsilonSchedule(
            self.eps_start,
            self.eps_min,
            self.warmup_steps,
            self.decay_horizon
        )

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self, raw: bool = False) -> Dict[str, Any]:
        return {
            'gamma': self.gamma,
            'tau': self.tau,
            'lr': self.lr,
            'minibatch_size': self.minibatch_size,
            'hidden_sizes': list(self.hidden_sizes),
            'replay_capacity': self.replay_capacity,
            'replay_min': self.replay_min,
            'eps_start': self.eps_start,
            'eps_min': self.eps_min,
            'decay_horizon': self.decay_horizon,
            'warmup_steps': self.warmup_steps,
            'action_interval': self.action_interval,
            'warmup_pool': self.warmup_pool if raw else self.warmup_pool.value,
            'huber_delta': self.huber_delta,
            'rms_rho': self.rms_rho,
            'rms_stabilizer': self.rms_stabilizer,
            'select_with_online': self.select_with_online,
            'train_steps_per_decision': self.train_steps_per_decision,
            'reward_scale': self.reward_scale,
        }

    # =================
    # Method - Validate
    def Validate(self) -> None:
        ''' Raises `ConfigError` when a hyperparameter is out of range. '''
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f'DQN `gamma` must be in [0, 1], got {self.gamma}')
        if not 0.0 < self.tau <= 1.0:
            raise ConfigError(f'DQN `tau` must be in (0, 1], got {self.tau}')
        if self.lr < 0.0:
            raise ConfigError(f'DQN `lr` must be >= 0, got {self.lr}')
        if len(self.hidden_sizes) < 1 or min(self.hidden_sizes) < 1:
            raise ConfigError(
                f'DQN `hidden_sizes` must be positive widths, got ' \
                + f'{list(self.hidden_sizes)}'
            )
        if not 1 <= self.replay_min <= self.replay_capacity:
            raise ConfigError(
                f'DQN replay sizes must satisfy 1 <= `replay_min` ' \
                + f'({self.replay_min}) <= `replay_capacity` ' \
                + f'({self.replay_capacity})'
            )
        if not 1 <= self.minibatch_size <= self.replay_min:
            raise ConfigError(
                f'DQN `minibatch_size` ({self.minibatch_size}) must be in ' \
                + f'[1, `replay_min` ({self.replay_min})]'
            )
        if self.huber_delta <= 0.0:
            raise ConfigError(
                f'DQN `huber_delta` must be > 0, got {self.huber_delta}'
            )
        if not 0.0 <= self.rms_rho < 1.0 or self.rms_stabilizer <= 0.0:
            raise ConfigError(
                f'Invalid RMSProp constants rho={self.rms_rho}, ' \
                + f'stabilizer={self.rms_stabilizer}'
            )
        if self.train_steps_per_decision < 1:
            raise ConfigError(
                f'DQN `train_steps_per_decision` must be >= 1, got ' \
                + f'{self.train_steps_per_decision}'
            )
        if not (math.isfinite(self.reward_scale) and self.reward_scale > 0.0):
            raise ConfigError(
                f'DQN `reward_scale` must be > 0, got {self.reward_scale}'
            )
        if self.action_interval < 1:
            raise ConfigError(
                f'`action_interval` must be >= 1, got {self.action_interval}'
            )
        # range checks of the schedule itself
        self.Schedule()


# =============================================================================
# TD Targets
# =============================================================================
def td_targets(
        batch: Sequence[Transition],
        gamma: float,
        target_net: MlpParams
) -> np.ndarray:
    '''
    TD Targets
    -
    `y = reward + gamma . max_a Q_target(state_next, a)` per transition.

    Parameters
    -
    - batch : `Sequence<Transition>`
        - Transitions.
    - gamma : `float`
        - Discount.
    - target_net : `MlpParams`
        - Target network.

    Returns
    -
    - `ndarray`
        - One target per transition.
    '''

    next_states = np.stack([t.state_next for t in batch])
    if next_states.shape[1] != target_net.input_dim:
        raise DimensionError(
            f'Target network expects states of size {target_net.input_dim}, ' \
            + f'got {next_states.shape[1]}'
        )
    q_next, _ = forward(target_net, next_states)
    if not np.all(np.isfinite(q_next)):
        raise NonFiniteError('Target network produced non-finite Q values')
    rewards = np.array([t.reward for t in batch])
    return rewards + gamma * q_next.max(axis = 1)


# =============================================================================
# DQN Loss + Gradients
# =============================================================================
def dqn_loss_and_grads(
        online: MlpParams,
        batch: Sequence[Transition],
        targets: np.ndarray,
        delta: float = 1.0
) -> Tuple[float, MlpParams]:
    '''
    DQN Loss + Gradients
    -
    Mean Huber loss between `Q_online(state_prev, action)` and the targets,
    and its gradients. Only the Q value of the taken action receives a
    gradient.

    Parameters
    -
    - online : `MlpParams`
        - Online network.
    - batch : `Sequence<Transition>`
        - Transitions.
    - targets : `ndarray`
        - TD targets, one per transition.
    - delta : `float`
        - Huber threshold.

    Returns
    -
    - `Tuple<float, MlpParams>`
        - The loss and the gradients.
    '''

    states = np.stack([t.state_prev for t in batch])
    actions = np.array([t.action for t in batch])
    rows = np.arange(len(batch))

    q, cache = forward(online, states)
    if not np.all(np.isfinite(q)):
        raise NonFiniteError('Online network produced non-finite Q values')
    value, derivative = huber(q[rows, actions] - targets, delta)
    loss = float(np.mean(value))
    if not math.isfinite(loss):
        raise NonFiniteError(f'DQN loss is not finite: {loss!r}')

    grad_out = np.zeros_like(q)
    grad_out[rows, actions] = derivative / len(batch)
    return loss, backward(online, cache, grad_out)


# =============================================================================
# DQN Train Step
# =============================================================================
def dqn_train_step(
        online: MlpParams,
        target: MlpParams,
        batch: Sequence[Transition],
        config: DqnConfig,
        opt_state: RmsPropState
) -> Tuple[MlpParams, RmsPropState, float]:
    '''
    DQN Train Step
    -
    One RMSProp update of the online network on a minibatch. The target
    network is not modified.

    Parameters
    -
    - online : `MlpParams`
        - Online network.
    - target : `MlpParams`
        - Target network (used for the TD targets).
    - batch : `Sequence<Transition>`
        - Minibatch.
    - config : `DqnConfig`
        - Hyperparameters (`gamma`, `lr`, `huber_delta`).
    - opt_state : `RmsPropState`
        - Optimizer state of the online network.

    Returns
    -
    - `Tuple<MlpParams, RmsPropState, float>`
        - Updated online network, updated optimizer state, and the loss
            before the update.
    '''

    targets = td_targets(batch, config.gamma, target)
    loss, grads = dqn_loss_and_grads(
        online,
        batch,
        targets,
        config.huber_delta
    )
    online, opt_state = rmsprop_step(online, grads, opt_state, config.lr)
    return online, opt_state, loss


# =============================================================================
# Soft Update
# =============================================================================
def soft_update(
        online: MlpParams,
        target: MlpParams,
        tau: float
) -> MlpParams:
    ''' `target <- tau.online + (1 - tau).target`, element-wise. '''
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f'Soft-update coefficient must be in [0, 1], got {tau}')
    return target.Map(lambda t, o: tau * o + (1.0 - tau) * t, online)


# =============================================================================
# DQN Select
# =============================================================================
def dqn_select(
        state: StateVector,
        eps: float,
        net: MlpParams,
        rng: np.random.Generator
) -> Tuple[TaskId, DecisionSource]:
    '''
    DQN Select
    -
    Epsilon-greedy choice: one uniform draw, then (below `eps`) one integer
    draw for a random task, or the arg-max of the network outputs (the
    lowest index winning ties).

    Parameters
    -
    - state : `ndarray`
        - Current state vector.
    - eps : `float`
        - Exploration rate.
    - net : `MlpParams`
        - Selection network (the target network unless configured).
    - rng : `Generator`
        - Random generator.

    Returns
    -
    - `Tuple<int, DecisionSource>`
        - The task and how it was chosen.
    '''

    state = np.asarray(state, dtype = np.float64)
    if state.shape != (net.input_dim,):
        raise DimensionError(
            f'Network expects a state of size {net.input_dim}, got ' \
            + f'{state.shape}'
        )
    if rng.random() < eps:
        return int(rng.integers(net.output_dim)), DecisionSource.RANDOM
    q, _ = forward(net, state)
    if not np.all(np.isfinite(q)):
        raise NonFiniteError('Selection network produced non-finite Q values')
    return int(np.argmax(q)), DecisionSource.GREEDY


# =============================================================================
# Agent Checkpoint
# =============================================================================
class AgentCheckpoint(OBJ):
    '''
    Agent Checkpoint
    -
    Saved DQN agent: both networks, the optimizer state, replay statistics
    and the step of the last decision.

    Fields
    -
    - online : `MlpParams`
    - target : `MlpParams`
    - opt_state : `RmsPropState`
    - buffer_stats : `Dict<str, int>`
    - step : `int`
    - config : `dict`
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            online: MlpParams,
            target: MlpParams,
            opt_state: RmsPropState,
            buffer_stats: Dict[str, int],
            step: int,
            config: Optional[Dict[str, Any]] = None
    ) -> None:
        if online.sizes != target.sizes:
            raise DimensionError(
                f'Online sizes {online.sizes} differ from target sizes ' \
                + f'{target.sizes}'
            )
        self.online = online
        ''' Online network. '''
        self.target = target
        ''' Target network. '''
        self.opt_state = opt_state
        ''' Optimizer state of the online network. '''
        self.buffer_stats = dict(buffer_stats)
        ''' Replay memory sizes and counters. '''
        self.step = step
        ''' Step of the last decision. '''
        self.config = dict(config or {})
        ''' Hyperparameters of the agent. '''

    # ===================
    # Property - State Dim
    @property
    def state_dim(self) -> int:
        ''' Size of the state vectors. '''
        return self.online.input_dim

    # ====================
    # Property - Task Count
    @property
    def num_tasks(self) -> int:
        ''' Number of actions. '''
        return self.online.output_dim

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'AgentCheckpoint':
        return AgentCheckpoint(
            self.online.Duplicate(),
            self.target.Duplicate(),
            self.opt_state.Duplicate(),
            self.buffer_stats,
            self.step,
            json.loads(json.dumps(self.config))
        )

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['state_dim', 'num_tasks', 'step']
        return [
            'state_dim', 'num_tasks', 'step', 'buffer_stats', 'config',
            'online', 'target'
        ]

    # ===================
    # Method - Read File
    @classmethod
    def Read(cls, file_name: Union[str, Path]) -> 'AgentCheckpoint':
        '''
        Read File
        -
        Reads a checkpoint written by `Write`.

        Parameters
        -
        - file_name : `str | Path`
            - Name + Directory of the checkpoint.

        Returns
        -
        - `AgentCheckpoint`
            - The checkpoint.
        '''

        try:
            with open(file_name, 'r', encoding = 'utf-8') as file:
                data = json.load(file)
        except (OSError, ValueError) as e:
            raise ReadError(f'Could not read checkpoint `{file_name}`: {e}')
        if not isinstance(data, dict) \
                or data.get('format_version', None) \
                    != CHECKPOINT_FORMAT_VERSION:
            raise ReadError(
                f'`{file_name}` is not a version ' \
                + f'{CHECKPOINT_FORMAT_VERSION} agent checkpoint'
            )
        try:
            checkpoint = cls(
                online = MlpParams.FromDict(data['online']),
                target = MlpParams.FromDict(data['target']),
                opt_state = RmsPropState.FromDict(data['optimizer']),
                buffer_stats = data['buffer'],
                step = int(data['step']),
                config = data.get('config', {})
            )
        except (KeyError, TypeError, DimensionError, ReadError) as e:
            raise ReadError(f'Invalid checkpoint `{file_name}`: {e}')
        if checkpoint.state_dim != data.get('state_dim') \
                or checkpoint.num_tasks != data.get('num_tasks'):
            raise ReadError(
                f'`{file_name}` header dimensions do not match its networks'
            )
        return checkpoint

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self) -> Dict[str, Any]:
        return {
            'format_version': CHECKPOINT_FORMAT_VERSION,
            'kind': SchedulerKind.DQN.value,
            'state_dim': self.state_dim,
            'num_tasks': self.num_tasks,
            'step': self.step,
            'config': self.config,
            'buffer': self.buffer_stats,
            'online': self.online.ToDict(),
            'target': self.target.ToDict(),
            'optimizer': self.opt_state.ToDict(),
        }

    # ====================
    # Method - Write File
    def Write(self, file_name: Union[str, Path]) -> None:
        ''' Atomically writes the checkpoint as JSON. '''
        write_atomic(file_name, json.dumps(self.ToDict()) + '\n')


# =============================================================================
# DQN Scheduler
# =============================================================================
class DqnScheduler(Scheduler):
    '''
    DQN Scheduler
    -
    Runs the Q-learning agent against a student. During the warm-up actions
    are drawn from the warm-up pool, and the state and score are still
    tracked so the first transition after the warm-up is complete. After the
    warm-up, each decision stores a transition, trains the online network
    (once the replay gate opens), soft-updates the target network and picks
    the next task epsilon-greedily.

    The networks are initialized from the run's generator in `Begin`, unless
    they were given to the constructor.
    '''

    kind = SchedulerKind.DQN.value

    # ====================
    # Method - Constructor
    def __init__(
            self,
            profiles: Sequence[TaskProfile],
            config: DqnConfig,
            state_dim: int,
            online: Optional[MlpParams] = None,
            target: Optional[MlpParams] = None
    ) -> None:
        super().__init__(
            profiles,
            config.warmup_steps,
            config.action_interval,
            state_dim
        )
        self.config = config
        ''' Hyperparameters. '''
        self.schedule = config.Schedule()
        ''' Exploration schedule. '''
        self.sizes: List[int] = \
            [state_dim] + list(config.hidden_sizes) + [self.num_tasks]
        ''' Layer widths of the Q network. '''
        self.warmup_tasks = warmup_pool_tasks(self.profiles, config.warmup_pool)
        ''' Tasks drawn during the warm-up. '''
        self.buffer = ReplayBuffer(
            config.replay_capacity,
            config.replay_min,
            state_dim
        )
        ''' Replay memory. '''
        self.online: Optional[MlpParams] = online
        ''' Online network. '''
        self.target: Optional[MlpParams] = target
        ''' Target network. '''
        self.opt_state: Optional[RmsPropState] = None
        ''' Optimizer state of the online network. '''
        for params in (online, target):
            if params is not None and params.sizes != self.sizes:
                raise DimensionError(
                    f'Network sizes {params.sizes} do not match {self.sizes}'
                )
        self.rewards = ConsecutiveReward()
        ''' Tracks the score at the start of the running interval. '''
        self.current: TaskId = 0
        ''' Task trained during the running interval. '''
        self.prev_state: Optional[StateVector] = None
        ''' State observed at the previous decision. '''
        self.step: int = 0
        ''' Step of the last decision. '''
        self.train_steps: int = 0
        ''' Number of training steps run. '''
        self.last_loss: Optional[float] = None
        ''' Loss of the last training step. '''
        self._warned_gate: bool = False
        ''' Whether a skipped training step has been reported. '''

    # ==============
    # Method - Begin
    def Begin(self, evaluator: Evaluator, rng: np.random.Generator) -> Decision:
        if self.online is None:
            self.online = init_params(self.sizes, rng)
        if self.target is None:
            self.target = self.online.Duplicate()
        self.opt_state = RmsPropState.Zeros(
            self.online,
            self.config.rms_rho,
            self.config.rms_stabilizer
        )

        self.prev_state = evaluator.State()
        eps = epsilon_at(0, self.schedule)
        if self.warmup_steps > 0:
            self.current = self._WarmupAction(rng)
            source = DecisionSource.WARMUP
        else:
            try:
                self.current, source = dqn_select(
                    self.prev_state,
                    eps,
                    self._SelectionNet(),
                    rng
                )
            except NonFiniteError as e:
                raise RunAbortError(
                    f'DQN agent failed on its first decision: {e}',
                    step = 0,
                    task = -1
                ) from e
        self.rewards.Prime(evaluator, self.current)
        return Decision(self.current, source, eps)

    # =============================
    # Method - Configuration Dict
    def ConfigDict(self) -> Dict[str, Any]:
        return {'kind': self.kind, **self.config.ToDict()}

    # =====================
    # Method - Checkpoint
    def Checkpoint(self) -> AgentCheckpoint:
        ''' Current agent as a checkpoint. '''
        if self.online is None or self.target is None \
                or self.opt_state is None:
            raise ConfigError('The DQN agent has not been initialized')
        return AgentCheckpoint(
            self.online.Duplicate(),
            self.target.Duplicate(),
            self.opt_state.Duplicate(),
            self.buffer.Stats(),
            self.step,
            self.ConfigDict()
        )

    # ===============
    # Method - Decide
    def Decide(
            self,
            step: int,
            evaluator: Evaluator,
            rng: np.random.Generator
    ) -> Decision:
        action = self.current
        reward, score = self.rewards.Observe(evaluator, action)
        state = evaluator.State()
        eps = epsilon_at(step, self.schedule)
        self.step = step

        if step < self.warmup_steps:
            # warm-up: no transition, no training, no reward
            self.current = self._WarmupAction(rng)
            decision = Decision(self.current, DecisionSource.WARMUP, eps)
        else:
            assert self.prev_state is not None
            try:
                push_transition(
                    self.buffer,
                    Transition(
                        self.prev_state,
                        action,
                        reward * self.config.reward_scale,
                        state
                    )
                )
                self._Train(step, rng)
                self.current, source = dqn_select(
                    state,
                    eps,
                    self._SelectionNet(),
                    rng
                )
            except NonFiniteError as e:
                raise RunAbortError(
                    f'DQN agent failed at step {step} after training task ' \
                    + f'{evaluator.env.task_names[action]} (#{action}): {e}',
                    step = step,
                    task = action
                ) from e
            decision = Decision(
                self.current,
                source,
                eps,
                reward,
                score.value
            )

        self.rewards.Advance(evaluator, score, self.current)
        self.prev_state = state
        return decision

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['kind', 'current', 'step']
        return [
            'kind', 'current', 'step', 'train_steps', 'last_loss', 'config',
            'buffer'
        ]

    # ============================
    # Method - Selection Network
    def _SelectionNet(self) -> MlpParams:
        ''' Network used for greedy choices. '''
        net = self.online if self.config.select_with_online else self.target
        assert net is not None
        return net

    # =====================
    # Method - Train Agent
    def _Train(self, step: int, rng: np.random.Generator) -> None:
        '''
        Train Agent
        -
        Runs the configured number of training steps, each followed by one
        soft update. Skipped while the replay gate is closed.

        Parameters
        -
        - step : `int`
            - Step of the decision (for diagnostics).
        - rng : `Generator`
            - Random generator (used for minibatch sampling).

        Returns
        -
        None
        '''

        if not self.buffer.ready:
            if not self._warned_gate:
                logger.warning(
                    f'step {step}: DQN training skipped until the replay ' \
                    + f'memory holds {self.buffer.min_capacity} transitions'
                )
                self._warned_gate = True
            return
        if self.train_steps == 0:
            logger.debug(f'step {step}: replay gate open, training starts')

        assert self.online is not None and self.target is not None \
            and self.opt_state is not None
        for _ in range(self.config.train_steps_per_decision):
            batch = sample_minibatch(
                self.buffer,
                self.config.minibatch_size,
                rng
            )
            self.online, self.opt_state, self.last_loss = dqn_train_step(
                self.online,
                self.target,
                batch,
                self.config,
                self.opt_state
            )
            self.target = soft_update(self.online, self.target, self.config.tau)
            self.train_steps += 1

    # =======================
    # Method - Warm-up Action
    def _WarmupAction(self, rng: np.random.Generator) -> TaskId:
        ''' Uniform draw from the warm-up pool. '''
        return int(self.warmup_tasks[rng.integers(len(self.warmup_tasks))])


# =============================================================================
# End of File
# =============================================================================
