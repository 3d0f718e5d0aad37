# =============================================================================
# RL Curriculum Scheduler - Neural Network
# =============================================================================
'''
RL Curriculum Scheduler - Neural Network
-
Contains the feed-forward network behind the Q network: tanh hidden layers,
an identity output layer, backpropagation, the Huber loss and the RMSProp
optimizer. All arithmetic is 64-bit floating point.

Weights follow the `W.x + b` convention, so the weight of layer `l` has shape
`(fan_out, fan_in)`.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# custom errors
from .errors import (
    DimensionError, # shape mismatch
    ReadError, # invalid serialized parameters
)

# generic objects
from .generic_objects import (
    OBJ, # base object model
    VerbosityLevel, # verbosity levels
)

# used for all of the arithmetic
import numpy as np

# used for type hinting
from typing import (
    Any, # any type
    Callable, # functions
    Dict, # dictionary data type
    List, # list data type
    Sequence, # read-only sequences
    Tuple, # tuple data type
    Union, # multiple types
)


# =============================================================================
# Constants
# =============================================================================
PARAMS_FORMAT_VERSION: int = 1
''' Version of the serialized `MlpParams` format. '''
RMSPROP_RHO: float = 0.99
''' Default decay of the RMSProp running average of squared gradients. '''
RMSPROP_STABILIZER: float = 1e-8
''' Default constant added to the running average before the square root. '''


# =============================================================================
# Multi-Layer Perceptron Parameters
# =============================================================================
class MlpParams(OBJ):
    '''
    Multi-Layer Perceptron Parameters
    -
    Weights and biases of a `D -> h1 -> ... -> K` network. Also used to hold
    gradients and optimizer statistics, which share the same shapes.

    Fields
    -
    - _weights : `List<ndarray>`
    - _biases : `List<ndarray>`
    - biases : `List<ndarray>` << readonly >>
    - input_dim : `int` << readonly >>
    - output_dim : `int` << readonly >>
    - sizes : `List<int>` << readonly >>
    - weights : `List<ndarray>` << readonly >>

    Methods
    -
    - MlpParams(weights, biases) << constructor >>
    - Arrays() : `List<ndarray>`
    - Duplicate() : `MlpParams` << override >>
    - FromDict(data) : `MlpParams` << class >>
    - GetData(lvl : `VerbosityLevel`) : `List<str>` << override >>
    - Map(fn, *others) : `MlpParams`
    - ToDict() : `dict`
    - Zeros(sizes) : `MlpParams` << static >>
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            weights: Sequence[np.ndarray],
            biases: Sequence[np.ndarray]
    ) -> None:
        '''
        Multi-Layer Perceptron Parameters Constructor
        -
        Creates a new `MlpParams` object, validating that the layer shapes
        chain together.

        Parameters
        -
        - weights : `Sequence<ndarray>`
            - One `(fan_out, fan_in)` matrix per layer.
        - biases : `Sequence<ndarray>`
            - One `(fan_out,)` vector per layer.

        Returns
        -
        None
        '''

        # validate the layer count
        if len(weights) < 1 or len(weights) != len(biases):
            raise DimensionError(
                f'MlpParams expected 1+ layers with one bias each, got ' \
                + f'{len(weights)} weights and {len(biases)} biases'
            )

        # validate that each layer feeds the next one
        for i, (w, b) in enumerate(zip(weights, biases)):
            if w.ndim != 2 or b.shape != (w.shape[0],):
                raise DimensionError(
                    f'Layer {i} has weight shape {w.shape} and bias shape ' \
                    + f'{b.shape}'
                )
            if i > 0 and w.shape[1] != weights[i - 1].shape[0]:
                raise DimensionError(
                    f'Layer {i} expects {w.shape[1]} inputs but layer ' \
                    + f'{i - 1} has {weights[i - 1].shape[0]} outputs'
                )

        # set fields
        self._weights: List[np.ndarray] = [
            np.asarray(w, dtype = np.float64) for w in weights
        ]
        ''' One `(fan_out, fan_in)` matrix per layer. '''
        self._biases: List[np.ndarray] = [
            np.asarray(b, dtype = np.float64) for b in biases
        ]
        ''' One `(fan_out,)` vector per layer. '''

    # ==================
    # Property - Weights
    @property
    def weights(self) -> List[np.ndarray]:
        ''' One `(fan_out, fan_in)` matrix per layer. '''
        return self._weights

    # =================
    # Property - Biases
    @property
    def biases(self) -> List[np.ndarray]:
        ''' One `(fan_out,)` vector per layer. '''
        return self._biases

    # ================
    # Property - Sizes
    @property
    def sizes(self) -> List[int]:
        ''' Layer widths, from the input to the output layer. '''
        return [self._weights[0].shape[1]] \
            + [w.shape[0] for w in self._weights]

    # ==========================
    # Property - Input Dimension
    @property
    def input_dim(self) -> int:
        ''' Width of the input layer. '''
        return self._weights[0].shape[1]

    # ===========================
    # Property - Output Dimension
    @property
    def output_dim(self) -> int:
        ''' Width of the output layer. '''
        return self._weights[-1].shape[0]

    # ===================
    # Method - All Arrays
    def Arrays(self) -> List[np.ndarray]:
        ''' All weight and bias arrays, layer by layer. '''
        arrays: List[np.ndarray] = []
        for w, b in zip(self._weights, self._biases):
            arrays.extend([w, b])
        return arrays

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'MlpParams':
        return MlpParams(
            weights = [w.copy() for w in self._weights],
            biases = [b.copy() for b in self._biases]
        )

    # ===============================
    # Method - Create from Dictionary
    @classmethod
    def FromDict(cls, data: Dict[str, Any]) -> 'MlpParams':
        '''
        Create from Dictionary
        -
        Creates a new `MlpParams` object from the dictionary produced by
        `ToDict`.

        Parameters
        -
        - data : `dict`
            - Serialized parameters, including the layer-shape header.

        Returns
        -
        - `MlpParams`
            - Parameters read from the dictionary.
        '''

        # validate the header
        version = data.get('format_version', None)
        if version != PARAMS_FORMAT_VERSION:
            raise ReadError(
                f'MlpParams format version {version!r} is not supported ' \
                + f'(expected {PARAMS_FORMAT_VERSION})'
            )
        shapes = data.get('layer_shapes', None)
        if not isinstance(shapes, list) or len(shapes) < 1:
            raise ReadError('MlpParams is missing its layer shapes')

        # read the layers, checking each against the header
        weights: List[np.ndarray] = []
        biases: List[np.ndarray] = []
        try:
            for i, shape in enumerate(shapes):
                w = np.array(data['weights'][i], dtype = np.float64)
                b = np.array(data['biases'][i], dtype = np.float64)
                if w.shape != tuple(shape) or b.shape != (shape[0],):
                    raise ReadError(
                        f'Layer {i} has shape {w.shape}, header says ' \
                        + f'{tuple(shape)}'
                    )
                weights.append(w)
                biases.append(b)
        except (KeyError, IndexError, TypeError, ValueError) as e:
            raise ReadError(f'MlpParams could not be read: {e!r}')
        return cls(weights = weights, biases = biases)

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['sizes']
        elif lvl == VerbosityLevel.LONG:
            return ['sizes', 'weights', 'biases']
        else:
            return ['sizes', '_weights', '_biases']

    # ==============================
    # Method - Element-wise Combine
    def Map(
            self,
            fn: Callable[..., np.ndarray],
            *others: 'MlpParams'
    ) -> 'MlpParams':
        '''
        Element-wise Combine
        -
        Applies `fn` array by array to this object and to `others` (which
        must have the same shapes), and returns the results as new parameters.

        Parameters
        -
        - fn : `Callable`
            - Function taking one array from each object.
        - *others : `MlpParams`
            - Parameters with the same shapes as this object.

        Returns
        -
        - `MlpParams`
            - The combined parameters.
        '''

        # validate shapes
        for other in others:
            if other.sizes != self.sizes:
                raise DimensionError(
                    f'Parameter shapes differ: {self.sizes} vs {other.sizes}'
                )

        return MlpParams(
            weights = [
                fn(w, *[o.weights[i] for o in others])
                for i, w in enumerate(self._weights)
            ],
            biases = [
                fn(b, *[o.biases[i] for o in others])
                for i, b in enumerate(self._biases)
            ]
        )

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self) -> Dict[str, Any]:
        ''' Serializes the parameters with a layer-shape header. '''
        return {
            'format_version': PARAMS_FORMAT_VERSION,
            'layer_shapes': [list(w.shape) for w in self._weights],
            'weights': [w.tolist() for w in self._weights],
            'biases': [b.tolist() for b in self._biases],
        }

    # ====================
    # Method - Zero Params
    @staticmethod
    def Zeros(sizes: Sequence[int]) -> 'MlpParams':
        ''' All-zero parameters for the given layer widths. '''
        if len(sizes) < 2:
            raise DimensionError(f'Need 2+ layer sizes, got {list(sizes)}')
        return MlpParams(
            weights = [
                np.zeros((sizes[i + 1], sizes[i]))
                for i in range(len(sizes) - 1)
            ],
            biases = [np.zeros(sizes[i + 1]) for i in range(len(sizes) - 1)]
        )


# =============================================================================
# Forward Pass Cache
# =============================================================================
class ForwardCache(OBJ):
    '''
    Forward Pass Cache
    -
    Activations recorded by `forward`, needed by `backward`.

    Fields
    -
    - layer_inputs : `List<ndarray>` (input of each layer, `(B, fan_in)`)
    - sizes : `List<int>` (layer widths of the params that produced it)
    - squeezed : `bool` (the input was a single vector)
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            layer_inputs: List[np.ndarray],
            sizes: List[int],
            squeezed: bool
    ) -> None:
        self.layer_inputs = layer_inputs
        ''' Input of each layer; entries after the first are tanh
            activations. '''
        self.sizes = sizes
        ''' Layer widths of the params that produced this cache. '''
        self.squeezed = squeezed
        ''' Whether the input was a single vector instead of a batch. '''

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'ForwardCache':
        return ForwardCache(
            layer_inputs = [a.copy() for a in self.layer_inputs],
            sizes = list(self.sizes),
            squeezed = self.squeezed
        )

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['sizes', 'squeezed']
        return ['sizes', 'squeezed', 'layer_inputs']


# =============================================================================
# RMSProp Optimizer State
# =============================================================================
class RmsPropState(OBJ):
    '''
    RMSProp Optimizer State
    -
    Running average of squared gradients per parameter.

    Fields
    -
    - square_avg : `MlpParams` (same shapes as the optimized parameters)
    - rho : `float`
    - stabilizer : `float`
    '''

    # ====================
    # Method - Constructor
    def __init__(
            self,
            square_avg: MlpParams,
            rho: float = RMSPROP_RHO,
            stabilizer: float = RMSPROP_STABILIZER
    ) -> None:
        if not 0.0 <= rho < 1.0:
            raise ValueError(f'RMSProp decay `rho` must be in [0, 1), got {rho}')
        if stabilizer <= 0.0:
            raise ValueError(
                f'RMSProp stabilizer must be positive, got {stabilizer}'
            )
        self.square_avg = square_avg
        ''' Running average of squared gradients (nonnegative). '''
        self.rho = rho
        ''' Decay of the running average. '''
        self.stabilizer = stabilizer
        ''' Constant added before the square root. '''

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'RmsPropState':
        return RmsPropState(
            square_avg = self.square_avg.Duplicate(),
            rho = self.rho,
            stabilizer = self.stabilizer
        )

    # ===============================
    # Method - Create from Dictionary
    @classmethod
    def FromDict(cls, data: Dict[str, Any]) -> 'RmsPropState':
        ''' Reads the state written by `ToDict`. '''
        try:
            return cls(
                square_avg = MlpParams.FromDict(data['square_avg']),
                rho = float(data['rho']),
                stabilizer = float(data['stabilizer'])
            )
        except KeyError as e:
            raise ReadError(f'RmsPropState is missing {e}')

    # =================
    # Method - Get Data
    def GetData(self, lvl: VerbosityLevel) -> List[str]:
        if lvl == VerbosityLevel.SHORT:
            return ['rho', 'stabilizer']
        return ['rho', 'stabilizer', 'square_avg']

    # =============================
    # Method - Convert to Dictionary
    def ToDict(self) -> Dict[str, Any]:
        return {
            'rho': self.rho,
            'stabilizer': self.stabilizer,
            'square_avg': self.square_avg.ToDict(),
        }

    # =================
    # Method - Fresh State
    @classmethod
    def Zeros(
            cls,
            params: MlpParams,
            rho: float = RMSPROP_RHO,
            stabilizer: float = RMSPROP_STABILIZER
    ) -> 'RmsPropState':
        ''' A fresh state (all averages zero) for the given parameters. '''
        return cls(MlpParams.Zeros(params.sizes), rho, stabilizer)


# =============================================================================
# Parameter Initialization
# =============================================================================
def init_params(sizes: Sequence[int], rng: np.random.Generator) -> MlpParams:
    '''
    Parameter Initialization
    -
    Draws every weight and bias uniformly in `[-1/sqrt(fan_in),
    +1/sqrt(fan_in)]`, layer by layer (weights before biases).

    Parameters
    -
    - sizes : `Sequence<int>`
        - Layer widths, from the input to the output layer.
    - rng : `Generator`
        - Random generator.

    Returns
    -
    - `MlpParams`
        - The initialized parameters.
    '''

    if len(sizes) < 2 or any(int(s) < 1 for s in sizes):
        raise DimensionError(f'Invalid layer sizes {list(sizes)}')

    weights: List[np.ndarray] = []
    biases: List[np.ndarray] = []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size = (fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, size = fan_out))
    return MlpParams(weights = weights, biases = biases)


# =============================================================================
# Forward Pass
# =============================================================================
def forward(
        params: MlpParams,
        x: np.ndarray
) -> Tuple[np.ndarray, ForwardCache]:
    '''
    Forward Pass
    -
    Computes `W_L.tanh(... tanh(W_1.x + b_1) ...) + b_L` for a single input
    vector `(D,)` or for a batch `(B, D)`.

    Parameters
    -
    - params : `MlpParams`
        - Network parameters.
    - x : `ndarray`
        - Input vector or batch of input vectors.

    Returns
    -
    - `Tuple<ndarray, ForwardCache>`
        - Outputs (`(K,)` or `(B, K)`) and the activations for `backward`.
    '''

    # normalize the input to a batch
    x = np.asarray(x, dtype = np.float64)
    squeezed = x.ndim == 1
    h = x[None, :] if squeezed else x
    if h.ndim != 2 or h.shape[1] != params.input_dim:
        raise DimensionError(
            f'Network expects inputs of size {params.input_dim}, got shape ' \
            + f'{x.shape}'
        )

    # run through the layers
    layer_inputs: List[np.ndarray] = []
    last = len(params.weights) - 1
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        layer_inputs.append(h)
        z = h @ w.T + b
        h = z if i == last else np.tanh(z)

    out = h[0] if squeezed else h
    return out, ForwardCache(layer_inputs, params.sizes, squeezed)


# =============================================================================
# Huber Loss
# =============================================================================
def huber(
        error: Union[float, np.ndarray],
        delta: float = 1.0
) -> Tuple[Any, Any]:
    '''
    Huber Loss
    -
    `0.5.e^2` when `|e| <= delta`, otherwise `delta.(|e| - 0.5.delta)`.

    Parameters
    -
    - error : `float | ndarray`
        - Prediction minus target.
    - delta : `float`
        - Threshold between the quadratic and linear branches.

    Returns
    -
    - `Tuple`
        - Loss value(s) and derivative(s) (the error clipped to
            `[-delta, delta]`), with the same shape as `error`.
    '''

    if delta <= 0.0:
        raise ValueError(f'Huber threshold must be positive, got {delta}')

    e = np.asarray(error, dtype = np.float64)
    abs_e = np.abs(e)
    value = np.where(
        abs_e <= delta,
        0.5 * e * e,
        delta * (abs_e - 0.5 * delta)
    )
    derivative = np.clip(e, -delta, delta)
    if e.ndim == 0:
        return float(value), float(derivative)
    return value, derivative


# =============================================================================
# Backward Pass
# =============================================================================
def backward(
        params: MlpParams,
        cache: ForwardCache,
        grad_out: np.ndarray
) -> MlpParams:
    '''
    Backward Pass
    -
    Backpropagates the gradient of a scalar loss with respect to the network
    outputs into gradients for every weight and bias. Batch gradients are
    summed.

    Parameters
    -
    - params : `MlpParams`
        - Parameters used by the forward pass.
    - cache : `ForwardCache`
        - Activations returned by that forward pass.
    - grad_out : `ndarray`
        - `dLoss/dOutput`, shaped like the forward output.

    Returns
    -
    - `MlpParams`
        - Gradients, with the same shapes as `params`.
    '''

    # validate the cache and the output gradient
    if cache.sizes != params.sizes:
        raise DimensionError(
            f'Cache was built for sizes {cache.sizes}, params have ' \
            + f'{params.sizes}'
        )
    g = np.asarray(grad_out, dtype = np.float64)
    if cache.squeezed: g = g[None, :]
    batch = cache.layer_inputs[0].shape[0]
    if g.shape != (batch, params.output_dim):
        raise DimensionError(
            f'Output gradient has shape {np.shape(grad_out)}, expected ' \
            + f'{(batch, params.output_dim)}'
        )

    # walk back through the layers
    n_layers = len(params.weights)
    grad_w: List[np.ndarray] = [np.empty(0)] * n_layers
    grad_b: List[np.ndarray] = [np.empty(0)] * n_layers
    for i in range(n_layers - 1, -1, -1):
        h = cache.layer_inputs[i]
        grad_w[i] = g.T @ h
        grad_b[i] = g.sum(axis = 0)
        if i > 0:
            # h is tanh of the previous layer's pre-activation
            g = (g @ params.weights[i]) * (1.0 - h * h)

    return MlpParams(weights = grad_w, biases = grad_b)


# =============================================================================
# RMSProp Step
# =============================================================================
def rmsprop_step(
        params: MlpParams,
        grads: MlpParams,
        state: RmsPropState,
        lr: float
) -> Tuple[MlpParams, RmsPropState]:
    '''
    RMSProp Step
    -
    `v <- rho.v + (1 - rho).g^2` then `p <- p - lr.g / sqrt(v + stabilizer)`,
    element-wise. Inputs are not modified.

    Parameters
    -
    - params : `MlpParams`
        - Current parameters.
    - grads : `MlpParams`
        - Gradients of the loss.
    - state : `RmsPropState`
        - Current optimizer state.
    - lr : `float`
        - Learning rate.

    Returns
    -
    - `Tuple<MlpParams, RmsPropState>`
        - Updated parameters and optimizer state.
    '''

    rho = state.rho
    square_avg = state.square_avg.Map(
        lambda v, g: rho * v + (1.0 - rho) * g * g,
        grads
    )
    stabilizer = state.stabilizer
    new_params = params.Map(
        lambda p, g, v: p - lr * g / np.sqrt(v + stabilizer),
        grads,
        square_avg
    )
    return new_params, RmsPropState(square_avg, rho, stabilizer)


# =============================================================================
# Softmax
# =============================================================================
def softmax(x: np.ndarray) -> np.ndarray:
    ''' Softmax over the last axis (temperature 1). '''
    z = np.asarray(x, dtype = np.float64)
    z = z - np.max(z, axis = -1, keepdims = True)
    e = np.exp(z)
    return e / np.sum(e, axis = -1, keepdims = True)


# =============================================================================
# End of File
# =============================================================================
