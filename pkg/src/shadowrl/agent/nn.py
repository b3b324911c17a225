"""Minimal feed-forward network core on numpy.

Provides a fully connected network with rectified-linear hidden layers,
exact backpropagation, an Adam optimizer, soft target updates and a
versioned checkpoint format. All math is float64.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from shadowrl.errors import ShadowRLError

logger = logging.getLogger(__name__)

OUTPUT_ACTIVATIONS = ("identity", "tanh")

CHECKPOINT_FORMAT_VERSION = 1


class ShapeMismatchError(ShadowRLError, ValueError):
    """Raised when array shapes or network architectures do not line up."""
    pass


class CheckpointError(ShadowRLError):
    """Raised when a checkpoint cannot be read."""
    pass


@dataclass
class ForwardCache:
    """Intermediates of a forward pass, consumed by `MlpNet.backward`.

    `activations[i]` is the input to layer i; `pre_activations[i]` is that
    layer's affine output.
    """
    activations: List[np.ndarray]
    pre_activations: List[np.ndarray]
    output: np.ndarray
    batched: bool


@dataclass
class Gradients:
    """Parameter and input gradients, summed over the batch."""
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    input: np.ndarray

    def as_list(self) -> List[np.ndarray]:
        """Gradients in the same order as `MlpNet.parameters()`."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out


class MlpNet:
    """Fully connected network with ReLU hidden layers.

    Args:
        layer_sizes: Widths from input to output, at least two entries.
        output_activation: "identity" or "tanh".
        rng: Generator for the uniform(+-1/sqrt(fan_in)) initialization.
            Parameters start at zero when None.

    Example:
        >>> net = MlpNet([8, 256, 256, 2], "tanh", rng=np.random.default_rng(0))
        >>> net.forward(np.zeros(8)).shape
        (2,)
    """

    def __init__(
        self,
        layer_sizes: Sequence[int],
        output_activation: str = "identity",
        rng: Optional[np.random.Generator] = None,
    ):
        if len(layer_sizes) < 2:
            raise ValueError("layer_sizes needs at least an input and an output width")
        if any(int(n) < 1 for n in layer_sizes):
            raise ValueError(f"layer widths must be positive, got {list(layer_sizes)}")
        if output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"output_activation must be one of {OUTPUT_ACTIVATIONS}")

        self.layer_sizes = tuple(int(n) for n in layer_sizes)
        self.output_activation = output_activation
        self.weights: List[np.ndarray] = []
        self.biases: List[np.ndarray] = []

        for n_in, n_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]):
            if rng is None:
                self.weights.append(np.zeros((n_in, n_out)))
                self.biases.append(np.zeros(n_out))
            else:
                bound = 1.0 / np.sqrt(n_in)
                self.weights.append(rng.uniform(-bound, bound, size=(n_in, n_out)))
                self.biases.append(rng.uniform(-bound, bound, size=n_out))

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    @property
    def architecture(self) -> Tuple[Tuple[int, ...], str]:
        return self.layer_sizes, self.output_activation

    @property
    def num_parameters(self) -> int:
        return sum((n_in + 1) * n_out for n_in, n_out in zip(self.layer_sizes[:-1], self.layer_sizes[1:]))

    def parameters(self) -> List[np.ndarray]:
        """Live parameter arrays, ordered W0, b0, W1, b1, ..."""
        out = []
        for w, b in zip(self.weights, self.biases):
            out.extend([w, b])
        return out

    def copy(self) -> "MlpNet":
        clone = MlpNet(self.layer_sizes, self.output_activation)
        clone.weights = [w.copy() for w in self.weights]
        clone.biases = [b.copy() for b in self.biases]
        return clone

    def _as_batch(self, x) -> Tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=np.float64)
        batched = x.ndim == 2
        if x.ndim == 1:
            x = x[np.newaxis, :]
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise ShapeMismatchError(
                f"Expected input of width {self.input_dim}, got shape {np.shape(x)}"
            )
        return x, batched

    def forward_cached(self, x) -> Tuple[np.ndarray, ForwardCache]:
        """Forward pass that also returns the intermediates for backprop."""
        a, batched = self._as_batch(x)
        activations, pre_activations = [], []
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            activations.append(a)
            z = a @ w + b
            pre_activations.append(z)
            if i < last:
                a = np.maximum(z, 0.0)
            elif self.output_activation == "tanh":
                a = np.tanh(z)
            else:
                a = z
        output = a if batched else a[0]
        return output, ForwardCache(activations, pre_activations, a, batched)

    def forward(self, x) -> np.ndarray:
        """Deterministic forward pass for a vector or a (batch, width) array."""
        output, _ = self.forward_cached(x)
        return output

    def backward(self, x_or_cache: Union[np.ndarray, ForwardCache], output_gradient) -> Gradients:
        """Exact gradients of sum(output * output_gradient).

        Accepts either the raw input (the forward pass is recomputed) or the
        cache returned by `forward_cached`.
        """
        if isinstance(x_or_cache, ForwardCache):
            cache = x_or_cache
        else:
            _, cache = self.forward_cached(x_or_cache)

        g = np.asarray(output_gradient, dtype=np.float64)
        if g.ndim == 1 and not cache.batched:
            g = g[np.newaxis, :]
        if g.shape != cache.output.shape:
            raise ShapeMismatchError(
                f"Output gradient shape {np.shape(output_gradient)} does not match "
                f"output width {self.output_dim}"
            )

        if self.output_activation == "tanh":
            g = g * (1.0 - cache.output ** 2)

        n_layers = len(self.weights)
        grad_w: List[np.ndarray] = [None] * n_layers
        grad_b: List[np.ndarray] = [None] * n_layers
        for i in range(n_layers - 1, -1, -1):
            grad_w[i] = cache.activations[i].T @ g
            grad_b[i] = g.sum(axis=0)
            g = g @ self.weights[i].T
            if i > 0:
                g = g * (cache.pre_activations[i - 1] > 0.0)

        grad_input = g if cache.batched else g[0]
        return Gradients(grad_w, grad_b, grad_input)

    def to_arrays(self, prefix: str) -> Dict[str, np.ndarray]:
        """Flatten into named arrays for `save_checkpoint`."""
        arrays = {
            f"{prefix}.layer_sizes": np.array(self.layer_sizes, dtype=np.int64),
            f"{prefix}.output_activation": np.array(self.output_activation),
        }
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            arrays[f"{prefix}.W{i}"] = w
            arrays[f"{prefix}.b{i}"] = b
        return arrays

    @classmethod
    def from_arrays(cls, prefix: str, arrays) -> "MlpNet":
        try:
            sizes = [int(n) for n in arrays[f"{prefix}.layer_sizes"]]
            activation = str(arrays[f"{prefix}.output_activation"])
            net = cls(sizes, activation)
            for i in range(len(sizes) - 1):
                w = np.array(arrays[f"{prefix}.W{i}"], dtype=np.float64)
                b = np.array(arrays[f"{prefix}.b{i}"], dtype=np.float64)
                if w.shape != net.weights[i].shape or b.shape != net.biases[i].shape:
                    raise CheckpointError(f"Layer {i} of '{prefix}' has inconsistent shapes")
                net.weights[i] = w
                net.biases[i] = b
        except KeyError as e:
            raise CheckpointError(f"Checkpoint is missing array {e} for network '{prefix}'") from e
        return net


class AdamOptimizer:
    """Adaptive-moment optimizer with bias correction, updating arrays in place.

    Args:
        params: Arrays to optimize, e.g. `net.parameters()`.
        lr: Learning rate.
        beta1: First-moment decay rate.
        beta2: Second-moment decay rate.
        eps: Numerical stability constant.
    """

    def __init__(
        self,
        params: List[np.ndarray],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = params
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: List[np.ndarray]) -> None:
        """Apply one update given gradients in parameter order."""
        if len(grads) != len(self.params):
            raise ShapeMismatchError(f"Expected {len(self.params)} gradients, got {len(grads)}")
        for p, g in zip(self.params, grads):
            if np.shape(g) != p.shape:
                raise ShapeMismatchError(f"Gradient shape {np.shape(g)} does not match parameter {p.shape}")

        self.t += 1
        correction1 = 1.0 - self.beta1 ** self.t
        correction2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / correction1
            v_hat = v / correction2
            p -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


def soft_update(target: MlpNet, source: MlpNet, tau: float) -> None:
    """Move target parameters towards source: t <- tau*s + (1-tau)*t."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau}")
    if target.architecture != source.architecture:
        raise ShapeMismatchError(
            f"Cannot soft-update {target.architecture} from {source.architecture}"
        )
    for t, s in zip(target.parameters(), source.parameters()):
        t *= 1.0 - tau
        t += tau * s


def save_checkpoint(path: Path, networks: Dict[str, MlpNet], metadata: Optional[dict] = None) -> Path:
    """Write networks and a JSON metadata echo into one versioned .npz file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    arrays = {
        "format_version": np.array(CHECKPOINT_FORMAT_VERSION, dtype=np.int64),
        "networks": np.array(json.dumps(sorted(networks))),
        "metadata": np.array(json.dumps(metadata or {}, sort_keys=True)),
    }
    for name, net in networks.items():
        arrays.update(net.to_arrays(name))
    with open(path, "wb") as f:
        np.savez(f, **arrays)
    logger.info(f"Checkpoint written: {path}")
    return path


def load_checkpoint(path: Path) -> Tuple[Dict[str, MlpNet], dict]:
    """Read networks and metadata written by `save_checkpoint`.

    Raises:
        CheckpointError: If the file is missing, unreadable or of another version.
    """
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as data:
            version = int(data["format_version"])
            if version != CHECKPOINT_FORMAT_VERSION:
                raise CheckpointError(
                    f"Unsupported checkpoint version {version} in {path}"
                )
            names = json.loads(str(data["networks"]))
            metadata = json.loads(str(data["metadata"]))
            networks = {name: MlpNet.from_arrays(name, data) for name in names}
    except (OSError, KeyError, ValueError) as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e
    logger.debug(f"Checkpoint loaded: {path} ({', '.join(names)})")
    return networks, metadata
