"""Dense classifier whose hidden layers apply a learnable activation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import log_softmax, softmax

from evoact.config import Granularity, TrainSpec
from evoact.graph.graph import ActivationGraph
from evoact.trainer.activations import ActivationFunction, as_activation

# Weights ~ N(0, HE_GAIN / fan_in), biases start at zero.
HE_GAIN = 2.0


class LossResult(NamedTuple):
    """Loss, gradients in `Network.parameters()` order, and the batch logits."""

    loss: float
    grads: list[np.ndarray]
    logits: np.ndarray


@dataclass
class _LayerCache:
    inputs: np.ndarray
    d_dx: np.ndarray | None = None
    d_dparams: tuple[np.ndarray, ...] = ()


@dataclass
class Network:
    """Fully connected layers; every hidden layer is followed by `activation`.

    `act_params[l]` has shape (k, m): k activation parameters for hidden layer l,
    with m = 1 when parameters are shared by the layer and m = width otherwise.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    act_params: list[np.ndarray]
    activation: ActivationFunction
    granularity: Granularity = Granularity.PER_CHANNEL
    _caches: list[_LayerCache] = field(default_factory=list, repr=False)

    @property
    def hidden_layers(self) -> int:
        return len(self.act_params)

    @property
    def activation_param_count(self) -> int:
        return sum(p.size for p in self.act_params)

    def parameters(self) -> list[np.ndarray]:
        """Every trainable array; the optimizer updates them in place."""
        return [*self.weights, *self.biases, *self.act_params]

    def copy(self) -> Network:
        return Network(
            weights=[w.copy() for w in self.weights],
            biases=[b.copy() for b in self.biases],
            act_params=[p.copy() for p in self.act_params],
            activation=self.activation,
            granularity=self.granularity,
        )

    def forward(self, x: np.ndarray, keep: bool = False) -> np.ndarray:
        """Logits for a batch; `keep` stores what `backward` needs."""
        caches: list[_LayerCache] = []
        h = np.asarray(x, dtype=np.float64)
        with np.errstate(all="ignore"):
            for layer, params in enumerate(self.act_params):
                z = h @ self.weights[layer] + self.biases[layer]
                if keep:
                    result = self.activation.forward_backward(z, list(params))
                    caches.append(_LayerCache(h, result.d_dx, result.d_dparams))
                    h = result.value
                else:
                    h = self.activation.forward(z, list(params))
            caches.append(_LayerCache(h))
            logits = h @ self.weights[-1] + self.biases[-1]
        if keep:
            self._caches = caches
        return logits

    def predict(self, x: np.ndarray) -> np.ndarray:
        return np.argmax(self.forward(x), axis=1)

    def accuracy(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(np.mean(self.predict(x) == y))

    def loss_and_grads(self, x: np.ndarray, y: np.ndarray, l2: float = 0.0) -> LossResult:
        """Mean softmax cross-entropy plus 0.5 * l2 * sum of squared weights.

        Biases and activation parameters are not decayed.
        """
        logits = self.forward(x, keep=True)
        n = len(y)
        with np.errstate(all="ignore"):
            log_probs = log_softmax(logits, axis=1)
            loss = -float(np.mean(log_probs[np.arange(n), y]))
            loss += 0.5 * l2 * float(sum(np.sum(w * w) for w in self.weights))

            upstream = softmax(logits, axis=1)
            upstream[np.arange(n), y] -= 1.0
            upstream /= n

            d_weights: list[np.ndarray] = [np.empty(0)] * len(self.weights)
            d_biases: list[np.ndarray] = [np.empty(0)] * len(self.biases)
            d_act: list[np.ndarray] = [np.empty(0)] * len(self.act_params)

            last = len(self.weights) - 1
            d_weights[last] = self._caches[last].inputs.T @ upstream + l2 * self.weights[last]
            d_biases[last] = upstream.sum(axis=0)
            grad_h = upstream @ self.weights[last].T

            for layer in reversed(range(self.hidden_layers)):
                cache = self._caches[layer]
                d_act[layer] = self._reduce_param_grads(layer, grad_h, cache.d_dparams)
                grad_z = grad_h * cache.d_dx
                d_weights[layer] = cache.inputs.T @ grad_z + l2 * self.weights[layer]
                d_biases[layer] = grad_z.sum(axis=0)
                grad_h = grad_z @ self.weights[layer].T

        return LossResult(loss, [*d_weights, *d_biases, *d_act], logits)

    def _reduce_param_grads(self, layer: int, grad_h: np.ndarray, partials: tuple[np.ndarray, ...]) -> np.ndarray:
        shape = self.act_params[layer].shape
        grads = np.zeros(shape)
        for index, partial in enumerate(partials):
            per_unit = np.sum(grad_h * partial, axis=0)
            grads[index] = per_unit.sum(keepdims=True) if shape[1] == 1 else per_unit
        return grads

    def param_means(self) -> tuple[list[float], list[list[float]]]:
        """Mean of each parameter index over the network and within each hidden layer."""
        if not self.act_params or self.act_params[0].shape[0] == 0:
            return [], [[] for _ in self.act_params]
        overall = np.concatenate(self.act_params, axis=1).mean(axis=1)
        per_layer = [p.mean(axis=1).tolist() for p in self.act_params]
        return overall.tolist(), per_layer


def build_network(
    spec: TrainSpec,
    activation: ActivationFunction | ActivationGraph,
    rng: np.random.Generator,
    granularity: Granularity | None = None,
) -> Network:
    """Randomly initialized network for `spec` using `activation` after every hidden layer.

    Args:
        spec: Layer widths and default granularity.
        activation: An ActivationFunction or a graph (at most three parameters).
        rng: Source for weight initialization; activation parameters use none of it.
        granularity: Overrides the activation's own granularity and `spec.granularity`.

    Returns:
        A Network whose activation parameters hold the activation's initial values.
    """
    activation = as_activation(activation)
    granularity = Granularity(granularity or activation.granularity or spec.granularity)
    widths = spec.layer_widths
    weights, biases, act_params = [], [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        weights.append(rng.normal(0.0, np.sqrt(HE_GAIN / fan_in), size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))

    initial = np.asarray(activation.initial_params(), dtype=np.float64).reshape(-1, 1)
    for width in spec.hidden_widths:
        units = 1 if granularity is Granularity.PER_LAYER else width
        act_params.append(np.repeat(initial, units, axis=1))

    return Network(weights, biases, act_params, activation, granularity)
