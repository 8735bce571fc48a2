"""Tests for the dense network and its gradients."""

import numpy as np
import pytest

from evoact.config import Granularity, TrainSpec
from evoact.errors import GraphStructureError
from evoact.graph import OPERATORS, parse, strip_params
from evoact.trainer.network import build_network

from tests.conftest import random_graph

TINY = TrainSpec(layer_widths=[2, 4, 2])


def finite_difference_check(network, x, y, l2, rng, weight_samples=20, step=1e-6):
    """Compare analytic and central-difference gradients; returns worst relative error."""
    result = network.loss_and_grads(x, y, l2)
    params = network.parameters()
    coordinates = []
    weight_arrays = len(network.weights)
    for _ in range(weight_samples):
        layer = int(rng.integers(0, weight_arrays))
        index = tuple(int(rng.integers(0, n)) for n in params[layer].shape)
        coordinates.append((layer, index))
    for offset, act in enumerate(network.act_params):
        for index in np.ndindex(act.shape):
            coordinates.append((2 * weight_arrays + offset, index))

    worst = 0.0
    for array_index, index in coordinates:
        array = params[array_index]
        original = array[index]
        array[index] = original + step
        plus = network.loss_and_grads(x, y, l2).loss
        array[index] = original - step
        minus = network.loss_and_grads(x, y, l2).loss
        array[index] = original
        numeric = (plus - minus) / (2 * step)
        analytic = result.grads[array_index][index]
        error = abs(numeric - analytic) / max(abs(numeric), abs(analytic), 1e-3)
        worst = max(worst, error)
    return worst


class TestBuildNetwork:
    """Tests for build_network."""

    def test_per_layer_count(self) -> None:
        spec = TrainSpec(granularity=Granularity.PER_LAYER)
        network = build_network(spec, parse("p0(add(p1(x), p2(tanh(x))))"), np.random.default_rng(0))
        assert network.activation_param_count == 6
        assert [p.shape for p in network.act_params] == [(3, 1), (3, 1)]

    def test_per_neuron_count(self) -> None:
        spec = TrainSpec(granularity=Granularity.PER_NEURON)
        network = build_network(spec, parse("p0(tanh(p1(x)))"), np.random.default_rng(0))
        assert network.activation_param_count == 64

    def test_per_channel_matches_per_neuron(self) -> None:
        graph = parse("p0(tanh(x))")
        a = build_network(TrainSpec(granularity=Granularity.PER_CHANNEL), graph, np.random.default_rng(0))
        b = build_network(TrainSpec(granularity=Granularity.PER_NEURON), graph, np.random.default_rng(0))
        assert [p.shape for p in a.act_params] == [p.shape for p in b.act_params]

    def test_params_start_at_one(self) -> None:
        network = build_network(TrainSpec(), parse("p0(tanh(p1(x)))"), np.random.default_rng(0))
        assert all(np.all(p == 1.0) for p in network.act_params)
        assert all(np.all(b == 0.0) for b in network.biases)

    def test_fan_in_scaling(self) -> None:
        spec = TrainSpec(layer_widths=[400, 300, 2])
        network = build_network(spec, parse("relu(x)"), np.random.default_rng(0))
        assert network.weights[0].std() == pytest.approx(np.sqrt(2.0 / 400), rel=0.02)

    def test_rejects_four_params(self) -> None:
        graph = parse("p3(add(p0(x), p1(tanh(p2(x)))))", bounded=False)
        with pytest.raises(GraphStructureError):
            build_network(TrainSpec(), graph, np.random.default_rng(0))

    def test_parameterized_matches_stripped(self) -> None:
        graph = parse("p0(mul(swish(p1(x)), p2(erf(x))))")
        x = np.random.default_rng(1).normal(size=(10, 2))
        with_params = build_network(TrainSpec(), graph, np.random.default_rng(5))
        without = build_network(TrainSpec(), strip_params(graph), np.random.default_rng(5))
        assert np.array_equal(with_params.forward(x), without.forward(x))


class TestGradients:
    """Whole-network gradients against central differences."""

    @pytest.mark.parametrize(
        "text",
        ["p0(tanh(p1(x)))", "mul(log_sigmoid(p0(x)), p1(arcsinh(x)))", "p2(add(p0(swish(x)), p1(erf(x))))"],
    )
    @pytest.mark.parametrize("granularity", list(Granularity))
    def test_known_graphs(self, text: str, granularity: Granularity) -> None:
        rng = np.random.default_rng(3)
        spec = TINY.model_copy(update={"granularity": granularity})
        network = build_network(spec, parse(text), rng)
        for p in network.act_params:
            p += rng.uniform(-0.3, 0.3, size=p.shape)
        x = rng.normal(size=(8, 2))
        y = rng.integers(0, 2, size=8)
        assert finite_difference_check(network, x, y, 5e-4, rng) <= 1e-4

    def test_random_smooth_graphs(self, rng) -> None:
        checked = 0
        for _ in range(400):
            graph = random_graph(rng)
            if not all(OPERATORS[node.op].smooth for node in graph.nodes):
                continue
            network = build_network(TINY, graph, rng)
            for p in network.act_params:
                p += rng.uniform(-0.2, 0.2, size=p.shape)
            x = rng.normal(size=(6, 2))
            y = rng.integers(0, 2, size=6)
            result = network.loss_and_grads(x, y, 1e-3)
            if not np.isfinite(result.loss) or result.loss > 50:
                continue
            if not all(np.all(np.abs(g) < 1e3) for g in result.grads):
                continue
            assert finite_difference_check(network, x, y, 1e-3, rng) <= 1e-4, str(graph)
            checked += 1
        assert checked >= 20

    def test_l2_excludes_activation_params(self) -> None:
        rng = np.random.default_rng(0)
        network = build_network(TINY, parse("p0(tanh(x))"), rng)
        x = rng.normal(size=(4, 2))
        y = np.array([0, 1, 0, 1])
        plain = network.loss_and_grads(x, y, 0.0)
        decayed = network.loss_and_grads(x, y, 0.1)
        for a, b in zip(plain.grads[4:], decayed.grads[4:]):
            assert np.allclose(a, b)
        assert np.allclose(decayed.grads[0] - plain.grads[0], 0.1 * network.weights[0])


class TestParamMeans:
    """Tests for per-index parameter means."""

    def test_overall_and_per_layer(self) -> None:
        network = build_network(TINY.model_copy(update={"layer_widths": [2, 3, 2, 2]}), parse("p0(tanh(x))"), np.random.default_rng(0))
        network.act_params[0][:] = [[1.0, 2.0, 3.0]]
        network.act_params[1][:] = [[4.0, 6.0]]
        overall, per_layer = network.param_means()
        assert overall == [pytest.approx(16.0 / 5)]
        assert per_layer == [[2.0], [5.0]]

    def test_no_params(self) -> None:
        network = build_network(TINY, parse("relu(x)"), np.random.default_rng(0))
        assert network.param_means() == ([], [[]])
