import numpy as np
import pytest
from sklearn.base import clone

from qwnn.estimators import GraphClassifier, GraphRegressor, QuantumWalkDiffusion, QuantumWalkNodeRegressor
from qwnn.exceptions import ConfigError, DataError
from qwnn.graph import build_graph, build_shift, cycle_graph
from qwnn.samples import GraphSample
from qwnn.walk import CoinSet, diffusion_matrix, init_uniform_superposition, walk

C8 = cycle_graph(8)


def shift_data(n=32, seed=0):
    x = np.random.default_rng(seed).normal(size=(n, 8))
    return x, np.roll(x, -1, axis=1)


def ring_path_samples(n=24, seed=0):
    rng = np.random.default_rng(seed)
    out, y = [], []
    for i in range(n):
        k = int(rng.integers(5, 8))
        g = cycle_graph(k) if i % 2 else build_graph([(v, v + 1) for v in range(k - 1)], k)
        out.append(GraphSample(g, np.eye(3)[np.minimum(g.degrees, 2)], None))
        y.append("ring" if i % 2 else "path")
    return out, y


def test_get_params_sees_shared_settings():
    est = QuantumWalkNodeRegressor(C8, steps=2, learning_rate=0.1)
    params = est.get_params()
    assert params["steps"] == 2 and params["learning_rate"] == 0.1 and params["loss"] == "mse"
    assert "graph" in params and "coin_noise" in params
    c = clone(GraphClassifier(steps=3, readout="sum", learning_rate=0.01))
    assert c.steps == 3 and c.readout == "sum"
    est.set_params(steps=4)
    assert est.steps == 4


def test_missing_learning_rate_is_config_error():
    x, y = shift_data()
    with pytest.raises(ConfigError, match="learning_rate"):
        QuantumWalkNodeRegressor(C8, steps=1).fit(x, y)
    with pytest.raises(ConfigError, match="steps"):
        QuantumWalkNodeRegressor(C8, learning_rate=0.1).fit(x, y)


def test_node_regressor_learns_one_hop_shift():
    x, y = shift_data()
    est = QuantumWalkNodeRegressor(C8, steps=1, coin_placement="spatial", coin_mode="unconstrained",
                                   learn_amplitudes=True, learning_rate=0.01, epochs=100, batch_size=8, patience=None)
    est.fit(x[:24], y[:24])
    assert est.predict(x[24:]).shape == (8, 8)
    assert est.score(x[24:], y[24:]) > 0.99
    assert est.log_.final["train_loss"] < 0.01 * est.log_.rows[0]["train_loss"]


def test_node_regressor_rejects_bad_shapes():
    est = QuantumWalkNodeRegressor(C8, steps=1, learning_rate=0.1)
    with pytest.raises(DataError, match="nodes"):
        est.fit(np.zeros((4, 7)), np.zeros((4, 7)))
    with pytest.raises(DataError, match="NaN"):
        est.fit(np.full((4, 8), np.nan), np.zeros((4, 8)))


def test_graph_classifier_rings_and_paths():
    samples, y = ring_path_samples()
    clf = GraphClassifier(steps=2, coin_mode="unitary-parametrized", hidden=(6,), learning_rate=0.05, epochs=40)
    clf.fit(samples[:18], y[:18])
    assert list(clf.classes_) == ["path", "ring"]
    proba = clf.predict_proba(samples[18:])
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)
    assert clf.score(samples[18:], y[18:]) == 1.0


def test_graph_level_rejects_per_node_parameters():
    samples, y = ring_path_samples(4)
    with pytest.raises(ConfigError, match="coin_placement"):
        GraphClassifier(steps=1, coin_placement="spatial", learning_rate=0.1).fit(samples, y)
    with pytest.raises(ConfigError, match="learn_amplitudes"):
        GraphRegressor(steps=1, learn_amplitudes=True, learning_rate=0.1).fit(samples, [0.0] * 4)


def test_graph_regressor_scaled_sigmoid_stays_in_range():
    samples, _ = ring_path_samples(12)
    y = [float(s.n_nodes) for s in samples]
    reg = GraphRegressor(steps=1, readout="sum", output_activation="scaled-sigmoid", learning_rate=0.05, epochs=10)
    reg.fit(samples, y)
    pred = reg.predict(samples)
    assert pred.shape == (12,)
    assert np.all((pred >= min(y)) & (pred <= max(y)))


@pytest.mark.parametrize("layer", ["dcnn", "gcnn"])
def test_baseline_layers_through_estimator(layer):
    x, y = shift_data(16)
    est = QuantumWalkNodeRegressor(C8, layer=layer, hops=2, learning_rate=0.01, epochs=3)
    est.fit(x, y)
    assert est.predict(x).shape == x.shape


def test_diffusion_transform_is_p_times_x():
    tr = QuantumWalkDiffusion(C8, steps=3).fit()
    s = walk(init_uniform_superposition(C8), CoinSet.grover(C8, "temporal", 3), build_shift(C8), 3)
    np.testing.assert_allclose(tr.diffusion_, diffusion_matrix(s), atol=1e-14)
    x = np.random.default_rng(0).normal(size=(5, 8))
    np.testing.assert_allclose(tr.transform(x), x @ tr.diffusion_.T, atol=1e-13)
    with pytest.raises(ConfigError):
        QuantumWalkDiffusion(C8).fit()
