"""
Unit tests for layer primitives, the optimizer and checkpoint files.
"""

import json

import numpy as np
import pytest

from stimuli.nn import Adam, BiLSTM, LSTM, Linear, Module, Parameter, Tensor, attention, attention_weights, dropout
from stimuli.nn.checkpoint import FORMAT_VERSION, decode_array, read_checkpoint, write_checkpoint
from stimuli.nn.layers import xavier_uniform


class _Pair(Module):
    def __init__(self, rng):
        self.first = Linear(3, 2, rng)
        self.stack = [Linear(2, 2, rng), Linear(2, 1, rng)]
        self.frozen = Parameter(np.zeros(2), "frozen", trainable=False)


@pytest.mark.unit
class TestModule:
    """Parameter discovery and state handling."""

    def test_named_parameters(self):
        names = [name for name, _ in _Pair(np.random.default_rng(0)).named_parameters()]
        assert names == ["first.W", "first.b", "stack.0.W", "stack.0.b", "stack.1.W", "stack.1.b", "frozen"]

    def test_trainable_filter(self):
        module = _Pair(np.random.default_rng(0))
        assert len(module.parameters()) == 6
        assert len(module.parameters(trainable_only=False)) == 7
        assert "frozen" not in module.state_dict()
        assert "frozen" in module.state_dict(trainable_only=False)

    def test_train_eval_propagates(self):
        module = _Pair(np.random.default_rng(0))
        module.eval()
        assert not module.training and not module.first.training and not module.stack[1].training
        module.train()
        assert module.stack[0].training

    def test_state_round_trip(self):
        source = _Pair(np.random.default_rng(0))
        target = _Pair(np.random.default_rng(1))
        target.load_state_dict(source.state_dict())
        for (_, a), (_, b) in zip(source.named_parameters(), target.named_parameters()):
            np.testing.assert_array_equal(a.data, b.data)

    def test_state_dict_is_a_copy(self):
        module = _Pair(np.random.default_rng(0))
        state = module.state_dict()
        state["first.b"][:] = 5.0
        assert not np.any(module.first.b.data == 5.0)

    def test_load_errors(self):
        module = _Pair(np.random.default_rng(0))
        state = module.state_dict()
        with pytest.raises(ValueError, match="missing"):
            module.load_state_dict({k: v for k, v in state.items() if k != "first.W"})
        with pytest.raises(ValueError, match="unexpected"):
            module.load_state_dict({**state, "extra": np.zeros(1)})
        with pytest.raises(ValueError, match="shape"):
            module.load_state_dict({**state, "first.b": np.zeros(5)})

    def test_xavier_bounds(self):
        values = xavier_uniform(np.random.default_rng(0), 10, 20)
        assert values.shape == (10, 20)
        assert np.abs(values).max() <= np.sqrt(6.0 / 30)

    def test_zero_grad(self):
        module = _Pair(np.random.default_rng(0))
        module.first(Tensor(np.ones(3))).sum().backward()
        assert module.first.W.grad is not None
        module.zero_grad()
        assert module.first.W.grad is None


@pytest.mark.unit
class TestRecurrent:
    """LSTM and BiLSTM."""

    def test_length_one_shape(self):
        out = BiLSTM(3, 5, np.random.default_rng(0))(Tensor(np.ones((1, 3))))
        assert out.shape == (1, 10)

    def test_output_length_matches_input(self):
        out = BiLSTM(3, 2, np.random.default_rng(0))(Tensor(np.ones((7, 3))))
        assert out.shape == (7, 4)

    def test_empty_sequence_rejected(self):
        with pytest.raises(ValueError):
            BiLSTM(3, 2, np.random.default_rng(0))(Tensor(np.zeros((0, 3))))

    def test_forget_bias(self):
        lstm = LSTM(3, 2, np.random.default_rng(0))
        np.testing.assert_array_equal(lstm.b.data, [0, 0, 1, 1, 0, 0, 0, 0])

    def test_tied_directions_mirror(self):
        rng = np.random.default_rng(0)
        bilstm = BiLSTM(3, 4, rng)
        bilstm.bwd.load_state_dict(bilstm.fwd.state_dict())
        x = rng.normal(size=(6, 3))
        out = bilstm(Tensor(x)).data
        mirrored = bilstm(Tensor(x[::-1])).data
        np.testing.assert_allclose(out[:, 4:], mirrored[::-1, :4], atol=1e-12)

    def test_zero_weights_stay_at_zero(self):
        bilstm = BiLSTM(3, 4, np.random.default_rng(0))
        for p in bilstm.parameters():
            p.data = np.zeros_like(p.data)
        out = bilstm(Tensor(np.random.default_rng(1).normal(size=(5, 3))))
        np.testing.assert_array_equal(out.data, np.zeros((5, 8)))

    def test_bilstm_gradient(self, grad_check):
        rng = np.random.default_rng(2)
        bilstm = BiLSTM(3, 2, rng)
        x = Tensor(rng.normal(size=(4, 3)), requires_grad=True)
        weights = Tensor(rng.normal(size=(4, 4)))
        assert grad_check(lambda: (bilstm(x) * weights).sum(), bilstm.parameters() + [x]) < 1e-4


@pytest.mark.unit
class TestAttention:
    """Dot-product self attention."""

    def test_single_position(self):
        h = Tensor(np.array([[0.3, -1.2]]))
        np.testing.assert_allclose(attention_weights(h).data, [[1.0]])
        np.testing.assert_allclose(attention(h).data, [[0.3, -1.2, 0.3, -1.2]])

    def test_identical_states_uniform(self):
        h = Tensor(np.tile([1.0, 2.0, 3.0], (4, 1)))
        np.testing.assert_allclose(attention_weights(h).data, np.full((4, 4), 0.25))

    def test_matches_direct_softmax(self):
        h = np.random.default_rng(0).normal(size=(4, 3))
        scores = h @ h.T
        expected = np.exp(scores - scores.max(axis=1, keepdims=True))
        expected /= expected.sum(axis=1, keepdims=True)
        np.testing.assert_allclose(attention_weights(Tensor(h)).data, expected)
        u = attention(Tensor(h)).data
        assert u.shape == (4, 6)
        np.testing.assert_allclose(u[:, :3], h)
        np.testing.assert_allclose(u[:, 3:], expected @ h)

    def test_rows_sum_to_one(self):
        h = Tensor(np.random.default_rng(1).normal(scale=3.0, size=(6, 5)))
        np.testing.assert_allclose(attention_weights(h).data.sum(axis=1), 1.0, atol=1e-9)

    def test_excluding_self(self):
        h = Tensor(np.random.default_rng(0).normal(size=(3, 2)))
        weights = attention_weights(h, include_self=False).data
        np.testing.assert_allclose(np.diag(weights), 0.0, atol=1e-12)
        single = attention_weights(Tensor(np.ones((1, 2))), include_self=False).data
        np.testing.assert_allclose(single, [[1.0]])

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            attention(Tensor(np.zeros((0, 2))))

    def test_gradient(self, grad_check):
        rng = np.random.default_rng(3)
        h = Tensor(rng.normal(size=(4, 3)), requires_grad=True)
        weights = Tensor(rng.normal(size=(4, 6)))
        assert grad_check(lambda: (attention(h) * weights).sum(), [h]) < 1e-4


@pytest.mark.unit
class TestDropout:
    """Inverted dropout."""

    def test_zero_probability_is_identity(self):
        x = Tensor(np.ones(5))
        assert dropout(x, 0.0, training=True, rng=0) is x

    def test_inference_is_identity(self):
        x = Tensor(np.ones(5))
        assert dropout(x, 0.5, training=False, rng=0) is x

    def test_rate_and_scaling(self):
        out = dropout(Tensor(np.ones(100_000)), 0.5, training=True, rng=np.random.default_rng(0)).data
        assert abs((out == 0).mean() - 0.5) < 0.01
        assert set(np.unique(out)) <= {0.0, 2.0}

    def test_seeded(self):
        x = Tensor(np.ones(50))
        np.testing.assert_array_equal(dropout(x, 0.3, True, 7).data, dropout(x, 0.3, True, 7).data)

    @pytest.mark.parametrize("p", [1.0, 1.5, -0.1])
    def test_invalid_probability(self, p):
        with pytest.raises(ValueError):
            dropout(Tensor(np.ones(3)), p, training=True)


@pytest.mark.unit
class TestAdam:
    """Bias-corrected Adam updates."""

    def test_zero_gradient_leaves_parameters(self):
        p = Parameter(np.array([1.0, -2.0]), "p")
        optimizer = Adam([p])
        p.grad = np.zeros(2)
        optimizer.step()
        np.testing.assert_array_equal(p.data, [1.0, -2.0])
        assert optimizer.step_count == 1

    def test_missing_gradient_counts_as_zero(self):
        p = Parameter(np.array([1.0]), "p")
        Adam([p]).step()
        np.testing.assert_array_equal(p.data, [1.0])

    def test_first_step_descends(self):
        p = Parameter(np.array([1.0]), "x")
        optimizer = Adam([p], lr=0.003)
        (p * p).sum().backward()
        optimizer.step()
        assert p.data[0] < 1.0
        assert p.data[0] == pytest.approx(1.0 - 0.003, abs=1e-6)

    def test_converges_on_quadratic(self):
        target = np.array([1.0, 0.5, -2.0])
        p = Parameter(np.array([3.0, -2.0, 0.0]), "x")
        optimizer = Adam([p], lr=0.05)
        for _ in range(500):
            optimizer.zero_grad()
            diff = p - Tensor(target)
            (diff * diff).sum().backward()
            optimizer.step()
        np.testing.assert_allclose(p.data, target, atol=1e-3)

    def test_shape_mismatch(self):
        p = Parameter(np.zeros(3), "p")
        p.grad = np.zeros(2)
        with pytest.raises(ValueError):
            Adam([p]).step()

    def test_deterministic(self):
        def run():
            p = Parameter(np.array([0.3, -0.7]), "p")
            optimizer = Adam([p], lr=0.01)
            for _ in range(20):
                optimizer.zero_grad()
                (p.tanh() * p).sum().backward()
                optimizer.step()
            return p.data
        np.testing.assert_array_equal(run(), run())


@pytest.mark.unit
class TestCheckpoint:
    """JSON checkpoint files."""

    def test_round_trip(self, temp_dir):
        params = {"a.W": np.arange(6.0).reshape(2, 3), "b": np.array([0.1, -0.2])}
        path = write_checkpoint(temp_dir / "sub" / "model.json", {"architecture": "sl"}, params)
        document = read_checkpoint(path)
        assert document["architecture"] == "sl"
        assert document["format_version"] == FORMAT_VERSION
        for name, values in params.items():
            np.testing.assert_array_equal(document["parameters"][name], values)

    def test_missing(self, temp_dir):
        with pytest.raises(FileNotFoundError):
            read_checkpoint(temp_dir / "absent.json")

    def test_bad_version(self, temp_dir):
        path = temp_dir / "model.json"
        path.write_text(json.dumps({"format_version": 99, "parameters": {}}))
        with pytest.raises(ValueError, match="format_version"):
            read_checkpoint(path)

    def test_bad_json(self, temp_dir):
        path = temp_dir / "model.json"
        path.write_text("{")
        with pytest.raises(ValueError):
            read_checkpoint(path)

    def test_array_size_mismatch(self):
        with pytest.raises(ValueError):
            decode_array({"shape": [2, 2], "values": [1.0, 2.0]})
