"""Dense feedforward networks with trainable activation parameters.

A network is a chain of :class:`DenseLayer`. Each layer computes
``z = a @ W.T + b`` and applies its activation (``None`` means linear, which
is what the output layer normally uses). Every named activation parameter
is one scalar shared by all units of its layer, and backprop produces a
gradient for it next to ``dW`` and ``db``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import activations as act
from .activations import ActivationInstance, ActivationKind, Param, ParamSet
from .errors import LabelRangeError, ShapeError

CHECKPOINT_VERSION = 1


@dataclass(frozen=True, eq=False)
class DenseLayer:
    weights: np.ndarray
    bias: np.ndarray
    activation: ActivationInstance | None = None

    def __post_init__(self):
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise ShapeError(
                f"weights {self.weights.shape} and bias {self.bias.shape} are inconsistent"
            )

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    def replace(self, **changes) -> "DenseLayer":
        return replace(self, **changes)


@dataclass(frozen=True, eq=False)
class Network:
    layers: tuple[DenseLayer, ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.layers:
            raise ShapeError("a network needs at least one layer")
        for prev, nxt in zip(self.layers, self.layers[1:]):
            if prev.out_dim != nxt.in_dim:
                raise ShapeError(
                    f"layer widths do not chain: {prev.out_dim} -> {nxt.in_dim}"
                )

    @property
    def sizes(self) -> list[int]:
        return [self.layers[0].in_dim] + [lyr.out_dim for lyr in self.layers]


@dataclass
class Cache:
    inputs: list[np.ndarray]  # input of every layer
    preacts: list[np.ndarray]  # z of every layer
    output: np.ndarray


@dataclass
class LayerGrad:
    weights: np.ndarray
    bias: np.ndarray
    act_params: np.ndarray  # one entry per ParamSet entry; frozen entries are 0


@dataclass
class Gradients:
    layers: list[LayerGrad] = field(default_factory=list)


def _check_input(net: Network, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.layers[0].in_dim:
        raise ShapeError(
            f"input of shape {x.shape} does not match first layer width {net.layers[0].in_dim}"
        )
    return x


def layer_forward(layer: DenseLayer, a: np.ndarray) -> np.ndarray:
    z = a @ layer.weights.T + layer.bias
    if layer.activation is None:
        return z
    return act.forward_batch(layer.activation, z)


def forward_pass(net: Network, x) -> tuple[np.ndarray, Cache]:
    a = _check_input(net, x)
    inputs, preacts = [], []
    for layer in net.layers:
        inputs.append(a)
        z = a @ layer.weights.T + layer.bias
        preacts.append(z)
        a = z if layer.activation is None else act.forward_batch(layer.activation, z)
    return a, Cache(inputs, preacts, a)


def logits(net: Network, x) -> np.ndarray:
    return forward_pass(net, x)[0]


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def _check_labels(labels, batch: int, classes: int) -> np.ndarray:
    labels = np.asarray(labels)
    if labels.shape != (batch,):
        raise ShapeError(f"expected {batch} labels, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        raise LabelRangeError("labels must be integer class indices")
    if batch and (labels.min() < 0 or labels.max() >= classes):
        raise LabelRangeError(f"labels must lie in [0, {classes})")
    return labels.astype(np.intp)


def loss(logits: np.ndarray, labels) -> float:
    """Mean softmax cross-entropy."""
    z = np.asarray(logits, dtype=np.float64)
    if z.ndim != 2:
        raise ShapeError(f"logits must be 2-D, got shape {z.shape}")
    labels = _check_labels(labels, z.shape[0], z.shape[1])
    shifted = z - z.max(axis=1, keepdims=True)
    logsum = np.log(np.exp(shifted).sum(axis=1))
    picked = shifted[np.arange(z.shape[0]), labels]
    return float(np.mean(logsum - picked))


def squared_loss(pred: np.ndarray, targets: np.ndarray) -> float:
    """Half mean-over-batch squared error; only used by gradient fixtures."""
    pred = np.asarray(pred, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if pred.shape != targets.shape:
        raise ShapeError(f"prediction {pred.shape} vs target {targets.shape}")
    return float(0.5 * np.sum(np.square(pred - targets)) / pred.shape[0])


def backward_pass(net: Network, cache: Cache, labels, loss_kind: str = "xent") -> Gradients:
    """Exact gradients of the batch loss.

    ``loss_kind="squared"`` switches to :func:`squared_loss`, with ``labels``
    holding the regression targets.
    """
    out = cache.output
    batch = out.shape[0]
    if len(cache.preacts) != len(net.layers):
        raise ShapeError("cache does not belong to this network")
    if loss_kind == "xent":
        labels = _check_labels(labels, batch, out.shape[1])
        upstream = softmax(out)
        upstream[np.arange(batch), labels] -= 1.0
        upstream /= batch
    elif loss_kind == "squared":
        targets = np.asarray(labels, dtype=np.float64)
        if targets.shape != out.shape:
            raise ShapeError(f"targets {targets.shape} vs output {out.shape}")
        upstream = (out - targets) / batch
    else:
        raise ValueError(f"unknown loss kind {loss_kind!r}")

    grads: list[LayerGrad] = []
    for layer, a_in, z in zip(reversed(net.layers), reversed(cache.inputs), reversed(cache.preacts)):
        inst = layer.activation
        if inst is None:
            dz = upstream
            dparams = np.zeros(0)
        else:
            dz = upstream * act.derivative_batch(inst, z)
            dparams = np.zeros(len(inst.params))
            if any(inst.params.trainable):
                pgrads = act.param_gradient_batch(inst, z)
                for k, p in enumerate(inst.params):
                    if p.trainable:
                        dparams[k] = np.sum(upstream * pgrads[k])
        grads.append(LayerGrad(dz.T @ a_in, dz.sum(axis=0), dparams))
        upstream = dz @ layer.weights
    grads.reverse()
    return Gradients(grads)


def predict(net: Network, x) -> np.ndarray:
    """Argmax class per row; ties go to the lowest index."""
    return np.argmax(logits(net, x), axis=1)


def accuracy(net: Network, x, labels) -> float:
    labels = np.asarray(labels)
    if labels.size == 0:
        return 0.0
    return float(np.mean(predict(net, x) == labels))


def _resolve_activation(spec) -> ActivationInstance | None:
    if spec is None or isinstance(spec, ActivationInstance):
        return spec
    return act.make(spec)


def init_network(
    sizes: Sequence[int],
    activation="relu",
    seed: int = 0,
    output_activation=None,
) -> Network:
    """Glorot-uniform weights, zero biases, registry-default activation params.

    ``activation`` is either one activation (name, kind or instance) used by
    every hidden layer, or a list with one entry per layer (``None`` for
    linear). The output layer gets ``output_activation`` in the first case.
    """
    sizes = [int(s) for s in sizes]
    if len(sizes) < 2 or any(s <= 0 for s in sizes):
        raise ShapeError(f"layer sizes must be >= 2 positive ints, got {sizes}")
    n_layers = len(sizes) - 1
    if isinstance(activation, (list, tuple)):
        if len(activation) != n_layers:
            raise ShapeError(f"need {n_layers} activations, got {len(activation)}")
        acts = [_resolve_activation(a) for a in activation]
    else:
        hidden = _resolve_activation(activation)
        acts = [hidden] * (n_layers - 1) + [_resolve_activation(output_activation)]

    rng = np.random.default_rng(seed)
    layers = []
    for fan_in, fan_out, inst in zip(sizes, sizes[1:], acts):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        W = rng.uniform(-limit, limit, size=(fan_out, fan_in))
        layers.append(DenseLayer(W, np.zeros(fan_out), inst))
    return Network(tuple(layers))


# --- flat parameter views, used by the optimizers ---------------------------

def parameters(net: Network) -> list[np.ndarray]:
    """``[W0, b0, p0, W1, b1, p1, ...]`` where ``p`` holds activation params."""
    out = []
    for layer in net.layers:
        vals = layer.activation.params.values if layer.activation is not None else ()
        out.extend([layer.weights, layer.bias, np.array(vals, dtype=np.float64)])
    return out


def gradient_arrays(grads: Gradients) -> list[np.ndarray]:
    out = []
    for g in grads.layers:
        out.extend([g.weights, g.bias, g.act_params])
    return out


def with_parameters(net: Network, arrays: Sequence[np.ndarray]) -> Network:
    if len(arrays) != 3 * len(net.layers):
        raise ShapeError("parameter list does not match network")
    layers = []
    for i, layer in enumerate(net.layers):
        W, b, p = arrays[3 * i: 3 * i + 3]
        if W.shape != layer.weights.shape or b.shape != layer.bias.shape:
            raise ShapeError(f"layer {i}: parameter shapes changed")
        inst = layer.activation
        if inst is not None:
            inst = inst.with_values([float(v) for v in p])
        layers.append(DenseLayer(W, b, inst))
    return Network(tuple(layers))


def activation_summary(net: Network) -> list[dict]:
    """Per-layer activation kind and parameter values, JSON friendly."""
    rows = []
    for i, layer in enumerate(net.layers):
        inst = layer.activation
        rows.append({
            "layer": i,
            "activation": inst.kind.value if inst is not None else "linear",
            "params": inst.params.as_dict() if inst is not None else {},
        })
    return rows


# --- checkpoints ------------------------------------------------------------

def save_checkpoint(net: Network, path) -> None:
    """Write an ``.npz`` holding every array plus a JSON header."""
    header = {"format": "adaptact-network", "version": CHECKPOINT_VERSION, "layers": []}
    arrays = {}
    for i, layer in enumerate(net.layers):
        inst = layer.activation
        header["layers"].append({
            "activation": inst.kind.value if inst is not None else None,
            "params": [
                {"name": p.name, "trainable": p.trainable} for p in inst.params
            ] if inst is not None else [],
        })
        arrays[f"w{i}"] = layer.weights
        arrays[f"b{i}"] = layer.bias
        arrays[f"p{i}"] = np.array(
            inst.params.values if inst is not None else (), dtype=np.float64
        )
    arrays["header"] = np.array(json.dumps(header, sort_keys=True))
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_checkpoint(path) -> Network:
    with np.load(path, allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        if header.get("format") != "adaptact-network":
            raise ValueError(f"{path} is not a network checkpoint")
        if header.get("version") != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {header.get('version')}")
        layers = []
        for i, meta in enumerate(header["layers"]):
            inst = None
            if meta["activation"] is not None:
                vals = data[f"p{i}"]
                params = ParamSet(tuple(
                    Param(m["name"], float(v), bool(m["trainable"]))
                    for m, v in zip(meta["params"], vals)
                ))
                inst = ActivationInstance(ActivationKind.parse(meta["activation"]), params)
            layers.append(DenseLayer(data[f"w{i}"].copy(), data[f"b{i}"].copy(), inst))
    return Network(tuple(layers))
