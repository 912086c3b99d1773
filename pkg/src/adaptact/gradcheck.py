"""Finite-difference audits of analytic derivatives.

Nothing here shares code with the analytic paths it checks: activations are
differenced through their forward values only, networks through the scalar
loss only.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from . import activations as act
from .activations import ActivationInstance

KINK_RADIUS = 1e-3
ACTIVATION_STEP = 1e-5
NETWORK_STEP = 1e-4

CSV_FIELDS = ("target", "point", "analytic", "numeric", "abs_err", "rel_err", "pass")


@dataclass(frozen=True)
class GradReport:
    target: str
    point: float | int | str
    analytic: float
    numeric: float
    abs_err: float
    rel_err: float
    passed: bool
    skipped: bool = False

    @classmethod
    def compare(cls, target, point, analytic, numeric, tol) -> "GradReport":
        analytic, numeric = float(analytic), float(numeric)
        abs_err = abs(analytic - numeric)
        rel_err = abs_err / max(1.0, abs(analytic), abs(numeric))
        return cls(target, point, analytic, numeric, abs_err, rel_err, rel_err <= tol)

    @classmethod
    def skip(cls, target, point) -> "GradReport":
        nan = float("nan")
        return cls(target, point, nan, nan, nan, nan, True, skipped=True)

    def row(self) -> list[str]:
        status = "skip" if self.skipped else ("true" if self.passed else "false")
        return [
            self.target,
            repr(self.point) if isinstance(self.point, float) else str(self.point),
            repr(self.analytic),
            repr(self.numeric),
            repr(self.abs_err),
            repr(self.rel_err),
            status,
        ]


def central_diff(f: Callable[[float], float], x: float, h: float) -> float:
    if not h > 0:
        raise ValueError("step h must be positive")
    return (f(x + h) - f(x - h)) / (2.0 * h)


def all_passed(reports: Iterable[GradReport]) -> bool:
    return all(r.passed for r in reports)


def failures(reports: Iterable[GradReport]) -> list[GradReport]:
    return [r for r in reports if not r.passed]


def write_csv(reports: Iterable[GradReport], path=None) -> str:
    """Write reports as CSV to ``path`` (if given) and return the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in reports:
        w.writerow(r.row())
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def near_kink(inst: ActivationInstance, x: float, radius: float = KINK_RADIUS) -> bool:
    return any(abs(x - k) < radius for k in inst.family.kinks)


def audit_activation(
    inst: ActivationInstance,
    points: Sequence[float],
    tol: float = 1e-5,
    h: float = ACTIVATION_STEP,
    analytic_dx: Callable | None = None,
) -> list[GradReport]:
    """Compare the analytic input derivative and every parameter gradient of
    ``inst`` against central differences at ``points``.

    Reports are ordered point by point, input derivative first, then the
    parameters in declaration order. Points within ``KINK_RADIUS`` of a
    registered kink produce ``skipped`` reports instead of comparisons.

    ``analytic_dx`` replaces the analytic input derivative; it exists so the
    audit itself can be fault-injected.
    """
    name = inst.kind.value
    pts = np.asarray(points, dtype=np.float64).reshape(-1)
    keep = np.array([not near_kink(inst, float(p)) for p in pts], dtype=bool)
    xs = pts[keep]

    dx_fn = analytic_dx or act.derivative_batch
    dx = dx_fn(inst, xs)
    num_dx = (act.forward_batch(inst, xs + h) - act.forward_batch(inst, xs - h)) / (2 * h)

    dps = act.param_gradient_batch(inst, xs)
    num_dps = []
    base = list(inst.params.values)
    for i in range(len(base)):
        up, down = list(base), list(base)
        up[i] += h
        down[i] -= h
        f_up = act.forward_batch(inst.with_values(up), xs)
        f_dn = act.forward_batch(inst.with_values(down), xs)
        num_dps.append((f_up - f_dn) / (2 * h))

    targets = [f"{name}:dx"] + [f"{name}:{p}" for p in inst.params.names]
    reports: list[GradReport] = []
    j = 0
    for p, ok in zip(pts, keep):
        p = float(p)
        if not ok:
            reports.extend(GradReport.skip(t, p) for t in targets)
            continue
        reports.append(GradReport.compare(targets[0], p, dx[j], num_dx[j], tol))
        for i in range(len(base)):
            reports.append(GradReport.compare(targets[i + 1], p, dps[i][j], num_dps[i][j], tol))
        j += 1
    return reports


def audit_network(net, x, labels, tol: float = 1e-4, h: float = NETWORK_STEP,
                  loss_kind: str = "xent") -> list[GradReport]:
    """Backprop gradients of the batch loss versus central differences, for
    every weight, bias and trainable activation parameter.

    ``loss_kind`` is "xent" (labels are class indices) or "squared" (labels
    are regression targets shaped like the output).

    Coordinates are visited layer by layer: weights (row-major), bias, then
    trainable activation parameters. The perturbed losses are recomputed from
    the perturbed layer onward; earlier layers are unaffected by construction.
    """
    from . import network as nw

    x = np.asarray(x, dtype=np.float64)
    logits, cache = nw.forward_pass(net, x)
    grads = nw.backward_pass(net, cache, labels, loss_kind=loss_kind)
    inputs = cache.inputs
    loss_fn = nw.squared_loss if loss_kind == "squared" else nw.loss

    def loss_from(i: int, layer) -> float:
        layers = list(net.layers)
        layers[i] = layer
        a = inputs[i]
        for lyr in layers[i:]:
            a = nw.layer_forward(lyr, a)
        return loss_fn(a, labels)

    reports: list[GradReport] = []
    for i, layer in enumerate(net.layers):
        g = grads.layers[i]
        W = layer.weights
        for idx in np.ndindex(*W.shape):
            orig = W[idx]
            W_up = W.copy()
            W_up[idx] = orig + h
            W_dn = W.copy()
            W_dn[idx] = orig - h
            num = (loss_from(i, layer.replace(weights=W_up))
                   - loss_from(i, layer.replace(weights=W_dn))) / (2 * h)
            reports.append(GradReport.compare(
                f"layer{i}.weights[{idx[0]},{idx[1]}]", i, g.weights[idx], num, tol))
        b = layer.bias
        for k in range(b.shape[0]):
            b_up = b.copy()
            b_up[k] += h
            b_dn = b.copy()
            b_dn[k] -= h
            num = (loss_from(i, layer.replace(bias=b_up))
                   - loss_from(i, layer.replace(bias=b_dn))) / (2 * h)
            reports.append(GradReport.compare(f"layer{i}.bias[{k}]", i, g.bias[k], num, tol))
        if layer.activation is None:
            continue
        vals = list(layer.activation.params.values)
        for k, p in enumerate(layer.activation.params):
            if not p.trainable:
                continue
            up, dn = list(vals), list(vals)
            up[k] += h
            dn[k] -= h
            num = (loss_from(i, layer.replace(activation=layer.activation.with_values(up)))
                   - loss_from(i, layer.replace(activation=layer.activation.with_values(dn)))
                   ) / (2 * h)
            reports.append(GradReport.compare(
                f"layer{i}.{layer.activation.kind.value}.{p.name}", i,
                g.act_params[k], num, tol))
    return reports


def uniform_points(n: int, lo: float = -5.0, hi: float = 5.0, seed: int = 0) -> np.ndarray:
    """``n`` seeded uniform samples from [lo, hi]."""
    return np.random.default_rng(seed).uniform(lo, hi, size=n)


def max_rel_err(reports: Iterable[GradReport]) -> float:
    errs = [r.rel_err for r in reports if not r.skipped]
    return max(errs) if errs else 0.0


def is_finite_report(r: GradReport) -> bool:
    return r.skipped or (math.isfinite(r.analytic) and math.isfinite(r.numeric))
