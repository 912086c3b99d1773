"""Seeded training runs and multi-activation comparisons."""

from __future__ import annotations

import dataclasses
import json
import logging
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import activations as act
from . import network as nw
from .data import Dataset, batches, default_mnist_dir, load_mnist, synth_blobs
from .errors import ConfigError, ParamDomainError, UnknownActivation
from .optim import AdamState, adam_step, sgd_step

log = logging.getLogger(__name__)

OPTIMIZERS = ("adam", "sgd")
DATASETS = ("mnist", "blobs")


@dataclass
class RunConfig:
    activation: str = "erfrelu"
    params: dict[str, float] = field(default_factory=dict)
    freeze: bool = False
    sizes: list[int] = field(default_factory=lambda: [784, 128, 10])
    optimizer: str = "adam"
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 5
    batch_size: int = 128
    seed: int = 0
    dataset: str = "mnist"
    data_dir: str | None = None
    train_limit: int | None = None
    test_limit: int | None = None
    blobs: dict[str, Any] = field(default_factory=lambda: {
        "n": 200, "class_count": 2, "separation": 10.0, "dim": 2, "test_n": 200,
    })
    out_dir: str | None = None

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("out_dir")
        return d

    def replace(self, **changes) -> "RunConfig":
        cfg = dataclasses.replace(self, **changes)
        cfg.validate()
        return cfg

    def activation_instance(self) -> act.ActivationInstance:
        inst = act.make(self.activation, **self.params)
        if self.freeze:
            inst = act.ActivationInstance(inst.kind, inst.params.frozen())
        return inst

    def validate(self) -> None:
        try:
            self.activation_instance()
        except (UnknownActivation, ParamDomainError) as exc:
            raise ConfigError(str(exc)) from None
        if self.optimizer not in OPTIMIZERS:
            raise ConfigError(f"optimizer must be one of {OPTIMIZERS}, got {self.optimizer!r}")
        if self.dataset not in DATASETS:
            raise ConfigError(f"dataset must be one of {DATASETS}, got {self.dataset!r}")
        if not self.lr > 0:
            raise ConfigError("lr must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1 and self.eps > 0):
            raise ConfigError("Adam hyperparameters out of range")
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.batch_size <= 0:
            raise ConfigError("batch_size must be positive")
        if len(self.sizes) < 2 or any(int(s) <= 0 for s in self.sizes):
            raise ConfigError(f"sizes must be at least two positive ints, got {self.sizes}")
        for lim in (self.train_limit, self.test_limit):
            if lim is not None and lim <= 0:
                raise ConfigError("row limits must be positive")


@dataclass
class EpochMetrics:
    epoch: int
    train_loss: float
    train_accuracy: float
    test_accuracy: float


@dataclass
class RunMetrics:
    activation: str
    config: dict
    epochs: list[EpochMetrics]
    final_params: list[dict]
    wall_time: float = 0.0

    @property
    def test_accuracy(self) -> float:
        return self.epochs[-1].test_accuracy if self.epochs else float("nan")

    @property
    def train_loss(self) -> float:
        return self.epochs[-1].train_loss if self.epochs else float("nan")

    def payload(self) -> dict:
        """Everything except wall time, so reruns serialize identically."""
        return {
            "activation": self.activation,
            "config": self.config,
            "epochs": [dataclasses.asdict(e) for e in self.epochs],
            "final_params": self.final_params,
        }

    def to_json(self) -> str:
        return json.dumps(self.payload(), indent=2) + "\n"


@lru_cache(maxsize=4)
def _mnist(data_dir: str) -> tuple[Dataset, Dataset]:
    return load_mnist(data_dir)


def _subset(ds: Dataset, limit: int | None) -> Dataset:
    if limit is None or limit >= len(ds):
        return ds
    return Dataset(ds.images[:limit], ds.labels[:limit], ds.class_count, ds.split)


def load_data(cfg: RunConfig) -> tuple[Dataset, Dataset]:
    if cfg.dataset == "mnist":
        train, test = _mnist(str(cfg.data_dir or default_mnist_dir()))
    else:
        b = dict(cfg.blobs)
        test_n = b.pop("test_n", b.get("n", 200))
        train = synth_blobs(seed=cfg.seed, split="train", **b)
        test = synth_blobs(**{**b, "n": test_n}, seed=cfg.seed + 1, split="test")
    return _subset(train, cfg.train_limit), _subset(test, cfg.test_limit)


def train(cfg: RunConfig, data: tuple[Dataset, Dataset] | None = None,
          out_dir=None) -> tuple[RunMetrics, nw.Network]:
    """Run one seeded training job.

    Writes ``metrics.json`` and ``checkpoint.npz`` into ``out_dir`` (or
    ``cfg.out_dir``) when one is given. With ``epochs == 0`` no checkpoint
    is written.
    """
    cfg.validate()
    train_ds, test_ds = data if data is not None else load_data(cfg)
    if train_ds.width != cfg.sizes[0]:
        raise ConfigError(f"input width {train_ds.width} does not match sizes[0]={cfg.sizes[0]}")
    if train_ds.class_count > cfg.sizes[-1]:
        raise ConfigError(f"{train_ds.class_count} classes but only {cfg.sizes[-1]} outputs")

    start = time.perf_counter()
    net = nw.init_network(cfg.sizes, cfg.activation_instance(), seed=cfg.seed)
    adam = AdamState(cfg.lr, cfg.beta1, cfg.beta2, cfg.eps)
    history: list[EpochMetrics] = []
    for epoch in range(cfg.epochs):
        total_loss, correct = 0.0, 0
        for xb, yb in batches(train_ds, cfg.batch_size, seed=[cfg.seed, epoch]):
            out, cache = nw.forward_pass(net, xb)
            total_loss += nw.loss(out, yb) * len(yb)
            correct += int(np.sum(np.argmax(out, axis=1) == yb))
            grads = nw.gradient_arrays(nw.backward_pass(net, cache, yb))
            params = nw.parameters(net)
            if cfg.optimizer == "adam":
                adam, params = adam_step(adam, params, grads)
            else:
                params = sgd_step(params, grads, cfg.lr)
            net = nw.with_parameters(net, params)
        em = EpochMetrics(
            epoch=epoch + 1,
            train_loss=total_loss / len(train_ds),
            train_accuracy=correct / len(train_ds),
            test_accuracy=nw.accuracy(net, test_ds.images, test_ds.labels),
        )
        log.info("%s epoch %d: loss %.4f train %.4f test %.4f", cfg.activation, em.epoch,
                 em.train_loss, em.train_accuracy, em.test_accuracy)
        history.append(em)

    metrics = RunMetrics(
        activation=run_label(cfg),
        config=cfg.to_dict(),
        epochs=history,
        final_params=nw.activation_summary(net),
        wall_time=time.perf_counter() - start,
    )
    out_dir = out_dir if out_dir is not None else cfg.out_dir
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.json").write_text(metrics.to_json())
        if cfg.epochs > 0:
            nw.save_checkpoint(net, out / "checkpoint.npz")
    return metrics, net


def run_label(cfg: RunConfig) -> str:
    return cfg.activation + (":frozen" if cfg.freeze else "")


def parse_activation_entry(entry: str) -> tuple[str, bool]:
    """``"erfrelu"`` or ``"erfrelu:frozen"`` -> (name, frozen)."""
    name, _, flag = entry.strip().partition(":")
    if flag not in ("", "frozen"):
        raise ConfigError(f"bad activation entry {entry!r}; use NAME or NAME:frozen")
    return name, flag == "frozen"


@dataclass
class Comparison:
    runs: list[RunMetrics]
    ranking: list[int]  # indices into runs, best first

    def payload(self) -> dict:
        return {
            "ranking": [
                {
                    "rank": r + 1,
                    "activation": self.runs[i].activation,
                    "test_accuracy": self.runs[i].test_accuracy,
                    "train_loss": self.runs[i].train_loss,
                }
                for r, i in enumerate(self.ranking)
            ],
            "runs": [m.payload() for m in self.runs],
        }

    def to_json(self) -> str:
        return json.dumps(self.payload(), indent=2) + "\n"

    def to_csv(self) -> str:
        lines = ["rank,activation,test_accuracy,train_loss,train_accuracy,final_params"]
        for r, i in enumerate(self.ranking):
            m = self.runs[i]
            train_acc = m.epochs[-1].train_accuracy if m.epochs else float("nan")
            params = ";".join(
                f"layer{row['layer']}.{k}={v!r}"
                for row in m.final_params for k, v in row["params"].items()
            )
            lines.append(f"{r + 1},{m.activation},{m.test_accuracy!r},{m.train_loss!r},"
                         f"{train_acc!r},{params}")
        return "\n".join(lines) + "\n"


def rank(runs: Sequence[RunMetrics]) -> list[int]:
    """Best test accuracy first; ties go to the lower final train loss, then input order."""
    return sorted(range(len(runs)), key=lambda i: (-runs[i].test_accuracy, runs[i].train_loss, i))


def compare(base: RunConfig, entries: Sequence[str], out_dir=None) -> Comparison:
    """Train one run per activation entry with everything else held fixed."""
    if len(entries) < 2:
        raise ConfigError("compare needs at least two activations")
    configs = []
    for entry in entries:
        name, frozen = parse_activation_entry(entry)
        # parameter overrides only carry over to families that have them
        known = set(act.family(name).names) if name in act.ActivationKind._value2member_map_ else set()
        params = {k: v for k, v in base.params.items() if k in known}
        configs.append(base.replace(activation=name, freeze=frozen, params=params, out_dir=None))
    data = load_data(base)
    runs = []
    for i, cfg in enumerate(configs):
        sub = None if out_dir is None else Path(out_dir) / f"{i:02d}_{run_label(cfg).replace(':', '_')}"
        metrics, _ = train(cfg, data=data, out_dir=sub)
        runs.append(metrics)
    result = Comparison(runs, rank(runs))
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "compare.json").write_text(result.to_json())
        (out / "compare.csv").write_text(result.to_csv())
    return result
