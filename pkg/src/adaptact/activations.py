"""Fixed and trainable activation functions.

Each family is registered with closed forms for its value, its derivative
with respect to the input, and its gradient with respect to every named
parameter. All three are written against float64 arrays; the scalar entry
points (:func:`forward`, :func:`derivative`, :func:`param_gradient`) run the
very same code on a one-element array, so batch and scalar results agree
bit for bit.

Derivatives follow the forward definitions. Where a family has a kink the
right-hand limit is returned at the kink itself (``relu'(0) == 1``).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .errors import ParamDomainError, UnknownActivation
from .numerics import clamped_exp, erf, erf_derivative, sech2, softplus, stable_sigmoid

__all__ = [
    "ActivationKind",
    "Param",
    "ParamSet",
    "ActivationInstance",
    "Family",
    "RegistryEntry",
    "default_params",
    "make",
    "forward",
    "derivative",
    "param_gradient",
    "forward_batch",
    "derivative_batch",
    "param_gradient_batch",
    "registry_list",
    "family",
    "BENCHMARK_KINDS",
]


class ActivationKind(str, enum.Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"
    RELU = "relu"
    LRELU = "lrelu"
    ELU = "elu"
    SILU = "silu"
    PATS = "pats"
    SWISH = "swish"
    ESWISH = "eswish"
    LISHT = "lisht"
    MISH = "mish"
    TANHSOFT1 = "tanhsoft1"
    TANHSOFT2 = "tanhsoft2"
    TANHSOFT3 = "tanhsoft3"
    SINLU = "sinlu"
    TANHLU = "tanhlu"
    SAAF = "saaf"
    SERF = "serf"
    ERFACT = "erfact"
    PSERF = "pserf"
    SMISH = "smish"
    IPLU = "iplu"
    ERFRELU = "erfrelu"

    @classmethod
    def parse(cls, name: "str | ActivationKind") -> "ActivationKind":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            raise UnknownActivation(f"unknown activation {name!r}") from None

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Param:
    name: str
    value: float
    trainable: bool = False


@dataclass(frozen=True)
class ParamSet:
    """Ordered named scalars, in the family's declaration order."""

    entries: tuple[Param, ...] = ()

    def __post_init__(self):
        names = [p.name for p in self.entries]
        if len(set(names)) != len(names):
            raise ParamDomainError(f"duplicate parameter names: {names}")
        for p in self.entries:
            if not math.isfinite(p.value):
                raise ParamDomainError(f"parameter {p.name} is not finite: {p.value}")

    def __iter__(self) -> Iterator[Param]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, name: str) -> float:
        for p in self.entries:
            if p.name == name:
                return p.value
        raise KeyError(name)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.entries)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(p.value for p in self.entries)

    @property
    def trainable(self) -> tuple[bool, ...]:
        return tuple(p.trainable for p in self.entries)

    def with_values(self, values: Sequence[float]) -> "ParamSet":
        if len(values) != len(self.entries):
            raise ParamDomainError(
                f"expected {len(self.entries)} values, got {len(values)}"
            )
        return ParamSet(
            tuple(replace(p, value=float(v)) for p, v in zip(self.entries, values))
        )

    def updated(
        self,
        values: Mapping[str, float] | None = None,
        trainable: Mapping[str, bool] | None = None,
    ) -> "ParamSet":
        values = dict(values or {})
        trainable = dict(trainable or {})
        unknown = (set(values) | set(trainable)) - set(self.names)
        if unknown:
            raise ParamDomainError(
                f"unknown parameter(s) {sorted(unknown)}; expected one of {list(self.names)}"
            )
        return ParamSet(
            tuple(
                Param(
                    p.name,
                    float(values.get(p.name, p.value)),
                    bool(trainable.get(p.name, p.trainable)),
                )
                for p in self.entries
            )
        )

    def frozen(self) -> "ParamSet":
        return self.updated(trainable={n: False for n in self.names})

    def as_dict(self) -> dict[str, float]:
        return {p.name: p.value for p in self.entries}


@dataclass(frozen=True)
class Family:
    kind: ActivationKind
    label: str
    names: tuple[str, ...]
    defaults: tuple[float, ...]
    trainable: tuple[bool, ...]
    value: Callable
    dx: Callable
    dparams: Callable
    kinks: tuple[float, ...] = ()
    benchmark: bool = False
    check: Callable | None = None

    @property
    def arity(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class ActivationInstance:
    kind: ActivationKind
    params: ParamSet = field(default_factory=ParamSet)

    def __post_init__(self):
        kind = ActivationKind.parse(self.kind)
        object.__setattr__(self, "kind", kind)
        fam = _REGISTRY[kind]
        if self.params.names != fam.names:
            raise ParamDomainError(
                f"{kind.value} expects parameters {list(fam.names)}, "
                f"got {list(self.params.names)}"
            )

    @property
    def family(self) -> Family:
        return _REGISTRY[self.kind]

    def with_values(self, values: Sequence[float]) -> "ActivationInstance":
        return ActivationInstance(self.kind, self.params.with_values(values))

    def __str__(self) -> str:
        if not len(self.params):
            return self.kind.value
        inner = ",".join(f"{p.name}={p.value:g}" for p in self.params)
        return f"{self.kind.value}({inner})"


# ---------------------------------------------------------------------------
# helpers

def _split(x, mask, when_true, when_false):
    """Evaluate two branches only where each applies."""
    out = np.empty_like(x)
    if mask.any():
        out[mask] = when_true(x[mask])
    inv = ~mask
    if inv.any():
        out[inv] = when_false(x[inv])
    return out


def _zeros(x):
    return np.zeros_like(x)


# ---------------------------------------------------------------------------
# fixed families

def _sigmoid(x):
    return stable_sigmoid(x)


def _sigmoid_dx(x):
    s = stable_sigmoid(x)
    return s * (1.0 - s)


def _tanh(x):
    return np.tanh(x)


def _tanh_dx(x):
    return sech2(x)


def _relu(x):
    return np.where(x >= 0, x, 0.0)


def _relu_dx(x):
    return np.where(x >= 0, 1.0, 0.0)


def _lrelu(x, a):
    return np.where(x > 0, x, a * x)


def _lrelu_dx(x, a):
    return np.where(x >= 0, 1.0, a)


def _lrelu_dp(x, a):
    return (np.where(x >= 0, 0.0, x),)


def _elu(x, a):
    return _split(x, x >= 0, lambda v: v, lambda v: a * np.expm1(np.maximum(v, -700.0)))


def _elu_dx(x, a):
    return _split(x, x >= 0, np.ones_like, lambda v: a * clamped_exp(v))


def _elu_dp(x, a):
    return (_split(x, x >= 0, _zeros, lambda v: np.expm1(np.maximum(v, -700.0))),)


def _silu(x):
    return x * stable_sigmoid(x)


def _silu_dx(x):
    s = stable_sigmoid(x)
    return s + x * s * (1.0 - s)


def _pats_check(x, k):
    if not k > 0:
        raise ParamDomainError(f"pats requires k > 0, got {k}")


def _pats(x, k):
    return x * np.arctan(k * math.pi * stable_sigmoid(x))


def _pats_dx(x, k):
    s = stable_sigmoid(x)
    u = k * math.pi * s
    return np.arctan(u) + x * k * math.pi * s * (1.0 - s) / (1.0 + u * u)


def _pats_dp(x, k):
    s = stable_sigmoid(x)
    u = k * math.pi * s
    return (x * math.pi * s / (1.0 + u * u),)


def _swish(x, b):
    return x * stable_sigmoid(b * x)


def _swish_dx(x, b):
    s = stable_sigmoid(b * x)
    return s + b * x * s * (1.0 - s)


def _swish_dp(x, b):
    s = stable_sigmoid(b * x)
    return (x * x * s * (1.0 - s),)


def _eswish(x, b):
    return b * x * stable_sigmoid(x)


def _eswish_dx(x, b):
    return b * _silu_dx(x)


def _eswish_dp(x, b):
    return (x * stable_sigmoid(x),)


def _lisht(x):
    return x * np.tanh(x)


def _lisht_dx(x):
    return np.tanh(x) + x * sech2(x)


def _mish(x):
    return x * np.tanh(softplus(x))


def _mish_dx(x):
    sp = softplus(x)
    return np.tanh(sp) + x * sech2(sp) * stable_sigmoid(x)


# ---------------------------------------------------------------------------
# adaptive families

def _tanhsoft1(x, a):
    return np.tanh(a * x) * softplus(x)


def _tanhsoft1_dx(x, a):
    return a * sech2(a * x) * softplus(x) + np.tanh(a * x) * stable_sigmoid(x)


def _tanhsoft1_dp(x, a):
    return (x * sech2(a * x) * softplus(x),)


def _tanhsoft2(x, b, g):
    return x * np.tanh(b * clamped_exp(g * x))


def _tanhsoft2_dx(x, b, g):
    e = clamped_exp(g * x)
    w = b * e
    return np.tanh(w) + x * sech2(w) * b * g * e


def _tanhsoft2_dp(x, b, g):
    e = clamped_exp(g * x)
    k = x * sech2(b * e) * e
    return (k, k * b * x)


def _tanhsoft3_den(x, d):
    # (1 + e^x tanh(dx)) / e^x
    return clamped_exp(-x) + np.tanh(d * x)


def _tanhsoft3_check(x, d):
    den = _tanhsoft3_den(x, d)
    if np.any(den <= 0):
        raise ParamDomainError(
            f"tanhsoft3 with delta={d} has 1 + e^x tanh(delta x) <= 0 at some inputs"
        )


def _tanhsoft3(x, d):
    return _split(
        x,
        x > 0,
        lambda v: v + np.log(_tanhsoft3_den(v, d)),
        lambda v: np.log1p(clamped_exp(v) * np.tanh(d * v)),
    )


def _tanhsoft3_dx(x, d):
    return (np.tanh(d * x) + d * sech2(d * x)) / _tanhsoft3_den(x, d)


def _tanhsoft3_dp(x, d):
    return (x * sech2(d * x) / _tanhsoft3_den(x, d),)


def _sinlu(x, a, b):
    return (x + a * np.sin(b * x)) * stable_sigmoid(x)


def _sinlu_dx(x, a, b):
    s = stable_sigmoid(x)
    g = x + a * np.sin(b * x)
    return (1.0 + a * b * np.cos(b * x)) * s + g * s * (1.0 - s)


def _sinlu_dp(x, a, b):
    s = stable_sigmoid(x)
    return (np.sin(b * x) * s, a * x * np.cos(b * x) * s)


def _tanhlu(x, a, b, g):
    return a * np.tanh(g * x) + b * x


def _tanhlu_dx(x, a, b, g):
    return a * g * sech2(g * x) + b


def _tanhlu_dp(x, a, b, g):
    return (np.tanh(g * x), x.copy(), a * x * sech2(g * x))


def _saaf_den(x, a, b):
    return x / a + clamped_exp(-x / b)


def _saaf_check(x, a, b):
    if not (a > 0 and b > 0):
        raise ParamDomainError(f"saaf requires alpha > 0 and beta > 0, got {a}, {b}")
    if np.any(_saaf_den(x, a, b) <= 0):
        raise ParamDomainError(
            f"saaf denominator x/alpha + exp(-x/beta) is not positive at some inputs "
            f"(alpha={a}, beta={b})"
        )


def _saaf(x, a, b):
    return x / _saaf_den(x, a, b)


def _saaf_dx(x, a, b):
    e = clamped_exp(-x / b)
    den = x / a + e
    return (e / den) * ((1.0 + x / b) / den)


def _saaf_dp(x, a, b):
    e = clamped_exp(-x / b)
    den = x / a + e
    r = x / den
    return (np.square(r / a), -(r / b) * (x / b) * (e / den))


def _serf(x):
    return x * erf(softplus(x))


def _serf_dx(x):
    sp = softplus(x)
    return erf(sp) + x * erf_derivative(sp) * stable_sigmoid(x)


def _erfact(x, a, b):
    return x * erf(a * clamped_exp(b * x))


def _erfact_dx(x, a, b):
    e = clamped_exp(b * x)
    w = a * e
    return erf(w) + x * erf_derivative(w) * a * b * e


def _erfact_dp(x, a, b):
    e = clamped_exp(b * x)
    k = x * erf_derivative(a * e) * e
    return (k, k * a * x)


def _pserf(x, g, d):
    return x * erf(g * softplus(d * x))


def _pserf_dx(x, g, d):
    sp = softplus(d * x)
    return erf(g * sp) + x * erf_derivative(g * sp) * g * d * stable_sigmoid(d * x)


def _pserf_dp(x, g, d):
    sp = softplus(d * x)
    k = x * erf_derivative(g * sp)
    return (k * sp, k * g * x * stable_sigmoid(d * x))


def _smish_parts(x, b):
    s = stable_sigmoid(b * x)
    lg = np.log1p(s)
    # d/dz of tanh(log(1 + sigmoid(z))) at z = b x
    inner = sech2(lg) * s * (1.0 - s) / (1.0 + s)
    return np.tanh(lg), inner


def _smish(x, a, b):
    return a * x * np.tanh(np.log1p(stable_sigmoid(b * x)))


def _smish_dx(x, a, b):
    p, inner = _smish_parts(x, b)
    return a * (p + x * b * inner)


def _smish_dp(x, a, b):
    p, inner = _smish_parts(x, b)
    return (x * p, a * x * x * inner)


def _iplu(x, a):
    return _split(x, x >= 0, lambda v: v, lambda v: v / (1.0 + np.power(-v, a)))


def _iplu_dx(x, a):
    def neg(v):
        ta = np.power(-v, a)
        return (1.0 + (1.0 - a) * ta) / np.square(1.0 + ta)

    return _split(x, x >= 0, np.ones_like, neg)


def _iplu_dp(x, a):
    def neg(v):
        t = -v
        ta = np.power(t, a)
        return -v * ta * np.log(t) / np.square(1.0 + ta)

    return (_split(x, x >= 0, _zeros, neg),)


def _erfrelu(x, a):
    return _split(x, x >= 0, lambda v: v, lambda v: a * erf(v))


def _erfrelu_dx(x, a):
    return _split(x, x >= 0, np.ones_like, lambda v: a * erf_derivative(v))


def _erfrelu_dp(x, a):
    return (_split(x, x >= 0, _zeros, erf),)


def _no_params(x):
    return ()


# ---------------------------------------------------------------------------
# registry

K = ActivationKind

_FAMILIES = [
    Family(K.SIGMOID, "Sigmoid", (), (), (), _sigmoid, _sigmoid_dx, _no_params),
    Family(K.TANH, "Tanh", (), (), (), _tanh, _tanh_dx, _no_params),
    Family(K.RELU, "ReLU", (), (), (), _relu, _relu_dx, _no_params, kinks=(0.0,)),
    Family(K.LRELU, "LReLU", ("alpha",), (0.01,), (False,),
           _lrelu, _lrelu_dx, _lrelu_dp, kinks=(0.0,)),
    Family(K.ELU, "ELU", ("alpha",), (1.0,), (False,),
           _elu, _elu_dx, _elu_dp, kinks=(0.0,)),
    Family(K.SILU, "SiLU", (), (), (), _silu, _silu_dx, _no_params),
    Family(K.PATS, "PATS", ("k",), (0.625,), (False,),
           _pats, _pats_dx, _pats_dp, check=_pats_check),
    Family(K.SWISH, "Swish", ("beta",), (1.0,), (False,), _swish, _swish_dx, _swish_dp),
    Family(K.ESWISH, "E-swish", ("beta",), (1.5,), (False,),
           _eswish, _eswish_dx, _eswish_dp),
    Family(K.LISHT, "LiSHT", (), (), (), _lisht, _lisht_dx, _no_params),
    Family(K.MISH, "Mish", (), (), (), _mish, _mish_dx, _no_params),
    Family(K.TANHSOFT1, "TanhSoft1", ("alpha",), (0.87,), (True,),
           _tanhsoft1, _tanhsoft1_dx, _tanhsoft1_dp, benchmark=True),
    Family(K.TANHSOFT2, "TanhSoft2", ("beta", "gamma"), (0.75, 0.75), (True, True),
           _tanhsoft2, _tanhsoft2_dx, _tanhsoft2_dp, benchmark=True),
    Family(K.TANHSOFT3, "TanhSoft3", ("delta",), (0.85,), (True,),
           _tanhsoft3, _tanhsoft3_dx, _tanhsoft3_dp, benchmark=True, check=_tanhsoft3_check),
    Family(K.SINLU, "SinLU", ("alpha", "beta"), (1.0, 1.0), (True, True),
           _sinlu, _sinlu_dx, _sinlu_dp),
    Family(K.TANHLU, "TanhLU", ("alpha", "beta", "gamma"), (1.0, 0.5, 2.0),
           (True, True, True), _tanhlu, _tanhlu_dx, _tanhlu_dp, benchmark=True),
    Family(K.SAAF, "SAAF", ("alpha", "beta"), (3.0, 2.0), (True, True),
           _saaf, _saaf_dx, _saaf_dp, benchmark=True, check=_saaf_check),
    Family(K.SERF, "Serf", (), (), (), _serf, _serf_dx, _no_params, benchmark=True),
    Family(K.ERFACT, "ErfAct", ("alpha", "beta"), (0.75, 0.75), (True, True),
           _erfact, _erfact_dx, _erfact_dp, benchmark=True),
    Family(K.PSERF, "Pserf", ("gamma", "delta"), (1.25, 0.85), (True, True),
           _pserf, _pserf_dx, _pserf_dp, benchmark=True),
    Family(K.SMISH, "Smish", ("alpha", "beta"), (0.95, 1.2), (True, True),
           _smish, _smish_dx, _smish_dp, benchmark=True),
    Family(K.IPLU, "IpLU", ("alpha",), (1.0,), (False,),
           _iplu, _iplu_dx, _iplu_dp, kinks=(0.0,)),
    Family(K.ERFRELU, "ErfReLU", ("alpha",), (0.882267,), (True,),
           _erfrelu, _erfrelu_dx, _erfrelu_dp, kinks=(0.0,), benchmark=True),
]

_REGISTRY: dict[ActivationKind, Family] = {f.kind: f for f in _FAMILIES}

# Order of the comparison table the defaults come from.
BENCHMARK_KINDS = (
    K.TANHSOFT1, K.TANHSOFT2, K.TANHSOFT3, K.TANHLU, K.SAAF,
    K.ERFACT, K.PSERF, K.SMISH, K.SERF, K.ERFRELU,
)


@dataclass(frozen=True)
class RegistryEntry:
    kind: ActivationKind
    label: str
    arity: int
    names: tuple[str, ...]
    defaults: tuple[float, ...]
    trainable: tuple[bool, ...]
    kinks: tuple[float, ...]
    benchmark: bool


def family(kind: "str | ActivationKind") -> Family:
    return _REGISTRY[ActivationKind.parse(kind)]


def registry_list() -> list[RegistryEntry]:
    return [
        RegistryEntry(f.kind, f.label, f.arity, f.names, f.defaults, f.trainable,
                      f.kinks, f.benchmark)
        for f in _FAMILIES
    ]


def default_params(kind: "str | ActivationKind") -> ParamSet:
    fam = family(kind)
    return ParamSet(
        tuple(Param(n, v, t) for n, v, t in zip(fam.names, fam.defaults, fam.trainable))
    )


def make(
    kind: "str | ActivationKind",
    trainable: bool | None = None,
    **values: float,
) -> ActivationInstance:
    """Build an instance from the registry defaults.

    ``values`` override individual parameters; ``trainable`` (when given)
    sets every parameter's trainability flag at once.

    >>> str(make("erfrelu", alpha=1.0))
    'erfrelu(alpha=1)'
    """
    kind = ActivationKind.parse(kind)
    params = default_params(kind).updated(values)
    if trainable is not None:
        params = params.updated(trainable={n: trainable for n in params.names})
    return ActivationInstance(kind, params)


def _prepare(inst: ActivationInstance, x: np.ndarray):
    fam = inst.family
    vals = inst.params.values
    if fam.check is not None:
        fam.check(x, *vals)
    return fam, vals


def _as_batch(xs) -> np.ndarray:
    return np.asarray(xs, dtype=np.float64)


def forward_batch(inst: ActivationInstance, xs) -> np.ndarray:
    x = _as_batch(xs)
    fam, vals = _prepare(inst, x)
    return np.asarray(fam.value(x, *vals), dtype=np.float64)


def derivative_batch(inst: ActivationInstance, xs) -> np.ndarray:
    x = _as_batch(xs)
    fam, vals = _prepare(inst, x)
    return np.asarray(fam.dx(x, *vals), dtype=np.float64)


def param_gradient_batch(inst: ActivationInstance, xs) -> tuple[np.ndarray, ...]:
    """Per-parameter gradients, each shaped like ``xs``, in ParamSet order."""
    x = _as_batch(xs)
    fam, vals = _prepare(inst, x)
    return tuple(np.broadcast_to(g, x.shape).astype(np.float64) for g in fam.dparams(x, *vals))


def forward(inst: ActivationInstance, x: float) -> float:
    return float(forward_batch(inst, [x])[0])


def derivative(inst: ActivationInstance, x: float) -> float:
    return float(derivative_batch(inst, [x])[0])


def param_gradient(inst: ActivationInstance, x: float) -> list[float]:
    return [float(g[0]) for g in param_gradient_batch(inst, [x])]
