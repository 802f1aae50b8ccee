"""The feedforward network: one tanh hidden layer, one logistic output.

Inputs are scaled element-wise from the training-set [min, max] onto [-1, 1]
before the first layer; the scaling lives inside the model so a saved network
is self-contained. The residual Jacobian needed by Levenberg-Marquardt is
computed analytically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from . import kernels
from .errors import EmptyBatch, InvalidSize, LengthMismatch
from .fileio import atomic_write_text
from .signal import ChannelMode, FeatureVector

MODEL_VERSION = 1
DEFAULT_HIDDEN = 10
DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True, eq=False)
class NormParams:
    """Per-input-element min/max captured from a training set."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=np.float64))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=np.float64))
        if self.lo.shape != self.hi.shape or self.lo.ndim != 1:
            raise LengthMismatch("norm min/max must be 1-d and equally long")
        if np.any(self.hi < self.lo):
            raise ValueError("norm max must be >= min element-wise")

    @classmethod
    def identity(cls, n: int) -> "NormParams":
        """Maps [-1, 1] onto itself; placeholder until a training set is seen."""
        return cls(lo=-np.ones(n), hi=np.ones(n))

    @classmethod
    def from_features(cls, features: np.ndarray) -> "NormParams":
        features = np.asarray(features, dtype=np.float64)
        return cls(lo=features.min(axis=0), hi=features.max(axis=0))

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Affine map of [lo, hi] onto [-1, 1]; degenerate elements go to 0.

        Values outside the captured range extrapolate linearly (no clamping).
        """
        values = np.asarray(values, dtype=np.float64)
        span = self.hi - self.lo
        mid = 0.5 * (self.lo + self.hi)
        safe = np.where(span > 0.0, span, 1.0)
        out = 2.0 * (values - mid) / safe
        return np.where(span > 0.0, out, 0.0)


@dataclass(frozen=True, eq=False)
class Network:
    """Immutable weights plus the channel mode and input scaling they expect."""

    input_size: int
    hidden_size: int
    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: float
    mode: ChannelMode
    norm: NormParams

    def __post_init__(self):
        if self.input_size < 1 or self.hidden_size < 1:
            raise InvalidSize("input_size and hidden_size must be >= 1")
        if (self.mode is ChannelMode.XYZ) != (self.input_size == 600):
            raise InvalidSize("XYZ networks take 600 inputs; other modes must not")
        object.__setattr__(self, "w1", np.asarray(self.w1, dtype=np.float64))
        object.__setattr__(self, "b1", np.asarray(self.b1, dtype=np.float64))
        object.__setattr__(self, "w2", np.asarray(self.w2, dtype=np.float64))
        object.__setattr__(self, "b2", float(self.b2))
        if self.w1.shape != (self.hidden_size, self.input_size):
            raise InvalidSize("w1 must be hidden_size x input_size")
        if self.b1.shape != (self.hidden_size,) or self.w2.shape != (self.hidden_size,):
            raise InvalidSize("b1 and w2 must have hidden_size entries")
        if self.norm.lo.shape[0] != self.input_size:
            raise LengthMismatch("norm length must equal input_size")
        for arr in (self.w1, self.b1, self.w2):
            if not np.all(np.isfinite(arr)):
                raise ValueError("weights must be finite")
        if not np.isfinite(self.b2):
            raise ValueError("weights must be finite")

    @property
    def n_weights(self) -> int:
        return self.hidden_size * (self.input_size + 1) + self.hidden_size + 1

    def to_weight_vector(self) -> np.ndarray:
        """Pack weights as [w1 row-major, b1, w2, b2]."""
        return np.concatenate([self.w1.ravel(), self.b1, self.w2, [self.b2]])

    def with_weights(self, vec: np.ndarray) -> "Network":
        w1, b1, w2, b2 = split_weight_vector(vec, self.input_size, self.hidden_size)
        return replace(self, w1=w1, b1=b1, w2=w2, b2=b2)


def split_weight_vector(vec: np.ndarray, input_size: int, hidden_size: int):
    """Inverse of Network.to_weight_vector; returns views where possible."""
    vec = np.asarray(vec, dtype=np.float64)
    expected = hidden_size * (input_size + 1) + hidden_size + 1
    if vec.shape != (expected,):
        raise LengthMismatch(f"weight vector must have {expected} entries")
    k = hidden_size * input_size
    w1 = vec[:k].reshape(hidden_size, input_size)
    b1 = vec[k : k + hidden_size]
    w2 = vec[k + hidden_size : k + 2 * hidden_size]
    b2 = float(vec[-1])
    return w1, b1, w2, b2


def init_network(input_size: int, hidden_size: int = DEFAULT_HIDDEN,
                 rng: Union[np.random.Generator, int, None] = None,
                 mode: ChannelMode = ChannelMode.X) -> Network:
    """Fresh network: weights uniform on [-0.5, 0.5], biases zero.

    Deterministic given the generator state (w1 is drawn before w2). The
    scaling starts as the identity map on [-1, 1] and is replaced during
    training.
    """
    if input_size < 1 or hidden_size < 1:
        raise InvalidSize("input_size and hidden_size must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    w1 = rng.uniform(-0.5, 0.5, size=(hidden_size, input_size))
    w2 = rng.uniform(-0.5, 0.5, size=hidden_size)
    return Network(input_size=input_size, hidden_size=hidden_size,
                   w1=w1, b1=np.zeros(hidden_size), w2=w2, b2=0.0,
                   mode=mode, norm=NormParams.identity(input_size))


def _as_feature_matrix(network: Network, raw) -> np.ndarray:
    if isinstance(raw, FeatureVector):
        raw = raw.values
    arr = np.asarray(raw, dtype=np.float64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.shape[1] != network.input_size:
        raise LengthMismatch(
            f"expected {network.input_size} input values, got {arr.shape[1]}")
    return arr


def normalize(network: Network, raw) -> np.ndarray:
    """Scaled network input for a raw feature vector (or matrix of them)."""
    if isinstance(raw, FeatureVector):
        raw = raw.values
    arr = np.asarray(raw, dtype=np.float64)
    single = arr.ndim == 1
    out = network.norm.apply(_as_feature_matrix(network, arr))
    return out[0] if single else out


def forward(network: Network, raw) -> float:
    """Network output in the open interval (0, 1) for one feature vector."""
    arr = _as_feature_matrix(network, raw)
    xn = np.ascontiguousarray(network.norm.apply(arr))
    return float(kernels.batch_forward(network.w1, network.b1, network.w2,
                                       network.b2, xn)[0])


def forward_batch(network: Network, features: np.ndarray) -> np.ndarray:
    """Outputs for a (n, input_size) matrix of raw feature vectors."""
    arr = _as_feature_matrix(network, features)
    xn = np.ascontiguousarray(network.norm.apply(arr))
    return kernels.batch_forward(network.w1, network.b1, network.w2,
                                 network.b2, xn)


def outputs_and_jacobian(network: Network, features: np.ndarray):
    """(outputs, residual Jacobian) for a raw feature matrix; the hot path."""
    arr = _as_feature_matrix(network, features)
    if arr.shape[0] == 0:
        raise EmptyBatch("jacobian needs at least one sample")
    xn = np.ascontiguousarray(network.norm.apply(arr))
    jac, y = kernels.batch_jacobian(network.w1, network.b1, network.w2,
                                    network.b2, xn)
    return y, jac


def jacobian(network: Network, batch: Sequence) -> np.ndarray:
    """Residual Jacobian, one row per (feature vector, target) pair.

    Row s, column w holds d(output(x_s) - target_s)/dw; columns follow the
    packed weight-vector order.
    """
    if hasattr(batch, "features"):
        features = batch.features
    else:
        if len(batch) == 0:
            raise EmptyBatch("jacobian needs at least one sample")
        rows = []
        for item in batch:
            vec = item[0]
            rows.append(vec.values if isinstance(vec, FeatureVector) else np.asarray(vec, dtype=np.float64))
        features = np.stack(rows)
    _, jac = outputs_and_jacobian(network, features)
    return jac


def model_to_json(network: Network, threshold: float = DEFAULT_THRESHOLD) -> str:
    doc = {
        "version": MODEL_VERSION,
        "mode": network.mode.value,
        "input_size": network.input_size,
        "hidden_size": network.hidden_size,
        "norm_min": network.norm.lo.tolist(),
        "norm_max": network.norm.hi.tolist(),
        "w1": [row.tolist() for row in network.w1],
        "b1": network.b1.tolist(),
        "w2": network.w2.tolist(),
        "b2": network.b2,
        "threshold": threshold,
    }
    return json.dumps(doc, indent=1)


def save_model(network: Network, path: Union[str, Path],
               threshold: float = DEFAULT_THRESHOLD) -> None:
    atomic_write_text(path, model_to_json(network, threshold) + "\n")


def load_model(path: Union[str, Path]) -> tuple[Network, float]:
    """Read a model file; returns the network and its stored threshold."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("version") != MODEL_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    net = Network(
        input_size=int(doc["input_size"]),
        hidden_size=int(doc["hidden_size"]),
        w1=np.asarray(doc["w1"], dtype=np.float64),
        b1=np.asarray(doc["b1"], dtype=np.float64),
        w2=np.asarray(doc["w2"], dtype=np.float64),
        b2=float(doc["b2"]),
        mode=ChannelMode.parse(doc["mode"]),
        norm=NormParams(lo=doc["norm_min"], hi=doc["norm_max"]),
    )
    return net, float(doc["threshold"])
