"""Levenberg-Marquardt training with validation-based early stopping.

Full-batch damped least squares on the network output: each epoch solves
(J'J + mu*I) delta = J'e with e = target - output, accepting a step only when
it lowers the training sum of squared errors. The 70/15/15 partition and the
best-of-N restart selection live here too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence, Union

import numpy as np
import scipy.linalg

from . import kernels, mlp
from .errors import (
    EmptyBatch,
    EmptyDataset,
    InvalidSize,
    LengthMismatch,
    NumericalFailure,
)
from .fileio import atomic_write_text
from .signal import (
    ChannelMode,
    FeatureVector,
    GestureClass,
    SensorRecording,
    extract_features,
    resample_uniform,
)

MU_FLOOR = 1e-20


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Feature vectors with 0/1 targets and their gesture classes.

    Targets are 1 exactly for smoking items; all feature vectors share one
    length (enforced by the matrix shape).
    """

    mode: ChannelMode
    features: np.ndarray
    targets: np.ndarray
    classes: tuple[GestureClass, ...]

    def __post_init__(self):
        object.__setattr__(self, "features", np.asarray(self.features, dtype=np.float64))
        object.__setattr__(self, "targets", np.asarray(self.targets, dtype=np.float64))
        object.__setattr__(self, "classes", tuple(self.classes))
        if self.features.ndim != 2:
            raise LengthMismatch("features must be a 2-d matrix")
        n = self.features.shape[0]
        if self.targets.shape != (n,) or len(self.classes) != n:
            raise LengthMismatch("features, targets and classes must align")
        for target, cls in zip(self.targets, self.classes):
            if target not in (0.0, 1.0):
                raise ValueError("targets must be exactly 0 or 1")
            if (target == 1.0) != cls.is_smoking:
                raise ValueError("target must be 1 iff the class is smoking")

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def input_size(self) -> int:
        return self.features.shape[1]

    def subset(self, indices: np.ndarray) -> "LabeledDataset":
        indices = np.asarray(indices, dtype=np.intp)
        return LabeledDataset(
            mode=self.mode,
            features=self.features[indices],
            targets=self.targets[indices],
            classes=tuple(self.classes[i] for i in indices),
        )

    def items(self) -> Iterable[tuple[FeatureVector, float, GestureClass]]:
        for i in range(len(self)):
            yield (FeatureVector(mode=self.mode, values=self.features[i]),
                   float(self.targets[i]), self.classes[i])


def build_dataset(recordings: Sequence[SensorRecording], mode: ChannelMode,
                  n: int = 200) -> LabeledDataset:
    """Resample each recording to n points and extract mode features."""
    if len(recordings) == 0:
        raise EmptyDataset("no recordings to build a dataset from")
    feats = np.stack([
        extract_features(resample_uniform(rec, n), mode).values
        for rec in recordings
    ])
    targets = np.array([rec.label.target for rec in recordings])
    classes = tuple(rec.label for rec in recordings)
    return LabeledDataset(mode=mode, features=feats, targets=targets, classes=classes)


@dataclass(frozen=True)
class SplitRatios:
    train: float = 0.70
    val: float = 0.15
    test: float = 0.15

    def __post_init__(self):
        if min(self.train, self.val, self.test) < 0:
            raise ValueError("ratios must be non-negative")
        if abs(self.train + self.val + self.test - 1.0) > 1e-9:
            raise ValueError("ratios must sum to 1")


@dataclass(frozen=True)
class TrainConfig:
    mu0: float = 1e-3
    mu_inc: float = 10.0
    mu_dec: float = 10.0
    mu_max: float = 1e10
    max_epochs: int = 200
    max_val_failures: int = 6
    sse_goal: float = 1e-6

    def __post_init__(self):
        if self.mu0 <= 0 or self.mu_inc <= 1 or self.mu_dec <= 1:
            raise ValueError("mu0 must be positive; mu factors must exceed 1")
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")


class StopReason(Enum):
    CONVERGED = "converged"
    VALIDATION_STOP = "validation_stop"
    EPOCH_LIMIT = "epoch_limit"
    MU_OVERFLOW = "mu_overflow"


@dataclass(frozen=True)
class TrainReport:
    epochs_run: int
    final_train_sse: float
    final_val_sse: float
    stop_reason: StopReason
    train_sse_history: tuple[float, ...]
    val_sse_history: tuple[float, ...]

    def to_json_dict(self) -> dict:
        return {
            "epochs_run": self.epochs_run,
            "final_train_sse": self.final_train_sse,
            "final_val_sse": self.final_val_sse,
            "stop_reason": self.stop_reason.value,
            "train_sse_history": list(self.train_sse_history),
            "val_sse_history": list(self.val_sse_history),
        }


def _half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def partition(dataset: LabeledDataset, ratios: SplitRatios,
              seed: int) -> tuple[LabeledDataset, LabeledDataset, LabeledDataset]:
    """Seeded shuffle, then contiguous cuts at round(N*train), round(N*(train+val)).

    Cuts round half-up so sizes are reproducible for any N; the three parts
    are disjoint and cover the input.
    """
    n = len(dataset)
    if n == 0:
        raise EmptyDataset("cannot partition an empty dataset")
    perm = np.random.default_rng(seed).permutation(n)
    c1 = min(_half_up(n * ratios.train), n)
    c2 = min(_half_up(n * (ratios.train + ratios.val)), n)
    c2 = max(c2, c1)
    return (dataset.subset(perm[:c1]),
            dataset.subset(perm[c1:c2]),
            dataset.subset(perm[c2:]))


def solve_damped(jac: np.ndarray, err: np.ndarray, mu: float) -> np.ndarray:
    """Solve (J'J + mu*I) delta = J'e by a dense symmetric factorization.

    When there are fewer samples than weights the equivalent dual system
    (JJ' + mu*I) alpha = e, delta = J'alpha is solved instead; it is the same
    delta at a fraction of the cost. One iterative-refinement pass keeps the
    residual small.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    jac = np.asarray(jac, dtype=np.float64)
    err = np.asarray(err, dtype=np.float64)
    if jac.ndim != 2 or err.shape != (jac.shape[0],):
        raise LengthMismatch("jacobian rows must match error length")
    if jac.shape[0] == 0:
        raise EmptyBatch("cannot solve with zero samples")
    if not (np.all(np.isfinite(jac)) and np.all(np.isfinite(err))):
        raise NumericalFailure("non-finite jacobian or error")

    m, p = jac.shape
    if p <= m:
        a = jac.T @ jac
        a[np.diag_indices_from(a)] += mu
        rhs = jac.T @ err
        delta = _spd_solve(a, rhs)
    else:
        a = jac @ jac.T
        a[np.diag_indices_from(a)] += mu
        alpha = _spd_solve(a, err)
        delta = jac.T @ alpha
    if not np.all(np.isfinite(delta)):
        raise NumericalFailure("non-finite step")
    return delta


def _spd_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
        x = scipy.linalg.cho_solve(factor, b, check_finite=False)
        # one refinement pass; cheap relative to the factorization
        x += scipy.linalg.cho_solve(factor, b - a @ x, check_finite=False)
        return x
    except scipy.linalg.LinAlgError:
        return np.linalg.solve(a, b)


def batch_sse(network: mlp.Network, dataset: LabeledDataset) -> float:
    """Sum of squared errors of the network on a dataset."""
    y = mlp.forward_batch(network, dataset.features)
    e = dataset.targets - y
    return float(e @ e)


def lm_step(network: mlp.Network, batch: LabeledDataset, mu: float) -> np.ndarray:
    """One damped least-squares candidate: current weights plus delta."""
    if len(batch) == 0:
        raise EmptyBatch("lm_step needs a non-empty batch")
    y, jac = mlp.outputs_and_jacobian(network, batch.features)
    err = batch.targets - y
    delta = solve_damped(jac, err, mu)
    return network.to_weight_vector() + delta


def _dataset_sse(w1, b1, w2, b2, xn, targets) -> float:
    y = kernels.batch_forward(w1, b1, w2, b2, xn)
    e = targets - y
    return float(e @ e)


def train(train_set: LabeledDataset, val_set: LabeledDataset,
          config: TrainConfig = TrainConfig(), seed: int = 0,
          hidden_size: int = mlp.DEFAULT_HIDDEN) -> tuple[mlp.Network, TrainReport]:
    """Train one network; returns it with the report of the run.

    Input scaling is captured from the training split. Stops on the SSE goal,
    on `max_val_failures` epochs without a new best validation SSE (restoring
    the best-validation weights), on the epoch limit, or when mu overflows.
    """
    if len(train_set) == 0 or len(val_set) == 0:
        raise EmptyDataset("train and validation sets must be non-empty")
    if train_set.input_size != val_set.input_size:
        raise LengthMismatch("train and validation feature lengths differ")

    norm = mlp.NormParams.from_features(train_set.features)
    net = mlp.init_network(train_set.input_size, hidden_size,
                           np.random.default_rng(seed), mode=train_set.mode)
    net = replace(net, norm=norm)

    xn_train = np.ascontiguousarray(norm.apply(train_set.features))
    xn_val = np.ascontiguousarray(norm.apply(val_set.features))
    t_train = train_set.targets
    t_val = val_set.targets

    w = net.to_weight_vector()
    isz, hsz = net.input_size, net.hidden_size

    def unpack(vec):
        return mlp.split_weight_vector(vec, isz, hsz)

    mu = config.mu0
    best_val = np.inf
    best_w = w
    val_failures = 0
    train_hist: list[float] = []
    val_hist: list[float] = []
    stop = StopReason.EPOCH_LIMIT

    for _ in range(config.max_epochs):
        w1, b1, w2, b2 = unpack(w)
        jac, y = kernels.batch_jacobian(w1, b1, w2, b2, xn_train)
        err = t_train - y
        current_sse = float(err @ err)
        if not np.isfinite(current_sse):
            raise NumericalFailure("non-finite training error")

        accepted = False
        while True:
            delta = solve_damped(jac, err, mu)
            cand = w + delta
            cand_sse = _dataset_sse(*unpack(cand), xn_train, t_train)
            if np.isfinite(cand_sse) and cand_sse < current_sse:
                w = cand
                current_sse = cand_sse
                mu = max(mu / config.mu_dec, MU_FLOOR)
                accepted = True
                break
            mu *= config.mu_inc
            if mu > config.mu_max:
                break
        if not accepted:
            stop = StopReason.MU_OVERFLOW
            break

        val_sse = _dataset_sse(*unpack(w), xn_val, t_val)
        train_hist.append(current_sse)
        val_hist.append(val_sse)

        if val_sse < best_val:
            best_val = val_sse
            best_w = w
            val_failures = 0
        else:
            val_failures += 1

        if current_sse <= config.sse_goal:
            stop = StopReason.CONVERGED
            break
        if val_failures >= config.max_val_failures:
            stop = StopReason.VALIDATION_STOP
            w = best_w
            break

    final_net = net.with_weights(w.copy())
    report = TrainReport(
        epochs_run=len(train_hist),
        final_train_sse=_dataset_sse(*unpack(w), xn_train, t_train),
        final_val_sse=_dataset_sse(*unpack(w), xn_val, t_val),
        stop_reason=stop,
        train_sse_history=tuple(train_hist),
        val_sse_history=tuple(val_hist),
    )
    return final_net, report


@dataclass(frozen=True)
class RestartSummary:
    index: int
    seed: int
    train_accuracy: float
    epochs_run: int
    final_train_sse: float
    final_val_sse: float
    stop_reason: StopReason

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "seed": self.seed,
            "train_accuracy": self.train_accuracy,
            "epochs_run": self.epochs_run,
            "final_train_sse": self.final_train_sse,
            "final_val_sse": self.final_val_sse,
            "stop_reason": self.stop_reason.value,
        }


def _train_accuracy(network: mlp.Network, dataset: LabeledDataset) -> float:
    y = mlp.forward_batch(network, dataset.features)
    preds = y >= 0.5
    return float(np.mean(preds == (dataset.targets == 1.0)))


def select_best_restart(accuracies: Sequence[float]) -> int:
    """Index of the highest accuracy; ties go to the lowest index."""
    best = 0
    for i in range(1, len(accuracies)):
        if accuracies[i] > accuracies[best]:
            best = i
    return best


def train_best_of(dataset: LabeledDataset, ratios: SplitRatios = SplitRatios(),
                  config: TrainConfig = TrainConfig(), restarts: int = 10,
                  master_seed: int = 0, hidden_size: int = mlp.DEFAULT_HIDDEN,
                  ) -> tuple[mlp.Network, TrainReport, list[RestartSummary]]:
    """Independent restarts on one fixed partition; keeps the restart with
    the highest training-set accuracy at threshold 0.5.

    Restart r initializes from seed master_seed XOR r, so the outcome does
    not depend on the order restarts execute in.
    """
    if restarts < 1:
        raise InvalidSize("restarts must be >= 1")
    train_split, val_split, _ = partition(dataset, ratios, master_seed)
    nets = []
    reports = []
    summaries = []
    for r in range(restarts):
        seed = master_seed ^ r
        net, report = train(train_split, val_split, config, seed, hidden_size)
        acc = _train_accuracy(net, train_split)
        nets.append(net)
        reports.append(report)
        summaries.append(RestartSummary(
            index=r, seed=seed, train_accuracy=acc,
            epochs_run=report.epochs_run,
            final_train_sse=report.final_train_sse,
            final_val_sse=report.final_val_sse,
            stop_reason=report.stop_reason,
        ))
    best = select_best_restart([s.train_accuracy for s in summaries])
    return nets[best], reports[best], summaries


def save_report(report: TrainReport, summaries: Sequence[RestartSummary],
                path: Union[str, Path], selected_index: int | None = None) -> None:
    doc = report.to_json_dict()
    doc["restarts"] = [s.to_json_dict() for s in summaries]
    if selected_index is not None:
        doc["selected_restart"] = selected_index
    atomic_write_text(path, json.dumps(doc, indent=1) + "\n")
