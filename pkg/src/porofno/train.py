"""Training machinery: exact reverse-mode gradients, Adam, per-size label
normalization, the mixed-size epoch scheduler, and metrics.

Gradients are hand-derived per operation.  Determinism guarantees: the
ReLU subgradient at 0 is 0, max-pool gradients route to the first argmax
in flat-index order, dropout masks come from a seed-derived stream and
are reused exactly in the backward pass, and batch reductions always run
in sample order.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DataError, DivergenceError
from .model import (
    SPECTRAL_BANKS,
    ModelConfig,
    activation_grad,
    forward_cached,
    pool_regions,
    spectral_conv_backward,
)


@dataclass
class TrainConfig:
    learning_rate: float = 0.001
    batch_size: int = 50
    epochs: int = 100
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    seed: int = 0
    update_granularity: str = "per_minibatch"  # or "per_epoch"

    def validate(self) -> None:
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.epochs < 0:
            raise ConfigError("epochs must be >= 0")
        if self.update_granularity not in ("per_minibatch", "per_epoch"):
            raise ConfigError(f"unknown update_granularity {self.update_granularity!r}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ConfigError("beta1/beta2 must be in [0, 1)")


# ---------------------------------------------------------------------------
# label normalization


@dataclass
class SizeNormalizer:
    """Per-edge-length (k_min, k_max) ranges fitted on the training split."""

    stats: dict[int, tuple[float, float]] = field(default_factory=dict)

    @classmethod
    def fit(cls, labeled: list[tuple[int, float]]) -> "SizeNormalizer":
        groups: dict[int, list[float]] = {}
        for n, k in labeled:
            groups.setdefault(int(n), []).append(float(k))
        stats = {}
        for n, ks in sorted(groups.items()):
            lo, hi = min(ks), max(ks)
            if not hi > lo:
                raise DataError(f"degenerate permeability range at size {n}: [{lo}, {hi}]")
            stats[n] = (lo, hi)
        return cls(stats=stats)

    def _bounds(self, n: int) -> tuple[float, float]:
        if n not in self.stats:
            raise DataError(f"no normalization statistics for edge length {n}")
        return self.stats[n]

    def normalize(self, k: float, n: int) -> float:
        lo, hi = self._bounds(n)
        return (k - lo) / (hi - lo)

    def denormalize(self, khat: float, n: int) -> float:
        lo, hi = self._bounds(n)
        return lo + khat * (hi - lo)

    def bounds_interpolated(self, n: int) -> tuple[float, float]:
        """Bounds for possibly-unseen sizes: piecewise-linear in n, clamped."""
        if n in self.stats:
            return self.stats[n]
        sizes = sorted(self.stats)
        los = np.array([self.stats[s][0] for s in sizes])
        his = np.array([self.stats[s][1] for s in sizes])
        lo = float(np.interp(n, sizes, los))
        hi = float(np.interp(n, sizes, his))
        return lo, hi

    def denormalize_any(self, khat: float, n: int) -> float:
        lo, hi = self.bounds_interpolated(n)
        return lo + khat * (hi - lo)

    def to_json_dict(self) -> dict:
        return {str(n): [lo, hi] for n, (lo, hi) in sorted(self.stats.items())}

    @classmethod
    def from_json_dict(cls, d: dict) -> "SizeNormalizer":
        return cls(stats={int(n): (float(v[0]), float(v[1])) for n, v in d.items()})


# ---------------------------------------------------------------------------
# metrics


def mse_loss(predictions, truths) -> float:
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(truths, dtype=float)
    if p.shape != t.shape or p.size < 1:
        raise ValueError(f"shape mismatch: {p.shape} vs {t.shape}")
    return float(np.mean((p - t) ** 2))


def r2_score(truths, predictions) -> float:
    t = np.asarray(truths, dtype=float)
    p = np.asarray(predictions, dtype=float)
    if t.shape != p.shape or t.size < 2:
        raise ValueError("need at least two paired values")
    ss_tot = float(np.sum((t - t.mean()) ** 2))
    if ss_tot == 0.0:
        raise DataError("coefficient of determination undefined: truths have zero variance")
    ss_res = float(np.sum((t - p) ** 2))
    return 1.0 - ss_res / ss_tot


# ---------------------------------------------------------------------------
# reverse-mode pass


def zero_gradients(params: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    return {name: np.zeros_like(arr) for name, arr in params.items()}


def backward(
    voxels_batch: list[np.ndarray],
    targets,
    params: dict[str, np.ndarray],
    model_cfg: ModelConfig,
    rng: np.random.Generator | None = None,
    train_mode: bool = True,
) -> tuple[float, dict[str, np.ndarray]]:
    """Batch-mean MSE and its exact gradients for every parameter."""
    t = np.asarray(targets, dtype=float)
    if len(voxels_batch) != t.size:
        raise ValueError("batch size mismatch between inputs and targets")
    batch = len(voxels_batch)
    grads = zero_gradients(params)
    preds = np.empty(batch)
    caches = []
    for i, vox in enumerate(voxels_batch):
        pred, cache = forward_cached(vox, params, model_cfg, train_mode=train_mode, rng=rng)
        preds[i] = pred
        caches.append(cache)
    loss = float(np.mean((preds - t) ** 2))
    if not np.isfinite(loss):
        raise DivergenceError(f"non-finite training loss {loss}")
    for i, cache in enumerate(caches):
        dpred = 2.0 * (preds[i] - t[i]) / batch
        _backward_sample(dpred, cache, params, model_cfg, grads)
    return loss, grads


def _backward_sample(dpred, cache, params, cfg, grads) -> None:
    n = cache["n"]
    w = cfg.width

    # classifier, output layer first
    dout = dpred * activation_grad(cfg.output_activation, cache["out_pre"], cache["out_post"])
    last = len(cfg.classifier_sizes) - 1
    grads[f"classifier.{last}.weight"] += np.outer(dout, cache["cls_last_input"])
    grads[f"classifier.{last}.bias"] += dout
    dh = params[f"classifier.{last}.weight"].T @ dout
    for i in range(last - 1, -1, -1):
        lc = cache["cls_layers"][i]
        dact = dh if lc["mask"] is None else dh * lc["mask"]
        dg = dact * activation_grad(cfg.hidden_activation, lc["g"], lc["act"])
        grads[f"classifier.{i}.gain"] += dg * lc["a"]
        grads[f"classifier.{i}.shift"] += dg
        da = dg * params[f"classifier.{i}.gain"]
        grads[f"classifier.{i}.weight"] += np.outer(da, lc["input"])
        grads[f"classifier.{i}.bias"] += da
        dh = params[f"classifier.{i}.weight"].T @ da

    dpooled = dh

    # head
    head_input = cache["head_input"]
    if cfg.head == "static_channel_pool":
        dfield = np.zeros((w, n * n * n))
        if cfg.pool_variant == "max":
            dfield[np.arange(w), cache["pool_argmax"]] = dpooled
        else:
            dfield += dpooled[:, None] / (n * n * n)
        dfield = dfield.reshape(w, n, n, n)
    else:
        dz = np.zeros((n, n, n))
        shape = cache["pool_shape"]
        arginfo = cache["pool_argmax"]
        if cfg.pool_variant == "max":
            for k, (ax, by, cz) in enumerate(arginfo):
                dz[ax, by, cz] += dpooled[k]
        else:
            for k, ((a0, a1), (b0, b1), (c0, c1)) in enumerate(arginfo):
                size = (a1 - a0) * (b1 - b0) * (c1 - c0)
                dz[a0:a1, b0:b1, c0:c1] += dpooled[k] / size
        flat = head_input.reshape(w, -1)
        grads["drop.weight"] += flat @ dz.ravel()
        grads["drop.bias"] += dz.sum()
        dfield = np.outer(params["drop.weight"], dz.ravel()).reshape(w, n, n, n)

    # units in reverse
    for t_idx in range(cfg.num_units - 1, -1, -1):
        uc = cache["units"][t_idx]
        dpre = dfield * activation_grad(cfg.unit_activation, uc["pre"], uc["post"])
        bank_name = f"spectral.{t_idx % SPECTRAL_BANKS}.weights"
        dfield_s, dbank = spectral_conv_backward(dpre, params[bank_name], uc["sc"])
        grads[bank_name] += dbank
        flat_in = uc["input"].reshape(w, -1)
        flat_dpre = dpre.reshape(w, -1)
        grads[f"unit.{t_idx}.weight"] += flat_dpre @ flat_in.T
        grads[f"unit.{t_idx}.bias"] += flat_dpre.sum(axis=1)
        dfield = dfield_s + (params[f"unit.{t_idx}.weight"].T @ flat_dpre).reshape(w, n, n, n)

    # lift (two-stage affine)
    x_flat = cache["x"].reshape(1, -1)
    inner = params["lift.scale"][:, None] * x_flat + params["lift.shift"][:, None]
    dmixed = dfield.reshape(w, -1)
    grads["lift.mix.weight"] += dmixed @ inner.T
    grads["lift.mix.bias"] += dmixed.sum(axis=1)
    dinner = params["lift.mix.weight"].T @ dmixed
    grads["lift.scale"] += dinner @ x_flat.ravel()
    grads["lift.shift"] += dinner.sum(axis=1)


# ---------------------------------------------------------------------------
# Adam


def init_moments(params: dict[str, np.ndarray]) -> dict[str, dict[str, np.ndarray]]:
    moments = {}
    for name, arr in params.items():
        shape = arr.view(np.float64).shape if np.iscomplexobj(arr) else arr.shape
        moments[name] = {"m": np.zeros(shape), "v": np.zeros(shape)}
    return moments


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    moments: dict[str, dict[str, np.ndarray]],
    t: int,
    cfg: TrainConfig,
) -> None:
    """Bias-corrected Adam update, in place.

    Complex parameters are updated through a float view, which treats the
    real and imaginary parts as independent coordinates.
    """
    if t < 1:
        raise ValueError(f"step index must be >= 1, got {t}")
    b1, b2, eps, lr = cfg.beta1, cfg.beta2, cfg.epsilon, cfg.learning_rate
    c1 = 1.0 - b1**t
    c2 = 1.0 - b2**t
    for name, p in params.items():
        g = grads[name]
        if np.iscomplexobj(p):
            p = p.view(np.float64)
            g = np.ascontiguousarray(g).view(np.float64)
        m = moments[name]["m"]
        v = moments[name]["v"]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)


# ---------------------------------------------------------------------------
# epochs


def _batches_for_epoch(
    groups: dict[int, list], batch_size: int, rng: np.random.Generator
) -> list[tuple[int, list]]:
    """Size-homogeneous batches, interleaved cyclically across sizes."""
    per_size: dict[int, list[list]] = {}
    for size in sorted(groups):
        items = groups[size]
        perm = rng.permutation(len(items))
        shuffled = [items[j] for j in perm]
        per_size[size] = [
            shuffled[i : i + batch_size] for i in range(0, len(shuffled), batch_size)
        ]
    out = []
    round_idx = 0
    while True:
        emitted = False
        for size in sorted(per_size):
            if round_idx < len(per_size[size]):
                out.append((size, per_size[size][round_idx]))
                emitted = True
        if not emitted:
            return out
        round_idx += 1


def train_epoch(
    train_groups: dict[int, list[tuple[np.ndarray, float]]],
    val_groups: dict[int, list[tuple[np.ndarray, float]]],
    params: dict[str, np.ndarray],
    moments: dict,
    model_cfg: ModelConfig,
    cfg: TrainConfig,
    epoch_index: int,
    adam_t: int,
) -> tuple[float, float, int]:
    """One pass over the training split; returns (train_loss, val_loss, adam_t)."""
    cfg.validate()
    if not train_groups or any(not g for g in train_groups.values()):
        raise ConfigError("every training size group must be non-empty")
    smallest = min(len(g) for g in train_groups.values())
    if cfg.batch_size > smallest:
        raise ConfigError(
            f"batch_size {cfg.batch_size} exceeds smallest size group ({smallest} samples)"
        )
    rng = np.random.default_rng(np.random.SeedSequence((cfg.seed, epoch_index)))
    batches = _batches_for_epoch(train_groups, cfg.batch_size, rng)

    total = sum(len(g) for g in train_groups.values())
    loss_sum = 0.0
    if cfg.update_granularity == "per_epoch":
        accum = {name: np.zeros_like(arr) for name, arr in params.items()}
    for size, batch in batches:
        vox = [item[0] for item in batch]
        tgt = [item[1] for item in batch]
        loss, grads = backward(vox, tgt, params, model_cfg, rng=rng, train_mode=True)
        loss_sum += loss * len(batch)
        if cfg.update_granularity == "per_minibatch":
            adam_t += 1
            adam_step(params, grads, moments, adam_t, cfg)
        else:
            for name in accum:
                accum[name] += grads[name] * len(batch)
    if cfg.update_granularity == "per_epoch":
        for name in accum:
            accum[name] /= total
        adam_t += 1
        adam_step(params, accum, moments, adam_t, cfg)

    val_loss = evaluate_loss(val_groups, params, model_cfg)
    return loss_sum / total, val_loss, adam_t


def evaluate_loss(
    groups: dict[int, list[tuple[np.ndarray, float]]],
    params: dict[str, np.ndarray],
    model_cfg: ModelConfig,
) -> float:
    """Mean squared error over all samples, dropout disabled."""
    sse = 0.0
    count = 0
    for size in sorted(groups):
        for vox, tgt in groups[size]:
            pred, _ = forward_cached(vox, params, model_cfg, train_mode=False, want_cache=False)
            sse += (pred - tgt) ** 2
            count += 1
    if count == 0:
        raise ConfigError("cannot evaluate loss on an empty split")
    return sse / count
