"""Size-invariant Fourier-operator regressor for cubic binary inputs.

Architecture: a per-voxel two-stage affine lift (scalar -> width, then a
width x width mixer), a stack of Fourier units (low-mode spectral
convolution plus a pointwise affine, ReLU), one of two heads, and a small
MLP ending in a sigmoid.

Heads:
  * static_channel_pool - global max (or mean) over all voxels per
    channel; the resulting vector has length ``width`` for every grid
    size, which is what makes mixed-size training possible.
  * adaptive_spatial_pool - project channels back to a scalar field, then
    adaptive 3-D max pooling onto a fixed output shape whose cell count
    equals ``width``.

Spectral weights live in a fixed bank of three sets regardless of the
unit count; unit t uses bank ``t % 3``.  With the default three units
this is plainly one set per unit.  Mode truncation keeps the corner
blocks k1 in {0..m1-1} u {n-m1..n-1} (k2 alike) and k3 in {0..m3-1} of
the half spectrum; on the k3 = 0 plane conjugate-paired bins share
Hermitian-tied weights and unpaired bins are dropped so outputs stay
exactly real.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, GridSizeError

SPECTRAL_BANKS = 3


@dataclass
class ModelConfig:
    width: int = 64
    modes: tuple[int, int, int] = (2, 2, 2)
    num_units: int = 3
    head: str = "static_channel_pool"  # or "adaptive_spatial_pool"
    pool_variant: str = "max"  # or "mean"
    classifier_sizes: tuple[int, ...] = (128, 128, 1)
    dropout_rate: float = 0.3
    unit_activation: str = "relu"
    hidden_activation: str = "relu"
    output_activation: str = "sigmoid"

    def validate(self) -> None:
        if self.width < 1:
            raise ConfigError(f"width must be >= 1, got {self.width}")
        if len(self.modes) != 3 or any(m < 1 for m in self.modes):
            raise ConfigError(f"modes must be three integers >= 1, got {self.modes}")
        if self.num_units < 1:
            raise ConfigError(f"num_units must be >= 1, got {self.num_units}")
        if self.head not in ("static_channel_pool", "adaptive_spatial_pool"):
            raise ConfigError(f"unknown head {self.head!r}")
        if self.pool_variant not in ("max", "mean"):
            raise ConfigError(f"unknown pool_variant {self.pool_variant!r}")
        if len(self.classifier_sizes) < 1 or self.classifier_sizes[-1] != 1:
            raise ConfigError("classifier_sizes must end in 1")
        if not (0.0 <= self.dropout_rate < 1.0):
            raise ConfigError(f"dropout_rate must be in [0, 1), got {self.dropout_rate}")
        for name in (self.unit_activation, self.hidden_activation, self.output_activation):
            if name not in ("relu", "sigmoid"):
                raise ConfigError(f"unknown activation {name!r}")
        if self.head == "adaptive_spatial_pool":
            pool_factorization(self.width)  # raises if impossible

    def min_edge_length(self) -> int:
        return 2 * max(self.modes)


# ---------------------------------------------------------------------------
# activations


def apply_activation(name: str, x: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(x, 0.0)
    out = np.empty_like(x)
    np.negative(np.abs(x), out=out)
    np.exp(out, out=out)
    # stable sigmoid via sign split
    pos = x >= 0
    out = np.where(pos, 1.0 / (1.0 + out), out / (1.0 + out))
    return out


def activation_grad(name: str, x_pre: np.ndarray, y_post: np.ndarray) -> np.ndarray:
    """d(activation)/d(pre-activation); the ReLU subgradient at 0 is 0."""
    if name == "relu":
        return (x_pre > 0).astype(float)
    return y_post * (1.0 - y_post)


# ---------------------------------------------------------------------------
# retained-mode bookkeeping


@dataclass(frozen=True)
class CornerBasis:
    """Precomputed DFT factors for the retained corner modes at one n."""

    n: int
    modes: tuple[int, int, int]
    freqs1: np.ndarray
    freqs2: np.ndarray
    analysis1: np.ndarray  # (n, 2*m1) e^{-2 pi i f1 x / n}
    analysis2: np.ndarray
    analysis3: np.ndarray  # (n, m3)
    synth1: np.ndarray  # (2*m1, n) e^{+2 pi i f1 x / n}
    synth2: np.ndarray
    synth3_re: np.ndarray  # (2*m3 - 1, n), extended k3 list [0..m3-1, -1..-(m3-1)]
    synth3_im: np.ndarray
    neg1: np.ndarray  # position of the negated frequency, -1 if not retained
    neg2: np.ndarray
    paired: np.ndarray  # (2*m1, 2*m2) bool, both negations retained


def _corner_freqs(m: int) -> np.ndarray:
    return np.concatenate([np.arange(m), np.arange(-m, 0)])


def _negation_positions(freqs: np.ndarray) -> np.ndarray:
    pos = {int(f): i for i, f in enumerate(freqs)}
    return np.array([pos.get(-int(f), -1) for f in freqs], dtype=np.int64)


@lru_cache(maxsize=None)
def corner_basis(n: int, m1: int, m2: int, m3: int) -> CornerBasis:
    x = np.arange(n)
    f1, f2 = _corner_freqs(m1), _corner_freqs(m2)
    f3 = np.arange(m3)
    f3ext = np.concatenate([f3, -np.arange(1, m3)])
    ang = 2.0 * np.pi / n
    neg1, neg2 = _negation_positions(f1), _negation_positions(f2)
    synth3 = np.exp(1j * ang * np.outer(f3ext, x))
    return CornerBasis(
        n=n,
        modes=(m1, m2, m3),
        freqs1=f1,
        freqs2=f2,
        analysis1=np.exp(-1j * ang * np.outer(x, f1)),
        analysis2=np.exp(-1j * ang * np.outer(x, f2)),
        analysis3=np.exp(-1j * ang * np.outer(x, f3)),
        synth1=np.exp(1j * ang * np.outer(f1, x)),
        synth2=np.exp(1j * ang * np.outer(f2, x)),
        synth3_re=np.ascontiguousarray(synth3.real),
        synth3_im=np.ascontiguousarray(synth3.imag),
        neg1=neg1,
        neg2=neg2,
        paired=(neg1[:, None] >= 0) & (neg2[None, :] >= 0),
    )


def check_edge_length(n: int, modes: tuple[int, int, int]) -> None:
    need = 2 * max(modes)
    if n < need:
        raise GridSizeError(
            f"edge length {n} too small for modes {tuple(modes)}: "
            f"requires at least 2*max(modes) = {need} voxels"
        )


def effective_spectral_weights(weights: np.ndarray, basis: CornerBasis) -> np.ndarray:
    """Hermitian-tie the k3 = 0 plane; drop bins without a retained partner."""
    eff = weights.copy()
    plane = weights[:, :, 0]
    partner = plane[np.ix_(np.maximum(basis.neg1, 0), np.maximum(basis.neg2, 0))]
    sym = 0.5 * (plane + np.conj(partner))
    eff[:, :, 0] = np.where(basis.paired[:, :, None, None], sym, 0.0)
    return eff


def spectral_weight_grad_from_effective(grad_eff: np.ndarray, basis: CornerBasis) -> np.ndarray:
    """Adjoint of :func:`effective_spectral_weights`."""
    grad = grad_eff.copy()
    plane = np.where(basis.paired[:, :, None, None], grad_eff[:, :, 0], 0.0)
    partner = plane[np.ix_(np.maximum(basis.neg1, 0), np.maximum(basis.neg2, 0))]
    gathered = np.where(basis.paired[:, :, None, None], np.conj(partner), 0.0)
    grad[:, :, 0] = 0.5 * plane + 0.5 * gathered
    return grad


# ---------------------------------------------------------------------------
# spectral convolution (single sample, channel-first field)


def spectral_conv_forward(field: np.ndarray, weights: np.ndarray, cache: dict | None = None) -> np.ndarray:
    """Low-mode spectral convolution of a (width, n, n, n) field.

    ``weights`` is complex with shape (2*m1, 2*m2, m3, width, width); the
    output is exactly real by construction.
    """
    w, n = field.shape[0], field.shape[1]
    if field.shape != (w, n, n, n):
        raise ValueError(f"field is not channel-first cubic: {field.shape}")
    m1, m2, m3 = weights.shape[0] // 2, weights.shape[1] // 2, weights.shape[2]
    check_edge_length(n, (m1, m2, m3))
    b = corner_basis(n, m1, m2, m3)

    t1 = (field.reshape(w * n * n, n) @ b.analysis3).reshape(w, n, n, m3)
    t2 = np.tensordot(t1, b.analysis2, axes=([2], [0]))  # (w, n, m3, 2m2)
    t3 = np.tensordot(t2, b.analysis1, axes=([1], [0]))  # (w, m3, 2m2, 2m1)
    coeffs = t3.transpose(3, 2, 1, 0)  # (2m1, 2m2, m3, w)

    eff = effective_spectral_weights(weights, b)
    mixed = np.matmul(eff, coeffs[..., None])[..., 0]  # (2m1, 2m2, m3, w)

    ext = _extend_k3(mixed, b)
    u1 = np.tensordot(ext, b.synth1, axes=([0], [0]))  # (2m2, 2m3e, w, nx)
    u2 = np.tensordot(u1, b.synth2, axes=([0], [0]))  # (2m3e, w, nx, ny)
    out = np.tensordot(u2.real, b.synth3_re, axes=([0], [0]))
    out -= np.tensordot(u2.imag, b.synth3_im, axes=([0], [0]))
    out /= n**3

    if cache is not None:
        cache["coeffs"] = coeffs
        cache["basis"] = b
    return out


def _extend_k3(mixed: np.ndarray, b: CornerBasis) -> np.ndarray:
    """Append conjugate bins for k3 in {-1..-(m3-1)}; unpaired bins are zero."""
    m3 = b.modes[2]
    if m3 == 1:
        return mixed
    partner = mixed[np.ix_(np.maximum(b.neg1, 0), np.maximum(b.neg2, 0))][:, :, 1:]
    tail = np.where(b.paired[:, :, None, None], np.conj(partner), 0.0)
    return np.concatenate([mixed, tail], axis=2)


def spectral_conv_backward(
    grad_out: np.ndarray, weights: np.ndarray, cache: dict
) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of :func:`spectral_conv_forward` w.r.t. field and weights.

    Complex gradients follow the d/dRe + i d/dIm convention, i.e. real and
    imaginary parts are treated as independent real coordinates.
    """
    b: CornerBasis = cache["basis"]
    coeffs = cache["coeffs"]
    n = b.n
    m1, m2, m3 = b.modes
    w = grad_out.shape[0]

    gu2 = np.tensordot(grad_out, b.synth3_re, axes=([3], [1])).astype(complex)
    gu2 -= 1j * np.tensordot(grad_out, b.synth3_im, axes=([3], [1]))
    gu2 = gu2.transpose(3, 0, 1, 2) / n**3  # (2m3e, w, nx, ny)
    gu1 = np.tensordot(gu2, np.conj(b.synth2), axes=([3], [1])).transpose(3, 0, 1, 2)
    gext = np.tensordot(gu1, np.conj(b.synth1), axes=([3], [1])).transpose(3, 0, 1, 2)

    gmixed = gext[:, :, :m3].copy()
    if m3 > 1:
        gathered = np.conj(
            gext[:, :, m3:][np.ix_(np.maximum(b.neg1, 0), np.maximum(b.neg2, 0))]
        )
        gmixed[:, :, 1:] += np.where(b.paired[:, :, None, None], gathered, 0.0)

    eff = effective_spectral_weights(weights, b)
    gcoeffs = np.matmul(np.conj(eff).transpose(0, 1, 2, 4, 3), gmixed[..., None])[..., 0]
    geff = gmixed[..., None] * np.conj(coeffs)[..., None, :]
    gweights = spectral_weight_grad_from_effective(geff, b)

    gt3 = gcoeffs.transpose(3, 2, 1, 0)  # (w, m3, 2m2, 2m1)
    gt2 = np.tensordot(gt3, np.conj(b.analysis1), axes=([3], [1])).transpose(0, 3, 1, 2)
    gt1 = np.tensordot(gt2, np.conj(b.analysis2), axes=([3], [1])).transpose(0, 1, 3, 2)
    flat = gt1.reshape(w * n * n, m3)
    gfield = flat.real @ b.analysis3.real.T
    gfield += flat.imag @ b.analysis3.imag.T
    return gfield.reshape(w, n, n, n), gweights


def spectral_conv(field: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Public forward-only spectral convolution."""
    return spectral_conv_forward(field, weights)


# ---------------------------------------------------------------------------
# remaining ops


def lift(voxels: np.ndarray, params: dict[str, np.ndarray]) -> np.ndarray:
    """Per-voxel affine map from the scalar input to width channels.

    Implemented as scalar->width followed by a width->width mixer; the
    composition is still one affine map per voxel.
    """
    x = np.asarray(voxels, dtype=float)
    n = x.shape[0]
    inner = params["lift.scale"][:, None] * x.reshape(1, -1) + params["lift.shift"][:, None]
    mixed = params["lift.mix.weight"] @ inner + params["lift.mix.bias"][:, None]
    return mixed.reshape(-1, n, n, n)


def pointwise_affine(field: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    w, n = field.shape[0], field.shape[1]
    out = weight @ field.reshape(w, -1)
    out += bias[:, None]
    return out.reshape(weight.shape[0], n, n, n)


def fno_unit(
    field: np.ndarray,
    weights: np.ndarray,
    pw_weight: np.ndarray,
    pw_bias: np.ndarray,
    activation: str = "relu",
) -> np.ndarray:
    """One Fourier unit: activation(spectral_conv + pointwise affine)."""
    pre = spectral_conv_forward(field, weights)
    pre += pointwise_affine(field, pw_weight, pw_bias)
    return apply_activation(activation, pre)


def channel_max_pool(field: np.ndarray, variant: str = "max") -> np.ndarray:
    """Global per-channel pooling; output length = width for any n."""
    w = field.shape[0]
    flat = field.reshape(w, -1)
    if variant == "max":
        return flat.max(axis=1)
    if variant == "mean":
        return flat.mean(axis=1)
    raise ConfigError(f"unknown pool variant {variant!r}")


def project_drop(field: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Per-voxel affine from width channels back to a scalar field."""
    w = field.shape[0]
    out = weight @ field.reshape(w, -1)
    return (out + bias).reshape(field.shape[1:])


def pool_factorization(width: int) -> tuple[int, int, int]:
    """Factor width into the most balanced ordered triple (lexicographic ties)."""
    best: tuple[int, tuple[int, int, int]] | None = None
    for a in range(1, width + 1):
        if width % a:
            continue
        rest = width // a
        for b in range(1, rest + 1):
            if rest % b:
                continue
            c = rest // b
            triple = (a, b, c)
            span = max(triple) - min(triple)
            if best is None or (span, triple) < best:
                best = (span, triple)
    if best is None:
        raise ConfigError(f"width {width} admits no factor triple")
    return best[1]


def pool_regions(n: int, parts: int) -> list[tuple[int, int]]:
    """Adaptive-pooling region bounds [floor(i*n/p), ceil((i+1)*n/p)) per part."""
    return [
        (int(np.floor(i * n / parts)), int(np.ceil((i + 1) * n / parts)))
        for i in range(parts)
    ]


def adaptive_max_pool3d(volume: np.ndarray, out_shape: tuple[int, int, int]) -> np.ndarray:
    """Adaptive 3-D max pooling, flattened in row-major cell order."""
    n = volume.shape[0]
    if volume.shape != (n, n, n):
        raise ValueError(f"volume is not cubic: {volume.shape}")
    for parts in out_shape:
        if parts > n:
            raise ConfigError(
                f"adaptive pool output {out_shape} exceeds grid edge {n}"
            )
    r1, r2, r3 = (pool_regions(n, p) for p in out_shape)
    out = np.empty(out_shape[0] * out_shape[1] * out_shape[2])
    k = 0
    for a0, a1 in r1:
        for b0, b1 in r2:
            for c0, c1 in r3:
                out[k] = volume[a0:a1, b0:b1, c0:c1].max()
                k += 1
    return out


def classifier_forward(
    features: np.ndarray,
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
) -> float:
    """MLP head; dropout (inverted scaling) is active only in train mode."""
    if train_mode and cfg.dropout_rate > 0.0 and rng is None:
        raise ConfigError("train-mode classifier needs an rng for dropout")
    h = features
    n_layers = len(cfg.classifier_sizes)
    for i in range(n_layers - 1):
        a = params[f"classifier.{i}.weight"] @ h + params[f"classifier.{i}.bias"]
        a = params[f"classifier.{i}.gain"] * a + params[f"classifier.{i}.shift"]
        h = apply_activation(cfg.hidden_activation, a)
        if train_mode and cfg.dropout_rate > 0.0:
            keep = 1.0 - cfg.dropout_rate
            mask = (rng.random(h.shape) >= cfg.dropout_rate) / keep
            h = h * mask
    last = n_layers - 1
    out = params[f"classifier.{last}.weight"] @ h + params[f"classifier.{last}.bias"]
    return float(apply_activation(cfg.output_activation, out)[0])


def model_forward(
    voxels: np.ndarray,
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
) -> float:
    """Full network: lift, Fourier units, head, classifier."""
    pred, _ = forward_cached(voxels, params, cfg, train_mode=train_mode, rng=rng, want_cache=False)
    return pred


# ---------------------------------------------------------------------------
# cached forward used by both inference and the training backward pass


def forward_cached(
    voxels: np.ndarray,
    params: dict[str, np.ndarray],
    cfg: ModelConfig,
    train_mode: bool = False,
    rng: np.random.Generator | None = None,
    want_cache: bool = True,
) -> tuple[float, dict]:
    cfg.validate()
    x = np.asarray(voxels, dtype=float)
    n = x.shape[0]
    if x.shape != (n, n, n):
        raise ValueError(f"voxel grid is not cubic: {x.shape}")
    check_edge_length(n, cfg.modes)

    cache: dict = {"x": x, "units": [], "n": n}
    h = lift(x, params)
    if want_cache:
        cache["lifted"] = h

    for t in range(cfg.num_units):
        bank = params[f"spectral.{t % SPECTRAL_BANKS}.weights"]
        unit_cache: dict = {"input": h} if want_cache else None
        sc_cache: dict = {} if want_cache else None
        pre = spectral_conv_forward(h, bank, cache=sc_cache)
        pre += pointwise_affine(h, params[f"unit.{t}.weight"], params[f"unit.{t}.bias"])
        h = apply_activation(cfg.unit_activation, pre)
        if want_cache:
            unit_cache["sc"] = sc_cache
            unit_cache["pre"] = pre
            unit_cache["post"] = h
            cache["units"].append(unit_cache)

    if cfg.head == "static_channel_pool":
        flat = h.reshape(cfg.width, -1)
        if cfg.pool_variant == "max":
            argmax = flat.argmax(axis=1)
            pooled = flat[np.arange(cfg.width), argmax]
            if want_cache:
                cache["pool_argmax"] = argmax
        else:
            pooled = flat.mean(axis=1)
        if want_cache:
            cache["head_input"] = h
    else:
        z = project_drop(h, params["drop.weight"], params["drop.bias"])
        out_shape = pool_factorization(cfg.width)
        for parts in out_shape:
            if parts > n:
                raise ConfigError(
                    f"adaptive pool shape {out_shape} needs edge length >= {max(out_shape)}, got {n}"
                )
        pooled, region_argmax = _adaptive_pool_with_argmax(z, out_shape, cfg.pool_variant)
        if want_cache:
            cache["head_input"] = h
            cache["projected"] = z
            cache["pool_shape"] = out_shape
            cache["pool_argmax"] = region_argmax

    if want_cache:
        cache["pooled"] = pooled

    # classifier with recorded intermediates
    hvec = pooled
    n_layers = len(cfg.classifier_sizes)
    layer_cache = []
    for i in range(n_layers - 1):
        inp = hvec
        a = params[f"classifier.{i}.weight"] @ hvec + params[f"classifier.{i}.bias"]
        g = params[f"classifier.{i}.gain"] * a + params[f"classifier.{i}.shift"]
        act = apply_activation(cfg.hidden_activation, g)
        if train_mode and cfg.dropout_rate > 0.0:
            if rng is None:
                raise ConfigError("train-mode forward needs an rng for dropout")
            keep = 1.0 - cfg.dropout_rate
            mask = (rng.random(act.shape) >= cfg.dropout_rate) / keep
        else:
            mask = None
        hvec = act if mask is None else act * mask
        layer_cache.append({"input": inp, "a": a, "g": g, "act": act, "mask": mask})
    last = n_layers - 1
    out_pre = params[f"classifier.{last}.weight"] @ hvec + params[f"classifier.{last}.bias"]
    out_post = apply_activation(cfg.output_activation, out_pre)
    if want_cache:
        cache["cls_layers"] = layer_cache
        cache["cls_last_input"] = hvec
        cache["out_pre"] = out_pre
        cache["out_post"] = out_post
    return float(out_post[0]), cache


def _adaptive_pool_with_argmax(
    volume: np.ndarray, out_shape: tuple[int, int, int], variant: str
) -> tuple[np.ndarray, list]:
    n = volume.shape[0]
    r1, r2, r3 = (pool_regions(n, p) for p in out_shape)
    cells = out_shape[0] * out_shape[1] * out_shape[2]
    out = np.empty(cells)
    arginfo = []
    k = 0
    for a0, a1 in r1:
        for b0, b1 in r2:
            for c0, c1 in r3:
                block = volume[a0:a1, b0:b1, c0:c1]
                if variant == "max":
                    flat_idx = int(block.argmax())
                    out[k] = block.ravel()[flat_idx]
                    local = np.unravel_index(flat_idx, block.shape)
                    arginfo.append((a0 + local[0], b0 + local[1], c0 + local[2]))
                else:
                    out[k] = block.mean()
                    arginfo.append(((a0, a1), (b0, b1), (c0, c1)))
                k += 1
    return out, arginfo


# ---------------------------------------------------------------------------
# parameters


def expected_param_names(cfg: ModelConfig) -> list[str]:
    names = ["lift.scale", "lift.shift", "lift.mix.weight", "lift.mix.bias"]
    names += [f"spectral.{b}.weights" for b in range(SPECTRAL_BANKS)]
    for t in range(cfg.num_units):
        names += [f"unit.{t}.weight", f"unit.{t}.bias"]
    if cfg.head == "adaptive_spatial_pool":
        names += ["drop.weight", "drop.bias"]
    n_layers = len(cfg.classifier_sizes)
    for i in range(n_layers - 1):
        names += [
            f"classifier.{i}.weight",
            f"classifier.{i}.bias",
            f"classifier.{i}.gain",
            f"classifier.{i}.shift",
        ]
    names += [f"classifier.{n_layers - 1}.weight", f"classifier.{n_layers - 1}.bias"]
    return names


def init_params(cfg: ModelConfig, seed: int = 0) -> dict[str, np.ndarray]:
    """Deterministic initialization.

    Affine weights use the uniform fan-in scheme; spectral weights are
    complex uniform scaled by 1/width^2; the lift mixer starts at the
    identity so the composed lift equals a plain affine at step 0; gains
    start at one, shifts at zero.
    """
    cfg.validate()
    rng = np.random.default_rng(seed)
    w = cfg.width
    m1, m2, m3 = cfg.modes
    params: dict[str, np.ndarray] = {}
    params["lift.scale"] = rng.uniform(-1.0, 1.0, w)
    params["lift.shift"] = rng.uniform(-1.0, 1.0, w)
    params["lift.mix.weight"] = np.eye(w)
    params["lift.mix.bias"] = np.zeros(w)
    scale_r = 1.0 / w**2
    for bank in range(SPECTRAL_BANKS):
        shape = (2 * m1, 2 * m2, m3, w, w)
        params[f"spectral.{bank}.weights"] = scale_r * (
            rng.uniform(0.0, 1.0, shape) + 1j * rng.uniform(0.0, 1.0, shape)
        )
    bound = 1.0 / np.sqrt(w)
    for t in range(cfg.num_units):
        params[f"unit.{t}.weight"] = rng.uniform(-bound, bound, (w, w))
        params[f"unit.{t}.bias"] = rng.uniform(-bound, bound, w)
    if cfg.head == "adaptive_spatial_pool":
        params["drop.weight"] = rng.uniform(-bound, bound, w)
        params["drop.bias"] = rng.uniform(-bound, bound, 1)
    sizes = (w,) + tuple(cfg.classifier_sizes)
    n_layers = len(cfg.classifier_sizes)
    for i in range(n_layers):
        fan_in = sizes[i]
        lim = 1.0 / np.sqrt(fan_in)
        params[f"classifier.{i}.weight"] = rng.uniform(-lim, lim, (sizes[i + 1], fan_in))
        params[f"classifier.{i}.bias"] = rng.uniform(-lim, lim, sizes[i + 1])
        if i < n_layers - 1:
            params[f"classifier.{i}.gain"] = np.ones(sizes[i + 1])
            params[f"classifier.{i}.shift"] = np.zeros(sizes[i + 1])
    return params


def parameter_count(params: dict[str, np.ndarray]) -> int:
    """Real-valued parameter count; complex entries count their two parts."""
    total = 0
    for arr in params.values():
        total += arr.size * (2 if np.iscomplexobj(arr) else 1)
    return total
