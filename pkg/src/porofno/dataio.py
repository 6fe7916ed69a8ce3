"""Bit-exact binary persistence for datasets and model checkpoints.

Dataset file ("PFNO", version 1), all integers little-endian:

    magic 4s | format_version u32 | sample_count u64
    per sample:
        edge_length u32 | porosity f64 | permeability_mD f64 (NaN =
        unlabeled) | seed u64 | voxel payload ceil(n^3 / 8) bytes

Voxel bits are packed in x-fastest flat order (index x + n*y + n^2*z),
least-significant bit first within each byte; bit 1 marks pore space.

Checkpoint file ("PFNC", version 1):

    magic 4s | format_version u32 | json_length u32 | UTF-8 JSON
    (model config + normalizer) | array_count u32
    per array:
        name_length u32 | name bytes | dtype tag u8 (0 = f64,
        1 = complex f64) | rank u32 | dims u64[rank] | values LE
"""
from __future__ import annotations

import json
import os
import struct
import tempfile

import numpy as np

from .errors import DataError
from .model import ModelConfig, expected_param_names
from .porous import LabeledSample
from .train import SizeNormalizer

DATASET_MAGIC = b"PFNO"
CHECKPOINT_MAGIC = b"PFNC"
FORMAT_VERSION = 1


def atomic_write(path: str, payload: bytes) -> None:
    """Write via a temp file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def pack_voxels(voxels: np.ndarray) -> bytes:
    bits = np.ravel(voxels.astype(bool), order="F")
    return np.packbits(bits, bitorder="little").tobytes()


def unpack_voxels(payload: bytes, n: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), bitorder="little", count=n**3)
    return bits.astype(bool).reshape((n, n, n), order="F")


def encode_dataset(samples: list[LabeledSample]) -> bytes:
    chunks = [DATASET_MAGIC, struct.pack("<IQ", FORMAT_VERSION, len(samples))]
    for s in samples:
        n = s.edge_length
        chunks.append(struct.pack("<IddQ", n, s.porosity, s.permeability_md, s.seed))
        chunks.append(pack_voxels(s.voxels))
    return b"".join(chunks)


def decode_dataset(blob: bytes) -> list[LabeledSample]:
    off = 0

    def take(count: int) -> bytes:
        nonlocal off
        if off + count > len(blob):
            raise DataError(f"dataset truncated at byte {off} (needed {count} more)")
        piece = blob[off : off + count]
        off += count
        return piece

    if take(4) != DATASET_MAGIC:
        raise DataError("bad dataset magic at byte 0")
    version, count = struct.unpack("<IQ", take(12))
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported dataset version {version} at byte 4")
    samples = []
    for i in range(count):
        header_off = off
        n, porosity, perm, seed = struct.unpack("<IddQ", take(28))
        if n < 1 or n > 4096:
            raise DataError(f"implausible edge length {n} at byte {header_off}")
        payload = take((n**3 + 7) // 8)
        voxels = unpack_voxels(payload, n)
        pore = int(voxels.sum())
        if abs(pore / n**3 - porosity) > 1.0 / n**3 + 1e-12:
            raise DataError(
                f"porosity/popcount mismatch for sample {i} at byte {header_off}"
            )
        samples.append(
            LabeledSample(
                voxels=voxels,
                porosity=porosity,
                permeability_md=perm,
                seed=seed,
                edge_length=n,
            )
        )
    return samples


def write_dataset(path: str, samples: list[LabeledSample]) -> None:
    atomic_write(path, encode_dataset(samples))


def read_dataset(path: str) -> list[LabeledSample]:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read dataset {path}: {exc}") from exc
    return decode_dataset(blob)


# ---------------------------------------------------------------------------
# checkpoints


def _config_to_dict(cfg: ModelConfig) -> dict:
    return {
        "width": cfg.width,
        "modes": list(cfg.modes),
        "num_units": cfg.num_units,
        "head": cfg.head,
        "pool_variant": cfg.pool_variant,
        "classifier_sizes": list(cfg.classifier_sizes),
        "dropout_rate": cfg.dropout_rate,
        "unit_activation": cfg.unit_activation,
        "hidden_activation": cfg.hidden_activation,
        "output_activation": cfg.output_activation,
    }


def _config_from_dict(d: dict) -> ModelConfig:
    return ModelConfig(
        width=int(d["width"]),
        modes=tuple(d["modes"]),
        num_units=int(d["num_units"]),
        head=d["head"],
        pool_variant=d["pool_variant"],
        classifier_sizes=tuple(d["classifier_sizes"]),
        dropout_rate=float(d["dropout_rate"]),
        unit_activation=d["unit_activation"],
        hidden_activation=d["hidden_activation"],
        output_activation=d["output_activation"],
    )


def encode_checkpoint(
    model_cfg: ModelConfig,
    normalizer: SizeNormalizer,
    params: dict[str, np.ndarray],
) -> bytes:
    meta = {
        "model": _config_to_dict(model_cfg),
        "normalizer": normalizer.to_json_dict(),
    }
    blob = json.dumps(meta, sort_keys=True).encode("utf-8")
    chunks = [CHECKPOINT_MAGIC, struct.pack("<II", FORMAT_VERSION, len(blob)), blob]
    chunks.append(struct.pack("<I", len(params)))
    for name, arr in params.items():
        encoded = name.encode("utf-8")
        tag = 1 if np.iscomplexobj(arr) else 0
        dtype = np.complex128 if tag else np.float64
        data = np.ascontiguousarray(arr, dtype=dtype)
        chunks.append(struct.pack("<I", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<BI", tag, data.ndim))
        chunks.append(struct.pack(f"<{data.ndim}Q", *data.shape) if data.ndim else b"")
        chunks.append(data.astype("<c16" if tag else "<f8").tobytes())
    return b"".join(chunks)


def decode_checkpoint(blob: bytes) -> tuple[ModelConfig, SizeNormalizer, dict[str, np.ndarray]]:
    off = 0

    def take(count: int) -> bytes:
        nonlocal off
        if off + count > len(blob):
            raise DataError(f"checkpoint truncated at byte {off}")
        piece = blob[off : off + count]
        off += count
        return piece

    if take(4) != CHECKPOINT_MAGIC:
        raise DataError("bad checkpoint magic at byte 0")
    version, json_len = struct.unpack("<II", take(8))
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported checkpoint version {version}")
    try:
        meta = json.loads(take(json_len).decode("utf-8"))
        model_cfg = _config_from_dict(meta["model"])
        normalizer = SizeNormalizer.from_json_dict(meta["normalizer"])
    except (KeyError, ValueError, UnicodeDecodeError) as exc:
        raise DataError(f"invalid checkpoint metadata: {exc}") from exc
    (count,) = struct.unpack("<I", take(4))
    params: dict[str, np.ndarray] = {}
    for _ in range(count):
        (name_len,) = struct.unpack("<I", take(4))
        name = take(name_len).decode("utf-8")
        tag, rank = struct.unpack("<BI", take(5))
        dims = struct.unpack(f"<{rank}Q", take(8 * rank)) if rank else ()
        size = int(np.prod(dims)) if dims else 1
        width = 16 if tag == 1 else 8
        raw = take(size * width)
        arr = np.frombuffer(raw, dtype="<c16" if tag == 1 else "<f8").reshape(dims)
        params[name] = arr.astype(np.complex128 if tag == 1 else np.float64)
    expected = set(expected_param_names(model_cfg))
    if set(params) != expected:
        missing = expected - set(params)
        extra = set(params) - expected
        raise DataError(
            f"checkpoint arrays do not match the config layout "
            f"(missing {sorted(missing)}, unexpected {sorted(extra)})"
        )
    return model_cfg, normalizer, params


def save_checkpoint(
    path: str,
    model_cfg: ModelConfig,
    normalizer: SizeNormalizer,
    params: dict[str, np.ndarray],
) -> None:
    atomic_write(path, encode_checkpoint(model_cfg, normalizer, params))


def load_checkpoint(path: str) -> tuple[ModelConfig, SizeNormalizer, dict[str, np.ndarray]]:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise DataError(f"cannot read checkpoint {path}: {exc}") from exc
    return decode_checkpoint(blob)
