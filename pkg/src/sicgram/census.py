"""Exhaustive per-length census of self-intersection numbers.

The classes of length ``n`` are split into shards by the first letters of
their canonical word.  Each shard is walked in lexicographic order, its
words are scored in compiled batches, and the per-shard histograms are
summed.  Shards write resumable checkpoints so long runs survive restarts.
"""

from __future__ import annotations

import json
import logging
import os
import re
import tempfile
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from sicgram.intersection import PUNCTURED_TORUS, SurfaceOrder, self_intersection_batch
from sicgram.words import (
    Letter,
    NecklaceWalk,
    count_classes,
    format_word,
    is_reduced,
    parse_word,
    reduced_prefixes,
)

log = logging.getLogger(__name__)

ENGINE_VERSION = "sicgram-linked-pairs/1"
CHECKPOINT_EVERY = 1 << 20
DEFAULT_PREFIX_LEN = 3


_PAIR = re.compile(r"\[\s+(-?\d+),\s+(-?\d+)\s+\]")


def dump_json(doc: dict) -> str:
    """Indented JSON with each ``[k, count]`` pair kept on one line."""
    return _PAIR.sub(r"[\1, \2]", json.dumps(doc, indent=2)) + "\n"


class CensusError(RuntimeError):
    pass


class CheckpointMismatch(ValueError):
    pass


class ShardInterrupted(Exception):
    """Raised by the ``stop_after`` test hook to simulate a killed worker."""


@dataclass
class Histogram:
    """Counts of classes by self-intersection number.  Zero bins are never stored."""

    length: int | None
    bins: dict[int, int] = field(default_factory=dict)

    def add(self, k: int, count: int = 1) -> None:
        if k < 0 or count < 0:
            raise ValueError(f"bad histogram entry {k}: {count}")
        if count:
            self.bins[k] = self.bins.get(k, 0) + count

    def add_counts(self, values: np.ndarray) -> None:
        counts = np.bincount(values)
        for k in np.flatnonzero(counts).tolist():
            self.add(k, int(counts[k]))

    @property
    def total(self) -> int:
        return sum(self.bins.values())

    def items(self) -> list[tuple[int, int]]:
        return sorted(self.bins.items())

    def copy(self) -> Histogram:
        return Histogram(self.length, dict(self.bins))

    def to_json(self) -> dict:
        return {"length": self.length, "bins": [list(kv) for kv in self.items()]}

    @classmethod
    def from_json(cls, data: dict) -> Histogram:
        h = cls(data.get("length"))
        for k, count in data["bins"]:
            h.add(int(k), int(count))
        return h


def merge(h1: Histogram, h2: Histogram) -> Histogram:
    if h1.length != h2.length:
        raise ValueError(f"cannot merge histograms of lengths {h1.length} and {h2.length}")
    out = h1.copy()
    for k, count in h2.bins.items():
        out.add(k, count)
    return out


@dataclass(frozen=True)
class ShardSpec:
    length: int
    prefix: tuple[Letter, ...] = ()

    def __post_init__(self):
        if self.length < 1:
            raise ValueError(f"length must be positive, got {self.length}")
        if len(self.prefix) > self.length or not is_reduced(self.prefix):
            raise ValueError(f"invalid shard prefix {format_word(self.prefix)!r}")

    @property
    def prefix_len(self) -> int:
        return len(self.prefix)

    @property
    def name(self) -> str:
        return format_word(self.prefix)

    @property
    def checkpoint_name(self) -> str:
        return f"shard-{self.name}.ckpt.json"


def shard_specs(n: int, prefix_len: int = DEFAULT_PREFIX_LEN) -> list[ShardSpec]:
    """Shards keyed by every reduced prefix of length ``min(prefix_len, n)``."""
    if prefix_len < 0:
        raise ValueError(f"prefix length must be non-negative, got {prefix_len}")
    return [ShardSpec(n, p) for p in reduced_prefixes(min(prefix_len, n))]


@dataclass
class Checkpoint:
    shard: ShardSpec
    last_emitted: tuple[Letter, ...] | None
    partial: Histogram
    engine_version: str = ENGINE_VERSION
    order: SurfaceOrder = PUNCTURED_TORUS
    complete: bool = False

    def to_json(self) -> dict:
        return {
            "shard": {"length": self.shard.length, "prefix": self.shard.name},
            "last_emitted": None if self.last_emitted is None else format_word(self.last_emitted),
            "partial": self.partial.to_json(),
            "engine_version": self.engine_version,
            "order": self.order.to_text(),
            "complete": self.complete,
        }

    @classmethod
    def from_json(cls, data: dict) -> Checkpoint:
        shard = ShardSpec(int(data["shard"]["length"]), parse_word(data["shard"]["prefix"]))
        cursor = data["last_emitted"]
        return cls(
            shard=shard,
            last_emitted=None if cursor is None else parse_word(cursor),
            partial=Histogram.from_json(data["partial"]),
            engine_version=data["engine_version"],
            order=SurfaceOrder.from_text(data["order"]),
            complete=bool(data["complete"]),
        )

    def dumps(self) -> str:
        return dump_json(self.to_json())

    def save(self, path: str | os.PathLike) -> None:
        """Write atomically: temp file in the same directory, then rename."""
        path = Path(path)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="ascii", newline="\n") as f:
                f.write(self.dumps())
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise

    @classmethod
    def load(cls, path: str | os.PathLike) -> Checkpoint:
        return cls.from_json(json.loads(Path(path).read_text(encoding="ascii")))


def _validate_checkpoint(ckpt: Checkpoint, spec: ShardSpec, order: SurfaceOrder) -> None:
    if ckpt.shard != spec:
        raise CheckpointMismatch(
            f"checkpoint is for shard {ckpt.shard.name!r} at length {ckpt.shard.length}, "
            f"not {spec.name!r} at length {spec.length}"
        )
    if ckpt.engine_version != ENGINE_VERSION:
        raise CheckpointMismatch(
            f"checkpoint engine {ckpt.engine_version!r} differs from {ENGINE_VERSION!r}; "
            "counts are not comparable"
        )
    if ckpt.order != order:
        raise CheckpointMismatch(
            f"checkpoint surface order {ckpt.order.to_text()!r} differs from {order.to_text()!r}"
        )
    if ckpt.partial.length != spec.length:
        raise CheckpointMismatch("checkpoint histogram length does not match the shard")


def run_shard(
    spec: ShardSpec,
    order: SurfaceOrder = PUNCTURED_TORUS,
    checkpoint: Checkpoint | None = None,
    *,
    checkpoint_path: str | os.PathLike | None = None,
    checkpoint_every: int = CHECKPOINT_EVERY,
    batch_size: int = 4096,
    stop_after: int | None = None,
) -> Histogram:
    """Histogram of the primitive classes in one shard.

    With ``checkpoint`` the walk resumes after its cursor.  With
    ``checkpoint_path`` progress is saved every ``checkpoint_every`` classes,
    on Ctrl-C, and on completion.  ``stop_after`` aborts without saving
    after that many classes, as a crash would.
    """
    if checkpoint is not None:
        _validate_checkpoint(checkpoint, spec, order)
        if checkpoint.complete:
            return checkpoint.partial.copy()
        hist = checkpoint.partial.copy()
        cursor = checkpoint.last_emitted
    else:
        hist = Histogram(spec.length)
        cursor = None

    walk = NecklaceWalk(spec.length, spec.prefix, start_after=cursor)
    buf = np.empty((max(1, batch_size), spec.length), dtype=np.uint8)
    since_save = 0
    done = 0

    def save(complete: bool = False) -> None:
        if checkpoint_path is not None:
            Checkpoint(spec, cursor, hist, ENGINE_VERSION, order, complete).save(checkpoint_path)

    try:
        while not walk.exhausted:
            want = min(len(buf), checkpoint_every - since_save)
            if stop_after is not None:
                if done >= stop_after:
                    raise ShardInterrupted(f"stopped after {done} classes")
                want = min(want, stop_after - done)
            got = walk.fill(buf[:want])
            if not got:
                continue
            hist.add_counts(self_intersection_batch(buf, order, count=got))
            cursor = tuple(Letter(x) for x in buf[got - 1].tolist())
            done += got
            since_save += got
            if since_save >= checkpoint_every:
                save()
                since_save = 0
    except KeyboardInterrupt:
        save()
        raise
    save(complete=True)
    return hist


def _run_shard_job(args: tuple) -> tuple[str, Histogram]:
    spec, order, ckpt_dir, every = args
    checkpoint = None
    path = None
    if ckpt_dir is not None:
        path = Path(ckpt_dir) / spec.checkpoint_name
        if path.exists():
            checkpoint = Checkpoint.load(path)
    hist = run_shard(spec, order, checkpoint, checkpoint_path=path, checkpoint_every=every)
    return spec.name, hist


def census(
    n: int,
    order: SurfaceOrder = PUNCTURED_TORUS,
    workers: int = 1,
    prefix_len: int = DEFAULT_PREFIX_LEN,
    checkpoint_dir: str | os.PathLike | None = None,
    *,
    checkpoint_every: int = CHECKPOINT_EVERY,
    progress: Callable[[str, Histogram], None] | None = None,
) -> Histogram:
    """Complete histogram for length ``n``; the total is checked against the count formula."""
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    specs = shard_specs(n, prefix_len)
    if checkpoint_dir is not None:
        Path(checkpoint_dir).mkdir(parents=True, exist_ok=True)
    jobs = [(spec, order, checkpoint_dir, checkpoint_every) for spec in specs]

    result = Histogram(n)
    if workers == 1:
        for job in jobs:
            name, hist = _run_shard_job(job)
            result = merge(result, hist)
            if progress:
                progress(name, hist)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_shard_job, job) for job in jobs]
            try:
                for fut in futures:
                    name, hist = fut.result()
                    result = merge(result, hist)
                    if progress:
                        progress(name, hist)
            except BaseException:
                for fut in futures:
                    fut.cancel()
                raise

    expected = count_classes(n, primitive_only=True)
    if result.total != expected:
        raise CensusError(
            f"census of length {n} found {result.total} classes, expected {expected}"
        )
    return result
