import json
import random
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from oracle import naive_self_intersection
from sicgram.census import (
    ENGINE_VERSION,
    Checkpoint,
    CheckpointMismatch,
    Histogram,
    ShardInterrupted,
    ShardSpec,
    census,
    merge,
    run_shard,
    shard_specs,
)
from sicgram.intersection import PUNCTURED_TORUS, SurfaceOrder
from sicgram.words import christoffel, count_classes, enumerate_classes, parse_word

histograms = st.dictionaries(st.integers(0, 40), st.integers(1, 1000), max_size=12).map(
    lambda bins: Histogram(9, bins)
)


def oracle_histogram(n):
    h = Histogram(n)
    for w in enumerate_classes(n):
        h.add(naive_self_intersection(str(w)))
    return h


class TestHistogram:
    def test_no_zero_bins(self):
        h = Histogram(3)
        h.add(2, 0)
        assert h.bins == {}

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            Histogram(3).add(-1)

    def test_json_round_trip(self):
        h = Histogram(5, {0: 16, 2: 24, 1: 8})
        assert Histogram.from_json(json.loads(json.dumps(h.to_json()))) == h


class TestMerge:
    def test_examples(self):
        assert merge(Histogram(1, {0: 1}), Histogram(1, {0: 2})).bins == {0: 3}
        h = Histogram(4, {1: 3})
        assert merge(h, Histogram(4)) == h

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            merge(Histogram(3), Histogram(4))

    @given(histograms, histograms, histograms)
    def test_associative_commutative(self, h1, h2, h3):
        assert merge(merge(h1, h2), h3) == merge(h1, merge(h2, h3))
        assert merge(h1, h2) == merge(h2, h1)
        assert merge(h1, h2).total == h1.total + h2.total


class TestShards:
    def test_default_count(self):
        assert len(shard_specs(20, 3)) == 36

    def test_prefix_clamped(self):
        assert all(s.prefix_len == 2 for s in shard_specs(2, 5))

    def test_invalid(self):
        with pytest.raises(ValueError):
            ShardSpec(3, parse_word("aA"))
        with pytest.raises(ValueError):
            ShardSpec(0)

    def test_checkpoint_name(self):
        assert ShardSpec(5, parse_word("abA")).checkpoint_name == "shard-abA.ckpt.json"


class TestRunShard:
    def test_length_one(self):
        assert run_shard(ShardSpec(1)).bins == {0: 4}

    def test_length_two(self):
        assert run_shard(ShardSpec(2)).bins == {0: 4}

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_matches_oracle(self, n):
        assert run_shard(ShardSpec(n)) == oracle_histogram(n)

    def test_shards_partition(self):
        whole = run_shard(ShardSpec(9))
        total = Histogram(9)
        for spec in shard_specs(9, 2):
            total = merge(total, run_shard(spec))
        assert total == whole

    def test_tiny_batches(self):
        assert run_shard(ShardSpec(7), batch_size=1) == run_shard(ShardSpec(7))


class TestCheckpoint:
    def test_resume_from_every_cadence(self, tmp_path):
        spec = ShardSpec(8, parse_word("a"))
        expected = run_shard(spec)
        path = tmp_path / spec.checkpoint_name
        with pytest.raises(ShardInterrupted):
            run_shard(spec, checkpoint_path=path, checkpoint_every=10, stop_after=57)
        ckpt = Checkpoint.load(path)
        assert not ckpt.complete
        assert ckpt.partial.total == 50
        assert run_shard(spec, checkpoint=ckpt, checkpoint_path=path, checkpoint_every=10) == expected
        done = Checkpoint.load(path)
        assert done.complete and done.partial == expected
        assert run_shard(spec, checkpoint=done) == expected

    def test_random_kill_points(self, tmp_path):
        spec = ShardSpec(9)
        expected = run_shard(spec)
        rng = random.Random(3)
        path = tmp_path / "ckpt.json"
        for cut in sorted(rng.sample(range(1, count_classes(9)), 5)):
            path.unlink(missing_ok=True)
            with pytest.raises(ShardInterrupted):
                run_shard(spec, checkpoint_path=path, checkpoint_every=97, stop_after=cut)
            ckpt = Checkpoint.load(path) if path.exists() else None
            assert run_shard(spec, checkpoint=ckpt, checkpoint_path=path, checkpoint_every=97) == expected

    def test_interrupt_saves_cursor(self, tmp_path, monkeypatch):
        import sicgram.census as census_mod

        spec = ShardSpec(8)
        expected = run_shard(spec)
        calls = {"n": 0}
        real = census_mod.self_intersection_batch

        def flaky(*args, **kwargs):
            calls["n"] += 1
            if calls["n"] == 3:
                raise KeyboardInterrupt
            return real(*args, **kwargs)

        monkeypatch.setattr(census_mod, "self_intersection_batch", flaky)
        path = tmp_path / "c.json"
        with pytest.raises(KeyboardInterrupt):
            run_shard(spec, checkpoint_path=path, batch_size=50)
        monkeypatch.setattr(census_mod, "self_intersection_batch", real)
        ckpt = Checkpoint.load(path)
        assert ckpt.partial.total == 100
        assert run_shard(spec, checkpoint=ckpt) == expected

    def test_mismatches_refused(self):
        spec = ShardSpec(6, parse_word("a"))
        good = Checkpoint(spec, None, Histogram(6))
        with pytest.raises(CheckpointMismatch):
            run_shard(ShardSpec(6, parse_word("b")), checkpoint=good)
        with pytest.raises(CheckpointMismatch):
            run_shard(spec, checkpoint=Checkpoint(spec, None, Histogram(6), engine_version="other/0"))
        with pytest.raises(CheckpointMismatch):
            run_shard(spec, checkpoint=Checkpoint(spec, None, Histogram(6), order=SurfaceOrder.from_text("aBAb")))
        with pytest.raises(CheckpointMismatch):
            run_shard(spec, checkpoint=good, order=SurfaceOrder.from_text("aBAb"))

    def test_json_round_trip(self, tmp_path):
        spec = ShardSpec(7, parse_word("ab"))
        ckpt = Checkpoint(spec, parse_word("abAbbAB"), Histogram(7, {3: 2, 0: 1}))
        path = tmp_path / spec.checkpoint_name
        ckpt.save(path)
        assert Checkpoint.load(path) == ckpt
        assert json.loads(path.read_text())["engine_version"] == ENGINE_VERSION
        assert [p.name for p in tmp_path.iterdir()] == [spec.checkpoint_name]


class TestCensus:
    def test_small_totals(self):
        assert census(4).total == 18
        assert census(1).bins == {0: 4}

    @pytest.mark.parametrize("n", [5, 8])
    def test_matches_oracle(self, n):
        assert census(n) == oracle_histogram(n)

    def test_independent_of_sharding(self):
        base = census(10, prefix_len=0)
        for k in (1, 2, 3, 4, 10, 12):
            assert census(10, prefix_len=k) == base

    def test_workers(self):
        assert census(9, workers=3) == census(9, workers=1)

    def test_checkpoint_dir_reuse(self, tmp_path):
        first = census(8, checkpoint_dir=tmp_path, prefix_len=2)
        files = sorted(p.name for p in tmp_path.iterdir())
        assert len(files) == 12
        assert all(Checkpoint.load(tmp_path / f).complete for f in files)
        assert census(8, checkpoint_dir=tmp_path, prefix_len=2) == first

    def test_simple_classes_in_bin_zero(self):
        import math

        for n in range(2, 11):
            simple = {
                christoffel(p, n - p, (s, t))
                for p in range(n + 1)
                if math.gcd(p, n - p) == 1
                for s in (1, -1)
                for t in (1, -1)
            }
            boundary = 2 if n == 4 else 0
            assert census(n).bins[0] == len(simple) + boundary

    def test_mass_law_enforced(self, monkeypatch):
        import sicgram.census as census_mod

        monkeypatch.setattr(census_mod, "count_classes", lambda n, primitive_only=True: 5)
        with pytest.raises(census_mod.CensusError):
            census(3)

    def test_bad_workers(self):
        with pytest.raises(ValueError):
            census(3, workers=0)
