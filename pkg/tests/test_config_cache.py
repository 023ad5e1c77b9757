import json
import threading

import numpy as np
import pytest

from gl1hom import evaluation
from gl1hom.braid import parse_braid
from gl1hom.chaincomplex import Calibration
from gl1hom.config import Config, load_config
from gl1hom.corpus import read_corpus, shipped_corpus_path
from gl1hom.errors import InputError
from gl1hom.gramcache import CACHE_VERSION, GramStore
from gl1hom.homology import compute


def test_defaults():
    cfg = load_config(env={})
    assert cfg == Config()
    assert cfg.calibration == Calibration()


def test_file_and_env_overrides(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"threads": 3, "timeout": 5, "calibration": {"v_weight": 0, "mirror": False}}))
    cfg = load_config(str(path), env={"GL1HOM_THREADS": "2", "GL1HOM_CACHE_DIR": "/x", "GL1HOM_STRAND_CAP": "6"})
    assert cfg.threads == 2
    assert cfg.timeout == 5.0
    assert cfg.cache_dir == "/x"
    assert cfg.strand_cap == 6
    assert cfg.calibration.v_weight == 0 and not cfg.calibration.mirror
    assert cfg.calibration.q_shift == Calibration().q_shift


def test_config_from_env_path(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"calibration": {"q_shift": [0, 0, 0, 0]}}))
    assert load_config(env={"GL1HOM_CONFIG": str(path)}).calibration.q_shift == (0, 0, 0, 0)


def test_bad_calibration_length(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"calibration": {"hom_shift": [1, 0]}}))
    with pytest.raises(ValueError):
        load_config(str(path), env={})


def test_store_round_trip(tmp_path):
    store = GramStore(tmp_path)
    g = np.array([[0, -1], [-1, 0]], dtype=np.int64)
    assert store.get((2, (1,))) is None
    store.put((2, (1,)), g)
    assert np.array_equal(store.get((2, (1,))), g)
    (f,) = tmp_path.iterdir()
    assert f.name.startswith(f"gram-v{CACHE_VERSION}-k2-t1-")
    assert store.get((3, (1,))) is None


def test_store_ignores_corrupt_records(tmp_path):
    store = GramStore(tmp_path)
    store.put((2, (1,)), np.eye(2, dtype=np.int64))
    (f,) = tmp_path.iterdir()
    f.write_bytes(b"junk")
    assert store.get((2, (1,))) is None


def test_concurrent_writers(tmp_path):
    store = GramStore(tmp_path)
    g = np.arange(16, dtype=np.int64).reshape(4, 4)
    threads = [threading.Thread(target=store.put, args=((3, (1, 2)), g)) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert [p.suffix for p in tmp_path.iterdir()] == [".npz"]
    assert np.array_equal(store.get((3, (1, 2))), g)


def test_cache_transparency(tmp_path):
    braid = parse_braid("AbAbA")
    try:
        evaluation.clear_caches()
        evaluation.set_gram_store(GramStore(tmp_path))
        cold = compute(braid)
        assert any(tmp_path.iterdir())
        evaluation.clear_caches()
        warm = compute(braid)
    finally:
        evaluation.set_gram_store(None)
        evaluation.clear_caches()
    assert cold == warm == compute(braid)


def test_shipped_corpus_parses():
    entries = read_corpus(shipped_corpus_path())
    assert len(entries) == 249
    assert entries[0].name == "3_1" and entries[0].expected == "1 + t^2q^-4 + tq^-4"
    assert entries[0].expected_total_rank == 3
    missing = {e.name for e in entries if e.expected is None}
    assert {"9_35", "10_1"} <= missing


@pytest.mark.parametrize(
    "text",
    [
        "name,poly\n3_1,AAA\n",
        "name,braid,expected,expected_total_rank\n3_1,A0A,,\n",
        "name,braid,expected,expected_total_rank\n3_1,AAA,1 +,\n",
        "name,braid,expected,expected_total_rank\n3_1,AAA,1,x\n",
    ],
)
def test_corpus_errors(tmp_path, text):
    path = tmp_path / "c.csv"
    path.write_text(text)
    with pytest.raises(InputError):
        read_corpus(path)


def test_corpus_missing_file(tmp_path):
    with pytest.raises(InputError):
        read_corpus(tmp_path / "nope.csv")
