import json

import pytest
import torch

from src.errors import CheckpointError
from src.models.checkpoint import load_checkpoint, read_document, save_checkpoint, write_document


def test_round_trip_is_byte_identical(tmp_path, tiny_net):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    save_checkpoint(first, tiny_net, task="steep_turn", seed=4, config_hash="f00d", episodes=12)
    net, doc = load_checkpoint(first)
    save_checkpoint(
        second,
        net,
        task=doc.task,
        seed=doc.seed,
        config_hash=doc.config_hash,
        episodes=doc.episodes,
    )
    assert first.read_bytes() == second.read_bytes()
    for a, b in zip(tiny_net.state_dict().values(), net.state_dict().values(), strict=True):
        assert torch.equal(a, b)


def test_provenance_is_kept(tmp_path, tiny_net):
    path = tmp_path / "c.json"
    save_checkpoint(path, tiny_net, task="baseline", seed=7, config_hash="beef")
    doc = read_document(path)
    assert (doc.task, doc.seed, doc.config_hash) == ("baseline", 7, "beef")
    assert doc.hidden_sizes == [8, 8]


def test_missing_file(tmp_path):
    with pytest.raises(CheckpointError, match="not found"):
        load_checkpoint(tmp_path / "absent.json")


def test_malformed_document(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(CheckpointError, match="malformed"):
        load_checkpoint(path)


def test_unsupported_version(tmp_path, tiny_net):
    path = tmp_path / "v.json"
    doc = save_checkpoint(path, tiny_net, task="steep_turn", seed=0, config_hash="x")
    write_document(path, doc.model_copy(update={"format_version": 99}))
    with pytest.raises(CheckpointError, match="version"):
        load_checkpoint(path)


def test_shape_mismatch(tmp_path, tiny_net):
    path = tmp_path / "s.json"
    save_checkpoint(path, tiny_net, task="steep_turn", seed=0, config_hash="x")
    data = json.loads(path.read_text())
    data["hidden_sizes"] = [16, 8]
    path.write_text(json.dumps(data))
    with pytest.raises(CheckpointError, match="does not match"):
        load_checkpoint(path)


def test_missing_tensor(tmp_path, tiny_net):
    path = tmp_path / "m.json"
    save_checkpoint(path, tiny_net, task="steep_turn", seed=0, config_hash="x")
    data = json.loads(path.read_text())
    del data["tensors"]["log_std"]
    path.write_text(json.dumps(data))
    with pytest.raises(CheckpointError, match="tensor names"):
        load_checkpoint(path)
