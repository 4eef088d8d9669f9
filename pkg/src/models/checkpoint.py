"""Plain-text checkpoint documents for actor-critic networks.

A checkpoint is a JSON document holding every tensor's shape and row-major
values as decimal floats, plus the provenance needed to reproduce it. Floats
are written with the shortest round-tripping representation, so save, load
and save again yields identical bytes.
"""

import logging
from pathlib import Path

import torch
from pydantic import BaseModel, ConfigDict, ValidationError

from src.errors import CheckpointError
from src.models.networks import DTYPE, ActorCritic

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


class TensorBlob(BaseModel):
    model_config = ConfigDict(frozen=True)

    shape: list[int]
    values: list[float]


class CheckpointDocument(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    format_version: int = FORMAT_VERSION
    task: str
    seed: int
    config_hash: str
    episodes: int = 0
    obs_dim: int
    act_dim: int
    hidden_sizes: list[int]
    tensors: dict[str, TensorBlob]


def to_document(
    net: ActorCritic, *, task: str, seed: int, config_hash: str, episodes: int = 0
) -> CheckpointDocument:
    tensors = {
        name: TensorBlob(shape=list(t.shape), values=t.detach().reshape(-1).tolist())
        for name, t in net.state_dict().items()
    }
    return CheckpointDocument(
        task=task,
        seed=seed,
        config_hash=config_hash,
        episodes=episodes,
        obs_dim=net.obs_dim,
        act_dim=net.act_dim,
        hidden_sizes=list(net.hidden_sizes),
        tensors=tensors,
    )


def from_document(doc: CheckpointDocument) -> ActorCritic:
    net = ActorCritic(doc.obs_dim, doc.act_dim, tuple(doc.hidden_sizes))
    expected = net.state_dict()
    if set(expected) != set(doc.tensors):
        mismatch = sorted(set(expected) ^ set(doc.tensors))
        raise CheckpointError(f"tensor names differ from the network layout: {mismatch}")
    state = {}
    for name, blob in doc.tensors.items():
        tensor = torch.tensor(blob.values, dtype=DTYPE)
        if tensor.numel() != expected[name].numel() or list(expected[name].shape) != blob.shape:
            raise CheckpointError(f"{name}: shape {blob.shape} does not match the network")
        state[name] = tensor.reshape(blob.shape)
    net.load_state_dict(state)
    return net


def save_checkpoint(
    path: Path,
    net: ActorCritic,
    *,
    task: str,
    seed: int,
    config_hash: str,
    episodes: int = 0,
) -> CheckpointDocument:
    doc = to_document(net, task=task, seed=seed, config_hash=config_hash, episodes=episodes)
    write_document(path, doc)
    logger.info(f"Saved {task} checkpoint to {path}")
    return doc


def write_document(path: Path, doc: CheckpointDocument) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(doc.model_dump_json(indent=1) + "\n")


def read_document(path: Path) -> CheckpointDocument:
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    try:
        return CheckpointDocument.model_validate_json(path.read_text())
    except ValidationError as e:
        raise CheckpointError(f"malformed checkpoint {path}: {e}") from e


def load_checkpoint(path: Path) -> tuple[ActorCritic, CheckpointDocument]:
    doc = read_document(path)
    if doc.format_version != FORMAT_VERSION:
        raise CheckpointError(f"{path}: unsupported format version {doc.format_version}")
    return from_document(doc), doc
