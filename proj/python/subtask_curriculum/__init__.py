# SPDX-License-Identifier: Apache-2.0
"""Curriculum scheduling, loss masking and evaluation metrics for multi-agent trajectories."""

from __future__ import annotations

import json
from typing import Iterable, Optional, Sequence

from . import _core
from ._core import Error, round1

__all__ = [
    "Error",
    "canonicalize_trajectory",
    "validate_trajectory",
    "schedule",
    "training_examples",
    "tgc",
    "sgc",
    "inference_error_rates",
    "round1",
    "flops_per_call",
    "pareto_front",
    "run_cli",
]


def canonicalize_trajectory(text: str) -> str:
    return _core.canonicalize_trajectory(text)


def validate_trajectory(text: str, max_subtasks: int = 12, max_steps_per_subtask: int = 15) -> dict:
    return json.loads(_core.validate_trajectory(text, max_subtasks, max_steps_per_subtask))


def schedule(
    strategy: str,
    kinds: Sequence[str],
    epochs: int,
    seed: Optional[int] = None,
    decrement_mode: str = "mirror",
) -> list[list[int]]:
    """Per-epoch lists of included subtask numbers."""
    doc = json.loads(_core.schedule(strategy, list(kinds), epochs, seed, decrement_mode))
    if doc["violations"]:
        raise Error(f"schedule violates invariants: {doc['violations']}")
    return doc["schedule"]["epochs"]


def training_examples(
    text: str,
    strategy: str,
    epochs: int,
    epoch: int,
    role: str,
    seed: Optional[int] = None,
    history: str = "full_task",
) -> list[dict]:
    return [json.loads(s) for s in _core.training_examples(text, strategy, epochs, epoch, role, seed, history)]


def _jsonl(records: Iterable[dict] | str) -> str:
    if isinstance(records, str):
        return records
    return "\n".join(json.dumps(r) for r in records)


def tgc(records: Iterable[dict] | str) -> float:
    return _core.tgc(_jsonl(records))


def sgc(records: Iterable[dict] | str) -> float:
    return _core.sgc(_jsonl(records))


def inference_error_rates(records: Iterable[dict] | str, min_successful: int = 5) -> dict:
    return json.loads(_core.inference_error_rates(_jsonl(records), min_successful))


def flops_per_call(params: int, tokens_in: int, tokens_out: int) -> int:
    return int(_core.flops_per_call(params, tokens_in, tokens_out))


def pareto_front(points: Iterable[tuple[str, float, float, float]], effectiveness: str = "tgc") -> list[str]:
    """Ids of non-dominated (system_id, mean_flops, tgc, sgc) points."""
    return _core.pareto_front(list(points), effectiveness)


def run_cli(*args: str) -> tuple[int, str, str]:
    return _core.run_cli(list(args))
