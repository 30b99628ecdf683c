# Copyright 2026 The factfix Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""Training-free fact correction: masking, retrieval, scoring and voting."""

from __future__ import annotations

import json
from typing import Any, Iterable, Mapping, Sequence

from ._core import (
    FactfixError,
    Index,
    combine,
    mmr_rank,
    ndcg_at_10,
    normalize,
    rouge_l,
    sari,
    tokenize,
)
from . import _core

__all__ = [
    "FactfixError",
    "Index",
    "Pipeline",
    "combine",
    "default_config",
    "index_from_docs",
    "majority_vote",
    "mmr_rank",
    "ndcg_at_10",
    "normalize",
    "rouge_l",
    "sari",
    "tokenize",
]


def default_config(overrides: Mapping[str, Any] | None = None) -> dict:
    """Validated config with `overrides` merged over the defaults."""
    return json.loads(_core.config_json(json.dumps(overrides) if overrides else ""))


def index_from_docs(docs: Iterable[Mapping[str, Any]]) -> Index:
    """Builds an in-memory index from {doc_id, text, title?} records."""
    return Index.from_docs_json(json.dumps(list(docs)))


def majority_vote(
    claim_id: str, votes: Sequence[tuple[str, str, float]], tie_break: str = "BY_SCORE"
) -> dict:
    """Votes are (retriever, text, score) in priority order."""
    return json.loads(_core.majority_vote(claim_id, list(votes), tie_break))


class Pipeline:
    """Per-claim correction with a config dict and an optional index."""

    def __init__(self, config: Mapping[str, Any] | None = None, index: Index | None = None):
        self._impl = _core.Pipeline(json.dumps(config) if config else "", index)

    @property
    def config(self) -> dict:
        return json.loads(self._impl.config_json())

    def run(self, claim: Mapping[str, Any] | str, claim_id: str = "claim") -> dict:
        record = {"id": claim_id, "claim": claim} if isinstance(claim, str) else dict(claim)
        return json.loads(self._impl.run_json(json.dumps(record)))
