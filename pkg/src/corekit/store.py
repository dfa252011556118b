"""Warm retention store for local concepts.

Bounded per-user storage with LRU eviction on capacity overflow and TTL
expiry. "Use" for recency purposes means upsert or touch; recency ties on
equal timestamps break by use order, so eviction is fully deterministic
under an injected clock.

Optional persistence: one JSON-lines file per user, last write per
concept_id wins, compacted whenever an eviction removes entries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path

from .concepts import DORMANT, LocalConcept, concept_from_json, concept_to_json, with_status
from .errors import ConfigurationError, NotFoundError


@dataclass(frozen=True)
class StoreConfig:
    capacity_per_user: int = 32
    ttl: timedelta = timedelta(days=30)
    persistence_path: Path | None = None

    def __post_init__(self):
        if self.capacity_per_user < 1:
            raise ConfigurationError("capacity_per_user must be >= 1")
        if self.ttl <= timedelta(0):
            raise ConfigurationError("ttl must be positive")


class WarmStore:
    def __init__(self, config: StoreConfig | None = None):
        self.config = config or StoreConfig()
        self._entries: dict[str, dict[str, LocalConcept]] = {}
        self._use_seq: dict[tuple[str, str], int] = {}
        self._counter = 0
        if self.config.persistence_path:
            self._load_from_disk()

    # -- core operations ----------------------------------------------------

    def upsert(self, user_id: str, concept: LocalConcept) -> list[str]:
        """Store (or replace) a concept; returns evicted concept ids.

        Overflow evicts least-recently-used entries until the user is back
        at capacity; the concept just written is never evicted by its own
        insertion.
        """
        user = self._entries.setdefault(user_id, {})
        user[concept.concept_id] = concept
        self._mark_used(user_id, concept.concept_id)
        evicted = []
        while len(user) > self.config.capacity_per_user:
            victim = min(
                (cid for cid in user if cid != concept.concept_id),
                key=lambda cid: self._recency_key(user_id, cid),
            )
            user.pop(victim)
            self._use_seq.pop((user_id, victim), None)
            evicted.append(victim)
        self._persist_user(user_id, compact=bool(evicted), written=concept)
        return evicted

    def touch(self, user_id: str, concept_id: str, now: datetime) -> LocalConcept:
        """Refresh an entry's recency; returns the updated entry."""
        concept = self._require(user_id, concept_id)
        updated = with_status(concept, concept.status, now)
        self._entries[user_id][concept_id] = updated
        self._mark_used(user_id, concept_id)
        self._persist_user(user_id, compact=False, written=updated)
        return updated

    def evict_expired(self, now: datetime) -> list[str]:
        """Remove every entry older than the TTL; returns ids oldest-first."""
        evicted: list[tuple[tuple, str, str]] = []
        for user_id, user in self._entries.items():
            for cid, concept in user.items():
                if now - concept.last_updated > self.config.ttl:
                    evicted.append((self._recency_key(user_id, cid), user_id, cid))
        evicted.sort()
        out = []
        touched_users = set()
        for _, user_id, cid in evicted:
            self._entries[user_id].pop(cid)
            self._use_seq.pop((user_id, cid), None)
            touched_users.add(user_id)
            out.append(cid)
        for user_id in touched_users:
            self._persist_user(user_id, compact=True)
        return out

    def find_reactivation_candidates(
        self, user_id: str, query_keywords: set[str]
    ) -> list[tuple[str, float]]:
        """Dormant concepts scored against the query keywords, best first
        (score descending, then most recently updated); zero scores omitted."""
        from .text import keyword_similarity

        scored = []
        for concept in self.dormant_concepts(user_id):
            score = keyword_similarity(query_keywords, concept.topic_keywords)
            if score > 0:
                scored.append((concept, score))
        scored.sort(key=lambda pair: (-pair[1], -pair[0].last_updated.timestamp()))
        return [(concept.concept_id, score) for concept, score in scored]

    # -- accessors ----------------------------------------------------------

    def get(self, user_id: str, concept_id: str) -> LocalConcept:
        return self._require(user_id, concept_id)

    def concepts(self, user_id: str) -> list[LocalConcept]:
        return list(self._entries.get(user_id, {}).values())

    def dormant_concepts(self, user_id: str) -> list[LocalConcept]:
        return [c for c in self.concepts(user_id) if c.status == DORMANT]

    def user_count(self, user_id: str) -> int:
        return len(self._entries.get(user_id, {}))

    # -- internals ----------------------------------------------------------

    def _require(self, user_id: str, concept_id: str) -> LocalConcept:
        try:
            return self._entries[user_id][concept_id]
        except KeyError:
            raise NotFoundError(f"no concept {concept_id!r} for user {user_id!r}") from None

    def _mark_used(self, user_id: str, concept_id: str) -> None:
        self._counter += 1
        self._use_seq[(user_id, concept_id)] = self._counter

    def _recency_key(self, user_id: str, concept_id: str) -> tuple:
        concept = self._entries[user_id][concept_id]
        return (concept.last_updated, self._use_seq.get((user_id, concept_id), 0))

    # -- persistence --------------------------------------------------------

    def _user_file(self, user_id: str) -> Path:
        return Path(self.config.persistence_path) / f"{user_id}.jsonl"

    def _persist_user(
        self, user_id: str, compact: bool, written: LocalConcept | None = None
    ) -> None:
        if not self.config.persistence_path:
            return
        path = self._user_file(user_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        user = self._entries.get(user_id, {})
        if compact or not path.exists():
            lines = [concept_to_json(c) for c in user.values()]
            path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        elif written is not None:
            # Append-only fast path; last write per concept_id wins on reload.
            with path.open("a", encoding="utf-8") as fh:
                fh.write(concept_to_json(written) + "\n")

    def _load_from_disk(self) -> None:
        root = Path(self.config.persistence_path)
        if not root.exists():
            return
        for path in sorted(root.glob("*.jsonl")):
            user_id = path.stem
            for line in path.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                concept = concept_from_json(line)
                self._entries.setdefault(user_id, {})[concept.concept_id] = concept
                self._mark_used(user_id, concept.concept_id)
