"""Query reformulation: ranked expansion suggestions from the context base.

A (possibly partial) query is matched on its last token against validated
context pairs; the pairs' right sides come back as ranked suggestions and can
be appended to the query, either manually or automatically.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from datetime import datetime

from .context_store import ContextEntry, ContextStore, UserProfile, normalize_term, now_utc
from .text_pipeline import segment

# Auto mode appends at most the top two suggestions; expansions are capped at
# four added terms overall (small additions hedge engines that degrade on
# long queries).
AUTO_SUGGESTION_LIMIT = 2
MAX_ADDED_TERMS = 4

BASE_WEIGHT = {"static": 1.0, "dynamic": 0.5}
DOMAIN_BONUS = 1.0
SECONDS_PER_DAY = 86400.0


@dataclass(frozen=True)
class Suggestion:
    value: str
    source_entry_ids: tuple[str, ...]
    score: float
    preview: str

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "source_entry_ids": list(self.source_entry_ids),
            "score": self.score,
            "preview": self.preview,
        }


@dataclass(frozen=True)
class ReformulatedQuery:
    original: str
    expanded: str
    added_terms: tuple[str, ...]
    mode: str  # off | manual | auto

    def to_dict(self) -> dict:
        return {
            "original": self.original,
            "expanded": self.expanded,
            "added_terms": list(self.added_terms),
            "mode": self.mode,
        }


def identity_reformulation(query: str) -> ReformulatedQuery:
    return ReformulatedQuery(original=query, expanded=query, added_terms=(), mode="off")


def score_suggestion(
    entries: list[ContextEntry],
    profile: UserProfile,
    now: datetime | None = None,
) -> float:
    """Score one suggestion value backed by ``entries`` (all the same value).

    Per entry: kind base (static 1.0 / dynamic 0.5) + ln(1 + use_count)
    + 1/(1 + age_in_days since last use). A single bonus is added when the
    value matches a profile domain or a specialty token, which is how the
    static context feeds back into ranking.
    """
    if not entries:
        raise ValueError("entries must be non-empty")
    ts = now or now_utc()
    score = 0.0
    for entry in entries:
        age_days = max(0.0, (ts - entry.last_used_at).total_seconds()) / SECONDS_PER_DAY
        score += BASE_WEIGHT[entry.kind] + math.log(1 + entry.use_count) + 1.0 / (1.0 + age_days)
    value = entries[0].value
    specialty_tokens = {t.surface for t in segment(profile.specialty)}
    if value in profile.domains or value in specialty_tokens:
        score += DOMAIN_BONUS
    return score


def expand(query: str, terms: list[str] | tuple[str, ...]) -> ReformulatedQuery:
    """Append terms to the query, skipping ones already present.

    Terms are added in the given order, space-separated, at most
    ``MAX_ADDED_TERMS`` of them; original tokens are never reordered.
    """
    present = {t.surface for t in segment(query)}
    added: list[str] = []
    for term in terms:
        value = normalize_term(term)
        if not value or value in present:
            continue
        if len(added) >= MAX_ADDED_TERMS:
            break
        added.append(value)
        present.add(value)
        present.update(t.surface for t in segment(value))
    if not added:
        return ReformulatedQuery(original=query, expanded=query, added_terms=(), mode="manual")
    suffix = " ".join(added)
    expanded = f"{query.rstrip()} {suffix}" if query.strip() else suffix
    return ReformulatedQuery(original=query, expanded=expanded, added_terms=tuple(added), mode="manual")


def suggest(
    store: ContextStore,
    profile_id: str,
    partial_query: str,
    limit: int = 10,
    now: datetime | None = None,
) -> list[Suggestion]:
    """Rank expansion values for the query's last token.

    Validated entries whose attribute equals the last token, or extends it
    (support for matching while the user is still typing), are grouped by
    value, scored, and ordered by (score desc, value asc). Values already in
    the query are excluded.
    """
    if limit < 1:
        raise ValueError("limit must be >= 1")
    profile = store.get_profile(profile_id)
    tokens = segment(partial_query)
    if not tokens:
        return []
    last = tokens[-1].surface
    query_tokens = {t.surface for t in tokens}

    groups: dict[str, list[ContextEntry]] = {}
    for entry in store.query_entries(profile_id, last, {"validated"}):
        if entry.value in query_tokens:
            continue
        groups.setdefault(entry.value, []).append(entry)

    ts = now or now_utc()
    suggestions = [
        Suggestion(
            value=value,
            source_entry_ids=tuple(e.id for e in entries),
            score=score_suggestion(entries, profile, ts),
            preview=expand(partial_query, [value]).expanded,
        )
        for value, entries in groups.items()
    ]
    suggestions.sort(key=lambda s: (-s.score, s.value))
    return suggestions[:limit]


def auto_reformulate(
    store: ContextStore,
    profile_id: str,
    query: str,
    now: datetime | None = None,
) -> ReformulatedQuery:
    """Expand with the top suggestions, or fall back to the identity.

    Consumed entries get their use_count/last_used_at bumped so frequently
    helpful pairs rank higher next time.
    """
    suggestions = suggest(store, profile_id, query, AUTO_SUGGESTION_LIMIT, now)
    if not suggestions:
        return identity_reformulation(query)
    reformulated = expand(query, [s.value for s in suggestions])
    if not reformulated.added_terms:
        return identity_reformulation(query)
    consumed = [
        entry_id
        for suggestion in suggestions
        if suggestion.value in reformulated.added_terms
        for entry_id in suggestion.source_entry_ids
    ]
    store.record_entry_use(profile_id, consumed, now)
    return dataclasses.replace(reformulated, mode="auto")
