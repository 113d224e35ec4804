"""File-backed store for user profiles, context entries, and search history.

Layout under the data directory (``PRESY_DATA_DIR``, default ``./presy-data``):

* ``profiles/<id>.json`` — one document per profile, entries included
* ``history/<id>.jsonl``  — one JSON object per line, append-only

Mutations to a profile are serialized behind a per-profile lock; readers get
copies, never live references. The store is single-process by design.
"""
from __future__ import annotations

import dataclasses
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    IllegalTransition,
    InvalidField,
    MalformedRecord,
    UnknownEntry,
    UnknownProfile,
)
from .text_pipeline import LANGUAGE_CODE_RE, AntiDictionary, load_anti_dictionary, segment

DATA_DIR_ENV = "PRESY_DATA_DIR"
DEFAULT_DATA_DIR = "presy-data"

SEXES = ("female", "male", "unspecified")
STUDY_LEVELS = ("primary", "secondary", "undergraduate", "graduate", "doctoral", "unspecified")
KINDS = ("static", "dynamic")
STATUSES = ("proposed", "validated", "rejected")

MAX_HISTORY_RESULTS = 10


def now_utc() -> datetime:
    return datetime.now(timezone.utc)


def to_rfc3339(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat()


def parse_rfc3339(text: str) -> datetime:
    return datetime.fromisoformat(text)


def normalize_term(term: str) -> str:
    """Case-fold and trim; no stemming."""
    return term.strip().casefold()


def new_id() -> str:
    return uuid.uuid4().hex


@dataclass(frozen=True)
class UserProfile:
    id: str
    age: int
    sex: str
    language: str
    domains: tuple[str, ...]
    specialty: str
    profession: str
    study_level: str
    created_at: datetime

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "age": self.age,
            "sex": self.sex,
            "language": self.language,
            "domains": list(self.domains),
            "specialty": self.specialty,
            "profession": self.profession,
            "study_level": self.study_level,
            "created_at": to_rfc3339(self.created_at),
        }


@dataclass
class ContextEntry:
    id: str
    profile_id: str
    kind: str
    attribute: str
    value: str
    status: str
    use_count: int
    created_at: datetime
    last_used_at: datetime

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "profile_id": self.profile_id,
            "kind": self.kind,
            "attribute": self.attribute,
            "value": self.value,
            "status": self.status,
            "use_count": self.use_count,
            "created_at": to_rfc3339(self.created_at),
            "last_used_at": to_rfc3339(self.last_used_at),
        }


@dataclass(frozen=True)
class HistoryRecord:
    profile_id: str
    timestamp: datetime
    raw_query: str
    reformulated_query: str | None
    engine_id: str
    result_titles: tuple[str, ...]
    result_urls: tuple[str, ...]
    total_estimate_baseline: int
    total_estimate_reformulated: int
    id: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "profile_id": self.profile_id,
            "timestamp": to_rfc3339(self.timestamp),
            "raw_query": self.raw_query,
            "reformulated_query": self.reformulated_query,
            "engine_id": self.engine_id,
            "result_titles": list(self.result_titles),
            "result_urls": list(self.result_urls),
            "total_estimate_baseline": self.total_estimate_baseline,
            "total_estimate_reformulated": self.total_estimate_reformulated,
        }


def derive_static_entries(
    profile: UserProfile,
    dictionary: AntiDictionary,
    now: datetime | None = None,
) -> list[ContextEntry]:
    """Turn identification-profile fields into validated static pairs.

    Each domain pairs bidirectionally with every non-stop-word specialty
    token; profession tokens point at every domain. Duplicates collapse,
    stop-word values are never stored.
    """
    ts = now or now_utc()
    specialty_tokens = [
        t.surface for t in segment(profile.specialty) if t.surface not in dictionary.words
    ]
    profession_tokens = [
        t.surface for t in segment(profile.profession) if t.surface not in dictionary.words
    ]
    pairs: list[tuple[str, str]] = []
    for domain in profile.domains:
        for tok in specialty_tokens:
            pairs.append((domain, tok))
            pairs.append((tok, domain))
    for tok in profession_tokens:
        for domain in profile.domains:
            pairs.append((tok, domain))

    entries: list[ContextEntry] = []
    seen: set[tuple[str, str]] = set()
    for attribute, value in pairs:
        if not attribute or not value or value in dictionary.words:
            continue
        if (attribute, value) in seen:
            continue
        seen.add((attribute, value))
        entries.append(
            ContextEntry(
                id=new_id(),
                profile_id=profile.id,
                kind="static",
                attribute=attribute,
                value=value,
                status="validated",
                use_count=0,
                created_at=ts,
                last_used_at=ts,
            )
        )
    return entries


class _ProfileState:
    __slots__ = ("profile", "entries", "pair_index", "idempotency_key", "lock")

    def __init__(self, profile: UserProfile, idempotency_key: str | None = None) -> None:
        self.profile = profile
        self.entries: dict[str, ContextEntry] = {}
        self.pair_index: dict[tuple[str, str], str] = {}
        self.idempotency_key = idempotency_key
        self.lock = threading.RLock()


class ContextStore:
    """Single-writer-per-profile store over plain JSON files."""

    def __init__(self, data_dir: Path | str | None = None) -> None:
        if data_dir is None:
            data_dir = os.environ.get(DATA_DIR_ENV, DEFAULT_DATA_DIR)
        self.data_dir = Path(data_dir)
        self.profiles_dir = self.data_dir / "profiles"
        self.history_dir = self.data_dir / "history"
        self.profiles_dir.mkdir(parents=True, exist_ok=True)
        self.history_dir.mkdir(parents=True, exist_ok=True)
        self._states: dict[str, _ProfileState] = {}
        self._entry_owner: dict[str, str] = {}
        self._registry_lock = threading.RLock()
        self._dictionaries: dict[str, AntiDictionary] = {}

    # -- anti-dictionary access ------------------------------------------

    def anti_dictionary(self, language: str) -> AntiDictionary:
        dictionary = self._dictionaries.get(language)
        if dictionary is None:
            dictionary = load_anti_dictionary(language, self.data_dir)
            self._dictionaries[language] = dictionary
        return dictionary

    # -- profiles ---------------------------------------------------------

    def create_profile(
        self,
        *,
        age: int,
        sex: str = "unspecified",
        language: str,
        domains: Sequence[str] = (),
        specialty: str = "",
        profession: str = "",
        study_level: str = "unspecified",
        idempotency_key: str | None = None,
    ) -> UserProfile:
        if idempotency_key is not None:
            existing = self._find_by_idempotency_key(idempotency_key)
            if existing is not None:
                return existing

        if not isinstance(age, int) or isinstance(age, bool) or age < 0:
            raise InvalidField("age must be a whole number of years >= 0")
        if sex not in SEXES:
            raise InvalidField(f"sex must be one of {', '.join(SEXES)}")
        if study_level not in STUDY_LEVELS:
            raise InvalidField(f"study_level must be one of {', '.join(STUDY_LEVELS)}")
        if not isinstance(language, str) or not LANGUAGE_CODE_RE.match(language):
            raise InvalidField("language must be exactly two lowercase ASCII letters")
        dictionary = self.anti_dictionary(language)  # raises UnsupportedLanguage

        normalized_domains: list[str] = []
        for domain in domains:
            term = normalize_term(domain)
            if term and term not in normalized_domains:
                normalized_domains.append(term)

        profile = UserProfile(
            id=new_id(),
            age=age,
            sex=sex,
            language=language,
            domains=tuple(normalized_domains),
            specialty=normalize_term(specialty),
            profession=normalize_term(profession),
            study_level=study_level,
            created_at=now_utc(),
        )
        state = _ProfileState(profile, idempotency_key)
        for entry in derive_static_entries(profile, dictionary, profile.created_at):
            state.entries[entry.id] = entry
            state.pair_index[(entry.attribute, entry.value)] = entry.id
        with self._registry_lock:
            self._states[profile.id] = state
            for entry_id in state.entries:
                self._entry_owner[entry_id] = profile.id
        self._save(state)
        return profile

    def get_profile(self, profile_id: str) -> UserProfile:
        return self._require(profile_id).profile

    def list_profiles(self) -> list[str]:
        self._load_all()
        with self._registry_lock:
            return sorted(self._states)

    def _find_by_idempotency_key(self, key: str) -> UserProfile | None:
        self._load_all()
        with self._registry_lock:
            for state in self._states.values():
                if state.idempotency_key == key:
                    return state.profile
        return None

    # -- entries ----------------------------------------------------------

    def propose_dynamic_entries(
        self,
        profile_id: str,
        attribute: str,
        candidates: Sequence[str],
    ) -> list[ContextEntry]:
        """Propose harvested terms for one attribute.

        Already-known (attribute, value) pairs come back unchanged; only
        genuinely new pairs are created, with status ``proposed``. Stop-word
        candidates are dropped so no entry ever stores one as its value.
        """
        state = self._require(profile_id)
        attribute = normalize_term(attribute)
        if not attribute:
            raise InvalidField("attribute must be non-empty")
        dictionary = self.anti_dictionary(state.profile.language)
        out: list[ContextEntry] = []
        created = False
        with state.lock:
            ts = now_utc()
            returned: set[str] = set()
            for candidate in candidates:
                value = normalize_term(candidate)
                if not value or value in dictionary.words:
                    continue
                key = (attribute, value)
                existing_id = state.pair_index.get(key)
                if existing_id is not None:
                    if existing_id not in returned:
                        out.append(dataclasses.replace(state.entries[existing_id]))
                        returned.add(existing_id)
                    continue
                entry = ContextEntry(
                    id=new_id(),
                    profile_id=profile_id,
                    kind="dynamic",
                    attribute=attribute,
                    value=value,
                    status="proposed",
                    use_count=0,
                    created_at=ts,
                    last_used_at=ts,
                )
                state.entries[entry.id] = entry
                state.pair_index[key] = entry.id
                returned.add(entry.id)
                out.append(dataclasses.replace(entry))
                created = True
            if created:
                self._save(state)
        if created:
            with self._registry_lock:
                for entry in out:
                    self._entry_owner[entry.id] = profile_id
        return out

    def set_entry_status(self, entry_id: str, decision: str) -> ContextEntry:
        if decision not in ("validated", "rejected"):
            raise InvalidField("decision must be 'validated' or 'rejected'")
        state = self._locate_entry(entry_id)
        with state.lock:
            entry = state.entries[entry_id]
            if entry.status == decision:
                return dataclasses.replace(entry)  # idempotent re-application
            if entry.status != "proposed":
                raise IllegalTransition(f"{entry.status} -> {decision} is not allowed")
            entry.status = decision
            self._save(state)
            return dataclasses.replace(entry)

    def get_entry(self, entry_id: str) -> ContextEntry:
        state = self._locate_entry(entry_id)
        with state.lock:
            return dataclasses.replace(state.entries[entry_id])

    def query_entries(
        self,
        profile_id: str,
        attribute_prefix: str,
        statuses: Iterable[str],
    ) -> list[ContextEntry]:
        state = self._require(profile_id)
        prefix = normalize_term(attribute_prefix)
        wanted = set(statuses)
        with state.lock:
            matches = [
                dataclasses.replace(entry)
                for entry in state.entries.values()
                if entry.status in wanted and entry.attribute.startswith(prefix)
            ]
        matches.sort(key=lambda e: (-e.use_count, -e.last_used_at.timestamp(), e.value, e.attribute, e.id))
        return matches

    def record_entry_use(
        self,
        profile_id: str,
        entry_ids: Iterable[str],
        now: datetime | None = None,
    ) -> None:
        """Bump use_count/last_used_at for entries consumed by a reformulation."""
        state = self._require(profile_id)
        ts = now or now_utc()
        with state.lock:
            touched = False
            for entry_id in entry_ids:
                entry = state.entries.get(entry_id)
                if entry is None:
                    raise UnknownEntry(f"no entry {entry_id!r} in profile {profile_id!r}")
                entry.use_count += 1
                entry.last_used_at = ts
                touched = True
            if touched:
                self._save(state)

    # -- history ----------------------------------------------------------

    def append_history(self, record: HistoryRecord) -> str:
        state = self._require(record.profile_id)
        if len(record.result_titles) != len(record.result_urls):
            raise MalformedRecord("result_titles and result_urls must have equal length")
        if len(record.result_titles) > MAX_HISTORY_RESULTS:
            raise MalformedRecord(f"at most {MAX_HISTORY_RESULTS} results per record")
        if record.total_estimate_baseline < 0 or record.total_estimate_reformulated < 0:
            raise MalformedRecord("total estimates must be non-negative")
        stored = dataclasses.replace(record, id=record.id or new_id())
        line = json.dumps(stored.to_dict(), ensure_ascii=False)
        with state.lock:
            path = self.history_dir / f"{record.profile_id}.jsonl"
            with path.open("a", encoding="utf-8") as fh:
                fh.write(line + "\n")
        return stored.id  # type: ignore[return-value]

    def read_history(self, profile_id: str) -> list[HistoryRecord]:
        self._require(profile_id)
        path = self.history_dir / f"{profile_id}.jsonl"
        if not path.exists():
            return []
        records = []
        with path.open(encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    records.append(_history_from_dict(json.loads(line)))
        return records

    # -- persistence ------------------------------------------------------

    def _require(self, profile_id: str) -> _ProfileState:
        with self._registry_lock:
            state = self._states.get(profile_id)
        if state is None:
            state = self._load_profile(profile_id)
        if state is None:
            raise UnknownProfile(f"no profile {profile_id!r}")
        return state

    def _locate_entry(self, entry_id: str) -> _ProfileState:
        with self._registry_lock:
            owner = self._entry_owner.get(entry_id)
        if owner is None:
            self._load_all()
            with self._registry_lock:
                owner = self._entry_owner.get(entry_id)
        if owner is None:
            raise UnknownEntry(f"no entry {entry_id!r}")
        return self._require(owner)

    def _load_profile(self, profile_id: str) -> _ProfileState | None:
        path = self.profiles_dir / f"{profile_id}.json"
        if not path.exists():
            return None
        return self._load_document(json.loads(path.read_text(encoding="utf-8")))

    def _load_all(self) -> None:
        for path in sorted(self.profiles_dir.glob("*.json")):
            profile_id = path.stem
            with self._registry_lock:
                if profile_id in self._states:
                    continue
            self._load_document(json.loads(path.read_text(encoding="utf-8")))

    def _load_document(self, doc: dict) -> _ProfileState:
        profile = UserProfile(
            id=doc["id"],
            age=doc["age"],
            sex=doc["sex"],
            language=doc["language"],
            domains=tuple(doc["domains"]),
            specialty=doc["specialty"],
            profession=doc["profession"],
            study_level=doc["study_level"],
            created_at=parse_rfc3339(doc["created_at"]),
        )
        state = _ProfileState(profile, doc.get("idempotency_key"))
        for item in doc.get("entries", []):
            entry = ContextEntry(
                id=item["id"],
                profile_id=profile.id,
                kind=item["kind"],
                attribute=item["attribute"],
                value=item["value"],
                status=item["status"],
                use_count=item["use_count"],
                created_at=parse_rfc3339(item["created_at"]),
                last_used_at=parse_rfc3339(item["last_used_at"]),
            )
            state.entries[entry.id] = entry
            state.pair_index[(entry.attribute, entry.value)] = entry.id
        with self._registry_lock:
            known = self._states.get(profile.id)
            if known is not None:
                return known
            self._states[profile.id] = state
            for entry_id in state.entries:
                self._entry_owner[entry_id] = profile.id
        return state

    def _save(self, state: _ProfileState) -> None:
        doc = state.profile.to_dict()
        doc["idempotency_key"] = state.idempotency_key
        doc["entries"] = [
            entry.to_dict()
            for entry in sorted(state.entries.values(), key=lambda e: (e.created_at, e.id))
        ]
        path = self.profiles_dir / f"{state.profile.id}.json"
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
        os.replace(tmp, path)


def _history_from_dict(doc: dict) -> HistoryRecord:
    return HistoryRecord(
        id=doc.get("id"),
        profile_id=doc["profile_id"],
        timestamp=parse_rfc3339(doc["timestamp"]),
        raw_query=doc["raw_query"],
        reformulated_query=doc.get("reformulated_query"),
        engine_id=doc["engine_id"],
        result_titles=tuple(doc["result_titles"]),
        result_urls=tuple(doc["result_urls"]),
        total_estimate_baseline=doc["total_estimate_baseline"],
        total_estimate_reformulated=doc["total_estimate_reformulated"],
    )
