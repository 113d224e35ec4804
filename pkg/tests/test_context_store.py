import random
import threading

import pytest

from presy.context_store import ContextStore, HistoryRecord, now_utc
from presy.errors import (
    IllegalTransition,
    InvalidField,
    MalformedRecord,
    UnknownEntry,
    UnknownProfile,
    UnsupportedLanguage,
)


def pairs(entries):
    return {(e.attribute, e.value) for e in entries}


def record_for(profile_id, titles=("t1",), urls=("http://a.example/1",), **overrides):
    fields = dict(
        profile_id=profile_id,
        timestamp=now_utc(),
        raw_query="q",
        reformulated_query=None,
        engine_id="local",
        result_titles=tuple(titles),
        result_urls=tuple(urls),
        total_estimate_baseline=1,
        total_estimate_reformulated=1,
    )
    fields.update(overrides)
    return HistoryRecord(**fields)


class TestCreateProfile:
    def test_static_entries_derived(self, store, profile):
        entries = store.query_entries(profile.id, "", {"validated"})
        assert len(entries) >= 2
        # domains x specialty tokens both ways, profession token -> domain
        assert pairs(entries) == {
            ("computing", "information"),
            ("computing", "retrieval"),
            ("information", "computing"),
            ("retrieval", "computing"),
            ("engineer", "computing"),
        }
        assert all(e.kind == "static" and e.status == "validated" for e in entries)

    def test_unsupported_language(self, store):
        with pytest.raises(UnsupportedLanguage):
            store.create_profile(age=20, language="zz")

    @pytest.mark.parametrize("language", ["EN", "eng", "e1", "", "e"])
    def test_malformed_language(self, store, language):
        with pytest.raises(InvalidField):
            store.create_profile(age=20, language=language)

    def test_invalid_fields(self, store):
        with pytest.raises(InvalidField):
            store.create_profile(age=-1, language="en")
        with pytest.raises(InvalidField):
            store.create_profile(age=20, language="en", sex="other")
        with pytest.raises(InvalidField):
            store.create_profile(age=20, language="en", study_level="phd")

    def test_empty_specialty_and_profession_allowed(self, store):
        profile = store.create_profile(age=20, language="en", specialty="", profession="")
        assert store.get_profile(profile.id).id == profile.id

    def test_without_domains_no_static_pairs(self, store):
        # every derivation pair involves a domain
        profile = store.create_profile(
            age=20, language="en", domains=[], specialty="nutrition", profession="coach"
        )
        assert store.query_entries(profile.id, "", {"validated"}) == []

    def test_domains_normalized_and_deduplicated(self, store):
        profile = store.create_profile(
            age=20, language="en", domains=[" Java ", "java", "", "Health"], specialty="x"
        )
        assert profile.domains == ("java", "health")

    def test_idempotency_key_returns_same_profile(self, store):
        first = store.create_profile(age=20, language="en", idempotency_key="k1")
        second = store.create_profile(age=99, language="en", idempotency_key="k1")
        assert first.id == second.id and second.age == 20


class TestDeriveStaticEntries:
    def test_singleton_rule(self, store):
        profile = store.create_profile(age=20, language="en", domains=["java"], specialty="programming")
        assert pairs(store.query_entries(profile.id, "", {"validated"})) == {
            ("java", "programming"),
            ("programming", "java"),
        }

    def test_cross_product_counts(self, store):
        # hand enumeration: 2 domains x 2 specialty tokens, both directions = 8
        profile = store.create_profile(
            age=20, language="en", domains=["health", "sport"], specialty="nutrition science"
        )
        entries = store.query_entries(profile.id, "", {"validated"})
        assert len(entries) == 8
        assert pairs(entries) == {
            ("health", "nutrition"), ("health", "science"),
            ("sport", "nutrition"), ("sport", "science"),
            ("nutrition", "health"), ("science", "health"),
            ("nutrition", "sport"), ("science", "sport"),
        }

    def test_stopword_specialty_tokens_excluded(self, store):
        profile = store.create_profile(
            age=20, language="en", domains=["health"], specialty="science of nutrition"
        )
        values = {e.value for e in store.query_entries(profile.id, "health", {"validated"})}
        assert values == {"science", "nutrition"}  # "of" filtered


class TestProposeDynamicEntries:
    def test_fresh_proposals(self, store, profile):
        entries = store.propose_dynamic_entries(profile.id, "java", ["programming", "coffee"])
        assert [e.value for e in entries] == ["programming", "coffee"]
        assert all(e.kind == "dynamic" and e.status == "proposed" for e in entries)

    def test_repeat_returns_same_entries(self, store, profile):
        first = store.propose_dynamic_entries(profile.id, "java", ["programming", "coffee"])
        second = store.propose_dynamic_entries(profile.id, "java", ["programming", "coffee"])
        assert {e.id for e in second} == {e.id for e in first}
        assert len(store.query_entries(profile.id, "java", {"proposed"})) == 2

    def test_empty_candidates(self, store, profile):
        assert store.propose_dynamic_entries(profile.id, "java", []) == []

    def test_unknown_profile(self, store):
        with pytest.raises(UnknownProfile):
            store.propose_dynamic_entries("nope", "java", ["x"])

    def test_stopword_values_never_stored(self, store, profile):
        entries = store.propose_dynamic_entries(profile.id, "java", ["the", "runtime"])
        assert [e.value for e in entries] == ["runtime"]

    def test_rejected_pair_not_reproposed(self, store, profile):
        [entry] = store.propose_dynamic_entries(profile.id, "java", ["coffee"])
        store.set_entry_status(entry.id, "rejected")
        again = store.propose_dynamic_entries(profile.id, "java", ["coffee"])
        assert [e.status for e in again] == ["rejected"]
        assert again[0].id == entry.id


class TestEntryLifecycle:
    def test_validate(self, store, profile):
        [entry] = store.propose_dynamic_entries(profile.id, "java", ["programming"])
        updated = store.set_entry_status(entry.id, "validated")
        assert updated.status == "validated"

    def test_validated_to_rejected_forbidden(self, store, profile):
        [entry] = store.propose_dynamic_entries(profile.id, "java", ["programming"])
        store.set_entry_status(entry.id, "validated")
        with pytest.raises(IllegalTransition):
            store.set_entry_status(entry.id, "rejected")

    def test_rejected_to_validated_forbidden(self, store, profile):
        [entry] = store.propose_dynamic_entries(profile.id, "java", ["programming"])
        store.set_entry_status(entry.id, "rejected")
        with pytest.raises(IllegalTransition):
            store.set_entry_status(entry.id, "validated")

    def test_same_transition_is_noop(self, store, profile):
        [entry] = store.propose_dynamic_entries(profile.id, "java", ["programming"])
        store.set_entry_status(entry.id, "validated")
        again = store.set_entry_status(entry.id, "validated")
        assert again.status == "validated" and again.id == entry.id

    def test_unknown_entry(self, store):
        with pytest.raises(UnknownEntry):
            store.set_entry_status("missing", "validated")

    def test_bad_decision(self, store, profile):
        [entry] = store.propose_dynamic_entries(profile.id, "java", ["programming"])
        with pytest.raises(InvalidField):
            store.set_entry_status(entry.id, "proposed")


class TestQueryEntries:
    def test_prefix_semantics(self, store, profile):
        for attribute in ("java", "jam", "python"):
            [entry] = store.propose_dynamic_entries(profile.id, attribute, ["topic"])
            store.set_entry_status(entry.id, "validated")
        got = store.query_entries(profile.id, "ja", {"validated"})
        assert {e.attribute for e in got} == {"java", "jam"}

    def test_empty_prefix_matches_all(self, store, profile):
        store.propose_dynamic_entries(profile.id, "java", ["runtime"])
        everything = store.query_entries(profile.id, "", {"proposed", "validated"})
        assert len(everything) == 5 + 1  # 5 static + 1 proposed

    def test_status_filter(self, store):
        profile = store.create_profile(age=20, language="en")
        store.propose_dynamic_entries(profile.id, "java", ["runtime"])
        assert store.query_entries(profile.id, "", {"validated"}) == []

    def test_ordering(self, store):
        profile = store.create_profile(age=20, language="en")
        proposed = store.propose_dynamic_entries(profile.id, "java", ["beta", "alpha", "gamma"])
        for entry in proposed:
            store.set_entry_status(entry.id, "validated")
        by_value = {e.value: e for e in proposed}
        store.record_entry_use(profile.id, [by_value["gamma"].id])
        got = store.query_entries(profile.id, "java", {"validated"})
        # use_count desc first, then value asc among equals
        assert [e.value for e in got] == ["gamma", "alpha", "beta"]

    def test_prefix_monotonicity_random(self, store):
        profile = store.create_profile(age=20, language="en")
        rng = random.Random(11)
        attrs = ["ja", "java", "javascript", "jam", "py", "python"]
        for attribute in attrs:
            store.propose_dynamic_entries(
                profile.id, attribute, [f"v{rng.randrange(5)}", f"w{rng.randrange(5)}"]
            )
        for attribute in attrs:
            for cut in range(len(attribute)):
                full = {e.id for e in store.query_entries(profile.id, attribute, {"proposed"})}
                shorter = {e.id for e in store.query_entries(profile.id, attribute[:cut], {"proposed"})}
                assert full <= shorter

    def test_unknown_profile(self, store):
        with pytest.raises(UnknownProfile):
            store.query_entries("nope", "", {"validated"})


class TestHistory:
    def test_append_and_read_back(self, store, profile):
        assert store.read_history(profile.id) == []
        record_id = store.append_history(record_for(profile.id))
        assert record_id
        got = store.read_history(profile.id)
        assert len(got) == 1 and got[0].raw_query == "q"

    def test_mismatched_lengths(self, store, profile):
        with pytest.raises(MalformedRecord):
            store.append_history(record_for(profile.id, titles=("a", "b", "c"), urls=("u1", "u2")))

    def test_too_many_results(self, store, profile):
        with pytest.raises(MalformedRecord):
            store.append_history(
                record_for(profile.id, titles=("t",) * 11, urls=("u",) * 11)
            )

    def test_append_order_preserved(self, store, profile):
        for i in range(100):
            store.append_history(record_for(profile.id, raw_query=f"q{i}"))
        got = store.read_history(profile.id)
        assert [r.raw_query for r in got] == [f"q{i}" for i in range(100)]

    def test_unknown_profile(self, store):
        with pytest.raises(UnknownProfile):
            store.append_history(record_for("nope"))


class TestPersistence:
    def test_profile_round_trip(self, tmp_path, store, profile):
        store.propose_dynamic_entries(profile.id, "java", ["runtime", "coffee"])
        reloaded = ContextStore(tmp_path / "data")
        again = reloaded.get_profile(profile.id)
        assert again == profile
        original = {e.id: e for e in store.query_entries(profile.id, "", {"proposed", "validated"})}
        restored = {e.id: e for e in reloaded.query_entries(profile.id, "", {"proposed", "validated"})}
        assert restored == original

    def test_history_round_trip(self, tmp_path, store, profile):
        store.append_history(record_for(profile.id))
        reloaded = ContextStore(tmp_path / "data")
        assert reloaded.read_history(profile.id) == store.read_history(profile.id)

    def test_entry_lookup_after_reload(self, tmp_path, store, profile):
        [entry] = store.propose_dynamic_entries(profile.id, "java", ["runtime"])
        reloaded = ContextStore(tmp_path / "data")
        assert reloaded.set_entry_status(entry.id, "validated").status == "validated"

    def test_data_dir_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PRESY_DATA_DIR", str(tmp_path / "via-env"))
        assert ContextStore().data_dir == tmp_path / "via-env"


class TestStoreInvariants:
    def test_unique_pairs_random_ops(self, store):
        profile = store.create_profile(age=20, language="en", domains=["java"], specialty="code")
        rng = random.Random(3)
        attrs = ["java", "code", "python"]
        values = ["runtime", "coffee", "snake", "script"]
        for _ in range(200):
            store.propose_dynamic_entries(
                profile.id, rng.choice(attrs), rng.sample(values, rng.randrange(0, 4))
            )
        entries = store.query_entries(profile.id, "", {"proposed", "validated", "rejected"})
        keys = [(e.attribute, e.value) for e in entries]
        assert len(keys) == len(set(keys))

    def test_no_validation_without_prior_proposal(self, store):
        # only static entries are born validated; dynamic via the transition API
        profile = store.create_profile(age=20, language="en")
        rng = random.Random(5)
        entry_ids = []
        for _ in range(100):
            action = rng.randrange(3)
            if action == 0 or not entry_ids:
                got = store.propose_dynamic_entries(profile.id, "java", [f"term{rng.randrange(20)}"])
                entry_ids += [e.id for e in got]
            else:
                target = rng.choice(entry_ids)
                before = store.get_entry(target).status
                try:
                    store.set_entry_status(target, rng.choice(["validated", "rejected"]))
                except IllegalTransition:
                    assert before in ("validated", "rejected")
        for entry in store.query_entries(profile.id, "", {"validated"}):
            assert entry.kind in ("static", "dynamic")

    def test_concurrent_writers_and_readers(self, store):
        profile = store.create_profile(age=20, language="en")
        errors = []

        def writer(tag):
            try:
                for i in range(25):
                    got = store.propose_dynamic_entries(profile.id, "java", [f"{tag}{i}"])
                    store.set_entry_status(got[0].id, "validated")
            except Exception as exc:  # pragma: no cover - failure path
                errors.append(exc)

        def reader():
            try:
                for _ in range(50):
                    for entry in store.query_entries(profile.id, "", {"proposed", "validated"}):
                        assert entry.attribute and entry.value  # never a torn entry
            except Exception as exc:  # pragma: no cover - failure path
                errors.append(exc)

        threads = [threading.Thread(target=writer, args=(t,)) for t in "abc"]
        threads += [threading.Thread(target=reader) for _ in range(2)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        assert errors == []
        entries = store.query_entries(profile.id, "java", {"validated"})
        assert {e.value for e in entries} == {f"{t}{i}" for t in "abc" for i in range(25)}
