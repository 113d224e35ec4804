import json
from pathlib import Path

import pytest

from presy.context_store import ContextStore
from presy.search_gateway import CorpusDocument, LocalProvider, index_corpus
from presy.text_pipeline import load_anti_dictionary

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def store(tmp_path):
    return ContextStore(tmp_path / "data")


@pytest.fixture
def profile(store):
    """Profile whose static context pairs 'computing' with specialty tokens."""
    return store.create_profile(
        age=30,
        sex="unspecified",
        language="en",
        domains=["computing"],
        specialty="information retrieval",
        profession="engineer",
        study_level="graduate",
    )


@pytest.fixture
def java_profile(store):
    """Minimal profile holding one validated dynamic pair java -> programming."""
    created = store.create_profile(age=30, language="en")
    [entry] = store.propose_dynamic_entries(created.id, "java", ["programming"])
    store.set_entry_status(entry.id, "validated")
    return created


@pytest.fixture
def english():
    return load_anti_dictionary("en")


@pytest.fixture
def fixture_corpus():
    docs = json.loads((FIXTURES / "corpus.json").read_text(encoding="utf-8"))
    return [CorpusDocument(url=d["url"], title=d.get("title", ""), body=d.get("body", "")) for d in docs]


@pytest.fixture
def local_provider(fixture_corpus, english):
    return LocalProvider("local", index_corpus(fixture_corpus), english)
