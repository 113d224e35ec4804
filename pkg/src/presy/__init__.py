"""presy: profile-driven contextual query reformulation.

User context is captured two ways: static pairs derived from the
identification profile, and dynamic pairs harvested from search-result
titles and validated by the user. Validated pairs expand later queries;
dual searches compare results with and without the expansion, and a scoring
harness quantifies the difference.
"""

from .context_store import ContextEntry, ContextStore, HistoryRecord, UserProfile
from .errors import PresyError
from .evaluation_harness import (
    ComparisonReport,
    EngineReport,
    EvaluationScenario,
    ScoreRow,
    aggregate,
    compare,
    redundancy_flags,
    run_suite,
    score_query,
)
from .reformulation_engine import (
    ReformulatedQuery,
    Suggestion,
    auto_reformulate,
    expand,
    score_suggestion,
    suggest,
)
from .search_gateway import (
    ComparisonResult,
    CorpusDocument,
    LocalProvider,
    ProviderRegistry,
    SearchResponse,
    SearchResult,
    dual_search,
    index_corpus,
)
from .text_pipeline import AntiDictionary, Token, extract_candidates, is_stopword, segment

__version__ = "0.1.0"

__all__ = [
    "AntiDictionary",
    "ComparisonReport",
    "ComparisonResult",
    "ContextEntry",
    "ContextStore",
    "CorpusDocument",
    "EngineReport",
    "EvaluationScenario",
    "HistoryRecord",
    "LocalProvider",
    "PresyError",
    "ProviderRegistry",
    "ReformulatedQuery",
    "ScoreRow",
    "SearchResponse",
    "SearchResult",
    "Suggestion",
    "Token",
    "UserProfile",
    "aggregate",
    "auto_reformulate",
    "compare",
    "dual_search",
    "expand",
    "extract_candidates",
    "index_corpus",
    "is_stopword",
    "redundancy_flags",
    "run_suite",
    "score_query",
    "score_suggestion",
    "segment",
    "suggest",
]
