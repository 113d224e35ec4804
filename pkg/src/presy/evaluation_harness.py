"""Relevance scoring of ranked results and with/without-reformulation reports.

Fifteen judged scenarios per suite; each query's top 10 results are scored on
three 0-10 criteria (relevance of the first three results, relevance of the
last seven, non-redundancy), summed to /30 per query, /450 per engine+mode
and reduced to a /10 note. A comparison report holds both modes per engine
plus their per-criterion deltas.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from urllib.parse import urlsplit

from .context_store import ContextStore
from .errors import (
    EvaluationAborted,
    MalformedScenarioFile,
    MismatchedEngines,
    TooManyResults,
    UnparsableUrl,
    WrongRowCount,
)
from .reformulation_engine import auto_reformulate
from .search_gateway import SearchProvider, SearchResult

SUITE_SIZE = 15
SIMPLE_SCENARIOS = 10
COMPLEX_SCENARIOS = 5
TOP_RESULTS = 10
FIRST_BLOCK = 3   # criterion 1 judges ranks 1-3
SECOND_BLOCK = 7  # criterion 2 judges ranks 4-10
MODES = ("without", "with")


@dataclass(frozen=True)
class EvaluationScenario:
    id: str
    query: str
    category: str  # simple | complex
    judgments: Mapping[str, bool]


@dataclass(frozen=True)
class ScoreRow:
    scenario_id: str
    c1: float
    c2: float
    c3: float

    @property
    def total(self) -> float:
        return self.c1 + self.c2 + self.c3


@dataclass(frozen=True)
class EngineReport:
    engine_id: str
    mode: str
    rows: tuple[ScoreRow, ...]
    sum_450: float
    note_10: float
    mean_c1: float
    mean_c2: float
    mean_c3: float


@dataclass(frozen=True)
class EngineComparison:
    engine_id: str
    without: EngineReport | None
    with_: EngineReport | None
    delta_c1: float | None
    delta_c2: float | None
    delta_c3: float | None
    delta_note: float | None


@dataclass(frozen=True)
class ComparisonReport:
    engines: tuple[EngineComparison, ...]


def host_of(url: str) -> str:
    """Lowercased authority with a leading ``www.`` stripped.

    Scheme-less urls like ``a.com/page`` are tolerated; anything without a
    recognizable authority raises :class:`UnparsableUrl`.
    """
    split = urlsplit(url)
    if not split.netloc:
        split = urlsplit("//" + url)
    host = split.netloc.lower()
    if host.startswith("www."):
        host = host[4:]
    if not host:
        raise UnparsableUrl(f"no authority in url {url!r}")
    return host


def normalize_judgment_url(url: str) -> str:
    """Key used to match result urls against judgment files.

    Host lowercased and www-stripped, fragment removed; everything else is
    exact. Urls with no recognizable authority are compared verbatim.
    """
    raw = url.strip()
    split = urlsplit(raw)
    scheme = split.scheme
    if not split.netloc:
        split = urlsplit("//" + raw)
        scheme = ""
        if not split.netloc:
            return raw
    host = split.netloc.lower()
    if host.startswith("www."):
        host = host[4:]
    prefix = f"{scheme}://{host}" if scheme else host
    query = f"?{split.query}" if split.query else ""
    return prefix + split.path + query


def redundancy_flags(results: Sequence[SearchResult]) -> list[bool]:
    """Flag results repeating an earlier url or an earlier result's host."""
    seen_urls: set[str] = set()
    seen_hosts: set[str] = set()
    flags = []
    for result in results:
        host = host_of(result.url)
        flags.append(result.url in seen_urls or host in seen_hosts)
        seen_urls.add(result.url)
        seen_hosts.add(host)
    return flags


def score_query(
    results: Sequence[SearchResult],
    judgments: Mapping[str, bool],
    scenario_id: str = "",
) -> ScoreRow:
    """Score one ranked result list against binary judgments.

    c1 = 10 * relevant-in-ranks-1-3 / 3, c2 = 10 * relevant-in-ranks-4-10 / 7,
    c3 = 10 * (1 - redundant fraction); missing urls count as not relevant,
    missing results keep the denominators at 3 and 7. Empty lists score
    c3 = 10 (vacuously non-redundant).
    """
    if len(results) > TOP_RESULTS:
        raise TooManyResults(f"{len(results)} results; at most {TOP_RESULTS} are judged")
    keys = {normalize_judgment_url(url): relevant for url, relevant in judgments.items()}
    relevant = [bool(keys.get(normalize_judgment_url(r.url), False)) for r in results]
    c1 = 10.0 * sum(relevant[:FIRST_BLOCK]) / FIRST_BLOCK
    c2 = 10.0 * sum(relevant[FIRST_BLOCK:TOP_RESULTS]) / SECOND_BLOCK
    if results:
        flags = redundancy_flags(results)
        c3 = 10.0 * (1.0 - sum(flags) / len(results))
    else:
        c3 = 10.0
    return ScoreRow(scenario_id=scenario_id, c1=c1, c2=c2, c3=c3)


def aggregate(rows: Sequence[ScoreRow], engine_id: str, mode: str) -> EngineReport:
    if len(rows) != SUITE_SIZE:
        raise WrongRowCount(f"expected {SUITE_SIZE} rows, got {len(rows)}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    sum_450 = sum(row.total for row in rows)
    return EngineReport(
        engine_id=engine_id,
        mode=mode,
        rows=tuple(rows),
        sum_450=sum_450,
        note_10=sum_450 / (3 * SUITE_SIZE),
        mean_c1=sum(row.c1 for row in rows) / SUITE_SIZE,
        mean_c2=sum(row.c2 for row in rows) / SUITE_SIZE,
        mean_c3=sum(row.c3 for row in rows) / SUITE_SIZE,
    )


def compare(without: EngineReport, with_: EngineReport) -> EngineComparison:
    if without.engine_id != with_.engine_id:
        raise MismatchedEngines(f"{without.engine_id!r} vs {with_.engine_id!r}")
    if (without.mode, with_.mode) != ("without", "with"):
        raise MismatchedEngines(f"expected modes (without, with), got ({without.mode}, {with_.mode})")
    return EngineComparison(
        engine_id=without.engine_id,
        without=without,
        with_=with_,
        delta_c1=with_.mean_c1 - without.mean_c1,
        delta_c2=with_.mean_c2 - without.mean_c2,
        delta_c3=with_.mean_c3 - without.mean_c3,
        delta_note=with_.note_10 - without.note_10,
    )


def load_scenarios(path: Path | str, standard_suite: bool = True) -> list[EvaluationScenario]:
    """Read a scenario file: {"scenarios": [{id, query, class, judgments}]}.

    With ``standard_suite`` the 15-scenario shape (10 simple + 5 complex) is
    enforced.
    """
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    items = doc.get("scenarios")
    if not isinstance(items, list):
        raise MalformedScenarioFile("missing 'scenarios' list")
    scenarios = []
    for item in items:
        query = item.get("query", "")
        category = item.get("class", "")
        if not query:
            raise MalformedScenarioFile(f"scenario {item.get('id')!r} has an empty query")
        if category not in ("simple", "complex"):
            raise MalformedScenarioFile(f"scenario {item.get('id')!r} has class {category!r}")
        scenarios.append(
            EvaluationScenario(
                id=str(item.get("id", "")),
                query=query,
                category=category,
                judgments={str(k): bool(v) for k, v in item.get("judgments", {}).items()},
            )
        )
    if standard_suite:
        simple = sum(1 for s in scenarios if s.category == "simple")
        complex_ = len(scenarios) - simple
        if len(scenarios) != SUITE_SIZE or simple != SIMPLE_SCENARIOS or complex_ != COMPLEX_SCENARIOS:
            raise MalformedScenarioFile(
                f"standard suite is {SUITE_SIZE} scenarios ({SIMPLE_SCENARIOS} simple + "
                f"{COMPLEX_SCENARIOS} complex); got {len(scenarios)} ({simple} simple)"
            )
    return scenarios


def run_suite(
    store: ContextStore,
    scenarios: Sequence[EvaluationScenario],
    provider: SearchProvider,
    profile_id: str,
    modes: Iterable[str] = MODES,
) -> ComparisonReport:
    """Score every scenario in both modes and assemble the comparison report.

    Mode "with" reformulates through the profile's context before searching.
    Scenarios are evaluated and reported in declared order; any provider
    failure aborts with a diagnostic naming the scenario and mode.
    """
    if len(scenarios) != SUITE_SIZE:
        raise WrongRowCount(f"expected {SUITE_SIZE} scenarios, got {len(scenarios)}")
    wanted = [mode for mode in MODES if mode in set(modes)]
    if not wanted:
        raise ValueError("modes must include 'without' and/or 'with'")
    rows: dict[str, list[ScoreRow]] = {mode: [] for mode in wanted}
    for scenario in scenarios:
        for mode in wanted:
            try:
                if mode == "with":
                    reformulation = auto_reformulate(store, profile_id, scenario.query)
                    response = provider.search(reformulation.expanded, TOP_RESULTS)
                else:
                    response = provider.search(scenario.query, TOP_RESULTS)
            except Exception as exc:
                raise EvaluationAborted(
                    f"scenario {scenario.id!r}, mode {mode!r}: {exc}"
                ) from exc
            rows[mode].append(score_query(response.results[:TOP_RESULTS], scenario.judgments, scenario.id))

    reports = {mode: aggregate(rows[mode], provider.engine_id, mode) for mode in wanted}
    if set(wanted) == set(MODES):
        entry = compare(reports["without"], reports["with"])
    else:
        only = reports[wanted[0]]
        entry = EngineComparison(
            engine_id=only.engine_id,
            without=only if only.mode == "without" else None,
            with_=only if only.mode == "with" else None,
            delta_c1=None,
            delta_c2=None,
            delta_c3=None,
            delta_note=None,
        )
    return ComparisonReport(engines=(entry,))


# -- report serialization --------------------------------------------------
# Hand-rolled so reals always carry two decimals (the report file contract)
# and field order is fixed, making reports byte-comparable.

def _real(value: float) -> str:
    text = f"{value:.2f}"
    return "0.00" if text == "-0.00" else text


def _row_obj(row: ScoreRow) -> str:
    return (
        "{"
        f'"scenario_id": {json.dumps(row.scenario_id)}, '
        f'"c1": {_real(row.c1)}, "c2": {_real(row.c2)}, "c3": {_real(row.c3)}, '
        f'"total": {_real(row.total)}'
        "}"
    )


def _engine_report_obj(report: EngineReport, indent: str) -> str:
    rows = ",\n".join(f"{indent}    {_row_obj(row)}" for row in report.rows)
    return (
        "{\n"
        f'{indent}  "engine_id": {json.dumps(report.engine_id)},\n'
        f'{indent}  "mode": {json.dumps(report.mode)},\n'
        f'{indent}  "rows": [\n{rows}\n{indent}  ],\n'
        f'{indent}  "sum_450": {_real(report.sum_450)},\n'
        f'{indent}  "note_10": {_real(report.note_10)},\n'
        f'{indent}  "mean_c1": {_real(report.mean_c1)},\n'
        f'{indent}  "mean_c2": {_real(report.mean_c2)},\n'
        f'{indent}  "mean_c3": {_real(report.mean_c3)}\n'
        f"{indent}}}"
    )


def report_to_json(report: ComparisonReport) -> str:
    blocks = []
    for engine in report.engines:
        parts = [f'      "engine_id": {json.dumps(engine.engine_id)}']
        if engine.without is not None:
            parts.append(f'      "without": {_engine_report_obj(engine.without, "      ")}')
        if engine.with_ is not None:
            parts.append(f'      "with": {_engine_report_obj(engine.with_, "      ")}')
        if engine.delta_c1 is not None:
            parts.append(f'      "delta_c1": {_real(engine.delta_c1)}')
            parts.append(f'      "delta_c2": {_real(engine.delta_c2)}')
            parts.append(f'      "delta_c3": {_real(engine.delta_c3)}')
            parts.append(f'      "delta_note": {_real(engine.delta_note)}')
        blocks.append("    {\n" + ",\n".join(parts) + "\n    }")
    return '{\n  "engines": [\n' + ",\n".join(blocks) + "\n  ]\n}\n"
