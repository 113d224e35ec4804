"""Command-line access to profiles, suggestions, dual search, and evaluation.

Exit codes: 0 success, 1 domain error (one-line diagnostic on stderr),
2 usage error. Machine-readable output goes to stdout, diagnostics to stderr.
Providers come from a ``presy.json`` config ({"engines": [...]}), the data
directory from ``--data-dir`` or ``PRESY_DATA_DIR``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .context_store import ContextStore
from .errors import PresyError
from .evaluation_harness import load_scenarios, report_to_json, run_suite
from .reformulation_engine import suggest
from .search_gateway import ComparisonResult, ProviderRegistry, dual_search

CONFIG_NAME = "presy.json"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="presy", description="Contextual query reformulation")
    parser.add_argument("--data-dir", help="data directory (default: $PRESY_DATA_DIR or ./presy-data)")
    parser.add_argument("--config", help=f"provider config file (default: ./{CONFIG_NAME} if present)")
    sub = parser.add_subparsers(dest="command", required=True)

    profile = sub.add_parser("profile", help="manage user profiles")
    profile_sub = profile.add_subparsers(dest="profile_command", required=True)
    create = profile_sub.add_parser("create", help="create a profile and derive its static context")
    create.add_argument("--age", type=int, required=True)
    create.add_argument("--language", required=True, help="two-letter code, e.g. en")
    create.add_argument("--sex", default="unspecified", choices=["female", "male", "unspecified"])
    create.add_argument("--domains", default="", help="comma-separated domains of competence")
    create.add_argument("--specialty", default="")
    create.add_argument("--profession", default="")
    create.add_argument(
        "--study-level",
        default="unspecified",
        choices=["primary", "secondary", "undergraduate", "graduate", "doctoral", "unspecified"],
    )
    show = profile_sub.add_parser("show", help="print a stored profile with its entries")
    show.add_argument("profile_id")

    sug = sub.add_parser("suggest", help="list reformulation suggestions for a partial query")
    sug.add_argument("query")
    sug.add_argument("--profile", required=True)
    sug.add_argument("--limit", type=int, default=10)

    search = sub.add_parser("search", help="dual search with and without reformulation")
    search.add_argument("query")
    search.add_argument("--profile", required=True)
    search.add_argument("--engine", required=True)
    search.add_argument("--mode", default="off", choices=["off", "auto", "manual"])
    search.add_argument("--add", action="append", default=[], metavar="TERM",
                        help="term to add in manual mode (repeatable)")
    search.add_argument("--limit", type=int, default=10)
    search.add_argument("--format", default="json", choices=["json", "table"])

    enrich = sub.add_parser("enrich", help="review pending context proposals (y/n per term)")
    enrich.add_argument("--profile", required=True)

    evaluation = sub.add_parser("eval", help="run the scoring harness")
    eval_sub = evaluation.add_subparsers(dest="eval_command", required=True)
    run = eval_sub.add_parser("run", help="score a scenario suite with and without reformulation")
    run.add_argument("scenarios", help="scenario suite JSON file")
    run.add_argument("--profile", required=True)
    run.add_argument("--engine", required=True)
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--modes", default="without,with", help="comma-separated subset of without,with")

    serve = sub.add_parser("serve", help="start the HTTP JSON API")
    serve.add_argument("--addr", help="host:port (default: $PRESY_ADDR or 127.0.0.1:8750)")

    return parser


def load_registry(store: ContextStore, config_path: str | None) -> ProviderRegistry:
    registry = ProviderRegistry(store.data_dir)
    path = Path(config_path) if config_path else Path(CONFIG_NAME)
    if not path.exists():
        if config_path:
            raise PresyError(f"config file {config_path!r} not found")
        return registry
    doc = json.loads(path.read_text(encoding="utf-8"))
    for engine in doc.get("engines", []):
        config = dict(engine)
        engine_id = config.pop("id")
        kind = config.pop("kind")
        if kind == "local" and "corpus" in config:
            corpus = Path(config["corpus"])
            if not corpus.is_absolute():
                config["corpus"] = path.parent / corpus
        registry.register(engine_id, kind, config)
    return registry


def render_comparison(result: ComparisonResult, fmt: str = "json") -> str:
    """Render a dual-search result; json is the exact API payload."""
    if fmt == "json":
        return json.dumps(result.to_dict(), ensure_ascii=False, indent=2)

    lines = [
        f"Query:          {result.reformulation.original}",
        f"Reformulated:   {result.reformulation.expanded} (mode {result.reformulation.mode};"
        f" added: {', '.join(result.reformulation.added_terms) or 'none'})",
        f"Total estimate: {result.baseline.total_estimate} without"
        f" vs {result.reformulated.total_estimate} with",
        "",
        "Without reformulation:",
    ]
    for position, response in enumerate((result.baseline, result.reformulated)):
        if not response.results:
            lines.append("  (no results)")
        else:
            for r in response.results:
                lines.append(f"  {r.rank:>2}. {r.title}  [{r.url}]")
        if position == 0:
            lines.append("")
            lines.append("With reformulation:")
    lines.append("")
    lines.append(f"Proposed terms: {', '.join(result.proposals) or '(none)'}")
    return "\n".join(lines)


def _cmd_profile(store: ContextStore, args: argparse.Namespace) -> int:
    if args.profile_command == "create":
        domains = [d for d in (part.strip() for part in args.domains.split(",")) if d]
        profile = store.create_profile(
            age=args.age,
            sex=args.sex,
            language=args.language,
            domains=domains,
            specialty=args.specialty,
            profession=args.profession,
            study_level=args.study_level,
        )
        doc = profile.to_dict()
        doc["entries"] = [e.to_dict() for e in store.query_entries(profile.id, "", {"validated"})]
        print(json.dumps(doc, ensure_ascii=False, indent=2))
        return 0
    profile = store.get_profile(args.profile_id)
    doc = profile.to_dict()
    doc["entries"] = [
        e.to_dict()
        for e in store.query_entries(args.profile_id, "", {"proposed", "validated", "rejected"})
    ]
    print(json.dumps(doc, ensure_ascii=False, indent=2))
    return 0


def _cmd_suggest(store: ContextStore, args: argparse.Namespace) -> int:
    suggestions = suggest(store, args.profile, args.query, args.limit)
    print(json.dumps([s.to_dict() for s in suggestions], ensure_ascii=False, indent=2))
    return 0


def _cmd_search(store: ContextStore, registry: ProviderRegistry, args: argparse.Namespace) -> int:
    provider = registry.get(args.engine)
    result = dual_search(
        store,
        args.profile,
        args.query,
        provider,
        mode=args.mode,
        terms=args.add,
        limit=args.limit,
    )
    print(render_comparison(result, args.format))
    return 0


def _cmd_enrich(store: ContextStore, args: argparse.Namespace) -> int:
    pending = store.query_entries(args.profile, "", {"proposed"})
    if not pending:
        print("no pending proposals", file=sys.stderr)
        return 0
    validated = rejected = 0
    for entry in pending:
        prompt = f"keep '{entry.attribute} -> {entry.value}'? [y/n/q] "
        sys.stderr.write(prompt)
        sys.stderr.flush()
        answer = sys.stdin.readline()
        if not answer:
            break
        answer = answer.strip().lower()
        if answer == "q":
            break
        if answer == "y":
            store.set_entry_status(entry.id, "validated")
            validated += 1
        elif answer == "n":
            store.set_entry_status(entry.id, "rejected")
            rejected += 1
    print(json.dumps({"validated": validated, "rejected": rejected}))
    return 0


def _cmd_eval(store: ContextStore, registry: ProviderRegistry, args: argparse.Namespace) -> int:
    scenarios = load_scenarios(args.scenarios)
    provider = registry.get(args.engine)
    modes = [m for m in args.modes.split(",") if m]
    report = run_suite(store, scenarios, provider, args.profile, modes)
    text = report_to_json(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"report written to {args.out}", file=sys.stderr)
    else:
        print(text, end="")
    return 0


def _cmd_serve(store: ContextStore, registry: ProviderRegistry, args: argparse.Namespace) -> int:
    import uvicorn

    from .service_api import create_app, parse_addr

    host, port = parse_addr(args.addr)
    app = create_app(store, registry)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        store = ContextStore(args.data_dir)
        if args.command == "profile":
            return _cmd_profile(store, args)
        if args.command == "suggest":
            return _cmd_suggest(store, args)
        if args.command == "enrich":
            return _cmd_enrich(store, args)
        registry = load_registry(store, args.config)
        if args.command == "search":
            return _cmd_search(store, registry, args)
        if args.command == "eval":
            return _cmd_eval(store, registry, args)
        if args.command == "serve":
            return _cmd_serve(store, registry, args)
    except PresyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
