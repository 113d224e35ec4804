"""Pure text processing: segmentation, stop-word filtering, term harvesting.

Everything here is stateless and safe to call concurrently. Anti-dictionaries
are plain word lists: the copies shipped with the package can be overridden
(or new languages added) by dropping ``stopwords/<lang>.txt`` into the data
directory.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import UnsupportedLanguage

# Runs of Unicode letters/digits; underscore counts as a boundary.
_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)

LANGUAGE_CODE_RE = re.compile(r"^[a-z]{2}$")

DEFAULT_CANDIDATE_CAP = 20
MIN_CANDIDATE_LENGTH = 2


@dataclass(frozen=True)
class Token:
    surface: str
    position: int


@dataclass(frozen=True)
class AntiDictionary:
    """Stop-word list for one language."""

    language: str
    words: frozenset[str]

    def __contains__(self, word: str) -> bool:
        return word in self.words


def segment(text: str, language: str | None = None) -> list[Token]:
    """Split text into case-folded word tokens.

    Boundaries are any non-letter/non-digit characters (underscore included).
    ``language`` is accepted for symmetry with the rest of the pipeline; the
    boundary rule itself is language independent.
    """
    return [
        Token(surface=match.group().casefold(), position=i)
        for i, match in enumerate(_WORD_RE.finditer(text))
    ]


def is_stopword(token: str, dictionary: AntiDictionary) -> bool:
    return token in dictionary.words


def _parse_wordlist(lines: Iterable[str]) -> frozenset[str]:
    words = set()
    for line in lines:
        word = line.strip()
        if not word or word.startswith("#"):
            continue
        word = word.casefold()
        if any(ch.isspace() for ch in word):
            continue
        words.add(word)
    return frozenset(words)


def load_anti_dictionary(language: str, data_dir: Path | str | None = None) -> AntiDictionary:
    """Load the stop-word list for a language.

    A ``stopwords/<lang>.txt`` file under ``data_dir`` takes precedence over
    the list shipped with the package. Raises :class:`UnsupportedLanguage`
    when neither exists.
    """
    if data_dir is not None:
        override = Path(data_dir) / "stopwords" / f"{language}.txt"
        if override.is_file():
            text = override.read_text(encoding="utf-8")
            return AntiDictionary(language=language, words=_parse_wordlist(text.splitlines()))
    shipped = resources.files(__package__) / "stopwords" / f"{language}.txt"
    if not shipped.is_file():
        raise UnsupportedLanguage(f"no anti-dictionary for language {language!r}")
    text = shipped.read_text(encoding="utf-8")
    return AntiDictionary(language=language, words=_parse_wordlist(text.splitlines()))


def extract_candidates(
    titles: Iterable[str],
    dictionary: AntiDictionary,
    cap: int = DEFAULT_CANDIDATE_CAP,
) -> list[str]:
    """Harvest candidate context terms from result titles, in rank order.

    Titles are segmented in order; stop-words, tokens shorter than
    ``MIN_CANDIDATE_LENGTH``, and all-digit tokens are dropped. The first
    occurrence wins and the list is truncated to ``cap`` terms.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    seen: set[str] = set()
    out: list[str] = []
    for title in titles:
        for token in segment(title):
            term = token.surface
            if len(term) < MIN_CANDIDATE_LENGTH or term.isdigit():
                continue
            if term in dictionary.words or term in seen:
                continue
            seen.add(term)
            out.append(term)
            if len(out) >= cap:
                return out
    return out
