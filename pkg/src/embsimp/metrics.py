"""Formula-based simplification metrics: FKGL, ARI, and SARI.

Readability follows the canonical published coefficients:

    FKGL = 0.39 * (words/sentence) + 11.8 * (syllables/word) - 15.59
    ARI  = 4.71 * (letters/word)   + 0.5  * (words/sentence) - 21.43

Corpus scores are micro-averages over pooled counts, not means of
per-sentence grades.

SARI conventions pinned by this implementation (public variants differ on
the degenerate cases, so the exact rules matter):
  * tokens are whitespace-split, compared code-point exact (no case folding)
  * n-gram orders 1..4; source and output counts are multiplied by the
    number of references, reference counts are summed across references
  * keep and add are F1 of multiset precision/recall against the
    reference-derived ideal multisets; delete is precision only
  * a precision or recall with a zero denominator is 1.0 when the
    corresponding ideal multiset is empty (vacuous success), else 0.0;
    F1 of (0, 0) is 0
  * per-operation score = mean over the four orders, times 100;
    sari = (add + keep + delete) / 3

All operations are pure; corpus totals are accumulated in order by index.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import Sentence

_VOWELS = frozenset("aeiouy")
_TERMINALS = frozenset(".!?")
_APOSTROPHES = frozenset({"'", "’"})


class ZeroWordsError(ValueError):
    pass


class EmptyRefsError(ValueError):
    pass


class LengthMismatchError(ValueError):
    pass


class MalformedScoreRecordError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TokenizedSentence:
    words: tuple[str, ...]
    letter_count: int
    syllable_count: int
    sentence_count: int


@dataclass(frozen=True)
class ReadabilityReport:
    fkgl: float
    ari: float
    word_total: int
    sentence_total: int
    syllable_total: int
    letter_total: int


@dataclass(frozen=True)
class ReadabilityDelta:
    """Componentwise metric difference (b - a)."""

    fkgl: float
    ari: float


@dataclass(frozen=True)
class SariScore:
    add: float
    keep: float
    delete: float
    sari: float

    def __post_init__(self):
        for name in ("add", "keep", "delete", "sari"):
            v = getattr(self, name)
            if not -1e-9 <= v <= 100.0 + 1e-9:
                raise ValueError(f"{name} out of [0, 100]: {v}")
        if abs(self.sari - (self.add + self.keep + self.delete) / 3.0) > 1e-9:
            raise ValueError("sari is not the mean of add/keep/delete")

    @classmethod
    def from_components(cls, add: float, keep: float, delete: float) -> "SariScore":
        return cls(add, keep, delete, (add + keep + delete) / 3.0)


def _text_of(s: Sentence | str) -> str:
    return s.text if isinstance(s, Sentence) else s


def _iter_words(text: str):
    word: list[str] = []
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch.isalnum():
            word.append(ch)
            i += 1
        elif ch in _APOSTROPHES and word and i + 1 < n and text[i + 1].isalnum():
            # internal apostrophe only: "don't" is one word, "'tis" is not
            word.append(ch)
            i += 1
        else:
            if word:
                yield "".join(word)
                word = []
            i += 1
    if word:
        yield "".join(word)


def count_syllables(word: str) -> int:
    """Vowel-group heuristic: runs of aeiouy, minus a terminal silent 'e',
    never below 1."""
    if not word:
        raise ValueError("empty word")
    w = word.lower()
    groups = 0
    in_group = False
    for ch in w:
        if ch in _VOWELS:
            if not in_group:
                groups += 1
                in_group = True
        else:
            in_group = False
    if groups > 1 and w.endswith("e"):
        groups -= 1
    return max(groups, 1)


def tokenize(s: Sentence | str) -> TokenizedSentence:
    """Split into words (alphanumeric runs with internal apostrophes) and
    count letters, syllables, and terminal-punctuation sentence segments."""
    text = _text_of(s)
    words = tuple(_iter_words(text))
    letters = sum(1 for w in words for ch in w if ch.isalnum())
    syllables = sum(count_syllables(w) for w in words)
    sentences = 0
    in_run = False
    for ch in text:
        if ch in _TERMINALS:
            if not in_run:
                sentences += 1
                in_run = True
        else:
            in_run = False
    return TokenizedSentence(words, letters, syllables, max(sentences, 1))


def corpus_readability(sentences: Sequence[Sentence | str]) -> ReadabilityReport:
    """Pooled FKGL/ARI over a corpus (micro-average of the count totals)."""
    if not sentences:
        raise ValueError("empty corpus")
    words = sentences_total = syllables = letters = 0
    for s in sentences:
        tok = tokenize(s)
        words += len(tok.words)
        sentences_total += tok.sentence_count
        syllables += tok.syllable_count
        letters += tok.letter_count
    if words == 0:
        raise ZeroWordsError("corpus has no words")
    fkgl = 0.39 * (words / sentences_total) + 11.8 * (syllables / words) - 15.59
    ari = 4.71 * (letters / words) + 0.5 * (words / sentences_total) - 21.43
    return ReadabilityReport(fkgl, ari, words, sentences_total, syllables, letters)


def delta_report(a: ReadabilityReport, b: ReadabilityReport) -> ReadabilityDelta:
    return ReadabilityDelta(fkgl=b.fkgl - a.fkgl, ari=b.ari - a.ari)


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _scale(counts: Counter, factor: int) -> Counter:
    return Counter({g: c * factor for g, c in counts.items()})


def _ratio(numer: int, denom: int, ideal_total: int) -> float:
    if denom == 0:
        return 1.0 if ideal_total == 0 else 0.0
    return numer / denom


def _f1(p: float, r: float) -> float:
    if p + r == 0:
        return 0.0
    return 2.0 * p * r / (p + r)


def sari_sentence(
    source: Sentence | str,
    output: Sentence | str,
    refs: Sequence[Sentence | str],
) -> SariScore:
    """SARI for one output against its source and references.

    See the module docstring for the exact multiset conventions.
    """
    if not refs:
        raise EmptyRefsError("SARI needs at least one reference")
    src_tokens = _text_of(source).split()
    out_tokens = _text_of(output).split()
    ref_token_lists = [_text_of(r).split() for r in refs]
    numref = len(refs)

    keep_total = delete_total = add_total = 0.0
    for n in range(1, 5):
        src = _scale(_ngram_counts(src_tokens, n), numref)
        out = _scale(_ngram_counts(out_tokens, n), numref)
        ref: Counter = Counter()
        for tokens in ref_token_lists:
            ref.update(_ngram_counts(tokens, n))

        kept = src & out
        keep_ideal = src & ref
        keep_good = kept & keep_ideal
        n_good, n_kept, n_ideal = map(
            lambda c: sum(c.values()), (keep_good, kept, keep_ideal)
        )
        keep_total += _f1(
            _ratio(n_good, n_kept, n_ideal), _ratio(n_good, n_ideal, n_ideal)
        )

        deleted = src - out
        del_ideal = src - ref
        del_good = deleted & del_ideal
        delete_total += _ratio(
            sum(del_good.values()), sum(deleted.values()), sum(del_ideal.values())
        )

        added = out - src
        add_ideal = ref - src
        add_good = added & add_ideal
        n_good, n_added, n_ideal = map(
            lambda c: sum(c.values()), (add_good, added, add_ideal)
        )
        add_total += _f1(
            _ratio(n_good, n_added, n_ideal), _ratio(n_good, n_ideal, n_ideal)
        )

    return SariScore.from_components(
        100.0 * add_total / 4.0, 100.0 * keep_total / 4.0, 100.0 * delete_total / 4.0
    )


def sari_corpus(
    sources: Sequence[Sentence | str],
    outputs: Sequence[Sentence | str],
    refs_per_source: Sequence[Sequence[Sentence | str]],
) -> SariScore:
    """Arithmetic mean of the sentence-level scores, componentwise."""
    if not (len(sources) == len(outputs) == len(refs_per_source)):
        raise LengthMismatchError(
            f"{len(sources)} sources, {len(outputs)} outputs, "
            f"{len(refs_per_source)} reference lists"
        )
    if not sources:
        raise LengthMismatchError("empty evaluation")
    add = keep = delete = 0.0
    for src, out, refs in zip(sources, outputs, refs_per_source):
        score = sari_sentence(src, out, refs)
        add += score.add
        keep += score.keep
        delete += score.delete
    n = len(sources)
    return SariScore.from_components(add / n, keep / n, delete / n)


def read_external_scores(path: str | Path) -> dict[str, float]:
    """Parse a JSON-lines file of {"metric": name, "value": number} records."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such scores file: {path}")
    lines = path.read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    scores: dict[str, float] = {}
    for lineno, line in enumerate(lines, start=1):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise MalformedScoreRecordError(f"invalid JSON: {e.msg}", lineno) from e
        if (
            not isinstance(record, dict)
            or not isinstance(record.get("metric"), str)
            or isinstance(record.get("value"), bool)
            or not isinstance(record.get("value"), (int, float))
        ):
            raise MalformedScoreRecordError(
                'record needs a "metric" string and a numeric "value"', lineno
            )
        scores[record["metric"]] = float(record["value"])
    return scores


def merge_external_scores(report, scores_path: str | Path):
    """Attach externally computed metric values (CEFR, BLEURT, LENS, ...)
    to an evaluation report. Nothing is recomputed; an empty scores file
    leaves the report unchanged."""
    scores = read_external_scores(scores_path)
    if not scores:
        return report
    return report.with_external_scores(scores)
