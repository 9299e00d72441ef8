"""Parallel simplification corpora: loading, validation, splitting, sampling.

File contracts:
  * pair corpora are TSV: UTF-8, LF line endings, exactly one TAB per line
  * multi-reference corpora are JSON lines: one object per line with a
    "src" string and a non-empty "refs" array of strings

Sentence text is trimmed at construction; interior whitespace is preserved
byte-exact because the metrics depend on it. Corpora are immutable once
built and safe to share across workers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .rng import shuffled_indices

SHUFFLE_ALGORITHM = "splitmix64/fisher-yates"


class CorpusFormatError(ValueError):
    """A line or record violates the corpus file contract."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class MalformedLineError(CorpusFormatError):
    pass


class MalformedRecordError(CorpusFormatError):
    pass


class EmptyReferencesError(CorpusFormatError):
    pass


class SizeOutOfRangeError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class Sentence:
    """One sentence with its language tag (FLORES-200 style, e.g. "eng_Latn")."""

    text: str
    lang: str

    def __post_init__(self):
        text = self.text.strip()
        if not text:
            raise ValueError("sentence text is empty")
        if "\n" in text or "\r" in text:
            raise ValueError("sentence text contains a line break")
        object.__setattr__(self, "text", text)


@dataclass(frozen=True, slots=True)
class SentencePair:
    complex: Sentence
    simple: Sentence

    def __post_init__(self):
        if self.complex.lang != self.simple.lang:
            raise ValueError(
                f"pair mixes languages: {self.complex.lang!r} vs {self.simple.lang!r}"
            )


@dataclass(frozen=True)
class ParallelCorpus:
    """Ordered, non-empty list of complex/simple sentence pairs."""

    pairs: tuple[SentencePair, ...]
    name: str
    meta: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if not self.pairs:
            raise ValueError("corpus has no pairs")

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def lang(self) -> str:
        return self.pairs[0].complex.lang

    def complex_sentences(self) -> list[Sentence]:
        return [p.complex for p in self.pairs]

    def simple_sentences(self) -> list[Sentence]:
        return [p.simple for p in self.pairs]


@dataclass(frozen=True)
class MultiRefCorpus:
    """Sources aligned with one or more reference simplifications each."""

    sources: tuple[Sentence, ...]
    refs: tuple[tuple[Sentence, ...], ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "refs", tuple(tuple(r) for r in self.refs))
        if not self.sources:
            raise ValueError("corpus has no sources")
        if len(self.refs) != len(self.sources):
            raise ValueError(
                f"{len(self.sources)} sources but {len(self.refs)} reference lists"
            )
        for i, refs in enumerate(self.refs):
            if not refs:
                raise ValueError(f"source {i} has no references")

    def __len__(self) -> int:
        return len(self.sources)


def load_parallel_tsv(path: str | Path, lang: str) -> ParallelCorpus:
    """Load a TSV pair corpus; one pair per line, file order preserved.

    Raises FileNotFoundError for a missing file and MalformedLineError when
    a line does not have exactly one TAB or has an empty side.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such corpus file: {path}")
    lines = path.read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    pairs = []
    for lineno, line in enumerate(lines, start=1):
        tabs = line.count("\t")
        if tabs != 1:
            raise MalformedLineError(f"expected exactly one TAB, found {tabs}", lineno)
        left, right = line.split("\t")
        if not left.strip() or not right.strip():
            raise MalformedLineError("empty side", lineno)
        pairs.append(SentencePair(Sentence(left, lang), Sentence(right, lang)))
    return ParallelCorpus(tuple(pairs), name=path.name)


def save_parallel_tsv(corpus: ParallelCorpus, path: str | Path) -> None:
    """Write a pair corpus in the canonical TSV layout (round-trips exactly)."""
    out = []
    for i, pair in enumerate(corpus.pairs):
        if "\t" in pair.complex.text or "\t" in pair.simple.text:
            raise ValueError(f"pair {i} contains a TAB and cannot be stored as TSV")
        out.append(f"{pair.complex.text}\t{pair.simple.text}\n")
    Path(path).write_text("".join(out), encoding="utf-8")


def load_multi_ref(path: str | Path, lang: str) -> MultiRefCorpus:
    """Load a JSON-lines multi-reference corpus, record order preserved."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such corpus file: {path}")
    lines = path.read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    sources: list[Sentence] = []
    refs: list[tuple[Sentence, ...]] = []
    for lineno, line in enumerate(lines, start=1):
        try:
            record = json.loads(line)
        except json.JSONDecodeError as e:
            raise MalformedRecordError(f"invalid JSON: {e.msg}", lineno) from e
        if not isinstance(record, dict) or "src" not in record or "refs" not in record:
            raise MalformedRecordError('record needs "src" and "refs" fields', lineno)
        src, rec_refs = record["src"], record["refs"]
        if not isinstance(src, str) or not isinstance(rec_refs, list) or not all(
            isinstance(r, str) for r in rec_refs
        ):
            raise MalformedRecordError('"src" must be a string and "refs" an array of strings', lineno)
        if not rec_refs:
            raise EmptyReferencesError("record has no references", lineno)
        try:
            sources.append(Sentence(src, lang))
            refs.append(tuple(Sentence(r, lang) for r in rec_refs))
        except ValueError as e:
            raise MalformedRecordError(str(e), lineno) from e
    return MultiRefCorpus(tuple(sources), tuple(refs), name=path.name)


def split_corpus(
    corpus: ParallelCorpus, validation_size: int, seed: int
) -> tuple[ParallelCorpus, ParallelCorpus]:
    """Deterministically split a corpus into (train, validation).

    Validation rows are sampled by a seeded splitmix64 Fisher-Yates shuffle
    of the pair indices; both halves keep the original corpus order. The
    generator name and seed are recorded in each half's metadata so the
    split can be reproduced by any conforming implementation.
    """
    n = len(corpus)
    if not 0 < validation_size < n:
        raise SizeOutOfRangeError(
            f"validation_size must be in (0, {n}), got {validation_size}"
        )
    order = shuffled_indices(n, seed)
    val_idx = set(order[:validation_size])
    train_pairs = tuple(corpus.pairs[i] for i in range(n) if i not in val_idx)
    val_pairs = tuple(corpus.pairs[i] for i in sorted(val_idx))
    meta = {
        "split_algorithm": SHUFFLE_ALGORITHM,
        "split_seed": str(seed),
        "split_source": corpus.name,
    }
    train = ParallelCorpus(train_pairs, f"{corpus.name}/train", {**meta, "split_role": "train"})
    val = ParallelCorpus(val_pairs, f"{corpus.name}/val", {**meta, "split_role": "val"})
    return train, val


def first_reference(corpus: MultiRefCorpus) -> ParallelCorpus:
    """Collapse a multi-reference corpus to pairs using reference index 0."""
    pairs = tuple(
        SentencePair(src, refs[0]) for src, refs in zip(corpus.sources, corpus.refs)
    )
    name = f"{corpus.name}/ref0" if corpus.name else "ref0"
    return ParallelCorpus(pairs, name)


def load_sentences(path: str | Path, lang: str) -> list[Sentence]:
    """Load a plain sentence file: UTF-8, one sentence per line, LF endings."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such sentence file: {path}")
    lines = path.read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    sentences = []
    for lineno, line in enumerate(lines, start=1):
        try:
            sentences.append(Sentence(line, lang))
        except ValueError as e:
            raise MalformedLineError(str(e), lineno) from e
    return sentences


def save_sentences(sentences: list[Sentence], path: str | Path) -> None:
    Path(path).write_text(
        "".join(f"{s.text}\n" for s in sentences), encoding="utf-8"
    )
