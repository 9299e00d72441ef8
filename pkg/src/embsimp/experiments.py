"""Experiment orchestration: reconstruction and simplification runs over
any coder, plus deterministic report rendering.

External coders are consumed through a file-based batch protocol:

    <cmd> encode --lang <tag> --in <sentences.txt> --out <file.emb>
    <cmd> decode --lang <tag> --in <file.emb> --out <sentences.txt>

Sentence files are UTF-8, one sentence per line, LF. Embedding files are
EMB1. A nonzero exit or malformed output is a CoderFailureError, which
aborts the run before any report file is written.
"""

from __future__ import annotations

import subprocess
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import (
    MultiRefCorpus,
    ParallelCorpus,
    Sentence,
    load_sentences,
    save_sentences,
)
from .embeddings import (
    DimMismatchError,
    EmbeddingMatrix,
    read_embeddings,
    write_embeddings,
)
from .metrics import (
    LengthMismatchError,
    corpus_readability,
    delta_report,
    sari_corpus,
)
from .mlp import load_model, transform_embeddings
from .toycoder import DecodePool, ToyCoderConfig, decode_matrix, encode_sentences

RECONSTRUCTION_CONDITIONS = ("C", "C'", "ΔC", "S", "S'", "ΔS")
SIMPLIFICATION_CONDITIONS = ("C", "S", "system")


class CoderFailureError(RuntimeError):
    pass


@dataclass(frozen=True)
class CoderHandle:
    """A resolvable encoder/decoder: either the in-process toy coder or an
    external command implementing the batch file protocol."""

    kind: str  # "toy" | "external"
    lang: str
    toy: ToyCoderConfig | None = None
    command: tuple[str, ...] | None = None
    pool_sentences: tuple[Sentence, ...] | None = None

    def __post_init__(self):
        if not self.lang:
            raise ValueError("coder needs a language tag")
        if self.kind == "toy":
            if self.toy is None:
                raise ValueError("toy coder needs a ToyCoderConfig")
        elif self.kind == "external":
            if not self.command:
                raise ValueError("external coder needs a command")
            object.__setattr__(self, "command", tuple(self.command))
        else:
            raise ValueError(f"unknown coder kind {self.kind!r}")
        if self.pool_sentences is not None:
            object.__setattr__(self, "pool_sentences", tuple(self.pool_sentences))

    @classmethod
    def toy_coder(
        cls,
        lang: str,
        cfg: ToyCoderConfig | None = None,
        pool: Sequence[Sentence] | None = None,
    ) -> "CoderHandle":
        return cls(
            "toy",
            lang,
            toy=cfg or ToyCoderConfig(),
            pool_sentences=tuple(pool) if pool is not None else None,
        )

    @classmethod
    def external(cls, lang: str, command: Sequence[str]) -> "CoderHandle":
        return cls("external", lang, command=tuple(command))

    def describe(self) -> str:
        if self.kind == "toy":
            return (
                f"toy(dim={self.toy.dim}, seed={self.toy.seed}, "
                f"ngram_order={self.toy.ngram_order})"
            )
        return f"external({' '.join(self.command)})"

    def _run(self, mode: str, in_path: Path, out_path: Path) -> None:
        cmd = [
            *self.command,
            mode,
            "--lang",
            self.lang,
            "--in",
            str(in_path),
            "--out",
            str(out_path),
        ]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        if proc.returncode != 0:
            detail = proc.stderr.strip() or proc.stdout.strip()
            raise CoderFailureError(
                f"coder exited {proc.returncode} for {mode}: {detail}"
            )
        if not out_path.exists():
            raise CoderFailureError(f"coder produced no {mode} output file")

    def encode(self, sentences: Sequence[Sentence]) -> EmbeddingMatrix:
        if not sentences:
            raise ValueError("nothing to encode")
        if self.kind == "toy":
            return encode_sentences(sentences, self.toy, lang=self.lang)
        with tempfile.TemporaryDirectory(prefix="embsimp-coder-") as tmp:
            in_path = Path(tmp) / "sentences.txt"
            out_path = Path(tmp) / "encoded.emb"
            save_sentences(list(sentences), in_path)
            self._run("encode", in_path, out_path)
            try:
                matrix = read_embeddings(out_path, lang=self.lang)
            except ValueError as e:
                raise CoderFailureError(f"coder wrote an invalid EMB1 file: {e}") from e
        if matrix.row_count != len(sentences):
            raise CoderFailureError(
                f"coder returned {matrix.row_count} rows for {len(sentences)} sentences"
            )
        return matrix

    def decode(
        self,
        matrix: EmbeddingMatrix,
        default_pool: Sequence[Sentence] | None = None,
    ) -> list[Sentence]:
        if self.kind == "toy":
            pool_sentences = self.pool_sentences or default_pool
            if not pool_sentences:
                raise ValueError("toy decoding needs a sentence pool")
            pool = DecodePool.build(list(pool_sentences), self.toy)
            return decode_matrix(matrix, pool)
        with tempfile.TemporaryDirectory(prefix="embsimp-coder-") as tmp:
            in_path = Path(tmp) / "encoded.emb"
            out_path = Path(tmp) / "decoded.txt"
            write_embeddings(matrix, in_path)
            self._run("decode", in_path, out_path)
            try:
                decoded = load_sentences(out_path, self.lang)
            except ValueError as e:
                raise CoderFailureError(f"coder wrote an invalid sentence file: {e}") from e
        if len(decoded) != matrix.row_count:
            raise CoderFailureError(
                f"coder returned {len(decoded)} sentences for {matrix.row_count} rows"
            )
        return decoded


@dataclass(frozen=True)
class ExperimentReport:
    """Metric rows by condition column, plus enough provenance to recompute
    every number (seeds, model file, coder, corpus names)."""

    title: str
    conditions: tuple[str, ...]
    values: dict[str, dict[str, float]]
    provenance: dict[str, str]
    texts: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def with_external_scores(self, scores: Mapping[str, float]) -> "ExperimentReport":
        conditions = self.conditions
        if "external" not in conditions:
            conditions = (*conditions, "external")
        values = {m: dict(cols) for m, cols in self.values.items()}
        for metric, value in scores.items():
            values.setdefault(metric, {})["external"] = float(value)
        return replace(self, conditions=conditions, values=values)


def _toy_default_pool(corpus: ParallelCorpus) -> list[Sentence]:
    seen: set[str] = set()
    pool = []
    for s in corpus.complex_sentences() + corpus.simple_sentences():
        if s.text not in seen:
            seen.add(s.text)
            pool.append(s)
    return pool


def run_reconstruction(
    corpus: ParallelCorpus,
    coder: CoderHandle,
    out_dir: str | Path | None = None,
) -> ExperimentReport:
    """Encode-then-decode both corpus sides and report readability deltas.

    For the toy coder the decode pool defaults to the corpus's own distinct
    sentences, which makes the round trip exact on collision-free corpora.
    """
    if coder.lang != corpus.lang:
        raise ValueError(
            f"coder language {coder.lang!r} does not match corpus {corpus.lang!r}"
        )
    c_side = corpus.complex_sentences()
    s_side = corpus.simple_sentences()
    default_pool = _toy_default_pool(corpus) if coder.kind == "toy" else None
    c_prime = coder.decode(coder.encode(c_side), default_pool=default_pool)
    s_prime = coder.decode(coder.encode(s_side), default_pool=default_pool)

    r_c = corpus_readability(c_side)
    r_cp = corpus_readability(c_prime)
    r_s = corpus_readability(s_side)
    r_sp = corpus_readability(s_prime)
    d_c = delta_report(r_c, r_cp)
    d_s = delta_report(r_s, r_sp)

    dc, ds = RECONSTRUCTION_CONDITIONS[2], RECONSTRUCTION_CONDITIONS[5]
    values = {
        "FKGL": {
            "C": r_c.fkgl, "C'": r_cp.fkgl, dc: d_c.fkgl,
            "S": r_s.fkgl, "S'": r_sp.fkgl, ds: d_s.fkgl,
        },
        "ARI": {
            "C": r_c.ari, "C'": r_cp.ari, dc: d_c.ari,
            "S": r_s.ari, "S'": r_sp.ari, ds: d_s.ari,
        },
    }
    provenance = {
        "experiment": "reconstruction",
        "corpus": corpus.name,
        "pairs": str(len(corpus)),
        "lang": coder.lang,
        "coder": coder.describe(),
    }
    report = ExperimentReport(
        "reconstruction",
        RECONSTRUCTION_CONDITIONS,
        values,
        provenance,
        texts={
            "C_prime": tuple(s.text for s in c_prime),
            "S_prime": tuple(s.text for s in s_prime),
        },
    )
    if out_dir is not None:
        persist_report(report, out_dir)
    return report


def _reference_lists(
    sources: Sequence[Sentence], refs: MultiRefCorpus | ParallelCorpus
) -> tuple[list[tuple[Sentence, ...]], str]:
    if isinstance(refs, MultiRefCorpus):
        lists = list(refs.refs)
        name = refs.name or "multi-ref"
    else:
        lists = [(p.simple,) for p in refs.pairs]
        name = refs.name
    if len(lists) != len(sources):
        raise LengthMismatchError(
            f"{len(sources)} sources but {len(lists)} reference lists"
        )
    return lists, name


def _run_pipeline(
    sources: Sequence[Sentence],
    refs: MultiRefCorpus | ParallelCorpus,
    model_path: str | Path,
    coder: CoderHandle,
    english_metrics: bool,
    experiment: str,
    out_dir: str | Path | None,
) -> ExperimentReport:
    ref_lists, refs_name = _reference_lists(sources, refs)
    model = load_model(model_path)
    encoded = coder.encode(sources)
    if encoded.dim != model.dim:
        raise DimMismatchError(
            f"coder produced dim {encoded.dim} but model has dim {model.dim}"
        )
    transformed = transform_embeddings(model, encoded)
    outputs = coder.decode(transformed)

    values: dict[str, dict[str, float]] = {}
    conditions = SIMPLIFICATION_CONDITIONS if english_metrics else ("system",)
    if english_metrics:
        # readability of the reference side uses the first reference per
        # source, mirroring the index-0 rule used for pairing
        r_c = corpus_readability(sources)
        r_s = corpus_readability([lists[0] for lists in ref_lists])
        r_out = corpus_readability(outputs)
        values["FKGL"] = {"C": r_c.fkgl, "S": r_s.fkgl, "system": r_out.fkgl}
        values["ARI"] = {"C": r_c.ari, "S": r_s.ari, "system": r_out.ari}
    sari = sari_corpus(sources, outputs, ref_lists)
    values["SARI-Add"] = {"system": sari.add}
    values["SARI-Keep"] = {"system": sari.keep}
    values["SARI-Del"] = {"system": sari.delete}
    values["SARI"] = {"system": sari.sari}

    provenance = {
        "experiment": experiment,
        "sources": str(len(sources)),
        "references": refs_name,
        "model": str(model_path),
        "model_dim": str(model.dim),
        "model_hidden": str(model.hidden),
        "lang": coder.lang,
        "coder": coder.describe(),
    }
    report = ExperimentReport(
        experiment,
        conditions,
        values,
        provenance,
        texts={"system": tuple(s.text for s in outputs)},
    )
    if out_dir is not None:
        persist_report(report, out_dir)
    return report


def run_simplification(
    sources: Sequence[Sentence],
    refs: MultiRefCorpus | ParallelCorpus,
    model_path: str | Path,
    coder: CoderHandle,
    out_dir: str | Path | None = None,
) -> ExperimentReport:
    """Full pipeline: encode sources, transform with the trained model,
    decode, then evaluate readability and SARI against the references."""
    return _run_pipeline(
        sources, refs, model_path, coder,
        english_metrics=True, experiment="simplification", out_dir=out_dir,
    )


def run_multilingual(
    sources: Sequence[Sentence],
    refs: MultiRefCorpus | ParallelCorpus,
    model_path: str | Path,
    coder: CoderHandle,
    out_dir: str | Path | None = None,
) -> ExperimentReport:
    """Same pipeline with a non-English coder tag; FKGL/ARI are designed
    for English and are omitted from the report for other languages."""
    return _run_pipeline(
        sources, refs, model_path, coder,
        english_metrics=coder.lang.startswith("eng"),
        experiment="multilingual", out_dir=out_dir,
    )


def _fmt(value: float | None, missing: str) -> str:
    return missing if value is None else f"{value:.3f}"


def render_report(report: ExperimentReport, format: str = "markdown") -> str:
    """Deterministic serialization; numbers carry 3 decimal places and the
    provenance block is always included."""
    rows = [
        (metric, [report.values[metric].get(c) for c in report.conditions])
        for metric in report.values
    ]
    if format == "markdown":
        lines = [f"# {report.title}", ""]
        lines.append("| metric | " + " | ".join(report.conditions) + " |")
        lines.append("|" + "---|" * (len(report.conditions) + 1))
        for metric, cells in rows:
            rendered = " | ".join(_fmt(v, "---") for v in cells)
            lines.append(f"| {metric} | {rendered} |")
        lines.append("")
        lines.append("## Provenance")
        lines.append("")
        for key, value in report.provenance.items():
            lines.append(f"- {key}: {value}")
        lines.append("")
        return "\n".join(lines)
    if format == "csv":
        lines = ["metric," + ",".join(report.conditions)]
        for metric, cells in rows:
            lines.append(metric + "," + ",".join(_fmt(v, "") for v in cells))
        lines.append("")
        for key, value in report.provenance.items():
            lines.append(f"provenance,{key},{value}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {format!r}")


def persist_report(report: ExperimentReport, out_dir: str | Path) -> None:
    """Write the rendered report plus every decoded text set to out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.md").write_text(render_report(report, "markdown"), encoding="utf-8")
    (out_dir / "report.csv").write_text(render_report(report, "csv"), encoding="utf-8")
    for name, lines in report.texts.items():
        (out_dir / f"{name}.txt").write_text(
            "".join(f"{line}\n" for line in lines), encoding="utf-8"
        )
