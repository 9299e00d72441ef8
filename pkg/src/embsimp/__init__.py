"""Embedding-space sentence simplification toolkit.

Encode sentences to fixed-size vectors, learn a small feed-forward
transform from complex-sentence embeddings to simple-sentence embeddings,
decode back to text, and evaluate with FKGL, ARI, and SARI. A deterministic
toy coder makes the whole pipeline testable offline; real coders plug in
through a file-based subprocess protocol.
"""

from .corpus import (
    MultiRefCorpus,
    ParallelCorpus,
    Sentence,
    SentencePair,
    first_reference,
    load_multi_ref,
    load_parallel_tsv,
    load_sentences,
    save_parallel_tsv,
    save_sentences,
    split_corpus,
)
from .embeddings import EmbeddingMatrix, read_embeddings, write_embeddings
from .experiments import (
    CoderHandle,
    ExperimentReport,
    render_report,
    run_multilingual,
    run_reconstruction,
    run_simplification,
)
from .metrics import (
    ReadabilityReport,
    SariScore,
    corpus_readability,
    count_syllables,
    delta_report,
    merge_external_scores,
    sari_corpus,
    sari_sentence,
    tokenize,
)
from .mlp import (
    MlpModel,
    TrainingConfig,
    TrainingLog,
    adam_step,
    forward,
    gradients,
    init_model,
    load_model,
    mse_loss,
    param_count,
    save_model,
    train,
    transform_embeddings,
)
from .toycoder import DecodePool, ToyCoderConfig, roundtrip_check, toy_decode, toy_encode

__version__ = "0.1.0"

__all__ = [
    "CoderHandle",
    "DecodePool",
    "EmbeddingMatrix",
    "ExperimentReport",
    "MlpModel",
    "MultiRefCorpus",
    "ParallelCorpus",
    "ReadabilityReport",
    "SariScore",
    "Sentence",
    "SentencePair",
    "ToyCoderConfig",
    "TrainingConfig",
    "TrainingLog",
    "adam_step",
    "corpus_readability",
    "count_syllables",
    "delta_report",
    "first_reference",
    "forward",
    "gradients",
    "init_model",
    "load_model",
    "load_multi_ref",
    "load_parallel_tsv",
    "load_sentences",
    "merge_external_scores",
    "mse_loss",
    "param_count",
    "read_embeddings",
    "render_report",
    "roundtrip_check",
    "run_multilingual",
    "run_reconstruction",
    "run_simplification",
    "sari_corpus",
    "sari_sentence",
    "save_model",
    "save_parallel_tsv",
    "save_sentences",
    "split_corpus",
    "tokenize",
    "toy_decode",
    "toy_encode",
    "train",
    "transform_embeddings",
    "write_embeddings",
]
