"""The external coder protocol, implemented over SONAR:

    sonar-bridge [config flags] encode --lang <tag> --in <sentences.txt> --out <file.emb>
    sonar-bridge [config flags] decode --lang <tag> --in <file.emb> --out <sentences.txt>

Config flags come before the mode so a caller can treat a partially
applied command line ("sonar-bridge --device cpu") as the coder command.
Sentence files are UTF-8, one sentence per line, LF. Embedding files are
EMB1 with dim 1024 (the SONAR embedding width). Exit code 0 on success;
any failure (missing models, malformed input, wrong dim) exits nonzero
with a diagnostic on stderr.

Decoding defaults, also recorded here for report provenance: the decoder
pipeline's standard beam search with max sequence length 512 (configurable
via --max-seq-len).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .backends import BACKENDS, SONAR_DIM, BackendUnavailableError, BridgeConfig
from .emb1 import Emb1Error, read_matrix, write_matrix


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sonar-bridge",
        description=(
            "Batch-file adapter for the pretrained SONAR text encoder/decoder "
            "(1024-dim shared multilingual space). Decoding uses the pipeline's "
            "standard beam search; --max-seq-len bounds generation length."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--device", default="auto",
                        help="compute device: auto, cpu, cuda, cuda:N (default: auto, "
                             "falls back to cpu when no GPU is present)")
    parser.add_argument("--batch-size", type=int, default=32,
                        help="internal batching width (default: 32)")
    parser.add_argument("--max-seq-len", type=int, default=512,
                        help="decoder generation length bound (default: 512)")
    parser.add_argument("--backend", default="sonar", choices=sorted(BACKENDS),
                        help="model backend; 'hash' is a deterministic model-free "
                             "stand-in for protocol testing (default: sonar)")
    sub = parser.add_subparsers(dest="mode", required=True, metavar="MODE")
    for mode, description in (
        ("encode", "sentences file -> EMB1 matrix, one 1024-dim row per line"),
        ("decode", "EMB1 matrix -> sentences file, one line per row"),
    ):
        p = sub.add_parser(mode, help=description)
        p.add_argument("--lang", required=True,
                       help="FLORES-200 language tag, e.g. eng_Latn, deu_Latn, spa_Latn")
        p.add_argument("--in", dest="in_path", required=True, metavar="FILE")
        p.add_argument("--out", dest="out_path", required=True, metavar="FILE")
    return parser


def _read_lines(path: Path) -> list[str]:
    if not path.exists():
        raise FileNotFoundError(f"no such input file: {path}")
    lines = path.read_text(encoding="utf-8").split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ValueError("input file is empty; an empty matrix is invalid")
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            raise ValueError(f"line {i} is blank")
    return lines


def run(args) -> int:
    config = BridgeConfig(
        lang=args.lang,
        device=args.device,
        batch_size=args.batch_size,
        max_seq_len=args.max_seq_len,
    )
    backend = BACKENDS[args.backend](config)
    if args.mode == "encode":
        lines = _read_lines(Path(args.in_path))
        matrix = backend.encode(lines)
        if matrix.shape[0] != len(lines):
            raise RuntimeError(
                f"backend returned {matrix.shape[0]} rows for {len(lines)} lines"
            )
        write_matrix(matrix, args.out_path)
        print(f"encoded {len(lines)} sentences ({config.lang}) to {args.out_path}")
    else:
        matrix = read_matrix(args.in_path)
        if matrix.shape[1] != SONAR_DIM:
            raise ValueError(
                f"EMB1 dim {matrix.shape[1]} is not the SONAR width {SONAR_DIM}"
            )
        texts = backend.decode(matrix)
        if len(texts) != matrix.shape[0]:
            raise RuntimeError(
                f"backend returned {len(texts)} sentences for {matrix.shape[0]} rows"
            )
        cleaned = [" ".join(t.split()) for t in texts]
        Path(args.out_path).write_text(
            "".join(f"{t}\n" for t in cleaned), encoding="utf-8"
        )
        print(f"decoded {matrix.shape[0]} rows ({config.lang}) to {args.out_path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except BackendUnavailableError as e:
        print(f"sonar-bridge: backend unavailable: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError, RuntimeError, Emb1Error) as e:
        print(f"sonar-bridge: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
