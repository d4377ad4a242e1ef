"""Command-line front end for the file-based pipeline.

Exit codes: 0 success, 1 usage or configuration error, 2 data error
(unreadable corpus, missing stage input, schema mismatch).
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .corpus import CorpusError
from .cues import SchemaError
from .lexicon import LexiconError
from .pipeline import PIPELINE, ConfigError, MissingInput, PipelineConfig, Stage, load_config, run_stage

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2

log = logging.getLogger("dialogcues")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON pipeline configuration")
    common.add_argument("--output-dir", help="directory for stage files (overrides the config)")
    common.add_argument("--seed", type=int, help="override every seed in the configuration")
    common.add_argument("--quiet", action="store_true", help="only report errors")

    parser = _Parser(prog="dialogcues", description="Cue-based dialogue act discovery pipeline.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        Stage.SPLIT: "split the corpus into training and test utterances",
        Stage.EXTRACT: "extract cue patterns from both halves",
        Stage.CLUSTER: "fit mixture models, select k and label the patterns",
        Stage.INDUCE: "induce CN2 rules from the labeled training patterns",
        Stage.PREDICT: "classify the test patterns with the rule set",
        Stage.EVALUATE: "confusion matrix, accuracies and specificity index",
        Stage.GEN: "write a synthetic annotated corpus with planted classes",
    }
    for stage, text in helps.items():
        p = sub.add_parser(stage.value, parents=[common], help=text, description=text)
        if stage is Stage.SPLIT:
            p.add_argument("--corpus", help="annotated corpus (JSON lines); overrides the config")
    p = sub.add_parser("pipeline", parents=[common], help="run split through evaluate",
                       description="Run split, extract, cluster, induce, predict and evaluate.")
    p.add_argument("--corpus", help="annotated corpus (JSON lines); overrides the config")
    return parser


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        cfg = cfg.with_seed(args.seed)
    if args.output_dir:
        cfg.output_dir = args.output_dir
    if getattr(args, "corpus", None):
        cfg.corpus_path = args.corpus
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        cfg = _config(args)
        stages = PIPELINE if args.command == "pipeline" else (Stage(args.command),)
        report = None
        for stage in stages:
            report = run_stage(stage, cfg)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_USAGE
    except (MissingInput, CorpusError, SchemaError, LexiconError, OSError, ValueError, KeyError) as exc:
        log.error("%s", exc)
        return EXIT_DATA
    if report is not None and not args.quiet:
        sys.stdout.write(report.to_text())
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
