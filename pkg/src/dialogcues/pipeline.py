"""File-based pipeline: split, extract, cluster, induce, predict, evaluate.

Each stage reads the files of the previous stages from the output
directory and writes its own, so any stage can be re-run on its own.
All randomness comes from the seeds in the configuration; the manifest
records the config hash, seeds and the SHA-256 of every stage input and
output.  Writes go through a temporary file and an atomic rename.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import asdict, dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path

from . import __version__
from .cluster import MixtureModel, cluster_report, hard_assign, select_models
from .corpus import Corpus, parse_corpus, split_corpus, write_corpus
from .cues import CueId, CueSchema, PatternTable, add_context_cue, build_schema, extract_table, read_table
from .lexicon import default_lexicon, read_lexicon
from .metrics import EvalReport, evaluate
from .rules import RuleSet, induce_rules, predict_table
from .synth import generate_corpus

__all__ = ["Stage", "PipelineConfig", "ConfigError", "MissingInput", "run_stage", "run_pipeline",
           "load_config"]

log = logging.getLogger("dialogcues")


class Stage(str, Enum):
    SPLIT = "split"
    EXTRACT = "extract"
    CLUSTER = "cluster"
    INDUCE = "induce"
    PREDICT = "predict"
    EVALUATE = "evaluate"
    GEN = "gen"


PIPELINE = (Stage.SPLIT, Stage.EXTRACT, Stage.CLUSTER, Stage.INDUCE, Stage.PREDICT, Stage.EVALUATE)


class ConfigError(ValueError):
    pass


class MissingInput(FileNotFoundError):
    pass


@dataclass
class SplitConfig:
    ratio: str = "3/4"
    seed: int = 0


@dataclass
class ClusterConfig:
    k_range: tuple = (1, 8)
    restarts: int = 20
    alpha: float = 1.0
    tol: float = 1e-8
    max_iter: int = 500
    seed: int = 0


@dataclass
class RulesConfig:
    beam_width: int = 5
    sig_threshold: float = 0.0
    min_coverage: int = 1
    repair: bool = True  # split rules until training pattern types are predicted as labeled


@dataclass
class GenConfig:
    n: int = 2000
    k: int = 7
    seed: int = 0
    dialogue_length: int = 20


@dataclass
class PipelineConfig:
    corpus_path: str | None = None
    lexicon_path: str | None = None
    schema: tuple = tuple(c.value for c in (CueId.SPEAKER, CueId.UT, CueId.ST, CueId.FVT, CueId.QM))
    split: SplitConfig = field(default_factory=SplitConfig)
    cluster: ClusterConfig = field(default_factory=ClusterConfig)
    rules: RulesConfig = field(default_factory=RulesConfig)
    gen: GenConfig = field(default_factory=GenConfig)
    context_cue: bool = False
    output_dir: str = "out"

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        sections = {"split": SplitConfig, "cluster": ClusterConfig, "rules": RulesConfig, "gen": GenConfig}
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        kwargs = {}
        for key, value in d.items():
            if key in sections:
                sub = sections[key]
                if not isinstance(value, dict):
                    raise ConfigError(f"config section {key!r} must be an object")
                bad = set(value) - set(sub.__dataclass_fields__)
                if bad:
                    raise ConfigError(f"unknown key(s) in {key!r}: {sorted(bad)}")
                kwargs[key] = sub(**value)
            else:
                kwargs[key] = value
        cfg = cls(**kwargs)
        cfg.cluster.k_range = tuple(cfg.cluster.k_range)
        cfg.schema = tuple(cfg.schema)
        cfg.split.ratio = str(cfg.split.ratio)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schema"] = list(self.schema)
        d["cluster"]["k_range"] = list(self.cluster.k_range)
        return d

    def with_seed(self, seed: int) -> "PipelineConfig":
        cfg = PipelineConfig.from_dict(self.to_dict())
        cfg.split.seed = cfg.cluster.seed = cfg.gen.seed = seed
        return cfg

    @property
    def ratio(self) -> Fraction:
        try:
            return Fraction(self.split.ratio)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"split.ratio {self.split.ratio!r} is not a number") from None

    def content_dict(self) -> dict:
        """Settings that affect results; the output directory is left out."""
        d = self.to_dict()
        del d["output_dir"]
        return d

    def config_hash(self) -> str:
        return hashlib.sha256(json.dumps(self.content_dict(), sort_keys=True).encode()).hexdigest()

    def validate(self):
        try:
            ids = [CueId(c) for c in self.schema]
        except ValueError as exc:
            raise ConfigError(f"schema: {exc}") from None
        if not ids or CueId.PREV_CLASS in ids:
            raise ConfigError("schema must list at least one base cue (PREV_CLASS comes from context_cue)")
        if len(set(ids)) != len(ids):
            raise ConfigError("schema lists a cue twice")
        if not 0 < self.ratio <= 1:
            raise ConfigError("split.ratio must be in (0, 1]")
        c = self.cluster
        if len(c.k_range) != 2 or not 1 <= c.k_range[0] <= c.k_range[1]:
            raise ConfigError("cluster.k_range must be [k_min, k_max] with 1 <= k_min <= k_max")
        if c.restarts < 1 or c.max_iter < 1 or c.alpha <= 0 or c.tol < 0:
            raise ConfigError("cluster: restarts, max_iter >= 1; alpha > 0; tol >= 0")
        r = self.rules
        if r.beam_width < 1 or r.min_coverage < 1 or r.sig_threshold < 0:
            raise ConfigError("rules: beam_width, min_coverage >= 1; sig_threshold >= 0")
        if self.gen.n < 1 or self.gen.k < 1 or self.gen.dialogue_length < 1:
            raise ConfigError("gen: n, k and dialogue_length must be >= 1")
        for name in ("split", "cluster", "gen"):
            if getattr(self, name).seed < 0:
                raise ConfigError(f"{name}.seed must be non-negative")


def load_config(path) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: {exc}") from None
    try:
        return PipelineConfig.from_dict(doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# --- file helpers ---------------------------------------------------------------

def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class _StageRun:
    """Tracks the inputs read and outputs written by one stage."""

    def __init__(self, stage: Stage, out: Path):
        self.stage, self.out = stage, out
        self.inputs: dict[str, str] = {}
        self.outputs: dict[str, str] = {}
        self.extra: dict = {}

    def need(self, name: str, what: str) -> Path:
        path = self.out / name
        if not path.exists():
            raise MissingInput(f"{self.stage.value}: missing {what} ({path}); run the earlier stage first")
        return path

    def read(self, name: str, what: str) -> str:
        path = self.need(name, what)
        data = path.read_bytes()
        self.inputs[name] = _sha256(data)
        return data.decode("utf-8")

    def read_external(self, path, label: str) -> bytes:
        path = Path(path)
        if not path.exists():
            raise MissingInput(f"{self.stage.value}: {label} {path} not found")
        data = path.read_bytes()
        self.inputs[label] = _sha256(data)
        return data

    def write(self, name: str, text: str):
        _atomic_write(self.out / name, text)
        self.outputs[name] = _sha256(text.encode("utf-8"))


def _update_manifest(cfg: PipelineConfig, run: _StageRun):
    path = Path(cfg.output_dir) / "manifest.json"
    manifest = {}
    if path.exists():
        try:
            manifest = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError:
            manifest = {}
    manifest.update({
        "tool": "dialogcues",
        "version": __version__,
        "config_hash": cfg.config_hash(),
        "config": cfg.content_dict(),
        "seeds": {"split": cfg.split.seed, "cluster": cfg.cluster.seed, "gen": cfg.gen.seed},
    })
    stages = manifest.setdefault("stages", {})
    stages[run.stage.value] = {"inputs": dict(sorted(run.inputs.items())),
                               "outputs": dict(sorted(run.outputs.items())), **run.extra}
    manifest["stages"] = dict(sorted(stages.items()))
    _atomic_write(path, json.dumps(manifest, indent=1, sort_keys=True) + "\n")


def _lexicon(cfg: PipelineConfig, run: _StageRun):
    if cfg.lexicon_path:
        run.read_external(cfg.lexicon_path, "lexicon")
        return read_lexicon(cfg.lexicon_path)
    return default_lexicon()


def _schema(run: _StageRun, name: str = "schema.json") -> CueSchema:
    return CueSchema.from_dict(json.loads(run.read(name, "cue schema")))


# --- stages ---------------------------------------------------------------------

def _gen(cfg: PipelineConfig, run: _StageRun):
    g = cfg.gen
    planted = generate_corpus(g.n, g.k, g.seed, dialogue_length=g.dialogue_length)
    run.write("synthetic_corpus.jsonl", write_corpus(planted.corpus))
    run.write("synthetic_labels.tsv", planted.labels_tsv())


def _split(cfg: PipelineConfig, run: _StageRun):
    if not cfg.corpus_path:
        raise ConfigError("corpus_path is not set")
    corpus = parse_corpus(run.read_external(cfg.corpus_path, "corpus"))
    result = split_corpus(corpus, cfg.ratio, cfg.split.seed)
    run.write("train.jsonl", write_corpus(result.train))
    run.write("test.jsonl", write_corpus(result.test))
    run.extra["sizes"] = {"train": len(result.train), "test": len(result.test)}


def _corpus(run: _StageRun, name: str) -> Corpus:
    return parse_corpus(run.read(name, "split corpus"))


def _extract(cfg: PipelineConfig, run: _StageRun):
    lexicon = _lexicon(cfg, run)
    schema = build_schema(cfg.schema, lexicon)
    train, test = _corpus(run, "train.jsonl"), _corpus(run, "test.jsonl")
    run.write("schema.json", json.dumps(schema.to_dict(), indent=1) + "\n")
    train_table = extract_table(train, schema, lexicon)
    run.write("train_patterns.tsv", train_table.to_tsv())
    run.write("test_patterns.tsv", extract_table(test, schema, lexicon).to_tsv())
    run.extra["schema_id"] = schema.schema_id
    run.extra["train_cpts"] = train_table.n_cpts


def _cluster(cfg: PipelineConfig, run: _StageRun):
    schema = _schema(run)
    train = read_table(run.read("train_patterns.tsv", "training pattern table"), schema)
    test = read_table(run.read("test_patterns.tsv", "test pattern table"), schema)
    c = cfg.cluster
    ranked = select_models(train, c.k_range, c.seed, c.restarts, c.alpha, c.tol, c.max_iter)
    best = ranked[0]
    run.write("model.json", best.to_json())
    if len(ranked) > 1:
        run.write("model_2.json", ranked[1].to_json())
    run.write("models.tsv", "rank\tk\tscore\tlog_posterior\n" + "".join(
        f"{i}\t{m.k}\t{m.score!r}\t{m.log_posterior!r}\n" for i, m in enumerate(ranked)))
    report = cluster_report(best, train)
    run.write("cluster_report.txt", report.to_text())
    for stem, text in report.to_tsv().items():
        run.write(f"{stem}.tsv", text)
    run.write("train_labeled.tsv", train.with_labels(hard_assign(best, train)).to_tsv())
    test_labels = hard_assign(best, test) if len(test) else []
    run.write("test_labeled.tsv", test.with_labels(test_labels).to_tsv())
    run.extra["k"] = best.k
    run.extra["top_models"] = [{"k": m.k, "score": m.score} for m in ranked[:2]]


def _read_labeled(run: _StageRun, name: str, schema: CueSchema) -> PatternTable:
    return read_table(run.read(name, "labeled pattern table"), schema)


def _induce(cfg: PipelineConfig, run: _StageRun):
    schema = _schema(run)
    model = MixtureModel.from_json(run.read("model.json", "mixture model"))
    train = _read_labeled(run, "train_labeled.tsv", schema)
    if cfg.context_cue:
        test = _read_labeled(run, "test_labeled.tsv", schema)
        # both halves keep document order; merge back into dialogue order
        merged = _corpus(run, "train.jsonl").utterances + _corpus(run, "test.jsonl").utterances
        corpus = Corpus(tuple(sorted(merged, key=lambda u: (u.dialogue_id, u.turn_index, u.position_in_turn))))
        both = PatternTable(train.rows + test.rows, schema)
        ctx = add_context_cue(both, corpus, n_classes=model.k)
        schema = ctx.schema
        train = ctx.select(train.ids)
        run.write("schema_context.json", json.dumps(schema.to_dict(), indent=1) + "\n")
        run.write("train_context.tsv", train.to_tsv())
        run.write("test_context.tsv", ctx.select(test.ids).to_tsv())
    rc = cfg.rules
    ruleset = induce_rules(train, schema, rc.beam_width, rc.sig_threshold, rc.min_coverage,
                           class_count=model.k, repair=rc.repair)
    run.write("rules.txt", ruleset.to_text())
    run.write("rules.json", ruleset.to_json())
    run.extra["rule_count"] = len(ruleset)
    run.extra["schema_arity"] = len(schema)
    run.extra["context_cue"] = cfg.context_cue


def _predict(cfg: PipelineConfig, run: _StageRun):
    ruleset = RuleSet.from_json(run.read("rules.json", "rule set"))
    if cfg.context_cue:
        schema = _schema(run, "schema_context.json")
        test = read_table(run.read("test_context.tsv", "context-augmented test table"), schema)
    else:
        test = _read_labeled(run, "test_labeled.tsv", _schema(run))
    preds = predict_table(ruleset, test) if len(test) else []
    K = ruleset.class_count
    lines = ["utterance_id\tactual\tpredicted\tunmatched\tmatched_rules\t"
             + "\t".join(f"p_{j}" for j in range(K))]
    for row, p in zip(test.rows, preds):
        probs = "\t".join(repr(float(x)) for x in p.probabilities)
        matched = ",".join(str(i) for i in p.matched) or "-"
        lines.append(f"{row.utterance_id}\t{row.label}\t{p.label}\t{int(p.unmatched)}\t{matched}\t{probs}")
    run.write("predictions.tsv", "\n".join(lines) + "\n")
    run.extra["unmatched"] = sum(p.unmatched for p in preds)


def _evaluate(cfg: PipelineConfig, run: _StageRun) -> EvalReport:
    ruleset = RuleSet.from_json(run.read("rules.json", "rule set"))
    text = run.read("predictions.tsv", "predictions")
    rows = [ln.split("\t") for ln in text.splitlines()[1:] if ln.strip()]
    actual = [int(r[1]) for r in rows]
    predicted = [int(r[2]) for r in rows]
    train_name = "train_context.tsv" if cfg.context_cue else "train_labeled.tsv"
    train_text = run.read(train_name, "training table")
    cpts = len({tuple(ln.split("\t")[1:-1]) for ln in train_text.splitlines()[1:] if ln.strip()})
    report = evaluate(actual, predicted, ruleset.class_count, len(ruleset), cpts)
    run.write("eval.txt", report.to_text())
    run.write("eval.tsv", report.to_tsv())
    return report


_STAGES = {
    Stage.GEN: _gen, Stage.SPLIT: _split, Stage.EXTRACT: _extract, Stage.CLUSTER: _cluster,
    Stage.INDUCE: _induce, Stage.PREDICT: _predict, Stage.EVALUATE: _evaluate,
}


def run_stage(stage, cfg: PipelineConfig):
    """Run one stage, writing its artifacts and updating the manifest."""
    stage = Stage(stage)
    cfg.validate()
    run = _StageRun(stage, Path(cfg.output_dir))
    log.info("stage %s", stage.value)
    result = _STAGES[stage](cfg, run)
    _update_manifest(cfg, run)
    return result


def run_pipeline(cfg: PipelineConfig) -> EvalReport:
    """One full cycle: split, extract, cluster, induce, predict, evaluate."""
    report = None
    for stage in PIPELINE:
        report = run_stage(stage, cfg)
    return report
