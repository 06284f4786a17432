"""Corpus evaluation: naive WER/CER, lenient CER and bootstrap intervals."""

from __future__ import annotations

import io
import json
import logging
import os
import re
import unicodedata
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np

from lenient_cer.builder import Resources, StageConfig, assemble_lattice, reference_variants
from lenient_cer.editdist import EditResult, edit_distance, levenshtein
from lenient_cer.errors import EmptyReference, MalformedLine, NoValidRecords
from lenient_cer.kana import ReadingDictionary, segment_and_read

log = logging.getLogger(__name__)

DEFAULT_BOOTSTRAP = 1000
_BOOTSTRAP_CHUNK = 64


@dataclass(frozen=True)
class UtteranceRecord:
    id: str
    reference: str
    hypothesis: str


@dataclass(frozen=True)
class MetricScore:
    distance: int
    substitutions: int
    insertions: int
    deletions: int
    denom: int
    best_path: str
    alignment: tuple = ()

    @property
    def rate(self) -> float:
        return self.distance / self.denom

    @classmethod
    def from_edit(cls, result: EditResult, sep: str = "") -> MetricScore:
        denom = len(result.best_path)
        if denom == 0:
            raise EmptyReference("reference side has no units")
        return cls(
            result.distance,
            result.substitutions,
            result.insertions,
            result.deletions,
            denom,
            sep.join(result.best_path),
            result.alignment,
        )


@dataclass(frozen=True)
class UtteranceScore:
    id: str
    metrics: dict[str, MetricScore]


@dataclass(frozen=True)
class CorpusMetric:
    substitutions: int
    insertions: int
    deletions: int
    denom: int
    ci95: tuple[float, float]

    @property
    def errors(self) -> int:
        return self.substitutions + self.insertions + self.deletions

    @property
    def rate(self) -> float:
        return self.errors / self.denom


@dataclass
class EvalReport:
    utterances: list[UtteranceScore]
    corpus: dict[str, CorpusMetric]
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "metadata": self.metadata,
            "corpus": {
                name: {
                    "errors": {
                        "sub": m.substitutions,
                        "ins": m.insertions,
                        "del": m.deletions,
                        "total": m.errors,
                    },
                    "denom": m.denom,
                    "rate": m.rate,
                    "ci95": list(m.ci95),
                }
                for name, m in self.corpus.items()
            },
            "utterances": [
                {
                    "id": u.id,
                    "metrics": {
                        name: {
                            "distance": s.distance,
                            "sub": s.substitutions,
                            "ins": s.insertions,
                            "del": s.deletions,
                            "denom": s.denom,
                            "rate": s.rate,
                            "best_path": s.best_path,
                        }
                        for name, s in u.metrics.items()
                    },
                }
                for u in self.utterances
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2) + "\n"

    def to_tsv(self) -> str:
        buf = io.StringIO()
        buf.write("id\tmetric\tdistance\tsub\tins\tdel\tdenom\trate\tci_lo\tci_hi\tbest_path\n")
        for u in self.utterances:
            for name, s in u.metrics.items():
                buf.write(
                    f"{u.id}\t{name}\t{s.distance}\t{s.substitutions}\t{s.insertions}\t"
                    f"{s.deletions}\t{s.denom}\t{s.rate!r}\t\t\t{s.best_path}\n"
                )
        for name, m in self.corpus.items():
            buf.write(
                f"*corpus*\t{name}\t{m.errors}\t{m.substitutions}\t{m.insertions}\t"
                f"{m.deletions}\t{m.denom}\t{m.rate!r}\t{m.ci95[0]!r}\t{m.ci95[1]!r}\t\n"
            )
        return buf.getvalue()


def prepare_text(text: str, form: str = "NFC", strip_punct: bool = False) -> str:
    text = unicodedata.normalize(form, text)
    if strip_punct:
        text = "".join(ch for ch in text if unicodedata.category(ch)[0] not in "PZ")
    return text


def naive_cer(reference: str, hypothesis: str) -> MetricScore:
    if not reference:
        raise EmptyReference("reference is empty")
    return MetricScore.from_edit(levenshtein(reference, hypothesis))


def naive_wer(reference: str, hypothesis: str, readings: ReadingDictionary) -> MetricScore:
    """Word-level Levenshtein, both sides segmented with the same dictionary."""
    if not reference:
        raise EmptyReference("reference is empty")
    ref_words = [t.surface for t in segment_and_read(reference, readings)]
    hyp_words = [t.surface for t in segment_and_read(hypothesis, readings)]
    return MetricScore.from_edit(levenshtein(ref_words, hyp_words), sep=" ")


def lenient_eval(
    record: UtteranceRecord,
    config: StageConfig,
    resources: Resources,
    form: str = "NFC",
) -> MetricScore:
    lattice = assemble_lattice(reference_variants(record.reference, config, resources, form))
    hyp = unicodedata.normalize(form, record.hypothesis)
    return MetricScore.from_edit(edit_distance(lattice, hyp))


def parse_metric(name: str, config: StageConfig) -> tuple[str, StageConfig | None]:
    """Map a metric name to (kind, lattice config).

    ``lenient`` uses ``config``; ``lenient:raw`` or ``lenient:kana+kanji``
    select explicit stages with the restorer settings of ``config``.
    """
    if name in ("wer", "cer"):
        return name, None
    if name == "lenient":
        return "lenient", config
    if name.startswith("lenient:"):
        stages = name.split(":", 1)[1]
        names = [] if stages == "raw" else stages.split("+")
        return "lenient", StageConfig.from_names(
            names, max_candidates=config.max_candidates, margin=config.margin
        )
    raise ValueError(f"unknown metric {name!r}")


def staged_metric_names(config: StageConfig) -> list[str]:
    return [f"lenient:{c.name}" for c in config.cumulative()]


@dataclass
class _Job:
    plans: list[tuple[str, str, StageConfig | None]]
    resources: Resources
    form: str
    strip_punct: bool
    dump_dir: str | None
    dump_config: StageConfig | None


_WORKER_JOB: _Job | None = None


def _init_worker(job: _Job) -> None:
    global _WORKER_JOB
    _WORKER_JOB = job


def _score_in_worker(record: UtteranceRecord) -> UtteranceScore:
    return _score_record(record, _WORKER_JOB)


def _score_record(record: UtteranceRecord, job: _Job) -> UtteranceScore:
    ref = prepare_text(record.reference, job.form, job.strip_punct)
    hyp = prepare_text(record.hypothesis, job.form, job.strip_punct)
    scores: dict[str, MetricScore] = {}
    for name, kind, config in job.plans:
        if kind == "cer":
            scores[name] = naive_cer(ref, hyp)
        elif kind == "wer":
            scores[name] = naive_wer(ref, hyp, job.resources.readings)
        else:
            scores[name] = lenient_eval(UtteranceRecord(record.id, ref, hyp), config, job.resources, job.form)
    if job.dump_dir is not None and job.dump_config is not None:
        lattice = assemble_lattice(reference_variants(ref, job.dump_config, job.resources, job.form))
        path = os.path.join(job.dump_dir, _safe_filename(record.id) + ".lat")
        with open(path, "w", encoding="utf-8") as f:
            lattice.write(f)
    return UtteranceScore(record.id, scores)


def _safe_filename(name: str) -> str:
    return re.sub(r"[^\w.-]", "_", name) or "_"


def validate_records(
    records: Iterable[UtteranceRecord], form: str = "NFC", strip_punct: bool = False
) -> tuple[list[UtteranceRecord], list[dict]]:
    valid, rejected = [], []
    seen = set()
    for rec in records:
        if rec.id in seen:
            rejected.append({"id": rec.id, "reason": "duplicate id"})
            log.warning("rejected record %s: duplicate id", rec.id)
            continue
        seen.add(rec.id)
        if not prepare_text(rec.reference, form, strip_punct):
            rejected.append({"id": rec.id, "reason": "empty reference"})
            log.warning("rejected record %s: empty reference", rec.id)
            continue
        valid.append(rec)
    return valid, rejected


def bootstrap_ci(
    errors: Sequence[float],
    denoms: Sequence[float],
    resamples: int,
    rng: np.random.Generator,
    level: float = 0.95,
) -> tuple[float, float]:
    """Percentile bootstrap interval for sum(errors) / sum(denoms).

    Utterances are resampled with replacement. The interval is widened if
    necessary so that it contains the point estimate.
    """
    return bootstrap_cis([errors], denoms, resamples, rng, level)[0]


def bootstrap_cis(
    errors_by_metric: Sequence[Sequence[float]],
    denoms: Sequence[float] | Sequence[Sequence[float]],
    resamples: int,
    rng: np.random.Generator,
    level: float = 0.95,
) -> list[tuple[float, float]]:
    """Paired bootstrap: every metric is evaluated on the same resamples."""
    err = np.asarray(errors_by_metric, dtype=float)
    den = np.asarray(denoms, dtype=float)
    if den.ndim == 1:
        den = np.broadcast_to(den, err.shape)
    n = err.shape[1]
    rates = np.empty((err.shape[0], resamples))
    done = 0
    while done < resamples:
        size = min(_BOOTSTRAP_CHUNK, resamples - done)
        idx = rng.integers(0, n, size=(size, n))
        for k in range(err.shape[0]):
            rates[k, done : done + size] = err[k][idx].sum(axis=1) / den[k][idx].sum(axis=1)
        done += size
    tail = (1.0 - level) / 2 * 100
    out = []
    for k in range(err.shape[0]):
        lo, hi = np.percentile(rates[k], [tail, 100 - tail])
        point = err[k].sum() / den[k].sum()
        out.append((float(min(lo, point)), float(max(hi, point))))
    return out


def corpus_evaluate(
    records: Iterable[UtteranceRecord],
    metrics: Sequence[str] = ("wer", "cer", "lenient"),
    config: StageConfig = StageConfig(),
    resources: Resources | None = None,
    seed: int = 0,
    bootstrap: int = DEFAULT_BOOTSTRAP,
    form: str = "NFC",
    strip_punct: bool = False,
    jobs: int = 1,
    dump_dir: str | None = None,
    metadata: dict | None = None,
) -> EvalReport:
    """Score every record and aggregate micro-averaged rates with 95% intervals."""
    if bootstrap < 100:
        raise ValueError("bootstrap needs at least 100 resamples")
    resources = resources or Resources()
    plans = []
    for name in dict.fromkeys(metrics):
        kind, cfg = parse_metric(name, config)
        plans.append((name, kind, cfg))
    valid, rejected = validate_records(records, form, strip_punct)
    if not valid:
        raise NoValidRecords("no valid records to evaluate")

    if dump_dir is not None:
        os.makedirs(dump_dir, exist_ok=True)
    job = _Job(plans, resources, form, strip_punct, dump_dir, config if dump_dir else None)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker, initargs=(job,)) as pool:
            chunk = max(1, len(valid) // (jobs * 8))
            utterances = list(pool.map(_score_in_worker, valid, chunksize=chunk))
    else:
        utterances = [_score_record(rec, job) for rec in valid]

    names = [p[0] for p in plans]
    err = [[u.metrics[n].distance for u in utterances] for n in names]
    den = [[u.metrics[n].denom for u in utterances] for n in names]
    rng = np.random.default_rng(seed)
    cis = bootstrap_cis(err, den, bootstrap, rng)

    corpus = {}
    for k, n in enumerate(names):
        scores = [u.metrics[n] for u in utterances]
        corpus[n] = CorpusMetric(
            substitutions=sum(s.substitutions for s in scores),
            insertions=sum(s.insertions for s in scores),
            deletions=sum(s.deletions for s in scores),
            denom=sum(s.denom for s in scores),
            ci95=cis[k],
        )

    meta = {
        "config": asdict(config) | {"name": config.name},
        "metrics": names,
        "seed": seed,
        "bootstrap": bootstrap,
        "normalization": form,
        "strip_punct": strip_punct,
        "records": {"valid": len(valid), "rejected": rejected},
    }
    if metadata:
        meta.update(metadata)
    return EvalReport(utterances, corpus, meta)


def read_corpus(stream: TextIO) -> list[UtteranceRecord]:
    """Parse ``id<TAB>reference<TAB>hypothesis`` lines; ``#`` starts a comment.

    A missing hypothesis column means an empty hypothesis.
    """
    records = []
    for lineno, line in enumerate(stream, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) == 2:
            fields.append("")
        if len(fields) != 3:
            raise MalformedLine("expected id<TAB>reference<TAB>hypothesis", lineno)
        records.append(UtteranceRecord(*fields))
    return records


def load_corpus(path: str | os.PathLike) -> list[UtteranceRecord]:
    with open(path, encoding="utf-8") as f:
        return read_corpus(f)
