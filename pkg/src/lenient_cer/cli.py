"""Command-line interface.

    lenient-cer eval --corpus corpus.tsv --readings readings.tsv \\
        --lexicon lexicon.tsv --ngram model.tsv --out report.json
    lenient-cer build この拉麺はうまい。 --fixtures
    lenient-cer train-ngram --corpus text.txt --out model.tsv

Exit codes: 0 success, 1 usage error, 2 resource load error, 3 no valid records.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys

from lenient_cer import fixtures
from lenient_cer.builder import DEFAULT_FUNCTION_WORDS, Resources, StageConfig, assemble_lattice, reference_variants
from lenient_cer.errors import LenientError, NoValidRecords, ResourceError
from lenient_cer.evaluate import DEFAULT_BOOTSTRAP, corpus_evaluate, load_corpus, staged_metric_names
from lenient_cer.kana import ReadingDictionary
from lenient_cer.lexicon import load_lexicon
from lenient_cer.restorer import (
    DEFAULT_MARGIN,
    DEFAULT_MAX_CANDIDATES,
    DEFAULT_ORDER,
    ExternalRestorer,
    NgramModel,
    NgramRestorer,
    train_ngram,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RESOURCE = 2
EXIT_NO_RECORDS = 3

log = logging.getLogger("lenient_cer")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            h.update(block)
    return h.hexdigest()


def _add_resource_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--stages", default="kana,kanji,lexicon", help="comma list of kana, kanji, lexicon (empty for raw)")
    p.add_argument("--readings", help="reading dictionary TSV (surface, reading, frequency)")
    p.add_argument("--lexicon", help="spelling equivalence classes TSV")
    p.add_argument("--ngram", help="character n-gram model TSV for the kanji restorer")
    p.add_argument("--restorer-cmd", help="external restorer command (tagged line protocol)")
    p.add_argument("--function-words", help="file of words never respelled, one per line")
    p.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES)
    p.add_argument("--margin", type=float, default=DEFAULT_MARGIN)
    p.add_argument("--fixtures", action="store_true", help="fall back to the bundled toy resources")
    p.add_argument("--lexicon-report", help="load the lexicon leniently and write rejected lines here as JSON")
    p.add_argument("--nfkc", action="store_true", help="normalize with NFKC instead of NFC")


def _config(args) -> StageConfig:
    try:
        return StageConfig.from_names(
            args.stages.split(","), max_candidates=args.max_candidates, margin=args.margin
        )
    except ValueError as e:
        raise UsageError(str(e)) from e


def _load_resources(args, config: StageConfig) -> tuple[Resources, dict]:
    """Returns the resources and a metadata block of file checksums."""
    meta: dict = {}
    if args.readings:
        readings = ReadingDictionary.load(args.readings)
        meta["readings"] = {"file": os.path.basename(args.readings), "sha256": _sha256(args.readings)}
    elif args.fixtures:
        readings = fixtures.readings()
        meta["readings"] = {"file": "<bundled>"}
    else:
        readings = ReadingDictionary()

    lexicon = None
    if args.lexicon:
        lexicon = load_lexicon(args.lexicon, strict=not args.lexicon_report)
        meta["lexicon"] = {"file": os.path.basename(args.lexicon), "sha256": _sha256(args.lexicon)}
        if args.lexicon_report:
            with open(args.lexicon_report, "w", encoding="utf-8") as f:
                json.dump(lexicon.report(), f, ensure_ascii=False, indent=2)
                f.write("\n")
    elif args.fixtures:
        lexicon = fixtures.lexicon()
        meta["lexicon"] = {"file": "<bundled>"}
    elif config.lexicon:
        raise UsageError("the lexicon stage needs --lexicon")

    restorer = None
    if args.restorer_cmd:
        restorer = ExternalRestorer(args.restorer_cmd)
        meta["restorer"] = {"command": args.restorer_cmd}
    elif args.ngram:
        restorer = NgramRestorer(readings, NgramModel.load(args.ngram))
        meta["ngram"] = {"file": os.path.basename(args.ngram), "sha256": _sha256(args.ngram)}
    elif args.fixtures:
        restorer = NgramRestorer(readings, fixtures.ngram_model())
        meta["ngram"] = {"file": "<bundled>"}
    elif config.kanji:
        raise UsageError("the kanji stage needs --ngram or --restorer-cmd")

    function_words = DEFAULT_FUNCTION_WORDS
    if args.function_words:
        with open(args.function_words, encoding="utf-8") as f:
            function_words = frozenset(w.strip() for w in f if w.strip() and not w.startswith("#"))
        meta["function_words"] = {
            "file": os.path.basename(args.function_words),
            "sha256": _sha256(args.function_words),
        }
    return Resources(readings, lexicon, restorer, function_words), meta


def cmd_eval(args) -> int:
    config = _config(args)
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    if args.staged:
        metrics += staged_metric_names(config)
    if args.bootstrap < 100:
        raise UsageError("--bootstrap must be at least 100")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    try:
        resources, meta = _load_resources(args, config)
        records = load_corpus(args.corpus)
    except (OSError, ResourceError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    try:
        report = corpus_evaluate(
            records,
            metrics,
            config,
            resources,
            seed=args.seed,
            bootstrap=args.bootstrap,
            form="NFKC" if args.nfkc else "NFC",
            strip_punct=args.strip_punct,
            jobs=args.jobs,
            dump_dir=args.dump_lattice,
            metadata={"resources": meta},
        )
    except NoValidRecords as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NO_RECORDS
    except ValueError as e:
        raise UsageError(str(e)) from e
    finally:
        close = getattr(resources.restorer, "close", None)
        if close:
            close()
    for rej in report.metadata["records"]["rejected"]:
        print(f"warning: skipped record {rej['id']}: {rej['reason']}", file=sys.stderr)
    with open(args.out, "w", encoding="utf-8") as f:
        f.write(report.to_json())
    if args.tsv:
        with open(args.tsv, "w", encoding="utf-8") as f:
            f.write(report.to_tsv())
    for name, m in report.corpus.items():
        lo, hi = m.ci95
        print(f"{name}\t{100 * m.rate:.2f}\t[{100 * lo:.2f}, {100 * hi:.2f}]\t{m.errors}/{m.denom}")
    return EXIT_OK


def cmd_build(args) -> int:
    config = _config(args)
    try:
        resources, _ = _load_resources(args, config)
    except (OSError, ResourceError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    variants = reference_variants(args.text, config, resources, "NFKC" if args.nfkc else "NFC")
    if args.slots:
        for tv in variants:
            print("\t".join(tv.spellings))
    else:
        sys.stdout.write(assemble_lattice(variants).to_text())
    return EXIT_OK


def cmd_train_ngram(args) -> int:
    try:
        with open(args.corpus, encoding="utf-8") as f:
            model = train_ngram(f, args.order)
    except (OSError, LenientError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    model.save(args.out)
    print(f"{len(model.counts)} distinct grams, {model.total} total", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lenient-cer", description=__doc__.split("\n\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="score a corpus")
    p.add_argument("--corpus", required=True, help="TSV: id, reference, hypothesis")
    p.add_argument("--metrics", default="wer,cer,lenient", help="comma list of wer, cer, lenient, lenient:<stages>")
    p.add_argument("--staged", action="store_true", help="also report lenient CER after each cumulative stage")
    _add_resource_args(p)
    p.add_argument("--bootstrap", type=int, default=DEFAULT_BOOTSTRAP)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strip-punct", action="store_true", help="drop punctuation and spaces before scoring")
    p.add_argument("--dump-lattice", metavar="DIR")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="JSON report path")
    p.add_argument("--tsv", help="optional TSV report path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("build", help="print the respelling lattice of one reference")
    p.add_argument("text")
    p.add_argument("--slots", action="store_true", help="print per-token spellings instead of the lattice")
    _add_resource_args(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("train-ngram", help="count character n-grams for the restorer")
    p.add_argument("--corpus", required=True)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_ngram)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # --help exits 0; argument errors exit 1 through _Parser.error.
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
