"""Command-line front end. Subcommands follow the classic Mahout verbs:

    seqdir -> vectorize -> split -> trainnb -> testnb [-> report]

plus ``pipeline`` (all stages in one go), ``sweep``, ``bench`` and
``gen-corpus``. Exit status: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys
import tempfile
from pathlib import Path

from nbpipe import __version__, bench, corpus_store, pipeline, synth
from nbpipe.engine import ShardPlan
from nbpipe.errors import PipelineError, UsageError
from nbpipe.evaluator import ConfusionMatrix, render_report
from nbpipe.text_prep import PrepConfig, default_stopwords, load_stopwords, load_suffixes
from nbpipe.vectorizer import SplitSpec

log = logging.getLogger("nbpipe")


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _pct(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= val <= 100:
        raise argparse.ArgumentTypeError(f"percentage {val} outside [0, 100]")
    return val


def _positive_int(text: str) -> int:
    try:
        val = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if val < 1:
        raise argparse.ArgumentTypeError(f"expected a value >= 1, got {val}")
    return val


def _positive_float(text: str) -> float:
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {val}")
    return val


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--workers", type=_positive_int, default=argparse.SUPPRESS,
                   help="worker threads (default 1)")
    p.add_argument("--config", type=Path, help="key=value file; flags take precedence")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def _prep_options(p):
    p.add_argument("--stopwords", type=Path, help="stop-word file, one term per line")
    p.add_argument("--suffixes", type=Path, help="suffix table for the light stemmer")
    p.add_argument("--no-stem", action="store_true", help="disable light stemming")
    p.add_argument("--min-token-len", type=_positive_int, default=2)
    p.add_argument("--min-df", type=_positive_int, default=1)
    p.add_argument("--no-norm", action="store_true", help="skip L2 normalization")


def _nb_options(p):
    p.add_argument("--complement", action="store_true", help="complement Naive Bayes")
    p.add_argument("--alpha", type=_positive_float, default=1.0)


def build_parser() -> Parser:
    common = _common()
    parser = Parser(prog="nbpipe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--workers", type=_positive_int, default=1, help="worker threads")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=Parser)

    p = sub.add_parser("seqdir", parents=[common], help="ingest a directory-per-class tree")
    p.add_argument("-i", dest="input", type=Path, required=True)
    p.add_argument("-o", dest="output", type=Path, required=True)
    p.add_argument("--fail-fast", action="store_true")

    p = sub.add_parser("vectorize", parents=[common], help="dictionary and TF-IDF vectors")
    p.add_argument("-i", dest="input", type=Path, required=True)
    p.add_argument("-o", dest="output", type=Path, required=True)
    p.add_argument("--dict", type=Path, required=True)
    _prep_options(p)

    p = sub.add_parser("split", parents=[common], help="seeded train/test split")
    p.add_argument("-i", dest="input", type=Path, required=True)
    p.add_argument("--random-selection-pct", dest="test_pct", type=_pct, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="exactly round(n*pct/100) test vectors")
    p.add_argument("--train-out", type=Path, required=True)
    p.add_argument("--test-out", type=Path, required=True)

    p = sub.add_parser("trainnb", parents=[common], help="train Naive Bayes")
    p.add_argument("-i", dest="input", type=Path, required=True)
    p.add_argument("-o", dest="output", type=Path, required=True)
    p.add_argument("--dict", type=Path, help="dictionary, sets the vocabulary size")
    _nb_options(p)

    p = sub.add_parser("testnb", parents=[common], help="classify a test set")
    p.add_argument("-i", dest="input", type=Path, required=True)
    p.add_argument("-m", dest="model", type=Path, required=True)
    p.add_argument("-o", dest="output", type=Path, help="report file (default stdout)")
    p.add_argument("--matrix-out", type=Path)

    p = sub.add_parser("report", parents=[common], help="render a report from a matrix file")
    p.add_argument("-m", dest="matrix", type=Path, required=True)
    p.add_argument("-o", dest="output", type=Path)

    p = sub.add_parser("pipeline", parents=[common], help="run all stages end to end")
    p.add_argument("-i", dest="input", type=Path, required=True,
                   help="corpus directory or record file")
    p.add_argument("-o", dest="output", type=Path, required=True, help="report file")
    p.add_argument("--workdir", type=Path, help="artifact directory (default: next to -o)")
    p.add_argument("--test-pct", type=_pct, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--timings", action="store_true", help="append stage timings to the report")
    p.add_argument("--fail-fast", action="store_true")
    _prep_options(p)
    _nb_options(p)

    p = sub.add_parser("sweep", parents=[common], help="accuracy versus test percentage")
    p.add_argument("-i", dest="input", type=Path, required=True)
    p.add_argument("--pcts", type=_int_list, default=[10, 20, 30, 40])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true")
    p.add_argument("-o", dest="output", type=Path, help="aligned table (default stdout)")
    p.add_argument("--csv", type=Path)
    _prep_options(p)
    _nb_options(p)

    bench_common = argparse.ArgumentParser(add_help=False)
    bench_common.add_argument("--config", type=Path)
    bench_common.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p = sub.add_parser("bench", parents=[bench_common], help="time a stage per worker count")
    p.add_argument("-i", dest="input", type=Path, required=True)
    p.add_argument("--workers", dest="worker_list", type=_int_list, default=[1, 2, 4, 8])
    p.add_argument("--reps", type=_positive_int, default=3)
    p.add_argument("--stage", choices=["vectorize", "trainnb", "testnb"], default="testnb")
    p.add_argument("--test-pct", type=_pct, default=40)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", dest="output", type=Path)
    p.add_argument("--csv", type=Path)
    _prep_options(p)
    _nb_options(p)

    p = sub.add_parser("gen-corpus", parents=[common], help="write a synthetic corpus")
    p.add_argument("-o", dest="output", type=Path, required=True)
    p.add_argument("--classes", type=_positive_int, default=5)
    p.add_argument("--docs", type=_positive_int, default=100, help="documents per class")
    p.add_argument("--vocab", type=_positive_int, default=50, help="vocabulary per class")
    p.add_argument("--overlap", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--force", action="store_true")
    return parser


def _subparser(parser: Parser, name: str) -> Parser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[name]
    raise KeyError(name)


def read_config(path: Path, sub: Parser) -> dict:
    """Flat key=value file; keys are option names with or without dashes."""
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "version", "config")}
    for a in sub._actions:
        for opt in a.option_strings:
            actions.setdefault(opt.lstrip("-").replace("-", "_"), a)
    out = {}
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        action = actions.get(key.replace("-", "_"))
        if action is None:
            raise UsageError(f"{path}:{lineno}: unknown option {key!r}")
        try:
            if isinstance(action, argparse._StoreTrueAction):
                value = _bool(val)
            elif action.type is not None:
                value = action.type(val)
            else:
                value = val
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"{path}:{lineno}: {key}: {exc}") from None
        out[action.dest] = value
    return out


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(parser.format_usage())
    if getattr(args, "config", None) is not None:
        sub = _subparser(parser, args.command)
        sub.set_defaults(**read_config(args.config, sub))
        args = parser.parse_args(argv)
    return args


def _prep(args) -> PrepConfig:
    stop = load_stopwords(args.stopwords) if args.stopwords else default_stopwords()
    kw = {}
    if args.suffixes:
        kw["suffixes"] = load_suffixes(args.suffixes)
    return PrepConfig(stopwords=stop, min_token_len=args.min_token_len,
                      stemming="off" if args.no_stem else "light", **kw)


def _emit(text: str, path: Path | None):
    if path is None:
        sys.stdout.write(text)
    else:
        path.write_text(text, encoding="utf-8")


def _load_records(path: Path, fail_fast=False):
    if path.is_dir():
        with tempfile.TemporaryDirectory() as tmp:
            return pipeline.load_records(path, fail_fast, Path(tmp) / "corpus.jsonl")
    return corpus_store.read_corpus(path)


def run(args) -> None:
    cmd = args.command
    plan = ShardPlan(getattr(args, "workers", 1))
    if cmd == "seqdir":
        cf = pipeline.run_seqdir(args.input, args.output, args.fail_fast)
        log.info("wrote %d records (%d skipped)", cf.record_count, cf.skipped)
    elif cmd == "vectorize":
        d, vecs = pipeline.run_vectorize(args.input, args.output, args.dict, _prep(args),
                                         args.min_df, not args.no_norm, plan)
        log.info("%d terms, %d vectors", len(d), len(vecs))
    elif cmd == "split":
        spec = SplitSpec(args.test_pct, args.seed, "exact" if args.exact else "bernoulli")
        train, test = pipeline.run_split(args.input, spec, args.train_out, args.test_out)
        log.info("%d train, %d test", len(train), len(test))
    elif cmd == "trainnb":
        pipeline.run_train(args.input, args.output,
                           "complement" if args.complement else "standard",
                           args.alpha, args.dict, plan)
    elif cmd == "testnb":
        cm = pipeline.run_test(args.input, args.model, args.matrix_out, plan)
        _emit(render_report(cm), args.output)
    elif cmd == "report":
        _emit(render_report(ConfusionMatrix.read(args.matrix)), args.output)
    elif cmd == "pipeline":
        workdir = args.workdir or args.output.parent / (args.output.stem + "-work")
        cfg = pipeline.RunConfig(
            input=args.input, report=args.output, workdir=workdir, prep=_prep(args),
            min_df=args.min_df, normalize=not args.no_norm,
            split=SplitSpec(args.test_pct, args.seed, "exact" if args.exact else "bernoulli"),
            nb_mode="complement" if args.complement else "standard", alpha=args.alpha,
            workers=plan.workers, fail_fast=args.fail_fast)
        pipeline.run_pipeline(cfg, with_timings=args.timings)
    elif cmd == "sweep":
        for pct in args.pcts:
            if not 0 < pct < 100:
                raise UsageError(f"sweep percentages must be in (0, 100), got {pct}")
        table = bench.sweep_test_pct(
            _load_records(args.input), args.pcts, args.seed,
            "exact" if args.exact else "bernoulli", _prep(args),
            "complement" if args.complement else "standard", args.alpha,
            args.min_df, not args.no_norm, plan)
        _emit(table.format(), args.output)
        if args.csv:
            args.csv.write_text(table.to_csv(), encoding="utf-8")
    elif cmd == "bench":
        if any(w < 1 for w in args.worker_list):
            raise UsageError("worker counts must be >= 1")
        table = _bench(args)
        _emit(table.format(), args.output)
        if args.csv:
            args.csv.write_text(table.to_csv(), encoding="utf-8")
    elif cmd == "gen-corpus":
        if not 0 <= args.overlap < 1:
            raise UsageError("--overlap must be in [0, 1)")
        synth.gen_corpus(args.output, args.classes, args.docs, args.vocab, args.overlap,
                         args.seed, args.force)
    else:  # pragma: no cover - argparse rejects unknown commands
        raise UsageError(f"unknown command {cmd!r}")


def _bench(args) -> bench.BenchTable:
    from nbpipe.bayes import test_nb, train_nb
    from nbpipe.vectorizer import split_vectors, vectorize_corpus

    records = _load_records(args.input)
    prep = _prep(args)
    mode = "complement" if args.complement else "standard"
    dictionary, vectors = vectorize_corpus(records, prep, args.min_df, not args.no_norm)
    train, test = split_vectors(vectors, SplitSpec(args.test_pct, args.seed))
    model = train_nb(train, mode, args.alpha, vocab_size=len(dictionary))
    stages = {
        "vectorize": lambda plan: vectorize_corpus(records, prep, args.min_df,
                                                   not args.no_norm, plan),
        "trainnb": lambda plan: train_nb(train, mode, args.alpha, len(dictionary), plan),
        "testnb": lambda plan: test_nb(model, test, plan),
    }
    return bench.benchmark(stages[args.stage], args.worker_list, args.reps, args.stage)


def main(argv=None) -> int:
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        sys.stderr.write(str(exc).rstrip("\n") + "\n")
        return 1
    except SystemExit as exc:  # --help / --version
        return exc.code if isinstance(exc.code, int) else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        run(args)
    except UsageError as exc:
        sys.stderr.write(f"nbpipe {args.command}: {exc}\n")
        return 1
    except (PipelineError, OSError) as exc:
        sys.stderr.write(f"nbpipe {args.command}: error: {exc}\n")
        return 2
    return 0
