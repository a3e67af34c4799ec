"""Command-line front end: ingest, train, report, synth.

Every command is a pure function of (input files, flags, seed); reruns
write byte-identical outputs.  Exit codes: 0 success, 1 usage error,
2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import checkpoint as ckpt
from . import evaluation as ev
from .corpus import (Gender, IngestStats, Relation, aggregate_counts, bundled_lexicon_path,
                     gender_marginals, iter_arcs, iter_canonical, load_gender_lexicon,
                     write_canonical)
from .pmi import collapse_by_gender, pmi_table, prop1_check
from .errors import DataError, NumericalError, UsageError
from .lexicons import (SENTIMENTS, SenseKind, load_sense_inventory, load_sentiment_lexicon)
from .model import FeatureSpace, TrainConfig, grid_train_average
from .synth import SynthConfig, generate, write_synth


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    return repr(float(x))


def _parse_grid(token: str) -> list[float]:
    try:
        values = [float(v) for v in token.split(",") if v.strip() != ""]
    except ValueError:
        raise UsageError(f"bad grid {token!r}: expected comma-separated floats") from None
    if not values:
        raise UsageError("grids must be non-empty")
    if any(v < 0 for v in values):
        raise UsageError("grid values must be non-negative")
    return values


def _load_lexicon(args) -> "GenderLexicon":
    path = args.gender_lexicon or bundled_lexicon_path()
    return load_gender_lexicon(path)


def _write_tsv(path: str | Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\t".join(header) + "\n")
        for row in rows:
            fh.write("\t".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")


# ---------------------------------------------------------------------------
# ingest


def cmd_ingest(args) -> int:
    lex = _load_lexicon(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stats = IngestStats()
    reader = iter_arcs if args.format == "arcs" else iter_canonical
    pairs = []
    for path in args.input:
        if not Path(path).exists():
            raise DataError(f"input file not found: {path}")
        pairs.extend(reader(path, lex, stats))

    report = {"malformed_lines": stats.malformed, "input_lines": stats.lines,
              "unknown_forms": stats.unknown_forms, "relations": {}}
    wrote_any = False
    for relation in Relation:
        try:
            table = aggregate_counts(pairs, relation, lex)
        except DataError:
            continue
        wrote_any = True
        write_canonical(out / f"{relation.value}.tsv", table)
        marg = gender_marginals(table, lex)
        report["relations"][relation.value] = {
            "total_count": table.total,
            "distinct_pairs": len(table.counts),
            "neighbors": len(table.vocab),
            "noun_forms": len(table.forms),
            "masc_count": marg[Gender.MASC],
            "fem_count": marg[Gender.FEM],
        }
    if not wrote_any:
        raise DataError("no usable records in any input file")
    (out / "stats.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n",
                                    encoding="utf-8")
    print(f"wrote {len(report['relations'])} relation file(s) to {out}")
    return 0


# ---------------------------------------------------------------------------
# train


def _load_table(corpus: str, relation: Relation, lex) -> "CountTable":
    if not Path(corpus).exists():
        raise DataError(f"corpus file not found: {corpus}")
    return aggregate_counts(iter_canonical(corpus, lex), relation, lex)


def cmd_train(args) -> int:
    lex = _load_lexicon(args)
    relation = Relation(args.relation)
    table = _load_table(args.corpus, relation, lex)
    space = FeatureSpace.from_lexicon(lex)

    alphas = _parse_grid(args.alpha_grid)
    if args.no_sentiment:
        betas = _parse_grid(args.beta_grid) if args.beta_grid else [0.0]
        if any(b > 0 for b in betas):
            raise UsageError("--no-sentiment is incompatible with a non-zero beta grid")
        n_sentiments = 1
    else:
        betas = _parse_grid(args.beta_grid) if args.beta_grid else [0.0]
        n_sentiments = 3

    prior = None
    if args.sentiment_lexicon:
        prior = load_sentiment_lexicon(args.sentiment_lexicon)
    elif any(b > 0 for b in betas):
        raise DataError("a sentiment lexicon is required when any beta > 0")

    base = TrainConfig(learning_rate=args.learning_rate, max_iterations=args.max_iterations,
                       tolerance=args.tolerance, seed=args.seed, n_sentiments=n_sentiments)
    grid = grid_train_average(table, space, prior, alphas, betas, base, jobs=args.jobs)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fingerprint = table.fingerprint()
    for (a, b), run in grid.runs.items():
        tag = f"alpha{a:g}_beta{b:g}"
        ckpt.save_checkpoint(out / f"checkpoint_{tag}.json", run.params, space, run.config,
                             fingerprint, relation.value,
                             extra={"iterations": run.iterations, "converged": run.converged})
        _write_tsv(out / f"trace_{tag}.tsv", ["iteration", "objective"],
                   [[i, v] for i, v in enumerate(run.trace)])
        print(f"cell alpha={a:g} beta={b:g}: {run.iterations} iterations, "
              f"objective {run.trace[-1]:.6f}, converged={run.converged}", file=sys.stderr)
    ckpt.save_checkpoint(out / "checkpoint_averaged.json", grid.params, space, base,
                         fingerprint, relation.value,
                         extra={"grid_alphas": alphas, "grid_betas": betas})
    print(f"wrote {len(grid.runs)} cell checkpoint(s) and the average to {out}")
    return 0


# ---------------------------------------------------------------------------
# report subcommands


def _load_checkpoint(path: str) -> ckpt.Checkpoint:
    if not Path(path).exists():
        raise DataError(f"checkpoint not found: {path}")
    return ckpt.load_checkpoint(path)


def _require_positive(args, name: str) -> None:
    if getattr(args, name) <= 0:
        raise UsageError(f"--{name.replace('_', '-')} must be positive")


def cmd_report_topk(args) -> int:
    _require_positive(args, "k")
    loaded = _load_checkpoint(args.checkpoint)
    sentiments = list(SENTIMENTS) if loaded.params.n_sentiments == 3 else [None]
    rows = []
    for gender in (Gender.MASC, Gender.FEM):
        for sentiment in sentiments:
            ranked = ev.topk(loaded.params, loaded.space, gender, sentiment, args.k)
            for rank, (word, value) in enumerate(ranked.entries, start=1):
                rows.append([gender.value, sentiment.value if sentiment else "none",
                             rank, word, value])
    _write_tsv(args.out, ["gender", "sentiment", "rank", "neighbor", "score"], rows)
    return 0


def cmd_report_pmi(args) -> int:
    lex = _load_lexicon(args)
    table = _load_table(args.corpus, Relation(args.relation), lex)
    gtable = collapse_by_gender(table, lex)
    values = pmi_table(gtable)
    rows = []
    for gender in (Gender.MASC, Gender.FEM):
        pairs = [(word, v) for (word, g), v in values.items() if g is gender]
        pairs.sort(key=lambda item: (-item[1], item[0]))
        rows.extend([gender.value, word, v] for word, v in pairs)
    _write_tsv(args.out, ["gender", "neighbor", "pmi"], rows)
    return 0


def cmd_report_senses(args) -> int:
    _require_positive(args, "k")
    _require_positive(args, "permutations")
    loaded = _load_checkpoint(args.checkpoint)
    inventory = load_sense_inventory(args.inventory, SenseKind(args.kind))
    rows_out = []
    rows = ev.sense_difference_suite(loaded.params, loaded.space, inventory, k=args.k,
                                     permutations=args.permutations, seed=args.seed)
    for row in rows:
        rows_out.append([row.sentiment, row.sense, row.freq_masc, row.freq_fem,
                         row.result.p_value, str(row.result.significant).lower()])
    _write_tsv(args.out, ["sentiment", "sense", "freq_masc", "freq_fem", "p", "significant"],
               rows_out)
    return 0


def cmd_report_sentiment(args) -> int:
    _require_positive(args, "k")
    _require_positive(args, "permutations")
    loaded = _load_checkpoint(args.checkpoint)
    prior = load_sentiment_lexicon(args.sentiment_lexicon)
    report = ev.sentiment_frequency(loaded.params, loaded.space, prior, k=args.k,
                                    permutations=args.permutations, seed=args.seed)
    sig = {s: str(report.tests[s].significant).lower() for s in SENTIMENTS}
    rows = []
    for gender in (Gender.MASC, Gender.FEM):
        pos, neg, neu = report.frequencies[gender]
        rows.append([loaded.relation, gender.value, pos, neg, neu,
                     sig[SENTIMENTS[0]], sig[SENTIMENTS[1]], sig[SENTIMENTS[2]]])
    _write_tsv(args.out, ["relation", "gender", "pos", "neg", "neu",
                          "sig_pos", "sig_neg", "sig_neu"], rows)
    return 0


def _read_judgments(path: str) -> dict[str, float]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 columns")
            try:
                out[fields[0].strip().lower()] = float(fields[1])
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric judgment {fields[1]!r}") from None
    if not out:
        raise DataError(f"{path}: empty judgments file")
    return out


def _read_binary_judgments(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            fields = line.rstrip("\n").split("\t")
            if len(fields) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 columns")
            out[fields[0].strip().lower()] = fields[1].strip().lower()
    return out


def cmd_report_correlate(args) -> int:
    _require_positive(args, "permutations")
    loaded = _load_checkpoint(args.checkpoint)
    judgments = _read_judgments(args.judgments)
    binary = _read_binary_judgments(args.binary_judgments) if args.binary_judgments else None
    report = ev.correlate_judgments(loaded.params, loaded.space, judgments, binary,
                                    permutations=args.permutations, seed=args.seed)
    _write_tsv(args.out, ["rho", "p", "agreement", "n"],
               [[report.rho, report.p_value, report.agreement, report.n]])
    audit = Path(args.out).with_name(Path(args.out).stem + "_audit.tsv")
    _write_tsv(audit, ["rho_posterior", "rho_raw_score", "p", "agreement", "n"],
               [[report.rho,
                 report.rho_raw_score if report.rho_raw_score is not None else "nan",
                 report.p_value, report.agreement, report.n]])
    return 0


def _read_values(path: str) -> list[float]:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            token = line.strip()
            if not token:
                continue
            try:
                values.append(float(token))
            except ValueError:
                raise DataError(f"{path}:{lineno}: non-numeric value {token!r}") from None
    if not values:
        raise DataError(f"{path}: no values")
    return values


def cmd_report_permtest(args) -> int:
    _require_positive(args, "permutations")
    if args.tests <= 0:
        raise UsageError("--tests must be positive")
    result = ev.permutation_test(_read_values(args.group_a), _read_values(args.group_b),
                                 permutations=args.permutations, seed=args.seed,
                                 alpha=args.alpha / args.tests)
    _write_tsv(args.out,
               ["statistic", "p_value", "corrected_alpha", "significant",
                "permutations_used", "exact"],
               [[result.statistic, result.p_value, result.corrected_alpha,
                 str(result.significant).lower(), result.permutations_used,
                 str(result.exact).lower()]])
    return 0


def cmd_report_prop1(args) -> int:
    lex = _load_lexicon(args)
    table = _load_table(args.corpus, Relation(args.relation), lex)
    gtable = collapse_by_gender(table, lex)
    config = TrainConfig(learning_rate=args.learning_rate, max_iterations=args.max_iterations)
    report = prop1_check(gtable, config, saturation_tol=args.saturation_tol)
    rows = [[g.value, report.max_deviation[g], report.rank_correlation[g],
             report.restricted.iterations]
            for g in (Gender.MASC, Gender.FEM)]
    _write_tsv(args.out, ["gender", "max_normalized_deviation", "spearman", "iterations"], rows)
    return 0


# ---------------------------------------------------------------------------
# synth


def cmd_synth(args) -> int:
    if args.vocab_size < 12:
        raise UsageError("--vocab-size must be at least 12")
    lex = _load_lexicon(args)
    config = SynthConfig(seed=args.seed, vocab_size=args.vocab_size, n_pairs=args.n_pairs,
                         planted_body_fem=args.planted_body_fem, kind=SenseKind(args.kind),
                         relation=Relation(args.relation))
    data = generate(config, lex)
    paths = write_synth(args.out, data, lex)
    print(f"wrote synthetic corpus ({len(data.pairs)} pairs) to {args.out}")
    for name in sorted(paths):
        print(f"  {name}: {paths[name]}")
    return 0


# ---------------------------------------------------------------------------
# parser assembly


_BOOL_KEYS = {"no_sentiment"}


def _expand_config(argv: list[str]) -> list[str]:
    """Splice config-file key=value pairs in as flags that user flags override."""
    if "--config" not in argv and not any(a.startswith("--config=") for a in argv):
        return argv
    out, config_path = [], None
    i = 0
    while i < len(argv):
        if argv[i] == "--config":
            if i + 1 >= len(argv):
                raise UsageError("--config requires a path")
            config_path = argv[i + 1]
            i += 2
        elif argv[i].startswith("--config="):
            config_path = argv[i].split("=", 1)[1]
            i += 1
        else:
            out.append(argv[i])
            i += 1
    if not Path(config_path).exists():
        raise DataError(f"config file not found: {config_path}")
    tokens = []
    with open(config_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DataError(f"{config_path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("_", "-")
            if key.replace("-", "_") in _BOOL_KEYS:
                if value.lower() in ("true", "1", "yes"):
                    tokens.append(f"--{key}")
                elif value.lower() not in ("false", "0", "no"):
                    raise DataError(f"{config_path}:{lineno}: bad boolean {value!r}")
            else:
                tokens.extend([f"--{key}", value])
    # Insert after the subcommand token(s) so explicit flags take precedence.
    n_sub = 0
    while n_sub < len(out) and not out[n_sub].startswith("-"):
        n_sub += 1
    return out[:n_sub] + tokens + out[n_sub:]


def _add_common(p, lexicon: bool = True) -> None:
    # --config is consumed by _expand_config before parsing; declared here so
    # it appears in --help.
    p.add_argument("--config", metavar="FILE",
                   help="key=value defaults for this command; explicit flags win")
    if lexicon:
        p.add_argument("--gender-lexicon", default=None,
                       help="gendered-noun lexicon TSV (default: bundled list)")


def _build_parser() -> _Parser:
    parser = _Parser(prog="genderedlang",
                     description="Quantify gendered neighbor choice in parsed corpora")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse raw collocations into canonical per-relation TSVs")
    p.add_argument("--input", action="append", required=True, help="input file (repeatable)")
    p.add_argument("--format", choices=["arcs", "canonical"], default="arcs")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train the model over a hyperparameter grid")
    p.add_argument("--corpus", required=True, help="canonical collocation TSV")
    p.add_argument("--relation", choices=[r.value for r in Relation], required=True)
    p.add_argument("--sentiment-lexicon", default=None)
    p.add_argument("--alpha-grid", default="0", help="comma-separated L1 weights")
    p.add_argument("--beta-grid", default=None, help="comma-separated regularizer weights")
    p.add_argument("--learning-rate", type=float, default=0.1)
    p.add_argument("--max-iterations", type=int, default=20000)
    p.add_argument("--tolerance", type=float, default=1e-7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--no-sentiment", action="store_true",
                   help="collapse sentiments (S=1) and disable the regularizer")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    report = sub.add_parser("report", help="write analysis TSVs from checkpoints/corpora")
    rsub = report.add_subparsers(dest="report_command", required=True)

    p = rsub.add_parser("topk")
    _add_common(p, lexicon=False)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--k", type=int, default=25)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report_topk)

    p = rsub.add_parser("pmi")
    p.add_argument("--corpus", required=True)
    p.add_argument("--relation", choices=[r.value for r in Relation], required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_report_pmi)

    p = rsub.add_parser("senses")
    _add_common(p, lexicon=False)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--inventory", required=True)
    p.add_argument("--kind", choices=[k.value for k in SenseKind], default="adj")
    p.add_argument("--k", type=int, default=200)
    p.add_argument("--permutations", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report_senses)

    p = rsub.add_parser("sentiment")
    _add_common(p, lexicon=False)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--sentiment-lexicon", required=True)
    p.add_argument("--k", type=int, default=200)
    p.add_argument("--permutations", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report_sentiment)

    p = rsub.add_parser("correlate")
    _add_common(p, lexicon=False)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--judgments", required=True, help="word<TAB>score TSV")
    p.add_argument("--binary-judgments", default=None, help="word<TAB>m|f TSV")
    p.add_argument("--permutations", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report_correlate)

    p = rsub.add_parser("permtest")
    _add_common(p, lexicon=False)
    p.add_argument("--group-a", required=True, help="one value per line")
    p.add_argument("--group-b", required=True)
    p.add_argument("--permutations", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--tests", type=int, default=1, help="Bonferroni divisor")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report_permtest)

    p = rsub.add_parser("prop1")
    p.add_argument("--corpus", required=True)
    p.add_argument("--relation", choices=[r.value for r in Relation], required=True)
    p.add_argument("--learning-rate", type=float, default=0.2)
    p.add_argument("--max-iterations", type=int, default=50000)
    p.add_argument("--saturation-tol", type=float, default=1e-8)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_report_prop1)

    p = sub.add_parser("synth", help="generate a planted-truth synthetic corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--vocab-size", type=int, default=240)
    p.add_argument("--n-pairs", type=int, default=300000)
    p.add_argument("--planted-body-fem", type=float, default=0.0,
                   help="mean body-sense weight added to the FEM group")
    p.add_argument("--kind", choices=[k.value for k in SenseKind], default="adj")
    p.add_argument("--relation", choices=[r.value for r in Relation], default="amod")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _expand_config(argv)
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 1
    except DataError as err:
        print(f"data error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
