"""Command-line interface binding all pipelines end-to-end.

Every subcommand reads/writes the documented file formats; module errors
surface with a subcommand-prefixed message and a nonzero exit. A JSON
``--config`` file can supply any flag's default (top-level keys apply
everywhere, per-subcommand sections override).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import annotate as annotate_mod
from . import classify
from . import corpus as corpus_mod
from . import evaluate as evaluate_mod
from . import features as features_mod
from . import terms as terms_mod
from .errors import ConfigError, SchemaError, VacscreenError
from .evaluate import (
    FeatureContext,
    FittedPipeline,
    MethodSpec,
    SplitSpec,
)


def _load_catalog(path: str | None) -> terms_mod.TermCatalog:
    return terms_mod.compile_catalog(path) if path else terms_mod.default_catalog()


def _read_sentences(path: str) -> list[corpus_mod.Sentence]:
    return corpus_mod.read_sentences_jsonl(path)


def _parse_params(raw: str | None) -> dict:
    if not raw:
        return {}
    try:
        params = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--params must be JSON: {exc.msg}") from exc
    if not isinstance(params, dict):
        raise ConfigError("--params must be a JSON object")
    return params


def _labeled(path: str) -> annotate_mod.LabeledDataset:
    return annotate_mod.read_labeled_dataset(path)


# ---------------------------------------------------------------------------
# Feature setup files
# ---------------------------------------------------------------------------


def _write_features_file(path: str, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")


def _load_features_file(path: str) -> tuple[str, features_mod.Vocabulary | None, FeatureContext, classify.FeatureSpace]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{Path(path).name}: invalid features file ({exc.msg})") from exc
    kind = data.get("kind")
    context = FeatureContext()
    vocabulary = None
    if kind == "bow":
        vocabulary = features_mod.Vocabulary.from_dict(data["vocabulary"])
        space = classify.FeatureSpace("bow", len(vocabulary), vocabulary.fingerprint())
    elif kind == "w2v":
        context.embeddings = features_mod.load_embeddings(data["embeddings"])
        space = classify.FeatureSpace("w2v", context.embeddings.dimension)
    elif kind == "contextual":
        context.contextual = features_mod.load_contextual(data["vectors"])
        space = classify.FeatureSpace(
            "contextual",
            context.contextual.dimension,
            context.contextual.provenance or None,
        )
    else:
        raise SchemaError(f"unknown features kind {kind!r}")
    return kind, vocabulary, context, space


def _featurize(kind: str, vocabulary, context: FeatureContext,
               ids: list[str], texts: list[str]):
    if kind == "bow":
        return features_mod.transform_bow_matrix(texts, vocabulary)
    if kind == "w2v":
        rows, _ = features_mod.embed_average_matrix(texts, context.embeddings)
        return rows
    return features_mod.contextual_matrix(ids, context.contextual)


def _feature_context(args) -> FeatureContext:
    context = FeatureContext()
    if getattr(args, "embeddings", None):
        context.embeddings = features_mod.load_embeddings(args.embeddings)
    if getattr(args, "vectors", None):
        context.contextual = features_mod.load_contextual(args.vectors)
    return context


def _method(args) -> MethodSpec:
    return MethodSpec(
        classifier=args.classifier,
        features=args.features_kind,
        params=_parse_params(args.params),
    )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_synth(args) -> int:
    spec = corpus_mod.SyntheticSpec(
        n_sentences=args.n, planted_hsd_rate=args.rate, seed=args.seed
    )
    sentences, labels = corpus_mod.generate_synthetic(spec)
    if args.sentences_out:
        corpus_mod.write_sentences_jsonl(sentences, args.sentences_out)
    if args.labeled_out:
        catalog = _load_catalog(args.catalog)
        entries = tuple(
            annotate_mod.LabeledSentence(
                sentence_id=s.id,
                text=s.text,
                term_group=terms_mod.term_group(s, catalog) or "none",
                hsd=bool(label),
            )
            for s, label in zip(sentences, labels)
        )
        annotate_mod.write_labeled_dataset(
            annotate_mod.LabeledDataset(entries=entries), args.labeled_out
        )
    return 0


def cmd_scan(args) -> int:
    catalog = _load_catalog(args.catalog)
    if args.sentences:
        sentences = _read_sentences(args.sentences)
    else:
        vacancies = corpus_mod.ingest(args.corpus, args.format)
        sentences = [
            s for v in vacancies for s in corpus_mod.segment_sentences(v)
        ]
    if args.sentences_out:
        corpus_mod.write_sentences_jsonl(sentences, args.sentences_out)
    matches = [
        m for s in sentences for m in terms_mod.scan_sentence(s, catalog)
    ]
    terms_mod.write_matches_jsonl(matches, args.out)
    return 0


def cmd_assign(args) -> int:
    sentences = _read_sentences(args.sentences)
    sentences = [s for s in sentences if corpus_mod.is_annotatable(s)]
    catalog = _load_catalog(args.catalog)
    strata = {
        s.id: terms_mod.term_group(s, catalog) or "none" for s in sentences
    }
    plan = annotate_mod.plan_assignment(
        sentences,
        [a for a in args.annotators.split(",") if a],
        args.overlap,
        args.seed,
        strata=strata,
    )
    Path(args.out).write_text(
        json.dumps(plan.to_dict(), ensure_ascii=False), encoding="utf-8"
    )
    return 0


def cmd_agreement(args) -> int:
    records = annotate_mod.read_annotations_jsonl(args.labels)
    if args.plan:
        plan = annotate_mod.AssignmentPlan.from_dict(
            json.loads(Path(args.plan).read_text(encoding="utf-8"))
        )
        overlap = set(plan.overlap)
        records = [r for r in records if r.sentence_id in overlap]
    report = annotate_mod.fleiss_kappa(records)
    evaluate_mod.save_report(
        args.out, "agreement", report.to_dict(), {"labels_file": Path(args.labels).name}
    )
    return 0


def cmd_pool(args) -> int:
    records = annotate_mod.read_annotations_jsonl(args.labels)
    plan = annotate_mod.AssignmentPlan.from_dict(
        json.loads(Path(args.plan).read_text(encoding="utf-8"))
    )
    sentences = _read_sentences(args.sentences)
    dataset = annotate_mod.pool_labels(records, plan, sentences)
    annotate_mod.write_labeled_dataset(dataset, args.out)
    return 0


def cmd_split(args) -> int:
    dataset = _labeled(args.labeled)
    train, test = evaluate_mod.split_dataset(
        dataset, SplitSpec(test_fraction=args.test_fraction, seed=args.seed)
    )
    annotate_mod.write_labeled_dataset(train, args.train_out)
    annotate_mod.write_labeled_dataset(test, args.test_out)
    return 0


def cmd_fit_features(args) -> int:
    if args.kind == "bow":
        dataset = _labeled(args.labeled)
        vocabulary = features_mod.fit_vocabulary(
            dataset.texts(),
            ngram_range=(args.ngram_min, args.ngram_max),
            max_features=args.max_features,
        )
        _write_features_file(
            args.out, {"kind": "bow", "vocabulary": vocabulary.to_dict()}
        )
    elif args.kind == "w2v":
        if not args.embeddings:
            raise ConfigError("w2v features need --embeddings")
        features_mod.load_embeddings(args.embeddings)  # validate now
        _write_features_file(args.out, {"kind": "w2v", "embeddings": args.embeddings})
    elif args.kind == "contextual":
        if not args.vectors:
            raise ConfigError("contextual features need --vectors")
        features_mod.load_contextual(args.vectors)  # validate now
        _write_features_file(args.out, {"kind": "contextual", "vectors": args.vectors})
    else:
        raise ConfigError(f"unknown features kind {args.kind!r}")
    return 0


def cmd_train(args) -> int:
    dataset = _labeled(args.labeled)
    kind, vocabulary, context, space = _load_features_file(args.features)
    X = _featurize(
        kind,
        vocabulary,
        context,
        [e.sentence_id for e in dataset.entries],
        dataset.texts(),
    )
    y = dataset.labels().astype(np.float64)
    trainer = {
        "logistic": classify.train_logistic,
        "gbt": classify.train_gbt,
        "forest": classify.train_forest,
    }[args.classifier]
    model = trainer(X, y, seed=args.seed, **_parse_params(args.params))
    model.feature_space = space
    classify.save_model(model, args.out)
    return 0


def cmd_gridsearch(args) -> int:
    dataset = _labeled(args.labeled)
    grid = None
    if args.grid:
        grid = json.loads(Path(args.grid).read_text(encoding="utf-8"))
    method = _method(args)
    result = evaluate_mod.grid_search(
        method,
        grid,
        dataset,
        k=args.k,
        metric=args.metric,
        seed=args.seed,
        context=_feature_context(args),
    )
    evaluate_mod.save_report(
        args.out,
        "gridsearch",
        result.to_dict(),
        evaluate_mod.provenance(args.seed, dataset, method=method.to_dict()),
    )
    return 0


def cmd_evaluate(args) -> int:
    dataset = _labeled(args.labeled)
    model = classify.load_model(args.model)
    kind, vocabulary, context, space = _load_features_file(args.features)
    classify.check_feature_space(model, space)
    pipe = FittedPipeline(
        method=MethodSpec(classifier=model.kind, features=kind),
        model=model,
        vocabulary=vocabulary,
        context=context,
    )
    scores = pipe.score_entries(dataset.entries)
    report = evaluate_mod.make_eval_report(
        scores, dataset.labels(), dataset=evaluate_mod.dataset_hash(dataset)
    )
    evaluate_mod.save_report(
        args.out,
        "evaluate",
        report.to_dict(),
        evaluate_mod.provenance(model.seed, dataset, method={"classifier": model.kind, "features": kind}),
    )
    if args.pr_csv:
        evaluate_mod.pr_curve_csv(report.pr_curve, args.pr_csv)
    if args.scores_out:
        with Path(args.scores_out).open("w", encoding="utf-8") as handle:
            for entry, score in zip(dataset.entries, scores):
                handle.write(
                    json.dumps(
                        {"sentence_id": entry.sentence_id, "score": float(score)}
                    )
                    + "\n"
                )
    return 0


def cmd_learning_curve(args) -> int:
    dataset = _labeled(args.labeled)
    method = _method(args)
    curve = evaluate_mod.learning_curve(
        method, dataset, seed=args.seed, k=args.k, context=_feature_context(args)
    )
    evaluate_mod.save_report(
        args.out,
        "learning-curve",
        curve.to_dict(),
        evaluate_mod.provenance(args.seed, dataset, method=method.to_dict()),
    )
    if args.csv:
        evaluate_mod.learning_curve_csv(curve, args.csv)
    return 0


def cmd_loto(args) -> int:
    dataset = _labeled(args.labeled)
    method = _method(args)
    report = evaluate_mod.leave_one_term_out(
        method, dataset, seed=args.seed, context=_feature_context(args)
    )
    evaluate_mod.save_report(
        args.out,
        "loto",
        report.to_dict(),
        evaluate_mod.provenance(args.seed, dataset, method=method.to_dict()),
    )
    return 0


def cmd_discover(args) -> int:
    sentences = _read_sentences(args.sentences)
    catalog = _load_catalog(args.catalog)
    model = classify.load_model(args.model)
    kind, vocabulary, context, space = _load_features_file(args.features)
    classify.check_feature_space(model, space)
    pipe = FittedPipeline(
        method=MethodSpec(classifier=model.kind, features=kind),
        model=model,
        vocabulary=vocabulary,
        context=context,
    )
    report = evaluate_mod.discover_unknown(pipe, sentences, catalog, k=args.k)
    evaluate_mod.save_report(
        args.out,
        "discovery",
        report.to_dict(),
        {
            "seed": model.seed,
            "catalog_version": catalog.version,
            "method": {"classifier": model.kind, "features": kind},
        },
    )
    return 0


def cmd_serve(args) -> int:
    from .service import ServiceConfig, serve

    if not args.config:
        raise ConfigError("serve needs --config with the service settings")
    config = ServiceConfig.from_file(args.config)
    if args.host:
        config.host = args.host
    if args.port:
        config.port = args.port
    serve(config)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vacscreen",
        description="Screening toolkit for explicit discrimination in job vacancies",
    )
    parser.add_argument("--config", help="JSON file with default flag values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic labeled corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--catalog")
    p.add_argument("--sentences-out")
    p.add_argument("--labeled-out")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("scan", help="flag catalog terms in a corpus")
    p.add_argument("--corpus")
    p.add_argument("--sentences")
    p.add_argument("--format", choices=["jsonl", "csv"])
    p.add_argument("--catalog")
    p.add_argument("--out", required=True)
    p.add_argument("--sentences-out")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("assign", help="plan stratified annotation assignments")
    p.add_argument("--sentences", required=True)
    p.add_argument("--annotators", required=True, help="comma-separated ids")
    p.add_argument("--overlap", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--catalog")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("agreement", help="Fleiss' kappa over a crossed subset")
    p.add_argument("--labels", required=True)
    p.add_argument("--plan")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("pool", help="majority-vote pooling into HSD labels")
    p.add_argument("--labels", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--sentences", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pool)

    p = sub.add_parser("split", help="stratified train/test split")
    p.add_argument("--labeled", required=True)
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-out", required=True)
    p.add_argument("--test-out", required=True)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("fit-features", help="fit or register a feature space")
    p.add_argument("--kind", choices=["bow", "w2v", "contextual"], default="bow")
    p.add_argument("--labeled")
    p.add_argument("--ngram-min", type=int, default=1)
    p.add_argument("--ngram-max", type=int, default=2)
    p.add_argument("--max-features", type=int, default=features_mod.DEFAULT_MAX_FEATURES)
    p.add_argument("--embeddings")
    p.add_argument("--vectors")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit_features)

    p = sub.add_parser("train", help="train a classifier on featurized data")
    p.add_argument("--labeled", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--classifier", choices=["logistic", "gbt", "forest"], required=True)
    p.add_argument("--params", help="JSON object of hyperparameters")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    def add_method_args(p):
        p.add_argument("--classifier", choices=["logistic", "gbt", "forest"], required=True)
        p.add_argument("--features-kind", choices=["bow", "w2v", "contextual"], default="bow")
        p.add_argument("--params", help="JSON object of hyperparameters")
        p.add_argument("--embeddings")
        p.add_argument("--vectors")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gridsearch", help="k-fold CV over a hyperparameter grid")
    p.add_argument("--labeled", required=True)
    add_method_args(p)
    p.add_argument("--grid", help="JSON file; defaults to the published grid")
    p.add_argument("--metric", choices=["ap", "auc"], default="ap")
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("evaluate", help="score a model on a labeled dataset")
    p.add_argument("--labeled", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pr-csv")
    p.add_argument("--scores-out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("learning-curve", help="AP versus training-set size")
    p.add_argument("--labeled", required=True)
    add_method_args(p)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_learning_curve)

    p = sub.add_parser("loto", help="leave-one-term-out generalization")
    p.add_argument("--labeled", required=True)
    add_method_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_loto)

    p = sub.add_parser("discover", help="top-K unflagged sentences by score")
    p.add_argument("--sentences", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--catalog")
    p.add_argument("--k", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("serve", help="run the annotation/triage HTTP service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.set_defaults(func=cmd_serve)

    return parser


def _apply_config(args: argparse.Namespace, parser: argparse.ArgumentParser) -> None:
    if not args.config or args.command == "serve":
        return
    try:
        config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"--config: {exc}")
    merged = dict(config.get("defaults", {}))
    merged.update(config.get(args.command, {}))
    for key, value in merged.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) in (None, False):
            setattr(args, attr, value)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(args, parser)
    try:
        return args.func(args)
    except VacscreenError as exc:
        print(f"vacscreen {args.command}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"vacscreen {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
