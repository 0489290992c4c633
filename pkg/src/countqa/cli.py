"""Command-line front door.

Commands: answer (batch-run the pipeline over a dataset), evaluate (score a
predictions file), serve (start the HTTP service), validate-dataset.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 provider error. Engine flags mirror config fields 1:1 and follow the
precedence defaults < config file < COUNTQA_* environment < flags.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .config import ConfigError, RunConfig, build_pipeline, load_config
from .dataset import (
    DatasetError,
    DatasetRecord,
    load_dataset,
    load_predictions,
    validate_dataset,
    write_predictions,
)
from .evaluation import (
    DEFAULT_KS,
    cnp_accuracy,
    count_metrics,
    format_count_report,
    format_instance_report,
    instance_metrics,
)
from .inference import ALL_SEGMENTS_FAILED
from .providers.base import ProviderError
from .types import CnpLabel, parse_cnp_label

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROVIDER = 3

log = logging.getLogger("countqa")


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit 1, not argparse's default 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


_ENGINE_FIELDS = (
    "theta_inference", "theta_explanation", "alpha", "count_strategy",
    "instance_strategy", "provider", "span_predictor_url",
    "explanation_predictor_url", "similarity_url", "ner_url",
    "entailment_url", "cache_path", "offline", "jobs",
)


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("engine options")
    group.add_argument("--config", metavar="PATH",
                       help="TOML or JSON config file")
    group.add_argument("--theta-inference", type=float, metavar="T",
                       help="span confidence threshold for counting")
    group.add_argument("--theta-explanation", type=float, metavar="T",
                       help="span confidence threshold for instances")
    group.add_argument("--alpha", type=float, metavar="A",
                       help="synonym interval half-width, fraction of c_pred")
    group.add_argument("--count-strategy",
                       choices=["most_confident", "most_frequent", "median",
                                "weighted_median"])
    group.add_argument("--instance-strategy",
                       choices=["no_consolidation", "context_frequency",
                                "summed_confidence", "type_compatibility"])
    group.add_argument("--provider", choices=["lexical", "remote"])
    group.add_argument("--span-predictor-url", metavar="URL")
    group.add_argument("--explanation-predictor-url", metavar="URL")
    group.add_argument("--similarity-url", metavar="URL")
    group.add_argument("--ner-url", metavar="URL")
    group.add_argument("--entailment-url", metavar="URL")
    group.add_argument("--cache-path", metavar="PATH",
                       help="provider record/replay cache file")
    group.add_argument("--offline", action="store_const", const=True,
                       default=None,
                       help="serve provider calls from the cache only")
    group.add_argument("--jobs", type=int, metavar="N",
                       help="worker threads for per-query stages")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    overrides = {
        name: getattr(args, name, None)
        for name in _ENGINE_FIELDS + ("datasets", "host", "port",
                                      "cors_origins")
        if getattr(args, name, None) is not None
    }
    return load_config(args.config, overrides=overrides)


def cmd_answer(args: argparse.Namespace) -> int:
    try:
        config = _config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        records = load_dataset(args.dataset, strict=not args.lenient)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    try:
        pipeline = build_pipeline(config)
        pipeline.fit()
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER

    def run_one(record: DatasetRecord):
        return pipeline.answer_record(record)

    try:
        if config.jobs > 1:
            with ThreadPoolExecutor(max_workers=config.jobs) as pool:
                results = list(pool.map(run_one, records))
        else:
            results = [run_one(record) for record in records]
    except ProviderError as exc:
        print(f"error: provider failure: {exc}", file=sys.stderr)
        return EXIT_PROVIDER

    results.sort(key=lambda r: r.query.id)
    failed = sum(ALL_SEGMENTS_FAILED in r.diagnostics for r in results)
    if results and failed == len(results):
        print("error: every query failed at the provider", file=sys.stderr)
        return EXIT_PROVIDER
    write_predictions(results, args.output)
    for result in results:
        c_pred = "null" if result.c_pred is None else f"{result.c_pred:g}"
        instances = len(result.instances.items) if result.instances else 0
        print(f"{result.query.id}: c_pred={c_pred} "
              f"candidates={len(result.candidates)} instances={instances}")
    print(f"wrote {len(results)} predictions to {args.output}")
    return EXIT_OK


def _cnp_pairs(record: dict, gold_labels) -> list[tuple[CnpLabel, CnpLabel]]:
    pairs = []
    cnp = record.get("cnp") or {}
    for bucket, label in (("synonyms", CnpLabel.SYNONYM),
                          ("subgroups", CnpLabel.SUBGROUP),
                          ("incomparables", CnpLabel.INCOMPARABLE)):
        for item in cnp.get(bucket, ()):
            gold = gold_labels.get(item["cnp_text"])
            if gold is not None:
                pairs.append((label, gold))
    return pairs


def cmd_evaluate(args: argparse.Namespace) -> int:
    try:
        ks = tuple(int(k) for k in args.ks.split(",")) if args.ks else DEFAULT_KS
        if any(k < 1 for k in ks):
            raise ValueError("cutoffs must be >= 1")
    except ValueError as exc:
        print(f"error: bad --ks: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        records = load_dataset(args.dataset)
        predictions = load_predictions(args.predictions)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA

    dataset_ids = {record.query.id for record in records}
    unknown = [p["id"] for p in predictions if p["id"] not in dataset_ids]
    if unknown:
        for pid in unknown:
            print(f"error: prediction for unknown query id {pid!r}",
                  file=sys.stderr)
        return EXIT_DATA
    by_id = {p["id"]: p for p in predictions}

    golds = {r.query.id: r.gold.gold_count for r in records}
    preds = {qid: by_id.get(qid, {}).get("c_pred") for qid in golds}
    count_report = count_metrics(preds, golds)
    print("Count metrics")
    print(format_count_report(count_report))

    report = {"counts": count_report.to_dict()}

    gold_instances = {
        r.query.id: r.gold.gold_instances
        for r in records if r.gold.gold_instances
    }
    if gold_instances:
        rankings = {
            qid: [item["instance"]
                  for item in (by_id.get(qid, {}).get("instances") or ())]
            for qid in gold_instances
        }
        instance_report = instance_metrics(rankings, gold_instances, ks)
        print()
        print("Instance metrics")
        print(format_instance_report(instance_report))
        report["instances"] = instance_report.to_dict()

    labeled_pairs = []
    for record in records:
        if not record.gold.category_labels:
            continue
        gold_labels = {text: label for text, label in record.gold.category_labels}
        labeled_pairs.extend(
            _cnp_pairs(by_id.get(record.query.id, {}), gold_labels)
        )
    if labeled_pairs:
        accuracy = cnp_accuracy(labeled_pairs)
        print()
        print("CNP category accuracy")
        for label in CnpLabel:
            value = accuracy[label]
            shown = "n/a" if value is None else f"{100.0 * value:.1f}"
            print(f"{label.value:<14}{shown:>8}")
        report["cnp_accuracy"] = {
            label.value: accuracy[label] for label in CnpLabel
        }

    if args.output:
        Path(args.output).write_text(
            json.dumps(report, indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
        print(f"\nwrote report to {args.output}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    try:
        config = _config_from_args(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        from .service import create_app

        app = create_app(config)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    import uvicorn

    try:
        uvicorn.run(app, host=config.host, port=config.port,
                    log_level="warning")
    except (OSError, SystemExit) as exc:
        print(f"error: cannot serve on {config.host}:{config.port}: {exc}",
              file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def cmd_validate_dataset(args: argparse.Namespace) -> int:
    issues = validate_dataset(args.dataset)
    for issue in issues:
        print(issue)
    if issues:
        print(f"{len(issues)} problem(s) found", file=sys.stderr)
        return EXIT_DATA
    print("dataset is valid")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="countqa",
                     description="Count question answering over text segments")
    parser.add_argument("--verbose", "-v", action="count", default=0,
                        help="increase log verbosity")
    sub = parser.add_subparsers(dest="command", required=True)

    p_answer = sub.add_parser("answer", help="run the pipeline over a dataset")
    p_answer.add_argument("--dataset", required=True, metavar="PATH")
    p_answer.add_argument("--output", required=True, metavar="PATH",
                          help="predictions file to write (JSONL)")
    p_answer.add_argument("--lenient", action="store_true",
                          help="skip malformed dataset lines instead of aborting")
    _add_engine_flags(p_answer)
    p_answer.set_defaults(func=cmd_answer)

    p_eval = sub.add_parser("evaluate", help="score a predictions file")
    p_eval.add_argument("--predictions", required=True, metavar="PATH")
    p_eval.add_argument("--dataset", required=True, metavar="PATH")
    p_eval.add_argument("--ks", metavar="K1,K2,...",
                        help="ranking cutoffs (default 1,5,10)")
    p_eval.add_argument("--output", metavar="PATH",
                        help="also write the report as JSON")
    p_eval.set_defaults(func=cmd_evaluate)

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--datasets", default=None, metavar="P1,P2,...",
                         help="dataset files to preload")
    p_serve.add_argument("--cors-origins", default=None, metavar="O1,O2,...")
    _add_engine_flags(p_serve)
    p_serve.set_defaults(func=cmd_serve)

    p_validate = sub.add_parser("validate-dataset",
                                help="check a dataset file against the schema")
    p_validate.add_argument("dataset", metavar="PATH")
    p_validate.set_defaults(func=cmd_validate_dataset)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1
        else logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except DatasetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ProviderError as exc:
        print(f"error: provider failure: {exc}", file=sys.stderr)
        return EXIT_PROVIDER
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
