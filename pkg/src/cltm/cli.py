"""Command-line pipeline: records in, matrices/diagnostics/figures out.

Subcommands: ingest, validate-balance, interval, compute, diagnose,
stability, trials, score, centroids, heatmap, simulate. Every subcommand
reads the files named by its flags and writes declared outputs; failures
print one machine-readable JSON object to stderr and exit nonzero.

Outputs are byte-deterministic: fixed JSON key order, shortest round-trip
float formatting, no timestamps. CLTM_THREADS (default 1) is accepted as
the parallelism cap; all current operations are sequential.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from .curves import build_curve, detect_dynamic_interval
from .diagnostics import compute_diagnostics
from .errors import CltmError
from .evalmetrics import (
    make_sv_trials,
    read_embeddings_jsonl,
    score_trials,
    trials_auc,
    trials_from_csv,
    trials_to_csv,
)
from .heatmap import HeatmapSpec, render_heatmap
from .records import (
    aggregate_grid,
    build_balance_manifest,
    family_map,
    ingest_records,
    read_language_file,
    read_metadata_file,
    serialize_records,
    validate_balance,
)
from .stability import per_seed_cltm, stability_report
from .synth import generate_experiment, preset, truth_from_json, truth_to_json
from .transfer import (
    assemble_cltm,
    cltm_from_csv,
    cltm_from_json,
    cltm_to_csv,
    cltm_to_json,
    compute_gains,
)


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8", newline="")


def _emit(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2) + "\n")


def _record_format(path: str, explicit: str) -> str:
    if explicit != "auto":
        return explicit
    return "jsonl" if path.endswith(".jsonl") else "csv"


def _load_records(path: str, explicit: str = "auto"):
    return ingest_records(_read_text(path), _record_format(path, explicit))


def _load_matrix(path: str):
    text = _read_text(path)
    return cltm_from_csv(text) if path.endswith(".csv") else cltm_from_json(text)


def _cmd_ingest(args) -> int:
    records = _load_records(args.records, args.format)
    if args.out:
        fmt = "jsonl" if args.out.endswith(".jsonl") else "csv"
        _write_text(args.out, serialize_records(records, fmt))
    _emit({
        "records": len(records),
        "languages": sorted({r.target for r in records}),
        "seeds": sorted({r.seed for r in records}),
        "metrics": sorted({r.metric_name for r in records}),
    })
    return 0


def _cmd_validate_balance(args) -> int:
    manifest = build_balance_manifest(read_metadata_file(_read_text(args.metadata)))
    violations = validate_balance(manifest)
    _emit({
        "balanced": not violations,
        "violations": [v.as_dict() for v in violations],
    })
    return 0


def _cmd_interval(args) -> int:
    records = _load_records(args.records)
    if args.language:
        records = [r for r in records if r.target == args.language]
    interval = detect_dynamic_interval(build_curve(records), threshold=args.threshold)
    text = interval.to_json()
    if args.out:
        _write_text(args.out, text)
    sys.stdout.write(text)
    return 0


def _build_grid(args):
    records = _load_records(args.records)
    languages = read_language_file(_read_text(args.langs))
    return aggregate_grid(records, languages, args.n), languages


def _cmd_compute(args) -> int:
    grid, _ = _build_grid(args)
    cltm = assemble_cltm(compute_gains(grid), strict=not args.no_strict)
    _write_text(args.out, cltm_to_json(cltm))
    if args.csv:
        _write_text(args.csv, cltm_to_csv(cltm))
    _emit({
        "languages": cltm.n,
        "valid_rows": int(cltm.row_valid.sum()),
        "out": args.out,
    })
    return 0


def _cmd_diagnose(args) -> int:
    cltm = _load_matrix(args.matrix)
    families = None
    if args.families:
        families = family_map(read_language_file(_read_text(args.families)))
    report = compute_diagnostics(
        cltm, family_map=families,
        reciprocity_denominator=args.reciprocity_denominator.replace("-", "_"),
    )
    if args.out:
        _write_text(args.out, report.to_json())
    sys.stdout.write(report.to_text() if args.text else report.to_json())
    return 0


def _cmd_stability(args) -> int:
    grid, _ = _build_grid(args)
    gains = compute_gains(grid)
    cltm = assemble_cltm(gains, strict=False)
    report = stability_report(per_seed_cltm(grid), cltm, gains, grid=grid)
    text = report.to_json()
    if args.out:
        _write_text(args.out, text)
    sys.stdout.write(text)
    return 0


def _cmd_trials(args) -> int:
    utterances = read_embeddings_jsonl(_read_text(args.embeddings))
    trials = make_sv_trials(utterances, max_per_class=args.max_per_class,
                            rng_seed=args.seed)
    _write_text(args.out, trials_to_csv(trials))
    _emit({"trials": len(trials), "out": args.out})
    return 0


def _cmd_score(args) -> int:
    utterances = read_embeddings_jsonl(_read_text(args.embeddings))
    embeddings = {u.id: u.embedding for u in utterances if u.embedding is not None}
    trials = trials_from_csv(_read_text(args.trials))
    scores = score_trials(trials, embeddings)
    if args.out:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["utt_a", "utt_b", "label", "score"])
        for trial, score in zip(trials, scores):
            writer.writerow([trial.utt_a, trial.utt_b, trial.label, repr(score)])
        _write_text(args.out, buf.getvalue())
    _emit({"trials": len(trials), "auc": trials_auc(trials, scores)})
    return 0


def _cmd_centroids(args) -> int:
    utterances = read_embeddings_jsonl(_read_text(args.embeddings))
    by_language: dict[str, list] = {}
    for u in utterances:
        if u.embedding is not None:
            by_language.setdefault(u.language, []).append(u.embedding)
    from .evalmetrics import centroid_distances

    distances = centroid_distances(by_language)
    doc = {
        "pairs": [
            {"a": a, "b": b, "distance": distances[(a, b)]}
            for (a, b) in sorted(distances)
        ]
    }
    if args.out:
        _write_text(args.out, json.dumps(doc, indent=2) + "\n")
    _emit(doc)
    return 0


def _cmd_heatmap(args) -> int:
    cltm = _load_matrix(args.matrix)
    spec = HeatmapSpec(
        scale_min=args.scale_min,
        scale_max=args.scale_max,
        negative_color=args.negative_color,
        zero_color=args.zero_color,
        positive_color=args.positive_color,
        cell_size=args.cell_size,
        label_font_size=args.font_size,
        annotate=args.annotate,
    )
    Path(args.out).write_bytes(render_heatmap(cltm, spec))
    _emit({"out": args.out, "cells": cltm.n * cltm.n})
    return 0


def _cmd_simulate(args) -> int:
    if args.truth:
        truth = truth_from_json(_read_text(args.truth))
    else:
        truth = preset(args.preset)
    if args.noise_sd is not None:
        truth.noise_sd = args.noise_sd
    if args.seed_count is not None:
        truth.seed_count = args.seed_count
    records = generate_experiment(truth, master_seed=args.seed)
    _write_text(args.out, serialize_records(records, "csv"))
    if args.write_truth:
        _write_text(args.write_truth, truth_to_json(truth))
    if args.write_langs:
        lines = ["code,family"] + [
            f"{lang.code},{lang.family or ''}" for lang in truth.languages
        ]
        _write_text(args.write_langs, "\n".join(lines) + "\n")
    _emit({
        "records": len(records),
        "languages": len(truth.languages),
        "seeds": truth.seed_count,
        "noise_sd": truth.noise_sd,
        "out": args.out,
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cltm",
        description="Cross-lingual transfer matrix computation and diagnostics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a record file, optionally normalize it")
    p.add_argument("--records", required=True)
    p.add_argument("--format", choices=["auto", "csv", "jsonl"], default="auto")
    p.add_argument("--out", help="write normalized records (.csv or .jsonl)")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("validate-balance", help="check dataset balance constraints")
    p.add_argument("--metadata", required=True,
                   help="CSV: language,speaker_id[,label]")
    p.set_defaults(func=_cmd_validate_balance)

    p = sub.add_parser("interval", help="detect the dynamic training interval")
    p.add_argument("--records", required=True)
    p.add_argument("--language", help="filter records to this target language")
    p.add_argument("--threshold", type=float, default=0.5,
                   help="relative-derivative cutoff in (0,1], default 0.5")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_interval)

    p = sub.add_parser("compute", help="aggregate records and assemble the matrix")
    p.add_argument("--records", required=True)
    p.add_argument("--langs", required=True, help="CSV: code,family (order = matrix order)")
    p.add_argument("--n", type=int, required=True, help="base training size N")
    p.add_argument("--out", required=True, help="matrix JSON output")
    p.add_argument("--csv", help="also write the matrix as CSV")
    p.add_argument("--no-strict", action="store_true",
                   help="mark non-positive self-gain rows invalid instead of failing")
    p.set_defaults(func=_cmd_compute)

    p = sub.add_parser("diagnose", help="aggregate matrix diagnostics")
    p.add_argument("--matrix", required=True, help="matrix JSON or CSV")
    p.add_argument("--families", help="CSV: code,family")
    p.add_argument("--out", help="write the report JSON here")
    p.add_argument("--text", action="store_true", help="print the aligned text table")
    p.add_argument("--reciprocity-denominator",
                   choices=["positive", "all-pairs"], default="positive")
    p.set_defaults(func=_cmd_diagnose)

    p = sub.add_parser("stability", help="seed-level standard errors of matrix entries")
    p.add_argument("--records", required=True)
    p.add_argument("--langs", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_stability)

    p = sub.add_parser("trials", help="generate gender-controlled verification trials")
    p.add_argument("--embeddings", required=True, help="utterance JSONL")
    p.add_argument("--max-per-class", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_trials)

    p = sub.add_parser("score", help="cosine-score trials and report AUC")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--trials", required=True)
    p.add_argument("--out", help="write per-trial scores CSV")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("centroids", help="per-language centroid distances")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_centroids)

    p = sub.add_parser("heatmap", help="render the matrix as an SVG heatmap")
    p.add_argument("--matrix", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--scale-min", type=float, default=-1.5)
    p.add_argument("--scale-max", type=float, default=1.5)
    p.add_argument("--negative-color", default="#2166AC")
    p.add_argument("--zero-color", default="#FFFFFF")
    p.add_argument("--positive-color", default="#B2182B")
    p.add_argument("--cell-size", type=int, default=28)
    p.add_argument("--font-size", type=int, default=11)
    p.add_argument("--annotate", action="store_true")
    p.set_defaults(func=_cmd_heatmap)

    p = sub.add_parser("simulate", help="generate a synthetic experiment record file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", choices=["block", "flat"])
    group.add_argument("--truth", help="truth JSON file")
    p.add_argument("--seed", type=int, required=True, help="master seed")
    p.add_argument("--out", required=True, help="records CSV output")
    p.add_argument("--noise-sd", type=float, help="override the truth's noise level")
    p.add_argument("--seed-count", type=int, help="override the number of seeds")
    p.add_argument("--write-truth", help="write the effective truth JSON here")
    p.add_argument("--write-langs", help="write the language/family CSV here")
    p.set_defaults(func=_cmd_simulate)

    return parser


def _thread_cap() -> int:
    raw = os.environ.get("CLTM_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError as exc:
        raise CltmError(f"CLTM_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise CltmError("CLTM_THREADS must be at least 1")
    return cap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        _thread_cap()
        return args.func(args)
    except (CltmError, OSError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 1
