"""Experiment data model: performance records, grids, balance checks.

File formats
------------
Record CSV (UTF-8, LF, header required)::

    target,condition,donor,seed,value,metric,sample_count
    de,Base,,3,0.61,macro_f1,60
    de,DonorAugmented,pt,3,0.70,macro_f1,120

The donor field is empty except for DonorAugmented rows. The JSON-lines
alternative carries one object per record with the same field names (donor
null or omitted where the CSV field is empty).

Language/family map CSV: header ``code,family``; the family field may be
empty. Balance metadata CSV: header ``language,speaker_id,label``; the
label column is optional.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .errors import GridError, RecordParseError

CSV_HEADER = ["target", "condition", "donor", "seed", "value", "metric", "sample_count"]

# metrics the paper reports; values outside [0,1] are suspicious for these
_UNIT_RANGE_METRICS = {"macro_f1", "auc"}


class Condition(Enum):
    BASE = "Base"
    SELF_AUGMENTED = "SelfAugmented"
    DONOR_AUGMENTED = "DonorAugmented"


@dataclass(frozen=True)
class LanguageId:
    """A language code plus optional family label."""

    code: str
    family: Optional[str] = None

    def __post_init__(self):
        if not self.code:
            raise ValueError("language code must be non-empty")


@dataclass(frozen=True)
class PerformanceRecord:
    """One measured evaluation result for a (target, condition, donor, seed) cell.

    ``target`` and ``donor`` are language codes; ``sample_count`` is the
    training-set size the model saw (N for Base, 2N for augmented runs).
    """

    target: str
    condition: Condition
    donor: Optional[str]
    seed: int
    value: float
    metric_name: str
    sample_count: int

    def __post_init__(self):
        if not self.target:
            raise ValueError("target must be non-empty")
        if self.condition is Condition.DONOR_AUGMENTED:
            if not self.donor:
                raise ValueError("donor required for DonorAugmented")
            if self.donor == self.target:
                raise ValueError("donor must differ from target")
        elif self.donor is not None:
            raise ValueError(f"donor forbidden for {self.condition.value}")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")
        if not math.isfinite(self.value):
            raise ValueError("value must be finite")
        if self.sample_count <= 0:
            raise ValueError("sample_count must be positive")

    def key(self) -> tuple[str, str, Optional[str], int, int]:
        """Identity of one measurement.

        sample_count is part of the key so learning-curve files (same cell
        at several sizes) ingest cleanly; within a grid it is pinned by the
        condition, so grid cells still cannot hold duplicate seeds.
        """
        return (self.target, self.condition.value, self.donor, self.seed,
                self.sample_count)


def _parse_condition(token: str, line: int) -> Condition:
    for cond in Condition:
        if cond.value == token:
            return cond
    raise RecordParseError(line, f"unknown condition {token!r}")


def _record_from_fields(fields: dict, line: int) -> PerformanceRecord:
    cond = fields["condition"]
    if isinstance(cond, str):
        cond = _parse_condition(cond, line)
    donor = fields.get("donor")
    if donor == "":
        donor = None
    try:
        record = PerformanceRecord(
            target=fields["target"],
            condition=cond,
            donor=donor,
            seed=int(fields["seed"]),
            value=float(fields["value"]),
            metric_name=fields["metric"],
            sample_count=int(fields["sample_count"]),
        )
    except RecordParseError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise RecordParseError(line, str(exc)) from exc
    if record.metric_name in _UNIT_RANGE_METRICS and not 0.0 <= record.value <= 1.0:
        warnings.warn(
            f"line {line}: value {record.value} outside [0,1] for metric "
            f"{record.metric_name!r}",
            stacklevel=3,
        )
    return record


def ingest_records(stream: str, fmt: str = "csv") -> list[PerformanceRecord]:
    """Parse record-file content into validated PerformanceRecords.

    ``fmt`` is "csv" or "jsonl". Raises RecordParseError on a malformed
    row (with its line number) and on duplicate (target, condition, donor,
    seed) keys.
    """
    if fmt == "csv":
        records = _ingest_csv(stream)
    elif fmt == "jsonl":
        records = _ingest_jsonl(stream)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    seen: dict[tuple, int] = {}
    for line, record in records:
        prev = seen.get(record.key())
        if prev is not None:
            raise RecordParseError(
                line, f"duplicate record key {record.key()} (first seen on line {prev})"
            )
        seen[record.key()] = line
    return [record for _, record in records]


def _ingest_csv(stream: str) -> list[tuple[int, PerformanceRecord]]:
    reader = csv.reader(io.StringIO(stream))
    rows = list(reader)
    if not rows:
        raise RecordParseError(1, "empty record file")
    if rows[0] != CSV_HEADER:
        raise RecordParseError(1, f"expected header {','.join(CSV_HEADER)!r}")
    out = []
    for idx, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(CSV_HEADER):
            raise RecordParseError(idx, f"expected {len(CSV_HEADER)} fields, got {len(row)}")
        fields = dict(zip(CSV_HEADER, row))
        out.append((idx, _record_from_fields(fields, idx)))
    return out


def _ingest_jsonl(stream: str) -> list[tuple[int, PerformanceRecord]]:
    out = []
    for idx, line in enumerate(stream.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordParseError(idx, f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise RecordParseError(idx, "record must be a JSON object")
        obj.setdefault("donor", None)
        missing = [k for k in CSV_HEADER if k != "donor" and k not in obj]
        if missing:
            raise RecordParseError(idx, f"missing fields: {', '.join(missing)}")
        out.append((idx, _record_from_fields(obj, idx)))
    return out


def serialize_records(records: Iterable[PerformanceRecord], fmt: str = "csv") -> str:
    """Render records in the documented CSV or JSON-lines schema.

    Inverse of ingest_records: float values are written with shortest
    round-trip formatting, so ingest(serialize(rs)) == rs.
    """
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow(
                [r.target, r.condition.value, r.donor or "", r.seed, repr(r.value),
                 r.metric_name, r.sample_count]
            )
        return buf.getvalue()
    if fmt == "jsonl":
        lines = []
        for r in records:
            lines.append(json.dumps({
                "target": r.target,
                "condition": r.condition.value,
                "donor": r.donor,
                "seed": r.seed,
                "value": r.value,
                "metric": r.metric_name,
                "sample_count": r.sample_count,
            }))
        return "\n".join(lines) + ("\n" if lines else "")
    raise ValueError(f"unknown format {fmt!r}")


@dataclass
class Cell:
    """Per-seed values and their mean for one grid cell."""

    values_by_seed: dict[int, float]
    mean: float


@dataclass
class TransferGrid:
    """Seed-aggregated performance for every condition over n languages.

    ``cells`` is keyed by (target_code, condition, donor_code or None).
    """

    languages: list[LanguageId]
    n_samples: int
    metric_name: str
    cells: dict[tuple[str, Condition, Optional[str]], Cell]
    seed_ids: list[int] = field(default_factory=list)

    @property
    def codes(self) -> list[str]:
        return [lang.code for lang in self.languages]

    def mean(self, target: str, condition: Condition, donor: Optional[str] = None) -> float:
        return self.cells[(target, condition, donor)].mean

    def per_seed(self, target: str, condition: Condition,
                 donor: Optional[str] = None) -> dict[int, float]:
        return self.cells[(target, condition, donor)].values_by_seed


def expected_cells(codes: Sequence[str]) -> list[tuple[str, Condition, Optional[str]]]:
    """All cell keys a complete grid must contain, in canonical order."""
    keys: list[tuple[str, Condition, Optional[str]]] = []
    for target in codes:
        keys.append((target, Condition.BASE, None))
        keys.append((target, Condition.SELF_AUGMENTED, None))
        for donor in codes:
            if donor != target:
                keys.append((target, Condition.DONOR_AUGMENTED, donor))
    return keys


def aggregate_grid(records: Sequence[PerformanceRecord], languages: Sequence[LanguageId],
                   n_samples: int) -> TransferGrid:
    """Aggregate records over seeds into a complete, seed-aligned TransferGrid.

    Verifies full coverage (Base and SelfAugmented per target, DonorAugmented
    per ordered pair), identical seed sets in every cell, sample counts of N
    for Base and 2N otherwise, and a single metric across all records.
    """
    if len(languages) < 2:
        raise GridError("a grid needs at least 2 languages")
    if n_samples <= 0:
        raise GridError("n_samples must be positive")
    codes = [lang.code for lang in languages]
    if len(set(codes)) != len(codes):
        raise GridError("duplicate language codes")
    known = set(codes)

    metrics = {r.metric_name for r in records}
    if len(metrics) > 1:
        raise GridError(f"mixed metrics in record set: {sorted(metrics)}")

    cells: dict[tuple[str, Condition, Optional[str]], dict[int, float]] = {}
    for r in records:
        if r.target not in known:
            raise GridError(f"record target {r.target!r} not in language list")
        if r.donor is not None and r.donor not in known:
            raise GridError(f"record donor {r.donor!r} not in language list")
        expected_n = n_samples if r.condition is Condition.BASE else 2 * n_samples
        if r.sample_count != expected_n:
            raise GridError(
                f"cell (target={r.target}, condition={r.condition.value}, "
                f"donor={r.donor}): sample_count {r.sample_count} != {expected_n}"
            )
        per_seed = cells.setdefault((r.target, r.condition, r.donor), {})
        if r.seed in per_seed:
            raise GridError(
                f"duplicate seed {r.seed} in cell (target={r.target}, "
                f"condition={r.condition.value}, donor={r.donor})"
            )
        per_seed[r.seed] = r.value

    reference_seeds: Optional[frozenset[int]] = None
    built: dict[tuple[str, Condition, Optional[str]], Cell] = {}
    for key in expected_cells(codes):
        target, condition, donor = key
        per_seed = cells.get(key)
        if not per_seed:
            raise GridError(
                f"missing cell (target={target}, condition={condition.value}, donor={donor})"
            )
        seeds = frozenset(per_seed)
        if reference_seeds is None:
            reference_seeds = seeds
        elif seeds != reference_seeds:
            raise GridError(
                f"seed sets misaligned: cell (target={target}, "
                f"condition={condition.value}, donor={donor}) has {sorted(seeds)}, "
                f"expected {sorted(reference_seeds)}"
            )
        ordered = {s: per_seed[s] for s in sorted(per_seed)}
        built[key] = Cell(values_by_seed=ordered, mean=sum(ordered.values()) / len(ordered))

    extra = set(cells) - set(built)
    if extra:  # unreachable for known codes, kept as a guard
        raise GridError(f"unexpected cells: {sorted(extra)}")

    return TransferGrid(
        languages=list(languages),
        n_samples=n_samples,
        metric_name=next(iter(metrics)) if metrics else "",
        cells=built,
        seed_ids=sorted(reference_seeds or ()),
    )


# --- §-style balance validation over dataset metadata -----------------------


@dataclass
class MetadataRow:
    """One training sample's metadata (class label optional)."""

    language: str
    speaker_id: str
    label: Optional[str] = None


@dataclass
class BalanceManifest:
    """Deterministic summary of dataset metadata used by validate_balance."""

    sample_counts: dict[str, int]
    speaker_sets: dict[str, set[str]]
    samples_per_speaker: dict[str, int]
    label_counts: dict[str, Counter]


@dataclass(frozen=True)
class BalanceViolation:
    kind: str
    detail: str

    def as_dict(self) -> dict:
        return {"kind": self.kind, "detail": self.detail}


def build_balance_manifest(rows: Iterable[MetadataRow]) -> BalanceManifest:
    sample_counts: dict[str, int] = {}
    speaker_sets: dict[str, set[str]] = {}
    samples_per_speaker: Counter = Counter()
    label_counts: dict[str, Counter] = {}
    for row in rows:
        sample_counts[row.language] = sample_counts.get(row.language, 0) + 1
        speaker_sets.setdefault(row.language, set()).add(row.speaker_id)
        samples_per_speaker[row.speaker_id] += 1
        if row.label is not None:
            label_counts.setdefault(row.language, Counter())[row.label] += 1
    return BalanceManifest(
        sample_counts=sample_counts,
        speaker_sets=speaker_sets,
        samples_per_speaker=dict(samples_per_speaker),
        label_counts=label_counts,
    )


def validate_balance(manifest: BalanceManifest) -> list[BalanceViolation]:
    """Check the balanced-training-data constraints; violations are data.

    Constraints: equal per-language sample counts, equal per-language
    speaker counts, language-disjoint speaker ids, a constant number of
    samples per speaker, and balanced class labels within each language.
    """
    violations: list[BalanceViolation] = []

    counts = manifest.sample_counts
    if len(set(counts.values())) > 1:
        detail = ", ".join(f"{lang}={counts[lang]}" for lang in sorted(counts))
        violations.append(BalanceViolation("sample_count_mismatch", detail))

    spk_counts = {lang: len(s) for lang, s in manifest.speaker_sets.items()}
    if len(set(spk_counts.values())) > 1:
        detail = ", ".join(f"{lang}={spk_counts[lang]}" for lang in sorted(spk_counts))
        violations.append(BalanceViolation("speaker_count_mismatch", detail))

    owners: dict[str, str] = {}
    shared: dict[str, set[str]] = {}
    for lang in sorted(manifest.speaker_sets):
        for spk in manifest.speaker_sets[lang]:
            if spk in owners and owners[spk] != lang:
                shared.setdefault(spk, {owners[spk]}).add(lang)
            else:
                owners[spk] = lang
    for spk in sorted(shared):
        violations.append(
            BalanceViolation("speaker_overlap",
                             f"speaker overlap: {spk} in {sorted(shared[spk])}")
        )

    per_speaker = set(manifest.samples_per_speaker.values())
    if len(per_speaker) > 1:
        violations.append(
            BalanceViolation("samples_per_speaker",
                             f"samples per speaker not constant: {sorted(per_speaker)}")
        )

    all_labels: set[str] = set()
    for per_label in manifest.label_counts.values():
        all_labels.update(per_label)
    for lang in sorted(manifest.label_counts):
        per_label = manifest.label_counts[lang]
        if len({per_label.get(lab, 0) for lab in all_labels}) > 1:
            detail = ", ".join(f"{lab}={per_label.get(lab, 0)}"
                               for lab in sorted(all_labels))
            violations.append(
                BalanceViolation("class_imbalance", f"{lang}: {detail}")
            )

    return violations


# --- language / family map file ----------------------------------------------


def read_language_file(content: str) -> list[LanguageId]:
    """Parse the ``code,family`` CSV into an ordered language list."""
    reader = csv.reader(io.StringIO(content))
    rows = [row for row in reader if row]
    if not rows or [c.strip() for c in rows[0]] != ["code", "family"]:
        raise RecordParseError(1, "expected header 'code,family'")
    langs: list[LanguageId] = []
    seen: set[str] = set()
    for idx, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise RecordParseError(idx, f"expected 2 fields, got {len(row)}")
        code, family = row[0].strip(), row[1].strip()
        if not code:
            raise RecordParseError(idx, "empty language code")
        if code in seen:
            raise RecordParseError(idx, f"duplicate language code {code!r}")
        seen.add(code)
        langs.append(LanguageId(code=code, family=family or None))
    return langs


def family_map(languages: Iterable[LanguageId]) -> dict[str, str]:
    """code -> family for the languages that have a family label."""
    return {lang.code: lang.family for lang in languages if lang.family}


def read_metadata_file(content: str) -> list[MetadataRow]:
    """Parse balance metadata CSV (``language,speaker_id[,label]``)."""
    reader = csv.reader(io.StringIO(content))
    rows = [row for row in reader if row]
    if not rows:
        raise RecordParseError(1, "empty metadata file")
    header = [c.strip() for c in rows[0]]
    if header not in (["language", "speaker_id"], ["language", "speaker_id", "label"]):
        raise RecordParseError(1, "expected header 'language,speaker_id[,label]'")
    has_label = len(header) == 3
    out: list[MetadataRow] = []
    for idx, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise RecordParseError(idx, f"expected {len(header)} fields, got {len(row)}")
        label = row[2].strip() if has_label and row[2].strip() else None
        out.append(MetadataRow(language=row[0].strip(), speaker_id=row[1].strip(),
                               label=label))
    return out
