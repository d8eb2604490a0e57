"""Corpus ingestion: filename metadata, JSON annotations, quality filtering.

Key names, label spellings, the filename delimiter, and the gender code
mapping are all carried by :class:`AnnotationSchema` so a differently
serialized corpus drops in through a config file instead of code changes.
"""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path

from .errors import (
    EmptyCorpus,
    MalformedFilename,
    NonNumericAge,
    RangeError,
    SchemaError,
)

log = logging.getLogger(__name__)


class RecordLabel(Enum):
    NORMAL = "Normal"
    CAS = "CAS"
    DAS = "DAS"
    CAS_AND_DAS = "CAS & DAS"
    POOR_QUALITY = "Poor Quality"


class EventLabel(Enum):
    NORMAL = "Normal"
    WHEEZE = "Wheeze"
    WHEEZE_CRACKLE = "Wheeze+Crackle"
    STRIDOR = "Stridor"
    RHONCHI = "Rhonchi"
    FINE_CRACKLE = "Fine Crackle"
    COARSE_CRACKLE = "Coarse Crackle"


_DEFAULT_RECORD_LABELS = {
    "Normal": RecordLabel.NORMAL,
    "CAS": RecordLabel.CAS,
    "DAS": RecordLabel.DAS,
    "CAS & DAS": RecordLabel.CAS_AND_DAS,
    "CAS&DAS": RecordLabel.CAS_AND_DAS,
    "Poor Quality": RecordLabel.POOR_QUALITY,
}

_DEFAULT_EVENT_LABELS = {
    "Normal": EventLabel.NORMAL,
    "Wheeze": EventLabel.WHEEZE,
    "Wheeze+Crackle": EventLabel.WHEEZE_CRACKLE,
    "Wheeze & Crackle": EventLabel.WHEEZE_CRACKLE,
    "Stridor": EventLabel.STRIDOR,
    "Rhonchi": EventLabel.RHONCHI,
    "Fine Crackle": EventLabel.FINE_CRACKLE,
    "Coarse Crackle": EventLabel.COARSE_CRACKLE,
}


@dataclass(frozen=True)
class AnnotationSchema:
    """Serialization details of one corpus flavor; defaults cover the
    documented layout (record_annotation / event_annotation / start / end /
    type, underscore-delimited filenames, gender 1=M 0=F)."""

    record_key: str = "record_annotation"
    events_key: str = "event_annotation"
    start_key: str = "start"
    end_key: str = "end"
    type_key: str = "type"
    delimiter: str = "_"
    gender_codes: dict = field(default_factory=lambda: {"1": "M", "0": "F"})
    record_labels: dict = field(default_factory=lambda: dict(_DEFAULT_RECORD_LABELS))
    event_labels: dict = field(default_factory=lambda: dict(_DEFAULT_EVENT_LABELS))

    @classmethod
    def from_json(cls, path) -> "AnnotationSchema":
        """Override any subset of the defaults from a JSON config file."""
        raw = json.loads(Path(path).read_text())
        schema = cls()
        simple = {"record_key", "events_key", "start_key", "end_key", "type_key", "delimiter"}
        updates = {k: v for k, v in raw.items() if k in simple}
        if "gender_codes" in raw:
            updates["gender_codes"] = dict(raw["gender_codes"])
        if "record_labels" in raw:
            updates["record_labels"] = {k: RecordLabel(v) for k, v in raw["record_labels"].items()}
        if "event_labels" in raw:
            updates["event_labels"] = {k: EventLabel(v) for k, v in raw["event_labels"].items()}
        unknown = set(raw) - simple - {"gender_codes", "record_labels", "event_labels"}
        if unknown:
            raise SchemaError(f"unknown schema keys {sorted(unknown)}")
        return replace(schema, **updates)


DEFAULT_SCHEMA = AnnotationSchema()


@dataclass(frozen=True)
class RecordingMeta:
    patient_id: str
    age_years: float
    gender: str  # "M" | "F" | "Unknown"
    location: str
    recording_id: str


@dataclass(frozen=True)
class SoundEvent:
    start_ms: int
    end_ms: int
    label: EventLabel

    def __post_init__(self):
        if self.start_ms < 0 or self.start_ms >= self.end_ms:
            raise RangeError(f"bad event interval [{self.start_ms}, {self.end_ms}) ms")

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


@dataclass(frozen=True)
class AnnotatedRecording:
    base_name: str
    meta: RecordingMeta
    record_label: RecordLabel
    events: tuple[SoundEvent, ...]
    audio_path: Path


def parse_filename(name: str, schema: AnnotationSchema = DEFAULT_SCHEMA) -> RecordingMeta:
    """Decode the five-field base filename: patient, age, gender, location, id."""
    fields = name.split(schema.delimiter)
    if len(fields) != 5:
        raise MalformedFilename(f"{name!r}: expected 5 fields, got {len(fields)}")
    patient_id, age_str, gender_code, location, recording_id = fields
    try:
        age = float(age_str)
    except ValueError:
        raise NonNumericAge(f"{name!r}: age field {age_str!r} is not a number") from None
    if not (math.isfinite(age) and age >= 0):
        raise NonNumericAge(f"{name!r}: age {age_str!r} must be a finite nonnegative number")
    gender = schema.gender_codes.get(gender_code, "Unknown")
    return RecordingMeta(patient_id, age, gender, location, recording_id)


def format_filename(meta: RecordingMeta, schema: AnnotationSchema = DEFAULT_SCHEMA) -> str:
    """Inverse of parse_filename for M/F metadata (Unknown has no code)."""
    codes = {v: k for k, v in schema.gender_codes.items()}
    gender_code = codes.get(meta.gender, "u")
    fields = (meta.patient_id, repr(meta.age_years), gender_code, meta.location, meta.recording_id)
    for f in fields:
        if schema.delimiter in f:
            raise MalformedFilename(f"field {f!r} contains the delimiter {schema.delimiter!r}")
    return schema.delimiter.join(fields)


def parse_annotation(doc: dict, schema: AnnotationSchema = DEFAULT_SCHEMA):
    """Parse one annotation document to (RecordLabel, sorted SoundEvents)."""
    if schema.record_key not in doc:
        raise SchemaError(f"missing record label key {schema.record_key!r}")
    if schema.events_key not in doc:
        raise SchemaError(f"missing event list key {schema.events_key!r}")

    raw_label = str(doc[schema.record_key]).strip()
    try:
        record_label = schema.record_labels[raw_label]
    except KeyError:
        raise SchemaError(f"unknown record label {raw_label!r}") from None

    events = []
    for i, entry in enumerate(doc[schema.events_key]):
        missing = {schema.start_key, schema.end_key, schema.type_key} - set(entry)
        if missing:
            raise SchemaError(f"event {i}: missing keys {sorted(missing)}")
        start = _as_ms(entry[schema.start_key], f"event {i} start")
        end = _as_ms(entry[schema.end_key], f"event {i} end")
        raw_type = str(entry[schema.type_key]).strip()
        try:
            label = schema.event_labels[raw_type]
        except KeyError:
            raise SchemaError(f"event {i}: unknown event label {raw_type!r}") from None
        if start >= end:
            raise RangeError(f"event {i}: start {start} >= end {end}")
        events.append(SoundEvent(start, end, label))

    events.sort(key=lambda e: (e.start_ms, e.end_ms))
    return record_label, events


def _as_ms(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError(f"{what}: {value!r} is not a number")
    ms = int(value)
    if ms != value:
        raise SchemaError(f"{what}: {value!r} is not an integer millisecond count")
    if ms < 0:
        raise RangeError(f"{what}: negative time {ms}")
    return ms


def scan_corpus(root, schema: AnnotationSchema = DEFAULT_SCHEMA) -> list[AnnotatedRecording]:
    """Pair every WAV under root with its same-stem JSON annotation.

    Annotations may sit next to the WAV or anywhere else under root (parallel
    trees work since pairing is by stem). Unpaired or unparseable files are
    logged as warnings and skipped; the result is sorted by base name.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus root {root} is not a directory")

    wavs = sorted(root.rglob("*.wav"))
    if not wavs:
        raise EmptyCorpus(f"no .wav files under {root}")

    annotations: dict[str, Path] = {}
    for p in sorted(root.rglob("*.json")):
        if p.stem in annotations:
            log.warning("duplicate annotation stem %s: keeping %s, ignoring %s",
                        p.stem, annotations[p.stem], p)
            continue
        annotations[p.stem] = p

    recordings = []
    seen = set()
    for wav in wavs:
        base = wav.stem
        if base in seen:
            log.warning("duplicate audio stem %s: ignoring %s", base, wav)
            continue
        seen.add(base)
        ann_path = annotations.get(base)
        if ann_path is None:
            log.warning("no annotation for %s", wav)
            continue
        try:
            meta = parse_filename(base, schema)
            doc = json.loads(ann_path.read_text())
            record_label, events = parse_annotation(doc, schema)
        except (MalformedFilename, SchemaError, RangeError, json.JSONDecodeError) as exc:
            log.warning("skipping %s: %s", base, exc)
            continue
        if not events and record_label is not RecordLabel.POOR_QUALITY:
            log.warning("%s: %s recording has no events", base, record_label.value)
        recordings.append(
            AnnotatedRecording(base, meta, record_label, tuple(events), wav)
        )
    recordings.sort(key=lambda r: r.base_name)
    return recordings


def filter_quality(recordings: list[AnnotatedRecording]) -> list[AnnotatedRecording]:
    """Drop recordings flagged poor quality; order preserved."""
    return [r for r in recordings if r.record_label is not RecordLabel.POOR_QUALITY]


MANIFEST_COLUMNS = [
    "base_name", "patient_id", "age_years", "gender", "location",
    "recording_id", "record_label", "n_events", "audio_path",
]


def write_manifest(recordings: list[AnnotatedRecording], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(MANIFEST_COLUMNS)
        for r in recordings:
            writer.writerow([
                r.base_name, r.meta.patient_id, r.meta.age_years, r.meta.gender,
                r.meta.location, r.meta.recording_id, r.record_label.value,
                len(r.events), str(r.audio_path),
            ])
