"""Song corpus: data model, file ingestion, and the embedded store.

A corpus lives on disk as append-only JSONL plus a manifest; no database
server is involved. Record ids are content-derived 64-bit hashes so that
re-ingesting identical data reproduces identical ids.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

GENRES = ("pop", "country", "blues", "rock", "jazz", "reggae", "hip-hop")
EMOTIONS = (
    "sadness",
    "violence",
    "world/life",
    "obscene",
    "music",
    "night/time",
    "romantic",
    "feelings",
)

YEAR_MIN, YEAR_MAX = 1900, 2100

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

MANIFEST_NAME = "manifest.json"
RECORDS_NAME = "records.jsonl"


class CorpusError(Exception):
    """Base class for ingestion/persistence failures."""


class IngestError(CorpusError):
    pass


class PersistError(CorpusError):
    pass


class CorruptionError(CorpusError):
    pass


class StoreNotFoundError(CorpusError):
    pass


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def _canonical_label(text: str) -> str:
    return " ".join(text.strip().lower().split())


_GENRE_ALIASES = {
    "hip hop": "hip-hop",
    "hiphop": "hip-hop",
    "hip-hop": "hip-hop",
}

_EMOTION_ALIASES = {
    "world/life": "world/life",
    "world life": "world/life",
    "world-life": "world/life",
    "night/time": "night/time",
    "night time": "night/time",
    "night-time": "night/time",
}


@dataclass(frozen=True, slots=True)
class Genre:
    """A genre facet value: one of the seven named genres or other(label)."""

    value: str
    label: str | None = None

    @classmethod
    def parse(cls, text: str) -> "Genre":
        norm = _canonical_label(text)
        norm = _GENRE_ALIASES.get(norm, norm)
        if norm in GENRES:
            return cls(norm)
        return cls("other", text.strip())

    @property
    def is_other(self) -> bool:
        return self.value == "other"

    def display(self) -> str:
        return f"other({self.label})" if self.is_other else self.value

    def storage(self) -> str:
        return self.label if self.is_other else self.value


@dataclass(frozen=True, slots=True)
class Emotion:
    """An emotion facet value: one of the eight named moods or other(label)."""

    value: str
    label: str | None = None

    @classmethod
    def parse(cls, text: str) -> "Emotion":
        norm = _canonical_label(text)
        norm = _EMOTION_ALIASES.get(norm, norm)
        if norm in EMOTIONS:
            return cls(norm)
        return cls("other", text.strip())

    @property
    def is_other(self) -> bool:
        return self.value == "other"

    def display(self) -> str:
        return f"other({self.label})" if self.is_other else self.value

    def storage(self) -> str:
        return self.label if self.is_other else self.value


@dataclass(frozen=True, slots=True)
class SongRecord:
    id: int
    title: str
    artist: str
    year: int | None
    genre: Genre
    emotion: Emotion
    lyrics: str
    source: str | None = None

    def to_dict(self) -> dict:
        data = {
            "title": self.title,
            "artist": self.artist,
            "year": self.year,
            "genre": self.genre.storage(),
            "emotion": self.emotion.storage(),
            "lyrics": self.lyrics,
        }
        if self.source is not None:
            data["source"] = self.source
        return data


def record_id(title: str, artist: str, lyrics: str) -> int:
    """Content hash over NFC-normalized title/artist/lyrics."""
    key = "\x1f".join(
        unicodedata.normalize("NFC", part) for part in (title, artist, lyrics)
    )
    return fnv1a64(key.encode("utf-8"))


@dataclass(frozen=True, slots=True)
class Rejection:
    line: int
    reason: str


@dataclass
class Manifest:
    count: int
    checksum: str
    created_at: str
    source: str

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "checksum": self.checksum,
            "created_at": self.created_at,
            "source": self.source,
        }


@dataclass
class Corpus:
    records: list[SongRecord]
    manifest: Manifest
    rejections: list[Rejection] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def by_id(self) -> dict[int, SongRecord]:
        return {r.id: r for r in self.records}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return (
            self.records == other.records
            and self.manifest.count == other.manifest.count
            and self.manifest.checksum == other.manifest.checksum
        )


def _records_checksum(records: list[SongRecord]) -> str:
    h = _FNV_OFFSET
    for rec in records:
        line = _record_line(rec)
        for b in line.encode("utf-8"):
            h ^= b
            h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def _record_line(rec: SongRecord) -> str:
    return json.dumps(rec.to_dict(), sort_keys=True, ensure_ascii=False)


def _build_record(
    row: dict, line_no: int, source: str | None
) -> SongRecord | Rejection:
    title = str(row.get("title") or "").strip()
    lyrics = str(row.get("lyrics") or "")
    if not title:
        return Rejection(line_no, "empty title")
    if not lyrics.strip():
        return Rejection(line_no, "empty lyrics")
    artist = str(row.get("artist") or "").strip()
    raw_year = row.get("year")
    year: int | None
    if raw_year in (None, ""):
        year = None
    else:
        try:
            year = int(raw_year)
        except (TypeError, ValueError):
            return Rejection(line_no, f"bad year: {raw_year!r}")
        if not YEAR_MIN <= year <= YEAR_MAX:
            return Rejection(line_no, f"year out of range: {year}")
    genre = Genre.parse(str(row.get("genre") or ""))
    emotion = Emotion.parse(str(row.get("emotion") or ""))
    return SongRecord(
        id=record_id(title, artist, lyrics),
        title=title,
        artist=artist,
        year=year,
        genre=genre,
        emotion=emotion,
        lyrics=lyrics,
        source=row.get("source") or source,
    )


def _iter_jsonl(text: str):
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            yield line_no, Rejection(line_no, f"invalid json: {exc.msg}")
            continue
        if not isinstance(row, dict):
            yield line_no, Rejection(line_no, "row is not an object")
            continue
        yield line_no, row


CSV_COLUMNS = ("title", "artist", "year", "genre", "emotion", "lyrics")


def _iter_csv(text: str):
    reader = csv.reader(io.StringIO(text))
    header: list[str] | None = None
    for line_no, cells in enumerate(reader, start=1):
        if header is None:
            header = [c.strip().lower() for c in cells]
            if header != list(CSV_COLUMNS):
                raise IngestError(
                    f"csv header must be {','.join(CSV_COLUMNS)}, got {','.join(header)}"
                )
            continue
        if not cells or all(not c.strip() for c in cells):
            continue
        if len(cells) != len(CSV_COLUMNS):
            yield line_no, Rejection(line_no, f"expected {len(CSV_COLUMNS)} columns")
            continue
        yield line_no, dict(zip(CSV_COLUMNS, cells))


def ingest(path: str | Path, format: str | None = None) -> Corpus:
    """Read a JSONL or CSV lyrics file into a validated Corpus.

    Malformed rows land in the corpus rejection report instead of
    aborting; an unreadable file or a >50% rejection rate is fatal.
    """
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format not in ("jsonl", "csv"):
        raise IngestError(f"unsupported format: {format}")
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    except UnicodeDecodeError as exc:
        raise IngestError(f"{path} is not valid UTF-8: {exc}") from exc
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc

    rows = _iter_csv(text) if format == "csv" else _iter_jsonl(text)
    records: list[SongRecord] = []
    rejections: list[Rejection] = []
    seen_ids: dict[int, int] = {}
    total_rows = 0
    for line_no, row in rows:
        total_rows += 1
        if isinstance(row, Rejection):
            rejections.append(row)
            continue
        built = _build_record(row, line_no, str(path))
        if isinstance(built, Rejection):
            rejections.append(built)
            continue
        if built.id in seen_ids:
            prev_line = seen_ids[built.id]
            prev = next(r for r in records if r.id == built.id)
            if (prev.title, prev.artist, prev.lyrics) == (
                built.title,
                built.artist,
                built.lyrics,
            ):
                rejections.append(
                    Rejection(line_no, f"duplicate of line {prev_line}")
                )
                continue
            raise IngestError(
                f"id collision between lines {prev_line} and {line_no}"
            )
        seen_ids[built.id] = line_no
        records.append(built)

    if total_rows == 0:
        raise IngestError(f"{path}: no rows found")
    if len(rejections) * 2 > total_rows:
        raise IngestError(
            f"{path}: corpus quality failure, {len(rejections)}/{total_rows} "
            f"rows rejected (first: line {rejections[0].line}, {rejections[0].reason})"
        )

    manifest = Manifest(
        count=len(records),
        checksum=_records_checksum(records),
        created_at=dt.datetime.now(dt.timezone.utc).isoformat(),
        source=str(path),
    )
    return Corpus(records=records, manifest=manifest, rejections=rejections)


def persist(corpus: Corpus, dir: str | Path) -> str:
    """Write records + manifest into ``dir``; returns the checksum."""
    dir = Path(dir)
    try:
        dir.mkdir(parents=True, exist_ok=True)
        lines = [_record_line(r) for r in corpus.records]
        (dir / RECORDS_NAME).write_text(
            "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8"
        )
        (dir / MANIFEST_NAME).write_text(
            json.dumps(corpus.manifest.to_dict(), indent=2) + "\n", encoding="utf-8"
        )
        if corpus.rejections:
            rej_lines = [
                json.dumps({"line": r.line, "reason": r.reason})
                for r in corpus.rejections
            ]
            (dir / "rejections.jsonl").write_text(
                "\n".join(rej_lines) + "\n", encoding="utf-8"
            )
    except OSError as exc:
        raise PersistError(f"cannot write corpus to {dir}: {exc}") from exc
    return corpus.manifest.checksum


def load(dir: str | Path) -> Corpus:
    """Load a persisted corpus, verifying the manifest checksum."""
    dir = Path(dir)
    manifest_path = dir / MANIFEST_NAME
    records_path = dir / RECORDS_NAME
    if not manifest_path.exists():
        raise StoreNotFoundError(f"no manifest at {manifest_path}")
    if not records_path.exists():
        raise StoreNotFoundError(f"no records file at {records_path}")
    raw_manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    manifest = Manifest(
        count=raw_manifest["count"],
        checksum=raw_manifest["checksum"],
        created_at=raw_manifest["created_at"],
        source=raw_manifest.get("source", ""),
    )
    records: list[SongRecord] = []
    for line_no, row in _iter_jsonl(records_path.read_text(encoding="utf-8")):
        if isinstance(row, Rejection):
            raise CorruptionError(f"{records_path}:{row.line}: {row.reason}")
        built = _build_record(row, line_no, None)
        if isinstance(built, Rejection):
            raise CorruptionError(f"{records_path}:{built.line}: {built.reason}")
        records.append(built)
    if len(records) != manifest.count:
        raise CorruptionError(
            f"{dir}: manifest count {manifest.count} != records {len(records)}"
        )
    checksum = _records_checksum(records)
    if checksum != manifest.checksum:
        raise CorruptionError(
            f"{dir}: checksum mismatch (manifest {manifest.checksum}, "
            f"records {checksum})"
        )
    return Corpus(records=records, manifest=manifest)
