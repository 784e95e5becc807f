"""Bibliographic export ingestion.

Two desk-standard export flavors are supported: Web of Science tagged plain
text and Scopus CSV. Both parse into the same Corpus shape: citing
publications carrying their cited-reference strings verbatim, in file order.
Malformed records are never dropped silently; each one becomes a diagnostic
so corpus loss is visible to the analyst.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from enum import Enum

from .errors import NotScopusFormat, NotWosFormat

YEAR_MIN = 1500
YEAR_MAX = 2100

# WoS tags read from a record; everything else is skipped.
_WOS_TAGS_READ = ("AU", "TI", "SO", "PY", "DI", "CR")

_SCOPUS_REQUIRED = ("Title", "Authors", "Year", "Source title", "References")


class SourceFormat(str, Enum):
    WOS_TAGGED = "wos"
    SCOPUS_CSV = "scopus"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class RawCitedRef:
    """One verbatim cited-reference string from a citing record."""

    raw: str
    citing_id: str
    position: int


@dataclass(frozen=True)
class Publication:
    """One citing record from the input corpus."""

    id: str
    title: str
    authors: tuple[str, ...]
    pub_year: int
    source_title: str
    doi: str | None
    raw_refs: tuple[RawCitedRef, ...]


@dataclass(frozen=True)
class Corpus:
    publications: tuple[Publication, ...]
    format: SourceFormat
    diagnostics: tuple[tuple[int, str], ...]

    @property
    def n_refs(self) -> int:
        return sum(len(p.raw_refs) for p in self.publications)


def normalize_doi(text: str) -> str:
    """Lowercase a DOI and strip URL / label prefixes. Idempotent."""
    doi = text.strip().lower()
    for prefix in ("https://doi.org/", "http://doi.org/",
                   "https://dx.doi.org/", "http://dx.doi.org/",
                   "doi.org/", "doi:", "doi "):
        if doi.startswith(prefix):
            doi = doi[len(prefix):].strip()
    return doi


def _record_id(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


def _decode(data: bytes) -> str:
    text = data.decode("utf-8")
    return text.lstrip("﻿")


def _year_or_diag(value: str, line_no: int, diagnostics: list) -> int | None:
    value = value.strip()
    try:
        year = int(value)
    except ValueError:
        diagnostics.append((line_no, f"unparseable publication year {value!r}"))
        return None
    if not YEAR_MIN <= year <= YEAR_MAX:
        diagnostics.append(
            (line_no, f"publication year {year} outside [{YEAR_MIN}, {YEAR_MAX}]"))
        return None
    return year


def parse_wos_export(data: bytes) -> Corpus:
    """Parse a Web of Science tagged plain-text export.

    A record spans from a "PT " line to its "ER" line. Tag content continues
    on lines that begin with exactly three spaces; for CR, the tag line and
    each continuation line each yield one cited reference. Records without a
    usable PY are rejected into diagnostics.
    """
    text = _decode(data)
    if not text.strip():
        return Corpus((), SourceFormat.WOS_TAGGED, ())
    lines = text.splitlines()
    if not any(line.startswith("PT ") for line in lines):
        raise NotWosFormat("no 'PT ' record start line found")

    publications: list[Publication] = []
    diagnostics: list[tuple[int, str]] = []
    seen_ids: set[str] = set()

    i = 0
    n = len(lines)
    while i < n:
        if not lines[i].startswith("PT "):
            i += 1
            continue
        start = i
        j = i
        while j < n and lines[j].rstrip() != "ER":
            j += 1
        if j >= n:
            diagnostics.append((start + 1, "record not terminated by ER"))
            break
        record_lines = lines[start:j + 1]
        _parse_wos_record(record_lines, start + 1, publications, diagnostics,
                          seen_ids)
        i = j + 1

    return Corpus(tuple(publications), SourceFormat.WOS_TAGGED,
                  tuple(diagnostics))


def _parse_wos_record(record_lines, first_line_no, publications, diagnostics,
                      seen_ids) -> None:
    # Gather per-tag content lines: the tag line plus its continuations.
    fields: dict[str, list[str]] = {}
    tag = None
    for line in record_lines:
        if line.startswith("   ") and (len(line) == 3 or line[3] != " "):
            if tag is not None:
                fields.setdefault(tag, []).append(line[3:].rstrip())
            continue
        if len(line) >= 2 and line[:2].isalnum() and line[:2].isupper() \
                and (len(line) == 2 or line[2] == " "):
            tag = line[:2]
            fields.setdefault(tag, []).append(line[3:].rstrip())
            continue
        tag = None

    if "PY" not in fields or not fields["PY"][0].strip():
        diagnostics.append((first_line_no, "record missing PY tag"))
        return
    pub_year = _year_or_diag(fields["PY"][0], first_line_no, diagnostics)
    if pub_year is None:
        return

    record_id = _record_id("\n".join(record_lines).encode("utf-8"))
    if record_id in seen_ids:
        diagnostics.append(
            (first_line_no, f"duplicate record (content hash {record_id})"))
        return
    seen_ids.add(record_id)

    authors = tuple(a.strip() for a in fields.get("AU", ()) if a.strip())
    title = " ".join(part.strip() for part in fields.get("TI", ()) if part.strip())
    source_title = " ".join(
        part.strip() for part in fields.get("SO", ()) if part.strip())
    doi = normalize_doi(fields["DI"][0]) if fields.get("DI") else None

    raw_refs = []
    for entry in fields.get("CR", ()):
        entry = entry.strip()
        if entry:
            raw_refs.append(RawCitedRef(entry, record_id, len(raw_refs)))

    publications.append(Publication(
        id=record_id,
        title=title,
        authors=authors,
        pub_year=pub_year,
        source_title=source_title,
        doi=doi or None,
        raw_refs=tuple(raw_refs),
    ))


def parse_scopus_csv(data: bytes) -> Corpus:
    """Parse a Scopus CSV export (RFC 4180, header row required).

    The "References" cell splits on "; "; row order is preserved. Rows with
    an unusable Year are rejected into diagnostics.
    """
    text = _decode(data)
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None:
        raise NotScopusFormat("empty input, no header row")
    missing = [col for col in _SCOPUS_REQUIRED if col not in header]
    if missing:
        raise NotScopusFormat(f"missing required columns: {', '.join(missing)}")
    col = {name: header.index(name) for name in header}
    doi_col = col.get("DOI")

    publications: list[Publication] = []
    diagnostics: list[tuple[int, str]] = []
    seen_ids: set[str] = set()

    for row in reader:
        if not any(cell.strip() for cell in row):
            continue
        line_no = reader.line_num

        def cell(name, row=row, col=col):
            idx = col[name]
            return row[idx] if idx < len(row) else ""

        year_cell = cell("Year")
        if not year_cell.strip():
            diagnostics.append((line_no, "row missing Year"))
            continue
        pub_year = _year_or_diag(year_cell, line_no, diagnostics)
        if pub_year is None:
            continue

        doi_cell = row[doi_col] if doi_col is not None and doi_col < len(row) else ""
        key = [cell("Title"), cell("Authors"), year_cell,
               cell("Source title"), doi_cell, cell("References")]
        record_id = _record_id(
            json.dumps(key, separators=(",", ":")).encode("utf-8"))
        if record_id in seen_ids:
            diagnostics.append(
                (line_no, f"duplicate record (content hash {record_id})"))
            continue
        seen_ids.add(record_id)

        authors = tuple(a.strip() for a in cell("Authors").split("; ")
                        if a.strip())
        refs_cell = cell("References").strip()
        raw_refs = []
        if refs_cell:
            for item in refs_cell.split("; "):
                item = item.strip()
                if item:
                    raw_refs.append(RawCitedRef(item, record_id, len(raw_refs)))

        publications.append(Publication(
            id=record_id,
            title=cell("Title").strip(),
            authors=authors,
            pub_year=pub_year,
            source_title=cell("Source title").strip(),
            doi=normalize_doi(doi_cell) or None,
            raw_refs=tuple(raw_refs),
        ))

    return Corpus(tuple(publications), SourceFormat.SCOPUS_CSV,
                  tuple(diagnostics))


def detect_format(data: bytes) -> SourceFormat:
    """Sniff the export flavor.

    WoS wins if a "PT " line appears in the first 100 lines; otherwise the
    input is Scopus CSV if the first line has a "References" header cell.
    """
    try:
        text = _decode(data)
    except UnicodeDecodeError:
        return SourceFormat.UNKNOWN
    lines = text.splitlines()
    if any(line.startswith("PT ") for line in lines[:100]):
        return SourceFormat.WOS_TAGGED
    first = lines[0] if lines else ""
    try:
        cells = next(csv.reader([first]), [])
    except csv.Error:
        cells = []
    if "References" in cells:
        return SourceFormat.SCOPUS_CSV
    return SourceFormat.UNKNOWN
