"""Cited-reference string parsing, field normalization, and similarity.

Raw strings like ``Bornmann L, 2013, J INFORMETR, V7, P84, DOI 10.1016/...``
are split on ", " and the pieces classified by shape. Parsing never fails:
in the worst case only the leading author token is populated.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

from .corpus import YEAR_MAX, YEAR_MIN, Corpus, normalize_doi

RawRefId = tuple[str, int]

_YEAR_RE = re.compile(r"\d{4}")
_VOLUME_RE = re.compile(r"V\d+")
# Pages need at least one digit: a letters-only token like "PNAS" is a venue.
_PAGE_RE = re.compile(r"P[A-Za-z0-9]*\d[A-Za-z0-9]*")


@dataclass(frozen=True)
class ParsedCitedRef:
    """Structured view of one cited-reference string."""

    raw_id: RawRefId
    raw: str
    first_author: str
    rpy: int | None = None
    source: str | None = None
    volume: str | None = None
    page: str | None = None
    doi: str | None = None


def normalize_field(text: str) -> str:
    """Uppercase, fold diacritics, strip punctuation, collapse whitespace.

    Idempotent: applying it to its own output is the identity.
    """
    folded = unicodedata.normalize("NFKD", text)
    folded = "".join(ch for ch in folded if not unicodedata.combining(ch))
    folded = folded.upper()
    folded = "".join(
        ch for ch in folded if not unicodedata.category(ch).startswith("P"))
    return " ".join(folded.split())


def parse_cr_string(raw: str, raw_id: RawRefId = ("", 0)) -> ParsedCitedRef:
    """Parse one cited-reference string into fields.

    Token roles, scanning left to right after the author token: the first
    in-range 4-digit token is the referenced publication year, "V<digits>"
    the volume, "P…" with a digit the page, "DOI …" the DOI. The source is
    the first token after the year that no other rule claimed.
    """
    tokens = raw.split(", ")
    first_author = normalize_field(tokens[0])
    rpy = source = volume = page = doi = None
    year_idx = None
    claimed = [True] + [False] * (len(tokens) - 1)

    for i in range(1, len(tokens)):
        tok = tokens[i].strip()
        if doi is None and tok.upper().startswith("DOI "):
            doi = normalize_doi(tok[4:]) or None
            claimed[i] = True
        elif rpy is None and _YEAR_RE.fullmatch(tok) \
                and YEAR_MIN <= int(tok) <= YEAR_MAX:
            rpy = int(tok)
            year_idx = i
            claimed[i] = True
        elif volume is None and _VOLUME_RE.fullmatch(tok):
            volume = tok[1:]
            claimed[i] = True
        elif page is None and _PAGE_RE.fullmatch(tok):
            page = tok[1:]
            claimed[i] = True

    if year_idx is not None:
        for i in range(year_idx + 1, len(tokens)):
            if not claimed[i]:
                source = normalize_field(tokens[i]) or None
                break

    return ParsedCitedRef(raw_id=raw_id, raw=raw, first_author=first_author,
                          rpy=rpy, source=source, volume=volume, page=page,
                          doi=doi)


def parse_corpus_refs(corpus: Corpus) -> tuple[ParsedCitedRef, ...]:
    """Parse every raw cited reference of a corpus, in corpus order."""
    return tuple(
        parse_cr_string(ref.raw, (ref.citing_id, ref.position))
        for pub in corpus.publications for ref in pub.raw_refs)


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (two-row dynamic program)."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1,
                           cur[j - 1] + 1,
                           prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def levenshtein_sim(a: str, b: str) -> float:
    """1 - distance / max length; two empty strings count as identical."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _string_part(a: str | None, b: str | None) -> float:
    if a is None and b is None:
        return 0.5
    if a is None or b is None:
        return 0.0
    return levenshtein_sim(a, b)

def _eq_part(a: str | None, b: str | None) -> float:
    if a is None and b is None:
        return 0.5
    if a is None or b is None:
        return 0.0
    return 1.0 if a == b else 0.0


def ref_similarity(a: ParsedCitedRef, b: ParsedCitedRef) -> float:
    """Score two parsed references in [0, 1]; symmetric, 1.0 on identity.

    Matching DOIs decide outright, years more than one apart veto, and
    otherwise author/source edit similarity is blended with volume and page
    equality. A field absent on both sides is weak evidence of sameness and
    contributes half its weight; absent on one side only, nothing.
    """
    if a.doi is not None and b.doi is not None:
        return 1.0 if a.doi == b.doi else 0.0
    fields_a = (a.first_author, a.rpy, a.source, a.volume, a.page, a.doi)
    fields_b = (b.first_author, b.rpy, b.source, b.volume, b.page, b.doi)
    if fields_a == fields_b:
        return 1.0
    if a.rpy is not None and b.rpy is not None and abs(a.rpy - b.rpy) > 1:
        return 0.0
    return (0.4 * _string_part(a.first_author, b.first_author)
            + 0.3 * _string_part(a.source, b.source)
            + 0.15 * _eq_part(a.volume, b.volume)
            + 0.15 * _eq_part(a.page, b.page))
