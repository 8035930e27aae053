"""Two-field inverted index over retrieval units (whole cases or passages).

The body field holds normalized text terms; the statute field holds opaque
"statute_id#section" terms built from passage annotations (document-level
indexes take the union over a case's passages). The index is immutable
once built and safe for concurrent querying.

On-disk layout (single binary file, see README for details):

    magic line  b"LEXCOURT-IDX v1\\n"
    8-byte little-endian length of the JSON manifest, then the manifest
        (granularity, pipeline config, unit table, per-field term
        dictionary [term, df, ctf] and total term counts, annotations)
    postings block: for each field in ("body", "statute") and each term in
        manifest order, df pairs of little-endian uint32 (unit_id, tf)
"""

from __future__ import annotations

import json
import struct
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from . import statutes as statutes_mod
from .corpus import Collection
from .errors import IndexFormatError, ValidationError
from .statutes import PassageAnnotations
from .textproc import PipelineConfig, analyze

MAGIC = b"LEXCOURT-IDX v1\n"
FIELDS = ("body", "statute")
GRANULARITIES = ("document", "passage")

_POSTING = struct.Struct("<II")


@dataclass(frozen=True)
class RetrievalUnit:
    unit_id: int
    case_id: str
    passage_index: int | None  # None for document-level units
    body_len: int
    statute_len: int

    @property
    def field_lengths(self) -> dict[str, int]:
        return {"body": self.body_len, "statute": self.statute_len}

    def field_len(self, field: str) -> int:
        _check_field(field)
        return self.body_len if field == "body" else self.statute_len


def _check_field(field: str) -> None:
    if field not in FIELDS:
        raise ValueError(f"unknown field {field!r}, expected one of {FIELDS}")


class InvertedIndex:
    def __init__(
        self,
        granularity: str,
        pipeline: PipelineConfig,
        units: list[RetrievalUnit],
        postings: dict[str, dict[str, list[tuple[int, int]]]],
        annotations: PassageAnnotations | None = None,
    ):
        self.granularity = granularity
        self.pipeline = pipeline
        self.units = units
        self._postings = postings
        self.annotations = annotations
        self._totals = {
            field: sum(u.field_len(field) for u in units) for field in FIELDS
        }
        self._ctf = {
            field: {t: sum(tf for _, tf in plist) for t, plist in postings[field].items()}
            for field in FIELDS
        }
        self._lens = {
            "body": [u.body_len for u in units],
            "statute": [u.statute_len for u in units],
        }

    @property
    def n_units(self) -> int:
        return len(self.units)

    def total_terms(self, field: str) -> int:
        _check_field(field)
        return self._totals[field]

    def avg_len(self, field: str) -> float:
        _check_field(field)
        return self._totals[field] / len(self.units)

    def field_lens(self, field: str) -> list[int]:
        """Per-unit field lengths, indexed by unit_id."""
        _check_field(field)
        return self._lens[field]

    def df(self, field: str, term: str) -> int:
        _check_field(field)
        return len(self._postings[field].get(term, ()))

    def ctf(self, field: str, term: str) -> int:
        _check_field(field)
        return self._ctf[field].get(term, 0)

    def lookup(self, field: str, term: str) -> list[tuple[int, int]]:
        """Sorted (unit_id, tf) postings; empty for unknown terms."""
        _check_field(field)
        return self._postings[field].get(term, [])

    def vocabulary(self, field: str) -> list[str]:
        _check_field(field)
        return sorted(self._postings[field])


def lookup(index: InvertedIndex, field: str, term: str) -> list[tuple[int, int]]:
    return index.lookup(field, term)


def build_index(
    collection: Collection,
    annotations: PassageAnnotations | None = None,
    granularity: str = "passage",
    pipeline: PipelineConfig | None = None,
) -> InvertedIndex:
    """Index a collection at the requested granularity.

    Cases are processed in sorted case_id order so unit ids, postings and
    statistics are reproducible. Annotations are required only when the
    statute field will be queried; without them the field is empty.
    """
    if granularity not in GRANULARITIES:
        raise ValueError(f"unknown granularity {granularity!r}")
    if not collection.cases:
        raise ValidationError("cannot index an empty collection")
    if pipeline is None:
        pipeline = PipelineConfig()

    units: list[RetrievalUnit] = []
    postings: dict[str, dict[str, list[tuple[int, int]]]] = {f: {} for f in FIELDS}

    def add_unit(case_id: str, passage_index: int | None, body_terms, statute_terms):
        unit_id = len(units)
        units.append(
            RetrievalUnit(
                unit_id=unit_id,
                case_id=case_id,
                passage_index=passage_index,
                body_len=len(body_terms),
                statute_len=len(statute_terms),
            )
        )
        for field, terms in (("body", body_terms), ("statute", statute_terms)):
            for term, tf in sorted(Counter(terms).items()):
                postings[field].setdefault(term, []).append((unit_id, tf))

    for case_id in sorted(collection.cases):
        case = collection.cases[case_id]
        if granularity == "passage":
            for passage in case.passages:
                refs = annotations.refs_for(case_id, passage.passage_index) if annotations else ()
                add_unit(
                    case_id,
                    passage.passage_index,
                    analyze(passage.text, pipeline),
                    [statutes_mod.field_term(r) for r in refs],
                )
        else:
            statute_terms = []
            if annotations:
                for passage in case.passages:
                    statute_terms.extend(
                        statutes_mod.field_term(r)
                        for r in annotations.refs_for(case_id, passage.passage_index)
                    )
            add_unit(case_id, None, analyze(case.raw_text, pipeline), statute_terms)

    return InvertedIndex(granularity, pipeline, units, postings, annotations)


def save_index(index: InvertedIndex, path: str | Path) -> None:
    manifest = {
        "granularity": index.granularity,
        "pipeline": index.pipeline.to_dict(),
        "units": [
            [u.case_id, u.passage_index, u.body_len, u.statute_len] for u in index.units
        ],
        "fields": {
            field: {
                "total_terms": index.total_terms(field),
                "terms": [
                    [term, index.df(field, term), index.ctf(field, term)]
                    for term in index.vocabulary(field)
                ],
            }
            for field in FIELDS
        },
        "annotations": index.annotations.to_json_dict() if index.annotations else None,
    }
    blob = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(blob)))
        fh.write(blob)
        for field in FIELDS:
            for term in index.vocabulary(field):
                for unit_id, tf in index.lookup(field, term):
                    fh.write(_POSTING.pack(unit_id, tf))


def load_index(path: str | Path) -> InvertedIndex:
    data = Path(path).read_bytes()
    if not data.startswith(MAGIC):
        raise IndexFormatError(
            f"{path}: not a {MAGIC.strip().decode()} file (bad or missing header)"
        )
    offset = len(MAGIC)
    try:
        (manifest_len,) = struct.unpack_from("<Q", data, offset)
        offset += 8
        if offset + manifest_len > len(data):
            raise IndexFormatError(f"{path}: truncated manifest")
        manifest = json.loads(data[offset : offset + manifest_len].decode("utf-8"))
        offset += manifest_len

        units = [
            RetrievalUnit(
                unit_id=i,
                case_id=case_id,
                passage_index=passage_index,
                body_len=body_len,
                statute_len=statute_len,
            )
            for i, (case_id, passage_index, body_len, statute_len) in enumerate(
                manifest["units"]
            )
        ]
        postings: dict[str, dict[str, list[tuple[int, int]]]] = {f: {} for f in FIELDS}
        for field in FIELDS:
            for term, df, _ctf in manifest["fields"][field]["terms"]:
                end = offset + df * _POSTING.size
                if end > len(data):
                    raise IndexFormatError(f"{path}: truncated postings block")
                postings[field][term] = list(_POSTING.iter_unpack(data[offset:end]))
                offset = end
        if offset != len(data):
            raise IndexFormatError(f"{path}: trailing bytes after postings block")
        ann = manifest.get("annotations")
        return InvertedIndex(
            granularity=manifest["granularity"],
            pipeline=PipelineConfig.from_dict(manifest["pipeline"]),
            units=units,
            postings=postings,
            annotations=PassageAnnotations.from_json_dict(ann) if ann else None,
        )
    except IndexFormatError:
        raise
    except (struct.error, KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
        raise IndexFormatError(f"{path}: corrupt index file ({exc})") from exc
