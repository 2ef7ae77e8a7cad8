"""Readers and writers: ASCII SLOW5 (subset), FASTA and the mapping TSV.

Every reader reports malformed input with a 1-based line number.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, List, Optional, TextIO, Tuple

import numpy as np

from .core import RawRead
from .errors import (
    BadHeader,
    EmptySequence,
    FormatError,
    LengthMismatch,
    MalformedLine,
    NoRecords,
    NonNumericSignal,
)
from .mapping import FIXED_ENGINES, MappingRecord

SLOW5_VERSION = "0.2.0"
SLOW5_COLUMNS = (
    "read_id", "read_group", "digitisation", "offset",
    "range", "sampling_rate", "len_raw_signal", "raw_signal",
)
SLOW5_TYPES = ("char*", "uint32_t", "double", "double", "double", "double", "uint64_t", "int16_t*")

MAPPING_COLUMNS = (
    "read_id", "strand", "position_bases", "score", "mapq",
    "decision", "overflow", "engine", "ref",
)


@dataclass
class Slow5Header:
    version: str = SLOW5_VERSION
    attributes: List[str] = field(default_factory=list)  # raw '#'/'@' lines other than version/schema
    columns: Tuple[str, ...] = SLOW5_COLUMNS
    types: Tuple[str, ...] = SLOW5_TYPES

    @property
    def aux_columns(self) -> Tuple[str, ...]:
        return self.columns[len(SLOW5_COLUMNS):]


class Slow5Reader:
    """Lazy ASCII SLOW5 reader; ``header`` is available once iteration starts."""

    def __init__(self, stream: TextIO):
        self._stream = stream
        self.header: Optional[Slow5Header] = None

    def _parse_header(self, lines):
        header = Slow5Header(version="", attributes=[])
        types = None
        for lineno, line in lines:
            if line.startswith("#slow5_version"):
                header.version = line.split("\t")[1] if "\t" in line else ""
            elif line.startswith("#read_id"):
                cols = tuple(line[1:].split("\t"))
                if cols[: len(SLOW5_COLUMNS)] != SLOW5_COLUMNS:
                    raise BadHeader(f"column schema must start with {'/'.join(SLOW5_COLUMNS)}", lineno)
                if types is not None and len(types) != len(cols):
                    raise BadHeader("type line and column line differ in length", lineno)
                header.columns = cols
                header.types = types or SLOW5_TYPES + ("char*",) * (len(cols) - len(SLOW5_COLUMNS))
                return header
            elif line.startswith("#char*"):
                types = tuple(line[1:].split("\t"))
            elif line.startswith(("#", "@")):
                header.attributes.append(line)
            else:
                raise BadHeader("record found before the #read_id column line", lineno)
        raise BadHeader("missing #read_id column line")

    def __iter__(self) -> Iterator[RawRead]:
        lines = ((n, raw.rstrip("\r\n")) for n, raw in enumerate(self._stream, start=1))
        self.header = self._parse_header(lines)
        ncol = len(self.header.columns)
        aux = self.header.aux_columns
        for lineno, line in lines:
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != ncol:
                raise MalformedLine(f"expected {ncol} columns, got {len(fields)}", lineno)
            try:
                group = int(fields[1])
                dig, off, rng, rate = (float(v) for v in fields[2:6])
                declared = int(fields[6])
            except ValueError as exc:
                raise MalformedLine(f"bad numeric field: {exc}", lineno) from None
            try:
                raw = np.array(fields[7].split(","), dtype=np.int64) if fields[7] else np.empty(0, np.int64)
            except ValueError:
                raise NonNumericSignal("raw_signal must be comma-separated integers", lineno) from None
            if raw.size != declared:
                raise LengthMismatch(f"len_raw_signal={declared} but {raw.size} samples present", lineno)
            if raw.size and (raw.min() < -32768 or raw.max() > 32767):
                raise NonNumericSignal("raw_signal value outside int16 range", lineno)
            try:
                yield RawRead(fields[0], raw, dig, off, rng, rate, group, dict(zip(aux, fields[8:])))
            except ValueError as exc:
                raise MalformedLine(str(exc), lineno) from None


def read_slow5(stream: TextIO) -> Iterator[RawRead]:
    """Yield one :class:`RawRead` per record without loading the whole file."""
    return iter(Slow5Reader(stream))


def _fmt_float(x: float) -> str:
    return repr(float(x))


def write_slow5(reads: Iterable[RawRead], sink: TextIO, header: Optional[Slow5Header] = None):
    """Write an ASCII SLOW5 file; auxiliary columns come from ``header``."""
    header = header or Slow5Header()
    sink.write(f"#slow5_version\t{header.version or SLOW5_VERSION}\n")
    attrs = list(header.attributes)
    if not any(a.startswith("#num_read_groups") for a in attrs):
        attrs.insert(0, "#num_read_groups\t1")
    for a in attrs:
        sink.write(a + "\n")
    sink.write("#" + "\t".join(header.types) + "\n")
    sink.write("#" + "\t".join(header.columns) + "\n")
    aux = header.aux_columns
    for r in reads:
        row = [
            r.read_id, str(r.read_group), _fmt_float(r.digitisation), _fmt_float(r.offset),
            _fmt_float(r.range_pa), _fmt_float(r.sampling_rate), str(r.raw.size),
            ",".join(map(str, r.raw.tolist())),
        ]
        row.extend(str(r.aux.get(c, ".")) for c in aux)
        sink.write("\t".join(row) + "\n")


def read_fasta(stream: TextIO) -> List[Tuple[str, str]]:
    """Return ``[(name, SEQUENCE), ...]``; names stop at the first whitespace."""
    records = []
    name = None
    chunks: List[str] = []
    header_line = 0

    def flush():
        seq = "".join(chunks).upper()
        if not seq:
            raise EmptySequence(f"record {name!r} has no sequence", header_line)
        records.append((name, seq))

    for lineno, line in enumerate(stream, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith(">"):
            if name is not None:
                flush()
            parts = line[1:].split()
            name = parts[0] if parts else ""
            chunks = []
            header_line = lineno
        elif name is None:
            raise FormatError("sequence data before the first '>' header", lineno)
        else:
            chunks.append("".join(line.split()))
    if name is None:
        raise NoRecords("no FASTA records found")
    flush()
    return records


def write_fasta(records: Iterable[Tuple[str, str]], sink: TextIO, width: int = 60):
    for name, seq in records:
        sink.write(f">{name}\n")
        for i in range(0, len(seq), width):
            sink.write(seq[i : i + width] + "\n")


def _fmt_score(score, engine: str) -> str:
    if score is None:
        return "*"
    return str(int(score)) if engine in FIXED_ENGINES else repr(float(score))


def write_mappings(records: Iterable[MappingRecord], sink: TextIO):
    """One TAB-separated line per record, in the order given."""
    sink.write("#" + "\t".join(MAPPING_COLUMNS) + "\n")
    for r in records:
        mapped = r.mapped
        sink.write("\t".join((
            r.read_id,
            {"forward": "+", "reverse": "-"}.get(r.strand, "*"),
            str(r.position_bases) if mapped else "*",
            _fmt_score(r.score, r.engine),
            str(r.mapq),
            r.decision,
            "1" if r.overflow else "0",
            r.engine,
            r.ref_name if mapped else "*",
        )) + "\n")


def read_mappings(stream: TextIO) -> List[dict]:
    """Parse a mapping TSV back into dictionaries keyed by column name."""
    out = []
    for lineno, line in enumerate(stream, start=1):
        line = line.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != len(MAPPING_COLUMNS):
            raise MalformedLine(f"expected {len(MAPPING_COLUMNS)} columns, got {len(fields)}", lineno)
        rec = dict(zip(MAPPING_COLUMNS, fields))
        try:
            rec["strand"] = {"+": "forward", "-": "reverse", "*": None}[rec["strand"]]
            rec["position_bases"] = None if rec["position_bases"] == "*" else int(rec["position_bases"])
            if rec["score"] == "*":
                rec["score"] = None
            elif rec["engine"] in FIXED_ENGINES:
                rec["score"] = int(rec["score"])
            else:
                rec["score"] = float(rec["score"])
            rec["mapq"] = int(rec["mapq"])
            rec["overflow"] = {"0": False, "1": True}[rec["overflow"]]
        except (KeyError, ValueError) as exc:
            raise MalformedLine(f"bad field: {exc}", lineno) from None
        rec["ref"] = None if rec["ref"] == "*" else rec["ref"]
        out.append(rec)
    return out
