"""k-mer pore models and synthetic reference signals.

A reference is turned into a signal by sliding a ``k``-base window along it
and looking up the expected current level of each k-mer. Both strands are
synthesized, z-scored independently and quantized; the result is a
:class:`SignalIndex` which can be persisted in a small binary file.

Index file layout (all little-endian)::

    b"SQIX"  u16 version  u32 n_records
    per record:
        u16 name_len, name (utf-8)
        u32 scale_factor, u8 sample_bits, u8 accum_bits, u8 overflow_mode (0 wrap, 1 saturate), u8 k
        u64 N
        f64 forward_mean, forward_std, reverse_mean, reverse_std
        f64[N] forward_norm, f64[N] reverse_norm
        i16[N] forward_fixed, i16[N] reverse_fixed

A JSON sidecar ``<path>.json`` repeats the per-record statistics for humans.
"""
from __future__ import annotations

import io
import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .core import FixedPointParams, quantize
from .errors import (
    BadIndexFile,
    InconsistentK,
    InvalidBase,
    InvalidParams,
    MalformedLine,
    MissingKmer,
    SequenceTooShort,
    ZeroVariance,
)

BASES = "ACGT"
_CODE = np.full(256, -1, dtype=np.int8)
for _i, _b in enumerate(BASES):
    _CODE[ord(_b)] = _i
_COMPLEMENT = str.maketrans("ACGT", "TGCA")

INDEX_MAGIC = b"SQIX"
INDEX_VERSION = 1


def kmer_rank(kmer: str) -> int:
    r = 0
    for b in kmer:
        r = 4 * r + BASES.index(b)
    return r


def all_kmers(k: int):
    """All 4**k k-mers in rank order (A < C < G < T, leftmost base most significant)."""
    out = [""]
    for _ in range(k):
        out = [s + b for s in out for b in BASES]
    return out


@dataclass(frozen=True, eq=False)
class PoreModel:
    """Expected current level per k-mer.

    ``level_mean`` and ``level_stdv`` are arrays of length ``4**k`` indexed by
    :func:`kmer_rank`.
    """

    k: int
    level_mean: np.ndarray
    level_stdv: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParams("k must be >= 1")
        mean = np.asarray(self.level_mean, dtype=np.float64).copy()
        if mean.shape != (4**self.k,):
            raise MissingKmer(f"expected {4**self.k} levels for k={self.k}, got {mean.size}")
        mean.flags.writeable = False
        object.__setattr__(self, "level_mean", mean)
        if self.level_stdv is not None:
            stdv = np.asarray(self.level_stdv, dtype=np.float64).copy()
            stdv.flags.writeable = False
            object.__setattr__(self, "level_stdv", stdv)

    @property
    def levels(self) -> dict:
        return dict(zip(all_kmers(self.k), self.level_mean.tolist()))

    def level(self, kmer: str) -> float:
        return float(self.level_mean[kmer_rank(kmer)])


def _as_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return source.decode("utf-8")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8") if isinstance(data, bytes) else data


def parse_pore_model(source) -> PoreModel:
    """Parse a TAB-separated k-mer model.

    ``source`` may be bytes, str or a readable stream. Lines starting with
    ``#`` are comments and a ``kmer<TAB>level_mean...`` column header is
    skipped. Data lines are ``kmer<TAB>level_mean[<TAB>level_stdv...]``.
    """
    k = None
    means = {}
    stdvs = {}
    for lineno, line in enumerate(_as_text(source).splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.rstrip("\r\n").split("\t")
        if fields[0] == "kmer":
            continue
        if len(fields) < 2:
            raise MalformedLine(f"expected kmer<TAB>level_mean, got {line!r}", lineno)
        kmer = fields[0]
        if not kmer or any(b not in BASES for b in kmer):
            raise MalformedLine(f"invalid k-mer {kmer!r}", lineno)
        if k is None:
            k = len(kmer)
        elif len(kmer) != k:
            raise InconsistentK(f"k-mer {kmer!r} has length {len(kmer)}, expected {k}", lineno)
        if kmer in means:
            raise MalformedLine(f"duplicate k-mer {kmer!r}", lineno)
        try:
            means[kmer] = float(fields[1])
            if len(fields) > 2:
                stdvs[kmer] = float(fields[2])
        except ValueError:
            raise MalformedLine(f"non-numeric level in {line!r}", lineno) from None
        if not np.isfinite(means[kmer]):
            raise MalformedLine(f"non-finite level for {kmer!r}", lineno)
    if k is None:
        raise MissingKmer("pore model contains no k-mers")
    kmers = all_kmers(k)
    missing = [km for km in kmers if km not in means]
    if missing:
        raise MissingKmer(f"{len(missing)} of {4**k} k-mers missing (e.g. {missing[0]})")
    stdv = np.array([stdvs[km] for km in kmers]) if len(stdvs) == len(kmers) else None
    return PoreModel(k, np.array([means[km] for km in kmers]), stdv)


def write_pore_model(model: PoreModel, sink):
    sink.write("kmer\tlevel_mean\tlevel_stdv\n")
    stdv = model.level_stdv if model.level_stdv is not None else np.zeros_like(model.level_mean)
    for kmer, m, s in zip(all_kmers(model.k), model.level_mean, stdv):
        sink.write(f"{kmer}\t{float(m)!r}\t{float(s)!r}\n")


def synthetic_pore_model(k: int = 6, seed: int = 0, mean: float = 90.0, sd: float = 12.0) -> PoreModel:
    """Random pore model with R9.4-like level statistics (pA)."""
    rng = np.random.default_rng(seed)
    levels = rng.normal(mean, sd, 4**k)
    stdv = rng.uniform(1.0, 3.0, 4**k)
    return PoreModel(k, levels, stdv)


def normalize_bases(bases: str) -> str:
    """Uppercase, map U to T, and reject anything outside ACGT."""
    s = bases.upper().replace("U", "T")
    codes = _CODE[np.frombuffer(s.encode("ascii", errors="replace"), dtype=np.uint8)]
    if (codes < 0).any():
        pos = int(np.argmax(codes < 0))
        raise InvalidBase(f"invalid base {bases[pos]!r} at position {pos}")
    return s


def reverse_complement(bases: str) -> str:
    return normalize_bases(bases).translate(_COMPLEMENT)[::-1]


def kmer_ranks(bases: str, k: int) -> np.ndarray:
    """Rank of every k-mer window of ``bases`` (length ``L - k + 1``)."""
    s = normalize_bases(bases)
    if len(s) < k:
        raise SequenceTooShort(f"sequence of length {len(s)} is shorter than k={k}")
    codes = _CODE[np.frombuffer(s.encode("ascii"), dtype=np.uint8)].astype(np.int64)
    n = len(s) - k + 1
    ranks = np.zeros(n, dtype=np.int64)
    for offset in range(k):
        ranks = ranks * 4 + codes[offset : offset + n]
    return ranks


def synthesize_signal(bases: str, model: PoreModel) -> np.ndarray:
    """Expected level of each k-mer window, ``len(bases) - k + 1`` values."""
    return model.level_mean[kmer_ranks(bases, model.k)]


@dataclass(frozen=True, eq=False)
class SignalIndex:
    name: str
    k: int
    params: FixedPointParams
    forward_norm: np.ndarray
    reverse_norm: np.ndarray
    forward_fixed: np.ndarray
    reverse_fixed: np.ndarray
    forward_mean: float
    forward_std: float
    reverse_mean: float
    reverse_std: float

    def __post_init__(self):
        for name, dtype in (("forward_norm", np.float64), ("reverse_norm", np.float64),
                            ("forward_fixed", np.int16), ("reverse_fixed", np.int16)):
            a = np.asarray(getattr(self, name), dtype=dtype).copy()
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        n = self.forward_norm.size
        if not (self.reverse_norm.size == self.forward_fixed.size == self.reverse_fixed.size == n):
            raise InvalidParams("forward and reverse signals must have equal length")

    @property
    def n_samples(self) -> int:
        """Signal samples per strand, ``L - k + 1``."""
        return int(self.forward_norm.size)

    @property
    def base_length(self) -> int:
        return self.n_samples + self.k - 1

    @property
    def search_space(self) -> int:
        return 2 * self.n_samples

    def strand_signal(self, strand: str, fixed: bool) -> np.ndarray:
        if strand == "forward":
            return self.forward_fixed if fixed else self.forward_norm
        if strand == "reverse":
            return self.reverse_fixed if fixed else self.reverse_norm
        raise InvalidParams(f"unknown strand {strand!r}")

    def with_params(self, params: FixedPointParams) -> "SignalIndex":
        """Same normalized signals re-quantized under ``params``."""
        return SignalIndex(
            self.name, self.k, params, self.forward_norm, self.reverse_norm,
            quantize(self.forward_norm, params), quantize(self.reverse_norm, params),
            self.forward_mean, self.forward_std, self.reverse_mean, self.reverse_std,
        )

    def stats(self) -> dict:
        return {
            "name": self.name,
            "k": self.k,
            "n_samples": self.n_samples,
            "base_length": self.base_length,
            "scale_factor": self.params.scale_factor,
            "forward_mean": self.forward_mean,
            "forward_std": self.forward_std,
            "reverse_mean": self.reverse_mean,
            "reverse_std": self.reverse_std,
        }


def _normalize_strand(signal: np.ndarray, strand: str):
    mean = float(signal.mean())
    std = float(signal.std())
    if not std > 0 or np.all(signal == signal[0]):
        raise ZeroVariance(f"{strand} reference signal is flat")
    return (signal - mean) / std, mean, std


def build_index(bases: str, model: PoreModel, params: FixedPointParams = FixedPointParams(),
                name: str = "ref") -> SignalIndex:
    """Synthesize, z-score and quantize both strands of ``bases``."""
    fwd = synthesize_signal(bases, model)
    rev = synthesize_signal(reverse_complement(bases), model)
    if fwd.size < 2:
        raise SequenceTooShort("reference must yield at least two signal samples")
    fwd_norm, fwd_mean, fwd_std = _normalize_strand(fwd, "forward")
    rev_norm, rev_mean, rev_std = _normalize_strand(rev, "reverse")
    return SignalIndex(
        name, model.k, params, fwd_norm, rev_norm,
        quantize(fwd_norm, params), quantize(rev_norm, params),
        fwd_mean, fwd_std, rev_mean, rev_std,
    )


_REC = struct.Struct("<IBBBBQdddd")


def dumps_index(indexes: Iterable[SignalIndex]) -> bytes:
    indexes = list(indexes)
    out = io.BytesIO()
    out.write(INDEX_MAGIC)
    out.write(struct.pack("<HI", INDEX_VERSION, len(indexes)))
    for idx in indexes:
        name = idx.name.encode("utf-8")
        out.write(struct.pack("<H", len(name)))
        out.write(name)
        p = idx.params
        out.write(_REC.pack(p.scale_factor, p.sample_bits, p.accum_bits,
                            0 if p.overflow_mode == "wrap" else 1, idx.k, idx.n_samples,
                            idx.forward_mean, idx.forward_std, idx.reverse_mean, idx.reverse_std))
        for a, dtype in ((idx.forward_norm, "<f8"), (idx.reverse_norm, "<f8"),
                         (idx.forward_fixed, "<i2"), (idx.reverse_fixed, "<i2")):
            out.write(np.asarray(a, dtype=dtype).tobytes())
    return out.getvalue()


def loads_index(data: bytes) -> list:
    buf = memoryview(data)
    if bytes(buf[:4]) != INDEX_MAGIC:
        raise BadIndexFile("not an index file (bad magic)")
    try:
        version, count = struct.unpack_from("<HI", buf, 4)
        if version != INDEX_VERSION:
            raise BadIndexFile(f"unsupported index version {version}")
        pos = 10
        out = []
        for _ in range(count):
            (name_len,) = struct.unpack_from("<H", buf, pos)
            pos += 2
            name = bytes(buf[pos : pos + name_len]).decode("utf-8")
            pos += name_len
            sf, sbits, abits, mode, k, n, fm, fs, rm, rs = _REC.unpack_from(buf, pos)
            pos += _REC.size
            arrays = []
            for dtype, width in (("<f8", 8), ("<f8", 8), ("<i2", 2), ("<i2", 2)):
                nbytes = n * width
                if pos + nbytes > len(buf):
                    raise BadIndexFile("truncated index file")
                arrays.append(np.frombuffer(buf[pos : pos + nbytes], dtype=dtype))
                pos += nbytes
            params = FixedPointParams(sf, sbits, abits, "wrap" if mode == 0 else "saturate")
            out.append(SignalIndex(name, k, params, *arrays, fm, fs, rm, rs))
    except struct.error as exc:
        raise BadIndexFile(f"truncated index file: {exc}") from None
    if pos != len(buf):
        raise BadIndexFile("trailing bytes after last index record")
    return out


def write_index(path, indexes: Iterable[SignalIndex]):
    """Write ``indexes`` to ``path`` plus a ``<path>.json`` statistics sidecar."""
    indexes = list(indexes)
    path = Path(path)
    path.write_bytes(dumps_index(indexes))
    sidecar = {"format": "SQIX", "version": INDEX_VERSION, "records": [i.stats() for i in indexes]}
    Path(str(path) + ".json").write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")


def read_index(path) -> list:
    return loads_index(Path(path).read_bytes())
