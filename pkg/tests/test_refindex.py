import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sdtw_readuntil import (
    FixedPointParams,
    build_index,
    parse_pore_model,
    quantize,
    read_index,
    reverse_complement,
    synthesize_signal,
    write_index,
    zscore_normalize,
)
from sdtw_readuntil.errors import (
    BadIndexFile,
    InconsistentK,
    InvalidBase,
    MalformedLine,
    MissingKmer,
    SequenceTooShort,
    ZeroVariance,
)
from sdtw_readuntil.refindex import all_kmers, dumps_index, loads_index, write_pore_model

from conftest import random_bases

TOY = b"A\t1\nC\t2\nG\t3\nT\t4\n"


def test_parse_minimal_model():
    m = parse_pore_model(TOY)
    assert m.k == 1
    assert m.levels == {"A": 1.0, "C": 2.0, "G": 3.0, "T": 4.0}


def test_parse_model_with_comments_and_header():
    text = "# a comment\nkmer\tlevel_mean\tlevel_stdv\n" + "".join(
        f"{k}\t{i}.5\t1.0\n" for i, k in enumerate(all_kmers(2)))
    m = parse_pore_model(io.StringIO(text))
    assert m.k == 2 and len(m.levels) == 16
    assert m.level("CA") == 4.5
    assert m.level_stdv is not None


def test_parse_k6_model_round_trip(model):
    buf = io.StringIO()
    write_pore_model(model, buf)
    m = parse_pore_model(buf.getvalue().encode())
    assert m.k == 6 and len(m.levels) == 4096
    np.testing.assert_array_equal(m.level_mean, model.level_mean)


def test_parse_missing_kmer(model):
    buf = io.StringIO()
    write_pore_model(model, buf)
    lines = [ln for ln in buf.getvalue().splitlines() if not ln.startswith("TTTTTT")]
    with pytest.raises(MissingKmer, match="TTTTTT"):
        parse_pore_model("\n".join(lines))


@pytest.mark.parametrize("text, err", [
    ("A\t1\nC\tx\nG\t3\nT\t4\n", MalformedLine),
    ("A\n", MalformedLine),
    ("A\t1\nCC\t2\n", InconsistentK),
    ("A\t1\nN\t2\n", MalformedLine),
    ("# only comments\n", MissingKmer),
])
def test_parse_model_errors(text, err):
    with pytest.raises(err):
        parse_pore_model(text)


def test_parse_error_reports_line():
    with pytest.raises(MalformedLine, match="line 2"):
        parse_pore_model("A\t1\nC\tx\n")


@pytest.mark.parametrize("seq, rc", [("ACGT", "ACGT"), ("AAAC", "GTTT"), ("acgu", "ACGT")])
def test_reverse_complement_examples(seq, rc):
    assert reverse_complement(seq) == rc


def test_reverse_complement_rejects_ambiguity():
    with pytest.raises(InvalidBase):
        reverse_complement("ACNT")


@given(st.text(alphabet="ACGT", max_size=1000))
def test_reverse_complement_involution(s):
    assert reverse_complement(reverse_complement(s)) == s


def test_synthesize_examples(model):
    toy = parse_pore_model(TOY)
    assert synthesize_signal("ACG", toy).tolist() == [1, 2, 3]
    assert synthesize_signal(random_bases(29_903, 1), model).size == 29_898
    flat = parse_pore_model("".join(f"{k}\t7\n" for k in all_kmers(2)))
    assert set(synthesize_signal(random_bases(50, 2), flat).tolist()) == {7.0}
    with pytest.raises(SequenceTooShort):
        synthesize_signal("ACGTA", model)


def test_synthesize_matches_lookup(model):
    bases = random_bases(300, 4)
    sig = synthesize_signal(bases, model)
    assert sig.tolist() == [model.levels[bases[i:i + 6]] for i in range(len(bases) - 5)]


def test_build_index_toy():
    idx = build_index("ACGTACGT", parse_pore_model(TOY))
    assert idx.forward_fixed.size == idx.reverse_fixed.size == 8
    assert idx.base_length == 8


def test_build_index_definition(model):
    bases = random_bases(2000, 5)
    fp = FixedPointParams(64)
    idx = build_index(bases, model, fp)
    fwd = zscore_normalize(synthesize_signal(bases, model))
    rev = zscore_normalize(synthesize_signal(reverse_complement(bases), model))
    np.testing.assert_array_equal(idx.forward_fixed, quantize(fwd, fp))
    np.testing.assert_array_equal(idx.reverse_fixed, quantize(rev, fp))
    assert idx.forward_mean == pytest.approx(synthesize_signal(bases, model).mean())


def test_build_index_sars_cov_2_length(model):
    idx = build_index(random_bases(29_903, 11), model)
    assert idx.n_samples == 29_898
    assert idx.search_space == 59_796


def test_build_index_flat_reference():
    flat = parse_pore_model("A\t1\nC\t1\nG\t1\nT\t1\n")
    with pytest.raises(ZeroVariance):
        build_index("ACGTAC", flat)


def test_index_determinism(model):
    bases = random_bases(3000, 6)
    assert dumps_index([build_index(bases, model)]) == dumps_index([build_index(bases, model)])


def test_strand_symmetry(model):
    bases = random_bases(3000, 8)
    a = build_index(bases, model)
    b = build_index(reverse_complement(bases), model)
    np.testing.assert_array_equal(a.forward_fixed, b.reverse_fixed)
    np.testing.assert_array_equal(a.reverse_fixed, b.forward_fixed)


def test_index_file_round_trip(tmp_path, model):
    fp = FixedPointParams(16, accum_bits=16, overflow_mode="saturate")
    idxs = [build_index(random_bases(500, s), model, fp, f"chr{s}") for s in range(3)]
    path = tmp_path / "ref.sqix"
    write_index(path, idxs)
    assert (tmp_path / "ref.sqix.json").exists()
    back = read_index(path)
    assert [b.name for b in back] == ["chr0", "chr1", "chr2"]
    for a, b in zip(idxs, back):
        assert a.params == b.params and a.k == b.k
        np.testing.assert_array_equal(a.forward_fixed, b.forward_fixed)
        np.testing.assert_array_equal(a.reverse_norm, b.reverse_norm)


@pytest.mark.parametrize("mutate", [
    lambda d: b"XXXX" + d[4:],
    lambda d: d[:-3],
    lambda d: d[:4] + b"\x09\x00" + d[6:],
])
def test_bad_index_file(index, mutate):
    with pytest.raises(BadIndexFile):
        loads_index(mutate(dumps_index([index])))
