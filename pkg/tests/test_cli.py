import io

import numpy as np
import pytest

from sdtw_readuntil import read_index, read_mappings
from sdtw_readuntil.cli import main, parse_args
from sdtw_readuntil.formats import write_fasta
from sdtw_readuntil.refindex import write_pore_model

from conftest import random_bases


@pytest.fixture(scope="module")
def workdir(tmp_path_factory, model):
    d = tmp_path_factory.mktemp("cli")
    with open(d / "ref.fa", "w") as fh:
        write_fasta([("chrA", random_bases(3000, 21)), ("chrB", random_bases(2000, 22))], fh)
    with open(d / "model.tsv", "w") as fh:
        write_pore_model(model, fh)
    assert main(["index", "--reference", str(d / "ref.fa"), "--model", str(d / "model.tsv"),
                 "--out", str(d / "ref.sqix")]) == 0
    assert main(["simreads", "--reference", str(d / "ref.fa"), "--model", str(d / "model.tsv"),
                 "--out", str(d / "reads.slow5"), "--truth", str(d / "truth.tsv"),
                 "--n", "40", "--seed", "5", "--noise-sigma", "0.3", "--dup-prob", "0.1"]) == 0
    return d


def test_index_toy_model(tmp_path):
    (tmp_path / "toy.fa").write_text(">t\nACGTACGT\n")
    (tmp_path / "toy.tsv").write_text("A\t1\nC\t2\nG\t3\nT\t4\n")
    assert main(["index", "--reference", str(tmp_path / "toy.fa"), "--model", str(tmp_path / "toy.tsv"),
                 "--out", str(tmp_path / "toy.sqix"), "--scale-factor", "64"]) == 0
    (idx,) = read_index(tmp_path / "toy.sqix")
    assert idx.n_samples == 8 and idx.params.scale_factor == 64


def test_index_multi_record(workdir):
    idxs = read_index(workdir / "ref.sqix")
    assert [(i.name, i.n_samples) for i in idxs] == [("chrA", 2995), ("chrB", 1995)]


def test_missing_model_exit_code(tmp_path, capsys):
    missing = tmp_path / "nope.tsv"
    (tmp_path / "toy.fa").write_text(">t\nACGT\n")
    code = main(["index", "--reference", str(tmp_path / "toy.fa"), "--model", str(missing),
                 "--out", str(tmp_path / "x.sqix")])
    assert code == 2
    assert str(missing) in capsys.readouterr().err


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        main(["map"])
    assert exc.value.code == 2


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nthreads = 4\nbatch-size = 16\nengine = pe-sim\n")
    base = ["map", "--reads", "r", "--index", "i", "--config", str(cfg)]
    args = parse_args(base)
    assert (args.threads, args.batch_size, args.engine) == (4, 16, "pe-sim")
    args = parse_args(base + ["--threads", "2"])
    assert (args.threads, args.batch_size) == (2, 16)


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["map", "--reads", "r", "--index", "i", "--config", str(cfg)]) == 2
    assert "colour" in capsys.readouterr().err


def test_simreads_deterministic(workdir, tmp_path):
    args = ["simreads", "--reference", str(workdir / "ref.fa"), "--model", str(workdir / "model.tsv"),
            "--n", "40", "--seed", "5", "--noise-sigma", "0.3", "--dup-prob", "0.1"]
    assert main(args + ["--out", str(tmp_path / "a.slow5"), "--truth", str(tmp_path / "a.tsv")]) == 0
    assert (tmp_path / "a.slow5").read_bytes() == (workdir / "reads.slow5").read_bytes()
    assert (tmp_path / "a.tsv").read_bytes() == (workdir / "truth.tsv").read_bytes()


def _map(workdir, tmp_path, name, *extra):
    out, summary = tmp_path / f"{name}.tsv", tmp_path / f"{name}.summary"
    code = main(["map", "--reads", str(workdir / "reads.slow5"), "--index", str(workdir / "ref.sqix"),
                 "--out", str(out), "--summary", str(summary), *extra])
    return code, out.read_bytes(), summary.read_text()


def test_map_fixed_vs_pe_sim(workdir, tmp_path):
    _, fixed, _ = _map(workdir, tmp_path, "fixed", "--engine", "fixed")
    _, pe, _ = _map(workdir, tmp_path, "pe", "--engine", "pe-sim")
    a, b = read_mappings(io.StringIO(fixed.decode())), read_mappings(io.StringIO(pe.decode()))
    assert [(r["strand"], r["position_bases"], r["score"]) for r in a] == \
           [(r["strand"], r["position_bases"], r["score"]) for r in b]


def test_map_threads_identical(workdir, tmp_path):
    _, one, _ = _map(workdir, tmp_path, "t1", "--threads", "1")
    _, many, _ = _map(workdir, tmp_path, "t8", "--threads", "8", "--batch-size", "3")
    assert one == many


def test_map_summary(workdir, tmp_path):
    code, out, summary = _map(workdir, tmp_path, "s", "--targets", "chrA:0-1500")
    assert code == 0
    fields = dict(line.split("\t") for line in summary.splitlines())
    assert int(fields["reads"]) == 40
    pct = sum(float(fields[k]) for k in ("time_pct_preprocess", "time_pct_sdtw", "time_pct_other"))
    assert abs(pct - 100) <= 0.1
    decisions = sum(int(fields[f"decision_{d}"]) for d in ("accept", "reject", "unmapped"))
    assert decisions == 40
    assert int(fields["decision_reject"]) > 0


def test_map_accuracy_against_truth(workdir, tmp_path):
    from sdtw_readuntil.simulate import read_truth
    _, out, _ = _map(workdir, tmp_path, "acc", "--engine", "float-banded")
    recs = read_mappings(io.StringIO(out.decode()))
    truth = read_truth(open(workdir / "truth.tsv"))
    hits = sum(r["ref"] == t.ref_name and r["strand"] == t.strand
               and abs(r["position_bases"] - t.position_bases(6)) <= 5 for r, t in zip(recs, truth))
    assert hits >= 38


def test_simulate_trace(workdir, tmp_path):
    out, trace = tmp_path / "lat.tsv", tmp_path / "trace.tsv"
    assert main(["simulate", "--reads", str(workdir / "reads.slow5"), "--index", str(workdir / "ref.sqix"),
                 "--out", str(out), "--trace", str(trace), "--max-reads", "1"]) == 0
    rows = [line.split("\t") for line in out.read_text().splitlines()[1:]]
    assert len(rows) == 4  # two references x two strands
    blocks = trace.read_text().split("# ")[1:]
    for row, block in zip(rows, blocks):
        n, cycles = int(row[3]), int(row[4])
        assert cycles == n + 249
        assert float(row[5]) == pytest.approx(cycles / 100)
        lines = block.splitlines()
        assert lines[1].startswith("#cycle") and len(lines) - 2 == cycles


def test_simulate_sweep_linear(workdir, tmp_path):
    out = tmp_path / "sweep.tsv"
    assert main(["simulate", "--reads", str(workdir / "reads.slow5"), "--index", str(workdir / "ref.sqix"),
                 "--out", str(out), "--max-reads", "1", "--sweep", "10000,20000,40000"]) == 0
    rows = [line.split("\t") for line in out.read_text().splitlines()[1:]]
    n = np.array([float(r[3]) for r in rows])
    lat = np.array([float(r[5]) for r in rows])
    assert sorted(set(n)) == [10000, 20000, 40000]
    r2 = np.corrcoef(n, lat)[0, 1] ** 2
    assert r2 > 0.999


def test_eval_scaling_cli(workdir, tmp_path):
    out = tmp_path / "scaling.tsv"
    assert main(["eval-scaling", "--reference", str(workdir / "ref.fa"), "--model", str(workdir / "model.tsv"),
                 "--n", "30", "--sf-list", "2,32", "--out", str(out)]) == 0
    rows = [line.split("\t") for line in out.read_text().splitlines()]
    assert rows[0][0] == "#scale_factor"
    assert [r[0] for r in rows[1:]] == ["2", "32"]
    assert all(0 <= float(r[1]) <= 100 for r in rows[1:])
