"""Command-line interface.

Subcommands: ``index``, ``map``, ``eval-scaling``, ``simreads``, ``simulate``.
Every subcommand accepts ``--config FILE`` with ``key = value`` lines (keys
are long option names, dashes or underscores); explicit flags win.

Exit codes: 0 success, 1 some reads failed, 2 usage or fatal error.
"""
from __future__ import annotations

import argparse
import contextlib
import sys
from typing import List, Optional

import numpy as np

from .core import FixedPointParams
from .errors import SdtwError
from .events import EventDetectionParams, preprocess_read
from .formats import read_fasta, read_slow5, write_mappings, write_slow5
from .mapping import SelectionPolicy, parse_targets
from .pechain import DEFAULT_CHAIN_LENGTH, DEFAULT_CLOCK_HZ, estimate_latency, load, run_to_completion
from .pipeline import BatchMapper
from .refindex import build_index, parse_pore_model, read_index, write_index
from .simulate import SimParams, eval_scaling, simulate_reads, write_truth


class Fatal(Exception):
    """Abort with exit code 2."""


@contextlib.contextmanager
def _open(path: str, mode: str = "r"):
    if path == "-":
        yield sys.stdout if "w" in mode else sys.stdin
        return
    try:
        fh = open(path, mode, newline="" if "w" in mode else None)
    except OSError as exc:
        raise Fatal(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        yield fh


def _int_list(text: str) -> List[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _fixed_point(args, base: Optional[FixedPointParams] = None) -> FixedPointParams:
    base = base or FixedPointParams()
    return FixedPointParams(
        args.scale_factor if args.scale_factor is not None else base.scale_factor,
        base.sample_bits,
        args.accum_bits if args.accum_bits is not None else base.accum_bits,
        args.overflow_mode or base.overflow_mode,
    )


def _event_params(args) -> EventDetectionParams:
    return EventDetectionParams(prefix_trim=args.prefix_trim, query_events=args.query_events)


def _load_references(path):
    with _open(path) as fh:
        return read_fasta(fh)


def _load_model(path):
    with _open(path, "rb") as fh:
        return parse_pore_model(fh)


def cmd_index(args) -> int:
    model = _load_model(args.model)
    fp = _fixed_point(args)
    indexes = [build_index(seq, model, fp, name) for name, seq in _load_references(args.reference)]
    write_index(args.out, indexes)
    for idx in indexes:
        print(f"{idx.name}\tbases={idx.base_length}\tsamples_per_strand={idx.n_samples}"
              f"\tsearch_space={idx.search_space}", file=sys.stderr)
    return 0


def cmd_map(args) -> int:
    indexes = read_index(args.index)
    fp = _fixed_point(args, indexes[0].params)
    policy = SelectionPolicy(
        mode=args.mode,
        target_regions=parse_targets(args.targets) if args.targets else None,
        mapq_threshold=args.mapq_threshold,
    )
    mapper = BatchMapper(indexes, args.engine, fp, _event_params(args), policy,
                         args.threads, args.batch_size, args.chain_length)
    with _open(args.reads) as src, _open(args.out, "w") as out:
        write_mappings(mapper.run(read_slow5(src)), out)
    summary = "\n".join(mapper.summary.lines()) + "\n"
    if args.summary:
        with _open(args.summary, "w") as fh:
            fh.write(summary)
    else:
        sys.stderr.write(summary)
    return 1 if mapper.summary.errors else 0


def cmd_simreads(args) -> int:
    refs = _load_references(args.reference)
    model = _load_model(args.model)
    sim = SimParams(n_reads=args.n, noise_sigma=args.noise_sigma, dup_prob=args.dup_prob)
    reads, truth = simulate_reads(refs, model, args.seed, sim, _event_params(args))
    with _open(args.out, "w") as fh:
        write_slow5(reads, fh)
    if args.truth:
        with _open(args.truth, "w") as fh:
            write_truth(truth, fh)
    return 0


def cmd_eval_scaling(args) -> int:
    refs = _load_references(args.reference)
    model = _load_model(args.model)
    events = _event_params(args)
    sim = SimParams(n_reads=args.n, noise_sigma=args.noise_sigma, dup_prob=args.dup_prob)
    reads, _ = simulate_reads(refs, model, args.seed, sim, events)
    indexes = [build_index(seq, model, FixedPointParams(), name) for name, seq in refs]
    rows = eval_scaling(reads, indexes, args.sf_list, args.accum_bits or 32,
                        args.overflow_mode or "wrap", args.tolerance, events)
    with _open(args.out, "w") as out:
        out.write("#scale_factor\tposition_agreement_pct\tn_reads\tn_overflow\n")
        for r in rows:
            out.write(f"{r.scale_factor}\t{r.agreement_pct:.2f}\t{r.n_reads}\t{r.n_overflow}\n")
    return 0


def _run_chain(query, reference, fp, args, trace_out, label):
    state = load(query, reference, fp, args.chain_length)
    result, trace = run_to_completion(state, trace=trace_out is not None)
    if trace is not None:
        trace_out.write(f"# {label}\n")
        trace.write_tsv(trace_out)
    return result


def cmd_simulate(args) -> int:
    indexes = read_index(args.index)
    fp = _fixed_point(args, indexes[0].params)
    indexes = [i if i.params == fp else i.with_params(fp) for i in indexes]
    events = _event_params(args)
    failed = 0
    with contextlib.ExitStack() as stack:
        out = stack.enter_context(_open(args.out, "w"))
        trace_out = stack.enter_context(_open(args.trace, "w")) if args.trace else None
        src = stack.enter_context(_open(args.reads))
        out.write("#read_id\tref\tstrand\treference_samples\tcycles\tlatency_us\tposition\tscore\toverflow\n")
        for n, read in enumerate(read_slow5(src)):
            if args.max_reads is not None and n >= args.max_reads:
                break
            try:
                query = preprocess_read(read, events, fp)
            except SdtwError as exc:
                print(f"{read.read_id}: skipped ({exc})", file=sys.stderr)
                failed += 1
                continue
            for idx in indexes:
                if args.sweep:
                    targets = [("sweep", idx.forward_fixed, length) for length in args.sweep]
                else:
                    targets = [(s, idx.strand_signal(s, fixed=True), None) for s in ("forward", "reverse")]
                for strand, signal, length in targets:
                    if length is not None:
                        signal = np.resize(signal, length)  # tile to the requested length
                    res = _run_chain(query.events_fixed, signal, fp, args, trace_out,
                                     f"{read.read_id}\t{idx.name}\t{strand}")
                    latency = estimate_latency(res.cycles, args.clock_hz, args.setup_s)
                    out.write(f"{read.read_id}\t{idx.name}\t{strand}\t{signal.size}\t{res.cycles}"
                              f"\t{latency * 1e6:.2f}\t{res.position}\t{res.score}\t{int(res.overflow)}\n")
    return 1 if failed else 0


def _add_fixed_point(p):
    p.add_argument("--scale-factor", type=int, default=None, help="power of two, default 32 (or the index's)")
    p.add_argument("--accum-bits", type=int, default=None, help="accumulator width, default 32")
    p.add_argument("--overflow-mode", choices=("wrap", "saturate"), default=None)


def _add_events(p):
    p.add_argument("--prefix-trim", type=int, default=50, help="adaptor events to drop")
    p.add_argument("--query-events", type=int, default=250)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdtw-readuntil", description=__doc__.split("\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; explicit flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("index", parents=[common], help="build a signal index from FASTA + pore model")
    p.add_argument("--reference", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    _add_fixed_point(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("map", parents=[common], help="map SLOW5 reads and decide")
    p.add_argument("--reads", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--summary", default=None, help="summary file (default: stderr)")
    p.add_argument("--engine", choices=("float-full", "float-banded", "fixed", "pe-sim"), default="fixed")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--batch-size", type=int, default=512)
    p.add_argument("--mapq-threshold", type=int, default=20)
    p.add_argument("--targets", default=None, help="name:start-end[,name:start-end...]")
    p.add_argument("--mode", choices=("target_enrichment", "target_depletion"), default="target_enrichment")
    p.add_argument("--chain-length", type=int, default=DEFAULT_CHAIN_LENGTH)
    _add_fixed_point(p)
    _add_events(p)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("simreads", parents=[common], help="generate synthetic SLOW5 reads with truth")
    p.add_argument("--reference", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--truth", default=None)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise-sigma", type=float, default=0.0)
    p.add_argument("--dup-prob", type=float, default=0.0)
    _add_events(p)
    p.set_defaults(func=cmd_simreads)

    p = sub.add_parser("eval-scaling", parents=[common], help="fixed vs float agreement per scale factor")
    p.add_argument("--reference", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sf-list", type=_int_list, default="2,4,8,16,32,64,128,256")
    p.add_argument("--noise-sigma", type=float, default=0.6)
    p.add_argument("--dup-prob", type=float, default=0.1)
    p.add_argument("--tolerance", type=int, default=5)
    p.add_argument("--accum-bits", type=int, default=None)
    p.add_argument("--overflow-mode", choices=("wrap", "saturate"), default=None)
    _add_events(p)
    p.set_defaults(func=cmd_eval_scaling)

    p = sub.add_parser("simulate", parents=[common], help="run the PE-chain simulator and report latency")
    p.add_argument("--reads", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--trace", default=None, help="per-cycle TSV output")
    p.add_argument("--clock-hz", type=float, default=DEFAULT_CLOCK_HZ)
    p.add_argument("--setup-s", type=float, default=0.0, help="fixed per-query transfer/setup time")
    p.add_argument("--chain-length", type=int, default=DEFAULT_CHAIN_LENGTH)
    p.add_argument("--max-reads", type=int, default=None)
    p.add_argument("--sweep", type=_int_list, default=None,
                   help="reference lengths (samples) to time instead of the index strands")
    _add_fixed_point(p)
    _add_events(p)
    p.set_defaults(func=cmd_simulate)
    return parser


def _read_config(path: str) -> dict:
    values = {}
    with _open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise Fatal(f"{path}:{lineno}: expected key = value")
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def parse_args(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        config = _read_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(config) - known - {"config", "func"})
        if unknown:
            raise Fatal(f"{args.config}: unknown key(s) {', '.join(unknown)}")
        subparser.set_defaults(**config)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return args.func(args)
    except Fatal as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SdtwError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
