"""Command-line entry point ``trm``.

Exit codes: 0 success, 1 usage or I/O error, 2 domain diagnostic (planner
infeasible, profile/file mismatch, decoder not applicable, failed oracle).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .bench import bench_profile, ratios
from .bits import TriTensor, read_tensor_file, read_word_file, write_tensor_file
from .campaign import CampaignConfig, run_campaign, write_csv, write_jsonl
from .inner import cached_ml_table, highrate_decode_batch, ml_decode_batch
from .oracle_suite import run_oracle_suite
from .rm import is_codeword_batch
from .tensor import decode_array, rm_component
from .trm import (
    DecodeConfig,
    Diagnostic,
    PlanRequest,
    TrmCode,
    plan_parameters,
    trm_decode_detailed,
    trm_encode,
    trm_is_codeword,
)

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=True))


def _profile(text: str) -> TrmCode:
    try:
        return TrmCode.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------- subcommands

def cmd_plan(args) -> int:
    if args.mode == "profile":
        if not args.profile:
            raise UsageError("--mode profile needs --profile")
        _emit({"mode": "profile", "code": _profile(args.profile).describe()})
        return EXIT_OK
    try:
        req = PlanRequest(args.n, args.t, args.rate, args.p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = plan_parameters(req)
    if isinstance(result, Diagnostic):
        _emit({"mode": "theorem", "diagnostic": result.to_json()})
        return EXIT_DOMAIN
    _emit({"mode": "theorem", "code": result.describe()})
    return EXIT_OK


def cmd_encode(args) -> int:
    code = _profile(args.profile)
    if args.infile:
        msg = read_word_file(args.infile)
        if msg.length != code.dimension:
            raise DomainError(f"message has {msg.length} bits, {code} has dimension {code.dimension}")
        coeffs = msg.bits
    else:
        coeffs = np.random.default_rng(args.seed).integers(0, 2, code.dimension, dtype=np.uint8)
    write_tensor_file(args.outfile, TriTensor.from_bits(trm_encode(code, coeffs)))
    return EXIT_OK


def _default_decoder(code: TrmCode) -> str:
    return "highrate" if code.t == 1 else "full"


def cmd_decode(args) -> int:
    code = _profile(args.profile)
    tensor = read_tensor_file(args.infile)
    if tensor.shape != code.shape:
        raise DomainError(f"file shape {tensor.shape} does not match profile shape {code.shape}")
    decoder = args.decoder or _default_decoder(code)
    erased = tensor.erased
    timings = {}
    start = time.perf_counter()
    if decoder == "tensor-adv":
        comps = [rm_component(l) for l in code.layers]
        data, failed = decode_array(comps, tensor.values[..., None], erased[..., None])
        out = TriTensor.all_erased(code.shape) if failed[0] else TriTensor.from_bits(data[..., 0])
        timings["tensor_adv"] = time.perf_counter() - start
    else:
        if erased.any():
            raise DomainError(f"decoder {decoder!r} takes flip noise only; use tensor-adv for erasures")
        if decoder in ("ml", "highrate"):
            if code.t != 1:
                raise DomainError(f"decoder {decoder!r} needs a one-layer profile")
            layer = code.layers[0]
            if decoder == "ml":
                table = cached_ml_table(layer) if layer.length <= 16 else None
                bits = ml_decode_batch(layer, tensor.values, table)
            else:
                bits = highrate_decode_batch(layer, tensor.values)
            timings["decode"] = time.perf_counter() - start
        else:
            if code.t < 2:
                raise DomainError("decoder 'full' needs at least two layers")
            cfg = DecodeConfig(counter_threshold=args.counter_threshold, inner_decoder=args.inner_decoder)
            res = trm_decode_detailed(code, tensor.values, cfg, cached_ml_table(code.layers[0]))
            bits = res.codeword
            timings.update(res.timings)
        out = TriTensor.from_bits(bits)
    write_tensor_file(args.outfile, out)
    if out.is_boolean():
        changed = int(np.count_nonzero((out.values != tensor.values) & ~erased))
        if code.t == 1:
            is_cw = bool(is_codeword_batch(code.layers[0], out.values))
        else:
            is_cw = trm_is_codeword(code, out.values)
    else:
        changed, is_cw = None, False
    _emit({
        "decoder": decoder,
        "changed_bits": changed,
        "filled_erasures": int(erased.sum()) if out.is_boolean() else 0,
        "stage_timings": {k: round(v, 6) for k, v in timings.items()},
        "output_is_codeword": is_cw,
    })
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        cfg = CampaignConfig.load(args.config)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot use config {args.config}: {exc}") from None
    if args.timings:
        cfg.record_timings = True
    out = args.out or cfg.output
    if not out:
        raise UsageError("no output path: pass --out or set 'output' in the config")
    csv_path = args.csv or cfg.csv or str(Path(out).with_suffix(".csv"))
    records = []
    for rec in run_campaign(cfg, args.jobs):
        records.append(rec)
        print(f"{rec['profile']} {rec['decoder']} {rec['noise']}: "
              f"{rec['block_errors']}/{rec['trials']} ci=[{rec['ci'][0]:.4g}, {rec['ci'][1]:.4g}]",
              file=sys.stderr)
    write_jsonl(records, out)
    write_csv(records, csv_path)
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError:
        raise UsageError(f"--sizes must be a comma list of integers, got {args.sizes!r}") from None
    if not sizes:
        raise UsageError("--sizes is empty")
    _profile(args.profile)
    try:
        records = bench_profile(args.profile, sizes, args.p, args.seed, args.repeat)
    except ValueError as exc:
        raise DomainError(str(exc)) from None
    _emit({"records": records, "ratios": ratios(records), "artifact_version": __version__})
    return EXIT_OK


def cmd_oracle_check(args) -> int:
    results = run_oracle_suite(args.seed, args.scale)
    if args.json:
        _emit({"checks": [r.to_json() for r in results], "passed": all(r.passed for r in results)})
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            print(f"{r.name:<{width}}  {status}  {r.mismatches}/{r.cases} mismatches  {r.seconds:.2f}s")
    return EXIT_OK if all(r.passed for r in results) else EXIT_DOMAIN


# -------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trm", description="Tensor Reed-Muller codes toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    plan = sub.add_parser("plan", help="evaluate the parameter formulas or echo a profile")
    plan.add_argument("--n", type=int, default=1 << 19)
    plan.add_argument("--t", type=int, default=3)
    plan.add_argument("--rate", type=float, default=0.5)
    plan.add_argument("--p", type=float, default=0.01)
    plan.add_argument("--mode", choices=("theorem", "profile"), default="theorem")
    plan.add_argument("--profile")
    plan.set_defaults(func=cmd_plan)

    enc = sub.add_parser("encode", help="encode a message word file into a tensor file")
    enc.add_argument("--profile", required=True)
    enc.add_argument("--in", dest="infile", help="word file with the coefficient bits (default: random)")
    enc.add_argument("--seed", type=int, default=0, help="seed for the random message when --in is absent")
    enc.add_argument("--out", dest="outfile", required=True)
    enc.set_defaults(func=cmd_encode)

    dec = sub.add_parser("decode", help="decode a tensor file")
    dec.add_argument("--profile", required=True)
    dec.add_argument("--in", dest="infile", required=True)
    dec.add_argument("--out", dest="outfile", required=True)
    dec.add_argument("--decoder", choices=("ml", "highrate", "tensor-adv", "full"))
    dec.add_argument("--inner-decoder", choices=("highrate", "ml"), default="highrate")
    dec.add_argument("--counter-threshold", type=int)
    dec.set_defaults(func=cmd_decode)

    sim = sub.add_parser("simulate", help="run a Monte-Carlo campaign from a JSON config")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out")
    sim.add_argument("--csv")
    sim.add_argument("--timings", action="store_true", help="record wall-clock timings (output no longer byte-stable)")
    sim.set_defaults(func=cmd_simulate)

    bench = sub.add_parser("bench", help="time the decoding stages while growing the last layer")
    bench.add_argument("--profile", required=True)
    bench.add_argument("--sizes", required=True, help="comma list of m values for the last layer")
    bench.add_argument("--repeat", type=int, default=3)
    bench.add_argument("--p", type=float, default=0.001)
    bench.add_argument("--seed", type=int, default=0)
    bench.set_defaults(func=cmd_bench)

    orc = sub.add_parser("oracle-check", help="compare fast routines with brute-force oracles")
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--scale", type=int, default=200)
    orc.add_argument("--json", action="store_true")
    orc.set_defaults(func=cmd_oracle_check)

    sim.add_argument("--jobs", type=int, default=os.cpu_count() or 1, help="worker processes")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"trm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"trm: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, ValueError) as exc:
        print(f"trm: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
