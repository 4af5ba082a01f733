"""Command line entry point: ``gen``, ``run``, ``bench`` and ``verify``.

Exit codes: 0 ok, 1 a verify check failed, 2 invalid input, 3 scheme
contract error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from querypricing.core import (
    InstanceFormatError, ValidationError, instance_to_dict, load_instance, require_valid,
)
from querypricing.gen import GenConfig, gen_cut_instance, gen_single_minded, gen_subset_sum_gadget
from querypricing.harness import BenchConfig, bench, verify
from querypricing.schemes import SCHEMES, ContractError, run_scheme

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_CONTRACT, EXIT_IO = 0, 1, 2, 3, 4


class CliError(Exception):
    def __init__(self, code: int, message: str, details: Sequence[str] = ()):
        super().__init__(message)
        self.code = code
        self.details = list(details)


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc.strerror or exc}") from None


def _load(path: str):
    try:
        inst = load_instance(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc.strerror or exc}") from None
    except InstanceFormatError as exc:
        raise CliError(EXIT_INVALID, str(exc), exc.violations) from None
    try:
        return require_valid(inst)
    except ValidationError as exc:
        raise CliError(EXIT_INVALID, str(exc), exc.violations) from None


def cmd_gen(args) -> int:
    try:
        if args.kind == "gadget":
            if not args.a or args.B is None:
                raise CliError(EXIT_INVALID, "gadget needs --a and --B")
            inst = gen_subset_sum_gadget(args.a, args.B)
        else:
            cfg = GenConfig(n=args.n, m=args.m, value_lo=args.value_lo, value_hi=args.value_hi,
                            layers=args.layers, width=args.width,
                            inf_edge_prob=args.inf_edge_prob, seed=args.seed)
            gen = gen_single_minded if args.kind == "single-minded" else gen_cut_instance
            inst = gen(cfg)
    except ValidationError as exc:
        raise CliError(EXIT_INVALID, str(exc), exc.violations) from None
    text = json.dumps(instance_to_dict(inst), indent=1) + "\n"
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        _write(args.output, text)
        print(f"wrote {inst.n} buyers over {inst.m} base queries to {args.output}")
    return EXIT_OK


def cmd_run(args) -> int:
    inst = _load(args.instance)
    try:
        res = run_scheme(args.scheme, inst, args.seed)
    except ContractError as exc:
        raise CliError(EXIT_CONTRACT, str(exc)) from None
    out = {
        "scheme": args.scheme, "seed": args.seed, "revenue": res.revenue,
        "served": sorted(res.report.served), "prices": res.prices.tolist(),
    }
    print(f"scheme   {args.scheme}")
    print(f"revenue  {res.revenue:.10g}")
    print(f"served   {res.report.served_count}/{inst.n}")
    if args.output:
        _write(args.output, json.dumps(out, indent=1) + "\n")
    else:
        print("prices   " + " ".join(f"{p:.10g}" for p in res.prices))
    return EXIT_OK


def cmd_bench(args) -> int:
    try:
        obj = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {args.config}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INVALID, f"{args.config}: not JSON ({exc})") from None
    try:
        cfg = BenchConfig.from_dict(obj)
        if args.workers is not None:
            cfg = BenchConfig.from_dict({**obj, "workers": args.workers})
        output = args.output or cfg.output
        if not output:
            raise ValidationError("invalid bench config", ["no output path (use -o)"])
        cfg.check()
    except ValidationError as exc:
        raise CliError(EXIT_INVALID, str(exc), exc.violations) from None
    # fail on an unwritable path before spending time on the sweep
    _write(output, "")
    try:
        result = bench(cfg)
    except ContractError as exc:
        raise CliError(EXIT_CONTRACT, str(exc)) from None
    _write(output, result.csv())
    print(result.summary_table())
    print(f"wrote {len(result.rows)} rows to {output}")
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    report = verify(inst)
    print(report.format())
    return EXIT_OK if report.ok else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="querypricing", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance JSON")
    g.add_argument("--kind", choices=["single-minded", "cut", "gadget"], required=True)
    g.add_argument("--n", type=int, default=20)
    g.add_argument("--m", type=int, default=100)
    g.add_argument("--value-lo", type=float, default=0.0)
    g.add_argument("--value-hi", type=float, default=1.0)
    g.add_argument("--layers", type=int, default=1)
    g.add_argument("--width", type=int, default=1)
    g.add_argument("--inf-edge-prob", type=float, default=0.0)
    g.add_argument("--a", type=int, nargs="+", help="subset-sum integers (gadget)")
    g.add_argument("--B", type=int, help="subset-sum target (gadget)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("-o", "--output", help="output path (default stdout)")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="price an instance with one scheme")
    r.add_argument("--scheme", choices=sorted(SCHEMES), required=True)
    r.add_argument("--instance", required=True)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("-o", "--output", help="write scheme, revenue and prices as JSON")
    r.set_defaults(func=cmd_run)

    b = sub.add_parser("bench", help="run a benchmark sweep and write CSV")
    b.add_argument("--config", required=True)
    b.add_argument("-o", "--output")
    b.add_argument("--workers", type=int)
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="check cross-scheme invariants on one instance")
    v.add_argument("--instance", required=True)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for line in exc.details:
            print(f"  - {line}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
