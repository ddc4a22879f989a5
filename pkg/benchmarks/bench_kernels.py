#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-numpy fallback.

Same harness as `coregae bench`; kept as a standalone script so it can run
against a source checkout: python benchmarks/bench_kernels.py --edges 2000000
"""

import argparse
import sys

from coregae.benchmark import available_backends, format_table, run_kernel_benchmarks


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--nodes", type=int, default=100_000)
    parser.add_argument("--edges", type=int, default=1_000_000)
    parser.add_argument("--dim", type=int, default=16)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    backends = sorted(available_backends())
    print(f"backends: {', '.join(backends)}")
    if "compiled" not in backends:
        print("note: compiled kernels not built; showing the fallback only")
    rows = run_kernel_benchmarks(n=args.nodes, m=args.edges, f=args.dim,
                                 seed=args.seed, repeats=args.repeats)
    sys.stdout.write(format_table(rows))
    return 0


if __name__ == "__main__":
    sys.exit(main())
