#!/usr/bin/env python3
"""Reproduce the single-bit probe numbers at desk scale.

The adversary measures only position 0 in the rectilinear basis and
guesses "legitimate" when the outcome matches the candidate's first bit.
Prints measured certification rate, conditional discrimination advantage
and the security product against their closed forms.
"""

import argparse
import time

from privdel.bounds import firstbit_advantage, firstbit_cert, firstbit_conditional_success
from privdel.experiments import ExperimentConfig, run_discr
from privdel.parties import FirstBit, Task


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", type=int, default=90)
    parser.add_argument("--n", type=int, default=10)
    parser.add_argument("--trials", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--task", choices=("storage", "erasure"), default="storage")
    args = parser.parse_args()

    config = ExperimentConfig(
        m=args.m,
        n=args.n,
        task=Task(args.task),
        adversary=FirstBit(),
        trials=args.trials,
        seed=args.seed,
    )
    started = time.perf_counter()
    report = run_discr(config, "0" * args.m)
    elapsed = time.perf_counter() - started

    cert_ref = firstbit_cert(args.m, args.n)
    cond_ref = firstbit_conditional_success(args.m, args.n)
    product_ref = firstbit_advantage(args.m, args.n)
    print(f"single-bit probe at m={args.m}, n={args.n}, {args.trials} trials ({elapsed:.1f}s)")
    print(f"  P[certified]          {report.cert_estimate:.5f}   closed form {cert_ref:.5f}")
    print(
        f"  advantage | certified  {report.estimate - 0.5:.5f}   closed form {cond_ref - 0.5:.5f}"
    )
    print(
        f"  security product       {report.security_product:.5f}   closed form {product_ref:.5f}"
    )
    print(
        "  the product stays constant as n grows at fixed m/n, so the basic"
        " scheme is only partially private"
    )


if __name__ == "__main__":
    main()
