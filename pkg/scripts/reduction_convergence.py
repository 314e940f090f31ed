#!/usr/bin/env python3
"""Convergence study of the auxiliary-sublattice elimination.

Sweeps the inter-sublattice coupling j with u_b tied to -i*j^2/beta (the
stable lossy working point), so the effective chain stays fixed while the
detuning |u_b| = j^2/beta grows.  Prints the max-over-time discrepancy
between the normalized main-sublattice profile of the full model and the
effective-chain profile; the error should fall roughly like 1/|u_b|.

Usage: python scripts/reduction_convergence.py [--j 2 3 4 6 8 12] [--t-final 15]
"""

import argparse
import math

from nhlattice import (
    ExcitationSpec,
    ExperimentConfig,
    ReductionParams,
    Timing,
    run_reduction_check,
)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--j", type=float, nargs="+", default=[2, 3, 4, 6, 8, 12])
    parser.add_argument("--t-final", type=float, default=15.0)
    parser.add_argument("--beta", type=float, default=0.4)
    parser.add_argument("--gamma", type=float, default=0.8)
    args = parser.parse_args()

    config = ExperimentConfig(
        experiment="reduction_check",
        beta=args.beta,
        gamma=args.gamma,
        phi=math.pi / 2,
        excitation=ExcitationSpec(kind="gaussian", n0=-20, w0=4.0, q0=-math.pi / 2),
        timing=Timing(t_final=args.t_final),
        reduction=ReductionParams(j_values=tuple(sorted(args.j)), aux_sign="loss"),
    )
    result = run_reduction_check(config)
    print(f"{'j':>6} {'|u_b|':>8} {'ratio':>8} {'profile error':>14}  flag")
    for j, ub, ratio, err, warned in result.table[1]:
        flag = "adiabaticity!" if warned else ""
        print(f"{j:6.2f} {ub:8.1f} {ratio:8.3f} {err:14.3e}  {flag}")


if __name__ == "__main__":
    main()
