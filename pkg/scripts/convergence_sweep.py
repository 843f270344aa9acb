"""Galerkin dimension sweep: Cauchy gaps, uniform bounds and control norms."""

import argparse
import time

from slidegal import scenarios
from slidegal.diagnostics import convergence_study
from slidegal.sim import SimConfig
from slidegal.sliding import ControllerConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dims", type=int, nargs="+", default=[4, 8, 16, 32])
    parser.add_argument("--dt", type=float, default=1e-4)
    parser.add_argument("--delta", type=float, default=0.05)
    parser.add_argument("--rho", type=float, default=1.0)
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args()

    spec = scenarios.standard_smooth(T=1.0)
    cfg = ControllerConfig("boundary_layer", rho=args.rho, delta=args.delta)
    start = time.perf_counter()
    table = convergence_study(spec, args.dims, cfg, SimConfig(args.dt), threads=args.threads)
    elapsed = time.perf_counter() - start
    print(f"{'N':>4} {'pair_gap':>12} {'sliding_sup':>12} {'sup|y|':>9} {'|u|_L2':>9} {'t_reach':>8}")
    for row in zip(table.dims, table.pair_gaps, table.sliding_sups, table.uniform_bounds,
                   table.l2_control_norms, table.reaching_times):
        n, gap, sup, bound, l2, tr = row
        print(f"{n:4d} {gap:12.4e} {sup:12.4e} {bound:9.5f} {l2:9.4f} {tr if tr is None else f'{tr:8.4f}'}")
    gaps = table.pair_gaps[:-1]
    rates = [a / b for a, b in zip(gaps, gaps[1:])]
    print("gap reduction per doubling:", ", ".join(f"{r:.2f}" for r in rates) or "n/a")
    print(f"elapsed {elapsed:.2f} s")


if __name__ == "__main__":
    main()
