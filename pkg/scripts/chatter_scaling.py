"""Relay chattering band versus time step.

After the first crossing of the surface the relay keeps |z| within one step's
worth of motion, so sup |z| / dt should settle to a constant as dt shrinks.
"""

import argparse

from slidegal import scenarios
from slidegal.diagnostics import chatter_band, reaching_time
from slidegal.galerkin import assemble
from slidegal.sim import SimConfig, simulate
from slidegal.sliding import ControllerConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--modes", type=int, default=8)
    parser.add_argument("--rho", type=float, default=2.0)
    parser.add_argument("--T", type=float, default=1.0)
    parser.add_argument("--dts", type=float, nargs="+", default=[1e-3, 5e-4, 2.5e-4, 1.25e-4])
    args = parser.parse_args()

    spec = scenarios.reaching(z0=0.5, T=args.T)
    sys_ = assemble(spec, args.modes)
    cfg = ControllerConfig("relay", rho=args.rho)
    print(f"{'dt':>10} {'t_reach':>10} {'band':>12} {'band/dt':>9} {'ratio':>7}")
    prev = None
    for dt in sorted(args.dts, reverse=True):
        tr = simulate(sys_, cfg, SimConfig(dt), args.T)
        band = chatter_band(tr, cfg)
        ratio = f"{prev / band:7.3f}" if prev else " " * 7
        print(f"{dt:10.3g} {reaching_time(tr, cfg):10.4f} {band:12.4e} {band / dt:9.3f} {ratio}")
        prev = band


if __name__ == "__main__":
    main()
