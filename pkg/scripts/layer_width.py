"""Boundary-layer width versus the sliding band and the control effort."""

import argparse

import numpy as np

from slidegal import scenarios
from slidegal.diagnostics import chatter_band, reaching_time
from slidegal.galerkin import assemble
from slidegal.sim import SimConfig, simulate
from slidegal.sliding import ControllerConfig


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--modes", type=int, default=8)
    parser.add_argument("--dt", type=float, default=1e-4)
    parser.add_argument("--deltas", type=float, nargs="+", default=[0.2, 0.1, 0.05, 0.02, 0.01])
    args = parser.parse_args()

    spec = scenarios.standard_smooth(T=1.0)
    sys_ = assemble(spec, args.modes)
    print(f"{'delta':>7} {'t_reach':>8} {'sup|z|':>10} {'|u|_L2':>8} {'TV(u)':>9}")
    for delta in args.deltas:
        cfg = ControllerConfig("boundary_layer", rho=1.0, delta=delta)
        tr = simulate(sys_, cfg, SimConfig(args.dt), 1.0)
        tv = float(np.sum(np.abs(np.diff(tr.u))))
        print(f"{delta:7.3g} {reaching_time(tr, cfg):8.4f} {chatter_band(tr, cfg):10.4e} "
              f"{np.sqrt(tr.control_l2_running[-1]):8.4f} {tv:9.3f}")


if __name__ == "__main__":
    main()
