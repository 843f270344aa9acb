"""Experiment runner: ``slidegal {simulate,converge,check} <config.yaml>``.

Exit status: 0 when every requested check holds, 1 when a check fails,
2 on configuration, transversality or divergence errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .diagnostics import (
    SweepError,
    chatter_band,
    check_energy,
    check_growth,
    convergence_study,
    growth_constants,
    reaching_time,
)
from .galerkin import (
    GalerkinSystem,
    Quadrature,
    RepresentabilityError,
    assemble,
    default_quadrature,
    gauss_legendre,
    reconstruct,
)
from .problem import BoundaryInfluence, ProblemSpec, ScalarField, analyze
from .sim import SimConfig, SimulationDivergence, Trajectory, simulate
from .sliding import Controller, ControllerConfig, TransversalityError, reaching_time_bound

log = logging.getLogger("slidegal")

TRAJ_HEADER = ["t", "z", "u", "gain", "u_eq", "h_norm", "seminorm", "ctrl_l2"]
CONVERGE_HEADER = ["N", "pair_gap", "sliding_sup", "uniform_bound", "l2_control_norm"]
FIELD_NX = 101
FIELD_NT = 21
MAX_SAMPLES = 10001

KNOWN_KEYS = {
    "n_modes", "T", "dt", "scheme", "record_stride",
    "q_poly", "q_cosine", "g_left", "g_right", "gamma_cosine", "y0_poly", "y0_cosine",
    "controller.mode", "controller.rho", "controller.delta", "controller.u_max",
    "controller.value", "quadrature.nodes", "quadrature.panels", "dims", "out_prefix",
}


class ConfigError(ValueError):
    pass


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads exponent floats without a dot (``1e-4``) as floats."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
                  |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
                  |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
                  |[-+]?\.(?:inf|Inf|INF)
                  |\.(?:nan|NaN|NAN))$""", re.X),
    list("-+0123456789."))


@dataclass(frozen=True)
class RunConfig:
    spec: ProblemSpec
    n_modes: int
    controller: ControllerConfig
    sim: SimConfig
    dims: list = field(default_factory=list)
    out_prefix: str = "slidegal_out"
    quad_nodes: int | None = None
    quad_panels: int | None = None

    def quadrature(self, n: int) -> Quadrature:
        if self.quad_nodes is None and self.quad_panels is None:
            return default_quadrature(n)
        return gauss_legendre(self.quad_nodes or 8, self.quad_panels or max(4, n))


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _number(raw: dict, key: str, default=None, kind=float):
    if key not in raw:
        return default
    v = raw[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {v!r}")
    if kind is int and int(v) != v:
        raise ConfigError(f"{key}: expected an integer, got {v!r}")
    return kind(v)


def _coeffs(raw: dict, key: str):
    v = raw[key]
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        v = [v]
    if not isinstance(v, list) or not v or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in v):
        raise ConfigError(f"{key}: expected a nonempty list of numbers, got {v!r}")
    return v


def _field(raw: dict, name: str, default: ScalarField | None) -> ScalarField:
    poly, cos = f"{name}_poly", f"{name}_cosine"
    if poly in raw and cos in raw:
        raise ConfigError(f"give only one of {poly} and {cos}")
    if poly in raw:
        return ScalarField.poly(_coeffs(raw, poly))
    if cos in raw:
        return ScalarField.cosine(_coeffs(raw, cos))
    if default is None:
        raise ConfigError(f"missing required key {cos}")
    return default


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML run configuration, applying defaults."""
    try:
        doc = yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a key-value mapping")
    raw = _flatten(doc)
    unknown = sorted(set(raw) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown keys: {', '.join(unknown)}")
    for req in ("n_modes", "T", "gamma_cosine"):
        if req not in raw:
            raise ConfigError(f"missing required key {req}")

    try:
        n_modes = _number(raw, "n_modes", kind=int)
        if n_modes < 1:
            raise ConfigError(f"n_modes must be >= 1, got {n_modes}")
        T = _number(raw, "T")
        if not T > 0:
            raise ConfigError(f"T must be > 0, got {T}")
        dt = _number(raw, "dt", 1e-4)
        if not dt > 0:
            raise ConfigError(f"dt must be > 0, got {dt}")
        n_steps = math.ceil(T / dt - 1e-9)
        stride = _number(raw, "record_stride", None, int)
        if stride is None:
            stride = max(1, math.ceil(n_steps / (MAX_SAMPLES - 1)))
        sim = SimConfig(dt=dt, scheme=raw.get("scheme", "semi_implicit"), record_stride=stride)

        spec = ProblemSpec(
            q=_field(raw, "q", ScalarField.poly([0.0])),
            g=BoundaryInfluence(_number(raw, "g_left", 0.0), _number(raw, "g_right", 0.0)),
            gamma=_field(raw, "gamma", None),
            y0=_field(raw, "y0", ScalarField.poly([0.0])),
            horizon_T=T,
        )
        ctrl = ControllerConfig(
            mode=raw.get("controller.mode", "relay"),
            rho=_number(raw, "controller.rho", 1.0),
            delta=_number(raw, "controller.delta", None),
            u_max=_number(raw, "controller.u_max", None),
            value=_number(raw, "controller.value", 0.0),
        )
        dims = raw.get("dims", [n_modes])
        if not isinstance(dims, list) or not dims or not all(
                isinstance(d, int) and not isinstance(d, bool) for d in dims):
            raise ConfigError(f"dims: expected a nonempty list of integers, got {dims!r}")
        if any(b < a for a, b in zip(dims, dims[1:])):
            raise ConfigError(f"dims must be non-decreasing, got {dims}")
        quad_nodes = _number(raw, "quadrature.nodes", None, int)
        quad_panels = _number(raw, "quadrature.panels", None, int)
        for key, v in (("quadrature.nodes", quad_nodes), ("quadrature.panels", quad_panels)):
            if v is not None and v < 1:
                raise ConfigError(f"{key} must be >= 1, got {v}")
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc

    need = spec.gamma.highest_mode + 1
    for n in [n_modes, *dims]:
        if n < need:
            raise RepresentabilityError(
                f"sliding covector not representable: gamma uses {need} modes, "
                f"Galerkin dimension {n}")
    out_prefix = str(raw.get("out_prefix", "slidegal_out"))
    parent = Path(out_prefix).parent
    if not parent.is_dir():
        raise ConfigError(f"out_prefix: directory {parent} does not exist")
    return RunConfig(spec, n_modes, ctrl, sim, list(dims), out_prefix, quad_nodes, quad_panels)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_trajectory_csv(path, traj: Trajectory, error: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJ_HEADER)
        cols = (traj.times, traj.z, traj.u, traj.gain, traj.u_eq, traj.h_norms,
                traj.seminorms, traj.control_l2_running)
        for row in zip(*cols):
            w.writerow([_fmt(v) for v in row])
        if error is not None:
            fh.write(f"# error: {error}\n")


def read_trajectory_csv(path) -> dict[str, np.ndarray]:
    """Columns of a trajectory CSV; a trailing ``# error`` line is skipped."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header, body = rows[0], rows[1:]
    data = np.array([[float(v) for v in r] for r in body], dtype=float).reshape(len(body), len(header))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_field_csv(path, sys: GalerkinSystem, traj: Trajectory, T: float) -> None:
    xs = np.linspace(0.0, 1.0, FIELD_NX)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x", "y"])
        for target in np.linspace(0.0, T, FIELD_NT):
            i = int(np.argmin(np.abs(traj.times - target)))
            ys = reconstruct(sys, traj.states[i], xs)
            for x, y in zip(xs, ys):
                w.writerow([_fmt(traj.times[i]), _fmt(x), _fmt(y)])


def _report_lines(title: str, obj) -> list[str]:
    lines = [f"[{title}]"]
    for k, v in vars(obj).items():
        if isinstance(v, np.ndarray):
            continue
        lines.append(f"{k} = {v}")
    return lines


def cmd_simulate(cfg: RunConfig) -> int:
    spec = cfg.spec
    sys_ = assemble(spec, cfg.n_modes, cfg.quadrature(cfg.n_modes))
    controller = Controller(sys_, cfg.controller)
    report = analyze(spec, probe_dimension=max(cfg.n_modes, 2))
    prefix = cfg.out_prefix
    try:
        traj = simulate(sys_, cfg.controller, cfg.sim, spec.horizon_T, controller=controller)
    except SimulationDivergence as exc:
        write_trajectory_csv(f"{prefix}_traj.csv", exc.partial, error=str(exc))
        log.error("simulation diverged: %s", exc)
        return 2
    write_trajectory_csv(f"{prefix}_traj.csv", traj)
    write_field_csv(f"{prefix}_field.csv", sys_, traj, spec.horizon_T)

    growth = check_growth(traj, *growth_constants(sys_, cfg.controller, spec.horizon_T))
    energy = check_energy(traj, report)
    lines = _report_lines("coercivity", report)
    lines.append("[sliding]")
    lines.append(f"gamma_g = {controller.gamma_g}")
    lines.append(f"z0 = {traj.z[0]}")
    if cfg.controller.mode in ("relay", "boundary_layer") and controller.transversal:
        lines.append("reaching_time_bound = "
                     f"{reaching_time_bound(traj.z[0], cfg.controller.rho, controller.gamma_g)}")
    lines.append(f"reaching_time = {reaching_time(traj, cfg.controller)}")
    lines.append(f"chatter_band = {chatter_band(traj, cfg.controller)}")
    M, N = growth_constants(sys_, cfg.controller, spec.horizon_T)
    lines += _report_lines("growth", growth) + [f"M = {M}", f"N = {N}"]
    lines += _report_lines("energy", energy) + [f"worst_margin = {energy.worst_margin}"]
    Path(f"{prefix}_report.txt").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return 0 if growth.holds and energy.holds else 1


def cmd_converge(cfg: RunConfig) -> int:
    try:
        table = convergence_study(cfg.spec, cfg.dims, cfg.controller, cfg.sim)
    except SweepError as exc:
        log.error("%s", exc)
        return 2
    path = f"{cfg.out_prefix}_converge.csv"
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CONVERGE_HEADER)
        for row in zip(table.dims, table.pair_gaps, table.sliding_sups,
                       table.uniform_bounds, table.l2_control_norms):
            w.writerow([row[0], *(_fmt(v) for v in row[1:])])
    print(Path(path).read_text(), end="")
    return 0


def assembly_invariants(sys_: GalerkinSystem, n_samples: int = 1000, seed: int = 0) -> dict[str, bool]:
    rng = np.random.default_rng(seed)
    xs = rng.standard_normal((n_samples, sys_.N))
    quad_form = np.einsum("ij,jk,ik->i", xs, sys_.A, xs)
    grad_form = np.einsum("ij,jk,ik->i", xs, sys_.K, xs)
    bound = grad_form - sys_.sup_q * np.sum(xs**2, axis=1)
    return {
        "mass_is_identity": bool(np.allclose(sys_.M, np.eye(sys_.N), atol=1e-12)),
        "A_symmetric": bool(np.max(np.abs(sys_.A - sys_.A.T)) < 1e-12),
        "K_symmetric": bool(np.max(np.abs(sys_.K - sys_.K.T)) < 1e-12),
        "K_psd": bool(np.min(np.linalg.eigvalsh(sys_.K)) >= -1e-12 and sys_.K[0, 0] == 0),
        "discrete_coercivity": bool(np.all(quad_form >= bound - 1e-9 * np.abs(bound).max())),
    }


def cmd_check(cfg: RunConfig) -> int:
    report = analyze(cfg.spec, probe_dimension=max(cfg.n_modes, 2))
    sys_ = assemble(cfg.spec, cfg.n_modes, cfg.quadrature(cfg.n_modes))
    lines = _report_lines("coercivity", report)
    inv = assembly_invariants(sys_)
    lines.append("[assembly]")
    lines += [f"{k} = {v}" for k, v in inv.items()]
    ok = all(inv.values())
    try:
        Controller(sys_, cfg.controller)
        lines.append("controller = ok")
    except TransversalityError as exc:
        lines.append(f"controller = {exc}")
        print("\n".join(lines))
        return 2
    print("\n".join(lines))
    return 0 if ok else 1


COMMANDS = {"simulate": cmd_simulate, "converge": cmd_converge, "check": cmd_check}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="slidegal", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("config", help="YAML run configuration")
    parser.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg)
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"slidegal: error: {exc}", file=sys.stderr)
        return 2

if __name__ == "__main__":
    sys.exit(main())
