import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slidegal.cli import (
    CONVERGE_HEADER,
    TRAJ_HEADER,
    ConfigError,
    main,
    parse_config,
    read_trajectory_csv,
    write_trajectory_csv,
)
from slidegal.galerkin import RepresentabilityError
from slidegal.sim import Trajectory

MINIMAL = """
n_modes: 4
T: 0.5
gamma_cosine: [1.0]
g_right: 1.0
"""


def write(tmp_path, text, name="run.yaml"):
    path = tmp_path / name
    path.write_text(text + f"\nout_prefix: {tmp_path / 'out'}\n")
    return path


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.n_modes == 4
    assert cfg.sim.dt == 1e-4 and cfg.sim.scheme == "semi_implicit"
    assert cfg.sim.record_stride == 1  # 5000 steps fit in 10001 samples
    assert cfg.controller.mode == "relay" and cfg.controller.rho == 1.0
    assert cfg.spec.g.g_left == 0.0 and cfg.spec.g.g_right == 1.0
    assert cfg.spec.q.is_zero and cfg.spec.y0.is_zero
    assert cfg.dims == [4]
    q = cfg.quadrature(4)
    assert len(q.nodes) == 8 * 4


def test_record_stride_caps_samples():
    cfg = parse_config(MINIMAL.replace("T: 0.5", "T: 5.0"))
    n_steps = 50000
    assert n_steps // cfg.sim.record_stride + 1 <= 10001


def test_nested_controller_keys():
    cfg = parse_config(MINIMAL + "controller:\n  mode: boundary_layer\n  rho: 2.5\n  delta: 0.01\n")
    assert (cfg.controller.mode, cfg.controller.rho, cfg.controller.delta) == ("boundary_layer", 2.5, 0.01)


def test_unknown_keys_listed():
    with pytest.raises(ConfigError, match="unknown keys: bogus, controller.gian"):
        parse_config(MINIMAL + "bogus: 1\ncontroller:\n  gian: 2\n")


def test_not_representable():
    with pytest.raises(RepresentabilityError, match="sliding covector not representable"):
        parse_config(MINIMAL.replace("gamma_cosine: [1.0]", "gamma_cosine: [1, 0, 0, 0, 0.5]"))


@pytest.mark.parametrize("line, word", [
    ("dt: -1e-4", "dt"),
    ("n_modes: 0", "n_modes"),
    ("scheme: euler", "scheme"),
    ("dims: [8, 4]", "dims"),
])
def test_validation_names_field(line, word):
    text = "\n".join(l for l in MINIMAL.splitlines() if not l.startswith(line.split(":")[0] + ":"))
    with pytest.raises(ConfigError, match=word):
        parse_config(text + "\n" + line + "\n")


def test_missing_required_and_malformed():
    with pytest.raises(ConfigError, match="gamma_cosine"):
        parse_config("n_modes: 3\nT: 1\n")
    with pytest.raises(ConfigError):
        parse_config("[1, 2")
    with pytest.raises(ConfigError):
        parse_config(MINIMAL + "y0_poly: [1]\ny0_cosine: [1]\n")


def test_out_prefix_directory_must_exist(tmp_path):
    with pytest.raises(ConfigError, match="out_prefix"):
        parse_config(MINIMAL + f"out_prefix: {tmp_path / 'nope' / 'x'}\n")


def test_simulate_open_loop_decay(tmp_path):
    path = write(tmp_path, """
n_modes: 4
T: 0.1
dt: 1.0e-4
gamma_cosine: [1.0]
g_right: 1.0
y0_cosine: [0.0, 1.0]
controller: {mode: open_loop_zero}
""")
    assert main(["simulate", str(path)]) == 0
    data = read_trajectory_csv(tmp_path / "out_traj.csv")
    assert list(data) == TRAJ_HEADER
    assert data["h_norm"][-1] == pytest.approx(math.exp(-math.pi**2 * 0.1), abs=3e-4)
    lines = (tmp_path / "out_field.csv").read_text().splitlines()
    assert lines[0] == "t,x,y"
    assert len(lines) == 1 + 101 * 21
    report = (tmp_path / "out_report.txt").read_text()
    for section in ("[coercivity]", "[sliding]", "[growth]", "[energy]", "reaching_time", "chatter_band"):
        assert section in report


def test_simulate_relay_reports_reaching(tmp_path):
    path = write(tmp_path, """
n_modes: 8
T: 0.5
dt: 1.0e-3
gamma_cosine: [0.8944271909999159, 0.0, 0.4472135954999579]
g_right: 1.0
y0_cosine: [0.4472135954999579, 0.0, 0.22360679774997896]
controller: {mode: relay, rho: 2.0}
""")
    assert main(["simulate", str(path)]) == 0
    values = dict(l.split(" = ") for l in (tmp_path / "out_report.txt").read_text().splitlines() if " = " in l)
    assert float(values["reaching_time"]) <= float(values["reaching_time_bound"]) + 2e-3
    data = read_trajectory_csv(tmp_path / "out_traj.csv")
    gamma = np.array([0.8944271909999159, 0.0, 0.4472135954999579])
    xi0 = np.array([0.4472135954999579, 0.0, 0.22360679774997896])
    assert data["z"][0] == gamma @ xi0


def test_simulate_divergence_trailer(tmp_path):
    path = write(tmp_path, """
n_modes: 1
T: 1.0
q_poly: [9900.0]
gamma_cosine: [1.0]
g_right: 1.0
y0_poly: [1.0]
controller: {mode: open_loop_zero}
""")
    assert main(["simulate", str(path)]) == 2
    text = (tmp_path / "out_traj.csv").read_text()
    assert text.splitlines()[-1].startswith("# error: non-finite state")
    data = read_trajectory_csv(tmp_path / "out_traj.csv")
    assert np.all(np.isfinite(data["h_norm"]))


def test_converge_csv(tmp_path):
    path = write(tmp_path, """
n_modes: 4
T: 0.2
dt: 1.0e-3
gamma_cosine: [1.0]
g_right: 1.0
y0_cosine: [0.4, 0.2, 0.1]
controller: {mode: relay, rho: 2.0}
dims: [4, 4, 8]
""")
    assert main(["converge", str(path)]) == 0
    lines = (tmp_path / "out_converge.csv").read_text().splitlines()
    assert lines[0] == ",".join(CONVERGE_HEADER)
    rows = [l.split(",") for l in lines[1:]]
    assert [r[0] for r in rows] == ["4", "4", "8"]
    assert float(rows[0][1]) == 0.0
    assert rows[-1][1] == "nan"
    # gamma = e0: the sliding output does not see the higher modes
    assert rows[0][2] == rows[1][2] == rows[2][2]


def test_check_command(tmp_path, capsys):
    path = write(tmp_path, MINIMAL)
    assert main(["check", str(path)]) == 0
    out = capsys.readouterr().out
    assert "discrete_coercivity = True" in out and "controller = ok" in out


def test_check_transversality_failure(tmp_path, capsys):
    c = 1 / math.sqrt(1.5)
    path = write(tmp_path, f"""
n_modes: 4
T: 1.0
gamma_cosine: [{c!r}, 0.0, {-c / math.sqrt(2)!r}]
g_right: 1.0
""")
    assert main(["check", str(path)]) == 2
    assert "transvers" in capsys.readouterr().out
    assert main(["simulate", str(path)]) == 2


def test_bad_config_exit_code(tmp_path, capsys):
    path = write(tmp_path, MINIMAL + "dt: -1.0\n")
    assert main(["simulate", str(path)]) == 2
    assert "dt" in capsys.readouterr().err
    assert main(["simulate", str(tmp_path / "missing.yaml")]) == 2


# invariants

floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(st.tuples(*[floats] * 8), min_size=1, max_size=20))
def test_csv_round_trip_bit_exact(tmp_path_factory, rows):
    arr = np.array(rows, dtype=float)
    n = len(arr)
    traj = Trajectory(times=arr[:, 0], states=np.zeros((n, 1)), u=arr[:, 2], z=arr[:, 1],
                      gain=arr[:, 3], u_eq=arr[:, 4], h_norms=arr[:, 5], seminorms=arr[:, 6],
                      control_l2_running=arr[:, 7], dt=1.0)
    path = tmp_path_factory.mktemp("rt") / "t.csv"
    write_trajectory_csv(path, traj)
    back = read_trajectory_csv(path)
    for i, name in enumerate(TRAJ_HEADER):
        assert np.array_equal(back[name].view(np.int64), arr[:, i].view(np.int64))


@given(st.sampled_from(["relay", "boundary_layer", "equivalent", "open_loop_zero"]),
       st.floats(0.5, 3.0), st.floats(-1.0, 1.0))
def test_exit_status_matches_checks(tmp_path_factory, mode, rho, y0):
    from slidegal.cli import load_config
    from slidegal.diagnostics import check_energy, check_growth, growth_constants
    from slidegal.galerkin import assemble
    from slidegal.problem import analyze
    from slidegal.sim import simulate
    d = tmp_path_factory.mktemp("ex")
    path = d / "c.yaml"
    path.write_text(f"""
n_modes: 5
T: 0.05
dt: 1.0e-3
q_poly: [0.5, 1.0]
gamma_cosine: [0.8944271909999159, 0.0, 0.4472135954999579]
g_left: 0.3
g_right: 1.0
y0_poly: [{y0!r}, 1.0]
controller: {{mode: {mode}, rho: {rho!r}, delta: 0.05}}
out_prefix: {d / 'o'}
""")
    cfg = load_config(path)
    sys = assemble(cfg.spec, 5)
    tr = simulate(sys, cfg.controller, cfg.sim, 0.05)
    ok = (check_growth(tr, *growth_constants(sys, cfg.controller, 0.05)).holds
          and check_energy(tr, analyze(cfg.spec, 5)).holds)
    assert main(["simulate", str(path)]) == (0 if ok else 1)


def test_exponent_without_dot_is_a_number():
    cfg = parse_config(MINIMAL + "dt: 1e-3\ny0_poly: [1e-05, -2E1]\n")
    assert cfg.sim.dt == 1e-3
    assert cfg.spec.y0.coeffs == (1e-05, -20.0)
