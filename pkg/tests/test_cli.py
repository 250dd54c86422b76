"""Command-line behavior: wiring, formats, exit codes, reproducibility."""

import subprocess
import sys

import numpy as np
import pytest

import geodepth.cli as cli
from geodepth import RejectionStall
from geodepth.tableio import read_table


@pytest.fixture
def euclid_file(tmp_path):
    gen = np.random.default_rng(0)
    p = tmp_path / "data.csv"
    np.savetxt(p, gen.standard_normal((30, 3)), delimiter=",")
    return str(p)


@pytest.fixture
def sphere_file(tmp_path):
    gen = np.random.default_rng(1)
    X = gen.standard_normal((25, 3))
    X /= np.linalg.norm(X, axis=1)[:, None]
    p = tmp_path / "sph.csv"
    np.savetxt(p, X, delimiter=",")
    return str(p)


def run(args):
    return cli.main(args)


# ---------------------------------------------------------------------------
# depth
# ---------------------------------------------------------------------------


def test_depth_query_self(euclid_file, tmp_path):
    out = str(tmp_path / "d.csv")
    code = run(
        ["depth", "--manifold", "euclid:3", "--in", euclid_file, "--query-self", "--out", out]
    )
    assert code == 0
    t = read_table(out)
    assert t.columns == ("query_index", "depth", "method", "n", "skipped_pairs")
    assert len(t.rows) == 30
    assert t.meta["seed"] == "0"
    assert "command" in t.meta and "manifold" in t.meta
    depths = t.column("depth")
    assert all(0.0 <= v <= 1.0 for v in depths)


def test_depth_external_queries_and_methods(euclid_file, sphere_file, tmp_path):
    q = str(tmp_path / "q.csv")
    np.savetxt(q, np.zeros((2, 3)), delimiter=",")
    out = str(tmp_path / "d.csv")
    assert run(["depth", "--manifold", "euclid:3", "--in", euclid_file,
                "--queries", q, "--out", out]) == 0
    assert len(read_table(out).rows) == 2
    for method in ("pd1", "pd2"):
        assert run(["depth", "--manifold", "euclid:3", "--in", euclid_file,
                    "--queries", q, "--method", method, "--out", out]) == 0
        assert read_table(out).column("method")[0] in ("PD1", "PD2")
    qs = str(tmp_path / "qs.csv")
    np.savetxt(qs, np.array([[1.0, 0, 0]]), delimiter=",")
    assert run(["depth", "--manifold", "sphere:3", "--in", sphere_file,
                "--queries", qs, "--method", "atd", "--out", out]) == 0


def test_depth_validation_failures(euclid_file, tmp_path, capsys):
    out = str(tmp_path / "d.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0,2.0,3.0\n1.0,zap,3.0\n")
    assert run(["depth", "--manifold", "euclid:3", "--in", str(bad),
                "--query-self", "--out", out]) == 2
    assert "line 2" in capsys.readouterr().err
    assert run(["depth", "--manifold", "euclid:3", "--in",
                str(tmp_path / "missing.csv"), "--query-self"]) == 2
    assert run(["depth", "--manifold", "noSuch:3", "--in", euclid_file,
                "--query-self"]) == 2
    assert run(["depth", "--manifold", "euclid:3", "--in", euclid_file]) == 2
    assert run(["depth", "--manifold", "euclid:3", "--in", euclid_file,
                "--query-self", "--method", "warp"]) == 2
    assert run(["depth", "--manifold", "euclid:3", "--in", euclid_file,
                "--query-self", "--format", "yaml"]) == 2


def test_depth_names_bad_spd_row(tmp_path, capsys):
    rows = np.tile(np.eye(2).reshape(-1), (4, 1))
    rows[2] = [1.0, 0.0, 0.0, -5.0]  # negative eigenvalue
    p = tmp_path / "spd.csv"
    np.savetxt(p, rows, delimiter=",")
    assert run(["depth", "--manifold", "spd:2", "--in", str(p), "--query-self"]) == 2
    assert "row 2" in capsys.readouterr().err


def test_depth_degenerate_exit(tmp_path):
    p = tmp_path / "anti.csv"
    np.savetxt(p, np.array([[1.0, 0, 0], [-1.0, 0, 0]]), delimiter=",")
    code = run(["depth", "--manifold", "sphere:3", "--in", str(p), "--query-self"])
    assert code == 3


def test_depth_thread_count_does_not_change_bytes(euclid_file, tmp_path):
    a = str(tmp_path / "a.csv")
    b = str(tmp_path / "b.csv")
    run(["depth", "--manifold", "euclid:3", "--in", euclid_file, "--query-self",
         "--threads", "1", "--out", a])
    run(["depth", "--manifold", "euclid:3", "--in", euclid_file, "--query-self",
         "--threads", "4", "--out", b])
    assert open(a, "rb").read() == open(b, "rb").read()


def test_depth_pair_budget(euclid_file, tmp_path):
    out = str(tmp_path / "d.csv")
    assert run(["depth", "--manifold", "euclid:3", "--in", euclid_file,
                "--query-self", "--pair-budget", "2000", "--out", out]) == 0
    t = read_table(out)
    assert t.meta["pair_budget"] == "2000"


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def test_simulate_mixture_labels(tmp_path):
    out = str(tmp_path / "s.csv")
    assert run(["simulate", "--preset", "torus-mvm-mixture", "--n", "60",
                "--seed", "1", "--out", out]) == 0
    t = read_table(out)
    assert t.columns == ("index", "dist_to_ref", "depth", "component")
    labels = set(t.column("component"))
    assert labels <= {0, 1} and len(t.rows) == 60


def test_simulate_plain_preset(tmp_path):
    out = str(tmp_path / "s.csv")
    assert run(["simulate", "--preset", "spd-wishart", "--n", "40",
                "--seed", "7", "--out", out]) == 0
    t = read_table(out)
    assert t.columns == ("index", "dist_to_ref", "depth")
    assert t.meta["preset"] == "spd-wishart"


def test_simulate_profile_columns(tmp_path):
    out = str(tmp_path / "p.csv")
    assert run(["simulate", "--preset", "gauss-k5", "--n", "200",
                "--profile-ray", "e1", "--lambda", "0:3:0.5", "--out", out]) == 0
    t = read_table(out)
    assert t.columns == ("lambda", "dist", "depth_x2", "pd1", "pd2_x4", "tail_ref")
    lam = t.column("lambda")
    assert lam == sorted(lam) and len(lam) == 7
    # depth falls off along the ray while the tail reference tracks it
    assert t.column("depth_x2")[0] > t.column("depth_x2")[-1]


def test_simulate_unknown_preset(tmp_path, capsys):
    assert run(["simulate", "--preset", "twilight", "--n", "10"]) == 2
    assert "twilight" in capsys.readouterr().err


def test_simulate_stall_maps_to_exit_4(monkeypatch, tmp_path):
    def boom(name):
        raise RejectionStall("acceptance rate collapsed")

    monkeypatch.setattr(cli, "preset", boom)
    assert run(["simulate", "--preset", "torus-mvm-mixture", "--n", "10"]) == 4


def test_simulate_svg(tmp_path):
    out = str(tmp_path / "s.svg")
    assert run(["simulate", "--preset", "gauss-k2", "--n", "50",
                "--format", "svg", "--out", out]) == 0
    body = open(out).read()
    assert body.startswith("<svg ") and "<circle" in body


# ---------------------------------------------------------------------------
# asym
# ---------------------------------------------------------------------------


def test_asym_variance_curve(tmp_path):
    out = str(tmp_path / "vc.csv")
    assert run(["asym", "--type", "variance-curve", "--k", "1,2", "--l", "0:2:1",
                "--N", "20000", "--out", out]) == 0
    t = read_table(out)
    assert t.columns == ("k", "l", "sigma2", "se")
    assert len(t.rows) == 6
    by_kl = {(r[0], r[1]): r[2] for r in t.rows}
    assert by_kl[(1, 0.0)] == 1.0 and by_kl[(2, 0.0)] == 1.0
    assert by_kl[(2, 2.0)] > by_kl[(1, 2.0)]  # variance grows with dimension


def test_asym_clt_row(tmp_path):
    out = str(tmp_path / "clt.csv")
    assert run(["asym", "--type", "clt", "--preset", "gauss-k2", "--x", "1,0",
                "--n", "100", "--reps", "100", "--ref-pairs", "100000",
                "--N", "50000", "--out", out]) == 0
    t = read_table(out)
    assert len(t.rows) == 1
    row = dict(zip(t.columns, t.rows[0]))
    assert row["n"] == 100 and row["reps"] == 100
    assert row["var_scaled"] >= 0 and row["var_projection"] >= 0
    assert run(["asym", "--type", "clt", "--preset", "gauss-k2", "--n", "100",
                "--reps", "100", "--format", "svg"]) == 2  # no svg form


def test_asym_requires_known_type(tmp_path):
    assert run(["asym", "--type", "mystery"]) == 2
    assert run(["asym", "--type", "clt"]) == 2  # clt needs a preset


def test_asym_variance_curve_reproducible(tmp_path):
    a = str(tmp_path / "a.csv")
    b = str(tmp_path / "b.csv")
    args = ["asym", "--type", "variance-curve", "--k", "2", "--l", "0:1:0.5",
            "--N", "20000", "--seed", "9"]
    run(args + ["--out", a])
    run(args + ["--out", b])
    assert open(a, "rb").read() == open(b, "rb").read()


# ---------------------------------------------------------------------------
# config file and entry point
# ---------------------------------------------------------------------------


def test_config_file_supplies_defaults(tmp_path):
    cfgp = tmp_path / "run.cfg"
    cfgp.write_text('preset = "gauss-k2"\nn = 40\nseed = 4\n')
    out = str(tmp_path / "c.csv")
    assert run(["simulate", "--config", str(cfgp), "--out", out]) == 0
    t = read_table(out)
    assert t.meta["seed"] == "4" and len(t.rows) == 40


def test_config_flag_overrides_file(tmp_path):
    cfgp = tmp_path / "run.cfg"
    cfgp.write_text('preset = "gauss-k2"\nn = 40\nseed = 4\n')
    out = str(tmp_path / "c.csv")
    assert run(["simulate", "--config", str(cfgp), "--seed", "11", "--out", out]) == 0
    assert read_table(out).meta["seed"] == "11"


def test_module_entry_point(tmp_path, euclid_file):
    out = str(tmp_path / "d.csv")
    proc = subprocess.run(
        [sys.executable, "-m", "geodepth.cli", "depth", "--manifold", "euclid:3",
         "--in", euclid_file, "--query-self", "--out", out],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "wrote" in proc.stdout
