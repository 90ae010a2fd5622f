import json
from pathlib import Path

import pytest

from tekit import fileio
from tekit.cli import main


@pytest.fixture(scope="module")
def topo_path():
    return str(fileio.bundled_topology_path("abilene"))


@pytest.fixture(scope="module")
def demand_files(topo_path, tmp_path_factory):
    out = tmp_path_factory.mktemp("demands") / "g"
    rc = main(["gen-demands", "--topo", topo_path, "--num-tms", "3",
               "--scale", "1.0", "--seed", "17", "--out", str(out)])
    assert rc == 0
    return out


def test_gen_demands_outputs(demand_files, topo_path):
    actual = Path(f"{demand_files}.actual.tms")
    predicted = Path(f"{demand_files}.predicted.tms")
    meta = Path(f"{demand_files}.meta.json")
    assert actual.exists() and predicted.exists() and meta.exists()
    blob = json.loads(meta.read_text())
    assert blob["seed"] == 17
    assert blob["num_tms"] == 3
    # epsilon=0: predicted byte-identical to actual
    assert actual.read_bytes() == predicted.read_bytes()
    # 3 lines of 144 values each (12 hosts)
    lines = actual.read_text().strip().splitlines()
    assert len(lines) == 3
    assert all(len(l.split()) == 144 for l in lines)


def test_gen_demands_deterministic(topo_path, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        rc = main(["gen-demands", "--topo", topo_path, "--num-tms", "2",
                   "--seed", "23", "--prediction-error", "0.2",
                   "--out", str(out)])
        assert rc == 0
    assert (a.parent / "a.actual.tms").read_bytes() == \
        (b.parent / "b.actual.tms").read_bytes()
    assert (a.parent / "a.predicted.tms").read_bytes() == \
        (b.parent / "b.predicted.tms").read_bytes()


def test_gen_demands_files_round_trip(demand_files, topo_path):
    topo = fileio.load_topology(topo_path)
    tms = fileio.read_tm_sequence(f"{demand_files}.actual.tms", topo.hosts)
    assert len(tms) == 3
    out = fileio.format_tm_line(tms[0])
    assert out == Path(f"{demand_files}.actual.tms").read_text().splitlines()[0]


def test_run_smoke(topo_path, demand_files, tmp_path):
    rc = main(["run", "--topo", topo_path,
               "--tms", f"{demand_files}.actual.tms",
               "--pred", f"{demand_files}.predicted.tms",
               "--algos", "spf", "--steps", "5", "--seed", "3",
               "--out", str(tmp_path / "runs")])
    assert rc == 0
    run_dirs = list((tmp_path / "runs").iterdir())
    assert len(run_dirs) == 1
    files = {p.name for p in run_dirs[0].iterdir()}
    assert {"spf.csv", "spf.summary.json", "comparison.csv"} <= files
    blob = json.loads((run_dirs[0] / "spf.summary.json").read_text())
    assert blob["algorithm"] == "spf"
    assert 0.0 <= blob["throughput_fraction"] <= 1.0
    assert "solver_times" not in blob  # timings excluded by default


def test_run_unknown_algorithm_exits_2(topo_path, demand_files, tmp_path,
                                       capsys):
    rc = main(["run", "--topo", topo_path,
               "--tms", f"{demand_files}.actual.tms",
               "--pred", f"{demand_files}.predicted.tms",
               "--algos", "bogus", "--out", str(tmp_path / "r")])
    assert rc == 2
    err = capsys.readouterr().err
    assert "valid names" in err and "semimcfraecke" in err


def test_run_missing_topology_exits_2(tmp_path, capsys):
    rc = main(["run", "--topo", str(tmp_path / "absent.topo"),
               "--tms", "x", "--pred", "y", "--algos", "spf"])
    assert rc == 2
    assert "topology" in capsys.readouterr().err


def test_run_deterministic_outputs(topo_path, demand_files, tmp_path):
    args = ["run", "--topo", topo_path,
            "--tms", f"{demand_files}.actual.tms",
            "--pred", f"{demand_files}.predicted.tms",
            "--algos", "semimcfraecke,ecmp", "--steps", "4",
            "--budget", "3", "--fail-num", "1", "--recovery", "local",
            "--seed", "5"]
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    d1 = next(out1.iterdir())
    d2 = next(out2.iterdir())
    assert {p.name for p in d1.iterdir()} == {p.name for p in d2.iterdir()}
    for p in sorted(d1.iterdir()):
        assert p.read_bytes() == (d2 / p.name).read_bytes(), p.name


def test_out_dir_env_override(topo_path, demand_files, tmp_path, monkeypatch):
    monkeypatch.setenv("TEKIT_OUT_DIR", str(tmp_path / "envruns"))
    rc = main(["run", "--topo", topo_path,
               "--tms", f"{demand_files}.actual.tms",
               "--pred", f"{demand_files}.predicted.tms",
               "--algos", "spf", "--steps", "2", "--seed", "1"])
    assert rc == 0
    assert (tmp_path / "envruns").exists()
    (run_dir,) = (tmp_path / "envruns").iterdir()
    assert (run_dir / "spf.csv").exists()


def test_run_with_flash_bursts(topo_path, demand_files, tmp_path):
    rc = main(["run", "--topo", topo_path,
               "--tms", f"{demand_files}.actual.tms",
               "--pred", f"{demand_files}.predicted.tms",
               "--algos", "semimcfraecke", "--steps", "6",
               "--flash-beta", "2.0", "--flash-lag", "2",
               "--flash-recovery-period", "3", "--recovery", "local",
               "--seed", "4", "--out", str(tmp_path / "runs")])
    assert rc == 0
    (run_dir,) = (tmp_path / "runs").iterdir()
    blob = json.loads((run_dir / "semimcfraecke.summary.json").read_text())
    assert blob["throughput_fraction"] > 0


def test_run_strict_phase_limit_exits_3(topo_path, demand_files, tmp_path,
                                        capsys):
    rc = main(["run", "--topo", topo_path,
               "--tms", f"{demand_files}.actual.tms",
               "--pred", f"{demand_files}.predicted.tms",
               "--algos", "mcf", "--steps", "2", "--max-phases", "1",
               "--strict", "--out", str(tmp_path / "r")])
    assert rc == 3
    assert "phase limit" in capsys.readouterr().err


def test_run_comparison_table_matches_golden(topo_path, tmp_path):
    """Full multi-algorithm recipe reproduces the frozen comparison table."""
    gen = tmp_path / "g"
    assert main(["gen-demands", "--topo", topo_path, "--num-tms", "3",
                 "--scale", "1.0", "--seed", "29", "--out", str(gen)]) == 0
    assert main(["run", "--topo", topo_path,
                 "--tms", f"{gen}.actual.tms", "--pred", f"{gen}.predicted.tms",
                 "--algos", "spf,ecmp,ksp,vlb,raecke,mcf,semimcfraecke",
                 "--budget", "3", "--scale", "1.0", "--steps", "50",
                 "--seed", "29", "--out", str(tmp_path / "runs")]) == 0
    (run_dir,) = (tmp_path / "runs").iterdir()
    golden = Path(__file__).parent / "data" / "golden_comparison.csv"
    assert (run_dir / "comparison.csv").read_bytes() == golden.read_bytes()


def test_run_dir_name_embeds_parameters(topo_path, demand_files, tmp_path):
    rc = main(["run", "--topo", topo_path,
               "--tms", f"{demand_files}.actual.tms",
               "--pred", f"{demand_files}.predicted.tms",
               "--algos", "spf", "--steps", "2", "--scale", "1.0",
               "--fail-num", "0", "--budget", "2", "--seed", "9",
               "--out", str(tmp_path / "runs")])
    assert rc == 0
    (run_dir,) = (tmp_path / "runs").iterdir()
    name = run_dir.name
    for token in ("abilene", "S1.0", "phi0", "b2", "seed9"):
        assert token in name
