import json

from probgraph.cli import main


def test_bounds_eval_minhash(capsys):
    assert main(["bounds", "eval", "--kind", "minhash-tail", "--k", "100",
                 "--size-x", "10", "--size-y", "10", "--t", "10"]) == 0
    out = capsys.readouterr().out
    assert "2*exp" in out and "3.85" in out


def test_bounds_eval_bf_and_out_of_regime(capsys):
    assert main(["bounds", "eval", "--kind", "bf-mse", "--bits", "1024",
                 "--b", "2", "--intersection", "20", "--t", "10"]) == 0
    assert "0.00208" in capsys.readouterr().out
    assert main(["bounds", "eval", "--kind", "bf-mse", "--bits", "64",
                 "--b", "4", "--intersection", "100000"]) == 2
    assert "out of regime" in capsys.readouterr().err


def test_bounds_eval_tc(capsys):
    assert main(["bounds", "eval", "--kind", "tc-khash", "--m", "3",
                 "--max-degree", "2", "--sum-d2", "12", "--k", "100",
                 "--t", "3"]) == 0
    assert "triangle-count bound" in capsys.readouterr().out


def test_sketch_dump_load_cycle(tmp_path, capsys):
    out = tmp_path / "sk.bin"
    assert main(["sketch", "dump", "--kronecker", "6,4,1", "--kind", "bloom",
                 "-s", "0.3", "-b", "2", "--out", str(out)]) == 0
    assert out.exists()
    assert main(["sketch", "load", str(out)]) == 0
    info = capsys.readouterr().out
    assert "bloom" in info and "n=64" in info


def test_stats_command(capsys):
    assert main(["stats", "--kronecker", "5,4,2"]) == 0
    assert "n=32" in capsys.readouterr().out


def test_bench_run_and_plot(tmp_path, capsys):
    cfg = {
        "inputs": [{"kronecker": {"scale": 5, "edge_factor": 5, "seed": 1},
                    "name": "k5"}],
        "problems": ["tc"],
        "estimators": ["bf_and"],
        "budgets": [0.3],
        "bf_b": [1],
        "seeds": [3],
        "repetitions": 2,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    records = tmp_path / "records.csv"
    assert main(["bench", "run", "--config", str(cfg_path),
                 "--out", str(records)]) == 0
    assert records.exists()
    plot = tmp_path / "plot.csv"
    assert main(["bench", "plot", "--records", str(records),
                 "--out", str(plot)]) == 0
    assert plot.read_text().count("\n") >= 2


def test_bench_scaling_strong(tmp_path):
    cfg = {
        "inputs": [{"kronecker": {"scale": 5, "edge_factor": 5, "seed": 1}}],
        "problems": ["tc"],
        "estimators": ["bf_l"],
        "budgets": [0.3],
        "seeds": [3],
        "repetitions": 1,
        "threads": [1, 2],
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "scaling.csv"
    assert main(["bench", "scaling", "--mode", "strong",
                 "--config", str(cfg_path), "--out", str(out)]) == 0
    assert out.exists()


def test_error_exit_code(tmp_path, capsys):
    missing = tmp_path / "nope.toml"
    assert main(["bench", "run", "--config", str(missing),
                 "--out", str(tmp_path / "r.csv")]) == 1
    assert "error:" in capsys.readouterr().err
