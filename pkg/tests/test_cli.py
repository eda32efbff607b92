import os

import pytest

from agf import AgfError
from agf.cli import main, parse_config


@pytest.fixture(scope="module")
def budget_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cal") / "budgets.json"
    assert main(["calibrate", "--budget", str(path)]) == 0
    return str(path)


def test_parse_config_grammar(tmp_path):
    path = tmp_path / "cfg"
    path.write_text(
        "# leading comment\n"
        "seed = 7\n"
        "h = 0.5   # trailing comment\n"
        "h = 1.0\n"
        "\n")
    cfg = parse_config(path)
    assert cfg == {"seed": ["7"], "h": ["0.5", "1.0"]}
    bad = tmp_path / "bad"
    bad.write_text("just words\n")
    with pytest.raises(AgfError):
        parse_config(bad)


def test_malformed_config_exits_2(tmp_path):
    bad = tmp_path / "bad"
    bad.write_text("no equals sign here\n")
    code = main(["--config", str(bad), "run", "modulus-lemmas",
                 "--out", str(tmp_path / "out")])
    assert code == 2


def test_usage_errors_exit_2(tmp_path):
    assert main(["run", "no-such-experiment", "--out", str(tmp_path)]) == 2
    assert main([]) == 2


def test_corpus_written_deterministically(tmp_path, capsys):
    out1, out2 = tmp_path / "c1", tmp_path / "c2"
    assert main(["corpus", "--out", str(out1)]) == 0
    hash1 = capsys.readouterr().out.splitlines()[-1]
    assert main(["corpus", "--out", str(out2)]) == 0
    hash2 = capsys.readouterr().out.splitlines()[-1]
    assert hash1 == hash2 and hash1.startswith("corpus hash:")
    m1 = (out1 / "manifest.csv").read_bytes()
    m2 = (out2 / "manifest.csv").read_bytes()
    assert m1 == m2
    names = sorted(p.name for p in out1.glob("*.agf"))
    assert names  # at least one member on disk
    for name in names:
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_run_hard_tier_without_budget_file(tmp_path):
    out = tmp_path / "out"
    code = main(["run", "modulus-lemmas", "--out", str(out)])
    assert code == 0
    assert (out / "reports.csv").exists()
    assert (out / "summary.txt").exists()
    assert (out / "plot.gp").exists()
    header = (out / "reports.csv").read_text().splitlines()[0]
    assert header == ("inequality_id,function_id,params_json,lhs,rhs,"
                      "ratio,budget,verdict,truncation")


def test_run_budget_tier_requires_budget_file(tmp_path):
    code = main(["run", "rearr-estimate", "--out", str(tmp_path / "out"),
                 "--budget", str(tmp_path / "missing.json")])
    assert code == 2


def test_calibrate_refuses_overwrite_without_force(tmp_path):
    path = tmp_path / "budgets.json"
    assert main(["calibrate", "--budget", str(path)]) == 0
    assert main(["calibrate", "--budget", str(path)]) == 2
    assert main(["calibrate", "--budget", str(path), "--force"]) == 0


def test_run_with_calibrated_budgets_passes(tmp_path, budget_file):
    out = tmp_path / "out"
    code = main(["run", "rearr-estimate", "--out", str(out),
                 "--budget", budget_file])
    assert code == 0
    assert (out / "reports.csv").exists()


def test_budget_corpus_hash_mismatch_exits_2(tmp_path, budget_file):
    code = main(["run", "rearr-estimate", "--out", str(tmp_path / "out"),
                 "--budget", budget_file, "--seed", "12345"])
    assert code == 2


def test_runs_are_byte_identical_across_threads(tmp_path, budget_file):
    outs = []
    for threads in ("1", "3"):
        out = tmp_path / f"t{threads}"
        code = main(["run", "limit-sweep", "--out", str(out),
                     "--budget", budget_file, "--threads", threads,
                     "--m-max", "4"])
        assert code == 0
        outs.append(out)
    for name in ("reports.csv", "traces.csv", "summary.txt"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_threads_env_fallback(tmp_path, budget_file, monkeypatch):
    monkeypatch.setenv("AGF_THREADS", "2")
    out = tmp_path / "out"
    assert main(["run", "modulus-lemmas", "--out", str(out)]) == 0


def test_report_subcommand(tmp_path):
    out = tmp_path / "out"
    assert main(["report", "--out", str(out)]) == 2  # nothing written yet
    assert main(["run", "modulus-lemmas", "--out", str(out)]) == 0
    assert main(["report", "--out", str(out)]) == 0


def test_config_supplies_defaults(tmp_path, budget_file):
    cfg = tmp_path / "cfg"
    cfg.write_text(f"budget = {budget_file}\nthreads = 2\nm-max = 3\n")
    out = tmp_path / "out"
    code = main(["--config", str(cfg), "run", "limit-sweep", "--out", str(out)])
    assert code == 0
    assert (out / "traces.csv").exists()
