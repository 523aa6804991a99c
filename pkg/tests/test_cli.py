import json

import pytest

from pmcheck.cli import ConfigError, RunConfig, load_config, main, run


def write(tmp_path, text):
    p = tmp_path / "run.toml"
    p.write_text(text)
    return p


def test_claim_only_config_passes(tmp_path, cache_env, capsys):
    cfg = write(tmp_path, 'checks = ["claim"]\n')
    out = tmp_path / "out"
    assert main(["all", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    records = [json.loads(line) for line in (out / "reports.jsonl").read_text().splitlines()]
    assert records and all(r["verdict"] == "pass" for r in records)
    assert (out / "summary.csv").read_text().startswith("check,tower,params,verdict")
    assert "checks passed" in capsys.readouterr().out


def test_empty_selection_is_success(tmp_path, cache_env):
    cfg = write(tmp_path, "checks = []\n")
    assert main(["all", "--config", str(cfg), "--out", str(tmp_path / "o"), "--quiet"]) == 0
    assert (tmp_path / "o" / "reports.jsonl").read_text() == ""


def test_non_prime_p_is_rejected_with_line(tmp_path, capsys):
    cfg = write(tmp_path, 'seed = 1\np = 4\n')
    assert main(["all", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "run.toml:2" in err and "'p'" in err
    with pytest.raises(ConfigError):
        load_config(cfg)


@pytest.mark.parametrize("text", ["ks = [3]\n", "bogus = 1\n", "workers = 'x'\n", "checks = ['nope']\n", "towers = ['Q(i)']\n", "p = \n"])
def test_bad_configs(tmp_path, text):
    assert main(["all", "--config", str(write(tmp_path, text))]) == 2


def test_missing_config_file(tmp_path):
    assert main(["all", "--config", str(tmp_path / "absent.toml")]) == 2


def test_failing_check_exits_one(tmp_path, cache_env, capsys):
    cfg = write(tmp_path, 'checks = ["dr"]\nlevels = [8]\ndr_mode = "literal"\n')
    assert main(["all", "--config", str(cfg), "--tower", "p2-sqrt5"]) == 1
    assert "witness=" in capsys.readouterr().out


def test_reports_are_deterministic(tmp_path, cache_env):
    cfg = 'checks = ["pseudomeasure", "special-g"]\nlevels = [9, 21]\ncocycle_samples = 6\n'
    bodies = []
    for i, workers in enumerate((1, 2, 1)):
        out = tmp_path / f"o{i}"
        assert main(["all", "--config", str(write(tmp_path, cfg)), "--tower", "p3-zeta7plus", "--seed", "7", "--workers", str(workers), "--out", str(out), "--quiet"]) == 0
        bodies.append((out / "reports.jsonl").read_bytes() + (out / "summary.csv").read_bytes())
    assert bodies[0] == bodies[1] == bodies[2]


def test_subcommand_selects_one_check(cache_env):
    bundle = run(RunConfig(checks=["special-g"]))
    assert [r["check"] for r in bundle.records] == ["special-g", "special-g"]
    assert bundle.ok


def test_cache_admin(cache_env, capsys):
    assert main(["cache", "clear"]) == 0
    assert "nothing to clear" in capsys.readouterr().out
    assert main(["cache", "build"]) == 0
    assert main(["cache", "verify"]) == 0
    bfile = cache_env / "bernoulli.txt"
    bfile.write_text(bfile.read_text().replace("\n6 1/42\n", "\n6 1/41\n"))
    capsys.readouterr()
    assert main(["cache", "verify"]) == 1
    assert "B_6 cached as 1/41" in capsys.readouterr().out
    mfile = cache_env / "moebius.json"
    raw = json.loads(mfile.read_text())
    raw["groups"]["C3"][-1][1] = 5
    mfile.write_text(json.dumps(raw))
    assert main(["cache", "verify"]) == 1
    assert "C3 subgroup" in capsys.readouterr().out
    assert main(["cache", "clear"]) == 0
    assert not bfile.exists()


def test_corrupted_moebius_cache_breaks_claim(tmp_path, cache_env):
    assert main(["cache", "build"]) == 0
    mfile = cache_env / "moebius.json"
    raw = json.loads(mfile.read_text())
    raw["groups"]["C3"][-1][1] = 0
    mfile.write_text(json.dumps(raw))
    assert main(["claim", "--quiet"]) == 1
