import json
from pathlib import Path

import pytest

from primcalc import cli
from primcalc.models import settings as settings_mod

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name):
    return str(FIXTURES / name)


@pytest.fixture(autouse=True)
def isolated_settings(monkeypatch, tmp_path):
    settings = settings_mod.PrimcalcSettings(str(tmp_path / "config.cfg"))
    monkeypatch.setattr(settings_mod, "_settings_instance", settings)
    monkeypatch.delenv(settings_mod.OUTPUT_DIR_ENV, raising=False)
    return settings


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def test_prim_dot_has_one_specialization_edge(capsys):
    code, out = run(capsys, "prim", fixture("dumbbell.graph"), "--dot")
    assert code == 0
    assert out.startswith("digraph prim {")
    assert out.count("->") == 1
    assert "t1 -> t0;" in out
    assert 't0 [label="{v}' in out and 't1 [label="{v,w}' in out


def test_tails_text(capsys):
    code, out = run(capsys, "tails", fixture("dumbbell.graph"))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("{v} Per=1")
    assert lines[1].startswith("{v,w} Per=1")


def test_tails_json(capsys):
    code, out = run(capsys, "tails", fixture("twoloops.graph"), "--format", "json")
    assert code == 0
    (tail,) = json.loads(out)
    assert tail["vertices"] == ["v"] and tail["per"] == 0


def test_dcheck_full_dset_passes(capsys):
    code, out = run(capsys, "dcheck", fixture("torus.kgraph"), "--dset", fixture("full.dset"))
    assert code == 0
    assert "FAIL" not in out


def test_dcheck_failure_exit_code(capsys):
    code, _ = run(capsys, "dcheck", fixture("subshift.kgraph"), "--dset", "v = FULL\nw = EMPTY")
    assert code == 1


def test_converge_example(capsys):
    code, out = run(capsys, "converge", fixture("dumbbell.graph"),
                    "--seq", "...({v,w},1/3)...", "--target", "({v},0)")
    assert code == 0
    assert out.strip() == "true"


def test_converge_false_is_an_answer_unless_strict(capsys):
    args = ["converge", fixture("dumbbell.graph"), "--seq", "...({v},1/5)...", "--target", "({v},1/3)"]
    code, out = run(capsys, *args)
    assert (code, out.strip()) == (0, "false")
    code, _ = run(capsys, *args, "--strict")
    assert code == 1


def test_is_open_and_sandwich(capsys):
    code, out = run(capsys, "is-open", fixture("dumbbell.graph"), "--open", fixture("dumbbell.open"))
    assert (code, out.strip()) == (0, "true")
    code, out = run(capsys, "is-open", fixture("dumbbell.graph"), "--open", "{v} = FULL", "--strict")
    assert (code, out.strip()) == (1, "false")
    code, out = run(capsys, "sandwich", fixture("dumbbell.graph"), "--open", fixture("dumbbell.open"))
    assert code == 0
    assert out.strip().splitlines() == ["U = {}", "V = {w}"]


def test_gauge_invariant_ideals(capsys):
    code, out = run(capsys, "ideals", fixture("dumbbell.graph"), "--gauge-invariant")
    assert code == 0
    assert out.strip().splitlines() == ["{}", "{w}", "{v,w}"]


def test_ideals_need_uniform_fibers(capsys):
    code, _ = run(capsys, "ideals", fixture("dumbbell.graph"), "--open", fixture("dumbbell.open"))
    assert code == 2


def test_closure_text(capsys):
    code, out = run(capsys, "closure", fixture("dumbbell.graph"), "--points", "({v,w},1/3)")
    assert code == 0
    assert "v = FULL" in out


def test_kvalidate_json(capsys):
    code, out = run(capsys, "kvalidate", fixture("subshift.kgraph"), "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["pass"] is True
    assert all({"name", "value", "tolerance", "pass"} <= set(c) for c in data["checks"])


def test_kvalidate_dot_draws_the_skeleton(capsys):
    code, out = run(capsys, "kvalidate", fixture("torus.kgraph"), "--dot")
    assert code == 0
    assert "color=blue" in out and "color=red" in out


def test_periodicity_of_the_torus_vertex(capsys):
    code, out = run(capsys, "periodicity", fixture("torus.kgraph"), "--vertex", "v")
    assert code == 0
    assert out.strip() == "v: span{(1,0), (0,1)}"


def test_harmonious_dumbbell(capsys):
    code, out = run(capsys, "harmonious", fixture("dumbbell.graph"), "--tail", "v", "--truncation", "3",
                    "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["pass"] is True
    assert data["notes"]["family"]["base"] == "(e)^inf"


def test_repcheck_is_reproducible(capsys):
    args = ["repcheck", fixture("dumbbell.graph"), "--base", "(e)", "--z", "1/5", "--seed", "7",
            "--count", "4", "--truncation", "2", "--format", "json"]
    code, first = run(capsys, *args)
    assert code == 0
    code, second = run(capsys, *args)
    assert first == second
    assert json.loads(first)["pass"] is True


def test_output_goes_to_the_output_directory(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv(settings_mod.OUTPUT_DIR_ENV, str(tmp_path / "out"))
    code, out = run(capsys, "prim", fixture("dumbbell.graph"), "--format", "json", "--output", "prim.json")
    assert code == 0 and out == ""
    data = json.loads((tmp_path / "out" / "prim.json").read_text(encoding="utf-8"))
    assert data["fibers"] == ["circle", "circle"]


def test_input_errors_exit_with_two(capsys, tmp_path):
    code, _ = run(capsys, "tails", str(tmp_path / "missing.graph"))
    assert code == 2
    bad = tmp_path / "bad.graph"
    bad.write_text("graph bad\nedge e v\n", encoding="utf-8")
    code, _ = run(capsys, "tails", str(bad))
    assert code == 2
    code, _ = run(capsys, "tails", fixture("torus.kgraph"))
    assert code == 2


def test_repcheck_outside_the_isotropy_exits_with_two(capsys):
    # (a)^inf on two loops has trivial isotropy, so 2Z is out of range
    code, _ = run(capsys, "repcheck", fixture("twoloops.graph"), "--base", "(a)", "--z", "1/5",
                  "--count", "2", "--truncation", "1")
    assert code == 2
    code, _ = run(capsys, "repcheck", fixture("dumbbell.graph"), "--base", "(e)", "--z", "1/5",
                  "--count", "2", "--truncation", "1")
    assert code == 0


def test_flag_overrides_are_restored(capsys, isolated_settings):
    run(capsys, "tails", fixture("dumbbell.graph"), "--fft-grid", "128", "--tolerance", "0.001")
    assert isolated_settings.get_int("Numerics", "fft_grid") == 4096
    assert isolated_settings.get_float("Numerics", "zero_tolerance") == 1e-6


def test_unknown_flags_are_rejected():
    with pytest.raises(SystemExit):
        cli.main(["tails", fixture("dumbbell.graph"), "--colour"])


def test_run_config_output_paths(isolated_settings, tmp_path):
    cfg = cli.RunConfig("prim", "x.graph", output=str(tmp_path / "abs.dot"))
    assert cfg.resolve_output(isolated_settings) == tmp_path / "abs.dot"
    cfg = cli.RunConfig("prim", "x.graph", output="rel.dot")
    assert cfg.resolve_output(isolated_settings) == Path("primcalc-out") / "rel.dot"
    assert cli.RunConfig("prim", "x.graph").resolve_output(isolated_settings) is None


def test_unknown_command_in_dispatch():
    assert cli.dispatch(cli.RunConfig("frobnicate", "x")) == cli.EXIT_INPUT
