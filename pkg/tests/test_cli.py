import json

import pytest

from entiredyn.cli import build_parser, parse_complex, run


@pytest.fixture(autouse=True)
def _in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)


def test_parse_complex():
    assert parse_complex("1,0") == 1
    assert parse_complex("-1") == -1
    assert parse_complex("0.5,-2") == 0.5 - 2j


def test_verify_shifted_sine(capsys):
    assert run(["verify", "--f", "1+sin(z-1)", "--a", "-1", "--b", "2", "--p", "1"]) == 0
    doc = json.loads(open("verify_report.json").read())
    assert doc["all_passed"] and doc["unimodular"] and doc["geometric_sum_bound"]
    assert {c["seed"] for c in doc["checks"]} == {42}
    assert "PASS" in capsys.readouterr().out


def test_verify_exp_fails():
    assert run(["verify", "--f", "exp(z)", "--a", "-1", "--b", "0", "--p", "1"]) == 1
    doc = json.loads(open("verify_report.json").read())
    fe = [c for c in doc["checks"] if c["identity"].startswith("functional")][0]
    assert fe["failures"]


def test_verify_poly_mode():
    argv = ["verify", "--f", "1+sin(z-1)", "--g", "1-sin(z-1)", "--poly", "-1;1", "--a", "-1", "--b", "0"]
    assert run(argv + ["--out", "q.json"]) == 0
    names = [c["identity"] for c in json.loads(open("q.json").read())["checks"]]
    assert any(n.startswith("Q recurrence") for n in names)
    wrong = ["verify", "--f", "1+sin(z-1)", "--g", "1-sin(z-1)", "--poly", "0;1", "--a", "-1", "--b", "0"]
    assert run(wrong) == 1


def test_verify_g_without_poly_is_usage_error(capsys):
    assert run(["verify", "--f", "sin(z)", "--g", "-sin(z)"]) == 2
    assert "--poly" in capsys.readouterr().err


def test_classify_point(capsys):
    assert run(["classify-point", "--f", "1+sin(z-1)", "--z", "1,0"]) == 0
    assert capsys.readouterr().out.strip() == "Bounded"
    assert run(["classify-point", "--f", "sin(z)", "--z", "0,10"]) == 0
    assert capsys.readouterr().out.strip() == "Escaping"
    assert run(["classify-point", "--f", "sin(z)", "--z", "-0.5,-10", "--which", "g"]) == 0
    assert capsys.readouterr().out.strip() == "Escaping"


def test_parse_error_exit_code(capsys):
    assert run(["classify-point", "--f", "sin(§)", "--z", "0"]) == 2
    assert "position 4" in capsys.readouterr().err


@pytest.mark.parametrize("a", ["1", "0", "1,0"])
def test_rejects_a_zero_or_one(a, capsys):
    assert run(["compare", "--f", "sin(z)", "--a", a, "--width", "4", "--height", "4"]) == 2
    assert "a != 0, 1" in capsys.readouterr().err


def test_usage_errors():
    assert run([]) == 2
    assert run(["verify"]) == 2
    assert run(["render", "--f", "sin(z)", "--width", "0"]) == 2
    assert run(["render", "--f", "sin(z)", "--out", "no/such/dir/x.ppm", "--width", "2", "--height", "2"]) == 2


def test_compare_writes_outputs(capsys):
    argv = ["compare", "--f", "1+sin(z-1)", "--a", "-1", "--b", "2", "--width", "32", "--height", "32"]
    assert run(argv) == 0
    doc = json.loads(open("agreement.json").read())
    assert doc["decided_agreement_rate"] >= 0.99
    assert sum(map(sum, doc["confusion"])) == 32 * 32
    assert open("f.ppm", "rb").read().startswith(b"P6\n32 32\n255\n")
    assert "agreement rate" in capsys.readouterr().out


def test_compare_threshold_failure():
    # sin and g = -sin about a shifted centre are not a commuting pair: b = 3
    argv = ["compare", "--f", "sin(z)", "--a", "-1", "--b", "3", "--width", "32", "--height", "32",
            "--threshold", "1.0"]
    assert run(argv) == 1


def test_render_and_boundary():
    argv = ["render", "--f", "sin(z)", "--width", "16", "--height", "8", "--out", "s.ppm",
            "--boundary-out", "b.ppm"]
    assert run(argv) == 0
    data = open("s.ppm", "rb").read()
    assert data.startswith(b"P6\n16 8\n255\n") and len(data) == len(b"P6\n16 8\n255\n") + 16 * 8 * 3
    assert open("b.ppm", "rb").read().startswith(b"P6\n16 8\n255\n")


def test_same_argv_same_bytes(tmp_path):
    argv = ["compare", "--f", "1+(z-1)*exp((z-1)^2)", "--a", "-1", "--b", "2", "--width", "24",
            "--height", "24"]
    outputs = []
    for k in range(2):
        assert run(argv + ["--out-f", f"f{k}.ppm", "--out-g", f"g{k}.ppm", "--report", f"r{k}.json"]) == 0
        outputs.append([open(f"{n}{k}.{e}", "rb").read() for n, e in (("f", "ppm"), ("g", "ppm"), ("r", "json"))])
    assert outputs[0] == outputs[1]
    v = ["verify", "--f", "1+sin(z-1)", "--a", "-1", "--b", "2", "--seed", "7"]
    run(v + ["--out", "v0.json"])
    run(v + ["--out", "v1.json"])
    assert open("v0.json", "rb").read() == open("v1.json", "rb").read()


@pytest.mark.parametrize("command", ["render", "verify", "compare", "classify-point"])
def test_help_lists_defaults(command):
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices[command]
    text = " ".join(sub.format_help().split())
    for action in sub._actions:
        if action.dest in ("help", "f", "z"):
            continue
        assert action.option_strings[0] in text
        assert f"(default: {action.default})" in text
