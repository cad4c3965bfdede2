import io
import json
from pathlib import Path

import pytest

from relpca import cli

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(*argv):
    buf = io.StringIO()
    code = cli.run([str(a) for a in argv], buf)
    return code, buf.getvalue()


@pytest.mark.parametrize(
    "command, fixture",
    [("check", "sk"), ("check", "trivial"), ("slice", "slices"), ("product", "sk"), ("density", "density")],
)
def test_good_fixtures_exit_zero(command, fixture):
    code, text = run(command, FIXTURES / f"{fixture}.json", "--format", "json")
    report = json.loads(text)
    assert code == 0 and report["results"]
    assert report["summary"]["Refuted"] == 0


def test_refuted_fixture_exits_one():
    code, text = run("check", FIXTURES / "refuted.json", "--format", "json")
    assert code == 1 and json.loads(text)["summary"]["Refuted"] == 2


def test_input_errors_exit_two(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert run("check", bad)[0] == 2
    assert run("check", tmp_path / "missing.json")[0] == 2
    dangling = tmp_path / "dangling.json"
    data = json.loads((FIXTURES / "sk.json").read_text(encoding="utf-8"))
    for spec in data.get("morphisms", {}).values():
        spec["source"] = "NoSuchObject"
    dangling.write_text(json.dumps(data), encoding="utf-8")
    assert run("synthesize", dangling)[0] == 2


def test_unknown_command_is_rejected():
    with pytest.raises(SystemExit) as err:
        run("frobnicate", FIXTURES / "sk.json")
    assert err.value.code == 2


def test_seeded_reports_are_byte_identical():
    args = ("check", FIXTURES / "sk.json", "--format", "json", "--seed", 7)
    assert run(*args)[1] == run(*args)[1]


def test_timings_are_opt_in():
    _, plain = run("check", FIXTURES / "trivial.json", "--format", "json")
    _, timed = run("check", FIXTURES / "trivial.json", "--format", "json", "--timings")
    assert all("seconds" not in r for r in json.loads(plain)["results"])
    assert all("seconds" in r for r in json.loads(timed)["results"])


def test_synthesized_certificates_replay(tmp_path):
    certs = tmp_path / "certs.json"
    assert run("synthesize", FIXTURES / "sk.json", "--out", certs)[0] == 0
    stored = json.loads(certs.read_text(encoding="utf-8"))["certificates"]
    assert stored and all(c["verdict"] == "Proven" for c in stored)
    code, text = run("replay", FIXTURES / "sk.json", "--certificates", certs, "--format", "json")
    assert code == 0 and json.loads(text)["summary"]["Proven"] == len(stored)


def test_tampered_certificate_fails_replay(tmp_path):
    certs = tmp_path / "certs.json"
    run("synthesize", FIXTURES / "sk.json", "--out", certs)
    data = json.loads(certs.read_text(encoding="utf-8"))
    data["certificates"][0]["certificate"]["generators"][0]["element"] = "k"
    certs.write_text(json.dumps(data), encoding="utf-8")
    assert run("replay", FIXTURES / "sk.json", "--certificates", certs)[0] == 1


def test_replay_needs_a_certificates_file():
    assert run("replay", FIXTURES / "sk.json")[0] == 2


def test_text_format_lists_every_result():
    _, text = run("check", FIXTURES / "trivial.json")
    _, js = run("check", FIXTURES / "trivial.json", "--format", "json")
    for r in json.loads(js)["results"]:
        assert r["name"] in text
