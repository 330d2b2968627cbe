import json

import pytest

from gruebleen_lab.__main__ import run_command
from gruebleen_lab.perm_worlds import DeckKind, build_cyclic_schema, build_deck_schema, half_swap
from gruebleen_lab.report import Status
from gruebleen_lab.schema_core import dump_schema_file
from gruebleen_lab.suites import DEMOS, SUITES


def entry(report, name):
    return next(e for e in report.entries if e.name == name)


@pytest.mark.parametrize("name", DEMOS)
def test_every_demo_passes(name):
    """Each demo runs with the default config and passes every check."""
    code, report = run_command(["demo", name])
    assert code == 0
    assert report.overall is Status.PASS
    assert report.command == f"demo {name}"


def test_demo_decks_passes():
    """The half-deck candidate search finds K together with X times K."""
    code, report = run_command(["demo", "decks"])
    assert code == 0
    assert entry(report, "candidate-restricted group order").measured == 8


def test_demo_hamiltonian_accuracy_checks():
    """RK4 shows fourth-order convergence and the oscillator comes back after 2 pi."""
    code, report = run_command(["demo", "hamiltonian"])
    assert code == 0
    ratio = entry(report, "halving the step shrinks the error about 16x")
    assert 8 <= ratio.measured <= 32
    assert entry(report, "oscillator returns after one period").measured <= 1e-8
    assert report.config.steps == 10_000


def test_verify_theorem_single_size():
    """--size restricts the theorem check to one state count."""
    code, report = run_command(["verify", "theorem", "--size", "4", "--seed", "3"])
    assert code == 0
    assert len(report.entries) == 1
    assert report.entries[0].witness["states"] == 4
    assert report.config.seed == 3


@pytest.mark.parametrize("size", ["0", "-2", "9"])
def test_verify_theorem_rejects_bad_sizes(size):
    """Sizes below one or above the exhaustive guard are input errors."""
    code, report = run_command(["verify", "theorem", "--size", size])
    assert code == 2
    assert report is None


def test_verify_theorem_size_follows_configured_guard(tmp_path):
    """Raising max_states_exhaustive in the config admits a larger --size."""
    config = tmp_path / "config.yaml"
    config.write_text("size_guards:\n  max_states_exhaustive: 3\n")
    assert run_command(["verify", "theorem", "--size", "4", "--config", str(config)])[0] == 2
    assert run_command(["verify", "theorem", "--size", "3", "--config", str(config)])[0] == 0


def test_report_written_to_file(tmp_path, capsys):
    """--json sends the report to a file and leaves stdout empty."""
    path = tmp_path / "report.json"
    code, _ = run_command(["demo", "measurement", "--json", str(path)])
    assert code == 0
    data = json.loads(path.read_text())
    assert data["overall"] == "PASS"
    assert data["report_version"] == 1
    assert capsys.readouterr().out == ""


def test_reports_are_deterministic():
    """Same command and seed give the same report body."""
    _, first = run_command(["demo", "shift", "--seed", "11"])
    _, second = run_command(["demo", "shift", "--seed", "11"])
    assert first.body_json() == second.body_json()


def test_maximal_group_of_cyclic_file(tmp_path):
    """The similarity group of a 3-cycle is the dihedral group of order 6."""
    path = tmp_path / "cyclic3.json"
    dump_schema_file(build_cyclic_schema(3, n_steps=2), str(path))
    code, report = run_command(["maximal-group", "--schema", str(path)])
    assert code == 0
    assert entry(report, "search mode").measured == "maximal"
    assert entry(report, "similarity group order").measured == 6


def test_maximal_group_of_half_deck_falls_back_to_candidates(tmp_path):
    """24 states exceed the exhaustive guard, so generated candidates are used."""
    path = tmp_path / "halfdeck4.json"
    dump_schema_file(build_deck_schema(4, DeckKind.HALF), str(path))
    for argv in (["maximal-group", "--schema", str(path)],
                 ["maximal-group", "--schema", str(path), "--candidates"]):
        code, report = run_command(argv)
        assert code == 0
        assert entry(report, "search mode").measured == "candidate-restricted"
        order = entry(report, "similarity group order")
        assert order.measured == 8
        assert list(half_swap(4).perm) in [e["perm"] for e in order.witness["elements"]]


def test_candidate_file_that_is_not_a_group(tmp_path):
    """A lone transposition passes Property S but does not close into a group."""
    schema_path = tmp_path / "cyclic3.json"
    dump_schema_file(build_cyclic_schema(3), str(schema_path))
    candidates = tmp_path / "candidates.json"
    candidates.write_text(json.dumps([[1, 0, 2]]))
    code, report = run_command(["maximal-group", "--schema", str(schema_path), "--candidates", str(candidates)])
    assert code == 1
    assert entry(report, "closed under composition and inverse").status is Status.FAIL


@pytest.mark.parametrize(
    "contents",
    [
        [[0, 5, 1]],
        {"perm": [0, 1, 2]},
        [[0, 1]],
    ],
)
def test_bad_candidate_files_are_input_errors(tmp_path, contents):
    """Malformed candidate files exit 2 before anything runs."""
    schema_path = tmp_path / "cyclic3.json"
    dump_schema_file(build_cyclic_schema(3), str(schema_path))
    candidates = tmp_path / "candidates.json"
    candidates.write_text(json.dumps(contents))
    code, report = run_command(["maximal-group", "--schema", str(schema_path), "--candidates", str(candidates)])
    assert code == 2
    assert report is None


def test_input_errors(tmp_path):
    """Missing files, bad schemata and unknown commands exit 2."""
    assert run_command(["maximal-group", "--schema", str(tmp_path / "missing.json")])[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"states": ["a", "b"], "maps": [{"name": "x", "perm": [0, 2]}]}))
    assert run_command(["maximal-group", "--schema", str(bad)])[0] == 2
    assert run_command(["demo", "measurement", "--config", str(tmp_path / "missing.yaml")])[0] == 2
    assert run_command(["frobnicate"])[0] == 2
    assert run_command(["demo", "nonsense"])[0] == 2


def test_config_file_is_applied(tmp_path):
    """Config values reach the run; command-line flags win over them."""
    config = tmp_path / "config.yaml"
    config.write_text("run:\n  seed: 42\n")
    code, report = run_command(["demo", "measurement", "--config", str(config)])
    assert code == 0
    assert report.config.seed == 42
    code, report = run_command(["demo", "measurement", "--config", str(config), "--seed", "1"])
    assert report.config.seed == 1


def test_failing_suite_is_recorded(monkeypatch):
    """A suite that raises becomes a FAIL entry and the run continues."""
    def broken(config):
        raise RuntimeError("boom")

    monkeypatch.setitem(SUITES, "measurement", broken)
    code, report = run_command(["demo", "measurement"])
    assert code == 1
    failed = entry(report, "measurement suite")
    assert failed.status is Status.FAIL
    assert failed.note == "RuntimeError: boom"


def test_exit_on_error_reraises(monkeypatch):
    """-E lets the suite's exception escape."""
    def broken(config):
        raise RuntimeError("boom")

    monkeypatch.setitem(SUITES, "measurement", broken)
    with pytest.raises(RuntimeError):
        run_command(["demo", "measurement", "-E"])
