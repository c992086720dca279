import json

import pytest

import cli
import config
from core import named_graph, write_graph

# Test data
TEST_STAR_TEXT = "4 3\n0 1\n0 2\n0 3\n"


def _run(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def _run_json(capsys, argv):
    code, out = _run(capsys, argv)
    return code, json.loads(out)


@pytest.fixture
def graph_file(tmp_path):
    def make(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)

    return make


def test_theta_free_exits_zero(capsys):
    code, payload = _run_json(capsys, ["theta", "--named", "T6"])
    assert code == cli.EXIT_OK
    assert payload["status"] == "success"
    assert payload["certificate"]["verdict"] == "FREE"
    assert (payload["n"], payload["m"]) == (6, 10)


def test_theta_based_exits_one(capsys):
    code, payload = _run_json(capsys, ["theta", "--named", "K33"])
    assert code == cli.EXIT_NEGATIVE
    assert payload["certificate"]["verdict"] == "BASED"
    assert len(payload["certificate"]["witness"]["paths"]) == 3


def test_not_matching_covered_input(capsys, graph_file):
    code, payload = _run_json(capsys, ["theta", "--input", graph_file("star.txt", TEST_STAR_TEXT)])
    assert code == cli.EXIT_INPUT_ERROR
    assert payload["error_type"] == "NotMatchingCoveredError"
    assert payload["tutte_set"] == [0]


@pytest.mark.parametrize(
    "argv",
    [["theta"], ["theta", "--named", "K4", "--input", "g.txt"], ["theta", "--named", "dodecahedron"]],
)
def test_graph_source_errors(capsys, argv):
    code, payload = _run_json(capsys, argv)
    assert code == cli.EXIT_INPUT_ERROR
    assert payload["status"] == "error"


def test_verify_round_trip(capsys, tmp_path):
    _, out = _run(capsys, ["theta", "--named", "C4star"])
    certificate = tmp_path / "cert.json"
    certificate.write_text(out)

    code, payload = _run_json(capsys, ["verify", "--named", "C4star", "--certificate", str(certificate)])
    assert code == cli.EXIT_OK
    assert payload["valid"]
    assert payload["verdict"] == "BASED"

    tampered = json.loads(out)
    tampered["certificate"]["verdict"] = "FREE"
    certificate.write_text(json.dumps(tampered))
    code, payload = _run_json(capsys, ["verify", "--named", "C4star", "--certificate", str(certificate)])
    assert code == cli.EXIT_NEGATIVE
    assert not payload["valid"]


def test_verify_unreadable_certificate(capsys, tmp_path):
    broken = tmp_path / "cert.json"
    broken.write_text("{not json")
    code, payload = _run_json(capsys, ["verify", "--named", "K4", "--certificate", str(broken)])
    assert code == cli.EXIT_INPUT_ERROR
    assert payload["error_type"] == "CertificateFormatError"


def test_gen_family(capsys):
    code, payload = _run_json(capsys, ["gen", "--family", "T0", "--max-n", "6"])
    assert code == cli.EXIT_OK
    assert payload["count"] == 3
    assert payload["graphs"][-1]["m"] == 10


def test_gen_random_is_seeded(capsys):
    argv = ["--seed", "9", "gen", "--random-mcg", "--n", "8", "--count", "3"]
    _, first = _run_json(capsys, argv)
    _, second = _run_json(capsys, argv)
    assert first == second
    assert first["count"] == 3
    assert all(entry["n"] == 8 for entry in first["graphs"])


def test_gen_writes_files(capsys, tmp_path):
    out_dir = tmp_path / "graphs"
    code, payload = _run_json(capsys, ["gen", "--named", "petersen", "--out-dir", str(out_dir)])
    assert code == cli.EXIT_OK
    assert (out_dir / "graph_0000.txt").read_text() == write_graph(named_graph("petersen"))
    assert payload["graphs"][0]["name"] == "petersen"


def test_decompose(capsys):
    code, payload = _run_json(capsys, ["decompose", "--named", "T6"])
    assert code == cli.EXIT_OK
    assert payload["b"] == 2
    code, payload = _run_json(capsys, ["--seed", "4", "decompose", "--named", "T6", "--policy", "random"])
    assert payload["b"] == 2


def test_bounds(capsys):
    code, payload = _run_json(capsys, ["bounds", "--named", "K4"])
    assert code == cli.EXIT_OK
    assert payload["consistent"]
    assert payload["in_T0"]
    assert payload["bounds"]["edges"]["tight"]


def test_text_format(capsys):
    code, out = _run(capsys, ["--format", "text", "bounds", "--named", "C6"])
    assert code == cli.EXIT_OK
    assert "status: success" in out.splitlines()
    assert "in_T: False" in out.splitlines()


def test_metrics_textfile(capsys, tmp_path):
    target = tmp_path / "metrics.prom"
    _run(capsys, ["--metrics-out", str(target), "theta", "--named", "K4"])
    text = target.read_text()
    assert "theta_kit_stage_seconds" in text
    assert 'stage="decide"' in text


def test_batch_command(capsys, graph_file):
    good = graph_file("k4.txt", write_graph(named_graph("K4")))
    bad = graph_file("star.txt", TEST_STAR_TEXT)
    code, payload = _run_json(capsys, ["batch", good, bad, "--concurrency", "2"])
    assert code == cli.EXIT_OK
    assert payload["failed"] == 1
    assert [r["status"] for r in payload["results"]] == ["success", "error"]
    assert payload["results"][0]["verdict"] == "FREE"


@pytest.mark.asyncio
async def test_run_batch_keeps_order(mocker):
    fake = mocker.patch("cli._batch_item", side_effect=lambda path, command, cap: {"path": path, "status": "success"})
    results = await cli.run_batch(["a", "b", "c"], "decompose", search_cap=8, concurrency=1)
    assert [r["path"] for r in results] == ["a", "b", "c"]
    assert fake.call_count == 3
    fake.assert_any_call("b", "decompose", 8)


@pytest.mark.asyncio
async def test_run_batch_decompose(graph_file):
    path = graph_file("t6.txt", write_graph(named_graph("T6")))
    missing = path + ".absent"
    results = await cli.run_batch([path, missing], "decompose", search_cap=16)
    assert results[0]["b"] == 2
    assert results[1]["error_type"] == "GraphFormatError"


def test_verify_wrongly_typed_certificate(capsys, tmp_path):
    _, out = _run(capsys, ["theta", "--named", "T6"])
    payload = json.loads(out)
    payload["certificate"]["tree"]["children"] = 5
    certificate = tmp_path / "cert.json"
    certificate.write_text(json.dumps(payload))

    code, result = _run_json(capsys, ["verify", "--named", "T6", "--certificate", str(certificate)])
    assert code == cli.EXIT_INPUT_ERROR
    assert result["error_type"] == "CertificateFormatError"


def test_run_flags_after_the_command(capsys):
    _, before = _run_json(capsys, ["--seed", "7", "gen", "--random-mcg", "--n", "10"])
    code, after = _run_json(capsys, ["gen", "--random-mcg", "--n", "10", "--seed", "7"])
    assert code == cli.EXIT_OK
    assert after == before

    code, out = _run(capsys, ["bounds", "--named", "C6", "--format", "text"])
    assert code == cli.EXIT_OK
    assert "status: success" in out.splitlines()


def test_run_flag_defaults_survive_the_command():
    args = cli.build_parser().parse_args(["--seed", "3", "--search-cap", "8", "theta", "--named", "prism"])
    assert (args.seed, args.search_cap) == (3, 8)
    args = cli.build_parser().parse_args(["theta", "--named", "prism", "--search-cap", "8"])
    assert args.search_cap == 8
    assert args.format == config.OUTPUT_FORMAT
