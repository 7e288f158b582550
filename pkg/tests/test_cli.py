import io
import json
import subprocess
import sys

from genusforge import exactla as la
from genusforge.cli import DEFAULT_SEED, main, resolve_seed
from genusforge.count import exact_local_count
from genusforge.genus import parse_symbol, symbol_of_gram


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def write_json(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_enumerate_rank1():
    code, text = run("enumerate", "--rank", "1", "--det", "1")
    assert code == 0
    assert len(text.splitlines()) == 2


def test_enumerate_even_contains_hyperbolic_plane():
    code, text = run("enumerate", "--rank", "2", "--det", "1", "--even", "--format", "text")
    assert code == 0
    assert "sig(1,1); 2:[0^+2_0:II]" in text.splitlines()


def test_enumerate_with_representatives_verifies():
    code, text = run("enumerate", "--rank", "3", "--max-det", "30", "--with-representatives")
    assert code == 0
    records = [json.loads(line) for line in text.splitlines()]
    assert records and all(r["verified"] for r in records)
    for r in records:
        assert symbol_of_gram(r["gram"]) == parse_symbol(r["symbol"])


def test_enumerate_csv_has_header():
    code, text = run("enumerate", "--rank", "2", "--det", "3", "--format", "csv", "--signature", "2,0")
    lines = text.splitlines()
    assert code == 0 and lines[0] == "n,D,signature,even,symbol"
    assert all('"2,0"' in line for line in lines[1:])


def test_symbol_and_representative_compose(tmp_path):
    path = write_json(tmp_path, "id2.json", la.identity(2))
    code, text = run("symbol", path, "--format", "text")
    assert code == 0 and text.strip() == "sig(2,0); 2:[0^+2_2:I]"
    code, rep = run("representative", text.strip())
    gram = json.loads(rep)["gram"]
    code2, again = run("symbol", write_json(tmp_path, "rep.json", gram), "--format", "text")
    assert code == code2 == 0 and again == text


def test_maximal_command_reports_certificates(tmp_path):
    path = write_json(tmp_path, "g.json", [[2, 0], [0, -2]])
    code, text = run("maximal", path)
    data = json.loads(text)
    assert code == 0 and abs(la.det(data["gram"])) == 1
    assert data["index"] == 2
    assert {c["p"] for c in data["certificates"]} == {2}


def test_count_table_matches_enumeration():
    code, text = run("count", "--rank", "8", "--k-range", "0:6", "--prime", "3", "--format", "json")
    rows = [json.loads(line) for line in text.splitlines()]
    assert code == 0 and len(rows) == 7
    for row in rows:
        assert row["exact"] == exact_local_count(8, 3, row["k"]) == row["series"]


def test_parse_error_exit_code(capsys):
    code, _ = run("representative", "sig(2,0); 2:[0^+2_2:")
    assert code == 2
    assert "position" in capsys.readouterr().err


def test_unrealizable_symbol_is_a_parse_error():
    assert run("representative", "sig(2,0); 2:[0^+2_3:I]")[0] == 2


def test_invalid_symbol_exit_code():
    assert run("representative", "sig(0,1); 2:[0^+1_1:I]")[0] == 2


def test_usage_errors(tmp_path):
    assert run("enumerate", "--rank", "0", "--det", "1")[0] == 2
    assert run("enumerate", "--rank", "2")[0] == 2
    assert run("symbol", write_json(tmp_path, "bad.json", [[1, 2], [3, 4]]))[0] == 2


def test_resource_limit_exit_code(tmp_path):
    # 2-part of the discriminant is (Z/2)^17, beyond the exhaustive search cap
    path = write_json(tmp_path, "big.json", la.scale(la.identity(17), 2))
    assert run("maximal", path)[0] == 4


def test_seed_resolution(monkeypatch):
    monkeypatch.delenv("GENUSFORGE_SEED", raising=False)
    assert resolve_seed(None) == DEFAULT_SEED
    monkeypatch.setenv("GENUSFORGE_SEED", "17")
    assert resolve_seed(None) == 17
    assert resolve_seed(5) == 5


def test_output_is_identical_across_worker_counts():
    args = ("enumerate", "--rank", "3", "--max-det", "12", "--with-representatives", "--format", "csv")
    assert run(*args, "--jobs", "1") == run(*args, "--jobs", "2")


def test_timing_is_seeded():
    a = run("timing", "--rank", "2", "--max-det", "6", "--seed", "3", "--format", "csv")[1]
    b = run("timing", "--rank", "2", "--max-det", "6", "--seed", "3", "--format", "csv")[1]
    strip = lambda t: [line.rsplit(",", 1)[0] for line in t.splitlines()]
    assert strip(a) == strip(b)


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "genusforge", "enumerate", "--rank", "1", "--det", "1", "--format", "text"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines() == ["sig(1,0); 2:[0^+1_1:I]", "sig(0,1); 2:[0^+1_7:I]"]
