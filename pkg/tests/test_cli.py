import json

from branchforge.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestEmbedCommands:
    def test_embed_trivial(self, capsys, tmp_path):
        out = tmp_path / "level.json"
        code, stdout, _ = run(capsys, "embed", "--group", "builtin:trivial",
                              "--out", str(out))
        assert code == 0
        assert "|X|=20" in stdout
        doc = json.loads(out.read_text())
        assert doc["x_size"] == 20
        assert doc["y_size_closed_forms"]["enumerated"] == 18

    def test_embed_json_format(self, capsys):
        code, stdout, _ = run(capsys, "embed", "--group", "builtin:c2",
                              "--format", "json", "--no-tables")
        assert code == 0
        doc = json.loads(stdout)
        assert doc["x_size"] == 840
        assert doc["embedding"]["s"] == "(3 6)(4 7)"

    def test_verify_altgen(self, capsys):
        code, stdout, _ = run(capsys, "verify-altgen", "--group", "builtin:c2")
        assert code == 0
        assert "True" in stdout

    def test_missing_group_file(self, capsys):
        code, _, stderr = run(capsys, "embed", "--group", "/nope/missing.json")
        assert code == 2


class TestScenarioCommands:
    def test_level(self, capsys):
        code, stdout, _ = run(capsys, "level", "--scenario", "builtin:mixed",
                              "--level", "1", "--no-tables")
        assert code == 0
        assert "|X|=20" in stdout

    def test_portrait(self, capsys):
        code, stdout, _ = run(capsys, "portrait", "--scenario", "builtin:trivial",
                              "--word", "B(q=(1 2 3 4 5))", "--depth", "2",
                              "--format", "json")
        assert code == 0
        doc = json.loads(stdout)
        assert doc["perm"] == list(range(20))
        assert set(doc["children"]) == {"0", "1"}  # the o-spine and the alpha branch

    def test_portrait_too_deep(self, capsys):
        code, _, stderr = run(capsys, "portrait", "--scenario", "builtin:trivial",
                              "--word", "A((1 2 3))", "--depth", "9")
        assert code == 2

    def test_order_pass(self, capsys):
        code, stdout, _ = run(capsys, "order", "--scenario", "builtin:trivial",
                              "--word", "A((1 2 3))", "--budget", "4")
        assert code == 0
        assert "exact order 3" in stdout

    def test_order_budget_failure(self, capsys):
        code, stdout, _ = run(capsys, "order", "--scenario", "builtin:trivial",
                              "--word", "A((1 2 3)) B(q=(1 2 3 4 5)) A((3 4 5)) B(q=(1 3 5 2 4))",
                              "--budget", "0")
        assert code == 1

    def test_zset(self, capsys):
        code, stdout, _ = run(capsys, "zset", "--scenario", "builtin:trivial",
                              "--word", "A((1 2 3)) B(q=(1 2 3 4 5)) A((3 4 5)) B(q=(1 3 5 2 4))",
                              "--format", "json")
        assert code == 0
        doc = json.loads(stdout)
        assert doc["bound"] == 2 * 5 * 19
        assert doc["size"] == len(doc["members"])

    def test_zset_exhaustive_matches(self, capsys):
        word = "A((1 2 3)) B(q=(1 2 3 4 5)) A((3 4 5)) B(q=(1 3 5 2 4))"
        code, fast, _ = run(capsys, "zset", "--scenario", "builtin:trivial",
                            "--word", word, "--format", "json")
        assert code == 0
        code, slow, _ = run(capsys, "zset", "--scenario", "builtin:trivial",
                            "--word", word, "--exhaustive", "--format", "json")
        assert code == 0
        assert json.loads(fast) == json.loads(slow)

    def test_zset_short_word_rejected(self, capsys):
        code, _, _ = run(capsys, "zset", "--scenario", "builtin:trivial",
                         "--word", "B(q=(1 2 3))")
        assert code == 2

    def test_wreath_check(self, capsys):
        code, stdout, _ = run(capsys, "wreath-check", "--scenario", "builtin:trivial",
                              "--depth", "3")
        assert code == 0
        assert "FAIL" not in stdout

    def test_shrink_search_and_replay(self, capsys, tmp_path):
        words = tmp_path / "words.txt"
        words.write_text("A((1 2 3)) B(q=(1 2 3 4 5))\n# comment\nB(q=(1 2 3)) A((4 5)(1 2))\n")
        cert_path = tmp_path / "cert.json"
        code, stdout, _ = run(capsys, "shrink-search", "--scenario", "builtin:trivial",
                              "--words", str(words), "--budget", "4",
                              "--out", str(cert_path))
        assert code == 0
        assert cert_path.exists()
        code, stdout, _ = run(capsys, "shrink-search", "--scenario", "builtin:trivial",
                              "--words", str(words), "--budget", "4",
                              "--replay", str(cert_path))
        assert code == 0
        assert "replay passed" in stdout

    def test_tampered_replay_fails(self, capsys, tmp_path):
        words = tmp_path / "words.txt"
        words.write_text("A((1 2 3)) B(q=(1 2 3 4 5))\n")
        cert_path = tmp_path / "cert.json"
        code, _, _ = run(capsys, "shrink-search", "--scenario", "builtin:trivial",
                         "--words", str(words), "--budget", "3", "--out", str(cert_path))
        assert code == 0
        doc = json.loads(cert_path.read_text())
        doc["prefix"]["alpha"][0] = doc["prefix"]["alpha"][0] + 1
        cert_path.write_text(json.dumps(doc))
        code, _, stderr = run(capsys, "shrink-search", "--scenario", "builtin:trivial",
                              "--words", str(words), "--budget", "3",
                              "--replay", str(cert_path))
        assert code == 1


class TestTableCommands:
    def test_landau_reports_failures_honestly(self, capsys):
        code, stdout, _ = run(capsys, "landau", "--max", "12")
        assert code == 1  # the factorial estimate fails at n = 2, 3, 4
        assert "fails at n=[2, 3, 4]" in stdout

    def test_landau_holds_from_five(self, capsys):
        code, stdout, _ = run(capsys, "landau", "--max", "1")
        assert code == 0

    def test_landau_json(self, capsys):
        code, stdout, _ = run(capsys, "landau", "--max", "7", "--format", "json")
        doc = json.loads(stdout)
        assert [row["g"] for row in doc["rows"]] == [1, 2, 3, 4, 6, 6, 12]

    def test_ratio(self, capsys):
        code, stdout, _ = run(capsys, "ratio", "--scenario", "builtin:trivial",
                              "--level", "0", "--format", "json")
        assert code == 0
        doc = json.loads(stdout)
        assert doc["ratio"] == "18/95"
        assert doc["bound"] == "19/150"
        assert doc["holds"]


class TestDeterminism:
    def test_identical_json_outputs(self, capsys):
        args = ["zset", "--scenario", "builtin:trivial", "--word",
                "A((1 2 3)) B(q=(1 2 3 4 5)) A((3 4 5)) B(q=(1 3 5 2 4))",
                "--format", "json"]
        _, first, _ = run(capsys, *args)
        _, second, _ = run(capsys, *args)
        assert first == second


class TestReport:
    def test_report_writes_tables_and_figures(self, capsys, tmp_path):
        out = tmp_path / "report"
        code, stdout, _ = run(capsys, "report", "--scenario", "builtin:trivial",
                              "--out", str(out), "--landau-max", "8")
        assert code == 0
        for name in ("landau.csv", "landau.png", "levels.csv", "ratios.png", "report.json"):
            assert (out / name).exists(), name
        summary = json.loads((out / "report.json").read_text())
        assert summary["landau_failures"] == [2, 3, 4]
        with open(out / "levels.csv") as handle:
            lines = handle.read().strip().splitlines()
        assert len(lines) == 1 + 6  # header + one row per level
        assert (out / "landau.png").stat().st_size > 1000
