from nnrank.io.report import RunReport, parse_report
from nnrank.version import __version__


class TestRunReport:
    def test_lines(self):
        report = RunReport(command="decide",
                           inputs={"matrix": "m.mat", "rank": "3"},
                           outcome="YES",
                           timings={"decide": 1.23456},
                           bit_lengths={"M": 4},
                           details={"provenance": "numeric-then-verified"})

        assert report.lines() == ["command: decide",
                                  f"version: {__version__}",
                                  "input.matrix: m.mat",
                                  "input.rank: 3",
                                  "outcome: YES",
                                  "time.decide: 1.235",
                                  "bits.M: 4",
                                  "provenance: numeric-then-verified"]

    def test_parse_back(self, tmp_path):
        report = RunReport(command="fragile verify", outcome="pass", details={"certificate": "triangle 2"})
        path = str(tmp_path / "report.txt")
        report.save(path)

        with open(path) as file:
            parsed = parse_report(file.read())

        assert parsed["command"] == "fragile verify"
        assert parsed["outcome"] == "pass"
        assert parsed["certificate"] == "triangle 2"
