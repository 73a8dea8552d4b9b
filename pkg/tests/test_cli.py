import json

import pytest

from seifill.cli import EXIT_INTERNAL, EXIT_INVALID, EXIT_OK, build_parser, main
from seifill.models import FeasibilityResult, FeasibilityStatus

SUBLINK_TWISTS = [
    ["in", "L3.1.1", "R1.2.1"],
    ["in", "L3.1.2", "R1.2.1"],
    ["in", "L3.1.1", "L3.1.2", "R1.1.1"],
    ["L3.1.1", "L3.1.2", "L3.2.1", "R1.1.1", "R1.2.1"],
    ["in", "L3.2.1"],
]


def run_json(capsys, *argv):
    code = main([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_parser_requires_a_subcommand():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


class TestDecide:
    def test_sample(self, capsys, sample_payload):
        code, report = run_json(capsys, "decide", "--json", json.dumps(sample_payload))
        assert code == EXIT_OK
        assert report["status"] == "fillable"
        assert report["sublink"]["positive_leg"] == 3
        assert report["sublink"]["negative_leg"] == 1
        assert report["abelian_certificate"]["status"] == "feasible"

    def test_output_is_byte_identical(self, capsys, sample_payload):
        argv = ["decide", "--json", json.dumps(sample_payload), "--format", "json"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first

    def test_from_file(self, capsys, tmp_path, sample_payload):
        path = tmp_path / "sample.json"
        path.write_text(json.dumps(sample_payload))
        assert main(["decide", "--input", str(path)]) == EXIT_OK
        assert "status: fillable" in capsys.readouterr().out

    def test_rotation_parity_violation(self, capsys):
        payload = {
            "legs": [
                {"coeffs": [-3], "rot": [1]},
                {"coeffs": [-2], "rot": [1]},
                {"coeffs": [-2], "rot": [-1]},
            ]
        }
        assert main(["decide", "--json", json.dumps(payload)]) == EXIT_INVALID
        assert "rotation parity invariant" in capsys.readouterr().err

    def test_malformed_json(self, capsys):
        assert main(["decide", "--json", "{legs"]) == EXIT_INVALID

    def test_missing_file(self, capsys, tmp_path):
        assert main(["decide", "--input", str(tmp_path / "none.json")]) == EXIT_INVALID

    def test_internal_error(self, capsys, mocker, sample_payload):
        mocker.patch("seifill.cli.translate", side_effect=RuntimeError("boom"))
        assert main(["decide", "--json", json.dumps(sample_payload)]) == EXIT_INTERNAL
        assert "internal error: boom" in capsys.readouterr().err


class TestOtherCommands:
    def test_cf(self, capsys):
        code, report = run_json(capsys, "cf", "--json", '{"value": "-8/5"}')
        assert code == EXIT_OK
        assert report == {
            "chain": [-2, -3, -2],
            "s": "5/8",
            "truncations": ["1/2", "3/5", "5/8"],
            "dual": [-3, -3],
        }

    @pytest.mark.parametrize("payload", ["5", "[1, 2]", '"-8/5"', "null"])
    def test_cf_needs_an_object(self, capsys, payload):
        assert main(["cf", "--json", payload]) == EXIT_INVALID
        assert "JSON object" in capsys.readouterr().err

    def test_translate(self, capsys, sample_payload):
        code, report = run_json(capsys, "translate", "--json", json.dumps(sample_payload))
        assert code == EXIT_OK
        assert report["outer"] == "out"
        assert len(report["boundaries"]) == 9
        assert sum(1 for t in report["twists"] if t["sign"] == -1) == 1
        signs = [t["sign"] for t in report["twists"]]
        sizes = [len(t["holes"]) for t in report["twists"]]
        assert signs == sorted(signs, reverse=True)
        assert sizes[: signs.index(-1)] == sorted(sizes[: signs.index(-1)])
        assert report["twists"][0]["holes"] == ["L2.2.1"]

    def test_oracle_with_reroot(self, capsys, sample_payload):
        code, report = run_json(
            capsys, "oracle", "--json", json.dumps(sample_payload), "--reroot", "L3.1.1"
        )
        assert code == EXIT_OK
        assert report["status"] in ("feasible", "infeasible")

    def test_oracle_unknown_hole(self, capsys, sample_payload):
        argv = ["oracle", "--json", json.dumps(sample_payload), "--reroot", "L9.9.9"]
        assert main(argv) == EXIT_INVALID

    def test_oracle_size_guard(self, capsys, sample_payload):
        argv = ["oracle", "--json", json.dumps(sample_payload), "--max-holes", "3"]
        assert main(argv) == EXIT_INVALID
        assert main([*argv, "--force"]) == EXIT_OK

    def test_factorize(self, capsys, sample_payload):
        code, report = run_json(capsys, "factorize", "--json", json.dumps(sample_payload))
        assert code == EXIT_OK
        assert report["pattern"]["runs"] == [1, 0, 0, 0]
        assert sorted(t["holes"] for t in report["twists"]) == sorted(SUBLINK_TWISTS)
        assert report["pivot"] == "L3.1.2"
        steps = report["steps"]
        assert [step["level"] for step in steps] == [1, 2, 3]
        assert steps[0]["D"]["holes"] == ["L3.1.1", "R1.1.1"]
        assert steps[0]["N"]["holes"] == ["in", "L3.1.1", "R1.1.1", "R1.2.1"]
        assert steps[1]["N′"]["sign"] == -1
        assert steps[2]["N"] is None and steps[2]["N′"] is None

    def test_factorize_text(self, capsys, sample_payload):
        assert main(["factorize", "--json", json.dumps(sample_payload)]) == EXIT_OK
        out = capsys.readouterr().out
        assert "pivot: L3.1.2" in out
        assert "step 1 (inside): +['L3.1.1']; D {L3.1.1, R1.1.1}" in out
        assert "closing out" in out

    def test_factorize_without_sublink(self, capsys):
        payload = {"legs": [{"r": "1/3", "rot": [2]}, {"r": "1/3", "rot": [-2]}, {"r": "1/3", "rot": [2]}]}
        assert main(["factorize", "--json", json.dumps(payload)]) == EXIT_INVALID

    def test_trace(self, capsys):
        payload = {"legs": [{"r": "1/3", "rot": [2]}, {"r": "1/3", "rot": [-2]}, {"r": "1/3", "rot": [2]}]}
        code, report = run_json(capsys, "trace", "--json", json.dumps(payload))
        assert code == EXIT_OK
        assert report["conclusion"] == "no_positive_factorization"

    def test_verify(self, capsys, sample_payload):
        payload = {"presentation": sample_payload, "sublink": True, "twists": SUBLINK_TWISTS}
        code, report = run_json(capsys, "verify", "--json", json.dumps(payload))
        assert code == EXIT_OK
        assert report == {"verified": True, "twists": 5}

        payload["twists"] = SUBLINK_TWISTS[:4]
        code, report = run_json(capsys, "verify", "--json", json.dumps(payload))
        assert report["verified"] is False


class TestSurvey:
    def test_special_type(self, capsys):
        code, report = run_json(capsys, "survey", "--json", '{"chains": [[-3], [-3], [-3]]}')
        assert code == EXIT_OK
        assert len(report["records"]) == 27
        assert report["summary"]["not_fillable"] == 27
        assert all(r["verdict"]["status"] == "not_fillable" for r in report["records"])

    def test_text_footer(self, capsys):
        assert main(["survey", "--json", '{"r": ["1/2", "1/2", "1/3"]}', "--cross-check"]) == 0
        out = capsys.readouterr().out
        assert "cross-checked 12" in out
        assert "0 disagree" in out

    def test_disagreement_fails(self, capsys, mocker):
        fake = mocker.Mock()
        fake.max_holes = 14
        fake.solve.return_value = FeasibilityResult(status=FeasibilityStatus.FEASIBLE)
        mocker.patch(
            "seifill.services.survey.PositiveFactorizationOracle", return_value=fake
        )
        argv = ["survey", "--json", '{"chains": [[-3], [-3], [-3]]}', "--cross-check"]
        assert main(argv) == EXIT_INTERNAL
        assert "DISAGREE" in capsys.readouterr().out

    def test_guard_refuses_large_cross_check(self, capsys):
        argv = [
            "survey",
            "--json",
            '{"chains": [[-3], [-3], [-3]]}',
            "--cross-check",
            "--max-holes",
            "3",
        ]
        assert main(argv) == EXIT_INVALID
