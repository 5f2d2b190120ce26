import json
import math

import pytest
from click.testing import CliRunner

from qalt.cli import main


@pytest.fixture
def runner():
    return CliRunner()


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="ascii")
    return str(path)


class TestRun:
    def test_new_qbit(self, runner, tmp_path):
        src = write(tmp_path, "p.q", "new qbit q\n")
        result = runner.invoke(main, ["run", src, "--format", "structured"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["schema"] == "qalt-output/1"
        assert doc["result"]["state"]["signature"] == [2]
        assert doc["result"]["state"]["blocks"][0] == [[[1.0, 0.0], [0.0, 0.0]],
                                                       [[0.0, 0.0], [0.0, 0.0]]]
        assert doc["result"]["state"]["trace"] == pytest.approx(1.0)

    def test_text_output_has_trace(self, runner, tmp_path):
        src = write(tmp_path, "p.q", "new qbit q\nq *= H\n")
        result = runner.invoke(main, ["run", src])
        assert result.exit_code == 0
        assert "trace: 1" in result.output

    def test_control_capture_exit_1(self, runner, tmp_path):
        src = write(tmp_path, "bad.q",
                    "new qbit q\nif q then { q *= X } else { skip }\n")
        result = runner.invoke(main, ["run", src])
        assert result.exit_code == 1
        assert "control qubit 'q'" in result.output

    def test_deutsch_stats(self, runner, tmp_path):
        from qalt import TruthTable, gen_deutsch, pretty
        src = write(tmp_path, "deutsch.q",
                    pretty(gen_deutsch(TruthTable.from_bits("00"))))
        result = runner.invoke(main, ["run", src, "--stats", "q0",
                                      "--format", "structured"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["result"]["stats"]["p0"] == pytest.approx(1.0, abs=1e-9)

    def test_init_state_and_ctx(self, runner, tmp_path):
        src = write(tmp_path, "x.q", "q *= X\n")
        init = tmp_path / "init.json"
        init.write_text(json.dumps({
            "signature": [2],
            "blocks": [[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]],
        }), encoding="ascii")
        result = runner.invoke(main, ["run", src, "--ctx", "q:qbit",
                                      "--init", str(init),
                                      "--format", "structured"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        assert doc["result"]["state"]["blocks"][0][1][1] == [1.0, 0.0]

    def test_missing_file_exit_3(self, runner):
        result = runner.invoke(main, ["run", "/nonexistent/prog.q"])
        assert result.exit_code == 3

    def test_structured_output_deterministic(self, runner, tmp_path):
        from qalt import TruthTable, gen_deutsch_jozsa, pretty
        src = write(tmp_path, "dj.q",
                    pretty(gen_deutsch_jozsa(TruthTable.from_bits("0110"))))
        outs = set()
        for _ in range(2):
            result = runner.invoke(main, ["run", src, "--format", "structured"])
            assert result.exit_code == 0
            outs.add(result.output)
        assert len(outs) == 1


class TestDenote:
    def test_controlled_u(self, runner, tmp_path):
        src = write(tmp_path, "cx.q",
                    "if q0 then { skip } else { q1 *= X }\n")
        result = runner.invoke(main, ["denote", src,
                                      "--ctx", "q0:qbit,q1:qbit",
                                      "--format", "structured"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        ops = doc["result"]["operators"]
        assert len(ops) == 1
        reals = [[entry[0] for entry in row] for row in ops[0]]
        assert reals == [[1, 0, 0, 0], [0, 1, 0, 0],
                         [0, 0, 0, 1], [0, 0, 1, 0]]

    def test_dephasing_two_operators(self, runner, tmp_path):
        src = write(tmp_path, "m.q", "measure q then { skip } else { skip }\n")
        result = runner.invoke(main, ["denote", src, "--ctx", "q:qbit",
                                      "--format", "structured"])
        doc = json.loads(result.output)
        assert len(doc["result"]["operators"]) == 2

    def test_empty_program(self, runner, tmp_path):
        src = write(tmp_path, "empty.q", "// nothing here\n")
        result = runner.invoke(main, ["denote", src, "--format", "structured"])
        doc = json.loads(result.output)
        assert doc["result"]["input_signature"] == [1]
        assert doc["result"]["operators"] == [[[[1.0, 0.0]]]]

    def test_choi_flag(self, runner, tmp_path):
        src = write(tmp_path, "id.q", "skip\n")
        result = runner.invoke(main, ["denote", src, "--ctx", "q:qbit",
                                      "--choi", "--format", "structured"])
        doc = json.loads(result.output)
        choi = doc["result"]["choi"][0]
        assert choi[0][0] == [1.0, 0.0]
        assert choi[0][3] == [1.0, 0.0]


class TestEquivAndOrder:
    def test_global_phase_equivalent(self, runner, tmp_path):
        a = write(tmp_path, "a.q", "q1 *= Phase(pi / 4)\n")
        b = write(tmp_path, "b.q", "skip\n")
        result = runner.invoke(main, ["equiv", a, b, "--ctx", "q1:qbit"])
        assert result.exit_code == 0
        assert "True" in result.output

    def test_alternations_not_equivalent(self, runner, tmp_path):
        a = write(tmp_path, "a.q",
                  "if q0 then { skip } else { q1 *= Phase(pi / 4) }\n")
        b = write(tmp_path, "b.q",
                  "if q0 then { skip } else { skip }\n")
        result = runner.invoke(main, ["equiv", a, b,
                                      "--ctx", "q0:qbit,q1:qbit"])
        assert result.exit_code == 2
        assert "False" in result.output

    def test_identical_files(self, runner, tmp_path):
        a = write(tmp_path, "a.q", "new qbit q\nq *= H\n")
        result = runner.invoke(main, ["equiv", a, a])
        assert result.exit_code == 0

    def test_order_reflexive(self, runner, tmp_path):
        a = write(tmp_path, "a.q", "measure q then { skip } else { skip }\n")
        result = runner.invoke(main, ["order", a, a, "--ctx", "q:qbit"])
        assert result.exit_code == 0

    def test_order_false(self, runner, tmp_path):
        a = write(tmp_path, "a.q", "skip\n")
        b = write(tmp_path, "b.q", "measure q then { skip } else { skip }\n")
        result = runner.invoke(main, ["order", a, b, "--ctx", "q:qbit"])
        assert result.exit_code == 2

    def test_signature_mismatch_exit_2(self, runner, tmp_path):
        a = write(tmp_path, "a.q", "skip\n")
        b = write(tmp_path, "b.q", "discard q\n")
        result = runner.invoke(main, ["equiv", a, b, "--ctx", "q:qbit"])
        assert result.exit_code == 2


class TestDemo:
    @pytest.mark.parametrize("name", ["deutsch", "dj", "qft", "toffoli",
                                      "nonmonotone", "phase"])
    def test_demos_run(self, runner, name):
        result = runner.invoke(main, ["demo", name])
        assert result.exit_code == 0, result.output

    def test_nonmonotone_values(self, runner):
        result = runner.invoke(main, ["demo", "nonmonotone",
                                      "--format", "structured"])
        doc = json.loads(result.output)
        facts = doc["result"]["nonmonotone"]
        assert facts["zero_below_t"] is True
        assert facts["s_below_s"] is True
        assert facts["alternation_monotone"] is False
        assert facts["witness_eigenvalue"] == pytest.approx(
            (1 - math.sqrt(5)) / 4, abs=1e-9)

    def test_toffoli_exact(self, runner):
        result = runner.invoke(main, ["demo", "toffoli", "--format", "structured"])
        doc = json.loads(result.output)
        assert doc["result"]["toffoli"]["exact"] is True

    def test_phase_witness(self, runner):
        result = runner.invoke(main, ["demo", "phase", "--format", "structured"])
        doc = json.loads(result.output)
        facts = doc["result"]["phase"]
        assert facts["branches_equal"] is True
        assert facts["alternations_equal"] is False
        assert facts["witness_distance"] > 0.1

    def test_truth_table_argument(self, runner):
        result = runner.invoke(main, ["demo", "dj", "--f", "0110",
                                      "--format", "structured"])
        assert result.exit_code == 0
        doc = json.loads(result.output)
        (row,) = doc["result"]["deutsch_jozsa"]
        assert row["f"] == "0110"
        assert row["p_zeros"] == pytest.approx(0.0, abs=1e-9)

    def test_bad_truth_table(self, runner):
        result = runner.invoke(main, ["demo", "dj", "--f", "01abc"])
        assert result.exit_code == 2
