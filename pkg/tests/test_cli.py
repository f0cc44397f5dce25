import json
import random
import subprocess
import sys

import pytest

from nmrvoter.cli import main
from nmrvoter.core import VoterInputSet, build_matrix, compute_isd
from nmrvoter.simulator import load_trace, replay_mismatches

EX1 = {"values": [20, 30, 20, 10], "active": [True, True, True, True]}


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestVote:
    def test_example1(self, capsys):
        code, out, _ = run_cli(capsys, "vote", json.dumps(EX1))
        assert code == 0
        assert json.loads(out) == {"y": 20, "index": 0, "d": 2, "eq": 2, "e": [1, 0, 1, 0],
                                   "a": 0, "err": 0}

    def test_zero_active(self, capsys):
        rec = {"values": [1, 2], "active": [False, False]}
        assert run_cli(capsys, "vote", json.dumps(rec))[0] == 2

    def test_tie(self, capsys):
        code, out, _ = run_cli(capsys, "vote", json.dumps({"values": [20, 30, 20, 30]}))
        assert code == 0 and json.loads(out)["a"] == 1

    @pytest.mark.parametrize("bad", ["{", "[]", '{"values": [1, "x"]}', '{"values": [1], "active": [true, false]}'])
    def test_malformed(self, capsys, bad):
        assert run_cli(capsys, "vote", bad)[0] == 1

    def test_input_file(self, capsys, tmp_path):
        f = tmp_path / "in.json"
        f.write_text(json.dumps(EX1))
        code, out, _ = run_cli(capsys, "vote", "--input", str(f))
        assert code == 0 and json.loads(out)["d"] == 2

    def test_missing_file(self, capsys, tmp_path):
        assert run_cli(capsys, "vote", "--input", str(tmp_path / "nope.json"))[0] == 1

    def test_width(self, capsys):
        assert run_cli(capsys, "vote", '{"values": [300]}', "--width", "8")[0] == 1

    def test_pretty(self, capsys):
        code, out, _ = run_cli(capsys, "vote", json.dumps(EX1), "--format", "pretty")
        assert code == 0 and "d=2" in out


class TestAnalyze:
    def test_example7(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", json.dumps({"values": [7, 7, 5, 7]}))
        res = json.loads(out)
        assert code == 0
        assert res["char_poly"] == [0, 0, 3, -4, 1]
        assert res["spectrum"]["exact"] == [{"value": 0, "mult": 2}, {"value": 1, "mult": 1},
                                            {"value": 3, "mult": 1}]
        assert res["spectral_isd"]["e"] == [1, 1, 0, 1]
        assert res["selfcheck"]["err"] == 0
        assert res["reduced"] == [[1, 0, 1], [0, 0, 1], [0, 0, 0]]

    def test_identity(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", json.dumps({"values": [1, 2, 3]}))
        res = json.loads(out)
        assert res["spectrum"]["exact"] == [{"value": 1, "mult": 3}]
        assert res["spectrum"]["numeric"] == [1.0, 1.0, 1.0]

    def test_erroneous_matrix(self, capsys):
        m = [[1, 1, 0, 0], [1, 1, 0, 1], [0, 0, 1, 0], [0, 1, 0, 1]]
        code, out, _ = run_cli(capsys, "analyze", json.dumps({"matrix": m}))
        res = json.loads(out)
        assert code == 0 and res["selfcheck"]["transitivity_err"] == 1
        assert res["selfcheck"]["spectral_err"] == 1 and res["eigenpairs"] is None
        assert res["char_poly"] == [-1, 0, 4, -4, 1]

    def test_bad_matrix(self, capsys):
        assert run_cli(capsys, "analyze", json.dumps({"matrix": [[1, 1], [0, 1]]}))[0] == 1

    def test_zero_active(self, capsys):
        rec = {"values": [1], "active": [False]}
        assert run_cli(capsys, "analyze", json.dumps(rec))[0] == 2

    def test_consistent_with_vote(self, capsys):
        rng = random.Random(7)
        for _ in range(25):
            n = rng.randint(1, 9)
            rec = {"values": [rng.randrange(3) for _ in range(n)],
                   "active": [rng.random() < 0.8 for _ in range(n)]}
            rec["active"][0] = True
            _, vote_out, _ = run_cli(capsys, "vote", json.dumps(rec))
            _, an_out, _ = run_cli(capsys, "analyze", json.dumps(rec))
            vote, an = json.loads(vote_out), json.loads(an_out)
            assert an["isd"] == vote
            spectral = dict(an["spectral_isd"], y=vote["y"])
            assert spectral == vote
            s = VoterInputSet(rec["values"], rec["active"])
            assert an["matrix"] == build_matrix(s).tolist()
            assert an["profile"]["frequencies"][0] == compute_isd(s).eq

    def test_pretty(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", json.dumps(EX1), "--format", "pretty")
        assert out.startswith("matrix:\n1010\n0100\n1010\n0001\nreduced:\n010")


class TestInject:
    def test_example2(self, capsys):
        cfg = {"seeds": [0], "values": [5, 5, 5, 9], "pair": [1, 2]}
        code, out, _ = run_cli(capsys, "inject", json.dumps(cfg))
        res = json.loads(out)
        assert code == 0 and res["detected_both"] == 1

    def test_thousand(self, capsys):
        cfg = {"seeds": list(range(1000)), "n": 7, "classes": [3, 2]}
        code, out, _ = run_cli(capsys, "inject", json.dumps(cfg))
        assert code == 0 and json.loads(out)["detection_rate"] == 1.0

    def test_ineligible_skipped(self, capsys):
        code, out, err = run_cli(capsys, "inject", json.dumps({"seeds": [1], "classes": [1, 1, 1]}))
        assert code == 0 and json.loads(out)["skipped"] == 1 and "skipped" in err

    def test_undetected_nonzero_exit(self, capsys):
        # two zeroed pairs can isolate a member and leave a proper matrix
        cfg = {"seeds": list(range(40)), "classes": [3], "faults": 2}
        code, out, _ = run_cli(capsys, "inject", json.dumps(cfg))
        assert json.loads(out)["undetected"] > 0 and code == 3

    def test_verbose_reports(self, capsys):
        cfg = {"seeds": [1, 2], "classes": [4]}
        _, out, _ = run_cli(capsys, "inject", json.dumps(cfg), "--verbose")
        assert len(json.loads(out)["reports"]) == 2

    def test_bad_config(self, capsys):
        assert run_cli(capsys, "inject", json.dumps({"seeds": [1]}))[0] == 1


class TestSimulate:
    def test_zero_rate(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", json.dumps({"n": 4}), "--horizon", "30")
        trace = load_trace(out)
        assert code == 0 and len(trace) == 30
        assert all(r.isd["d"] == 0 for r in trace)

    def test_seeded_replay(self, capsys, tmp_path):
        cfg = json.dumps({"n": 4, "transient_rate": 0.1})
        outs = []
        for _ in range(2):
            run_cli(capsys, "simulate", cfg, "--seed", "3", "--horizon", "100",
                    "--output", str(tmp_path / "t.jsonl"))
            outs.append((tmp_path / "t.jsonl").read_bytes())
        assert outs[0] == outs[1]
        assert replay_mismatches(load_trace(outs[0].decode())) == []

    def test_permanent(self, capsys):
        cfg = {"modules": [{"permanent_at": 10}, {}, {}, {}], "policy": {"suspicion_k": 3}}
        _, out, _ = run_cli(capsys, "simulate", json.dumps(cfg), "--horizon", "20")
        trace = load_trace(out)
        assert "power_off:0" in trace[13].actions

    def test_bad_config(self, capsys):
        assert run_cli(capsys, "simulate", json.dumps({"n": 4, "x": 1}))[0] == 1
        assert run_cli(capsys, "simulate", json.dumps({"n": 4}), "--horizon", "0")[0] == 1


class TestGen:
    def test_n4(self, capsys):
        code, out, _ = run_cli(capsys, "gen", "4")
        desc = json.loads(out)
        assert code == 0 and desc["fill_count"] == 3 and desc["data_entries"] == 6
        assert desc["reduced_matrix"] == {"rows": 3, "cols": 3}

    def test_n1(self, capsys):
        desc = json.loads(run_cli(capsys, "gen", "1")[1])
        assert desc["reduced_matrix"] is None and desc["fill_count"] == 0

    def test_n64(self, capsys):
        desc = json.loads(run_cli(capsys, "gen", "64")[1])
        assert desc["fill_count"] == 63 * 62 // 2 and desc["e_width"] == 64
        assert desc["reduced_matrix"] == {"rows": 63, "cols": 63}

    def test_n0(self, capsys):
        assert run_cli(capsys, "gen", "0")[0] == 1


def test_usage_error_exit_code(capsys):
    assert run_cli(capsys, "frobnicate")[0] == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nmrvoter", "vote", json.dumps(EX1)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["y"] == 20
