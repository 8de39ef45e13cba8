import io
import json
import subprocess
import sys


from higher_tc.chains import parse_chain, serialize_chain
from higher_tc.cli import canonical_json, digest, run
from higher_tc.cyclic import parse_group


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), out=buf)
    return code, buf.getvalue()


def call_json(*argv):
    code, text = call(*argv)
    return code, json.loads(text)


def _no_floats(obj):
    if isinstance(obj, float):
        return False
    if isinstance(obj, dict):
        return all(_no_floats(v) for v in obj.values())
    if isinstance(obj, list):
        return all(_no_floats(v) for v in obj)
    return True


def test_decide_example_maximality():
    code, env = call_json("decide", "--group", "Z_3 x Z_3", "--dim", "5", "--s", "3",
                          "--class", "[0,5]+[5,0]")
    assert code == 0
    (res,) = env["verdict"]["results"]
    assert res["conclusion"] == "TC_s = sn" and res["status"] == "nonzero-class"
    assert env["citations"] == ["nonzero-obstruction-maximality"]


def test_decide_z2():
    code, env = call_json("decide", "--group", "Z_2", "--dim", "3", "--s", "2")
    assert code == 0
    (res,) = env["verdict"]["results"]
    assert res["status"] == "zero-chain" and res["conclusion"] == "TC_s < sn"


def test_nonorient_oracle():
    code, env = call_json("nonorient", "--r", "2", "--s", "4", "--oracle")
    v = env["verdict"]
    assert code == 0 and v["conclusion"] == "TC_s < sn" and v["sn"] == 24
    assert v["parity_certificate"] and v["oracle"]["is_boundary"]
    assert v["trace"]["reachable_states"] >= 0 and len(v["trace"]["parity_table_digest"]) == 64
    pre = parse_chain(v["oracle"]["preimage"])
    assert pre.degree == 25


def test_exit_codes():
    assert call("nonorient", "--r", "2", "--s", "3")[0] == 2
    assert call("decide", "--group", "Z_3", "--dim", "3", "--s", "2", "--bogus")[0] == 1
    assert call("decide", "--group", "Q_8", "--dim", "3", "--s", "2")[0] == 1
    assert call("decide", "--group", "Z_3", "--dim", "4", "--s", "2", "--class", "[4]")[0] == 1
    assert call()[0] == 1
    assert call("zcl", "--dim", "2", "--s", "3", "--pool", "weird")[0] == 1


def test_digest_deterministic_and_time_free():
    a = call_json("report", "--group", "Z_2", "--dim", "5", "--s", "3-6")[1]
    b = call_json("report", "--group", "Z_2", "--dim", "5", "--s", "3-6")[1]
    assert a["digest"] == b["digest"]
    body = {k: a[k] for k in ("tool", "version", "input", "verdict", "citations")}
    assert digest(body) == a["digest"]
    assert isinstance(a["wall_time_ms"], int)


def test_canonical_json_no_floats():
    for argv in (("zcl", "--dim", "2", "--s", "3"),
                 ("report", "--group", "Z_2", "--dim", "6", "--s", "2-8", "--non-orientable"),
                 ("nonorient", "--r", "1", "--s", "2", "--oracle")):
        env = call_json(*argv)[1]
        assert _no_floats(env)
        assert json.loads(canonical_json(env)) == env


def test_formats():
    code, text = call("report", "--group", "Z_3", "--dim", "3", "--s", "2-4", "--format", "tsv")
    assert code == 0 and text.splitlines()[0] == "s\tlower\tupper\texact\tcitations"
    code, text = call("zcl", "--dim", "2", "--s", "3", "--format", "text")
    assert code == 0 and "length: 6" in text


def test_zcl_lens_exhaustive():
    code, env = call_json("zcl", "--space", "lens", "--dim", "1", "--prime", "3", "--s", "2",
                          "--exhaustive")
    assert code == 0 and env["verdict"]["length"] == 3 and env["verdict"]["witness_valid"]


def test_round_trips():
    for g in ("Z^2 x Z_4", "Z_3 x Z_3", "Z x Z_2 x Z"):
        assert parse_group(parse_group(g).name) == parse_group(g)
    c = "-48*[0,7,5,3] + 16*[5,1,5,4]"
    assert serialize_chain(parse_chain(c)) == c


def test_batch_order_and_parallel(tmp_path):
    jobs = tmp_path / "jobs.txt"
    jobs.write_text("# comment line\n"
                    "zcl --dim 4 --s 3\n"
                    "decide --group Z_2 --dim 3 --s 2   # trailing comment\n"
                    "\n"
                    "nonorient --r 2 --s 3\n"
                    "report --group \"Z x Z_2\" --dim 3 --s 2-3\n")
    outs = {}
    for workers in ("1", "3"):
        buf = io.StringIO()
        code = run(["--jobs", str(jobs), "--parallel", workers], out=buf)
        lines = [json.loads(x) for x in buf.getvalue().splitlines()]
        assert code == 2
        assert [l["input"].get("command", l["input"].get("argv", [None])[0]) for l in lines] == \
            ["zcl", "decide", "nonorient", "report"]
        outs[workers] = [l["digest"] for l in lines]
    assert outs["1"] == outs["3"]


def test_batch_missing_file():
    assert call("--jobs", "/nonexistent/jobs.txt")[0] == 1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "higher_tc.cli", "decide", "--group", "Z_2",
                           "--dim", "3", "--s", "2"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["tool"] == "higher-tc"


def test_selftest_quick_parallel_digest():
    a = call_json("selftest", "--quick")[1]["verdict"]
    b = call_json("selftest", "--quick", "--parallel", "4")[1]["verdict"]
    assert a["passed"] and b["passed"]
    assert a["suite_digest"] == b["suite_digest"]
