import itertools
import json
import subprocess
import sys

import pytest

from infoagg import embed_game, parse_game
from infoagg.cli import main
from infoagg.extended import extended_to_dict

from oracles import G1_JSON


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, json.loads(out), out, err


def outcome(files, w1, w2):
    return files(f"o_{w1}_{w2}.json".replace("/", "-"), {"o_star": {"w1": w1, "w2": w2}})


@pytest.mark.parametrize(
    "k, mode, edges",
    [(2, "weak", [["w1", "w2"]]), (1, "weak", []), (2, "strong", [["w1", "w2"], ["w2", "w1"]])],
)
def test_order(capsys, files, k, mode, edges):
    code, doc, _, _ = run(capsys, "order", files.g1, "--k", k, "--mode", mode)
    assert code == 0 and doc["status"] == 0
    assert doc["result"]["edges"] == edges


def test_order_witness_and_envelope(capsys, files):
    _, doc, _, _ = run(capsys, "order", files.g1, "--k", 2)
    assert doc["result"]["witnesses"] == [{"edge": ["w1", "w2"], "witness": ["w1", "w1", "w2", "w2"]}]
    assert doc["result"]["reach"] == [[True, True], [False, True]]
    assert doc["command"]["command"] == "order" and doc["command"]["mode"] == "weak"
    assert len(doc["inputs"]["game"]) == 64


@pytest.mark.parametrize(
    "w1, w2, code, key",
    [("1/2", "1/2", 0, None), ("1/5", "7/10", 1, "violated_receiver"), ("7/10", "1/5", 1, "violated_order")],
)
def test_check(capsys, files, w1, w2, code, key):
    got, doc, _, _ = run(capsys, "check", files.g1, outcome(files, w1, w2), "--k", 2)
    assert got == code
    if key:
        assert doc["result"][key]
    else:
        assert doc["result"]["feasible"]


def test_check_violation_details(capsys, files):
    _, doc, _, _ = run(capsys, "check", files.g1, outcome(files, "7/10", "1/5"), "--k", 2)
    assert doc["result"]["violated_order"] == [{"from": "w1", "to": "w2", "o_from": "7/10", "o_to": "1/5"}]
    _, doc, _, _ = run(capsys, "check", files.g1, outcome(files, "1/5", "7/10"), "--k", 2)
    assert {"action": 1, "receiver_utility": "1/4", "baseline": "1/2"} in doc["result"]["violated_receiver"]


@pytest.mark.parametrize(
    "k, objective, value, o_star",
    [
        (2, "receiver", "1/2", None),
        (1, "receiver", "1", {"w1": "1", "w2": "0"}),
        (2, "sender:1", "1", {"w1": "1", "w2": "1"}),
    ],
)
def test_optimize(capsys, files, k, objective, value, o_star):
    code, doc, _, _ = run(capsys, "optimize", files.g1, "--k", k, "--objective", objective)
    assert code == 0 and doc["result"]["value"] == value
    if o_star:
        assert doc["result"]["o_star"] == o_star


@pytest.mark.parametrize(
    "messages, q", [("w1,w1,w2,w2", "9/20"), ("w1,w1,w1,w1", "1/5"), ("w2,w2,w2,w1", "1")]
)
def test_mechanism(capsys, files, messages, q):
    o = outcome(files, "1/5", "7/10")
    code, doc, _, _ = run(capsys, "mechanism", files.g1, o, "--k", 2, "--messages", messages)
    assert code == 0 and doc["result"]["q"] == q


def test_verify_receiver_violation(capsys, files):
    code, doc, _, _ = run(capsys, "verify", files.g1, outcome(files, "1/5", "7/10"), "--k", 2)
    assert code == 1
    assert doc["result"]["receiver_violation"] == {"strategy": "always-1", "gain": "1/4"}
    assert doc["result"]["coalition_violation"] is None


def test_verify_strong_coalition_violation(capsys, files):
    o = outcome(files, "1/5", "7/10")
    code, doc, _, _ = run(capsys, "verify", files.g1, o, "--k", 2, "--mode", "strong")
    assert code == 1
    cv = doc["result"]["coalition_violation"]
    assert len(cv["coalition"]) <= 2
    assert doc["result"]["order_feasible"] is False


def test_verify_pass(capsys, files):
    code, doc, _, _ = run(capsys, "verify", files.g1, outcome(files, "1/2", "1/2"), "--k", 2)
    assert code == 0 and doc["result"]["passed"]


def test_verify_caps(capsys, files):
    code, doc, _, err = run(capsys, "verify", files.g1, outcome(files, "1/2", "1/2"), "--k", 2, "--caps", 5)
    assert code == 2 and doc["cap"] == 5 and "cap" in err


def test_simulate(capsys, files):
    o = outcome(files, "1/2", "1/2")
    argv = ("simulate", files.g1, o, "--k", 2, "--rounds", 10**4, "--seed", 2024)
    code, doc, first, _ = run(capsys, *argv)
    assert code == 0
    states = doc["result"]["states"]
    assert sum(s["visits"] for s in states.values()) == 10**4
    _, _, second, _ = run(capsys, *argv)
    assert first == second


def test_simulate_all_zero(capsys, files):
    o = outcome(files, "1", "1")
    _, doc, _, _ = run(capsys, "simulate", files.g1, o, "--k", 2, "--rounds", 300)
    for s in doc["result"]["states"].values():
        assert s["zeros"] == s["visits"]


def test_separability(capsys, files):
    code, doc, _, _ = run(capsys, "separability", files.g2, "--k", 3)
    assert code == 1
    w = doc["result"]["witness"]
    assert (w["sender"], w["profile"]) == (1, ["0", "0", "0", "1", "1"])
    assert (w["coalition_1"], w["coalition_2"]) == ([1, 2, 3], [1, 4, 5])
    assert (w["pref_1"], w["pref_2"]) == ("ZERO", "ONE")
    assert run(capsys, "separability", files.g2, "--k", 1)[0] == 0
    assert run(capsys, "separability", files.g1, "--k", 4)[0] == 0
    embedded = files("g1x.json", extended_to_dict(embed_game(parse_game(G1_JSON))))
    assert run(capsys, "separability", embedded, "--k", 4)[0] == 0


def test_extended_order_refuses_non_separable(capsys, files):
    code, doc, _, err = run(capsys, "order", files.g2, "--k", 3)
    assert code == 2
    assert doc["separability"]["witness"]["sender"] == 1
    assert "not separable" in err


def test_extended_outcome_keys(capsys, files):
    o = files("o2.json", {"o_star": {",".join(p): "1/2" for p in itertools.product("01", repeat=5)}})
    code, doc, _, _ = run(capsys, "check", files.g2, o, "--k", 1)
    assert code == 0 and doc["result"]["feasible"]


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["order", "missing.json", "--k", "2"], "cannot read"),
        (["order", "G1", "--k", "7"], "1 <= k <= n"),
        (["optimize", "G1", "--k", "2", "--objective", "sender:9"], "out of range"),
        (["mechanism", "G1", "O", "--k", "2", "--messages", "w1,w1"], "4 senders"),
        (["mechanism", "G1", "O", "--k", "2", "--messages", "w1,w1,w1,w3"], "unknown state"),
        (["check", "BAD", "O", "--k", "2"], "prior sums to 5/6"),
        (["mechanism", "G1", "BADO", "--k", "2", "--messages", "w1,w1,w1,w1"], "not order-feasible"),
    ],
)
def test_input_errors(capsys, files, argv, needle):
    bad = json.loads(G1_JSON)
    bad["prior"] = ["1/2", "1/3"]
    paths = {
        "G1": files.g1,
        "O": outcome(files, "1/5", "7/10"),
        "BADO": outcome(files, "7/10", "1/5"),
        "BAD": files("bad.json", bad),
    }
    code, doc, _, err = run(capsys, *[paths.get(a, a) for a in argv])
    assert code == 2 and doc["status"] == 2
    assert needle in doc["error"] and needle in err


def test_usage_error_exits_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["order"])
    assert info.value.code == 2


def test_module_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "infoagg", "order", files.g1, "--k", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["edges"] == [["w1", "w2"]]
