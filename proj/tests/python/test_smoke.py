import math
from pathlib import Path

import pytest

import qdsl

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

COIN = """
namespace Coin {
    open Microsoft.Quantum.Primitive;

    operation Flip() : Result {
        body {
            mutable r = Zero;
            using (q = Qubit()) {
                H(q);
                set r = M(q);
                Reset(q);
            }
            return r;
        }
    }
}
"""


def test_tokenize_positions():
    tokens = qdsl.tokenize("let x = [1; 2];")
    assert tokens[0] == ("keyword", "let", 1, 1)
    assert ("identifier", "x", 1, 5) in tokens
    assert tokens[-1][1] == ";"


def test_tokenize_reports_lexical_errors():
    with pytest.raises(qdsl.CompileError) as e:
        qdsl.tokenize('let s = "open;')
    assert e.value.diagnostics[0]["code"] == "E0002"


def test_pretty_print_is_idempotent():
    text = qdsl.pretty_print(COIN)
    assert "operation Flip () : Result" in text
    assert qdsl.pretty_print(text) == text


def test_check_accept_and_reject():
    assert [d for d in qdsl.check(COIN) if d["severity"] == "error"] == []
    bad = (CORPUS / "reject" / "function_calls_operation.qds").read_text()
    codes = [d["code"] for d in qdsl.check(bad)]
    assert codes == ["E0211"]


def test_run_histogram_and_determinism():
    a = qdsl.run(COIN, shots=500, seed=3)
    b = qdsl.run(COIN, shots=500, seed=3)
    assert a == b
    assert sum(a["histogram"].values()) == 500
    assert abs(a["histogram"]["Zero"] - 250) < 5 * math.sqrt(125)


def test_run_arguments():
    report = qdsl.run_files([CORPUS / "run" / "arguments.qds"], "Scale", args=[3, 2.5, "[1; 2; 3]"])
    assert report["results"][0]["value"] == "[7.5; 15.0; 22.5]"


def test_compile_and_run_failures():
    with pytest.raises(qdsl.CompileError):
        qdsl.run("namespace N { function F() : Int { return true; } }")
    with pytest.raises(qdsl.RunFailure) as e:
        qdsl.run_files([CORPUS / "run" / "fail.qds"])
    assert str(e.value) == "no answer"
    assert e.value.stack == ["at Samples.Fail.Main"]
    with pytest.raises(ValueError):
        qdsl.run(COIN, entry="Missing")


def test_trace_events():
    lines = qdsl.trace((CORPUS / "run" / "nested_using.qds").read_text())
    assert lines[0] == "alloc [q0]"
    assert lines[-1] == "release [q0]"


def test_simulator_bell_pair():
    sim = qdsl.Simulator(4, seed=1)
    sim.allocate(0)
    sim.allocate(1)
    sim.apply("H", 0)
    sim.apply("X", 1, controls=[0])
    amps = sim.amplitudes
    assert abs(amps[0] - 1 / math.sqrt(2)) < 1e-12
    assert abs(amps[3] - 1 / math.sqrt(2)) < 1e-12
    assert abs(sim.probability_zero(["PauliZ", "PauliZ"], [0, 1]) - 1) < 1e-12
    first = sim.measure(["PauliZ"], [0])
    assert sim.measure(["PauliZ"], [1]) == first
    with pytest.raises(ValueError):
        sim.apply("Q", 0)
