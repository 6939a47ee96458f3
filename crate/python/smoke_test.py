"""Smoke test for the `qwhile` Python extension.

Build and install first:

    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/qwhile-*.whl

Then run `python python/smoke_test.py` or `pytest python/smoke_test.py`.
"""

import cmath
import math

import qwhile

QLOOP = qwhile.programs()["qloop.qw"]


def test_program_round_trip():
    p = qwhile.Program(QLOOP)
    assert p.n_qubits == 1
    assert qwhile.Program(p.pretty()).pretty() == p.pretty()
    assert "JMP" in p.compile()
    assert p.check()


def test_qloop_statistics():
    stats = qwhile.Program(QLOOP).run(shots=20000, seed=7)
    entries = stats["loop_entries"][0]
    assert abs(entries - 5000) < 400, entries
    rep = qwhile.qloop_run(shots=20000, seed=7)
    assert rep["entries"] == entries


def test_distribution():
    coin = qwhile.Program(qwhile.programs()["coin.qw"])
    terminals, residual = coin.distribution()
    assert residual == 0.0
    assert sorted(round(w, 12) for w, _ in terminals) == [0.5, 0.5]
    (w, rho), = qwhile.Program(QLOOP).distribution()[0]
    assert abs(rho[0][0] - 1) < 1e-9 and w > 1 - 1e-6


def test_synthesis():
    s = 1 / math.sqrt(2)
    h = [[s, s], [s, -s]]
    seq = qwhile.synthesize(h, gates=["H", "T"])
    assert seq.gates == [("H", [0])]
    assert seq.epsilon == 0.0 and len(seq) == 1

    t = 0.37
    u = [[cmath.exp(-1j * t), 0], [0, cmath.exp(1j * t)]]
    seq = qwhile.synthesize(u, epsilon=1e-2)
    assert qwhile.distance(seq.matrix(), u) <= seq.epsilon + 1e-10
    assert set(seq.counts()) <= {"H", "T", "Tdg", "S", "Sdg", "X", "CNOT"}

    try:
        qwhile.synthesize([[1, 0], [0, 2]])
    except ValueError as e:
        assert "residual" in str(e)
    else:
        raise AssertionError("non-unitary input accepted")


def test_experiments():
    t = qwhile.bb84_run(n=1024, seed=3)
    assert t["verdict"] and t["final_alice_key"] == t["final_bob_key"]
    assert 409 <= len(t["final_alice_key"]) <= 614
    clients = qwhile.bb84_multi_client(clients=4, n=256, seed=3)
    assert all(c["verdict"] for c in clients)
    g = qwhile.grover_run(6, [5])
    assert g["rounds"][0]["oracle_calls"] == 6
    assert g["rounds"][0]["success_probability"] > 0.99


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok  {name}")
