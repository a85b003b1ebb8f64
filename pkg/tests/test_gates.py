"""Gate compilation, primitive application, and the circuit driver."""
from __future__ import annotations

import random

import pytest

from qddsim import Circuit, GateInstance, dense_simulate, simulate
from qddsim.coeff import ONE, ZERO
from qddsim.ddcore import DDStore
from qddsim.gates import (
    GATE_ARITY,
    PRIMITIVE_KINDS,
    apply_gate,
    compile_gate,
    compile_sequence,
    count_gates,
)

from conftest import assert_matches_dense


# -- gate records ----------------------------------------------------------

def test_gate_instance_validation():
    with pytest.raises(ValueError):
        GateInstance("rx", (0,))
    with pytest.raises(ValueError):
        GateInstance("h", (0, 1))
    with pytest.raises(ValueError):
        GateInstance("cx", (0,))
    with pytest.raises(ValueError):
        GateInstance("cx", (1, 1))
    with pytest.raises(ValueError):
        GateInstance("ccx", (0, 2, 2))


def test_arity_table_covers_primitives():
    assert PRIMITIVE_KINDS <= set(GATE_ARITY)
    assert GATE_ARITY["ccx"] == 3 and GATE_ARITY["cx"] == 2


# -- compilation -----------------------------------------------------------

def test_compile_primitive_passthrough():
    g = GateInstance("t", (1,))
    assert compile_gate(g) == (g,)


def test_compile_cx_is_h_cz_h():
    out = compile_gate(GateInstance("cx", (0, 2)))
    assert [g.kind for g in out] == ["h", "cz", "h"]
    assert out[0].qubits == (2,) and out[2].qubits == (2,)
    assert out[1].qubits == (0, 2)


def test_compile_ccx_counts():
    prims = compile_gate(GateInstance("ccx", (0, 1, 2)))
    assert all(g.kind in PRIMITIVE_KINDS for g in prims)
    counts = count_gates(prims)
    assert counts.total == 27
    assert counts.t_count == 7
    assert counts.h_count == 14
    assert counts.cz_count == 6


def test_compile_sequence_concatenates():
    seq = compile_sequence(
        [GateInstance("h", (0,)), GateInstance("cx", (0, 1))]
    )
    assert [g.kind for g in seq] == ["h", "h", "cz", "h"]
    assert count_gates(seq) == (4, 0, 3, 1)


# -- primitive semantics ---------------------------------------------------

def test_ccx_truth_table():
    """Target flips exactly when both controls are set; index bit n-1 is the
    top register qubit."""
    for a in (0, 1):
        for b in (0, 1):
            for c in (0, 1):
                gates = []
                if a:
                    gates.append(GateInstance("x", (0,)))
                if b:
                    gates.append(GateInstance("x", (1,)))
                if c:
                    gates.append(GateInstance("x", (2,)))
                gates.append(GateInstance("ccx", (0, 1, 2)))
                state, _ = simulate(Circuit(3, tuple(gates)))
                vec = state.to_vector()
                expect = (a << 2) | (b << 1) | (c ^ (a & b))
                assert vec[expect] == ONE
                assert all(v == ZERO for i, v in enumerate(vec) if i != expect)


ALL_KINDS = [
    ("h", (0,)), ("t", (1,)), ("tdg", (2,)), ("s", (0,)), ("sdg", (1,)),
    ("x", (2,)), ("y", (0,)), ("z", (1,)),
    ("cx", (0, 2)), ("cz", (1, 2)), ("swap", (0, 1)), ("ccx", (2, 0, 1)),
]


@pytest.mark.parametrize("mode", ["limdd", "evdd"])
@pytest.mark.parametrize("kind,qubits", ALL_KINDS)
def test_each_gate_matches_dense(mode, kind, qubits):
    prefix = [
        GateInstance("h", (0,)), GateInstance("t", (0,)),
        GateInstance("h", (1,)), GateInstance("s", (2,)),
        GateInstance("cx", (1, 2)),
    ]
    circ = Circuit(3, tuple(prefix) + (GateInstance(kind, qubits),))
    assert_matches_dense(circ, mode)


def _random_root(store: DDStore, seed: int):
    root = store.zero_state(3)
    rng = random.Random(seed)
    for _ in range(6):
        kind = rng.choice(["h", "t", "s"])
        root = apply_gate(store, root, kind, (rng.randrange(3),))
    return root


SELF_INVERSE = [
    ("h", (0,)), ("x", (1,)), ("y", (2,)), ("z", (0,)),
    ("cx", (0, 1)), ("cz", (1, 2)), ("swap", (0, 2)), ("ccx", (0, 1, 2)),
]


@pytest.mark.parametrize("mode", ["limdd", "evdd"])
@pytest.mark.parametrize("kind,qubits", SELF_INVERSE)
def test_self_inverse_round_trips(mode, kind, qubits):
    """Applying a self-inverse gate twice restores the node; the root label
    may differ only by a symmetry of that node, so vectors must agree."""
    store = DDStore(mode=mode)
    before = _random_root(store, seed=7)
    after = before
    for g in compile_gate(GateInstance(kind, qubits)) * 2:
        bits = tuple(3 - 1 - q for q in g.qubits)
        after = apply_gate(store, after, g.kind, bits)
    assert after.node is before.node
    assert store.to_vector(after) == store.to_vector(before)


@pytest.mark.parametrize("mode", ["limdd", "evdd"])
def test_adjoint_pairs_cancel(mode):
    store = DDStore(mode=mode)
    before = _random_root(store, seed=11)
    for a, b in (("t", "tdg"), ("s", "sdg"), ("tdg", "t"), ("sdg", "s")):
        e = apply_gate(store, before, a, (1,))
        e = apply_gate(store, e, b, (1,))
        assert e == before


def test_phase_gate_power_identities():
    store = DDStore()
    base = _random_root(store, seed=3)
    two_t = apply_gate(store, apply_gate(store, base, "t", (1,)), "t", (1,))
    assert two_t == apply_gate(store, base, "s", (1,))
    two_s = apply_gate(store, apply_gate(store, base, "s", (2,)), "s", (2,))
    assert two_s == apply_gate(store, base, "z", (2,))
    e = base
    for _ in range(8):
        e = apply_gate(store, e, "t", (0,))
    assert e == base


def test_apply_gate_rejects_composites_and_bad_bits():
    store = DDStore()
    root = store.zero_state(2)
    with pytest.raises(ValueError):
        apply_gate(store, root, "cx", (0, 1))
    with pytest.raises(ValueError):
        apply_gate(store, root, "ccx", (0, 1))
    with pytest.raises(ValueError):
        apply_gate(store, root, "h", (2,))
    with pytest.raises(ValueError):
        apply_gate(store, root, "h", (-1,))


# -- driver stats ----------------------------------------------------------

def test_runstats_fields_bell():
    circ = Circuit(2, (GateInstance("h", (0,)), GateInstance("cx", (0, 1))))
    state, run = simulate(circ, check_coeffs=True, check_bounds=True)
    assert run.n_qubits == 2
    assert run.counts.total == 4  # cx compiles to h cz h
    assert run.counts.t_count == 0
    assert run.final_nodes == run.node_count + 1
    assert run.peak_nodes >= run.node_count
    assert run.width_per_level == (0, 1, 1)  # level 0 is the terminal
    assert run.coeff_check is True
    assert run.bound_check is True
    assert run.gc_runs >= 0
    assert run.runtime_ms >= 0.0
    assert state.to_vector() == dense_simulate(circ)


def test_runstats_checks_default_to_none():
    circ = Circuit(1, (GateInstance("h", (0,)),))
    _, run = simulate(circ)
    assert run.coeff_check is None
    assert run.bound_check is None


def test_coeff_check_skipped_for_float_backend():
    from qddsim.coeff import CoeffPolicy

    circ = Circuit(1, (GateInstance("h", (0,)),))
    _, run = simulate(circ, policy=CoeffPolicy("float"), check_coeffs=True)
    assert run.coeff_check is None


def test_gc_kwargs_respected():
    circ = Circuit(4, tuple(
        GateInstance(k, (q,))
        for q in range(4)
        for k in ("h", "t", "h", "t", "h")
    ))
    _, run = simulate(circ, gc_capacity=8, gc_ratio=0.5)
    assert run.gc_runs >= 1
