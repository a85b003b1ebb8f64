"""Gate compilation and application on diagram states.

The simulator applies a small primitive set directly: h, the diagonal phase
family (t, tdg, s, sdg, z), the Paulis, cz and swap.  cx is compiled to
h-cz-h and ccx to the standard seven-T network, so every supported circuit
reduces to primitives before touching the diagram.

Applications are structural recursions over hash-consed nodes, memoized in
the store's operation cache; a node's result never goes stale because nodes
are immutable, so the cache is cleared only to reclaim memory.  In limdd
mode Pauli gates reduce to one label multiplication at the root, and gates
commute through edge labels on the way down (diagonal gates flip to their
adjoint across an X component and emit a global phase; h and cz conjugate
the label).
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .coeff import within_coeff_bound
from .ddcore import DDStore, Edge, State
from .pauli import (
    DIAG_OCTANT,
    PauliLIM,
    PauliString,
    commute_phase_past_lim,
    conjugate_lim,
    lim_mul,
    lim_scale,
)
from .stabtrack import StabilizerTableau


@dataclass(frozen=True)
class GateInstance:
    """One named gate on register indices (index 0 is the top qubit)."""

    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self) -> None:
        arity = GATE_ARITY.get(self.kind)
        if arity is None:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != arity:
            raise ValueError(
                f"{self.kind} expects {arity} qubit(s), got {len(self.qubits)}"
            )
        if arity > 1 and len(set(self.qubits)) != arity:
            raise ValueError(f"{self.kind} qubits must be distinct")


GATE_ARITY = {
    "h": 1, "t": 1, "tdg": 1, "s": 1, "sdg": 1,
    "x": 1, "y": 1, "z": 1,
    "cz": 2, "cx": 2, "swap": 2,
    "ccx": 3,
}

PRIMITIVE_KINDS = frozenset(
    {"h", "t", "tdg", "s", "sdg", "x", "y", "z", "cz", "swap"}
)


class GateCounts(NamedTuple):
    total: int
    t_count: int
    h_count: int
    cz_count: int


def compile_gate(gate: GateInstance) -> tuple[GateInstance, ...]:
    """Expand one gate into primitives."""
    if gate.kind in PRIMITIVE_KINDS:
        return (gate,)
    if gate.kind == "cx":
        c, t = gate.qubits
        return (
            GateInstance("h", (t,)),
            GateInstance("cz", (c, t)),
            GateInstance("h", (t,)),
        )
    if gate.kind == "ccx":
        a, b, t = gate.qubits
        seq = [
            GateInstance("h", (t,)),
            GateInstance("cx", (b, t)),
            GateInstance("tdg", (t,)),
            GateInstance("cx", (a, t)),
            GateInstance("t", (t,)),
            GateInstance("cx", (b, t)),
            GateInstance("tdg", (t,)),
            GateInstance("cx", (a, t)),
            GateInstance("t", (b,)),
            GateInstance("t", (t,)),
            GateInstance("cx", (a, b)),
            GateInstance("h", (t,)),
            GateInstance("t", (a,)),
            GateInstance("tdg", (b,)),
            GateInstance("cx", (a, b)),
        ]
        out: list[GateInstance] = []
        for g in seq:
            out.extend(compile_gate(g))
        return tuple(out)
    raise ValueError(f"cannot compile gate kind {gate.kind!r}")


def compile_sequence(gates: Iterable[GateInstance]) -> tuple[GateInstance, ...]:
    out: list[GateInstance] = []
    for g in gates:
        out.extend(compile_gate(g))
    return tuple(out)


def count_gates(primitives: Iterable[GateInstance]) -> GateCounts:
    total = t = h = cz = 0
    for g in primitives:
        total += 1
        if g.kind in ("t", "tdg"):
            t += 1
        elif g.kind == "h":
            h += 1
        elif g.kind == "cz":
            cz += 1
    return GateCounts(total, t, h, cz)


# -- application internals -------------------------------------------------


def _compose(store: DDStore, lim: PauliLIM, sub: Edge) -> Edge:
    if store.is_zero(sub):
        return store.zero_edge(lim.string.n)
    return Edge(lim_mul(store.ops, lim, sub.lim), sub.node)


def _scale_edge(store: DDStore, scalar: object, edge: Edge) -> Edge:
    if store.is_zero(edge):
        return edge
    return Edge(lim_scale(store.ops, scalar, edge.lim), edge.node)


def _neg_edge(store: DDStore, edge: Edge) -> Edge:
    return _scale_edge(store, store.ops.neg(store.ops.one), edge)


def _apply_diag(store: DDStore, edge: Edge, p: int, bit: int) -> Edge:
    if store.is_zero(edge):
        return edge
    if store.mode == "limdd":
        scal, p = commute_phase_past_lim(p, bit, edge.lim)
    else:
        scal = 0
    lim = edge.lim
    if scal:
        lim = lim_scale(store.ops, store.ops.omega(scal), lim)
    return _compose(store, lim, _diag_node(store, edge.node, p, bit))


def _diag_node(store: DDStore, node, p: int, bit: int) -> Edge:
    key = ("diag", p, bit, node.id)
    hit = store.op_cache.get(key)
    if hit is not None:
        return hit
    if node.level - 1 == bit:
        high = node.high
        if not store.is_zero(high):
            high = Edge(lim_scale(store.ops, store.ops.omega(p), high.lim), high.node)
        res = store.make_edge(node.low, high)
    else:
        res = store.make_edge(
            _apply_diag(store, node.low, p, bit),
            _apply_diag(store, node.high, p, bit),
        )
    store.op_cache[key] = res
    return res


def _apply_h(store: DDStore, edge: Edge, bit: int) -> Edge:
    if store.is_zero(edge):
        return edge
    lim = edge.lim
    if store.mode == "limdd":
        lim = conjugate_lim(store.ops, lim, "h", (bit,))
    return _compose(store, lim, _h_node(store, edge.node, bit))


def _h_node(store: DDStore, node, bit: int) -> Edge:
    key = ("h", bit, node.id)
    hit = store.op_cache.get(key)
    if hit is not None:
        return hit
    if node.level - 1 == bit:
        r0 = store.add(node.low, node.high)
        r1 = store.add(node.low, _neg_edge(store, node.high))
        res = _scale_edge(store, store.ops.invsqrt2, store.make_edge(r0, r1))
    else:
        res = store.make_edge(
            _apply_h(store, node.low, bit), _apply_h(store, node.high, bit)
        )
    store.op_cache[key] = res
    return res


def _apply_cz(store: DDStore, edge: Edge, hi: int, lo: int) -> Edge:
    if store.is_zero(edge):
        return edge
    lim = edge.lim
    if store.mode == "limdd":
        lim = conjugate_lim(store.ops, lim, "cz", (hi, lo))
    return _compose(store, lim, _cz_node(store, edge.node, hi, lo))


def _cz_node(store: DDStore, node, hi: int, lo: int) -> Edge:
    key = ("cz", hi, lo, node.id)
    hit = store.op_cache.get(key)
    if hit is not None:
        return hit
    if node.level - 1 == hi:
        res = store.make_edge(node.low, _apply_diag(store, node.high, 4, lo))
    else:
        res = store.make_edge(
            _apply_cz(store, node.low, hi, lo), _apply_cz(store, node.high, hi, lo)
        )
    store.op_cache[key] = res
    return res


def _apply_pauli_evdd(store: DDStore, edge: Edge, kind: str, bit: int) -> Edge:
    if store.is_zero(edge):
        return edge
    return _compose(store, edge.lim, _pauli_node_evdd(store, edge.node, kind, bit))


def _pauli_node_evdd(store: DDStore, node, kind: str, bit: int) -> Edge:
    key = ("pauli", kind, bit, node.id)
    hit = store.op_cache.get(key)
    if hit is not None:
        return hit
    if node.level - 1 == bit:
        if kind == "x":
            res = store.make_edge(node.high, node.low)
        else:  # y
            ops = store.ops
            res = store.make_edge(
                _scale_edge(store, ops.i_power(3), node.high),
                _scale_edge(store, ops.i_power(1), node.low),
            )
    else:
        res = store.make_edge(
            _apply_pauli_evdd(store, node.low, kind, bit),
            _apply_pauli_evdd(store, node.high, kind, bit),
        )
    store.op_cache[key] = res
    return res


def _apply_cx(store: DDStore, edge: Edge, control: int, target: int) -> Edge:
    edge = _apply_h(store, edge, target)
    a, b = (control, target) if control > target else (target, control)
    edge = _apply_cz(store, edge, a, b)
    return _apply_h(store, edge, target)


def apply_gate(store: DDStore, edge: Edge, kind: str, bits: tuple[int, ...]) -> Edge:
    """Apply one primitive gate; ``bits`` are internal positions (top = n-1)."""
    n = edge.lim.string.n
    for b in bits:
        if not 0 <= b < n:
            raise ValueError(f"gate bit {b} out of range for {n} qubits")
    if kind in ("x", "y", "z"):
        if store.mode == "limdd":
            b = bits[0]
            if kind == "x":
                p = PauliString.x_at(n, b)
            elif kind == "y":
                p = PauliString.y_at(n, b)
            else:
                p = PauliString.z_at(n, b)
            return _compose(store, PauliLIM(store.ops.one, p), edge)
        if kind == "z":
            return _apply_diag(store, edge, 4, bits[0])
        return _apply_pauli_evdd(store, edge, kind, bits[0])
    if kind in DIAG_OCTANT:
        return _apply_diag(store, edge, DIAG_OCTANT[kind], bits[0])
    if kind == "h":
        return _apply_h(store, edge, bits[0])
    if kind == "cz":
        a, b = bits
        hi, lo = (a, b) if a > b else (b, a)
        return _apply_cz(store, edge, hi, lo)
    if kind == "swap":
        a, b = bits
        edge = _apply_cx(store, edge, a, b)
        edge = _apply_cx(store, edge, b, a)
        return _apply_cx(store, edge, a, b)
    raise ValueError(f"not a primitive gate kind: {kind!r}")


# -- full-circuit driver ---------------------------------------------------


@dataclass
class RunStats:
    n_qubits: int
    counts: GateCounts
    node_count: int
    final_nodes: int  # node_count plus the terminal
    peak_nodes: int
    max_coeff_bits: int
    width_per_level: tuple[int, ...]
    coeff_check: bool | None
    bound_check: bool | None
    gc_runs: int
    runtime_ms: float


def verify_coeff_bound(store: DDStore, root: Edge, n: int, t_count: int) -> bool:
    """All bulk labels, and the squared magnitude of the root label, obey the
    integer-size bound that grows with qubit and T-gate count.  The root label
    itself is exempt: it absorbs the normalization of every h gate, and only
    its magnitude is constrained."""
    k = 2 * n + 2 * t_count + 1
    if not within_coeff_bound(root.lim.factor.abs2(), k):
        return False
    for node in store.reachable([root]).values():
        if node.level == 0:
            continue
        for e in (node.low, node.high):
            if not within_coeff_bound(e.lim.factor, k):
                return False
    return True


def simulate(
    circuit,
    policy=None,
    mode: str = "limdd",
    norm_rule: str = "low",
    *,
    check_coeffs: bool = False,
    check_bounds: bool = False,
    clear_caches: bool = True,
    gc_capacity: int | None = None,
    gc_ratio: float | None = None,
    store: DDStore | None = None,
) -> tuple[State, RunStats]:
    """Run a circuit from the all-zero state and report structural stats.

    ``circuit`` needs ``n_qubits`` and ``gates`` attributes.  When
    ``check_bounds`` is set, a stabilizer tableau tracks the circuit and the
    diagram width is compared against the predicted ceiling after every
    gate; ``check_coeffs`` (exact backend only) verifies the label-size
    bound the same way.
    """
    t0 = time.perf_counter()
    n = circuit.n_qubits
    if store is None:
        kwargs = {}
        if gc_capacity is not None:
            kwargs["gc_capacity"] = gc_capacity
        if gc_ratio is not None:
            kwargs["gc_ratio"] = gc_ratio
        store = DDStore(policy=policy, mode=mode, norm_rule=norm_rule, **kwargs)
    root = store.zero_state(n)
    tableau = StabilizerTableau(n) if check_bounds else None
    coeff_ok: bool | None = True if check_coeffs else None
    bound_ok: bool | None = True if check_bounds else None
    if check_coeffs and store.ops.backend != "exact":
        coeff_ok = None
    t_seen = 0
    applied = 0
    all_primitives: list[GateInstance] = []
    for gate in circuit.gates:
        primitives = compile_gate(gate)
        all_primitives.extend(primitives)
        for prim in primitives:
            bits = tuple(n - 1 - q for q in prim.qubits)
            root = apply_gate(store, root, prim.kind, bits)
            applied += 1
            if prim.kind in ("t", "tdg"):
                t_seen += 1
        if tableau is not None:
            tableau.apply_gate(gate.kind, tuple(n - 1 - q for q in gate.qubits))
            width = max(store.stats(root, n).width_per_level, default=0)
            if store.mode == "limdd":
                ceiling = 1 << tableau.nullity()
            else:
                ceiling = 1 << tableau.local_nullity()
            if width > ceiling:
                bound_ok = False
        if coeff_ok is True and not verify_coeff_bound(store, root, n, t_seen):
            coeff_ok = False
        if clear_caches:
            store.clear_op_caches()
        store.maybe_collect([root])
    stats = store.stats(root, n)
    counts = count_gates(all_primitives)
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    run = RunStats(
        n_qubits=n,
        counts=counts,
        node_count=stats.node_count,
        final_nodes=stats.node_count + 1,
        peak_nodes=store.peak_nodes,
        max_coeff_bits=stats.max_coeff_bits,
        width_per_level=stats.width_per_level,
        coeff_check=coeff_ok,
        bound_check=bound_ok,
        gc_runs=store.gc_runs,
        runtime_ms=runtime_ms,
    )
    return State(store, root, n), run
