"""Stabilizer-rank tracking for diagram-width ceilings.

A tableau of signed Pauli rows follows the circuit from the all-zero state.
Clifford gates conjugate every row exactly.  A non-Clifford gate cannot keep
the whole group, so it keeps the subgroup that commutes with it: rows are
combined so that at most a few carry the offending component, those few are
discarded, and the rest survive unchanged.  The nullity (qubits minus
surviving rows) upper-bounds the log of the widest diagram level in limdd
mode; the local nullity (qubits minus positions still pinned by a weight-one
row in the string span) plays the same role for evdd mode.

Rows are (sign, x, z) with sign in {0, 1}; stabilizer groups are abelian and
never contain minus identity, so products are order-independent and every
member is fixed by its string.
"""
from __future__ import annotations

from typing import Iterable, NamedTuple

from .pauli import conj_bits

_CLIFFORD_KINDS = frozenset({"h", "s", "sdg", "x", "y", "z", "cz", "cx", "swap"})

Row = tuple[int, int, int]  # (sign, x, z)


def _row_mul(r1: Row, r2: Row) -> Row:
    s1, x1, z1 = r1
    s2, x2, z2 = r2
    x, z = x1 ^ x2, z1 ^ z2
    f = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        + 2 * (z1 & x2).bit_count()
        - (x & z).bit_count()
    ) & 3
    # Rows commute, so the phase is +/-1.
    return (s1 ^ s2 ^ (f >> 1), x, z)


def _interleave(x: int, z: int) -> int:
    key = 0
    shift = 0
    while x or z:
        key |= ((x & 1) | ((z & 1) << 1)) << shift
        x >>= 1
        z >>= 1
        shift += 2
    return key


class StabilizerTableau:
    """Signed stabilizer rows of the tracked state's surviving group."""

    def __init__(self, n_qubits: int) -> None:
        if n_qubits < 1:
            raise ValueError("need at least one qubit")
        self.n = n_qubits
        self.rows: list[Row] = [(0, 0, 1 << k) for k in range(n_qubits)]

    # -- membership --------------------------------------------------------

    def _string_basis(self) -> dict[int, Row]:
        basis: dict[int, Row] = {}
        for row in self.rows:
            cur = row
            key = _interleave(cur[1], cur[2])
            while key:
                lead = key.bit_length() - 1
                have = basis.get(lead)
                if have is None:
                    basis[lead] = cur
                    break
                key ^= _interleave(have[1], have[2])
                cur = _row_mul(cur, have)
        return basis

    def _reduce_string(
        self, basis: dict[int, Row], x: int, z: int
    ) -> Row | None:
        """Member of the group with the given string, or None."""
        acc: Row = (0, 0, 0)
        key = _interleave(x, z)
        while key:
            lead = key.bit_length() - 1
            have = basis.get(lead)
            if have is None:
                return None
            key ^= _interleave(have[1], have[2])
            acc = _row_mul(acc, have)
        return acc

    def contains(self, sign: int, x: int, z: int) -> bool:
        member = self._reduce_string(self._string_basis(), x, z)
        return member is not None and member[0] == sign

    # -- gate updates ------------------------------------------------------

    def apply_gate(self, kind: str, bits: tuple[int, ...]) -> int:
        """Update for one gate on internal bit positions; returns how many
        rows were dropped."""
        if kind in _CLIFFORD_KINDS:
            self.rows = [
                (s ^ flip, x2, z2)
                for (s, x, z) in self.rows
                for (x2, z2, flip) in (conj_bits(kind, bits, x, z),)
            ]
            return 0
        if kind in ("t", "tdg"):
            return self._discard_component(x_mask=1 << bits[0], z_mask=0)
        if kind == "ccx":
            return self._apply_toffoli(*bits)
        raise ValueError(f"tableau cannot track gate kind {kind!r}")

    def _discard_component(self, x_mask: int, z_mask: int) -> int:
        """Drop the (at most one-dimensional) part of the group that fails
        to commute with a gate, marked by a single x- or z-bit."""
        pivot = None
        kept: list[Row] = []
        for row in self.rows:
            if (row[1] & x_mask) or (row[2] & z_mask):
                if pivot is None:
                    pivot = row
                else:
                    kept.append(_row_mul(row, pivot))
            else:
                kept.append(row)
        self.rows = kept
        return 0 if pivot is None else 1

    def _apply_toffoli(self, c1: int, c2: int, t: int) -> int:
        basis = self._string_basis()

        def signed_in(sign: int, x: int, z: int) -> bool:
            member = self._reduce_string(basis, x, z)
            return member is not None and member[0] == sign

        # The gate degenerates to a Clifford whenever a control is pinned to
        # a basis value or the target is pinned to an x eigenstate.
        for bit, other in ((c1, c2), (c2, c1)):
            if signed_in(0, 0, 1 << bit):
                return 0
            if signed_in(1, 0, 1 << bit):
                self.apply_gate("cx", (other, t))
                return 0
        if signed_in(0, 1 << t, 0):
            return 0
        if signed_in(1, 1 << t, 0):
            self.apply_gate("cz", (c1, c2))
            return 0
        dropped = 0
        for x_mask, z_mask in ((1 << c1, 0), (1 << c2, 0), (0, 1 << t)):
            dropped += self._discard_component(x_mask, z_mask)
        return dropped

    # -- bounds ------------------------------------------------------------

    def nullity(self) -> int:
        return self.n - len(self.rows)

    def local_nullity(self) -> int:
        """Qubits not pinned by any weight-one string in the group's span."""
        basis = self._string_basis()
        pinned = 0
        for k in range(self.n):
            for x, z in ((1 << k, 0), (1 << k, 1 << k), (0, 1 << k)):
                if self._reduce_string(basis, x, z) is not None:
                    pinned += 1
                    break
        return self.n - pinned


class BoundReport(NamedTuple):
    n_qubits: int
    gate_count: int
    t_count: int
    nullity: int
    local_nullity: int
    limdd_width_bound: int
    evdd_width_bound: int
    dropped_rows: int
    per_gate: tuple[tuple[int, int], ...]  # (nullity, local nullity) after each gate


def _t_weight(kind: str) -> int:
    if kind in ("t", "tdg"):
        return 1
    if kind == "ccx":
        return 7
    return 0


def track(circuit, native_ccx: bool = True) -> BoundReport:
    """Run the tableau over a circuit and report width ceilings.

    With ``native_ccx`` the tableau consumes ccx gates directly (each drops
    at most three generators); otherwise they are expanded into the seven-T
    Clifford+T sequence first, which loosens the ceiling to match what a
    structural gate-by-gate argument would give.
    """
    n = circuit.n_qubits
    tab = StabilizerTableau(n)
    dropped = 0
    t_count = 0
    trace: list[tuple[int, int]] = []
    for gate in circuit.gates:
        if gate.kind == "ccx" and not native_ccx:
            from .gates import compile_gate

            for prim in compile_gate(gate):
                bits = tuple(n - 1 - q for q in prim.qubits)
                dropped += tab.apply_gate(prim.kind, bits)
        else:
            bits = tuple(n - 1 - q for q in gate.qubits)
            dropped += tab.apply_gate(gate.kind, bits)
        t_count += _t_weight(gate.kind)
        trace.append((tab.nullity(), tab.local_nullity()))
    nullity = tab.nullity()
    local = tab.local_nullity()
    return BoundReport(
        n_qubits=n,
        gate_count=len(circuit.gates),
        t_count=t_count,
        nullity=nullity,
        local_nullity=local,
        limdd_width_bound=1 << nullity,
        evdd_width_bound=1 << local,
        dropped_rows=dropped,
        per_gate=tuple(trace),
    )
