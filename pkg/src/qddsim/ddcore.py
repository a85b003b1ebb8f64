"""Decision-diagram core: hash-consed nodes and canonical edge construction.

Two diagram flavors share one node store.  In ``evdd`` mode every edge label
is a plain scalar (the Pauli string is always identity) and a node is
normalized by dividing out the low edge's weight.  In ``limdd`` mode labels
are scalar-weighted Pauli strings; a node keeps an identity label on its low
edge and a canonical label on its high edge, chosen as the minimum over the
freedom the children's stabilizer groups allow, so states that differ only
by a Pauli with a phase share one node.

Zero branches are represented by edges whose label factor is the backend
zero; free-standing zero edges point at the terminal and carry the level in
their (identity) string length.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

from .coeff import CoeffPolicy, ScalarOps, bit_size, scalar_ops
from .pauli import (
    PauliLIM,
    PauliString,
    follow_basis,
    lim_inverse,
    lim_key,
    lim_mul,
    lim_scale,
    string_key,
)


class DiagramError(Exception):
    """A structural invariant of the diagram store was violated."""


class Node:
    __slots__ = ("id", "level", "low", "high")

    def __init__(self, node_id: int, level: int, low: Edge | None, high: Edge | None):
        self.id = node_id
        self.level = level
        self.low = low
        self.high = high

    def __repr__(self) -> str:
        return f"<Node {self.id} level={self.level}>"


class Edge(NamedTuple):
    lim: PauliLIM
    node: Node

    @property
    def level(self) -> int:
        return self.lim.string.n


class DiagramStats(NamedTuple):
    node_count: int  # reachable non-terminal nodes
    width_per_level: tuple[int, ...]  # index = level; [0] stays 0
    max_coeff_bits: int  # exact backend only; 0 for float


def _lift(lim: PauliLIM, n: int) -> PauliLIM:
    """Pad a label with identity on new top qubits."""
    return PauliLIM(lim.factor, PauliString(n, lim.string.x, lim.string.z))


class DDStore:
    """Owner of the unique table, operation caches and garbage collector."""

    def __init__(
        self,
        policy: CoeffPolicy | None = None,
        mode: str = "limdd",
        norm_rule: str = "low",
        gc_capacity: int = 1 << 16,
        gc_ratio: float = 0.75,
    ) -> None:
        if mode not in ("evdd", "limdd"):
            raise ValueError(f"unknown diagram mode {mode!r}")
        if norm_rule not in ("low", "l2"):
            raise ValueError(f"unknown normalization rule {norm_rule!r}")
        self.policy = policy if policy is not None else CoeffPolicy()
        self.ops: ScalarOps = scalar_ops(self.policy)
        if norm_rule == "l2" and (mode != "evdd" or self.policy.backend != "float"):
            raise ValueError("l2 normalization requires the float evdd backend")
        self.mode = mode
        self.norm_rule = norm_rule
        self.terminal = Node(0, 0, None, None)
        self.nodes: dict[int, Node] = {0: self.terminal}
        self.unique: dict[tuple, Node] = {}
        self.next_id = 1
        self.add_cache: dict[tuple, Edge] = {}
        self.op_cache: dict[tuple, Edge] = {}
        self.stab_cache: dict[int, tuple[PauliLIM, ...]] = {0: ()}
        self.snorm_cache: dict[int, object] = {}
        self.peak_nodes = 1
        self.gc_capacity = gc_capacity
        self.gc_ratio = gc_ratio
        self.gc_runs = 0

    # -- edge constructors -------------------------------------------------

    def terminal_edge(self, factor: object) -> Edge:
        return Edge(PauliLIM(factor, PauliString(0, 0, 0)), self.terminal)

    def zero_edge(self, level: int) -> Edge:
        return Edge(PauliLIM(self.ops.zero, PauliString(level, 0, 0)), self.terminal)

    def is_zero(self, edge: Edge) -> bool:
        return self.ops.is_zero(edge.lim.factor)

    def identity_lim(self, n: int) -> PauliLIM:
        return PauliLIM(self.ops.one, PauliString(n, 0, 0))

    def zero_state(self, n: int) -> Edge:
        edge = self.terminal_edge(self.ops.one)
        for m in range(n):
            edge = self.make_edge(edge, self.zero_edge(m))
        return edge

    # -- unique table ------------------------------------------------------

    def _node_key(self, level: int, low: Edge, high: Edge) -> tuple:
        ops = self.ops
        return (
            level,
            lim_key(ops, low.lim),
            low.node.id,
            lim_key(ops, high.lim),
            high.node.id,
        )

    def _make_node(self, level: int, low: Edge, high: Edge) -> Node:
        key = self._node_key(level, low, high)
        node = self.unique.get(key)
        if node is None:
            node = Node(self.next_id, level, low, high)
            self.next_id += 1
            self.unique[key] = node
            self.nodes[node.id] = node
            if len(self.nodes) > self.peak_nodes:
                self.peak_nodes = len(self.nodes)
        return node

    # -- canonical edge construction ---------------------------------------

    def make_edge(self, low: Edge, high: Edge) -> Edge:
        """Build the canonical edge for |0>(low) + |1>(high), one level up."""
        m = low.lim.string.n
        if high.lim.string.n != m:
            raise DiagramError("child edges are at different levels")
        low_zero = self.is_zero(low)
        high_zero = self.is_zero(high)
        if low_zero and high_zero:
            # Exact arithmetic can only get here through caller error (the
            # addition shortcuts catch true cancellation first); under a float
            # tolerance a fully cancelled pair is a legitimate zero vector.
            if self.ops.backend == "exact":
                raise DiagramError("both children are zero")
            return self.zero_edge(m + 1)
        if self.mode == "evdd":
            return self._make_edge_evdd(m, low, high, low_zero, high_zero)
        return self._make_edge_limdd(m, low, high, low_zero, high_zero)

    def _make_edge_evdd(
        self, m: int, low: Edge, high: Edge, low_zero: bool, high_zero: bool
    ) -> Edge:
        ops = self.ops
        one = self.identity_lim(m)
        zero = PauliLIM(ops.zero, PauliString(m, 0, 0))
        if low_zero:
            node = self._make_node(m + 1, Edge(zero, high.node), Edge(one, high.node))
            return Edge(_lift(high.lim, m + 1), node)
        if high_zero:
            node = self._make_node(m + 1, Edge(one, low.node), Edge(zero, low.node))
            return Edge(_lift(low.lim, m + 1), node)
        a, b = low.lim.factor, high.lim.factor
        if self.norm_rule == "l2":
            norm = (abs(a) ** 2 + abs(b) ** 2) ** 0.5
            phase = a / abs(a)
            w = norm * phase
            lo, hi = a / w, b / w
            node = self._make_node(
                m + 1,
                Edge(PauliLIM(lo, PauliString(m, 0, 0)), low.node),
                Edge(PauliLIM(hi, PauliString(m, 0, 0)), high.node),
            )
            return Edge(PauliLIM(w, PauliString(m + 1, 0, 0)), node)
        c = ops.div(b, a)
        node = self._make_node(
            m + 1,
            Edge(one, low.node),
            Edge(PauliLIM(c, PauliString(m, 0, 0)), high.node),
        )
        return Edge(PauliLIM(a, PauliString(m + 1, 0, 0)), node)

    def _make_edge_limdd(
        self, m: int, low: Edge, high: Edge, low_zero: bool, high_zero: bool
    ) -> Edge:
        ops = self.ops
        if low_zero:
            inner = self._make_edge_limdd(m, high, low, False, True)
            x_top = PauliLIM(ops.one, PauliString.x_at(m + 1, m))
            return Edge(lim_mul(ops, x_top, inner.lim), inner.node)
        if high_zero:
            node = self._make_node(
                m + 1,
                Edge(self.identity_lim(m), low.node),
                Edge(PauliLIM(ops.zero, PauliString(m, 0, 0)), low.node),
            )
            return Edge(_lift(low.lim, m + 1), node)
        if low.node.id > high.node.id:
            inner = self._make_edge_limdd(m, high, low, False, False)
            x_top = PauliLIM(ops.one, PauliString.x_at(m + 1, m))
            return Edge(lim_mul(ops, x_top, inner.lim), inner.node)
        a_hat = lim_mul(ops, lim_inverse(ops, low.lim), high.lim)
        c_hat, root_lim = self._get_labels(a_hat, low.node, high.node)
        node = self._make_node(
            m + 1, Edge(self.identity_lim(m), low.node), Edge(c_hat, high.node)
        )
        return Edge(lim_mul(ops, _lift(low.lim, m + 1), root_lim), node)

    def _get_labels(
        self, a_hat: PauliLIM, v0: Node, v1: Node
    ) -> tuple[PauliLIM, PauliLIM]:
        """Canonical high label for |0>|v0> + |1> a_hat |v1>, plus the root
        label (on one more qubit) that undoes the canonicalization.

        Stage 1 minimizes the Pauli string of g0 * a_hat * g1 over both
        children's stabilizer groups by greedy XOR reduction of key integers.
        Stage 2 sweeps a top-qubit Z flip and, when both children coincide, a
        top-qubit X swap, and keeps the scalar the backend ranks smallest.
        """
        ops = self.ops
        m = a_hat.string.n
        ident = self.identity_lim(m)
        basis: dict[int, tuple[int, PauliLIM, PauliLIM]] = {}

        def insert(key: int, left: PauliLIM, right: PauliLIM) -> None:
            while key:
                lead = key.bit_length() - 1
                row = basis.get(lead)
                if row is None:
                    basis[lead] = (key, left, right)
                    return
                key ^= row[0]
                left = lim_mul(ops, row[1], left)
                right = lim_mul(ops, right, row[2])

        for g in self.stab_gens(v0):
            insert(string_key(g.string), g, ident)
        for g in self.stab_gens(v1):
            insert(string_key(g.string), ident, g)

        cur = a_hat
        key = string_key(a_hat.string)
        left_total = ident
        for lead in sorted(basis, reverse=True):
            if (key >> lead) & 1:
                row_key, left, right = basis[lead]
                key ^= row_key
                cur = lim_mul(ops, left, lim_mul(ops, cur, right))
                left_total = lim_mul(ops, left, left_total)

        lam = cur.factor
        p = cur.string
        candidates: list[tuple[int, int, object]] = [
            (0, 0, lam),
            (0, 1, ops.neg(lam)),
        ]
        if v0 is v1:
            inv_lam = ops.inv(lam)
            candidates.append((1, 0, inv_lam))
            candidates.append((1, 1, ops.neg(inv_lam)))
        best = candidates[0]
        best_key = ops.argmin_key(best[2])
        for cand in candidates[1:]:
            k = ops.argmin_key(cand[2])
            if k < best_key:
                best, best_key = cand, k
        x_bit, s_bit, mu = best

        g0_inv = _lift(lim_inverse(ops, left_total), m + 1)
        z_top = PauliLIM(ops.one, PauliString.z_at(m + 1, m))
        if x_bit:
            swap_lim = PauliLIM(lam, PauliString(m + 1, p.x | (1 << m), p.z))
            root = lim_mul(ops, g0_inv, swap_lim)
            if s_bit:
                root = lim_mul(ops, root, z_top)
        else:
            root = g0_inv
            if s_bit:
                root = lim_mul(ops, z_top, root)
        return PauliLIM(mu, p), root

    # -- stabilizer generators --------------------------------------------

    def stab_gens(self, node: Node) -> tuple[PauliLIM, ...]:
        """Generators of the Pauli stabilizer group of the node's state.

        Factors are +/-1.  Memoized per node; the groups are abelian and
        never contain -identity, so every member is determined by its string.
        """
        if self.mode != "limdd":
            raise DiagramError("stabilizer generators exist only in limdd mode")
        cached = self.stab_cache.get(node.id)
        if cached is not None:
            return cached
        ops = self.ops
        level = node.level
        top = level - 1
        low, high = node.low, node.high
        gens: list[PauliLIM]
        if self.is_zero(high):
            gens = [PauliLIM(ops.one, PauliString.z_at(level, top))]
            for g in self.stab_gens(low.node):
                gens.append(_lift(g, level))
        else:
            v0, v1 = low.node, high.node
            c = high.lim
            below = self.stab_gens(v0)
            # Conjugating by the high label only flips signs of members that
            # anticommute with its string.
            rotated = []
            for g in self.stab_gens(v1):
                anti = ((g.string.x & c.string.z).bit_count()
                        + (g.string.z & c.string.x).bit_count()) & 1
                rotated.append(PauliLIM(ops.neg(g.factor) if anti else g.factor,
                                        g.string))
            gens = []
            seen: set[int] = set()
            ident = self.identity_lim(top)
            basis: dict[int, tuple[int, PauliLIM, PauliLIM]] = {}

            def insert(key: int, a: PauliLIM, b: PauliLIM):
                while key:
                    lead = key.bit_length() - 1
                    row = basis.get(lead)
                    if row is None:
                        basis[lead] = (key, a, b)
                        return None
                    key ^= row[0]
                    a = lim_mul(ops, row[1], a)
                    b = lim_mul(ops, row[2], b)
                return a, b

            for g in below:
                insert(string_key(g.string), g, ident)
            for g in rotated:
                out = insert(string_key(g.string), ident, g)
                if out is None:
                    continue
                a, b = out
                # Full reduction: a and b share one string, a stabilizes the
                # low branch, b the high branch.
                p = a.string
                if p.is_identity() or string_key(p) in seen:
                    continue
                seen.add(string_key(p))
                z = p.z if ops.eq(a.factor, b.factor) else p.z | (1 << top)
                gens.append(PauliLIM(a.factor, PauliString(level, p.x, z)))
            if v0 is v1:
                gamma = c.factor
                p = c.string
                i_unit = ops.i_power(1)
                if ops.eq(gamma, ops.one) or ops.eq(gamma, ops.neg(ops.one)):
                    gens.append(
                        PauliLIM(gamma, PauliString(level, p.x | (1 << top), p.z))
                    )
                elif ops.eq(gamma, i_unit):
                    gens.append(
                        PauliLIM(
                            ops.one,
                            PauliString(level, p.x | (1 << top), p.z | (1 << top)),
                        )
                    )
                elif ops.eq(gamma, ops.neg(i_unit)):
                    gens.append(
                        PauliLIM(
                            ops.neg(ops.one),
                            PauliString(level, p.x | (1 << top), p.z | (1 << top)),
                        )
                    )
        out = tuple(gens)
        self.stab_cache[node.id] = out
        return out

    # -- traversal ---------------------------------------------------------

    def follow(self, edge: Edge, bit: int) -> Edge:
        """Restrict the top qubit to a basis value, one level down."""
        m = edge.lim.string.n
        if m < 1:
            raise DiagramError("cannot follow below the terminal")
        if self.is_zero(edge):
            return self.zero_edge(m - 1)
        ops = self.ops
        lim = edge.lim
        new_bit, oct_exp = follow_basis(bit, lim.string.code_at(m - 1))
        child = edge.node.high if new_bit else edge.node.low
        if self.is_zero(child):
            return self.zero_edge(m - 1)
        factor = lim.factor
        if oct_exp:
            factor = ops.mul(factor, ops.omega(oct_exp))
        mask = (1 << (m - 1)) - 1
        below = PauliLIM(
            factor, PauliString(m - 1, lim.string.x & mask, lim.string.z & mask)
        )
        return Edge(lim_mul(ops, below, child.lim), child.node)

    def eval_amplitude(self, edge: Edge, index: int) -> object:
        """Amplitude of one basis state; bit k-1 of the index is qubit k."""
        cur = edge
        for m in range(edge.lim.string.n, 0, -1):
            cur = self.follow(cur, (index >> (m - 1)) & 1)
        return cur.lim.factor

    def to_vector(self, edge: Edge) -> list:
        n = edge.lim.string.n
        return [self.eval_amplitude(edge, i) for i in range(1 << n)]

    # -- pointwise addition ------------------------------------------------

    def add(self, e: Edge, f: Edge) -> Edge:
        if self.is_zero(e):
            return f
        if self.is_zero(f):
            return e
        ops = self.ops
        m = e.lim.string.n
        if f.lim.string.n != m:
            raise DiagramError("cannot add edges at different levels")
        if m == 0:
            s = ops.add(e.lim.factor, f.lim.factor)
            if ops.is_zero(s):
                return self.zero_edge(0)
            return self.terminal_edge(s)
        if e.node.id > f.node.id:
            e, f = f, e
        a = e.lim
        c = lim_mul(ops, lim_inverse(ops, a), f.lim)
        if self.mode == "limdd":
            c = self._coset_min(c, f.node)
        if e.node is f.node and c.string.is_identity():
            s = ops.add(ops.one, c.factor)
            if ops.is_zero(s):
                return self.zero_edge(m)
            return Edge(lim_scale(ops, s, a), e.node)
        key = (e.node.id, lim_key(ops, c), f.node.id)
        hit = self.add_cache.get(key)
        if hit is None:
            left = Edge(self.identity_lim(m), e.node)
            right = Edge(c, f.node)
            r0 = self.add(self.follow(left, 0), self.follow(right, 0))
            r1 = self.add(self.follow(left, 1), self.follow(right, 1))
            if self.is_zero(r0) and self.is_zero(r1):
                hit = self.zero_edge(m)
            else:
                hit = self.make_edge(r0, r1)
            self.add_cache[key] = hit
        if self.is_zero(hit):
            return self.zero_edge(m)
        return Edge(lim_mul(ops, a, hit.lim), hit.node)

    def _coset_min(self, c: PauliLIM, w: Node) -> PauliLIM:
        """Minimal-string representative of c * <Stab(w)>; unique because a
        stabilizer group holds at most one member per string."""
        ops = self.ops
        basis: dict[int, tuple[int, PauliLIM]] = {}
        for g in self.stab_gens(w):
            key, cur = string_key(g.string), g
            while key:
                lead = key.bit_length() - 1
                row = basis.get(lead)
                if row is None:
                    basis[lead] = (key, cur)
                    break
                key ^= row[0]
                cur = lim_mul(ops, cur, row[1])
        key = string_key(c.string)
        for lead in sorted(basis, reverse=True):
            if (key >> lead) & 1:
                row_key, g = basis[lead]
                key ^= row_key
                c = lim_mul(ops, c, g)
        return c

    # -- statistics, checking, reclamation ---------------------------------

    def reachable(self, roots: Iterable[Edge]) -> dict[int, Node]:
        seen: dict[int, Node] = {}
        stack = [r.node for r in roots]
        while stack:
            node = stack.pop()
            if node.id in seen:
                continue
            seen[node.id] = node
            if node.level > 0:
                stack.append(node.low.node)
                stack.append(node.high.node)
        return seen

    def stats(self, root: Edge, n_qubits: int) -> DiagramStats:
        live = self.reachable([root])
        width = [0] * (n_qubits + 1)
        for node in live.values():
            if node.level > 0:
                width[node.level] += 1
        bits = 0
        if self.ops.backend == "exact":
            bits = bit_size(root.lim.factor)
            for node in live.values():
                if node.level > 0:
                    bits = max(
                        bits,
                        bit_size(node.low.lim.factor),
                        bit_size(node.high.lim.factor),
                    )
        count = sum(1 for node in live.values() if node.level > 0)
        return DiagramStats(count, tuple(width), bits)

    def check_invariants(self, root: Edge) -> None:
        ops = self.ops
        for node in self.reachable([root]).values():
            if node.level == 0:
                continue
            low, high = node.low, node.high
            if low.lim.string.n != node.level - 1:
                raise DiagramError(f"bad low label width at node {node.id}")
            if high.lim.string.n != node.level - 1:
                raise DiagramError(f"bad high label width at node {node.id}")
            if self.is_zero(low):
                if self.mode == "limdd":
                    raise DiagramError(f"zero low branch at node {node.id}")
                if not (low.node is high.node and ops.eq(high.lim.factor, ops.one)):
                    raise DiagramError(f"bad zero-low form at node {node.id}")
                continue
            if self.mode == "evdd":
                if not low.lim.string.is_identity() or not high.lim.string.is_identity():
                    raise DiagramError(f"pauli label in evdd at node {node.id}")
                if self.norm_rule == "low" and not ops.eq(low.lim.factor, ops.one):
                    raise DiagramError(f"unnormalized low weight at node {node.id}")
                if self.is_zero(high) and low.node is not high.node:
                    raise DiagramError(f"bad zero-high form at node {node.id}")
                continue
            if not low.lim.is_identity_lim(ops):
                raise DiagramError(f"non-identity low label at node {node.id}")
            if self.is_zero(high):
                if low.node is not high.node:
                    raise DiagramError(f"bad zero-high form at node {node.id}")
                continue
            if low.node.id > high.node.id:
                raise DiagramError(f"unordered children at node {node.id}")
            c_hat, undo = self._get_labels(high.lim, low.node, high.node)
            if lim_key(ops, c_hat) != lim_key(ops, high.lim) or not undo.is_identity_lim(ops):
                raise DiagramError(f"non-canonical high label at node {node.id}")

    def node_count(self, root: Edge) -> int:
        return sum(1 for n in self.reachable([root]).values() if n.level > 0)

    def clear_op_caches(self) -> None:
        self.op_cache.clear()
        self.add_cache.clear()

    def collect(self, roots: Iterable[Edge]) -> int:
        """Mark-and-sweep from the given roots; node ids are stable."""
        live = self.reachable(roots)
        live[0] = self.terminal
        dropped = len(self.nodes) - len(live)
        self.nodes = live
        self.unique = {}
        for node in live.values():
            if node.level > 0:
                self.unique[self._node_key(node.level, node.low, node.high)] = node
        self.clear_op_caches()
        self.stab_cache = {
            k: v for k, v in self.stab_cache.items() if k in live
        }
        self.snorm_cache = {
            k: v for k, v in self.snorm_cache.items() if k in live
        }
        self.gc_runs += 1
        return dropped

    def maybe_collect(self, roots: Iterable[Edge]) -> bool:
        if len(self.nodes) < self.gc_capacity:
            return False
        self.collect(roots)
        while len(self.nodes) > self.gc_capacity * self.gc_ratio:
            self.gc_capacity *= 2
        return True


@dataclass
class State:
    """A quantum state as a root edge into a diagram store."""

    store: DDStore
    root: Edge
    n_qubits: int

    def amplitude(self, index: int):
        return self.store.eval_amplitude(self.root, index)

    def to_vector(self) -> list:
        return self.store.to_vector(self.root)

    def stats(self) -> DiagramStats:
        return self.store.stats(self.root, self.n_qubits)

    def check(self) -> None:
        self.store.check_invariants(self.root)
