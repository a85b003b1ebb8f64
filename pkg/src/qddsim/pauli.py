"""Pauli strings in symplectic form and scalar-weighted Pauli labels.

A string on ``n`` qubits is a pair of bitmasks ``(x, z)``: bit ``k-1`` holds
qubit ``k``, with qubit ``n`` (bit ``n-1``) the topmost.  Position codes order
the single-qubit letters I < X < Y < Z; the code map is chosen so that the
code bits of a product are the XOR of the factors' code bits, which turns
lexicographic minimization over a subgroup coset into greedy reduction
against an XOR basis of key integers.

Sign and phase bookkeeping uses quarter turns (powers of i) for products and
eighth turns (powers of omega) where non-Clifford diagonal gates commute
past a label.
"""
from __future__ import annotations

from typing import NamedTuple

from .coeff import ScalarOps

PAULI_LETTERS = "IXYZ"

# code -> (x bit, z bit); code = (z << 1) | (x ^ z) gives I=0, X=1, Y=2, Z=3.
CODE_BITS = ((0, 0), (1, 0), (1, 1), (0, 1))


class PauliString(NamedTuple):
    n: int
    x: int
    z: int

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n, 0, 0)

    @classmethod
    def x_at(cls, n: int, bit: int) -> PauliString:
        return cls(n, 1 << bit, 0)

    @classmethod
    def y_at(cls, n: int, bit: int) -> PauliString:
        return cls(n, 1 << bit, 1 << bit)

    @classmethod
    def z_at(cls, n: int, bit: int) -> PauliString:
        return cls(n, 0, 1 << bit)

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def code_at(self, bit: int) -> int:
        xb = (self.x >> bit) & 1
        zb = (self.z >> bit) & 1
        return (zb << 1) | (xb ^ zb)

    def render(self) -> str:
        return "".join(
            PAULI_LETTERS[self.code_at(bit)] for bit in range(self.n - 1, -1, -1)
        )


_SPREAD_TABLE: list[int] = []
for _b in range(256):
    _s = 0
    for _j in range(8):
        if (_b >> _j) & 1:
            _s |= 1 << (2 * _j)
    _SPREAD_TABLE.append(_s)


def _spread(v: int) -> int:
    """Move bit j to bit 2j (interleave with zeros)."""
    out = 0
    shift = 0
    while v:
        out |= _SPREAD_TABLE[v & 0xFF] << shift
        v >>= 8
        shift += 16
    return out


def string_key(s: PauliString) -> int:
    """Integer whose numeric order equals lexicographic order of the string
    read from the top qubit down, and whose XOR matches string products."""
    return _spread(s.x ^ s.z) | (_spread(s.z) << 1)


class PauliLIM(NamedTuple):
    """A Pauli string scaled by a nonzero backend scalar."""

    factor: object
    string: PauliString

    def is_identity_lim(self, ops: ScalarOps) -> bool:
        return self.string.is_identity() and ops.eq(self.factor, ops.one)

    def render(self, ops: ScalarOps) -> str:
        if ops.backend == "exact":
            return f"({self.factor}) * {self.string.render()}"
        return f"({complex(self.factor)}) * {self.string.render()}"


def identity_lim(ops: ScalarOps, n: int) -> PauliLIM:
    return PauliLIM(ops.one, PauliString.identity(n))


def lim_mul(ops: ScalarOps, l1: PauliLIM, l2: PauliLIM) -> PauliLIM:
    """Operator product; the string multiplies by XOR, the factor picks up
    the power of i from rewriting both sides in X^x Z^z form and back."""
    s1, s2 = l1.string, l2.string
    x = s1.x ^ s2.x
    z = s1.z ^ s2.z
    f = (
        (s1.x & s1.z).bit_count()
        + (s2.x & s2.z).bit_count()
        + 2 * (s1.z & s2.x).bit_count()
        - (x & z).bit_count()
    )
    factor = ops.mul(l1.factor, l2.factor)
    if f & 3:
        factor = ops.mul(factor, ops.i_power(f))
    return PauliLIM(factor, PauliString(s1.n, x, z))


def lim_inverse(ops: ScalarOps, lim: PauliLIM) -> PauliLIM:
    # Every Pauli string squares to +I, so only the factor inverts.
    return PauliLIM(ops.inv(lim.factor), lim.string)


def lim_scale(ops: ScalarOps, scalar: object, lim: PauliLIM) -> PauliLIM:
    return PauliLIM(ops.mul(scalar, lim.factor), lim.string)


def lim_key(ops: ScalarOps, lim: PauliLIM) -> tuple:
    """Hashable identity of a label under the backend's equality."""
    return (ops.key(lim.factor), lim.string.x, lim.string.z)


def lim_lex_compare(ops: ScalarOps, l1: PauliLIM, l2: PauliLIM) -> int:
    """-1, 0, 1 ordering by string first, then component order of factors."""
    k1, k2 = string_key(l1.string), string_key(l2.string)
    if k1 != k2:
        return -1 if k1 < k2 else 1
    o1, o2 = ops.order_key(l1.factor), ops.order_key(l2.factor)
    if o1 == o2:
        return 0
    return -1 if o1 < o2 else 1


def conj_bits(
    kind: str, bits: tuple[int, ...], x: int, z: int
) -> tuple[int, int, int]:
    """Conjugate the Pauli (x, z) by a Clifford gate acting on bit positions.

    Returns (x', z', s) with the result carrying sign (-1)**s.  Supported
    kinds: h, s, sdg, x, y, z, cz, cx, swap.
    """
    if kind == "h":
        m = 1 << bits[0]
        sign = 1 if x & z & m else 0
        xm, zm = x & m, z & m
        return (x ^ xm) | zm, (z ^ zm) | xm, sign
    if kind == "s":
        m = 1 << bits[0]
        sign = 1 if x & z & m else 0
        return x, z ^ (x & m), sign
    if kind == "sdg":
        m = 1 << bits[0]
        sign = 1 if x & ~z & m else 0
        return x, z ^ (x & m), sign
    if kind == "x":
        m = 1 << bits[0]
        return x, z, 1 if z & m else 0
    if kind == "y":
        m = 1 << bits[0]
        return x, z, 1 if (x ^ z) & m else 0
    if kind == "z":
        m = 1 << bits[0]
        return x, z, 1 if x & m else 0
    if kind == "cz":
        a, b = bits
        xa, xb = (x >> a) & 1, (x >> b) & 1
        za, zb = (z >> a) & 1, (z >> b) & 1
        sign = xa & xb & (za ^ zb)
        z ^= (xb << a) | (xa << b)
        return x, z, sign
    if kind == "cx":
        c, t = bits
        xc, xt = (x >> c) & 1, (x >> t) & 1
        zc, zt = (z >> c) & 1, (z >> t) & 1
        sign = xc & zt & (1 ^ xt ^ zc)
        x ^= xc << t
        z ^= zt << c
        return x, z, sign
    if kind == "swap":
        a, b = bits
        ma, mb = 1 << a, 1 << b
        xa, xb = (x >> a) & 1, (x >> b) & 1
        za, zb = (z >> a) & 1, (z >> b) & 1
        x = (x & ~(ma | mb)) | (xb << a) | (xa << b)
        z = (z & ~(ma | mb)) | (zb << a) | (za << b)
        return x, z, 0
    raise ValueError(f"not a supported Clifford conjugation: {kind!r}")


def conjugate_lim(
    ops: ScalarOps, lim: PauliLIM, kind: str, bits: tuple[int, ...]
) -> PauliLIM:
    """U (factor * P) U^dagger for the named Clifford gate U."""
    x, z, sign = conj_bits(kind, bits, lim.string.x, lim.string.z)
    factor = ops.neg(lim.factor) if sign else lim.factor
    return PauliLIM(factor, PauliString(lim.string.n, x, z))


# Diagonal phase gates as eighth-turn exponents: diag(1, omega**p).
DIAG_OCTANT = {"t": 1, "s": 2, "z": 4, "sdg": 6, "tdg": 7}


def commute_phase_past_lim(p: int, bit: int, lim: PauliLIM) -> tuple[int, int]:
    """Move diag(1, omega**p) at ``bit`` from the left of a label to the right.

    diag(1, w) X = w * X diag(1, 1/w), so if the label has an X component at
    the bit, the gate picks up a global omega**p and flips to its adjoint;
    Z components commute freely.  Returns (scalar exponent, new exponent).
    """
    if (lim.string.x >> bit) & 1:
        return p, (-p) % 8
    return 0, p


# (bit value, Pauli code) -> (new bit value, omega exponent of the scalar s.t.
# <bit| P = omega**e <new bit|; row-vector action of a single-qubit Pauli.
_FOLLOW = {
    (0, 0): (0, 0),
    (1, 0): (1, 0),
    (0, 1): (1, 0),
    (1, 1): (0, 0),
    (0, 2): (1, 6),  # <0|Y = -i<1|
    (1, 2): (0, 2),  # <1|Y = +i<0|
    (0, 3): (0, 0),
    (1, 3): (1, 4),  # <1|Z = -<1|
}


def follow_basis(bit_value: int, code: int) -> tuple[int, int]:
    """Which child a basis bra selects through a single-qubit Pauli, and the
    omega exponent of the scalar it picks up."""
    return _FOLLOW[(bit_value, code)]
