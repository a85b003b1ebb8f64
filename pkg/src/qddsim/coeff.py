"""Edge-label arithmetic: an exact ring backend and a float backend.

The exact backend represents every coefficient canonically as

    a + b*sqrt(2) + c*i + d*i*sqrt(2)

with reduced ``fractions.Fraction`` components.  Because 1, sqrt(2), i and
i*sqrt(2) are linearly independent over the rationals, two values are equal
iff their four components are equal, so equality, hashing and interning of
edge labels stay purely structural.  The subset is closed under +, -, *, /
(division rationalizes through the complex conjugate and then the sqrt(2)
conjugate), contains the eighth root of unity omega = (1+i)/sqrt(2), and is
therefore closed under everything a Clifford+T simulation produces.

The float backend uses plain ``complex`` doubles; equality and zero tests
compare against a configurable absolute tolerance, and hashing rounds to a
tolerance-sized grid (approximate: values within tolerance can still land in
adjacent grid cells).
"""
from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_EVEN, localcontext
from fractions import Fraction
from functools import total_ordering

_F0 = Fraction(0)
_F1 = Fraction(1)
_HALF = Fraction(1, 2)

_FractionLike = int | Fraction


class RingValue:
    """One exact coefficient ``a + b*sqrt2 + c*i + d*i*sqrt2``."""

    __slots__ = ("a", "b", "c", "d", "_h")

    def __init__(
        self,
        a: _FractionLike = 0,
        b: _FractionLike = 0,
        c: _FractionLike = 0,
        d: _FractionLike = 0,
    ) -> None:
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.c = Fraction(c)
        self.d = Fraction(d)
        self._h: int | None = None

    @classmethod
    def from_int(cls, n: int) -> RingValue:
        return cls(Fraction(n))

    def __repr__(self) -> str:
        return f"RingValue({self.a!r}, {self.b!r}, {self.c!r}, {self.d!r})"

    def __str__(self) -> str:
        return render(self)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = RingValue.from_int(other)
        if not isinstance(other, RingValue):
            return NotImplemented
        return (
            self.a == other.a
            and self.b == other.b
            and self.c == other.c
            and self.d == other.d
        )

    def __hash__(self) -> int:
        if self._h is None:
            self._h = hash((self.a, self.b, self.c, self.d))
        return self._h

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0 and self.c == 0 and self.d == 0

    def is_real(self) -> bool:
        return self.c == 0 and self.d == 0

    def is_rational(self) -> bool:
        return self.b == 0 and self.c == 0 and self.d == 0

    def __add__(self, other: RingValue) -> RingValue:
        if not isinstance(other, RingValue):
            return NotImplemented
        return RingValue(
            self.a + other.a, self.b + other.b, self.c + other.c, self.d + other.d
        )

    def __sub__(self, other: RingValue) -> RingValue:
        if not isinstance(other, RingValue):
            return NotImplemented
        return RingValue(
            self.a - other.a, self.b - other.b, self.c - other.c, self.d - other.d
        )

    def __neg__(self) -> RingValue:
        return RingValue(-self.a, -self.b, -self.c, -self.d)

    def __mul__(self, other: RingValue) -> RingValue:
        if not isinstance(other, RingValue):
            return NotImplemented
        xa, xb, xc, xd = self.a, self.b, self.c, self.d
        ya, yb, yc, yd = other.a, other.b, other.c, other.d
        return RingValue(
            xa * ya + 2 * xb * yb - xc * yc - 2 * xd * yd,
            xa * yb + xb * ya - xc * yd - xd * yc,
            xa * yc + xc * ya + 2 * (xb * yd + xd * yb),
            xa * yd + xd * ya + xb * yc + xc * yb,
        )

    def __truediv__(self, other: RingValue) -> RingValue:
        if not isinstance(other, RingValue):
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero ring value")
        # Rationalize: multiply through by conj(y), leaving a real denominator
        # a + b*sqrt2, then by its sqrt2-conjugate, leaving a nonzero rational.
        t = other.conj()
        num = self * t
        den = other * t
        num = num * RingValue(den.a, -den.b)
        q = den.a * den.a - 2 * den.b * den.b
        return RingValue(num.a / q, num.b / q, num.c / q, num.d / q)

    def conj(self) -> RingValue:
        """Complex conjugate (negates the two imaginary components)."""
        return RingValue(self.a, self.b, -self.c, -self.d)

    def abs2(self) -> RingValue:
        """|x|^2 = x * conj(x); always real (c = d = 0)."""
        return self * self.conj()

    def inverse(self) -> RingValue:
        return ONE / self

    def times_i_power(self, k: int) -> RingValue:
        k &= 3
        if k == 0:
            return self
        if k == 1:
            return RingValue(-self.c, -self.d, self.a, self.b)
        if k == 2:
            return -self
        return RingValue(self.c, self.d, -self.a, -self.b)

    def to_complex(self) -> complex:
        r2 = 2.0**0.5
        return complex(
            float(self.a) + float(self.b) * r2, float(self.c) + float(self.d) * r2
        )


ZERO = RingValue()
ONE = RingValue(1)
MINUS_ONE = RingValue(-1)
I_UNIT = RingValue(0, 0, 1)
SQRT2 = RingValue(0, 1)
INV_SQRT2 = RingValue(0, _HALF)
OMEGA = RingValue(0, _HALF, 0, _HALF)

_OMEGA_POWERS: list[RingValue] = [ONE]
for _ in range(7):
    _OMEGA_POWERS.append(_OMEGA_POWERS[-1] * OMEGA)


def omega_power(k: int) -> RingValue:
    """omega^k for omega = (1+i)/sqrt(2); period 8, omega^2 = i."""
    return _OMEGA_POWERS[k & 7]


def within_coeff_bound(x: RingValue, k: int) -> bool:
    """All eight integers of the reduced components bounded by 2**k."""
    bound = 1 << k
    for f in (x.a, x.b, x.c, x.d):
        if abs(f.numerator) > bound or f.denominator > bound:
            return False
    return True


def in_sqrt2_lattice(x: RingValue, n: int, t: int) -> bool:
    """Membership in the scaled integer lattice

        (l + m*sqrt2)/sqrt(2^t) + i*(l' + m'*sqrt2)/sqrt(2^t)

    with |l|, |l'| <= 2^(n+t), |m|, |m'| <= 2^(n+t-1), and m = m' = 0 when
    t = 0.  The decomposition is unique, so membership is decidable by
    multiplying through by sqrt(2^t) and checking integrality and bounds.
    """
    if t % 2 == 0:
        s = 1 << (t // 2)
        l, m = x.a * s, x.b * s
        lp, mp = x.c * s, x.d * s
    else:
        s = 1 << ((t - 1) // 2)
        l, m = 2 * x.b * s, x.a * s
        lp, mp = 2 * x.d * s, x.c * s
    for f in (l, m, lp, mp):
        if f.denominator != 1:
            return False
    if t == 0 and (m != 0 or mp != 0):
        return False
    big = 1 << (n + t)
    small = big >> 1
    return (
        abs(l) <= big and abs(lp) <= big and abs(m) <= small and abs(mp) <= small
    )


def bit_size(x: RingValue) -> int:
    """Max bit length over the four numerators and denominators."""
    out = 1
    for f in (x.a, x.b, x.c, x.d):
        out = max(out, abs(f.numerator).bit_length(), f.denominator.bit_length())
    return out


def _frac_str(f: Fraction) -> str:
    if f.denominator == 1:
        return str(f.numerator)
    return f"{f.numerator}/{f.denominator}"


def render(x: RingValue) -> str:
    """Symbolic rendering, e.g. ``1/4 + 1/8*sqrt2`` or ``1*i``; ``0`` if zero."""
    parts: list[tuple[Fraction, str]] = []
    if x.a != 0:
        parts.append((x.a, ""))
    if x.b != 0:
        parts.append((x.b, "*sqrt2"))
    if x.c != 0:
        parts.append((x.c, "*i"))
    if x.d != 0:
        parts.append((x.d, "*i*sqrt2"))
    if not parts:
        return "0"
    out = []
    for i, (f, suffix) in enumerate(parts):
        if i == 0:
            out.append(_frac_str(f) + suffix)
        elif f < 0:
            out.append(" - " + _frac_str(-f) + suffix)
        else:
            out.append(" + " + _frac_str(f) + suffix)
    return "".join(out)


def real_decimal(x: RingValue, digits: int = 30) -> Decimal:
    """The real part a + b*sqrt2 as a Decimal, round-half-even at ``digits``."""
    with localcontext() as ctx:
        ctx.prec = digits + 15
        r2 = Decimal(2).sqrt()
        v = (
            Decimal(x.a.numerator) / Decimal(x.a.denominator)
            + (Decimal(x.b.numerator) / Decimal(x.b.denominator)) * r2
        )
        return v.quantize(Decimal(1).scaleb(-digits), rounding=ROUND_HALF_EVEN)


def to_decimal_str(x: RingValue, digits: int = 30) -> str:
    """Decimal rendering at ``digits`` places, round-half-even."""
    re = real_decimal(x, digits)
    if x.is_real():
        return str(re)
    im = real_decimal(RingValue(x.c, x.d), digits)
    sign = "+" if im >= 0 else "-"
    return f"{re}{sign}{abs(im)}i"


def real_sign(p: Fraction, q: Fraction) -> int:
    """Sign of p + q*sqrt2, decided exactly."""
    if p >= 0 and q >= 0:
        return 0 if p == 0 and q == 0 else 1
    if p <= 0 and q <= 0:
        return -1
    # Opposite signs: the side with the larger square wins.
    big_p = 1 if p > 0 else -1
    return big_p if p * p > 2 * q * q else -big_p


@total_ordering
class RealOrder:
    """Exactly ordered real value p + q*sqrt2, usable inside sort keys."""

    __slots__ = ("p", "q")

    def __init__(self, p: Fraction, q: Fraction) -> None:
        self.p = p
        self.q = q

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RealOrder):
            return NotImplemented
        return self.p == other.p and self.q == other.q

    def __lt__(self, other: RealOrder) -> bool:
        return real_sign(self.p - other.p, self.q - other.q) < 0

    def __hash__(self) -> int:
        return hash((self.p, self.q))

    def __repr__(self) -> str:
        return f"RealOrder({self.p}, {self.q})"


@dataclass(frozen=True)
class CoeffPolicy:
    """Which coefficient backend a diagram store runs on."""

    backend: str = "exact"  # "exact" | "float"
    tolerance: float | None = None  # None picks the backend default (0 / 1e-14)

    def __post_init__(self) -> None:
        if self.backend not in ("exact", "float"):
            raise ValueError(f"unknown coefficient backend {self.backend!r}")
        if self.tolerance is None:
            object.__setattr__(
                self, "tolerance", 0.0 if self.backend == "exact" else 1e-14
            )
        if self.backend == "exact" and self.tolerance != 0.0:
            raise ValueError("exact backend has no tolerance")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")


def float_equal(x: complex, y: complex, policy: CoeffPolicy) -> bool:
    """Absolute-tolerance equality on complex doubles."""
    return abs(complex(x) - complex(y)) <= policy.tolerance


class ExactOps:
    """Scalar operations over RingValue, used generically by the diagram core."""

    backend = "exact"
    tolerance = 0.0
    zero = ZERO
    one = ONE

    @staticmethod
    def is_zero(x: RingValue) -> bool:
        return x.is_zero()

    @staticmethod
    def eq(x: RingValue, y: RingValue) -> bool:
        return x == y

    @staticmethod
    def add(x: RingValue, y: RingValue) -> RingValue:
        return x + y

    @staticmethod
    def sub(x: RingValue, y: RingValue) -> RingValue:
        return x - y

    @staticmethod
    def mul(x: RingValue, y: RingValue) -> RingValue:
        return x * y

    @staticmethod
    def div(x: RingValue, y: RingValue) -> RingValue:
        return x / y

    @staticmethod
    def neg(x: RingValue) -> RingValue:
        return -x

    @staticmethod
    def inv(x: RingValue) -> RingValue:
        return ONE / x

    @staticmethod
    def conj(x: RingValue) -> RingValue:
        return x.conj()

    @staticmethod
    def abs2(x: RingValue) -> RingValue:
        return x.abs2()

    @staticmethod
    def i_power(k: int) -> RingValue:
        return _OMEGA_POWERS[(k & 3) * 2]

    @staticmethod
    def omega(k: int) -> RingValue:
        return omega_power(k)

    invsqrt2 = INV_SQRT2

    @staticmethod
    def key(x: RingValue) -> RingValue:
        return x

    @staticmethod
    def order_key(x: RingValue):
        return (x.a, x.b, x.c, x.d)

    @staticmethod
    def argmin_key(x: RingValue):
        # Canonicalization preference: smallest complex magnitude first
        # (compared exactly), then small components, then positive signs.
        m = x.abs2()
        return (
            RealOrder(m.a, m.b),
            abs(x.a),
            abs(x.b),
            abs(x.c),
            abs(x.d),
            x.a < 0,
            x.b < 0,
            x.c < 0,
            x.d < 0,
        )

    @staticmethod
    def to_complex(x: RingValue) -> complex:
        return x.to_complex()


_INV_R2 = 2.0**-0.5
_OMEGA_F = complex(_INV_R2, _INV_R2)
_OMEGA_POWERS_F = (
    1 + 0j,
    _OMEGA_F,
    1j,
    1j * _OMEGA_F,
    -1 + 0j,
    -_OMEGA_F,
    -1j,
    -1j * _OMEGA_F,
)
_I_POWERS_F = (1 + 0j, 1j, -1 + 0j, -1j)


class FloatOps:
    """Scalar operations over complex doubles with absolute-tolerance tests."""

    backend = "float"
    zero = 0j
    one = 1 + 0j
    invsqrt2 = complex(_INV_R2)

    def __init__(self, tolerance: float = 0.0) -> None:
        self.tolerance = tolerance

    def is_zero(self, x: complex) -> bool:
        return abs(x) <= self.tolerance

    def eq(self, x: complex, y: complex) -> bool:
        return abs(x - y) <= self.tolerance

    @staticmethod
    def add(x: complex, y: complex) -> complex:
        return x + y

    @staticmethod
    def sub(x: complex, y: complex) -> complex:
        return x - y

    @staticmethod
    def mul(x: complex, y: complex) -> complex:
        return x * y

    @staticmethod
    def div(x: complex, y: complex) -> complex:
        return x / y

    @staticmethod
    def neg(x: complex) -> complex:
        return -x

    @staticmethod
    def inv(x: complex) -> complex:
        return 1 / x

    @staticmethod
    def conj(x: complex) -> complex:
        return x.conjugate()

    @staticmethod
    def abs2(x: complex) -> complex:
        return complex(x.real * x.real + x.imag * x.imag)

    @staticmethod
    def i_power(k: int) -> complex:
        return _I_POWERS_F[k & 3]

    @staticmethod
    def omega(k: int) -> complex:
        return _OMEGA_POWERS_F[k & 7]

    def key(self, x: complex):
        if self.tolerance == 0.0:
            return (x.real, x.imag)
        g = self.tolerance
        return (round(x.real / g), round(x.imag / g))

    @staticmethod
    def order_key(x: complex):
        return (x.real, x.imag)

    @staticmethod
    def argmin_key(x: complex):
        return (
            x.real * x.real + x.imag * x.imag,
            abs(x.real),
            abs(x.imag),
            x.real < 0,
            x.imag < 0,
        )

    @staticmethod
    def to_complex(x: complex) -> complex:
        return x


EXACT_OPS = ExactOps()

ScalarOps = ExactOps | FloatOps


def scalar_ops(policy: CoeffPolicy) -> ScalarOps:
    if policy.backend == "exact":
        return EXACT_OPS
    return FloatOps(policy.tolerance)
