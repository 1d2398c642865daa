"""Exact arithmetic in the maximal order of Q(sqrt d).

Elements are stored as integers (u, v) meaning (u + v*sqrt(d))/2.  When
d is not 1 mod 4 both u and v are even; otherwise u and v share parity.
Fundamental units come from an exact continued fraction expansion.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

import mpmath

from .arith import is_squarefree
from .errors import DomainError

PREC_BITS = 128


@dataclass(frozen=True)
class QuadraticOrder:
    d: int

    def __post_init__(self):
        if self.d in (0, 1):
            raise DomainError(f"d = {self.d} does not define a quadratic field")
        if not is_squarefree(self.d):
            raise DomainError(f"d = {self.d} is not squarefree")

    @property
    def half_basis(self) -> bool:
        return self.d % 4 == 1

    @property
    def is_real(self) -> bool:
        return self.d > 0

    def elt(self, u: int, v: int) -> QuadraticElt:
        return QuadraticElt(self, u, v)

    def from_int(self, n: int) -> QuadraticElt:
        return QuadraticElt(self, 2 * n, 0)

    def from_basis(self, x: int, y: int) -> QuadraticElt:
        """x + y*omega with omega = sqrt(d) or (1 + sqrt(d))/2."""
        if self.half_basis:
            return QuadraticElt(self, 2 * x + y, y)
        return QuadraticElt(self, 2 * x, 2 * y)

    def omega(self) -> QuadraticElt:
        return self.from_basis(0, 1)

    def __str__(self) -> str:
        return f"O(Q(sqrt({self.d})))"


def _check_parity(d: int, u: int, v: int) -> bool:
    if d % 4 == 1:
        return (u - v) % 2 == 0
    return u % 2 == 0 and v % 2 == 0


def sign_surd(a: int, b: int, d: int) -> int:
    """Exact sign of a + b*sqrt(d) for d > 0 not a square."""
    if b == 0:
        return (a > 0) - (a < 0)
    if a == 0:
        return 1 if b > 0 else -1
    if (a > 0) == (b > 0):
        return 1 if a > 0 else -1
    diff = a * a - b * b * d
    s = (diff > 0) - (diff < 0)
    return s if a > 0 else -s


@dataclass(frozen=True)
class QuadraticElt:
    order: QuadraticOrder
    u: int
    v: int

    def __post_init__(self):
        if not _check_parity(self.order.d, self.u, self.v):
            raise DomainError(f"({self.u} + {self.v}*sqrt({self.order.d}))/2 is not integral")

    @property
    def d(self) -> int:
        return self.order.d

    def _same(self, other) -> QuadraticElt:
        if isinstance(other, int):
            return self.order.from_int(other)
        if other.order != self.order:
            raise DomainError("elements of different orders")
        return other

    def __add__(self, other) -> QuadraticElt:
        o = self._same(other)
        return QuadraticElt(self.order, self.u + o.u, self.v + o.v)

    __radd__ = __add__

    def __sub__(self, other) -> QuadraticElt:
        o = self._same(other)
        return QuadraticElt(self.order, self.u - o.u, self.v - o.v)

    def __rsub__(self, other) -> QuadraticElt:
        return self._same(other) - self

    def __neg__(self) -> QuadraticElt:
        return QuadraticElt(self.order, -self.u, -self.v)

    def __mul__(self, other) -> QuadraticElt:
        o = self._same(other)
        u = (self.u * o.u + self.d * self.v * o.v) // 2
        v = (self.u * o.v + self.v * o.u) // 2
        return QuadraticElt(self.order, u, v)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> QuadraticElt:
        base = self
        if k < 0:
            base, k = self.inverse(), -k
        out = self.order.from_int(1)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def conj(self) -> QuadraticElt:
        return QuadraticElt(self.order, self.u, -self.v)

    def norm(self) -> int:
        return (self.u * self.u - self.d * self.v * self.v) // 4

    def trace(self) -> int:
        return self.u

    def is_unit(self) -> bool:
        return abs(self.norm()) == 1

    def inverse(self) -> QuadraticElt:
        n = self.norm()
        if abs(n) != 1:
            raise DomainError(f"{self} is not a unit")
        c = self.conj()
        return c if n == 1 else -c

    def divides(self, other: QuadraticElt) -> bool:
        return other.exact_quotient(self) is not None

    def exact_quotient(self, other: QuadraticElt) -> QuadraticElt | None:
        """self / other when it lies in the order, else None."""
        n = other.norm()
        if n == 0:
            raise DomainError("division by zero")
        num = self * other.conj()
        if num.u % n or num.v % n:
            return None
        u, v = num.u // n, num.v // n
        return QuadraticElt(self.order, u, v) if _check_parity(self.d, u, v) else None

    def basis_coords(self) -> tuple[int, int]:
        if self.order.half_basis:
            return (self.u - self.v) // 2, self.v
        return self.u // 2, self.v // 2

    def height(self) -> int:
        return max(abs(c) for c in self.basis_coords())

    def is_rational(self) -> bool:
        return self.v == 0

    def sigma(self, prec: int = PREC_BITS):
        """Value in the fixed real embedding sqrt(d) > 0 (real fields only)."""
        if self.d < 0:
            raise DomainError("no real embedding for an imaginary field")
        with mpmath.workprec(prec + 32):
            root = mpmath.sqrt(self.d)
            plus = self.u + self.v * root
            if (self.u >= 0) == (self.v >= 0) or self.u == 0 or self.v == 0:
                return +(plus / 2)
            # cancellation: use (u + v r)(u - v r) = 4N
            return +(2 * self.norm() / (self.u - self.v * root))

    def real_sign(self) -> int:
        return sign_surd(self.u, self.v, self.d)

    def to_json(self) -> dict:
        return {"d": self.d, "u": self.u, "v": self.v}

    def __str__(self) -> str:
        return format_elt(self)


def format_elt(a: QuadraticElt) -> str:
    """``u/2 + v/2*sqrt(d)`` with halves reduced when integral."""

    def half(x: int) -> str:
        return str(x // 2) if x % 2 == 0 else f"{x}/2"

    if a.v == 0:
        return half(a.u)
    rad = f"sqrt({a.d})"
    vpart = f"{half(abs(a.v))}*{rad}"
    if a.u == 0:
        return ("-" if a.v < 0 else "") + vpart
    return f"{half(a.u)} {'-' if a.v < 0 else '+'} {vpart}"


def elt_from_json(obj: dict) -> QuadraticElt:
    return QuadraticOrder(int(obj["d"])).elt(int(obj["u"]), int(obj["v"]))


@dataclass(frozen=True)
class FundamentalUnitResult:
    unit: QuadraticElt
    regulator: mpmath.mpf
    norm_sign: int

    def to_json(self) -> dict:
        return {
            "unit": self.unit.to_json(),
            "text": str(self.unit),
            "regulator": mpmath.nstr(self.regulator, 30),
            "norm_sign": self.norm_sign,
        }


def _cf_convergents(P: int, Q: int, d: int):
    """Convergents p/q of (P + sqrt d)/Q, exact; needs Q | d - P^2."""
    s = isqrt(d)
    p_prev, p = 0, 1
    q_prev, q = 1, 0
    while True:
        a = (P + s) // Q if Q > 0 else (-P - s - 1) // -Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        yield p, q
        P = a * Q - P
        Q = (d - P * P) // Q


@lru_cache(maxsize=None)
def fundamental_unit(order: QuadraticOrder) -> FundamentalUnitResult:
    """The unit eta > 1 generating the units of a real quadratic order mod +-1.

    A unit a + b*omega > 1 with b > 0 has a conjugate below 1 in absolute
    value, which makes a/b a convergent of -omega'.  Convergents are
    scanned in order of increasing denominator, so the first unit met is
    fundamental.
    """
    d = order.d
    if d < 0:
        raise DomainError("imaginary field: unit rank 0")
    P, Q = (-1, 2) if order.half_basis else (0, 1)
    for p, q in _cf_convergents(P, Q, d):
        eta = order.from_basis(p, q)
        n = eta.norm()
        if abs(n) == 1:
            if eta.real_sign() <= 0:
                continue
            with mpmath.workprec(PREC_BITS):
                reg = mpmath.log(eta.sigma())
            return FundamentalUnitResult(eta, reg, n)
    raise AssertionError("unreachable")


def torsion_units(order: QuadraticOrder) -> list[QuadraticElt]:
    """Roots of unity in the order, found by solving u^2 - d v^2 = 4."""
    d = order.d
    if d > 0:
        return [order.from_int(1), order.from_int(-1)]
    out = []
    vmax = isqrt(4 // -d) if -d <= 4 else 0
    for v in range(-vmax, vmax + 1):
        rest = 4 + d * v * v
        if rest < 0:
            continue
        r = isqrt(rest)
        if r * r != rest:
            continue
        for u in sorted({r, -r}, reverse=True):
            if _check_parity(d, u, v):
                out.append(QuadraticElt(order, u, v))
    return sorted(out, key=lambda e: (-e.u, -e.v))


def unit_group(order: QuadraticOrder, exp_bound: int) -> list[tuple[int, int, QuadraticElt]]:
    """Units as (exponent, sign, value), in lexicographic (exponent, sign) order.

    Real fields give +-eta^a for |a| <= exp_bound; imaginary fields give the
    torsion units with exponent 0 (exp_bound ignored).
    """
    if not order.is_real:
        return [(0, i, w) for i, w in enumerate(torsion_units(order))]
    eta = fundamental_unit(order).unit
    out = []
    power = eta ** (-exp_bound)
    for a in range(-exp_bound, exp_bound + 1):
        out.append((a, 1, power))
        out.append((a, -1, -power))
        power = power * eta
    return out


def canonical_associate(alpha: QuadraticElt) -> QuadraticElt:
    """A fixed representative of the class {alpha * w : w a unit}.

    Real fields: the associate with sigma > 0 and
    1 <= sigma / sqrt|N| < eta (all comparisons exact).  Imaginary fields:
    the associate with the largest (u, v).
    """
    if alpha.is_zero():
        raise DomainError("zero has no association class")
    order = alpha.order
    if not order.is_real:
        return max((alpha * w for w in torsion_units(order)), key=lambda e: (e.u, e.v))
    fu = fundamental_unit(order)
    eta, eta_inv = fu.unit, fu.unit.inverse()
    n_abs = abs(alpha.norm())
    with mpmath.workprec(PREC_BITS):
        t = mpmath.log(abs(alpha.sigma())) - mpmath.log(n_abs) / 2
        k = -int(mpmath.floor(t / fu.regulator))
    beta = alpha * eta**k
    if beta.real_sign() < 0:
        beta = -beta

    def at_least_root_norm(x: QuadraticElt) -> bool:
        # sigma(x)^2 >= |N|, for sigma(x) > 0
        return sign_surd(x.u * x.u + x.d * x.v * x.v - 4 * n_abs, 2 * x.u * x.v, x.d) >= 0

    while True:
        if not at_least_root_norm(beta):
            beta = beta * eta
        elif at_least_root_norm(beta * eta_inv):
            beta = beta * eta_inv
        else:
            return beta


def associated(a: QuadraticElt, b: QuadraticElt) -> bool:
    return canonical_associate(a) == canonical_associate(b)


def discriminant(d: int) -> int:
    return d if d % 4 == 1 else 4 * d


def class_number(d: int) -> int:
    """Class number of Q(sqrt d) for d < 0, by counting reduced forms."""
    if d >= 0:
        raise DomainError("class_number is implemented for imaginary fields only")
    QuadraticOrder(d)
    D = discriminant(d)
    h = 0
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if c < a or gcd(gcd(a, abs(b)), c) != 1:
                continue
            if b < 0 and a == c:
                continue
            h += 1
        a += 1
    return h
