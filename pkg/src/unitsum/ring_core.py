"""Rings with left and right Euclidean division.

Three instances are provided: the rational integers, univariate
polynomials over a prime field, and the Hurwitz quaternions.  Matrix
algorithms in :mod:`unitsum.matrix_units` only talk to the
:class:`EuclideanRing` interface.
"""

from __future__ import annotations

import itertools
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Generic, TypeVar

from .errors import DomainError

T = TypeVar("T")


class EuclideanRing(ABC, Generic[T]):
    """A ring with a size function f and two-sided division with remainder.

    ``left_divide(a, b)`` returns ``(q, r)`` with ``a == q*b + r`` and
    ``right_divide(a, b)`` returns ``(q, r)`` with ``a == b*q + r``; in both
    cases ``r`` is zero or ``size(r) < size(b)``.
    """

    name: str

    @abstractmethod
    def zero(self) -> T: ...

    @abstractmethod
    def one(self) -> T: ...

    @abstractmethod
    def add(self, a: T, b: T) -> T: ...

    @abstractmethod
    def neg(self, a: T) -> T: ...

    @abstractmethod
    def mul(self, a: T, b: T) -> T: ...

    @abstractmethod
    def size(self, a: T) -> int: ...

    @abstractmethod
    def left_divide(self, a: T, b: T) -> tuple[T, T]: ...

    @abstractmethod
    def right_divide(self, a: T, b: T) -> tuple[T, T]: ...

    @abstractmethod
    def unit_inverse(self, a: T) -> T | None:
        """The two-sided inverse of ``a`` if it is a unit, else None."""

    @abstractmethod
    def encode(self, a: T) -> Any:
        """JSON-compatible encoding."""

    @abstractmethod
    def decode(self, obj: Any) -> T: ...

    @abstractmethod
    def random_element(self, rng, height: int) -> T: ...

    def sub(self, a: T, b: T) -> T:
        return self.add(a, self.neg(b))

    def is_zero(self, a: T) -> bool:
        return a == self.zero()

    def eq(self, a: T, b: T) -> bool:
        return a == b

    def from_int(self, n: int) -> T:
        x = self.zero()
        step = self.one() if n >= 0 else self.neg(self.one())
        for _ in range(abs(n)):
            x = self.add(x, step)
        return x

    @property
    def one_is_minus_one(self) -> bool:
        return self.eq(self.one(), self.neg(self.one()))

    def _check_divisor(self, b: T) -> None:
        if self.is_zero(b):
            raise DomainError("division by zero")

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class IntegerRing(EuclideanRing[int]):
    """Z with the symmetric remainder, |r| <= |b|/2."""

    name = "z"

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return a + b

    def neg(self, a: int) -> int:
        return -a

    def mul(self, a: int, b: int) -> int:
        return a * b

    def from_int(self, n: int) -> int:
        return n

    def size(self, a: int) -> int:
        return abs(a)

    def left_divide(self, a: int, b: int) -> tuple[int, int]:
        self._check_divisor(b)
        q = round(Fraction(a, b))
        return q, a - q * b

    right_divide = left_divide

    def unit_inverse(self, a: int) -> int | None:
        return a if a in (1, -1) else None

    def encode(self, a: int) -> int:
        return a

    def decode(self, obj: Any) -> int:
        if isinstance(obj, bool) or not isinstance(obj, (int, str)):
            raise DomainError(f"not an integer: {obj!r}")
        return int(obj)

    def random_element(self, rng, height: int) -> int:
        return int(rng.integers(-height, height + 1))


Poly = tuple[int, ...]


class PolynomialRing(EuclideanRing[Poly]):
    """GF(p)[X]; elements are coefficient tuples, lowest degree first,
    without trailing zeros (the zero polynomial is ``()``)."""

    def __init__(self, p: int = 2):
        from .arith import is_prime

        if not is_prime(p):
            raise DomainError(f"modulus {p} is not prime")
        self.p = p
        self.name = f"f{p}[x]"

    def _norm(self, coeffs) -> Poly:
        c = [x % self.p for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        return tuple(c)

    def zero(self) -> Poly:
        return ()

    def one(self) -> Poly:
        return (1,)

    def add(self, a: Poly, b: Poly) -> Poly:
        n = max(len(a), len(b))
        return self._norm(
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        )

    def neg(self, a: Poly) -> Poly:
        return self._norm(-x for x in a)

    def mul(self, a: Poly, b: Poly) -> Poly:
        if not a or not b:
            return ()
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return self._norm(out)

    def size(self, a: Poly) -> int:
        return len(a) - 1

    def left_divide(self, a: Poly, b: Poly) -> tuple[Poly, Poly]:
        self._check_divisor(b)
        r = list(a)
        db = len(b) - 1
        lead_inv = pow(b[-1], self.p - 2, self.p)
        q = [0] * max(len(a) - db, 0)
        while len(r) - 1 >= db and r:
            shift = len(r) - 1 - db
            c = r[-1] * lead_inv % self.p
            q[shift] = c
            for i, y in enumerate(b):
                r[shift + i] = (r[shift + i] - c * y) % self.p
            while r and r[-1] == 0:
                r.pop()
        return self._norm(q), self._norm(r)

    right_divide = left_divide

    def unit_inverse(self, a: Poly) -> Poly | None:
        if len(a) != 1:
            return None
        return (pow(a[0], self.p - 2, self.p),)

    def encode(self, a: Poly) -> list[int]:
        return list(a)

    def decode(self, obj: Any) -> Poly:
        if isinstance(obj, int) and not isinstance(obj, bool):
            obj = [obj]
        if not isinstance(obj, list):
            raise DomainError(f"polynomial must be a coefficient list: {obj!r}")
        return self._norm(int(x) for x in obj)

    def random_element(self, rng, height: int) -> Poly:
        deg = int(rng.integers(-1, height + 1))
        return self._norm(int(x) for x in rng.integers(0, self.p, size=deg + 1))


@dataclass(frozen=True)
class HurwitzQuat:
    """The quaternion (e0 + e1 i + e2 j + e3 k) / 2.

    Coordinates are doubled so that both Lipschitz points (all even) and
    half-integer points (all odd) are integer tuples.
    """

    e0: int
    e1: int
    e2: int
    e3: int

    def __post_init__(self):
        if not (self.e0 % 2 == self.e1 % 2 == self.e2 % 2 == self.e3 % 2):
            raise DomainError(f"mixed parity coordinates {self.coords}")

    @classmethod
    def from_ints(cls, a: int = 0, b: int = 0, c: int = 0, d: int = 0) -> HurwitzQuat:
        return cls(2 * a, 2 * b, 2 * c, 2 * d)

    @property
    def coords(self) -> tuple[int, int, int, int]:
        return (self.e0, self.e1, self.e2, self.e3)

    def norm(self) -> int:
        return sum(x * x for x in self.coords) // 4

    def conj(self) -> HurwitzQuat:
        return HurwitzQuat(self.e0, -self.e1, -self.e2, -self.e3)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: HurwitzQuat) -> HurwitzQuat:
        return HurwitzQuat(*(x + y for x, y in zip(self.coords, other.coords)))

    def __sub__(self, other: HurwitzQuat) -> HurwitzQuat:
        return HurwitzQuat(*(x - y for x, y in zip(self.coords, other.coords)))

    def __neg__(self) -> HurwitzQuat:
        return HurwitzQuat(*(-x for x in self.coords))

    def __mul__(self, other: HurwitzQuat) -> HurwitzQuat:
        return HurwitzQuat(*(x // 2 for x in _qmul(self.coords, other.coords)))

    def __pow__(self, k: int) -> HurwitzQuat:
        if k < 0:
            raise DomainError("negative powers need unit_inverse")
        out = HurwitzQuat.from_ints(1)
        for _ in range(k):
            out = out * self
        return out

    def __str__(self) -> str:
        return format_quat(self)


def _qmul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def _fmt_half(x: int) -> str:
    return str(x // 2) if x % 2 == 0 else f"{x}/2"


def format_quat(q: HurwitzQuat) -> str:
    """Text form like ``2+3i``, ``1-k`` or ``1/2-1/2i+1/2j+3/2k``."""
    parts = []
    for x, unit in zip(q.coords, ("", "i", "j", "k")):
        if x == 0:
            continue
        body = _fmt_half(abs(x))
        if unit and body == "1":
            body = ""
        sign = "-" if x < 0 else "+"
        parts.append(f"{sign}{body}{unit}")
    if not parts:
        return "0"
    text = "".join(parts)
    return text[1:] if text[0] == "+" else text


_TERM = re.compile(r"([+-]?)(\d+(?:/2)?)?([ijk]?)")


def parse_quat(text: str) -> HurwitzQuat:
    s = text.replace(" ", "")
    if not s:
        raise DomainError("empty quaternion")
    coords = [0, 0, 0, 0]
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and not m.group(3)):
            raise DomainError(f"cannot parse quaternion {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        num = m.group(2) or "1"
        doubled = int(num[:-2]) if num.endswith("/2") else 2 * int(num)
        coords["ijk".find(m.group(3)) + 1 if m.group(3) else 0] += sign * doubled
        pos = m.end()
    return HurwitzQuat(*coords)


def hurwitz_units() -> list[HurwitzQuat]:
    """The 24 units: +-1, +-i, +-j, +-k and (+-1 +-i +-j +-k)/2."""
    units = []
    for pos in range(4):
        for sign in (1, -1):
            c = [0, 0, 0, 0]
            c[pos] = 2 * sign
            units.append(HurwitzQuat(*c))
    for signs in itertools.product((1, -1), repeat=4):
        units.append(HurwitzQuat(*signs))
    return units


def _round_half_even(num: int, den: int) -> int:
    return round(Fraction(num, den))


def _divide(a: HurwitzQuat, b: HurwitzQuat, side: str) -> tuple[HurwitzQuat, HurwitzQuat]:
    if b.is_zero():
        raise DomainError("division by zero")
    nb = b.norm()
    if side == "left":  # a = q*b + r, q ~ a * conj(b) / N(b)
        approx = _qmul(a.coords, b.conj().coords)
    else:  # a = b*q + r, q ~ conj(b) * a / N(b)
        approx = _qmul(b.conj().coords, a.coords)
    den = 4 * nb  # true coordinate = approx_i / den

    def remainder(q: HurwitzQuat) -> HurwitzQuat:
        return a - (q * b if side == "left" else b * q)

    q = HurwitzQuat(*(2 * _round_half_even(p, den) for p in approx))
    r = remainder(q)
    if r.norm() < nb:
        return q, r
    # nearest half-integer points; the Hurwitz covering radius guarantees
    # one of them leaves a remainder of norm <= N(b)/2
    lows = [2 * ((p - den // 2) // den) + 1 for p in approx]  # doubled odd floor
    best = None
    for bump in itertools.product((0, 2), repeat=4):
        cand = HurwitzQuat(*(lo + s for lo, s in zip(lows, bump)))
        rc = remainder(cand)
        if best is None or rc.norm() < best[1].norm():
            best = (cand, rc)
    assert best[1].norm() < nb
    return best


def hurwitz_left_divide(a: HurwitzQuat, b: HurwitzQuat) -> tuple[HurwitzQuat, HurwitzQuat]:
    """(q, r) with a = q*b + r and N(r) < N(b)."""
    return _divide(a, b, "left")


def hurwitz_right_divide(a: HurwitzQuat, b: HurwitzQuat) -> tuple[HurwitzQuat, HurwitzQuat]:
    """(q, r) with a = b*q + r and N(r) < N(b)."""
    return _divide(a, b, "right")


class HurwitzRing(EuclideanRing[HurwitzQuat]):
    name = "hurwitz"

    def zero(self) -> HurwitzQuat:
        return HurwitzQuat(0, 0, 0, 0)

    def one(self) -> HurwitzQuat:
        return HurwitzQuat(2, 0, 0, 0)

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def size(self, a: HurwitzQuat) -> int:
        return a.norm()

    def left_divide(self, a, b):
        return hurwitz_left_divide(a, b)

    def right_divide(self, a, b):
        return hurwitz_right_divide(a, b)

    def unit_inverse(self, a: HurwitzQuat) -> HurwitzQuat | None:
        return a.conj() if a.norm() == 1 else None

    def encode(self, a: HurwitzQuat) -> str:
        return format_quat(a)

    def decode(self, obj: Any) -> HurwitzQuat:
        if isinstance(obj, int) and not isinstance(obj, bool):
            return HurwitzQuat.from_ints(obj)
        if not isinstance(obj, str):
            raise DomainError(f"quaternion must be a string: {obj!r}")
        return parse_quat(obj)

    def random_element(self, rng, height: int) -> HurwitzQuat:
        parity = int(rng.integers(0, 2))
        coords = 2 * rng.integers(-height, height + 1, size=4) + parity
        return HurwitzQuat(*(int(c) for c in coords))


def ring_from_name(name: str) -> EuclideanRing:
    """Parse the CLI ring names ``z``, ``fp[x]`` / ``f<p>[x]`` and ``hurwitz``."""
    key = name.lower()
    if key in ("z", "int", "integers"):
        return IntegerRing()
    if key == "hurwitz":
        return HurwitzRing()
    m = re.fullmatch(r"f(p|\d+)\[x\]", key)
    if m:
        return PolynomialRing(2 if m.group(1) == "p" else int(m.group(1)))
    raise DomainError(f"unknown ring {name!r}")
