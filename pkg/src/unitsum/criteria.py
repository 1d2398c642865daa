"""Decision procedures for unit sum numbers and unit power bases."""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .arith import exact_root, is_cube, is_cubefree, is_square, is_squarefree, prime_factors
from .errors import DomainError, Unverifiable

PREC_BITS = 128

_RANK = {"exact": 0, "omega": 1, "infinite": 2}


@functools.total_ordering
@dataclass(frozen=True)
class UnitSumClass:
    """A value of u(R), ordered k < omega < infinity.

    ``inconclusive`` is a verdict of a one-sided test, not a value of u(R),
    and refuses to be compared.
    """

    tag: str
    k: int | None = None
    witness: str = ""
    basis: str = "theorem"

    def __post_init__(self):
        if self.tag not in ("exact", "omega", "infinite", "inconclusive"):
            raise ValueError(f"unknown tag {self.tag!r}")
        if (self.tag == "exact") != (self.k is not None):
            raise ValueError("k is required exactly for the 'exact' tag")

    @classmethod
    def exact(cls, k: int, witness: str = "") -> UnitSumClass:
        return cls("exact", k, witness)

    @classmethod
    def omega(cls, witness: str = "", basis: str = "theorem") -> UnitSumClass:
        return cls("omega", None, witness, basis)

    @classmethod
    def infinite(cls, witness: str = "", basis: str = "theorem") -> UnitSumClass:
        return cls("infinite", None, witness, basis)

    @classmethod
    def inconclusive(cls, witness: str = "") -> UnitSumClass:
        return cls("inconclusive", None, witness)

    def _key(self):
        if self.tag == "inconclusive":
            raise TypeError("inconclusive verdicts are not ordered")
        return (_RANK[self.tag], self.k or 0)

    def __lt__(self, other: UnitSumClass) -> bool:
        return self._key() < other._key()

    def __eq__(self, other) -> bool:
        if not isinstance(other, UnitSumClass):
            return NotImplemented
        return (self.tag, self.k) == (other.tag, other.k)

    def __hash__(self):
        return hash((self.tag, self.k))

    @property
    def verdict(self) -> str:
        return f"exact({self.k})" if self.tag == "exact" else self.tag

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "witness": self.witness, "basis": self.basis}


def quadratic_usn(d: int) -> UnitSumClass:
    """u(R) for the ring of integers of Q(sqrt d): omega or infinity."""
    if d in (0, 1):
        raise DomainError(f"d = {d} does not define a quadratic field")
    if not is_squarefree(d):
        raise DomainError(f"d = {d} is not squarefree")
    if d in (-1, -3):
        return UnitSumClass.omega(f"d = {d} has extra roots of unity")
    if d > 0:
        shift = 4 if d % 4 == 1 else 1
        for t in (d + shift, d - shift):
            if is_square(t):
                return UnitSumClass.omega(f"d {'+' if t > d else '-'} {shift} = {t} is a square")
        return UnitSumClass.infinite(f"neither d + {shift} nor d - {shift} is a square")
    return UnitSumClass.infinite("imaginary field with units +-1 only")


def cubic_usn(d: int) -> UnitSumClass:
    """u(R) for the ring of integers of the pure cubic field Q(cbrt d)."""
    if abs(d) <= 1 or is_cube(d):
        raise DomainError(f"d = {d} does not define a cubic field")
    if not is_cubefree(d):
        raise DomainError(f"d = {d} is not cubefree")
    if d == 28:
        return UnitSumClass.omega("d = 28 is the exceptional case")
    if not is_squarefree(d):
        return UnitSumClass.infinite("d is not squarefree")
    if d % 9 in (1, 8):
        return UnitSumClass.infinite(f"d = {d} is +-1 mod 9")
    for t in (d - 1, d + 1):
        a = exact_root(t, 3)
        if a is not None:
            return UnitSumClass.omega(f"d {'-' if t < d else '+'} 1 = {a}^3")
    return UnitSumClass.infinite("neither d + 1 nor d - 1 is a cube")


@dataclass(frozen=True)
class CubicFieldData:
    """Invariants of a complex cubic field.

    ``eta`` is a real unit > 1 and ``x + iy`` one of its complex conjugates;
    these are optional and only used by :func:`widmer_index_check`.
    """

    abs_disc: int
    regulator_upper: mpmath.mpf
    eta: mpmath.mpf | None = None
    x: mpmath.mpf | None = None
    y: mpmath.mpf | None = None
    prec: int = PREC_BITS
    label: str = ""

    def __post_init__(self):
        if self.abs_disc <= 0:
            raise DomainError("|disc| must be positive")
        if not self.regulator_upper > 0:
            raise DomainError("regulator bound must be positive")

    @property
    def has_embedding(self) -> bool:
        return self.eta is not None

    def embedding_residual(self):
        """|x^2 + y^2 - 1/eta|, zero for a unit of norm 1."""
        with mpmath.workprec(self.prec):
            return abs(self.x**2 + self.y**2 - 1 / self.eta)

    def to_json(self) -> dict:
        out = {
            "abs_disc": self.abs_disc,
            "regulator_upper": mpmath.nstr(self.regulator_upper, 25),
        }
        if self.has_embedding:
            out.update(eta=mpmath.nstr(self.eta, 25), x=mpmath.nstr(self.x, 25), y=mpmath.nstr(self.y, 25))
        if self.label:
            out["label"] = self.label
        return out


def widmer_bound(regulator) -> mpmath.mpf:
    """(e^{3R/4} + e^{-3R/4})^4, increasing in R > 0."""
    with mpmath.workprec(PREC_BITS):
        r = mpmath.mpf(regulator)
        return (mpmath.exp(3 * r / 4) + mpmath.exp(-3 * r / 4)) ** 4


def widmer_sufficient(data: CubicFieldData) -> UnitSumClass:
    """One-sided test: omega when |disc| exceeds the regulator bound."""
    rhs = widmer_bound(data.regulator_upper)
    if data.abs_disc > rhs:
        return UnitSumClass.omega(f"|disc| = {data.abs_disc} > {mpmath.nstr(rhs, 8)}")
    return UnitSumClass.inconclusive(f"|disc| = {data.abs_disc} <= {mpmath.nstr(rhs, 8)}")


def cubic_data_from_unit(minpoly: list[int], abs_disc: int, regulator_upper=None, label: str = "",
                         prec: int = PREC_BITS) -> CubicFieldData:
    """Embedding data of a complex cubic field from the minimal polynomial of a unit.

    ``minpoly`` lists coefficients from the leading term down.  The real root
    is replaced by its absolute value or reciprocal so that eta > 1; the
    lattice Z[eta] is unchanged by either move.
    """
    if len(minpoly) != 4 or abs(minpoly[0]) != 1 or abs(minpoly[-1]) != 1:
        raise DomainError("need a monic cubic with constant term +-1")
    with mpmath.workprec(prec + 64):
        roots = mpmath.polyroots(minpoly, maxsteps=200, extraprec=prec + 64)
        real = [r for r in roots if abs(mpmath.im(r)) < mpmath.mpf(2) ** (-prec // 2)]
        cplx = [r for r in roots if mpmath.im(r) > mpmath.mpf(2) ** (-prec // 2)]
        if len(real) != 1 or len(cplx) != 1:
            raise DomainError("polynomial does not define a complex cubic field")
        eta = mpmath.re(real[0])
        z = cplx[0]
        if eta < 0:
            eta, z = -eta, -z
        if eta < 1:
            eta, z = 1 / eta, 1 / z
        if mpmath.im(z) < 0:
            z = mpmath.conj(z)
        reg = regulator_upper if regulator_upper is not None else mpmath.log(eta)
        return CubicFieldData(abs_disc, mpmath.mpf(reg), +eta, +mpmath.re(z), +mpmath.im(z), prec, label)


def cube_root_two_data() -> CubicFieldData:
    """Q(cbrt 2): disc -108, fundamental unit 1 + cbrt 2 + cbrt 4 = 1/(cbrt 2 - 1)."""
    return cubic_data_from_unit([1, -3, -3, -1], 108, label="Q(cbrt 2)")


def power_data(data: CubicFieldData, k: int) -> CubicFieldData:
    """Same field, unit replaced by its k-th power (a sublattice test case)."""
    with mpmath.workprec(data.prec + 32):
        z = mpmath.mpc(data.x, data.y) ** k
        return CubicFieldData(
            data.abs_disc, data.regulator_upper * k, data.eta**k, mpmath.re(z), mpmath.im(z),
            data.prec, f"{data.label} eta^{k}".strip(),
        )


@dataclass(frozen=True)
class IndexResult:
    verdict: UnitSumClass
    index: int
    ratio_interval: tuple[str, str]

    def to_json(self) -> dict:
        return {**self.verdict.to_json(), "index": self.index, "ratio_interval": list(self.ratio_interval)}


def widmer_index_check(data: CubicFieldData, input_error=None) -> IndexResult:
    """Index of Z[eta] in the ring of integers, from the lattice determinant.

    The covolume of Z[eta] under the embedding into R x C is |det| of the
    rows (1, eta, eta^2), (1, x, x^2 - y^2), (0, y, 2xy); the ring of
    integers has covolume sqrt|disc|/2.  The quotient is certified to be an
    integer using interval arithmetic with inputs widened by
    ``input_error`` (default 2^-(prec - 16), relative).
    """
    if not data.has_embedding:
        raise DomainError("embedding data required")
    if data.y == 0:
        raise DomainError("y = 0: not a complex cubic embedding")
    prec = data.prec
    iv = mpmath.iv
    old = iv.prec
    iv.prec = prec + 32
    try:
        rel = mpmath.mpf(2) ** (-(prec - 16)) if input_error is None else mpmath.mpf(input_error)

        def widen(v):
            with mpmath.workprec(prec + 32):
                r = abs(v) * rel + mpmath.mpf(2) ** (-prec)
                return iv.mpf([v - r, v + r])

        e, x, y = widen(data.eta), widen(data.x), widen(data.y)
        det = (x * 2 * x * y - (x * x - y * y) * y) - e * (2 * x * y) + e * e * y
        ratio = abs(det) / (iv.sqrt(iv.mpf(data.abs_disc)) / 2)
        lo, hi = mpmath.mpf(ratio.a), mpmath.mpf(ratio.b)
    finally:
        iv.prec = old
    k = int(mpmath.nint((lo + hi) / 2))
    if hi - lo >= mpmath.mpf("0.05") or not (lo <= k <= hi) or k < 1:
        raise DomainError(
            f"indeterminate at precision: ratio in [{mpmath.nstr(lo, 12)}, {mpmath.nstr(hi, 12)}]"
        )
    interval = (mpmath.nstr(lo, 20), mpmath.nstr(hi, 20))
    if k == 1:
        return IndexResult(UnitSumClass.omega("Z[eta] is the full ring of integers"), k, interval)
    return IndexResult(UnitSumClass.infinite(f"Z[eta] has index {k}", basis="this unit"), k, interval)


@dataclass(frozen=True)
class ErdosMember:
    N: int
    admissible: bool
    data: CubicFieldData
    root_interval: tuple[Fraction, Fraction]
    factorization: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        lo, hi = self.root_interval
        return {
            "N": self.N,
            "admissible": self.admissible,
            "abs_disc": self.data.abs_disc,
            "regulator_upper": mpmath.nstr(self.data.regulator_upper, 20),
            "root_interval": [str(lo), str(hi)],
            "verdict": widmer_sufficient(self.data).to_json() if self.admissible else None,
        }


def _f_n(N: int, t: Fraction) -> Fraction:
    return t**3 + N * t + 1


def isolate_root(N: int, bits: int = 64) -> tuple[Fraction, Fraction]:
    """Exact bisection for the real root of X^3 + N X + 1 (strictly increasing)."""
    lo, hi = Fraction(-1), Fraction(0)
    width = Fraction(1, 2**bits)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if _f_n(N, mid) < 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def erdos_family(N: int) -> ErdosMember:
    """The field generated by a root of X^3 + N X + 1.

    Admissible when 4N^3 + 27 is squarefree; then the polynomial
    discriminant is the field discriminant.  The unit -1/alpha bounds the
    regulator by log(N + 1/N^2).
    """
    if N < 1:
        raise DomainError("N must be a positive integer")
    disc = 4 * N**3 + 27
    try:
        admissible = is_squarefree(disc)
    except Unverifiable as exc:
        raise Unverifiable(f"squarefreeness of 4N^3+27 = {disc} unverifiable", exc.partial) from exc
    lo, hi = isolate_root(N)
    # -alpha in (-hi, -lo)
    if not (Fraction(N * N, N**3 + 1) < -hi and -lo < Fraction(1, N)):
        raise AssertionError(f"root bound violated for N = {N}")
    # -1/alpha in (N, N + 1/N^2)
    if not (N < -1 / lo and -1 / hi < N + Fraction(1, N * N)):
        raise AssertionError(f"unit bound violated for N = {N}")
    with mpmath.workprec(PREC_BITS):
        reg = mpmath.log(N + mpmath.mpf(1) / (N * N))
    if admissible:
        # beta = -1/alpha satisfies beta^3 - N beta^2 - 1 = 0
        data = cubic_data_from_unit([1, -N, 0, -1], disc, reg, label=f"f_{N}")
    else:
        data = CubicFieldData(disc, reg, label=f"f_{N}")
    fac = {} if admissible else {str(p): e for p, e in _factor_small(disc).items()}
    return ErdosMember(N, admissible, data, (lo, hi), fac)


def _factor_small(n: int) -> dict[int, int]:
    from .arith import trial_factor

    factors, cofactor = trial_factor(n)
    if cofactor != 1:
        factors[cofactor] = 1
    return factors


@dataclass(frozen=True)
class PowerBasisVerdict:
    value: bool
    basis: str
    witness: str

    def __bool__(self) -> bool:
        return self.value

    def to_json(self) -> dict:
        return {"verdict": self.value, "witness": self.witness, "basis": self.basis}


def _has_degree(d: int, m: int) -> bool:
    """X^d - m irreducible over Q (Capelli)."""
    for p in prime_factors(d):
        if exact_root(m, p) is not None:
            return False
    if d % 4 == 0 and m < 0 and -m % 4 == 0:
        c = exact_root(-m // 4, 4)
        if c is not None:
            return False
    return True


def power_basis_units(d: int, m: int) -> PowerBasisVerdict:
    """Whether Z[m^(1/d)] has a power basis of units, i.e. m = a^d +- 1.

    Backed by theorems for d <= 3 and for d = 4 with m > 1 non-square;
    every other case rests on the conjectured generalisation.
    """
    if d < 2 or m == 0:
        raise DomainError("need d >= 2 and m != 0")
    if d == 4 and m > 0 and (m == 1 or is_square(m)):
        raise DomainError(f"m = {m} is a square: degree precondition fails")
    if not _has_degree(d, m):
        raise DomainError(f"{m}^(1/{d}) does not have degree {d}")
    basis = "theorem" if d <= 3 or (d == 4 and m > 1) else "conjecture"
    for delta in (1, -1):
        a = exact_root(m - delta, d)
        if a is not None:
            return PowerBasisVerdict(True, basis, f"m = {a}^{d} {'+' if delta > 0 else '-'} 1")
    return PowerBasisVerdict(False, basis, f"m is not a^{d} +- 1")
