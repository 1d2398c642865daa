"""Matrices over Euclidean-division rings as sums of two invertible matrices.

Invertible matrices are built as words in the generators of E_n(R):
elementary matrices E(a, i, j) (identity plus ``a`` at row i, column j),
permutation matrices and -I.  Indices in generators are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import isqrt
from typing import Any, Union

from .arith import is_prime
from .errors import DomainError
from .quadratic import QuadraticElt, QuadraticOrder, class_number
from .ring_core import EuclideanRing


@dataclass(frozen=True)
class Elem:
    a: Any
    i: int
    j: int

    def __post_init__(self):
        if self.i == self.j:
            raise DomainError("elementary generator needs i != j")


@dataclass(frozen=True)
class Perm:
    """Permutation matrix with column j equal to e_{sigma(j)}; sigma is 1-based."""

    sigma: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.sigma) != list(range(1, len(self.sigma) + 1)):
            raise DomainError(f"not a permutation: {self.sigma}")

    def inverse(self) -> Perm:
        inv = [0] * len(self.sigma)
        for j, s in enumerate(self.sigma, start=1):
            inv[s - 1] = j
        return Perm(tuple(inv))


@dataclass(frozen=True)
class NegId:
    pass


Generator = Union[Elem, Perm, NegId]
EnWord = tuple  # tuple[Generator, ...]


def transposition(n: int, a: int, b: int) -> Perm:
    sigma = list(range(1, n + 1))
    sigma[a - 1], sigma[b - 1] = sigma[b - 1], sigma[a - 1]
    return Perm(tuple(sigma))


def inverse_word(ring: EuclideanRing, word) -> tuple:
    out = []
    for g in reversed(word):
        if isinstance(g, Elem):
            out.append(Elem(ring.neg(g.a), g.i, g.j))
        elif isinstance(g, Perm):
            out.append(g.inverse())
        else:
            out.append(g)
    return tuple(out)


def word_to_json(ring: EuclideanRing, word) -> list:
    out = []
    for g in word:
        if isinstance(g, Elem):
            out.append({"elem": [ring.encode(g.a), g.i, g.j]})
        elif isinstance(g, Perm):
            out.append({"perm": list(g.sigma)})
        else:
            out.append({"negid": True})
    return out


def word_from_json(ring: EuclideanRing, obj: list) -> tuple:
    out = []
    for item in obj:
        if "elem" in item:
            a, i, j = item["elem"]
            out.append(Elem(ring.decode(a), int(i), int(j)))
        elif "perm" in item:
            out.append(Perm(tuple(int(x) for x in item["perm"])))
        elif item.get("negid"):
            out.append(NegId())
        else:
            raise DomainError(f"malformed generator {item!r}")
    return tuple(out)


@dataclass(frozen=True)
class RingMatrix:
    ring: EuclideanRing
    rows: tuple[tuple, ...]

    def __post_init__(self):
        if not self.rows or any(len(r) != len(self.rows[0]) for r in self.rows):
            raise DomainError("matrix must be rectangular and non-empty")

    @classmethod
    def of(cls, ring: EuclideanRing, rows) -> RingMatrix:
        return cls(ring, tuple(tuple(r) for r in rows))

    @classmethod
    def from_ints(cls, ring: EuclideanRing, rows) -> RingMatrix:
        return cls.of(ring, [[ring.from_int(x) for x in r] for r in rows])

    @classmethod
    def identity(cls, ring: EuclideanRing, n: int) -> RingMatrix:
        return cls.of(ring, [[ring.one() if i == j else ring.zero() for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, ring: EuclideanRing, entries) -> RingMatrix:
        n = len(entries)
        return cls.of(ring, [[entries[i] if i == j else ring.zero() for j in range(n)] for i in range(n)])

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    @property
    def n(self) -> int:
        r, c = self.shape
        if r != c:
            raise DomainError("square matrix required")
        return r

    def __getitem__(self, idx):
        i, j = idx
        return self.rows[i][j]

    def __add__(self, other: RingMatrix) -> RingMatrix:
        if self.shape != other.shape:
            raise DomainError("shape mismatch")
        add = self.ring.add
        return RingMatrix(self.ring, tuple(tuple(add(a, b) for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)))

    def __neg__(self) -> RingMatrix:
        return RingMatrix(self.ring, tuple(tuple(self.ring.neg(a) for a in r) for r in self.rows))

    def __sub__(self, other: RingMatrix) -> RingMatrix:
        return self + (-other)

    def __matmul__(self, other: RingMatrix) -> RingMatrix:
        (r, k), (k2, c) = self.shape, other.shape
        if k != k2:
            raise DomainError("shape mismatch")
        ring = self.ring
        out = []
        for i in range(r):
            row = []
            for j in range(c):
                acc = ring.zero()
                for t in range(k):
                    acc = ring.add(acc, ring.mul(self.rows[i][t], other.rows[t][j]))
                row.append(acc)
            out.append(tuple(row))
        return RingMatrix(ring, tuple(out))

    def __eq__(self, other) -> bool:
        return isinstance(other, RingMatrix) and self.shape == other.shape and all(
            self.ring.eq(a, b) for r, s in zip(self.rows, other.rows) for a, b in zip(r, s)
        )

    def __hash__(self):
        return hash(self.rows)

    def is_identity(self) -> bool:
        return self == RingMatrix.identity(self.ring, self.n)

    def is_diagonal(self) -> bool:
        r, c = self.shape
        return all(self.ring.is_zero(self.rows[i][j]) for i in range(r) for j in range(c) if i != j)

    def diagonal_entries(self) -> list:
        return [self.rows[i][i] for i in range(min(self.shape))]

    def to_json(self) -> list:
        return [[self.ring.encode(a) for a in r] for r in self.rows]

    @classmethod
    def from_json(cls, ring: EuclideanRing, obj) -> RingMatrix:
        if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
            raise DomainError("matrix JSON must be a list of rows")
        return cls.of(ring, [[ring.decode(x) for x in r] for r in obj])


def _mutable(m: RingMatrix) -> list[list]:
    return [list(r) for r in m.rows]


def _freeze(ring, rows) -> RingMatrix:
    return RingMatrix(ring, tuple(tuple(r) for r in rows))


def _right_apply(ring: EuclideanRing, rows: list[list], g, n: int) -> None:
    """rows <- rows * g, in place."""
    if isinstance(g, Elem):
        _check_indices(g, n)
        i, j = g.i - 1, g.j - 1
        for r in rows:
            r[j] = ring.add(r[j], ring.mul(r[i], g.a))
    elif isinstance(g, Perm):
        if len(g.sigma) != n:
            raise DomainError("permutation size mismatch")
        for idx, r in enumerate(rows):
            rows[idx] = [r[s - 1] for s in g.sigma]
    elif isinstance(g, NegId):
        for idx, r in enumerate(rows):
            rows[idx] = [ring.neg(a) for a in r]
    else:
        raise DomainError(f"malformed generator {g!r}")


def _left_apply(ring: EuclideanRing, rows: list[list], g, n: int) -> None:
    """rows <- g * rows, in place."""
    if isinstance(g, Elem):
        _check_indices(g, n)
        i, j = g.i - 1, g.j - 1
        rows[i] = [ring.add(x, ring.mul(g.a, y)) for x, y in zip(rows[i], rows[j])]
    elif isinstance(g, Perm):
        if len(g.sigma) != n:
            raise DomainError("permutation size mismatch")
        old = list(rows)
        for j, s in enumerate(g.sigma):
            rows[s - 1] = old[j]
    elif isinstance(g, NegId):
        for idx, r in enumerate(rows):
            rows[idx] = [ring.neg(a) for a in r]
    else:
        raise DomainError(f"malformed generator {g!r}")


def _check_indices(g: Elem, n: int) -> None:
    if not (1 <= g.i <= n and 1 <= g.j <= n):
        raise DomainError(f"generator index out of range for n={n}: {g}")


def en_eval(ring: EuclideanRing, word, n: int) -> RingMatrix:
    """Product of the generators in ``word``, left to right."""
    rows = _mutable(RingMatrix.identity(ring, n))
    for g in word:
        _right_apply(ring, rows, g, n)
    return _freeze(ring, rows)


@dataclass(frozen=True)
class UnitMatrix:
    matrix: RingMatrix
    inverse: RingMatrix
    word: tuple | None = None

    def verify(self) -> bool:
        return (self.matrix @ self.inverse).is_identity() and (self.inverse @ self.matrix).is_identity()

    @classmethod
    def from_word(cls, ring: EuclideanRing, word, n: int) -> UnitMatrix:
        word = tuple(word)
        return cls(en_eval(ring, word, n), en_eval(ring, inverse_word(ring, word), n), word)

    def to_json(self) -> dict:
        out = {"matrix": self.matrix.to_json(), "inverse": self.inverse.to_json()}
        if self.word is not None:
            out["word"] = word_to_json(self.matrix.ring, self.word)
        return out


@dataclass(frozen=True)
class TwoUnitDecomp:
    target: RingMatrix
    summands: tuple[UnitMatrix, UnitMatrix]

    def verify(self) -> bool:
        first, second = self.summands
        return (first.matrix + second.matrix == self.target) and first.verify() and second.verify()

    @property
    def distinct(self) -> bool:
        return self.summands[0].matrix != self.summands[1].matrix

    def to_json(self) -> dict:
        return {
            "target": self.target.to_json(),
            "summands": [s.to_json() for s in self.summands],
            "verified": self.verify(),
        }


def signed_cycle_word(n: int) -> tuple:
    """Word for C with C[i][i+1] = 1 (i < n), C[n][1] = -1.

    The cyclic shift has columns e_n, e_1, ..., e_{n-1}; the transposition and
    the three elementary matrices turn the (1, 2) block into [[0, 1], [-1, 0]]
    applied on the right, fixing the sign of the wrap-around entry.
    """
    shift = Perm(tuple([n] + list(range(1, n))))
    return (shift, transposition(n, 1, 2), Elem(1, 1, 2), Elem(-1, 2, 1), Elem(1, 1, 2))


def _ring_word(ring: EuclideanRing, word) -> tuple:
    """Replace integer coefficients in a template word by ring elements."""
    return tuple(Elem(ring.from_int(g.a), g.i, g.j) if isinstance(g, Elem) and isinstance(g.a, int) else g
                 for g in word)


def _staircase(ring: EuclideanRing, d: list, sign: int) -> tuple[tuple, tuple]:
    n = len(d)
    neg = ring.neg
    cyc = _ring_word(ring, signed_cycle_word(n))
    # P = C + sign * diag(d_1, ..., d_{n-1}, 0); Q = -C + sign * diag(0, ..., 0, d_n)
    head = [Elem(neg(d[0]) if sign > 0 else d[0], 1, n)]
    head += [Elem(d[i] if sign > 0 else neg(d[i]), i + 1, i) for i in range(1, n - 1)]
    p_word = tuple(head) + cyc
    q_word = (NegId(), Elem(neg(d[-1]) if sign > 0 else d[-1], n, n - 1)) + cyc
    if sign < 0:
        p_word, q_word = (NegId(),) + p_word, q_word[1:]
    return p_word, q_word


def _split(D: RingMatrix, sign: int) -> TwoUnitDecomp:
    ring = D.ring
    n = D.n
    if n < 2:
        raise DomainError("diagonal split needs n >= 2")
    if not D.is_diagonal():
        raise DomainError("matrix is not diagonal")
    p_word, q_word = _staircase(ring, D.diagonal_entries(), sign)
    dec = TwoUnitDecomp(D, (UnitMatrix.from_word(ring, p_word, n), UnitMatrix.from_word(ring, q_word, n)))
    assert dec.verify()
    return dec


def diagonal_split(D: RingMatrix) -> TwoUnitDecomp:
    """D = P + Q with P = C + diag(d_1..d_{n-1}, 0) and Q = -C + diag(0..0, d_n).

    C is the signed cycle of ``signed_cycle_word``; for n = 2 this is
    [[d1, 1], [-1, 0]] + [[0, -1], [1, d2]].
    """
    return _split(D, +1)


def distinct_split(D: RingMatrix) -> tuple[TwoUnitDecomp, TwoUnitDecomp]:
    """Two different splits of D; the second is the sign mirror of the first.

    Both have unequal summands because C != -C once 1 != -1.
    """
    if D.ring.one_is_minus_one:
        raise DomainError("remark hypothesis fails: 1 = -1 in this ring")
    first = _split(D, +1)
    second = _split(D, -1)
    assert first.summands[0].matrix != second.summands[0].matrix
    assert first.distinct and second.distinct
    return first, second


@dataclass(frozen=True)
class Diagonalization:
    U: tuple
    V: tuple
    D: RingMatrix

    def verify(self, A: RingMatrix) -> bool:
        ring, n = A.ring, A.n
        return (en_eval(ring, self.U, n) @ A @ en_eval(ring, self.V, n)) == self.D and self.D.is_diagonal()

    def to_json(self) -> dict:
        ring = self.D.ring
        return {"U": word_to_json(ring, self.U), "V": word_to_json(ring, self.V), "D": self.D.to_json()}


def diagonalize(A: RingMatrix) -> Diagonalization:
    """Words U, V in E_n(R) with U A V diagonal.

    Row steps use left division (multiplier on the left), column steps right
    division.  A nonzero entry of least size is moved to the pivot; any
    nonzero remainder is smaller than the pivot and becomes the next pivot,
    so the loop terminates.
    """
    ring = A.ring
    n = A.n
    if A.is_diagonal():
        return Diagonalization((), (), A)
    M = _mutable(A)
    left: list = []  # generators applied on the left, in application order
    right: list = []
    for t in range(n):
        while True:
            best = None
            for i in range(t, n):
                for j in range(t, n):
                    if not ring.is_zero(M[i][j]):
                        sz = ring.size(M[i][j])
                        if best is None or sz < best[0]:
                            best = (sz, i, j)
            if best is None:
                break
            _, pi, pj = best
            if pi != t:
                g = transposition(n, t + 1, pi + 1)
                _left_apply(ring, M, g, n)
                left.append(g)
            if pj != t:
                g = transposition(n, t + 1, pj + 1)
                _right_apply(ring, M, g, n)
                right.append(g)
            pivot = M[t][t]
            for i in range(t + 1, n):
                if not ring.is_zero(M[i][t]):
                    q, _ = ring.left_divide(M[i][t], pivot)
                    g = Elem(ring.neg(q), i + 1, t + 1)
                    _left_apply(ring, M, g, n)
                    left.append(g)
            for j in range(t + 1, n):
                if not ring.is_zero(M[t][j]):
                    q, _ = ring.right_divide(M[t][j], pivot)
                    g = Elem(ring.neg(q), t + 1, j + 1)
                    _right_apply(ring, M, g, n)
                    right.append(g)
            if all(ring.is_zero(M[i][t]) for i in range(t + 1, n)) and all(
                ring.is_zero(M[t][j]) for j in range(t + 1, n)
            ):
                break
    # U = g_k ... g_1 for left steps g_1, ..., g_k
    result = Diagonalization(tuple(reversed(left)), tuple(right), _freeze(ring, M))
    assert result.verify(A)
    return result


def two_units_decompose(A: RingMatrix) -> TwoUnitDecomp:
    """A = U^-1 P V^-1 + U^-1 Q V^-1 from U A V = D = P + Q."""
    ring = A.ring
    n = A.n
    if n < 2:
        raise DomainError("needs n >= 2")
    diag = diagonalize(A)
    split = diagonal_split(diag.D)
    u_inv = inverse_word(ring, diag.U)
    v_inv = inverse_word(ring, diag.V)
    summands = tuple(UnitMatrix.from_word(ring, u_inv + s.word + v_inv, n) for s in split.summands)
    dec = TwoUnitDecomp(A, summands)
    if not dec.verify():
        raise AssertionError("decomposition failed verification")
    return dec


def invert(M: RingMatrix) -> UnitMatrix:
    """Inverse of M via diagonalization; raises if M is not invertible."""
    ring = M.ring
    diag = diagonalize(M)
    inv_diag = []
    for d in diag.D.diagonal_entries():
        w = ring.unit_inverse(d)
        if w is None:
            raise DomainError("matrix is not invertible")
        inv_diag.append(w)
    n = M.n
    # M = U^-1 D V^-1, so M^-1 = V D^-1 U
    inverse = en_eval(ring, diag.V, n) @ RingMatrix.diagonal(ring, inv_diag) @ en_eval(ring, diag.U, n)
    unit = UnitMatrix(M, inverse)
    assert unit.verify()
    return unit


def _as_unit(ring: EuclideanRing, x, n: int) -> UnitMatrix:
    if isinstance(x, UnitMatrix):
        if not x.verify():
            raise DomainError("supplied inverse is wrong")
        return x
    if isinstance(x, RingMatrix):
        return invert(x)
    return UnitMatrix.from_word(ring, tuple(x), n)


def equivalence_transfer(decomp: TwoUnitDecomp, U, V) -> TwoUnitDecomp:
    """From A = M1 + M2 build U A V = U M1 V + U M2 V.

    U and V may be words, unit matrices, or plain matrices (inverted here).
    """
    A = decomp.target
    ring, n = A.ring, A.n
    u = _as_unit(ring, U, n)
    v = _as_unit(ring, V, n)
    new = []
    for s in decomp.summands:
        word = u.word + s.word + v.word if None not in (u.word, s.word, v.word) else None
        new.append(UnitMatrix(u.matrix @ s.matrix @ v.matrix, v.inverse @ s.inverse @ u.inverse, word))
    dec = TwoUnitDecomp(u.matrix @ A @ v.matrix, tuple(new))
    assert dec.verify()
    return dec


# ---------------------------------------------------------------------------
# Non-2-good witnesses over imaginary quadratic rings


@dataclass
class VamosReport:
    d: int
    a1: QuadraticElt
    a2: QuadraticElt
    height: int
    class_number: int
    pairs_checked: int
    decompositions_found: int
    example: tuple | None = None

    @property
    def survives(self) -> bool:
        return self.decompositions_found == 0

    def to_json(self) -> dict:
        zero = self.a1.order.from_int(0).to_json()
        return {
            "d": -self.d,
            "A": [[self.a1.to_json(), zero], [self.a2.to_json(), zero]],
            "A_text": f"[[{self.a1}, 0], [{self.a2}, 0]]",
            "height": self.height,
            "class_number": self.class_number,
            "pairs_checked": self.pairs_checked,
            "decompositions_found": self.decompositions_found,
            "example": None if self.example is None else [[str(x) for x in row] for row in self.example],
            "survives": self.survives,
        }


def _imag_order(d: int) -> QuadraticOrder:
    if d <= 0:
        raise DomainError("d must be a positive squarefree integer")
    order = QuadraticOrder(-d)
    if d in (1, 3) or class_number(-d) == 1:
        raise DomainError("proposition inapplicable: class number 1")
    return order


def _box(order: QuadraticOrder, height: int) -> list[QuadraticElt]:
    return [order.from_basis(x, y) for x in range(-height, height + 1) for y in range(-height, height + 1)]


def vamos_search(d: int, a1: QuadraticElt, a2: QuadraticElt, height: int, stop_at_first: bool = False) -> VamosReport:
    """Count M1 in GL_2 with entries of height <= ``height`` and A - M1 in GL_2.

    Here A = [[a1, 0], [a2, 0]] and M1 = [[a, b], [c, e]].  Units are +-1, so
    both determinants lie in {1, -1}, and det(A - M1) = det M1 - (a1 e - a2 b).
    Pairs (b, e) with a1 e - a2 b outside {0, 2, -2} are therefore skipped;
    for the rest, c is solved exactly from a e - b c = det M1.  The search is
    exhaustive over the box.
    """
    order = _imag_order(d)
    box = _box(order, height)
    one = order.from_int(1)
    found = 0
    example = None
    pairs = 0
    for b, e in product(box, box):
        pairs += 1
        t = a1 * e - a2 * b
        if not (t.v == 0 and t.u in (0, 4, -4)):
            continue
        tval = t.u // 2
        for det1 in (1, -1):
            if det1 - tval not in (1, -1):
                continue
            d1 = one * det1
            for a in box:
                if b.is_zero():
                    if a * e != d1:
                        continue
                    cs = box
                else:
                    c = (a * e - d1).exact_quotient(b)
                    if c is None or c.height() > height:
                        continue
                    cs = [c]
                for c in cs:
                    found += 1
                    if example is None:
                        example = ((a, b), (c, e))
                    if stop_at_first:
                        return VamosReport(d, a1, a2, height, class_number(-d), pairs, found, example)
    return VamosReport(d, a1, a2, height, class_number(-d), pairs, found, example)


def is_norm(order: QuadraticOrder, n: int) -> bool:
    """Whether some element of the imaginary order has norm n."""
    d = -order.d
    bound = 2 * isqrt(4 * n) + 2
    for v in range(0, bound + 1):
        rest = 4 * n - d * v * v
        if rest < 0:
            break
        u = isqrt(rest)
        if u * u == rest:
            try:
                order.elt(u, v)
            except DomainError:
                continue
            return True
    return False


def nonprincipal_prime(d: int) -> tuple[int, QuadraticElt, QuadraticElt]:
    """Smallest odd prime p splitting in Q(sqrt -d) with no element of norm p.

    The prime ideal (p, b + sqrt(-d)) with b^2 = -d mod p is then not
    principal, and it does not contain 2, so +-2 are not in the ideal.
    """
    order = _imag_order(d)
    p = 3
    while True:
        if is_prime(p) and d % p:
            roots = [b for b in range(p) if (b * b + d) % p == 0]
            if roots and not is_norm(order, p):
                return p, order.from_int(p), order.from_basis(roots[0], 0) + order.elt(0, 2)
        p += 2


def vamos_witness(d: int, height: int) -> VamosReport:
    """Witness A = [[p, 0], [b + sqrt(-d), 0]] from a non-principal prime of odd norm."""
    _, a1, a2 = nonprincipal_prime(d)
    return vamos_search(d, a1, a2, height)
