"""Exact arithmetic in GF(p^e) for odd p.

Elements are plain integers in ``[0, q)``: the element ``sum c_i a^i`` (``a`` a
root of the modulus) has index ``sum c_i p^i``. Zero is 0, one is 1.
All per-context tables are built once at construction, so the vectorised
helpers (``add``, ``mul``, ...) accept numpy arrays as well as ints.
"""
from __future__ import annotations

import enum
import itertools
from functools import lru_cache
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import (
    ContextMismatch,
    DegreeMismatch,
    FieldDivisionByZero,
    NotOddPrime,
    ReducibleModulus,
)

MAX_ORDER = 1 << 16


class SquareClass(enum.Enum):
    ZERO = "Zero"
    SQUARE = "Square"
    NONSQUARE = "NonSquare"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q`` as ``p**e``; raise ValueError when ``q`` is not a prime power."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, e


# polynomial helpers over GF(p); coefficient tuples are constant-term first

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _poly_trim([c % p for c in a])
    m = _poly_trim([c % p for c in m])
    dm = len(m) - 1
    inv_lead = pow(m[-1], p - 2, p)
    while len(a) - 1 >= dm and a:
        coef = a[-1] * inv_lead % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - coef * c) % p
        _poly_trim(a)
    return a


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return out


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Exhaustive factor check: no monic divisor of degree 1..deg/2."""
    deg = len(_poly_trim(list(poly))) - 1
    if deg < 1:
        return False
    for d in range(1, deg // 2 + 1):
        for tail in itertools.product(range(p), repeat=d):
            divisor = list(tail) + [1]
            if not _poly_mod(poly, divisor, p):
                return False
    return True


def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Smallest monic irreducible of degree ``e``, comparing (c_{e-1}, ..., c_0)."""
    if e == 1:
        return (0, 1)
    for high_first in itertools.product(range(p), repeat=e):
        coeffs = tuple(reversed(high_first)) + (1,)
        if is_irreducible(coeffs, p):
            return coeffs
    raise ReducibleModulus(f"no irreducible of degree {e} over GF({p})")  # unreachable


class GF:
    """Finite field context GF(p^e), p odd.

    Parameters
    ----------
    p : odd prime
    e : extension degree
    modulus : optional monic polynomial of degree ``e``, constant term first
        (length ``e + 1``). Defaults to :func:`smallest_irreducible`.
    """

    def __init__(self, p: int, e: int = 1, modulus: Optional[Sequence[int]] = None):
        if not is_prime(p) or p == 2:
            raise NotOddPrime(f"characteristic must be an odd prime, got {p}")
        if e < 1:
            raise DegreeMismatch(f"extension degree must be >= 1, got {e}")
        if p ** e > MAX_ORDER:
            raise ValueError(f"GF({p}^{e}) exceeds the supported order {MAX_ORDER}")
        if modulus is None:
            modulus = smallest_irreducible(p, e)
        else:
            modulus = tuple(int(c) % p for c in modulus)
            if len(modulus) != e + 1 or modulus[-1] != 1:
                raise DegreeMismatch(f"modulus must be monic of degree {e}: {modulus}")
            if e > 1 and not is_irreducible(modulus, p):
                raise ReducibleModulus(f"{modulus} is reducible over GF({p})")
        self.p = p
        self.e = e
        self.q = p ** e
        self.modulus = tuple(modulus)
        self._build_tables()

    # construction -------------------------------------------------------
    def _build_tables(self) -> None:
        q, p = self.q, self.p
        idx = np.arange(q, dtype=np.int64)
        self.digits = np.stack([(idx // p ** i) % p for i in range(self.e)], axis=1)
        self.neg_table = self._encode(-self.digits % p)

        # multiplicative structure via a primitive element
        gen = self._find_primitive()
        exp = np.zeros(2 * (q - 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        cur = 1
        for k in range(q - 1):
            exp[k] = cur
            log[cur] = k
            cur = self._mul_poly(cur, gen)
        exp[q - 1:] = exp[: q - 1]
        self.primitive = gen
        self.exp_table = exp
        self.log_table = log

        inv = np.zeros(q, dtype=np.int64)
        inv[1:] = exp[(q - 1 - log[1:]) % (q - 1)]
        self.inv_table = inv

        sq = np.zeros(q, dtype=np.int8)  # 0 zero, 1 square, -1 nonsquare
        sq[1:] = np.where(log[1:] % 2 == 0, 1, -1)
        self.sq_table = sq

        if q <= 1024:
            a, b = np.meshgrid(idx, idx, indexing="ij")
            self.add_table = self._add_digits(a, b)
            self.mul_table = self._mul_logs(a, b)
        else:
            self.add_table = None
            self.mul_table = None

    def _encode(self, digits: np.ndarray) -> np.ndarray:
        weights = self.p ** np.arange(self.e, dtype=np.int64)
        return (digits * weights).sum(axis=-1)

    def coeffs(self, a: int) -> tuple[int, ...]:
        """Polynomial coefficients (constant term first) of element ``a``."""
        return tuple(int(c) for c in self.digits[int(a)])

    def from_coeffs(self, coeffs: Iterable[int]) -> int:
        coeffs = list(coeffs)
        if len(coeffs) > self.e:
            coeffs = _poly_mod(coeffs, self.modulus, self.p)
        return sum((int(c) % self.p) * self.p ** i for i, c in enumerate(coeffs))

    def _mul_poly(self, a: int, b: int) -> int:
        prod = _poly_mul(self.coeffs(a), self.coeffs(b), self.p)
        return self.from_coeffs(_poly_mod(prod, self.modulus, self.p))

    def _find_primitive(self) -> int:
        n = self.q - 1
        factors = [f for f in range(2, n + 1) if n % f == 0 and is_prime(f)]
        for g in range(1, self.q):
            if all(self._pow_poly(g, n // f) != 1 for f in factors):
                return g
        raise AssertionError("multiplicative group is not cyclic")  # unreachable

    def _pow_poly(self, a: int, n: int) -> int:
        result, base = 1, a
        while n:
            if n & 1:
                result = self._mul_poly(result, base)
            base = self._mul_poly(base, base)
            n >>= 1
        return result

    def _add_digits(self, a, b):
        p = self.p
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        w = 1
        for _ in range(self.e):
            out += ((a // w % p + b // w % p) % p) * w
            w *= p
        return out

    def _mul_logs(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        nz = (a != 0) & (b != 0)
        la = np.where(a != 0, self.log_table[a], 0)
        lb = np.where(b != 0, self.log_table[b], 0)
        return np.where(nz, self.exp_table[la + lb], 0)

    # arithmetic (ints or arrays) -------------------------------------------
    def add(self, a, b):
        if self.add_table is not None:
            r = self.add_table[a, b]
        else:
            r = self._add_digits(a, b)
        return int(r) if np.ndim(r) == 0 else r

    def neg(self, a):
        r = self.neg_table[a]
        return int(r) if np.ndim(r) == 0 else r

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.mul_table is not None:
            r = self.mul_table[a, b]
        else:
            r = self._mul_logs(a, b)
        return int(r) if np.ndim(r) == 0 else r

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise FieldDivisionByZero("zero has no inverse")
        r = self.inv_table[a]
        return int(r) if np.ndim(r) == 0 else r

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        a = int(a)
        if a == 0:
            if n < 0:
                raise FieldDivisionByZero("zero to a negative power")
            return 1 if n == 0 else 0
        k = (int(self.log_table[a]) * n) % (self.q - 1)
        return int(self.exp_table[k])

    def element(self, value: int) -> int:
        """Map an integer (possibly negative) to the prime-subfield element."""
        return int(value) % self.p

    # square classes ---------------------------------------------------------
    def square_class(self, a: int) -> SquareClass:
        s = int(self.sq_table[int(a)])
        return (SquareClass.ZERO, SquareClass.SQUARE, SquareClass.NONSQUARE)[s if s >= 0 else 2]

    def is_square(self, a: int) -> bool:
        return self.sq_table[int(a)] == 1

    def nonsquare_witness(self) -> int:
        """Least-index ``b`` with ``-b`` a nonsquare."""
        for b in range(1, self.q):
            if self.sq_table[self.neg_table[b]] == -1:
                return b
        raise AssertionError("odd-order field without nonsquares")  # unreachable

    def __len__(self) -> int:
        return self.q

    def __iter__(self):
        return iter(range(self.q))

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def __repr__(self) -> str:
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.e}, modulus={list(self.modulus)})"

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, value)


@lru_cache(maxsize=None)
def field_new(p: int, e: int = 1, modulus: Optional[tuple[int, ...]] = None) -> GF:
    """Cached constructor; contexts are immutable so sharing is safe."""
    return GF(p, e, modulus)


def gf(q: int) -> GF:
    """Field of order ``q`` with the default modulus."""
    p, e = prime_power(q)
    return field_new(p, e)


class FieldElement:
    """Thin operator-overloading wrapper around an element index."""

    __slots__ = ("ctx", "index")

    def __init__(self, ctx: GF, index: int):
        if not 0 <= int(index) < ctx.q:
            raise ValueError(f"index {index} outside GF({ctx.q})")
        self.ctx = ctx
        self.index = int(index)

    def _other(self, other: Union["FieldElement", int]) -> int:
        if isinstance(other, FieldElement):
            if other.ctx != self.ctx:
                raise ContextMismatch(f"{self.ctx!r} vs {other.ctx!r}")
            return other.index
        return self.ctx.element(other)

    def __add__(self, other):
        return FieldElement(self.ctx, self.ctx.add(self.index, self._other(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self.index, self._other(other)))

    def __rsub__(self, other):
        return FieldElement(self.ctx, self.ctx.sub(self._other(other), self.index))

    def __mul__(self, other):
        return FieldElement(self.ctx, self.ctx.mul(self.index, self._other(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.ctx, self.ctx.div(self.index, self._other(other)))

    def __neg__(self):
        return FieldElement(self.ctx, self.ctx.neg(self.index))

    def __pow__(self, n: int):
        return FieldElement(self.ctx, self.ctx.pow(self.index, n))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.ctx, self.ctx.inv(self.index))

    def square_class(self) -> SquareClass:
        return self.ctx.square_class(self.index)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return self.ctx.coeffs(self.index)

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldElement):
            return self.ctx == other.ctx and self.index == other.index
        if isinstance(other, int):
            return self.index == self.ctx.element(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx, self.index))

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"{self.ctx!r}({self.index})"
