"""Finite groups with a canonical index bijection ``[0, v) <-> G``.

Every backend exposes vectorised ``mul``/``inv`` on integer indices (numpy
broadcasting applies), with the identity at index 0. Subsets are held as
:class:`ElementSet` membership masks.

Index formulas (stable, part of the certificate contract):

* abelian ``Z_n1 x ... x Z_nk``: mixed radix, first factor fastest;
* semidirect ``Z_{p^t} x| Z_{p^t}``: ``x^a y^b -> a + p^t * b``;
* direct product ``G x H``: ``i_G + |G| * i_H``;
* affine ``[A, x]``: base-q digits of the translation part ``x``.
"""
from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import HandleMismatch, NotOddPrime, OrderTooSmall, TooLarge, TTooSmall
from .field import GF, is_prime

TABLE_LIMIT = 1024
PROBE_LIMIT = 10 ** 6


def _out(r):
    return int(r) if np.ndim(r) == 0 else r


class Group:
    """Base class. Subclasses implement ``_mul``, ``_inv``, ``element``, ``index``."""

    order: int
    spec: str
    description: str

    def __init__(self, order: int, spec: str, description: str = ""):
        self.order = int(order)
        self.spec = spec
        self.description = description or spec
        self._table: Optional[np.ndarray] = None
        self._inv_table: Optional[np.ndarray] = None
        self._gens: Optional[list[int]] = None

    # law ------------------------------------------------------------------
    def _mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inv(self, a: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def law_mul(self, a, b):
        """Product straight from the backend law, bypassing any cached table."""
        return _out(self._mul(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)))

    def law_inv(self, a):
        return _out(self._inv(np.asarray(a, dtype=np.int64)))

    def _ensure_tables(self) -> bool:
        if self._table is None and self.order <= TABLE_LIMIT:
            ids = np.arange(self.order, dtype=np.int64)
            self._table = self._mul(ids[:, None], ids[None, :]).astype(np.int32)
            self._inv_table = self._inv(ids)
        return self._table is not None

    def mul(self, a, b):
        if self._ensure_tables():
            return _out(self._table[a, b].astype(np.int64))
        return self.law_mul(a, b)

    def inv(self, a):
        if self._ensure_tables():
            return _out(self._inv_table[a])
        return self.law_inv(a)

    @property
    def identity(self) -> int:
        return 0

    def elements(self) -> np.ndarray:
        return np.arange(self.order, dtype=np.int64)

    def element(self, idx: int):
        raise NotImplementedError

    def index(self, elem) -> int:
        raise NotImplementedError

    def power(self, g: int, n: int) -> int:
        if n < 0:
            g, n = self.inv(g), -n
        result, base = 0, int(g)
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def commutes(self, a: int, b: int) -> bool:
        return self.mul(a, b) == self.mul(b, a)

    # subsets ------------------------------------------------------------------
    def subset(self, ids: Iterable[int]) -> "ElementSet":
        return ElementSet.from_ids(self, ids)

    def empty(self) -> "ElementSet":
        return ElementSet(self, np.zeros(self.order, dtype=bool))

    def full(self) -> "ElementSet":
        return ElementSet(self, np.ones(self.order, dtype=bool))

    def nonidentity(self) -> "ElementSet":
        s = self.full()
        s.mask[0] = False
        return s

    def cyclic_subgroup(self, g: int) -> "ElementSet":
        """``<g>`` including the identity."""
        g = int(g)
        self._check_index(g)
        ids = [0]
        cur = g
        while cur != 0:
            ids.append(cur)
            cur = self.mul(cur, g)
        return self.subset(ids)

    def generated_subgroup(self, gens: Sequence[int]) -> "ElementSet":
        gens_arr = np.asarray(list(gens), dtype=np.int64)
        mask = np.zeros(self.order, dtype=bool)
        mask[0] = True
        frontier = np.array([0], dtype=np.int64)
        while frontier.size and gens_arr.size:
            new = np.unique(np.asarray(self.mul(frontier[:, None], gens_arr[None, :])).ravel())
            new = new[~mask[new]]
            mask[new] = True
            frontier = new
        return ElementSet(self, mask)

    def generators(self) -> list[int]:
        """A small generating set, chosen greedily by least index."""
        if self._gens is None:
            gens: list[int] = []
            mask = np.zeros(self.order, dtype=bool)
            mask[0] = True
            while not mask.all():
                gens.append(int(np.argmin(mask)))
                mask = self.generated_subgroup(gens).mask
            self._gens = gens
        return list(self._gens)

    # structural probes -------------------------------------------------------
    def _check_probe(self) -> None:
        if self.order > PROBE_LIMIT:
            raise TooLarge(f"order {self.order} exceeds probe limit {PROBE_LIMIT}")

    def is_abelian(self) -> bool:
        gens = self.generators()
        return all(self.commutes(a, b) for i, a in enumerate(gens) for b in gens[i + 1:])

    def center(self) -> "ElementSet":
        self._check_probe()
        ids = self.elements()
        mask = np.ones(self.order, dtype=bool)
        for g in self.generators():
            mask &= np.asarray(self.mul(ids, g)) == np.asarray(self.mul(g, ids))
        return ElementSet(self, mask)

    def element_orders(self) -> np.ndarray:
        self._check_probe()
        ids = self.elements()
        orders = np.zeros(self.order, dtype=np.int64)
        cur = ids.copy()
        n = 1
        while True:
            hit = (cur == 0) & (orders == 0)
            orders[hit] = n
            if orders.all():
                return orders
            cur = np.asarray(self.mul(cur, ids))
            n += 1

    def element_order(self, g: int) -> int:
        return self.cyclic_subgroup(g).size

    def exponent(self) -> int:
        return math.lcm(*np.unique(self.element_orders()).tolist())

    # bookkeeping -------------------------------------------------------------
    def _check_index(self, idx) -> None:
        arr = np.asarray(idx)
        if arr.size and (arr.min() < 0 or arr.max() >= self.order):
            raise IndexError(f"element index out of range for {self.spec}")

    def descriptor(self) -> dict:
        return {"spec": self.spec, "order": self.order}

    def same_as(self, other: "Group") -> bool:
        return self is other or (isinstance(other, Group) and self.spec == other.spec)

    def __len__(self) -> int:
        return self.order

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec} order={self.order}>"


class AbelianGroup(Group):
    def __init__(self, orders: Sequence[int]):
        orders = [int(n) for n in orders]
        if not orders:
            raise OrderTooSmall("need at least one cyclic factor")
        if any(n < 2 for n in orders):
            raise OrderTooSmall(f"cyclic factor orders must be >= 2: {orders}")
        self.orders = orders
        self.radix = np.cumprod([1] + orders[:-1]).astype(np.int64)
        label = " x ".join(f"Z{n}" for n in orders)
        super().__init__(math.prod(orders), "abelian:" + ",".join(map(str, orders)), label)

    def _mul(self, a, b):
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for n, w in zip(self.orders, self.radix):
            out += ((a // w % n + b // w % n) % n) * w
        return out

    def _inv(self, a):
        out = np.zeros(np.shape(a), dtype=np.int64)
        for n, w in zip(self.orders, self.radix):
            out += (-(a // w) % n) * w
        return out

    def element(self, idx: int) -> tuple[int, ...]:
        return tuple(int(idx) // int(w) % n for n, w in zip(self.orders, self.radix))

    def index(self, elem: Sequence[int]) -> int:
        return int(sum((int(c) % n) * int(w) for c, n, w in zip(elem, self.orders, self.radix)))

    def generators(self) -> list[int]:
        return [int(w) for w in self.radix]


class SemidirectGroup(Group):
    """``<x, y | x^{p^t} = y^{p^t} = 1, yx = x^s y>`` with ``s = (p-1)p^{t-1} + 1``.

    ``x^a y^b`` is stored as ``a + p^t b``; ``(a,b)(c,d) = (a + c s^b, b + d)``.
    """

    def __init__(self, p: int, t: int):
        if not is_prime(p) or p == 2:
            raise NotOddPrime(f"p must be an odd prime, got {p}")
        if t < 2:
            raise TTooSmall(f"t must be >= 2, got {t}")
        self.p, self.t = p, t
        self.n = p ** t
        self.s = (p - 1) * p ** (t - 1) + 1
        self.spow = np.array([pow(self.s, b, self.n) for b in range(self.n)], dtype=np.int64)
        n = self.n
        super().__init__(n * n, f"semidirect:{p}:{t}", f"Z{n} x|_{self.s} Z{n}")

    def _mul(self, a, b):
        n = self.n
        a0, a1 = a % n, a // n
        b0, b1 = b % n, b // n
        return (a0 + b0 * self.spow[a1]) % n + n * ((a1 + b1) % n)

    def _inv(self, a):
        n = self.n
        a0, a1 = a % n, a // n
        return (-a0 * self.spow[(-a1) % n]) % n + n * ((-a1) % n)

    def element(self, idx: int) -> tuple[int, int]:
        return int(idx) % self.n, int(idx) // self.n

    def index(self, elem: Sequence[int]) -> int:
        a, b = elem
        return int(a) % self.n + self.n * (int(b) % self.n)

    def xy(self, a: int, b: int) -> int:
        """Index of ``x^a y^b``."""
        return self.index((a, b))

    def generators(self) -> list[int]:
        return [1, self.n]


class DirectProduct(Group):
    def __init__(self, left: Group, right: Group):
        self.left, self.right = left, right
        super().__init__(
            left.order * right.order,
            f"product:({left.spec})x({right.spec})",
            f"({left.description}) x ({right.description})",
        )

    def split(self, idx):
        n = self.left.order
        return idx % n, idx // n

    def join(self, g, h):
        return _out(np.asarray(g, dtype=np.int64) + self.left.order * np.asarray(h, dtype=np.int64))

    def _mul(self, a, b):
        n = self.left.order
        return np.asarray(self.left.mul(a % n, b % n)) + n * np.asarray(self.right.mul(a // n, b // n))

    def _inv(self, a):
        n = self.left.order
        return np.asarray(self.left.inv(a % n)) + n * np.asarray(self.right.inv(a // n))

    def element(self, idx: int):
        g, h = self.split(int(idx))
        return self.left.element(g), self.right.element(h)

    def index(self, elem) -> int:
        g, h = elem
        return int(self.join(self.left.index(g), self.right.index(h)))

    def generators(self) -> list[int]:
        return [int(self.join(g, 0)) for g in self.left.generators()] + [
            int(self.join(0, h)) for h in self.right.generators()
        ]

    def descriptor(self) -> dict:
        d = super().descriptor()
        d["factors"] = [self.left.descriptor(), self.right.descriptor()]
        return d


class AffineGroup(Group):
    """Regular subgroup ``{[A_{f(x)}, x] : x in V}`` of AGL(n, q).

    ``matrices[a]`` is ``A_a`` (field indices, acting on row vectors from the
    right) and ``functional`` is an H-invariant linear form ``f``; the group
    law is ``[A_a, x][A_c, y] = [A_{a+c}, x A_c + y]``.
    """

    def __init__(self, field: GF, matrices: np.ndarray, functional: Sequence[int], spec: str,
                 description: str = "", meta: Optional[dict] = None):
        self.field = field
        self.matrices = np.asarray(matrices, dtype=np.int64)
        q = field.q
        n = self.matrices.shape[1]
        self.dim = n
        self.functional = tuple(int(c) for c in functional)
        self.meta = dict(meta or {})
        order = q ** n
        super().__init__(order, spec, description)

        ids = np.arange(order, dtype=np.int64)
        self.coords = np.stack([(ids // q ** i) % q for i in range(n)], axis=1)
        self.qweights = q ** np.arange(n, dtype=np.int64)
        alpha = np.zeros(order, dtype=np.int64)
        for i, c in enumerate(self.functional):
            if c:
                alpha = field.add(alpha, field.mul(c, self.coords[:, i]))
        self.alpha = alpha
        # act[c, x] = index of x A_c
        self.act = np.stack([self._apply(self.matrices[c]) for c in range(q)])
        # V as Z_p^{e n}: base-p digits of the index
        self._pdigits = field.e * n
        self._pw = field.p ** np.arange(self._pdigits, dtype=np.int64)

    def _apply(self, M: np.ndarray) -> np.ndarray:
        F = self.field
        out = np.zeros(self.order, dtype=np.int64)
        for j in range(self.dim):
            col = np.zeros(self.order, dtype=np.int64)
            for i in range(self.dim):
                if M[i, j]:
                    col = F.add(col, F.mul(self.coords[:, i], int(M[i, j])))
            out += col * self.qweights[j]
        return out

    def vec_index(self, coords: Sequence[int]) -> int:
        return int(sum(int(c) * int(w) for c, w in zip(coords, self.qweights)))

    def vadd(self, a, b):
        p = self.field.p
        out = np.zeros(np.broadcast(a, b).shape, dtype=np.int64)
        for w in self._pw:
            out += ((a // w + b // w) % p) * w
        return out

    def vneg(self, a):
        p = self.field.p
        out = np.zeros(np.shape(a), dtype=np.int64)
        for w in self._pw:
            out += (-(a // w) % p) * w
        return out

    def _mul(self, a, b):
        return self.vadd(self.act[self.alpha[b], a], b)

    def _inv(self, a):
        neg_alpha = self.field.neg_table[self.alpha[a]]
        return self.vneg(self.act[neg_alpha, a])

    def element(self, idx: int):
        """``(alpha, x)`` for the element ``[A_alpha, x]``."""
        idx = int(idx)
        return int(self.alpha[idx]), tuple(int(c) for c in self.coords[idx])

    def index(self, elem) -> int:
        _, x = elem
        return self.vec_index(x)

    def descriptor(self) -> dict:
        d = super().descriptor()
        d["field"] = {"p": self.field.p, "e": self.field.e, "modulus": list(self.field.modulus)}
        d.update(self.meta)
        return d


class ElementSet:
    """Subset of a group held as a dense boolean membership vector."""

    __slots__ = ("owner", "mask")

    def __init__(self, owner: Group, mask: np.ndarray):
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (owner.order,):
            raise ValueError("membership mask has the wrong length")
        self.owner = owner
        self.mask = mask

    @classmethod
    def from_ids(cls, owner: Group, ids: Iterable[int]) -> "ElementSet":
        arr = np.fromiter((int(i) for i in ids), dtype=np.int64)
        owner._check_index(arr)
        mask = np.zeros(owner.order, dtype=bool)
        mask[arr] = True
        return cls(owner, mask)

    def _check(self, other: "ElementSet") -> None:
        if not self.owner.same_as(other.owner):
            raise HandleMismatch(f"{self.owner.spec} vs {other.owner.spec}")

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def ids(self) -> np.ndarray:
        return np.flatnonzero(self.mask).astype(np.int64)

    def __len__(self) -> int:
        return self.size

    def __iter__(self):
        return iter(self.ids.tolist())

    def __contains__(self, g: int) -> bool:
        return bool(self.mask[int(g)])

    def __or__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.owner, self.mask | other.mask)

    def __and__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.owner, self.mask & other.mask)

    def __sub__(self, other: "ElementSet") -> "ElementSet":
        self._check(other)
        return ElementSet(self.owner, self.mask & ~other.mask)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ElementSet):
            return NotImplemented
        return self.owner.same_as(other.owner) and bool(np.array_equal(self.mask, other.mask))

    __hash__ = None

    def complement(self) -> "ElementSet":
        """``G - 1 - S``."""
        mask = ~self.mask
        mask[0] = False
        return ElementSet(self.owner, mask)

    def without_identity(self) -> "ElementSet":
        mask = self.mask.copy()
        mask[0] = False
        return ElementSet(self.owner, mask)

    def with_identity(self) -> "ElementSet":
        mask = self.mask.copy()
        mask[0] = True
        return ElementSet(self.owner, mask)

    def inverse(self) -> "ElementSet":
        """``S^(-1)``."""
        mask = np.zeros_like(self.mask)
        mask[np.asarray(self.owner.inv(self.ids), dtype=np.int64)] = True
        return ElementSet(self.owner, mask)

    def is_inverse_closed(self) -> bool:
        return self == self.inverse()

    def isdisjoint(self, other: "ElementSet") -> bool:
        self._check(other)
        return not (self.mask & other.mask).any()

    def copy(self) -> "ElementSet":
        return ElementSet(self.owner, self.mask.copy())

    def __repr__(self) -> str:
        return f"<ElementSet of {self.owner.spec} size={self.size}>"


def union_all(owner: Group, sets: Iterable[ElementSet]) -> ElementSet:
    out = owner.empty()
    for s in sets:
        out = out | s
    return out


def abelian_group(orders: Sequence[int]) -> AbelianGroup:
    return AbelianGroup(orders)


def cyclic_group(n: int) -> AbelianGroup:
    return AbelianGroup([n])


def semidirect_group(p: int, t: int) -> SemidirectGroup:
    return SemidirectGroup(p, t)


def direct_product(left: Group, right: Group) -> DirectProduct:
    return DirectProduct(left, right)
