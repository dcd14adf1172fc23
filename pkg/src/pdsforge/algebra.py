"""Exact verification engine: difference censuses, group-ring convolutions,
PDS/DS certificates, parameter classification and scheme checks.

Everything is integer arithmetic. A census is a length-``v`` count vector;
pair ranges are split into chunks that may run on a thread pool and are
merged by addition, so results do not depend on the worker count.
"""
from __future__ import annotations

import hashlib
import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .errors import HandleMismatch, IdentityFails, NotAScheme, TooManyClasses
from .groups import ElementSet, Group, union_all

HASH_ALGORITHM = "sha256"
PAIR_BLOCK = 1 << 21  # products evaluated per vectorised step


def default_threads() -> int:
    env = os.environ.get("PDSFORGE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _check_owner(G: Group, *sets: ElementSet) -> None:
    for s in sets:
        if not G.same_as(s.owner):
            raise HandleMismatch(f"set of {s.owner.spec} used with {G.spec}")


def _pair_census(G: Group, left: np.ndarray, right: np.ndarray, threads: Optional[int]) -> np.ndarray:
    """counts[g] = #{(a, b) in left x right : a b = g}."""
    counts = np.zeros(G.order, dtype=np.int64)
    if left.size == 0 or right.size == 0:
        return counts
    step = max(1, PAIR_BLOCK // left.size)
    chunks = [right[i:i + step] for i in range(0, right.size, step)]

    def work(chunk: np.ndarray) -> np.ndarray:
        prods = np.asarray(G.mul(left[:, None], chunk[None, :]), dtype=np.int64)
        return np.bincount(prods.ravel(), minlength=G.order)

    threads = default_threads() if threads is None else max(1, threads)
    if threads == 1 or len(chunks) == 1:
        for c in chunks:
            counts += work(c)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for part in pool.map(work, chunks):
                counts += part
    return counts


@dataclass
class Census:
    owner: Group
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def checksum(self) -> str:
        return hashlib.sha256(self.counts.astype("<i8").tobytes()).hexdigest()

    def __getitem__(self, g: int) -> int:
        return int(self.counts[g])

    def __eq__(self, other) -> bool:
        return (isinstance(other, Census) and self.owner.same_as(other.owner)
                and bool(np.array_equal(self.counts, other.counts)))


def convolution(G: Group, A: ElementSet, B: ElementSet, threads: Optional[int] = None) -> Census:
    """Group-ring product ``AB``: ``counts[g] = #{(a, b) : ab = g}``."""
    _check_owner(G, A, B)
    return Census(G, _pair_census(G, A.ids, B.ids, threads))


def difference_census(G: Group, S: ElementSet, threads: Optional[int] = None) -> Census:
    """``counts[g] = #{(d1, d2) in S x S : d1 != d2, d1 d2^-1 = g}``."""
    _check_owner(G, S)
    ids = S.ids
    counts = _pair_census(G, ids, np.asarray(G.inv(ids), dtype=np.int64), threads)
    counts[0] -= ids.size  # d1 d2^-1 = 1 exactly when d1 = d2
    return Census(G, counts)


def set_hash(S: ElementSet) -> str:
    return hashlib.sha256(S.ids.astype("<u8").tobytes()).hexdigest()


# ---------------------------------------------------------------------------
# parameter classification

def _isqrt_exact(v: int) -> Optional[int]:
    n = math.isqrt(v)
    return n if n * n == v else None


def classify_parameters(params: Sequence[int]) -> list[str]:
    """All matching type tags for a PDS ``(v,k,l,m)`` or DS ``(v,k,l)`` tuple."""
    tags: list[str] = []
    if len(params) == 3:
        v, k, lam = params
        if 4 * k == 2 * (v - 1) and 4 * lam == v - 3:
            tags.append("PaleyHadamard")
        return tags or ["Other"]
    v, k, lam, mu = params
    n = _isqrt_exact(v)
    if n is not None and n > 1:
        if k % (n - 1) == 0:
            r = k // (n - 1)
            if r > 0 and lam == n + r * r - 3 * r and mu == r * r - r:
                tags.append(f"Latin({n},{r})")
        if k % (n + 1) == 0:
            r = k // (n + 1)
            if r > 0 and lam == -n + r * r + 3 * r and mu == r * r + r:
                tags.append(f"NegLatin({n},{r})")
    if 2 * k == v - 1 and 4 * lam == v - 5 and 4 * mu == v - 1:
        tags.append("PaleyType")
    if mu == 0 and lam == k - 1 and k > 0:
        tags.append("TrivialSubgroup")
    return tags or ["Other"]


def type_families(tags: Sequence[str]) -> set[str]:
    """Subset of {"Latin", "NegLatin"} present in ``tags``.

    Parameters such as (81, 40, 19, 20) match both templates.
    """
    return {t.split("(")[0] for t in tags if t.startswith(("Latin(", "NegLatin("))}


# ---------------------------------------------------------------------------
# certificates

@dataclass
class Certificate:
    group: dict
    size: int
    set_hash: str
    kind: str  # PDS, DS, NotRegular, NotPDS, NotDS
    params: Optional[tuple[int, ...]]
    type_tags: list[str]
    regular: bool
    census_checksum: str
    elapsed: float = 0.0
    hash_algorithm: str = HASH_ALGORITHM
    notes: list[str] = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.kind in ("PDS", "DS")

    def to_dict(self, with_time: bool = True) -> dict:
        d = {
            "group": self.group,
            "size": self.size,
            "set_hash": self.set_hash,
            "hash_algorithm": self.hash_algorithm,
            "kind": self.kind,
            "params": list(self.params) if self.params is not None else None,
            "type_tags": list(self.type_tags),
            "regular": self.regular,
            "census_checksum": self.census_checksum,
            "notes": list(self.notes),
        }
        if with_time:
            d["elapsed_s"] = round(self.elapsed, 6)
        return d


def verify_regularity(G: Group, S: ElementSet) -> bool:
    """Identity-free and inverse-closed."""
    _check_owner(G, S)
    return 0 not in S and S.is_inverse_closed()


def pds_parameters(G: Group, S: ElementSet, census: Census) -> Optional[tuple[int, int, int, int]]:
    inside = S.without_identity().mask
    outside = ~S.mask
    outside[0] = False
    ins, outs = census.counts[inside], census.counts[outside]
    if ins.size and (ins != ins[0]).any():
        return None
    if outs.size and (outs != outs[0]).any():
        return None
    lam = int(ins[0]) if ins.size else 0
    mu = int(outs[0]) if outs.size else 0
    return G.order, S.size, lam, mu


def verify_pds(G: Group, S: ElementSet, threads: Optional[int] = None) -> Certificate:
    """Census ``S`` and certify it as a ``(v,k,lambda,mu)``-PDS when the counts are
    constant on ``S - 1`` and on ``G - S - 1``."""
    _check_owner(G, S)
    t0 = time.perf_counter()
    census = difference_census(G, S, threads)
    regular = verify_regularity(G, S)
    notes: list[str] = []
    params = pds_parameters(G, S, census)
    if S.size == 0:
        kind, params = "NotPDS", (G.order, 0, 0, 0)
        notes.append("empty set: degenerate class with k = 0")
    elif S.size == G.order or 0 in S:
        kind = "NotPDS"
        notes.append("set contains the identity")
    elif not regular:
        kind = "NotRegular"  # still censused; params kept when the counts are constant
    elif params is None:
        kind = "NotPDS"
    else:
        kind = "PDS"
    tags = classify_parameters(params) if params is not None and kind == "PDS" else []
    if params is not None and kind == "PDS":
        v, k, lam, mu = params
        assert k * (k - 1) == lam * k + mu * (v - k - 1)
    return Certificate(G.descriptor(), S.size, set_hash(S), kind, params, tags, regular,
                       census.checksum(), time.perf_counter() - t0, notes=notes)


def verify_ds(G: Group, S: ElementSet, threads: Optional[int] = None) -> Certificate:
    """Certify ``S`` as a ``(v,k,lambda)``-DS when the census is constant off the identity."""
    _check_owner(G, S)
    t0 = time.perf_counter()
    census = difference_census(G, S, threads)
    rest = census.counts[1:]
    params = None
    kind = "NotDS"
    if S.size and rest.size and (rest == rest[0]).all():
        params = (G.order, S.size, int(rest[0]))
        kind = "DS"
        v, k, lam = params
        assert k * (k - 1) == lam * (v - 1)
    tags = classify_parameters(params) if params else []
    return Certificate(G.descriptor(), S.size, set_hash(S), kind, params, tags,
                       verify_regularity(G, S), census.checksum(), time.perf_counter() - t0)


def verify_skew_hadamard(G: Group, D: ElementSet, threads: Optional[int] = None) -> bool:
    """DS with ``G = {1} + D + D^(-1)`` as a disjoint union."""
    _check_owner(G, D)
    if 0 in D:
        return False
    Dinv = D.inverse()
    if not D.isdisjoint(Dinv) or D.size + Dinv.size + 1 != G.order:
        return False
    return verify_ds(G, D, threads).kind == "DS"


# ---------------------------------------------------------------------------
# partitions and schemes

@dataclass
class PartitionReport:
    cover_ok: bool
    problems: list[str]
    certificates: list[Certificate]
    labels: list[str]

    @property
    def ok(self) -> bool:
        # an empty class (allowed in degenerate three-class partitions) carries no parameters
        return self.cover_ok and all(c.ok or c.size == 0 for c in self.certificates)

    def to_dict(self, with_time: bool = True) -> dict:
        return {
            "cover_ok": self.cover_ok,
            "problems": self.problems,
            "classes": [{"label": lab, **c.to_dict(with_time)} for lab, c in zip(self.labels, self.certificates)],
        }


def verify_partition(G: Group, P, threads: Optional[int] = None) -> PartitionReport:
    """Disjoint cover of ``G - 1`` plus a PDS certificate per nonempty class."""
    problems = P.cover_problems()
    certs = [verify_pds(G, c, threads) for c in P.classes]
    return PartitionReport(not problems, problems, certs, list(P.labels))


@dataclass
class AmorphicReport:
    family: Optional[str]
    checked: int
    passed: int
    failures: list[list[str]]
    mode: str

    @property
    def ok(self) -> bool:
        return self.family is not None and self.checked == self.passed


def verify_amorphic(G: Group, P, mode: str = "all", samples: int = 0, seed: int = 0,
                    threads: Optional[int] = None) -> AmorphicReport:
    """Every (or a seeded sample of) nonempty proper fusion must be a PDS of the
    common Latin / negative Latin family."""
    nonempty = [i for i, c in enumerate(P.classes) if c.size]
    c = len(nonempty)
    common = {"Latin", "NegLatin"}
    for i in nonempty:
        cert = verify_pds(G, P.classes[i], threads)
        common &= type_families(cert.type_tags) if cert.kind == "PDS" else set()
    family = "Latin" if "Latin" in common else ("NegLatin" if common else None)
    if mode == "all":
        if c > 20:
            raise TooManyClasses(f"{c} classes: exhaustive fusion check infeasible")
        masks = range(1, (1 << c) - 1)
    else:
        rng = random.Random(seed)
        masks = [rng.randrange(1, (1 << c) - 1) for _ in range(samples)]
    checked = passed = 0
    failures = []
    for bits in masks:
        chosen = [nonempty[i] for i in range(c) if bits >> i & 1]
        fused = union_all(G, (P.classes[i] for i in chosen))
        cert = verify_pds(G, fused, threads)
        checked += 1
        if cert.kind == "PDS" and family in type_families(cert.type_tags):
            passed += 1
        else:
            failures.append([P.labels[i] for i in chosen])
    return AmorphicReport(family, checked, passed, failures, mode if mode == "all" else f"sample:{samples}:{seed}")


def _class_index(G: Group, P) -> np.ndarray:
    idx = np.full(G.order, -1, dtype=np.int64)
    idx[0] = 0
    for i, c in enumerate(P.classes):
        idx[c.mask] = i + 1
    return idx


def scheme_constants(G: Group, P, threads: Optional[int] = None) -> np.ndarray:
    """Intersection numbers ``p[i, j, k]`` (class 0 is the identity).

    ``p[i, j, k]`` is the coefficient of any element of class ``k`` in the
    group-ring product ``C_i C_j``; raises :class:`NotAScheme` when some
    product is not constant on a class.
    """
    classes = [G.subset([0])] + list(P.classes)
    labels = ["1"] + list(P.labels)
    nonempty = [i for i, c in enumerate(classes) if c.size]
    idx = _class_index(G, P)
    if (idx < 0).any():
        raise NotAScheme("classes do not cover the group", witness=int(np.argmin(idx)))
    n = len(classes)
    consts = np.zeros((n, n, n), dtype=np.int64)
    for i in nonempty:
        for j in nonempty:
            counts = convolution(G, classes[i], classes[j], threads).counts
            for k in nonempty:
                vals = counts[classes[k].mask]
                if (vals != vals[0]).any():
                    bad = int(classes[k].ids[np.argmax(vals != vals[0])])
                    raise NotAScheme(f"{labels[i]}*{labels[j]} not constant on {labels[k]}", witness=bad)
                consts[i, j, k] = vals[0]
    return consts


@dataclass
class MixedProductReport:
    i: str
    j: str
    coefficients: tuple[int, int, int]
    commutes: bool
    square_i: bool
    square_j: bool

    @property
    def ok(self) -> bool:
        return self.commutes and self.square_i and self.square_j


def _square_identity(G: Group, S: ElementSet, cert: Certificate, threads) -> bool:
    # S^2 = (k - mu) 1 + lambda S + mu (G - S)
    _, k, lam, mu = cert.params
    expected = np.full(G.order, mu, dtype=np.int64)
    expected[S.mask] = lam
    expected[0] += k - mu
    return bool(np.array_equal(convolution(G, S, S, threads).counts, expected))


def verify_mixed_product(G: Group, P, i: str, j: str, threads: Optional[int] = None) -> MixedProductReport:
    """Check ``P_i P_j + P_j P_i = a P_i + b P_j + c (G - 1 - P_i - P_j)`` with
    ``a = lam - lam_i - mu_j``, ``b = lam - mu_i - lam_j``, ``c = mu - mu_i - mu_j``
    (``lam, mu`` the parameters of ``P_i + P_j``), that ``P_i P_j = P_j P_i``,
    and the square identity for both classes."""
    if i == j:
        raise ValueError("need two distinct classes")
    A, B = P[i], P[j]
    ca, cb = verify_pds(G, A, threads), verify_pds(G, B, threads)
    cu = verify_pds(G, A | B, threads)
    for lab, c in ((i, ca), (j, cb), (f"{i}+{j}", cu)):
        if c.kind != "PDS":
            raise IdentityFails(f"{lab} is not a verified PDS")
    _, _, li, mi = ca.params
    _, _, lj, mj = cb.params
    _, _, lam, mu = cu.params
    a, b, c = lam - li - mj, lam - mi - lj, mu - mi - mj
    expected = np.full(G.order, c, dtype=np.int64)
    expected[A.mask] = a
    expected[B.mask] = b
    expected[0] = 0
    ab = convolution(G, A, B, threads).counts
    ba = convolution(G, B, A, threads).counts
    both = ab + ba
    if not np.array_equal(both, expected):
        g = int(np.argmax(both != expected))
        raise IdentityFails(f"{i}*{j} + {j}*{i} differs at element {g}", g, int(expected[g]), int(both[g]))
    return MixedProductReport(i, j, (a, b, c), bool(np.array_equal(ab, ba)),
                              _square_identity(G, A, ca, threads), _square_identity(G, B, cb, threads))
