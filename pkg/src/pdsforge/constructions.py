"""Concrete groups and labelled partitions: affine polar twists, the
``(q+3)``-class scheme, the ``2p``-class semidirect schemes, Paley sets and
the small ``Z_3^2`` partitions.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .errors import BadParameters, PartitionFailure
from .field import GF, gf, prime_power
from .groups import (
    AbelianGroup,
    AffineGroup,
    ElementSet,
    Group,
    SemidirectGroup,
    abelian_group,
    semidirect_group,
    union_all,
)
from .quadform import QuadForm, mat_mul


@dataclass
class PartitionScheme:
    """Labelled classes partitioning ``G - {1}`` (empty classes allowed)."""

    owner: Group
    classes: list[ElementSet]
    labels: list[str]
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if len(self.classes) != len(self.labels):
            raise ValueError("one label per class")

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, label: str) -> ElementSet:
        return self.classes[self.labels.index(label)]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(c.size for c in self.classes)

    def cover_problems(self) -> list[str]:
        """Empty list iff the classes are disjoint, identity-free and cover G - 1."""
        problems = []
        count = np.zeros(self.owner.order, dtype=np.int64)
        for lab, c in zip(self.labels, self.classes):
            if not c.owner.same_as(self.owner):
                problems.append(f"class {lab} belongs to {c.owner.spec}")
                continue
            count += c.mask
        if count[0]:
            problems.append("identity lies in a class")
        if (count[1:] > 1).any():
            problems.append(f"{int((count[1:] > 1).sum())} elements lie in several classes")
        if (count[1:] == 0).any():
            problems.append(f"{int((count[1:] == 0).sum())} nonidentity elements uncovered")
        return problems

    def validate(self) -> "PartitionScheme":
        problems = self.cover_problems()
        if problems:
            raise PartitionFailure("; ".join(problems))
        return self

    def union(self, labels: Sequence[str]) -> ElementSet:
        return union_all(self.owner, (self[lab] for lab in labels))

    def class_index(self) -> np.ndarray:
        """Class number per element: 0 for the identity, ``i+1`` for ``classes[i]``."""
        idx = np.full(self.owner.order, -1, dtype=np.int64)
        idx[0] = 0
        for i, c in enumerate(self.classes):
            idx[c.mask] = i + 1
        return idx

    def fuse(self, groups: Sequence[Sequence[str]], labels: Optional[Sequence[str]] = None) -> "PartitionScheme":
        labels = list(labels) if labels else ["+".join(g) for g in groups]
        return PartitionScheme(self.owner, [self.union(g) for g in groups], labels,
                               {**self.meta, "fused_from": [list(g) for g in groups]}).validate()


# ---------------------------------------------------------------------------
# affine polar twists

def _embed(block: np.ndarray, n: int, at_end: bool) -> np.ndarray:
    M = np.eye(n, dtype=np.int64)
    k = block.shape[0]
    if at_end:
        M[n - k:, n - k:] = block
    else:
        M[:k, :k] = block
    return M


def c_matrix(F: GF, a: int, eps: int) -> np.ndarray:
    """4x4 block ``C_a`` for the hyperbolic (eps=+1) or elliptic (eps=-1) form."""
    neg, mul = F.neg, F.mul
    if eps == 1:
        rows = [[1, 0, 0, a],
                [0, 1, 0, neg(a)],
                [a, neg(a), 1, mul(a, a)],
                [0, 0, 0, 1]]
    else:
        two = F.add(1, 1)
        rows = [[1, neg(mul(a, a)), a, 0],
                [0, 1, 0, 0],
                [0, neg(mul(two, a)), 1, 0],
                [0, 0, 0, 1]]
    return np.array(rows, dtype=np.int64)


def b_matrix(F: GF, a: int) -> np.ndarray:
    """4x4 block ``B_a``: e2 -> e2 - a e3, e4 -> a e1 + e4."""
    return np.array([[1, 0, 0, 0],
                     [0, 1, F.neg(a), 0],
                     [0, 0, 1, 0],
                     [a, 0, 0, 1]], dtype=np.int64)


def _field_params(q: int, m: int, eps: int) -> GF:
    try:
        p, _ = prime_power(q)
    except ValueError as exc:
        raise BadParameters(str(exc)) from exc
    if p == 2:
        raise BadParameters("q must be odd")
    if m < 2:
        raise BadParameters(f"m must be >= 2, got {m}")
    if eps not in (1, -1):
        raise BadParameters(f"eps must be +1 or -1, got {eps}")
    return gf(q)


def _spec(family: str, F: GF, *params) -> str:
    s = ":".join([family, str(F.q)] + [str(x) for x in params])
    if F.e > 1:
        s += ":mod=" + ",".join(map(str, F.modulus))
    return s


def _eps_str(eps: int) -> str:
    return "+1" if eps == 1 else "-1"


def _qf_partition(G: Group, Q: QuadForm, meta: dict) -> PartitionScheme:
    cls = Q.class_table()
    D0 = cls == 0
    D0[0] = False
    classes = [ElementSet(G, D0), ElementSet(G, cls == 1), ElementSet(G, cls == -1)]
    return PartitionScheme(G, classes, ["D0", "D1", "D2"], meta).validate()


def _affine_group(F: GF, Q: QuadForm, blocks, functional, spec, description, meta) -> AffineGroup:
    mats = np.stack(blocks)
    G = AffineGroup(F, mats, functional, spec, description, meta)
    G.form = Q
    return G


def g1_setup(q: int, m: int, eps: int):
    """Matrices ``A_a``, anchor ``v`` and invariant coordinate functional for G1."""
    F = _field_params(q, m, eps)
    Q = QuadForm(F, m, eps)
    n = 2 * m
    if m == 2:
        blocks = [c_matrix(F, a, eps) for a in range(F.q)]
        # elliptic: e2 is singular and has no H-invariant complement; e4 is the
        # nonsingular fixed vector whose perp is invariant
        anchor = np.add(Q.basis_vector(1), Q.basis_vector(2)) if eps == 1 else Q.basis_vector(4)
    else:
        blocks = [_embed(b_matrix(F, a), n, at_end=False) for a in range(F.q)]
        anchor = tuple(np.add(Q.basis_vector(5), Q.basis_vector(6)))
    anchor = tuple(int(c) for c in anchor)
    Qv = Q.evaluate(anchor)
    if Qv == 0:
        raise BadParameters(f"anchor {anchor} is singular")
    scale = F.inv(Q.bilinear(anchor, anchor))
    # alpha(x) = beta(x, v) / beta(v, v)
    functional = [F.mul(scale, Q.bilinear(Q.basis_vector(i + 1), anchor)) for i in range(n)]
    return F, Q, blocks, anchor, functional


def affine_g1(q: int, m: int, eps: int) -> tuple[AffineGroup, PartitionScheme]:
    F, Q, blocks, anchor, functional = g1_setup(q, m, eps)
    meta = {"family": "affine-g1", "q": q, "m": m, "eps": eps, "anchor": list(anchor),
            "matrices": "C" if m == 2 else "B"}
    spec = _spec("affine-g1", F, m, _eps_str(eps))
    G = _affine_group(F, Q, blocks, functional, spec, f"G1^{_eps_str(eps)}({q},{m})", meta)
    G.anchor = anchor
    return G, _qf_partition(G, Q, {"construction": "affine-g1", **meta})


def affine_g2(q: int, m: int, eps: int = 1) -> tuple[AffineGroup, PartitionScheme]:
    F = _field_params(q, m, eps)
    if m == 2 and eps == -1:
        raise BadParameters("G2 needs m > 2 or a hyperbolic form when m = 2")
    Q = QuadForm(F, m, eps)
    n = 2 * m
    blocks = [_embed(b_matrix(F, a), n, at_end=False) for a in range(F.q)]
    functional = [0] * n
    functional[1] = 1  # alpha is the e2-coordinate
    meta = {"family": "affine-g2", "q": q, "m": m, "eps": eps}
    spec = _spec("affine-g2", F, m, _eps_str(eps))
    G = _affine_group(F, Q, blocks, functional, spec, f"G2({q},{m})", meta)
    return G, _qf_partition(G, Q, {"construction": "affine-g2", **meta})


def affine_abelian(q: int, m: int, eps: int) -> tuple[AbelianGroup, PartitionScheme]:
    """The same three classes in the translation group ``T_V``."""
    F = _field_params(q, m, eps)
    Q = QuadForm(F, m, eps)
    G = abelian_group([F.p] * (F.e * 2 * m))
    G.form = Q
    meta = {"construction": "affine-abelian", "q": q, "m": m, "eps": eps}
    return G, _qf_partition(G, Q, meta)


def affine_checks(G: AffineGroup) -> dict:
    """Exhaustive structural checks for an affine construction.

    * every ``A_a`` is an isometry of the form;
    * ``A_a A_c = A_{a+c}``;
    * the coordinate functional is invariant (``f(x A_c) = f(x)``), which is
      what makes ``{[A_{f(x)}, x]}`` closed;
    * the index -> translation map is a bijection onto V (holds by encoding,
      re-checked through the regular action ``0^g = x``).
    """
    F, Q = G.field, G.form
    q = F.q
    isometry = all(Q.is_isometry(G.matrices[a]) for a in range(q))
    additive = all(
        np.array_equal(mat_mul(F, G.matrices[a], G.matrices[c]), G.matrices[F.add(a, c)])
        for a in range(q) for c in range(q)
    )
    invariant = all(np.array_equal(G.alpha[G.act[c]], G.alpha) for c in range(q))
    identity_block = np.array_equal(G.matrices[0], np.eye(G.dim, dtype=np.int64))
    # 0^{[A, x]} = x, so the translation part of each element is its index
    regular = np.array_equal(np.sort(G.vadd(G.act[G.alpha, 0], G.elements())), G.elements())
    return {"isometry": isometry, "additive": additive, "functional_invariant": invariant,
            "identity_block": identity_block, "regular": bool(regular)}


def _span2(G: AffineGroup, a: Sequence[int], b: Sequence[int]) -> ElementSet:
    F = G.field
    ids = []
    for s in range(F.q):
        for t in range(F.q):
            vec = [F.add(F.mul(s, x), F.mul(t, y)) for x, y in zip(a, b)]
            ids.append(G.vec_index(vec))
    return G.subset(ids).without_identity()


def affine_scheme_q4(q: int) -> tuple[AffineGroup, PartitionScheme]:
    """D1, D2 and the ``q + 1`` totally singular planes ``U_inf, U_0, ..., U_{q-1}``."""
    G, base = affine_g2(q, 2, 1)
    F = G.field
    e = lambda i: [1 if j == i - 1 else 0 for j in range(4)]
    classes = [base["D1"], base["D2"], _span2(G, e(4), e(1))]
    labels = ["D1", "D2", "U_inf"]
    for a in range(F.q):
        v_a = [0, 1, 0, a]
        u_a = [a, 0, F.neg(1), 0]
        classes.append(_span2(G, v_a, u_a))
        labels.append(f"U_{a}")
    scheme = PartitionScheme(G, classes, labels, {"construction": "affine-scheme-q4", "q": q})
    return G, scheme.validate()


def affine_paley_q4(q: int) -> tuple[AffineGroup, ElementSet]:
    G, scheme = affine_scheme_q4(q)
    planes = [lab for lab in scheme.labels if lab.startswith("U_")][: (q + 1) // 2]
    return G, scheme.union(["D1"] + planes)


# ---------------------------------------------------------------------------
# Z_{p^t} x Z_{p^t} and its twisted analogue

def _check_pt(p: int, t: int) -> None:
    from .field import is_prime

    if not is_prime(p) or p == 2:
        raise BadParameters(f"p must be an odd prime, got {p}")
    if t < 2:
        raise BadParameters(f"t must be >= 2, got {t}")


def pt_group(p: int, t: int, twisted: bool) -> Group:
    _check_pt(p, t)
    n = p ** t
    return semidirect_group(p, t) if twisted else abelian_group([n, n])


def _xy(G: Group, n: int, a: int, b: int) -> int:
    return a % n + n * (b % n)


def latin_p_class(G: Group, p: int, t: int, i: int) -> ElementSet:
    """``P_{t,i}``: the union over r, j, k of cyclic-subgroup differences,
    with the ``<x^{ip^r+jp} y>`` term taken inside the j-union."""
    n = p ** t
    cyc = lambda a, b: G.cyclic_subgroup(_xy(G, n, a, b))
    out = G.empty()
    for r in range(1, t):
        for j in range(p ** (r - 1)):
            for k in range(p):
                out = out | (cyc(1, i * p ** r + p * j + k)
                             - cyc(p ** (t - r), j * p ** (t + 1 - r) + k * p ** (t - r)))
            out = out | (cyc(i * p ** r + j * p, 1) - cyc(j * p ** (t - r + 1), p ** (t - r)))
    return out


def latin_p_blocks(G: Group, p: int, i: int) -> tuple[list[ElementSet], ElementSet]:
    """The t = 2 pieces of ``P_i``: ``<x y^{ip+j}> - <x^p y^{pj}>`` for each j,
    and ``<x^{ip} y> - <y^p>``."""
    n = p * p
    cyc = lambda a, b: G.cyclic_subgroup(_xy(G, n, a, b))
    blocks = [cyc(1, i * p + j) - cyc(p, p * j) for j in range(p)]
    return blocks, cyc(i * p, 1) - cyc(0, p)


def order_p_subgroup(G: Group, p: int, t: int = 2) -> ElementSet:
    """``<x^{p^(t-1)}, y^{p^(t-1)}>``."""
    n = p ** t
    return G.generated_subgroup([_xy(G, n, n // p, 0), _xy(G, n, 0, n // p)])


def semidirect_scheme(p: int, t: int, twisted: bool = True) -> tuple[Group, PartitionScheme]:
    G = pt_group(p, t, twisted)
    n = p ** t
    classes, labels = [], []
    for i in range(1, p):
        classes.append(latin_p_class(G, p, t, i))
        labels.append(f"P{i}")
    for j in range(p):
        classes.append(G.cyclic_subgroup(_xy(G, n, 1, j)).without_identity())
        labels.append(f"S{j}")
    classes.append(G.cyclic_subgroup(_xy(G, n, 0, 1)).without_identity())
    labels.append("Sinf")
    meta = {"construction": "semidirect-scheme", "p": p, "t": t, "twisted": twisted}
    return G, PartitionScheme(G, classes, labels, meta).validate()


def semidirect_paley(p: int, t: int, twisted: bool = True) -> tuple[Group, ElementSet]:
    G, scheme = semidirect_scheme(p, t, twisted)
    half = (p - 1) // 2
    labels = [f"P{i}" for i in range(1, half + 1)] + [f"S{j}" for j in range(half + 1)]
    return G, scheme.union(labels)


def semidirect_latin3(p: int, t: int, twisted: bool = True) -> tuple[Group, PartitionScheme]:
    """Three-class fusion of the p = 3 scheme with sizes (32, 24, 24) at t = 2:
    ``L0 = P1 + S0``, ``L1 = P2``, ``L2 = S1 + S2 + Sinf``."""
    if p != 3:
        raise BadParameters("the three-class fusion is defined for p = 3")
    G, scheme = semidirect_scheme(p, t, twisted)
    return G, scheme.fuse([["P1", "S0"], ["P2"], ["S1", "S2", "Sinf"]], ["L0", "L1", "L2"])


# ---------------------------------------------------------------------------
# small classical inputs

def paley_field_set(q: int) -> tuple[AbelianGroup, ElementSet, str]:
    """Nonzero squares in the additive group of GF(q); kind "PDS" or "DS"."""
    try:
        p, e = prime_power(q)
    except ValueError as exc:
        raise BadParameters(str(exc)) from exc
    if p == 2:
        raise BadParameters("q must be odd")
    F = gf(q)
    G = abelian_group([p] * e)
    D = ElementSet(G, F.sq_table == 1)
    return G, D, ("PDS" if q % 4 == 1 else "DS")


def latin3_partitions() -> tuple[PartitionScheme, PartitionScheme]:
    """Latin (L0, L1, L2) and negative Latin (C0, C1, C2) partitions of Z_3^2."""
    G = abelian_group([3, 3])
    ix = lambda a, b: G.index((a, b))
    H1 = G.subset([ix(1, 0), ix(2, 0)])
    H2 = G.subset([ix(1, 1), ix(2, 2)])
    H3 = G.subset([ix(1, 2), ix(2, 1)])
    H4 = G.subset([ix(0, 1), ix(0, 2)])
    L = PartitionScheme(G, [H3 | H4, H1, H2], ["L0", "L1", "L2"], {"construction": "latin3-L"})
    C = PartitionScheme(G, [G.empty(), H1 | H2, H3 | H4], ["C0", "C1", "C2"], {"construction": "latin3-C"})
    return L.validate(), C.validate()
