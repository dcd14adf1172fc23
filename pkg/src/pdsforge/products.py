"""Product constructions on ``G x G'``: Paley-type products, the twin
prime power (Stanton-Sprott) difference sets, recipe extraction and
substitution, and the three-class combination formulas for 3-groups.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .algebra import Certificate, type_families, verify_ds, verify_pds, verify_skew_hadamard
from .constructions import PartitionScheme
from .errors import (
    FiberNotClassUnion,
    HandleMismatch,
    NotPaleyType,
    NotSkewHadamard,
    SignatureMismatch,
    SizeMismatch,
)
from .groups import DirectProduct, ElementSet, Group, direct_product

CENSUS_LIMIT = 10 ** 4


def product_set(P: DirectProduct, A: ElementSet, B: ElementSet) -> ElementSet:
    """``A x B`` inside ``P = G x G'``."""
    if not (P.left.same_as(A.owner) and P.right.same_as(B.owner)):
        raise HandleMismatch("factor sets do not match the product's factors")
    # index = i_G + |G| i_H, so rows are indexed by i_H
    return ElementSet(P, np.outer(B.mask, A.mask).ravel())


def _point(G: Group) -> ElementSet:
    return G.subset([0])


def _is_paley(G: Group, D: ElementSet, threads=None) -> bool:
    cert = verify_pds(G, D, threads)
    return cert.kind == "PDS" and "PaleyType" in cert.type_tags


def paley_product(G: Group, D: ElementSet, H: Group, E: ElementSet,
                  check: bool = True, threads=None) -> tuple[DirectProduct, ElementSet]:
    """``D(1 + E) + D^c(1 + E^c)`` for Paley-type ``D`` in G and ``E`` in H, |G| = |H|."""
    if G.order != H.order:
        raise SizeMismatch(f"|G| = {G.order} but |G'| = {H.order}")
    if check and not (_is_paley(G, D, threads) and _is_paley(H, E, threads)):
        raise NotPaleyType("both inputs must be Paley-type PDSs")
    P = direct_product(G, H)
    Dc, Ec = D.complement(), E.complement()
    one = _point(H)
    out = (product_set(P, D, one) | product_set(P, D, E)
           | product_set(P, Dc, one) | product_set(P, Dc, Ec))
    return P, out


def stanton_sprott(G: Group, D: ElementSet, H: Group, E: ElementSet,
                   check: bool = True, threads=None) -> tuple[DirectProduct, ElementSet]:
    """Twin prime power difference set in ``G x H``.

    ``D`` is Paley-type in G (order v) and ``E`` skew Hadamard in H (order
    v + 2 or v - 2). The result is ``S x 1 + D x E + D^c x E^(-1)`` where the
    first term is ``G x {1}`` when |H| = v + 2 and ``{1} x H`` when |H| = v - 2
    (the smaller factor supplies the whole-group term).
    """
    v = G.order
    if H.order not in (v + 2, v - 2):
        raise SizeMismatch(f"|G'| must be {v} +/- 2, got {H.order}")
    if check:
        if not _is_paley(G, D, threads):
            raise NotPaleyType("left input must be a Paley-type PDS")
        if not verify_skew_hadamard(H, E, threads):
            raise NotSkewHadamard("right input must be a skew Hadamard difference set")
    P = direct_product(G, H)
    if H.order == v + 2:
        base = product_set(P, G.full(), _point(H))
    else:
        base = product_set(P, _point(G), H.full())
    out = base | product_set(P, D, E) | product_set(P, D.complement(), E.inverse())
    return P, out


@dataclass
class ProductCertificate:
    tier: str  # "census" or "constructed, not censused"
    certificate: Optional[Certificate]
    size: int
    expected_size: int
    identity_free: Optional[bool]

    @property
    def ok(self) -> bool:
        if self.size != self.expected_size:
            return False
        return self.certificate.ok if self.certificate is not None else True

    def to_dict(self, with_time: bool = True) -> dict:
        return {
            "tier": self.tier,
            "size": self.size,
            "expected_size": self.expected_size,
            "identity_free": self.identity_free,
            "certificate": self.certificate.to_dict(with_time) if self.certificate else None,
        }


def certify(G: Group, S: ElementSet, kind: str, expected_size: int, threads=None,
            limit: int = CENSUS_LIMIT) -> ProductCertificate:
    """Full census up to ``limit`` elements, size/identity checks beyond."""
    if G.order <= limit:
        cert = verify_pds(G, S, threads) if kind == "PDS" else verify_ds(G, S, threads)
        return ProductCertificate("census", cert, S.size, expected_size, 0 not in S)
    return ProductCertificate("constructed, not censused", None, S.size, expected_size, 0 not in S)


# ---------------------------------------------------------------------------
# recipes: a PDS in G x G' written fibrewise in terms of a partition of G

def class_signature(G: Group, P: PartitionScheme, threads=None) -> list[tuple[int, ...]]:
    """Parameters per class, identity class first as ``(v, 1, 0, 0)``."""
    sig = [(G.order, 1, 0, 0)]
    for c in P.classes:
        cert = verify_pds(G, c, threads)
        if c.size == 0:
            sig.append((G.order, 0, 0, 0))
        elif cert.kind != "PDS":
            raise SignatureMismatch(f"class of size {c.size} is not a PDS")
        else:
            sig.append(tuple(cert.params))
    return sig


def _family(G: Group, P: PartitionScheme, threads=None) -> Optional[str]:
    common = {"Latin", "NegLatin"}
    for c in P.classes:
        if c.size:
            common &= type_families(verify_pds(G, c, threads).type_tags)
    if "Latin" in common:
        return "Latin"
    return "NegLatin" if common else None


@dataclass
class Recipe:
    signature: list[tuple[int, ...]]
    family: Optional[str]
    right_order: int
    fibers: dict[int, tuple[int, ...]]  # x' -> class indices (0 = identity class)

    def to_dict(self) -> dict:
        return {
            "signature": [list(s) for s in self.signature],
            "family": self.family,
            "right_order": self.right_order,
            "fibers": [[x, list(cls)] for x, cls in sorted(self.fibers.items())],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Recipe":
        return cls([tuple(s) for s in d["signature"]], d.get("family"), d["right_order"],
                   {int(x): tuple(c) for x, c in d["fibers"]})


def recipe_extract(G: Group, P: PartitionScheme, H: Group, D: ElementSet, threads=None) -> Recipe:
    """Write each fibre ``{g : (g, x') in D}`` as a union of classes of ``{1} + P``."""
    if not (isinstance(D.owner, DirectProduct) and D.owner.left.same_as(G) and D.owner.right.same_as(H)):
        raise HandleMismatch("set does not live in G x G'")
    cls = P.class_index()
    n_classes = len(P.classes) + 1
    grid = D.mask.reshape(H.order, G.order)
    fibers: dict[int, tuple[int, ...]] = {}
    for x in np.flatnonzero(grid.any(axis=1)):
        row = grid[x]
        hit = np.bincount(cls[row], minlength=n_classes)
        sizes = np.bincount(cls, minlength=n_classes)
        partial = np.flatnonzero((hit > 0) & (hit < sizes))
        if partial.size:
            c = int(partial[0])
            g = int(np.flatnonzero(row & (cls == c))[0])
            raise FiberNotClassUnion(f"fibre at {int(x)} splits class {c}", fiber=int(x), element=g)
        fibers[int(x)] = tuple(int(c) for c in np.flatnonzero(hit))
    return Recipe(class_signature(G, P, threads), _family(G, P, threads), H.order, fibers)


def recipe_instantiate(R: Recipe, G: Group, P: PartitionScheme, H: Group,
                       threads=None) -> tuple[DirectProduct, ElementSet]:
    """Replace each class by its counterpart in ``P`` (same parameters, same order)."""
    if H.order != R.right_order:
        raise SignatureMismatch(f"recipe expects |G'| = {R.right_order}, got {H.order}")
    sig = class_signature(G, P, threads)
    if sig != R.signature:
        raise SignatureMismatch(f"class parameters {sig} differ from recipe {R.signature}")
    fam = _family(G, P, threads)
    if fam is None or fam != R.family:
        raise SignatureMismatch(f"partition family {fam} differs from recipe {R.family}")
    classes = [_point(G)] + list(P.classes)
    prod = direct_product(G, H)
    grid = np.zeros((H.order, G.order), dtype=bool)
    for x, idx in R.fibers.items():
        for c in idx:
            grid[x] |= classes[c].mask
    return prod, ElementSet(prod, grid.ravel())


# ---------------------------------------------------------------------------
# three-class combinations for 3-groups

def latin3_sizes(order: int, kind: str) -> tuple[int, int, int]:
    """Class sizes of a three-class (negative) Latin partition of a group of order 3^{2m}."""
    m = 0
    while 9 ** m < order:
        m += 1
    if 9 ** m != order or m < 1:
        raise SignatureMismatch(f"order {order} is not 3^(2m)")
    a, b = 3 ** (m - 1), 3 ** m
    if kind == "L":
        return ((a + 1) * (b - 1), a * (b - 1), a * (b - 1))
    return ((a - 1) * (b + 1), a * (b + 1), a * (b + 1))


MODES = {"LC": ("L", "C", "NegLatin"), "LL": ("L", "L", "Latin"), "CC": ("C", "C", "Latin")}


def combine3(G: Group, A: PartitionScheme, H: Group, B: PartitionScheme,
             mode: str) -> tuple[DirectProduct, PartitionScheme]:
    """Three classes of ``G x H`` from three-class partitions ``A`` and ``B``.

    With ``X = A``, ``Y = B`` (identity added to the zeroth classes)::

        Z0 = (X0+1)(Y0+1) + X1 Y1 + X2 Y2 - 1
        Z1 = (X0+1) Y1 + X1 Y2 + X2 (Y0+1)
        Z2 = (X0+1) Y2 + X1 (Y0+1) + X2 Y1
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {sorted(MODES)}")
    left_kind, right_kind, result_family = MODES[mode]
    if len(A) != 3 or len(B) != 3:
        raise SignatureMismatch("both partitions need exactly three classes")
    if A.sizes != latin3_sizes(G.order, left_kind):
        raise SignatureMismatch(f"left sizes {A.sizes} do not fit a {left_kind} partition")
    if B.sizes != latin3_sizes(H.order, right_kind):
        raise SignatureMismatch(f"right sizes {B.sizes} do not fit a {right_kind} partition")
    P = direct_product(G, H)
    X0, X1, X2 = A.classes
    Y0, Y1, Y2 = B.classes
    X0e, Y0e = X0.with_identity(), Y0.with_identity()
    x = lambda S, T: product_set(P, S, T)
    Z0 = (x(X0e, Y0e) | x(X1, Y1) | x(X2, Y2)).without_identity()
    Z1 = x(X0e, Y1) | x(X1, Y2) | x(X2, Y0e)
    Z2 = x(X0e, Y2) | x(X1, Y0e) | x(X2, Y1)
    prefix = "C" if result_family == "NegLatin" else "L"
    meta = {"construction": f"combine3-{mode}", "expected_family": result_family,
            "left": A.meta.get("construction"), "right": B.meta.get("construction")}
    if "C" in (left_kind, right_kind):
        meta["notes"] = ["C-type inputs are taken with negative Latin sizes ((a-1)(b+1), a(b+1), a(b+1)); "
                         "the printed hypothesis calls them Latin type"]
    return P, PartitionScheme(P, [Z0, Z1, Z2], [f"{prefix}{i}hat" for i in range(3)], meta).validate()
