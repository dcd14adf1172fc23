import json

import numpy as np
import pytest

from pdsforge.algebra import verify_ds, verify_partition, verify_pds
from pdsforge.constructions import (
    affine_abelian,
    affine_g1,
    affine_paley_q4,
    latin3_partitions,
    paley_field_set,
    semidirect_latin3,
    semidirect_paley,
    semidirect_scheme,
)
from pdsforge.errors import FiberNotClassUnion, NotPaleyType, NotSkewHadamard, SignatureMismatch, SizeMismatch
from pdsforge.groups import cyclic_group, direct_product
from pdsforge.products import (
    Recipe,
    certify,
    combine3,
    latin3_sizes,
    paley_product,
    product_set,
    recipe_extract,
    recipe_instantiate,
    stanton_sprott,
)

from conftest import naive_difference_counts


def _field(q):
    G, D, _ = paley_field_set(q)
    return G, D


def test_product_set_layout():
    G, H = cyclic_group(3), cyclic_group(5)
    P = direct_product(G, H)
    S = product_set(P, G.subset([1]), H.subset([2, 4]))
    assert sorted(P.split(int(x)) for x in S.ids) == [(1, 2), (1, 4)]


def test_paley_product_small():
    G, D = _field(5)
    H, E = _field(13)
    with pytest.raises(SizeMismatch):
        paley_product(G, D, H, E)
    P, S = paley_product(G, D, *_field(5))
    assert S.size == (25 - 1) // 2
    assert verify_pds(P, S).params == (25, 12, 5, 6)
    assert S.is_inverse_closed() and 0 not in S
    Z7, Q7 = _field(7)
    with pytest.raises(NotPaleyType):
        paley_product(Z7, Q7, Z7, Q7)


def test_paley_product_order_81_inputs():
    G, D = semidirect_paley(3, 2)
    H, E = affine_paley_q4(3)
    P, S = paley_product(G, D, H, E)
    c = verify_pds(P, S)
    assert c.params == (6561, 3280, 1639, 1640) and "PaleyType" in c.type_tags
    # both factors abelian: squares of GF(81) in Z_3^4, and Z_9^2
    B, DB = _field(81)
    A, DA = semidirect_paley(3, 2, twisted=False)
    P2, S2 = paley_product(B, DB, A, DA)
    assert verify_pds(P2, S2).params == (6561, 3280, 1639, 1640)


@pytest.mark.parametrize("left, right, expected", [(5, 3, (15, 7, 3)), (5, 7, (35, 17, 8))])
def test_stanton_sprott_desk_scale(left, right, expected):
    G, D = _field(left)
    H, E = _field(right)
    P, S = stanton_sprott(G, D, H, E)
    c = verify_ds(P, S)
    assert c.params == expected
    assert S.size == (P.order - 1) // 2
    # independent count
    counts = naive_difference_counts(P, S.ids)
    assert set(counts[1:].tolist()) == {expected[2]}


def test_stanton_sprott_errors():
    G, D = _field(5)
    with pytest.raises(SizeMismatch):
        stanton_sprott(G, D, *_field(11))
    G11, D11 = _field(11)
    with pytest.raises(NotPaleyType):
        stanton_sprott(G11, D11, *_field(13))
    Z7 = cyclic_group(7)
    with pytest.raises(NotSkewHadamard):
        stanton_sprott(G, D, Z7, Z7.subset([1, 2, 3]))


def test_stanton_sprott_order_6723():
    for G, D in (semidirect_paley(3, 2), affine_paley_q4(3)):
        P, S = stanton_sprott(G, D, *_field(83))
        assert verify_ds(P, S).params == (6723, 3361, 1680)


def test_certify_tiers():
    G, D = _field(5)
    P, S = stanton_sprott(G, D, *_field(7))
    pc = certify(P, S, "DS", 17)
    assert pc.tier == "census" and pc.ok
    pc2 = certify(P, S, "DS", 17, limit=10)
    assert pc2.tier == "constructed, not censused" and pc2.certificate is None and pc2.ok
    assert not certify(P, S, "DS", 18, limit=10).ok


def test_twin_prime_power_construction_only_tier():
    """Order-81^2 Paley product times squares mod 6563: far beyond a census,
    so only the structural invariants are checked."""
    G, D = paley_product(*semidirect_paley(3, 2), *semidirect_paley(3, 2))
    assert G.order == 6561
    P, S = stanton_sprott(G, D, *_field(6563))
    assert P.order == 6561 * 6563 == 43059843
    pc = certify(P, S, "DS", 21529921)
    assert pc.tier == "constructed, not censused" and pc.ok


def test_v_minus_two_construction_only_tier():
    G, D = semidirect_paley(3, 3)
    P, S = stanton_sprott(G, D, *_field(727))
    assert P.order == 529983
    pc = certify(P, S, "DS", 264991)
    assert pc.tier == "constructed, not censused" and pc.ok


def _abelian_product():
    A, P = semidirect_scheme(3, 2, twisted=False)
    _, D = semidirect_paley(3, 2, twisted=False)
    H, E = affine_paley_q4(3)
    X, S = paley_product(A, D, H, E)
    return A, P, H, X, S


def test_recipe_extract_instantiate():
    A, P, H, X, S = _abelian_product()
    R = recipe_extract(A, P, H, S)
    assert R.family == "Latin"
    assert R.fibers[0] == (1, 2, 3, 4, 5, 6)
    # identity substitution returns the original set
    _, back = recipe_instantiate(R, A, P, H)
    assert back == S
    # JSON round trip
    R2 = Recipe.from_dict(json.loads(json.dumps(R.to_dict())))
    assert R2 == R
    # substitute the twisted scheme
    Gh, Ph = semidirect_scheme(3, 2, twisted=True)
    X2, S2 = recipe_instantiate(R, Gh, Ph, H)
    assert S2.size == S.size
    assert verify_pds(X2, S2).params == verify_pds(X, S).params == (6561, 3280, 1639, 1640)


def test_recipe_trivial_fibre():
    G, P = affine_g1(3, 2, 1)
    H = cyclic_group(5)
    X = direct_product(G, H)
    S = product_set(X, P["D0"], H.subset([0]))
    R = recipe_extract(G, P, H, S)
    assert R.fibers == {0: (1,)}


def test_recipe_rejects_random_sets():
    A, P, H, X, S = _abelian_product()
    rng = np.random.default_rng(3)
    bad = X.subset(rng.choice(X.order, size=500, replace=False))
    with pytest.raises(FiberNotClassUnion) as err:
        recipe_extract(A, P, H, bad)
    assert err.value.fiber is not None and err.value.element is not None


def test_recipe_signature_mismatch():
    A, P, H, X, S = _abelian_product()
    R = recipe_extract(A, P, H, S)
    G1, P1 = affine_g1(3, 2, -1)
    with pytest.raises(SignatureMismatch):
        recipe_instantiate(R, G1, P1, H)
    with pytest.raises(SignatureMismatch):
        recipe_instantiate(R, A, P, cyclic_group(7))


def test_latin3_sizes():
    assert latin3_sizes(81, "L") == (32, 24, 24)
    assert latin3_sizes(81, "C") == (20, 30, 30)
    assert latin3_sizes(9, "C") == (0, 4, 4)
    with pytest.raises(SignatureMismatch):
        latin3_sizes(27, "L")


def test_combine3_lc():
    GL, L = affine_g1(3, 2, 1)
    GC, C = affine_g1(3, 2, -1)
    X, Z = combine3(GL, L, GC, C, "LC")
    assert X.order == 6561 and Z.sizes == (2132, 2214, 2214)
    rep = verify_partition(X, Z)
    assert rep.ok
    assert all(any(t.startswith("NegLatin(81,") for t in c.type_tags) for c in rep.certificates)
    GA, LA = affine_abelian(3, 2, 1)
    assert combine3(GA, LA, GC, C, "LC")[1].sizes == (2132, 2214, 2214)


def test_combine3_small_and_modes():
    L, C = latin3_partitions()
    G = L.owner
    X, Z = combine3(G, L, G, C, "LC")
    assert Z.sizes == (20, 30, 30)
    assert all("NegLatin(9" in " ".join(c.type_tags) for c in verify_partition(X, Z).certificates)
    for mode, A, B in (("LL", L, L), ("CC", C, C)):
        X, Z = combine3(G, A, G, B, mode)
        rep = verify_partition(X, Z)
        assert rep.ok
        assert all(any(t.startswith("Latin(9,") for t in c.type_tags) for c in rep.certificates)
    with pytest.raises(SignatureMismatch):
        combine3(G, C, G, L, "LC")


def test_combine3_latin_modes_at_81():
    GL, L = semidirect_latin3(3, 2)
    GC, C = affine_g1(3, 2, -1)
    for mode, (a, A), (b, B) in (("LL", (GL, L), (GL, L)), ("CC", (GC, C), (GC, C))):
        X, Z = combine3(a, A, b, B, mode)
        rep = verify_partition(X, Z)
        assert rep.ok and Z.sizes == (2240, 2160, 2160)
        assert all(any(t.startswith("Latin(81,") for t in c.type_tags) for c in rep.certificates)
