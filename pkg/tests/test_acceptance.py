"""Acceptance criteria, one test each, all exact (zero tolerance).

Each test prints a single ``CRITERION n: PASS/FAIL`` line with its wall
time and bound, straight to the terminal so the lines show up in plain
``pytest -v`` output.
"""
import contextlib
import json
import time

import numpy as np
import pytest

from pdsforge.algebra import (
    convolution,
    difference_census,
    verify_amorphic,
    verify_ds,
    verify_mixed_product,
    verify_partition,
    verify_pds,
)
from pdsforge.cli import main
from pdsforge.constructions import (
    affine_abelian,
    affine_checks,
    affine_g1,
    affine_g2,
    affine_paley_q4,
    affine_scheme_q4,
    latin_p_blocks,
    order_p_subgroup,
    paley_field_set,
    semidirect_paley,
    semidirect_scheme,
)
from pdsforge.field import gf
from pdsforge.products import (
    certify,
    combine3,
    paley_product,
    recipe_extract,
    recipe_instantiate,
    stanton_sprott,
)


@pytest.fixture
def criterion(capsys):
    @contextlib.contextmanager
    def run(n, title, bound=None):
        t0 = time.perf_counter()
        ok = False
        try:
            yield
            ok = True
        finally:
            dt = time.perf_counter() - t0
            in_time = bound is None or dt < bound
            status = "PASS" if ok and in_time else "FAIL"
            limit = f" < {bound:g} s" if bound is not None else ""
            with capsys.disabled():
                print(f"\nCRITERION {n:>2}: {status}  {title}  [{dt:.2f} s{limit}]")
        assert in_time, f"criterion {n} took {dt:.2f} s, bound {bound} s"
    return run


def params(G, S):
    c = verify_pds(G, S)
    assert c.kind == "PDS", c.kind
    return tuple(c.params)


def strip_time(text):
    return "\n".join(l for l in text.splitlines() if '"wall_time_s"' not in l)


def test_criterion_01_affine_g1_latin(criterion):
    with criterion(1, "affine G1, hyperbolic: (32,24,24) classes", 1.0):
        G, P = affine_g1(3, 2, 1)
        assert P.sizes == (32, 24, 24)
        assert [params(G, c) for c in P.classes] == [(81, 32, 13, 12), (81, 24, 9, 6), (81, 24, 9, 6)]


def test_criterion_02_affine_g1_negative_latin(criterion):
    with criterion(2, "affine G1, elliptic: (20,30,30) classes", 1.0):
        G, P = affine_g1(3, 2, -1)
        assert P.sizes == (20, 30, 30)
        assert [params(G, c) for c in P.classes] == [(81, 20, 1, 6), (81, 30, 9, 12), (81, 30, 9, 12)]


def test_criterion_03_nonisomorphism_probes(criterion):
    with criterion(3, "centre orders 3 and 9, exponent 3, both nonabelian", 1.0):
        G1, _ = affine_g1(3, 2, 1)
        G2, _ = affine_g2(3, 2)
        assert G1.center().size == 3
        assert G2.center().size == 9
        assert not G1.is_abelian() and not G2.is_abelian()
        assert G2.exponent() == 3


def test_criterion_04_twisted_semidirect_scheme(criterion):
    with criterion(4, "twisted semidirect scheme, 62 fusions, Paley union", 5.0):
        G, P = semidirect_scheme(3, 2, twisted=True)
        assert len(P) == 6 and P.sizes == (24, 24, 8, 8, 8, 8)
        for lab in ("P1", "P2"):
            assert params(G, P[lab]) == (81, 24, 9, 6)
        for lab in ("S0", "S1", "S2", "Sinf"):
            assert params(G, P[lab]) == (81, 8, 7, 0)
        rep = verify_amorphic(G, P, "all")
        assert (rep.checked, rep.passed, rep.family) == (62, 62, "Latin")
        _, D = semidirect_paley(3, 2, twisted=True)
        assert params(G, D) == (81, 40, 19, 20)


def test_criterion_05_general_t(criterion):
    with criterion(5, "t = 3: exact cover, (729,312,135,132) classes, (729,364,181,182) union", 30.0):
        G, P = semidirect_scheme(3, 3, twisted=True)
        assert not P.cover_problems()
        assert params(G, P["P1"]) == (729, 312, 135, 132)
        assert params(G, P["P2"]) == (729, 312, 135, 132)
        _, D = semidirect_paley(3, 3, twisted=True)
        assert params(G, D) == (729, 364, 181, 182)


def test_criterion_06_q_plus_3_scheme(criterion):
    with criterion(6, "(q+3)-class scheme at q = 3 and Paley sets at q = 3, 5", 10.0):
        G, P = affine_scheme_q4(3)
        assert len(P) == 6 and P.sizes == (24, 24, 8, 8, 8, 8)
        rep = verify_amorphic(G, P, "all")
        assert (rep.checked, rep.passed) == (62, 62)
        assert params(*affine_paley_q4(3)) == (81, 40, 19, 20)
        assert params(*affine_paley_q4(5)) == (625, 312, 155, 156)


def test_criterion_07_paley_product(criterion):
    with criterion(7, "Paley product of two order-81 Paley sets", 60.0):
        G, D = semidirect_paley(3, 2, twisted=True)
        H, E = affine_paley_q4(3)
        P, S = paley_product(G, D, H, E)
        v = 81
        template = (v * v, (v * v - 1) // 2, (v * v - 5) // 4, (v * v - 1) // 4)
        assert template == (6561, 3280, 1639, 1640)
        pc = certify(P, S, "PDS", template[1])
        assert pc.tier == "census" and pc.ok
        assert tuple(pc.certificate.params) == template


def test_criterion_08_twin_prime_power(criterion):
    with criterion(8, "(6723,3361,1680) difference sets with both order-81 factors", 120.0):
        Z, Q, kind = paley_field_set(83)
        assert kind == "DS"
        for G, D in (semidirect_paley(3, 2, twisted=True), affine_paley_q4(3)):
            P, S = stanton_sprott(G, D, Z, Q)
            assert S.size == (P.order - 1) // 2
            assert tuple(verify_ds(P, S).params) == (6723, 3361, 1680)
        # larger instance: constructed and size-checked only
        G2, D2 = paley_product(*semidirect_paley(3, 2), *affine_paley_q4(3))
        P, S = stanton_sprott(G2, D2, *paley_field_set(6563)[:2])
        pc = certify(P, S, "DS", (P.order - 1) // 2)
        assert pc.tier == "constructed, not censused" and pc.ok


def test_criterion_09_group_ring_identities(criterion):
    with criterion(9, "mixed products for all class pairs; internal and cross difference censuses", 10.0):
        p = 3
        for twisted in (True, False):
            G, P = semidirect_scheme(p, 2, twisted)
            for a in range(len(P)):
                for b in range(a + 1, len(P)):
                    assert verify_mixed_product(G, P, P.labels[a], P.labels[b]).ok
            K = order_p_subgroup(G, p).mask.astype(np.int64)
            one = np.zeros(G.order, dtype=np.int64)
            one[0] = 1
            for i in range(1, p):
                Pi = P[f"P{i}"]
                blocks, last = latin_p_blocks(G, p, i)
                inner = sum(convolution(G, B, B).counts for B in blocks + [last])
                printed = (p * p - p) * (p + 1) * one + (p * p - 2 * p) * Pi.mask + (p * p - p) * K
                # the printed right-hand side also counts <x^p, y^p> at the identity
                assert np.array_equal(printed - inner, (p * p - p) * one)
                cross = convolution(G, Pi, Pi).counts - inner
                assert np.array_equal(cross, (p * p - p) * (1 - K))
        Ga, Pa = affine_abelian(3, 2, 1)
        assert verify_mixed_product(Ga, Pa, "D1", "D2").ok
        assert verify_mixed_product(Ga, Pa, "D0", "D1").ok


def test_criterion_10_substitution(criterion):
    with criterion(10, "recipe from the Z9^2 Paley product instantiated over the twisted group", 90.0):
        A, PA = semidirect_scheme(3, 2, twisted=False)
        _, DA = semidirect_paley(3, 2, twisted=False)
        H, E = affine_paley_q4(3)
        X, S = paley_product(A, DA, H, E)
        R = recipe_extract(A, PA, H, S)
        _, back = recipe_instantiate(R, A, PA, H)
        assert back == S
        Gh, Ph = semidirect_scheme(3, 2, twisted=True)
        X2, S2 = recipe_instantiate(R, Gh, Ph, H)
        c1, c2 = verify_pds(X, S), verify_pds(X2, S2)
        assert c1.kind == c2.kind == "PDS"
        assert c1.params == c2.params == (6561, 3280, 1639, 1640)
        assert c1.type_tags == c2.type_tags


def test_criterion_11_three_class_combinations(criterion):
    with criterion(11, "combine3 LC gives NegLatin, LL and CC give Latin", 600.0):
        GL, L = affine_g1(3, 2, 1)
        GC, C = affine_g1(3, 2, -1)
        X, Z = combine3(GL, L, GC, C, "LC")
        assert X.order == 6561 and Z.sizes == (2132, 2214, 2214)
        rep = verify_partition(X, Z)
        assert rep.ok
        for c in rep.certificates:
            assert any(t.startswith("NegLatin(81,") for t in c.type_tags)
        for mode, (a, A), (b, B) in (("LL", (GL, L), (GL, L)), ("CC", (GC, C), (GC, C))):
            X, Z = combine3(a, A, b, B, mode)
            rep = verify_partition(X, Z)
            assert rep.ok
            for c in rep.certificates:
                assert any(t.startswith("Latin(81,") for t in c.type_tags)


def _cli_text(argv, path):
    code = main(argv + ["--out", str(path)])
    return code, path.read_text(encoding="utf-8")


def test_criterion_12_property_suites(criterion, tmp_path):
    with criterion(12, "census totals, counting identities, field rules, bijections, isometries, thread independence"):
        rng = np.random.default_rng(12)
        G, P = semidirect_scheme(3, 2)
        for _ in range(20):
            S = G.subset(rng.choice(G.order, size=int(rng.integers(0, 40)), replace=False))
            assert difference_census(G, S).total == S.size * (S.size - 1)
        for build in (lambda: affine_g1(3, 2, 1), lambda: affine_g1(3, 2, -1), lambda: affine_g2(3, 2),
                      lambda: affine_scheme_q4(3), lambda: semidirect_scheme(3, 2)):
            H, Q = build()
            for c in verify_partition(H, Q).certificates:
                v, k, lam, mu = c.params
                assert k * (k - 1) == lam * k + mu * (v - k - 1)
        for q in (7, 83):
            v, k, lam = verify_ds(*paley_field_set(q)[:2]).params
            assert k * (k - 1) == lam * (v - 1)
        for q in (3, 5, 7, 9, 25, 27, 81):
            F = gf(q)
            sq = F.sq_table
            a = np.arange(1, q)
            prod = F.mul(a[:, None], a[None, :])
            assert np.array_equal(sq[prod], sq[a][:, None] * sq[a][None, :])
            assert all(F.from_coeffs(F.coeffs(i)) == i for i in range(q))
        for H in (G, affine_g1(3, 2, 1)[0], semidirect_scheme(3, 3)[0]):
            assert all(H.index(H.element(g)) == g for g in range(H.order))
        for q, m, eps in ((3, 2, 1), (3, 2, -1), (5, 2, 1), (5, 2, -1), (3, 3, 1), (3, 3, -1)):
            assert all(affine_checks(affine_g1(q, m, eps)[0]).values())
        for q, m in ((3, 2), (5, 2), (3, 3)):
            assert all(affine_checks(affine_g2(q, m)[0]).values())
        runs = {
            "4": ["construct", "--family", "semidirect-scheme", "--p", "3", "--t", "2", "--twisted"],
            "7": ["product", "paley", "--left", "semidirect-paley:3:2:twisted", "--right", "affine-paley-q4:3"],
        }
        for name, argv in runs.items():
            c1, one = _cli_text(argv + ["--threads", "1"], tmp_path / f"{name}-1.json")
            c4, four = _cli_text(argv + ["--threads", "4"], tmp_path / f"{name}-4.json")
            assert c1 == c4 == 0
            assert strip_time(one) == strip_time(four)
            assert json.loads(one)["ok"]
