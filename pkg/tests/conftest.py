"""Shared brute-force oracles.

These never touch the vectorised census engine or cached tables: products
come from the scalar backend law, one pair at a time.
"""
import itertools

import numpy as np
import pytest


def naive_difference_counts(G, ids):
    ids = [int(x) for x in ids]
    inv = {b: int(G.law_inv(b)) for b in ids}
    counts = np.zeros(G.order, dtype=np.int64)
    for a in ids:
        for b in ids:
            if a != b:
                counts[int(G.law_mul(a, inv[b]))] += 1
    return counts


def naive_product_counts(G, A, B):
    counts = np.zeros(G.order, dtype=np.int64)
    for a in A:
        for b in B:
            counts[int(G.law_mul(int(a), int(b)))] += 1
    return counts


def naive_pds_params(G, ids):
    """(v, k, lambda, mu) by direct counting, or None."""
    ids = sorted(int(x) for x in ids)
    members = set(ids)
    counts = naive_difference_counts(G, ids)
    inside = {int(counts[g]) for g in members if g != 0}
    outside = {int(counts[g]) for g in range(1, G.order) if g not in members}
    if len(inside) > 1 or len(outside) > 1:
        return None
    lam = inside.pop() if inside else 0
    mu = outside.pop() if outside else 0
    return (G.order, len(ids), lam, mu)


def squares_mod(p):
    return sorted({x * x % p for x in range(1, p)})


@pytest.fixture(scope="session")
def naive():
    class _N:
        difference_counts = staticmethod(naive_difference_counts)
        product_counts = staticmethod(naive_product_counts)
        pds_params = staticmethod(naive_pds_params)
    return _N
