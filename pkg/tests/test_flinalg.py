"""Mod-p linear algebra kernels, cross-checked against brute force."""

import numpy as np

from defcert import flinalg


def test_rref_known():
    a = np.array([[1, 2, 3], [2, 4, 2], [0, 0, 5]])
    r, piv = flinalg.rref(a, 5)
    assert piv == [0, 2]
    # reduced form: only nonzero rows kept, unit pivots, zeros above
    assert r.shape == (2, 3)
    assert r[0, 0] == 1 and r[1, 2] == 1
    assert r[0, 2] == 0


def test_rank_of_outer_products():
    rng = np.random.default_rng(5150)
    for p in (2, 3, 7):
        for _ in range(20):
            n, r = 8, int(rng.integers(0, 4))
            b = rng.integers(0, p, (n, r))
            c = rng.integers(0, p, (r, n))
            a = (b @ c) % p
            assert flinalg.rank(a, p) <= r


def test_nullspace_annihilates_and_counts():
    rng = np.random.default_rng(77)
    for p in (2, 3, 5):
        for _ in range(25):
            a = rng.integers(0, p, (6, 9))
            ns = flinalg.nullspace(a, p)
            assert not np.any((a @ ns) % p)
            assert flinalg.rank(a, p) + ns.shape[1] == 9
            # columns are independent
            assert flinalg.rank(ns, p) == ns.shape[1]


def test_solve_consistent_systems():
    rng = np.random.default_rng(123)
    for p in (2, 3, 5):
        for _ in range(25):
            a = rng.integers(0, p, (7, 5))
            x = rng.integers(0, p, (5, 3))
            b = (a @ x) % p
            sol = flinalg.solve(a, b, p)
            assert sol is not None
            assert not np.any((a @ sol - b) % p)


def test_solve_detects_inconsistency():
    a = np.array([[1, 0], [0, 0]])
    b = np.array([0, 1])
    assert flinalg.solve(a, b, 3) is None


def test_inverse_random():
    rng = np.random.default_rng(31337)
    for p in (2, 3, 7):
        got = 0
        while got < 15:
            a = rng.integers(0, p, (6, 6))
            inv = flinalg.inv(a, p)
            if inv is None:
                assert flinalg.rank(a, p) < 6
                continue
            got += 1
            assert not np.any((a @ inv - np.eye(6, dtype=np.int64)) % p)
            assert not np.any((inv @ a - np.eye(6, dtype=np.int64)) % p)


def test_matmul_mod_matches_naive():
    rng = np.random.default_rng(2)
    for p in (2, 3, 251):
        a = rng.integers(0, p, (13, 7))
        b = rng.integers(0, p, (7, 11))
        assert np.array_equal(flinalg.matmul_mod(a, b, p), (a @ b) % p)


def test_pow_mod():
    a = np.array([[1, 1], [0, 1]])
    assert np.array_equal(flinalg.pow_mod(a, 5, 5), np.eye(2, dtype=np.int64))
    assert np.array_equal(
        flinalg.pow_mod(a, 7, 13), np.array([[1, 7], [0, 1]])
    )


def span_set(basis, p):
    """All vectors in the span, as byte tuples. Brute force, small only."""
    from itertools import product

    if basis.shape[1] == 0:
        return {tuple(np.zeros(basis.shape[0], dtype=int))}
    out = set()
    for combo in product(range(p), repeat=basis.shape[1]):
        v = (basis @ np.array(combo)) % p
        out.add(tuple(int(x) for x in v))
    return out


def test_in_span_matches_enumeration():
    rng = np.random.default_rng(404)
    p = 3
    for _ in range(10):
        basis = rng.integers(0, p, (5, 2))
        full = span_set(basis, p)
        for _ in range(10):
            v = rng.integers(0, p, 5)
            assert flinalg.in_span(basis, v, p) == (
                tuple(int(x) for x in v) in full
            )


def test_intersect_col_spaces_matches_enumeration():
    rng = np.random.default_rng(11)
    p = 2
    for _ in range(20):
        u = rng.integers(0, p, (6, 3))
        w = rng.integers(0, p, (6, 3))
        both = flinalg.intersect_col_spaces(u, w, p)
        expect = span_set(u, p) & span_set(w, p)
        assert span_set(both, p) == expect


def test_col_space_basis_preserves_span():
    rng = np.random.default_rng(8)
    p = 3
    for _ in range(15):
        a = rng.integers(0, p, (5, 7))
        b = flinalg.col_space_basis(a, p)
        assert b.shape[1] == flinalg.rank(a, p)
        assert span_set(b, p) == span_set(a, p)
