"""Sphere lattice points and the order-12 rotation quotient."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arithmix.quadforms import class_number, squarefree_mask
from arithmix.sphere import (
    OrbitRep,
    admissible,
    canonicalize,
    canonicalize_array,
    csv_rows,
    enumerate_points,
    orbit,
    point_count,
    points_array,
    quotient,
    rotation_group,
)


def test_admissible_examples():
    assert admissible(11)
    assert not admissible(7)
    assert not admissible(8)
    for d in range(1, 200):
        assert admissible(d) == (d % 8 not in (0, 4, 7))
    with pytest.raises(ValueError):
        admissible(0)


# ---------------------------------------------------------------------------
# rotation group


def test_group_order_and_determinants():
    G = rotation_group()
    assert G.shape == (12, 3, 3)
    keys = {m.tobytes() for m in G}
    assert len(keys) == 12
    for m in G:
        assert round(np.linalg.det(m)) == 1
        # signed permutation matrix with even permutation part
        assert sorted(np.abs(m).sum(axis=0)) == [1, 1, 1]
        assert np.trace(np.abs(m)) in (0, 3)
        assert int((m[m != 0] < 0).sum()) % 2 == 0


def test_group_closed_with_a4_orders():
    G = rotation_group()
    keys = {m.tobytes() for m in G}
    eye = np.eye(3, dtype=np.int64)
    for a in G:
        for b in G:
            assert (a @ b).tobytes() in keys
        o, x = 1, a
        while not np.array_equal(x, eye):
            x = x @ a
            o += 1
        assert o in (1, 2, 3)  # the order-12 group with these orders is A4


def test_group_contains_generators():
    keys = {m.tobytes() for m in rotation_group()}
    for v in ((1, -1, -1), (-1, 1, -1), (-1, -1, 1)):
        assert np.diag(v).astype(np.int64).tobytes() in keys
    cyc = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=np.int64)
    assert cyc.tobytes() in keys


# ---------------------------------------------------------------------------
# enumeration


def test_point_counts_examples():
    assert len(enumerate_points(11)) == 24
    assert len(enumerate_points(1)) == 6
    assert enumerate_points(7) == []


def test_d1_exact():
    assert enumerate_points(1) == [
        (1, 0, 0), (0, 1, 0), (0, 0, 1), (0, 0, -1), (0, -1, 0), (-1, 0, 0),
    ]


def test_d11_signed_permutations():
    pts = set(enumerate_points(11))
    want = set()
    from itertools import permutations, product

    for perm in permutations((3, 1, 1)):
        for signs in product((1, -1), repeat=3):
            want.add(tuple(s * v for s, v in zip(signs, perm)))
    assert pts == want


def test_points_are_primitive_on_sphere():
    for d in (2, 3, 5, 6, 9, 11, 17, 50, 99, 198):
        for x, y, z in enumerate_points(d):
            assert x * x + y * y + z * z == d
            assert math.gcd(math.gcd(abs(x), abs(y)), abs(z)) == 1


def test_enumeration_order_is_descending():
    for d in (11, 59, 101):
        pts = enumerate_points(d)
        assert pts == sorted(pts, reverse=True)


def test_brute_matches_enumeration():
    for d in (4, 9, 12, 25, 45, 90):
        s = math.isqrt(d)
        brute = sorted(
            (
                (x, y, z)
                for x in range(-s, s + 1)
                for y in range(-s, s + 1)
                for z in range(-s, s + 1)
                if x * x + y * y + z * z == d
                and math.gcd(math.gcd(abs(x), abs(y)), abs(z)) == 1
            ),
            reverse=True,
        )
        assert enumerate_points(d) == brute


def test_point_count_fast_path():
    for d in (1, 3, 7, 11, 100, 101):
        assert point_count(d) == len(enumerate_points(d))


# ---------------------------------------------------------------------------
# canonical representatives


def test_canonicalize_examples():
    assert canonicalize((1, 1, 3)).orbit_size == 12
    assert canonicalize((1, 1, 1)) == OrbitRep((1, 1, 1), 4)
    assert canonicalize((0, 0, 1)).point == canonicalize((1, 0, 0)).point


def test_canonical_is_lex_max_of_orbit():
    for p in ((1, 1, 3), (2, -3, 1), (0, 1, -4), (5, 0, 0)):
        imgs = orbit(p)
        rep = canonicalize(p)
        assert rep.point == max(imgs)
        assert rep.orbit_size == len(imgs)
        assert 12 % rep.orbit_size == 0
        assert p in set(imgs) or tuple(p) in set(imgs)


def test_quotient_examples():
    assert len(quotient(11)) == 2
    assert len(quotient(19)) == 2
    q3 = quotient(3)
    assert len(q3) == 2
    assert any(r.orbit_size == 4 for r in q3)


def test_orbit_sizes_partition_the_sphere():
    for d in range(1, 300):
        n = point_count(d)
        total = sum(r.orbit_size for r in quotient(d))
        assert total == n


def test_canonicalize_array_matches_scalar():
    for d in (11, 35, 59, 91):
        pts = points_array(d)
        vec = canonicalize_array(pts)
        for row, crow in zip(pts, vec):
            want = canonicalize(tuple(int(v) for v in row)).point
            assert tuple(int(v) for v in crow) == want


def test_gauss_count_sample():
    # squarefree d = 3 mod 8: |points| = 24 h(-d); d=3 exceptional (units)
    sf = squarefree_mask(200)
    for d in range(11, 200, 8):
        if not sf[d]:
            continue
        assert point_count(d) == 24 * class_number(-d), d


def test_csv_rows_schema():
    rows = csv_rows(11)
    assert len(rows) == 24
    assert all(len(r) == 6 and r[0] == 11 for r in rows)
    flagged = [r for r in rows if r[4] == 1]
    assert len(flagged) == len(quotient(11))
    for r in flagged:
        assert canonicalize((r[1], r[2], r[3])).point == (r[1], r[2], r[3])


@given(
    st.tuples(
        st.integers(min_value=-20, max_value=20),
        st.integers(min_value=-20, max_value=20),
        st.integers(min_value=-20, max_value=20),
    ),
    st.integers(min_value=0, max_value=11),
)
@settings(max_examples=200, deadline=None)
def test_canonicalize_rotation_invariant(p, k):
    if p == (0, 0, 0):
        return
    g = math.gcd(math.gcd(abs(p[0]), abs(p[1])), abs(p[2]))
    p = tuple(v // g for v in p)
    img = tuple(int(v) for v in rotation_group()[k] @ np.array(p))
    assert canonicalize(img) == canonicalize(p)
