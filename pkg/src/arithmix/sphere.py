"""Primitive lattice points on x^2 + y^2 + z^2 = d modulo rotations.

The rotation group here is the order-12 subgroup of the octahedral
group: even coordinate permutations combined with an even number of
sign flips (isomorphic to A4). Quotient representatives are chosen as
lexicographically greatest orbit members, so everything downstream is
reproducible without any geometric tie-breaking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

Point = tuple[int, int, int]


def admissible(d: int) -> bool:
    """Spheres with primitive points for squarefree d: d mod 8 not in {0,4,7}."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    return d % 8 not in (0, 4, 7)


# ---------------------------------------------------------------------------
# the rotation group


def _closure(gens: list[np.ndarray]) -> list[np.ndarray]:
    seen = {}
    frontier = [np.eye(3, dtype=np.int64)]
    seen[frontier[0].tobytes()] = frontier[0]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = g @ m
                key = prod.tobytes()
                if key not in seen:
                    seen[key] = prod
                    nxt.append(prod)
        frontier = nxt
    return list(seen.values())


@lru_cache(maxsize=1)
def rotation_group() -> np.ndarray:
    """The 12 rotation matrices, as an array of shape (12, 3, 3).

    Generated by the three 180-degree axis rotations and the cyclic
    coordinate shift; the closure is asserted to be a determinant-one,
    even-permutation group of order 12.
    """
    flips = [np.diag(v).astype(np.int64) for v in
             ((1, -1, -1), (-1, 1, -1), (-1, -1, 1))]
    cyc = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0]], dtype=np.int64)
    mats = _closure(flips + [cyc])
    assert len(mats) == 12, f"rotation closure has order {len(mats)}"
    for m in mats:
        assert round(np.linalg.det(m)) == 1
        pattern = np.abs(m)
        assert (pattern.sum(axis=0) == 1).all() and (pattern.sum(axis=1) == 1).all()
        # permutation part must be even: identity or a 3-cycle, never a swap
        assert np.trace(pattern) in (0, 3)
        assert int((m[m != 0] < 0).sum()) % 2 == 0
    mats.sort(key=lambda m: tuple(m.ravel()), reverse=True)
    return np.stack(mats)


# ---------------------------------------------------------------------------
# enumeration


def points_array(d: int) -> np.ndarray:
    """All primitive integer solutions of x^2+y^2+z^2 = d, shape (N, 3).

    Rows sorted with x descending, then y descending, then z descending.
    """
    if d < 1:
        raise ValueError("d must be a positive integer")
    s = math.isqrt(d)
    coords = np.arange(-s, s + 1, dtype=np.int64)
    xx, yy = np.meshgrid(coords, coords, indexing="ij")
    r2 = d - xx * xx - yy * yy
    mask = r2 >= 0
    z = np.zeros_like(r2)
    z[mask] = np.sqrt(r2[mask].astype(np.float64)).astype(np.int64)
    z[mask] = np.where((z[mask] + 1) ** 2 <= r2[mask], z[mask] + 1, z[mask])
    exact = mask & (z * z == r2)
    xs, ys, zs = xx[exact], yy[exact], z[exact]
    pts = [np.stack([xs, ys, zs], axis=1)]
    nz = zs > 0
    pts.append(np.stack([xs[nz], ys[nz], -zs[nz]], axis=1))
    all_pts = np.concatenate(pts)
    g = np.gcd(np.gcd(np.abs(all_pts[:, 0]), np.abs(all_pts[:, 1])),
               np.abs(all_pts[:, 2]))
    all_pts = all_pts[g == 1]
    order = np.lexsort((-all_pts[:, 2], -all_pts[:, 1], -all_pts[:, 0]))
    return all_pts[order]


def enumerate_points(d: int) -> list[Point]:
    """Primitive lattice points on the sphere of squared radius d."""
    return [tuple(int(v) for v in row) for row in points_array(d)]


# ---------------------------------------------------------------------------
# canonical representatives


@dataclass(frozen=True)
class OrbitRep:
    """Canonical point of a rotation orbit together with the orbit size."""

    point: Point
    orbit_size: int


def orbit(p: Point) -> list[Point]:
    """Distinct images of p under the 12 rotations, descending order."""
    images = rotation_group() @ np.asarray(p, dtype=np.int64)
    uniq = {tuple(int(v) for v in row) for row in images}
    return sorted(uniq, reverse=True)


def canonicalize(p: Point) -> OrbitRep:
    """Lexicographically greatest rotation image and the true orbit size."""
    imgs = orbit(p)
    return OrbitRep(point=imgs[0], orbit_size=len(imgs))


def canonicalize_array(pts: np.ndarray) -> np.ndarray:
    """Row-wise canonical representatives for an (N, 3) point array."""
    pts = np.asarray(pts, dtype=np.int64)
    if np.abs(pts).max(initial=0) >= (1 << 20):
        raise ValueError("coordinates too large for packed comparison")
    images = np.einsum("rij,nj->nri", rotation_group(), pts)
    # pack (x, y, z) so int64 order equals lexicographic tuple order
    keys = (images[:, :, 0] * (1 << 42) + images[:, :, 1] * (1 << 21)
            + images[:, :, 2])
    best = np.argmax(keys, axis=1)
    return images[np.arange(images.shape[0]), best]


def quotient(d: int) -> list[OrbitRep]:
    """Orbit representatives of the sphere points, in first-appearance order."""
    reps: dict[Point, OrbitRep] = {}
    for p in enumerate_points(d):
        r = canonicalize(p)
        if r.point not in reps:
            reps[r.point] = r
    return list(reps.values())


def point_count(d: int) -> int:
    """|points on the sphere| without materializing python tuples."""
    return points_array(d).shape[0]


def csv_rows(d: int) -> list[tuple[int, int, int, int, int, int]]:
    """Rows (d, x, y, z, canonical, orbit_size) for every point of the sphere."""
    rows = []
    for p in enumerate_points(d):
        r = canonicalize(p)
        rows.append((d, p[0], p[1], p[2], int(p == r.point), r.orbit_size))
    return rows
