"""Class-group action on sphere points by norm-p quaternion conjugation.

A sphere point x embeds as the pure quaternion q_x = x1*i + x2*j + x3*k.
For a split odd prime p with an oriented square root rho of -d mod p,
conjugating q_x by a norm-p Hurwitz quaternion alpha satisfying the
congruence q_x*alpha = rho*alpha (doubled coordinates of the difference
all divisible by 2p) realizes one ideal-class step. Packets are the
orbits under several such primes, labeled by class-group elements so
that characters can be evaluated on members.

All quaternions are stored via doubled coordinates so that half-integer
points stay exact; every stored quadruple must have constant parity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np
from sympy import factorint, isprime, legendre_symbol, sqrt_mod

from .quadforms import (
    ClassGroup,
    get_class_group,
    prime_form,
    reduce as reduce_form,
)
from .sphere import OrbitRep, Point, canonicalize, canonicalize_array, points_array


class ActionError(RuntimeError):
    """A prime action failed an exactness invariant (no alpha, non-integral)."""


class LabelingError(RuntimeError):
    """No consistent generator orientation labels the packet; abort."""


# ---------------------------------------------------------------------------
# quaternion arithmetic on doubled coordinates


@dataclass(frozen=True)
class Quaternion:
    """Hurwitz quaternion; ``e2`` holds doubled coordinates (2*e0, ..., 2*e3)."""

    e2: tuple[int, int, int, int]

    def __post_init__(self):
        if len(set(v % 2 for v in self.e2)) != 1:
            raise ValueError(f"mixed-parity doubled coordinates {self.e2}")

    @property
    def half(self) -> bool:
        return self.e2[0] % 2 == 1

    def norm(self) -> int:
        s = sum(v * v for v in self.e2)
        assert s % 4 == 0
        return s // 4

    def conj(self) -> "Quaternion":
        a, b, c, d = self.e2
        return Quaternion((a, -b, -c, -d))

    def __mul__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(_mul2(self.e2, other.e2))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(tuple(a + b for a, b in zip(self.e2, other.e2)))

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(tuple(a - b for a, b in zip(self.e2, other.e2)))

    def __neg__(self) -> "Quaternion":
        return Quaternion(tuple(-a for a in self.e2))


def quat(e0: int, e1: int, e2: int, e3: int) -> Quaternion:
    """Quaternion from integer coordinates."""
    return Quaternion((2 * e0, 2 * e1, 2 * e2, 2 * e3))


def _mul2(a, b):
    """Doubled coordinates of the product from doubled coordinates."""
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    c = (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )
    assert all(v % 2 == 0 for v in c), "product left the Hurwitz order"
    return tuple(v // 2 for v in c)


def embed_point(p: Point) -> Quaternion:
    """Pure quaternion x*i + y*j + z*k; its norm is x^2 + y^2 + z^2."""
    return quat(0, p[0], p[1], p[2])


@lru_cache(maxsize=1)
def units() -> tuple[Quaternion, ...]:
    """The 24 Hurwitz units: 8 signed axes and 16 half-coordinate ones."""
    out = []
    for i in range(4):
        for s in (2, -2):
            e = [0, 0, 0, 0]
            e[i] = s
            out.append(Quaternion(tuple(e)))
    for signs in product((1, -1), repeat=4):
        out.append(Quaternion(signs))
    assert len(out) == 24 and all(u.norm() == 1 for u in out)
    return tuple(out)


def _left_mul_matrix(q2) -> np.ndarray:
    """Matrix L with doubled(q*x) = (L @ doubled(x)) / 2."""
    a, b, c, d = (int(v) for v in q2)
    return np.array(
        [[a, -b, -c, -d], [b, a, -d, c], [c, d, a, -b], [d, -c, b, a]],
        dtype=np.int64,
    )


@lru_cache(maxsize=None)
def norm_p_elements(p: int) -> np.ndarray:
    """Doubled coordinates of all Hurwitz quaternions of norm p, (24(p+1), 4).

    Rows are sorted descending so downstream selections are deterministic.
    """
    s = math.isqrt(4 * p)
    rng = np.arange(-s, s + 1, dtype=np.int64)
    e0, e1, e2 = np.meshgrid(rng, rng, rng, indexing="ij")
    r3 = 4 * p - e0 * e0 - e1 * e1 - e2 * e2
    mask = (r3 >= 0) & ((e1 - e0) % 2 == 0) & ((e2 - e0) % 2 == 0)
    z = np.zeros_like(r3)
    z[mask] = np.sqrt(r3[mask].astype(np.float64)).astype(np.int64)
    z[mask] = np.where((z[mask] + 1) ** 2 <= r3[mask], z[mask] + 1, z[mask])
    exact = mask & (z * z == r3) & ((z - e0) % 2 == 0)
    rows = [np.stack([e0[exact], e1[exact], e2[exact], z[exact]], axis=1)]
    pos = z[exact] > 0
    neg = rows[0][pos].copy()
    neg[:, 3] = -neg[:, 3]
    rows.append(neg)
    arr = np.concatenate(rows)
    order = np.lexsort((-arr[:, 3], -arr[:, 2], -arr[:, 1], -arr[:, 0]))
    arr = arr[order]
    assert arr.shape[0] == 24 * (p + 1), (p, arr.shape)
    return arr


@lru_cache(maxsize=None)
def _unit_left_matrices() -> np.ndarray:
    return np.stack([_left_mul_matrix(u.e2) for u in units()])


def norm_p_classes(p: int) -> list[Quaternion]:
    """p+1 norm-p quaternions, no two differing by a left unit factor."""
    if p == 2 or not isprime(p):
        raise ValueError("norm_p_classes expects an odd prime")
    arr = norm_p_elements(p)
    lmats = _unit_left_matrices()  # (24, 4, 4)
    images = np.einsum("uij,nj->nui", lmats, arr) // 2
    # canonical member of each left class: the lexicographically greatest image
    keys = (
        images[:, :, 0] * (1 << 48)
        + images[:, :, 1] * (1 << 32)
        + images[:, :, 2] * (1 << 16)
        + images[:, :, 3]
    )
    best = np.argmax(keys, axis=1)
    reps = images[np.arange(arr.shape[0]), best]
    uniq = sorted({tuple(int(v) for v in row) for row in reps}, reverse=True)
    assert len(uniq) == p + 1, (p, len(uniq))
    return [Quaternion(t) for t in uniq]


# ---------------------------------------------------------------------------
# the prime action


@dataclass(frozen=True)
class PrimeOrientation:
    """Split odd prime with an oriented square root of -d modulo p."""

    p: int
    rho: int

    def conjugate(self) -> "PrimeOrientation":
        return PrimeOrientation(self.p, self.p - self.rho)


def orientation_for(d: int, p: int) -> PrimeOrientation:
    """Canonical orientation: the square root of -d mod p lying in (0, p/2)."""
    if p == 2 or not isprime(p):
        raise ValueError("split action primes must be odd")
    if (2 * d) % p == 0:
        raise ValueError(f"{p} divides 2d")
    if int(legendre_symbol(-d % p, p)) != 1:
        raise ValueError(f"{p} is not split for d={d}")
    r = int(sqrt_mod(-d % p, p))
    return PrimeOrientation(p, min(r, p - r))


def split_orientations(d: int, count: int, p_min: int = 3) -> list[PrimeOrientation]:
    """The first ``count`` split odd primes not dividing 2d, oriented."""
    out, p = [], p_min
    while len(out) < count:
        if isprime(p) and (2 * d) % p and int(legendre_symbol(-d % p, p)) == 1:
            out.append(orientation_for(d, p))
        p += 2
    return out


def _point_of(x) -> Point:
    if isinstance(x, OrbitRep):
        return x.point
    return tuple(int(v) for v in x)


def act_prime(x, o: PrimeOrientation, check_all: bool = True) -> OrbitRep:
    """One ideal-class step applied to a sphere point.

    Searches the norm-p quaternions for alpha with q_x*alpha = rho*alpha
    (difference in p times the integral-coordinate sublattice), conjugates,
    divides by p and canonicalizes. With check_all every valid alpha is
    verified to produce the same representative.
    """
    pt = _point_of(x)
    d = pt[0] ** 2 + pt[1] ** 2 + pt[2] ** 2
    p, rho = o.p, o.rho
    if (2 * d) % p == 0:
        raise ActionError(f"p={p} divides 2d for d={d}")
    if (rho * rho + d) % p:
        raise ActionError(f"rho={rho} is not a root of -{d} mod {p}")
    A = norm_p_elements(p)
    qm2 = (-2 * rho, 2 * pt[0], 2 * pt[1], 2 * pt[2])
    delta = (A @ _left_mul_matrix(qm2).T) // 2
    valid = np.all(delta % (2 * p) == 0, axis=1)
    if not valid.any():
        raise ActionError(f"no norm-{p} quaternion satisfies the congruence at {pt}")
    V = A[valid] if check_all else A[valid][:1]
    # w = conj(alpha) * q * alpha, rowwise on doubled coordinates
    q2 = (0, 2 * pt[0], 2 * pt[1], 2 * pt[2])
    T = (V @ _left_mul_matrix(q2).T) // 2  # q * alpha per row
    a0, a1, a2, a3 = V[:, 0], V[:, 1], V[:, 2], V[:, 3]
    b0, b1, b2, b3 = T[:, 0], T[:, 1], T[:, 2], T[:, 3]
    w = np.stack(
        [
            a0 * b0 + a1 * b1 + a2 * b2 + a3 * b3,
            a0 * b1 - a1 * b0 - a2 * b3 + a3 * b2,
            a0 * b2 + a1 * b3 - a2 * b0 - a3 * b1,
            a0 * b3 - a1 * b2 + a2 * b1 - a3 * b0,
        ],
        axis=1,
    ) // 2
    if (w[:, 0] != 0).any() or (w[:, 1:] % (2 * p) != 0).any():
        raise ActionError(f"conjugated image of {pt} by p={p} is not a pure integral point")
    ys = w[:, 1:] // (2 * p)
    norms = (ys * ys).sum(axis=1)
    if (norms != d).any():
        raise ActionError(f"image norm changed under p={p} at {pt}")
    g = np.gcd(np.gcd(np.abs(ys[:, 0]), np.abs(ys[:, 1])), np.abs(ys[:, 2]))
    if (g != 1).any():
        raise ActionError(f"image of {pt} under p={p} is imprimitive")
    canon = canonicalize_array(ys)
    first = canon[0]
    if check_all and (canon != first).any():
        raise ActionError(
            f"valid alpha choices disagree at {pt}, p={p}, rho={rho}"
        )
    return canonicalize(tuple(int(v) for v in first))


# ---------------------------------------------------------------------------
# packets


@dataclass(frozen=True)
class LabeledPacket:
    """Orbit of a base point with class-group labels.

    members[i] carries label labels[i], an index into group.elements;
    perms[p][i] is the index of act_prime(members[i], generator p).
    """

    d: int
    disc_matched: int
    base: OrbitRep
    members: tuple[OrbitRep, ...]
    labels: tuple[int, ...]
    generators: tuple[PrimeOrientation, ...]
    group: ClassGroup
    perms: dict

    def __len__(self) -> int:
        return len(self.members)

    def member_index(self, x) -> int:
        pt = _point_of(x)
        for i, m in enumerate(self.members):
            if m.point == pt:
                return i
        raise KeyError(f"{pt} is not a packet member")

    def label_of(self, x) -> int:
        return self.labels[self.member_index(x)]

    def member_with_label(self, s: int) -> OrbitRep:
        return self.members[self.labels.index(s)]

    def shift_permutation(self, s: int) -> np.ndarray:
        """Index permutation sigma with member sigma(i) labeled labels[i]*s."""
        pos = {lab: i for i, lab in enumerate(self.labels)}
        return np.array(
            [pos[self.group.mul(lab, s)] for lab in self.labels], dtype=np.int64
        )

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "disc_matched": self.disc_matched,
            "base": list(self.base.point),
            "members": [
                {"point": list(m.point), "label": int(lab)}
                for m, lab in zip(self.members, self.labels)
            ],
            "generators": [{"p": o.p, "rho": o.rho} for o in self.generators],
        }


def act_class(pkt: LabeledPacket, s: int, x) -> OrbitRep:
    """The packet member whose label is label(x) * s."""
    return pkt.member_with_label(pkt.group.mul(pkt.label_of(x), s))


def _bfs_orbit(base: OrbitRep, gens: list[PrimeOrientation], members, index, perms):
    """Close members under the given generators, extending perms in place."""
    frontier = list(range(len(members)))
    while frontier:
        nxt = []
        for i in frontier:
            for o in gens:
                col = perms.setdefault(o.p, {})
                if i in col:
                    continue
                y = act_prime(members[i], o)
                j = index.get(y.point)
                if j is None:
                    j = len(members)
                    members.append(y)
                    index[y.point] = j
                    nxt.append(j)
                col[i] = j
        frontier = nxt


def build_packet(
    d: int,
    base: OrbitRep | None = None,
    gens: list[PrimeOrientation] | None = None,
    cache_dir: str | None = None,
    prime_cap: int = 20,
) -> LabeledPacket:
    """BFS the class-group orbit of a base point and label it.

    Generators default to the split odd primes not dividing 2d, scanned in
    increasing order; primes whose action adds nothing are dropped. The
    matching discriminant (-d versus -4d) is decided by comparing the
    packet size with both class numbers. Labels are words in the
    generators pushed through form composition; every orientation sign
    pattern is tried and inconsistency aborts with LabelingError.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if any(k > 1 for k in factorint(d).values()):
        raise ValueError(f"d={d} is not squarefree")
    if d % 8 in (0, 4, 7):
        raise ValueError(f"d={d} is not admissible")
    if base is None:
        pts = points_array(d)
        if pts.shape[0] == 0:
            raise ValueError(f"no primitive points on the sphere for d={d}")
        base = canonicalize(tuple(int(v) for v in pts[0]))
    else:
        base = canonicalize(_point_of(base))

    members: list[OrbitRep] = [base]
    index = {base.point: 0}
    perms: dict[int, dict[int, int]] = {}
    kept: list[PrimeOrientation] = []
    if gens is not None:
        kept = list(gens)
        _bfs_orbit(base, kept, members, index, perms)
    else:
        for o in split_orientations(d, prime_cap):
            y = act_prime(base, o)
            if y.point in index and kept:
                continue  # adds nothing new anywhere, by commutativity
            if y.point == base.point and not kept:
                continue
            kept.append(o)
            _bfs_orbit(base, kept, members, index, perms)
    n = len(members)

    # permutation arrays, with the conjugate-orientation inverses
    perm_arrays: dict[int, np.ndarray] = {}
    for o in kept:
        col = perms[o.p]
        perm_arrays[o.p] = np.array([col[i] for i in range(n)], dtype=np.int64)
    for o in kept:
        fwd = perm_arrays[o.p]
        for i in range(n):
            back = act_prime(members[fwd[i]], o.conjugate())
            if back.point != members[i].point:
                raise ActionError(
                    f"rho then -rho fails to round-trip at d={d}, p={o.p}"
                )
    for oa in kept:
        for ob in kept:
            pa, pb = perm_arrays[oa.p], perm_arrays[ob.p]
            if not np.array_equal(pa[pb], pb[pa]):
                raise ActionError(
                    f"generator actions p={oa.p}, p={ob.p} do not commute at d={d}"
                )

    # which class group the packet realizes
    candidates = []
    if d % 4 == 3:
        candidates.append(-d)
    candidates.append(-4 * d)
    matched = None
    for disc in candidates:
        G = get_class_group(disc, cache_dir)
        if G.h == n:
            matched = disc
            group = G
            break
    if matched is None:
        raise LabelingError(
            f"packet size {n} at d={d} matches neither h({candidates[0]}) "
            f"nor h({-4 * d})"
        )

    # orientation-sign search for consistent labels
    gen_classes = []
    for o in kept:
        f = reduce_form(prime_form(matched, o.p))
        gen_classes.append(group.index(f))
    labels = _search_labels(group, n, kept, gen_classes, perm_arrays)
    if labels is None:
        raise LabelingError(f"no generator orientation labels the packet at d={d}")
    if sorted(labels) != list(range(n)):
        raise LabelingError(f"labels do not exhaust the class group at d={d}")

    return LabeledPacket(
        d=d,
        disc_matched=matched,
        base=base,
        members=tuple(members),
        labels=tuple(labels),
        generators=tuple(kept),
        group=group,
        perms=perm_arrays,
    )


def _search_labels(group, n, kept, gen_classes, perm_arrays):
    """Assign group elements to members, trying both signs per generator."""
    for signs in product((1, -1), repeat=len(kept)):
        classes = [
            c if s == 1 else group.inv(c) for c, s in zip(gen_classes, signs)
        ]
        labels = [-1] * n
        labels[0] = group.identity
        frontier = [0]
        while frontier:
            nxt = []
            for i in frontier:
                for o, c in zip(kept, classes):
                    j = int(perm_arrays[o.p][i])
                    want = group.mul(labels[i], c)
                    if labels[j] == -1:
                        labels[j] = want
                        nxt.append(j)
            frontier = nxt
        ok = all(lab != -1 for lab in labels)
        if ok:
            for o, c in zip(kept, classes):
                pa = perm_arrays[o.p]
                if any(
                    labels[int(pa[i])] != group.mul(labels[i], c) for i in range(n)
                ):
                    ok = False
                    break
        if ok:
            return labels
    return None


def packet_census(d: int, pkt: LabeledPacket) -> dict:
    """Observed packet bookkeeping for the sphere at d (reported, not asserted)."""
    pts = points_array(d)
    total = int(pts.shape[0])
    canon = canonicalize_array(pts)
    reps = len({tuple(int(v) for v in row) for row in canon})
    size = len(pkt)
    return {
        "d": d,
        "points": total,
        "quotient_size": reps,
        "packet_size": size,
        "packets_observed": reps // size if size else 0,
        "two_power_omega": 2 ** len(factorint(d)),
    }
