"""Weyl sums, twisted sums, and joint periods over labeled packets.

Test functions are real spherical harmonics up to degree 16, evaluated
by the associated Legendre recurrence (Condon-Shortley phase, real
cosine/sine combination). Plain and character-twisted packet averages
feed the finite-Fourier Parseval identity, which must hold to float
precision for every packet, shift, and harmonic pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .class_action import LabeledPacket
from .quadforms import Character, minimal_represented
from .sphere import points_array, rotation_group

L_CAP = 16


@dataclass(frozen=True)
class Harmonic:
    """Real spherical harmonic of degree ell and order m, |m| <= ell <= 16."""

    ell: int
    m: int

    def __post_init__(self):
        if not (0 <= self.ell <= L_CAP):
            raise ValueError(f"degree {self.ell} outside [0, {L_CAP}]")
        if abs(self.m) > self.ell:
            raise ValueError(f"order {self.m} exceeds degree {self.ell}")

    @property
    def index(self) -> int:
        """Position in the ell-major, m-ascending family ordering."""
        return self.ell * self.ell + self.ell + self.m


def harmonics_upto(l_max: int) -> list[Harmonic]:
    if not (0 <= l_max <= L_CAP):
        raise ValueError(f"family cap {l_max} outside [0, {L_CAP}]")
    return [Harmonic(l, m) for l in range(l_max + 1) for m in range(-l, l + 1)]


def _legendre_stack(l_max: int, cos_t: np.ndarray, sin_t: np.ndarray) -> np.ndarray:
    """P[l, m, i] = associated Legendre P_l^m at point i, 0 <= m <= l <= l_max."""
    n = cos_t.shape[0]
    P = np.zeros((l_max + 1, l_max + 1, n))
    P[0, 0] = 1.0
    for m in range(1, l_max + 1):
        P[m, m] = -(2 * m - 1) * sin_t * P[m - 1, m - 1]
    for m in range(l_max):
        P[m + 1, m] = cos_t * (2 * m + 1) * P[m, m]
    for m in range(l_max + 1):
        for l in range(m + 2, l_max + 1):
            P[l, m] = (
                cos_t * (2 * l - 1) * P[l - 1, m] - (l - 1 + m) * P[l - 2, m]
            ) / (l - m)
    return P


def harmonic_matrix(points: np.ndarray, d: int, l_max: int) -> np.ndarray:
    """Y[k, i] = k-th real harmonic at points[i]/sqrt(d), k = ell^2+ell+m.

    cos(theta) comes from z and sin(theta) from hypot(x, y), so poles are
    exact; the azimuth of a pole point is atan2(0, 0) = 0 by convention,
    harmless since every m != 0 harmonic vanishes there.
    """
    if not (0 <= l_max <= L_CAP):
        raise ValueError(f"family cap {l_max} outside [0, {L_CAP}]")
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[None, :]
    r = math.sqrt(d)
    cos_t = pts[:, 2] / r
    sin_t = np.hypot(pts[:, 0], pts[:, 1]) / r
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    P = _legendre_stack(l_max, cos_t, sin_t)
    n = pts.shape[0]
    Y = np.zeros(((l_max + 1) ** 2, n))
    for l in range(l_max + 1):
        base = l * l + l
        Y[base] = math.sqrt((2 * l + 1) / (4 * math.pi)) * P[l, 0]
        for m in range(1, l + 1):
            norm = math.sqrt(
                2.0
                * (2 * l + 1)
                / (4 * math.pi)
                * math.factorial(l - m)
                / math.factorial(l + m)
            )
            Y[base + m] = norm * P[l, m] * np.cos(m * phi)
            Y[base - m] = norm * P[l, m] * np.sin(m * phi)
    return Y


def eval_harmonic(h: Harmonic, p, d: int) -> float:
    """The harmonic at the lattice point p scaled onto the unit sphere."""
    x, y, z = (int(v) for v in (p.point if hasattr(p, "point") else p))
    if x * x + y * y + z * z != d:
        raise ValueError(f"{(x, y, z)} does not lie on the sphere of norm {d}")
    Y = harmonic_matrix(np.array([[x, y, z]]), d, h.ell)
    return float(Y[h.index, 0])


def orthonormality_residual(l_max: int, n_theta: int = 34, n_phi: int = 72) -> float:
    """Max |<Y_a, Y_b> - delta_ab| over the family, by product quadrature.

    Gauss-Legendre in cos(theta) is exact for the polynomial part at
    n_theta >= l_max + 1; the equally weighted phi grid is exact for
    trigonometric degree < n_phi. Residuals are pure rounding error.
    """
    nodes, weights = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    ct, pp = np.meshgrid(nodes, phi, indexing="ij")
    st = np.sqrt(1 - ct**2)
    pts = np.stack([st * np.cos(pp), st * np.sin(pp), ct], axis=-1).reshape(-1, 3)
    Y = harmonic_matrix(pts, 1, l_max)
    w = np.repeat(weights, n_phi) * (2 * math.pi / n_phi)
    gram = (Y * w) @ Y.T
    return float(np.abs(gram - np.eye(Y.shape[0])).max())


# ---------------------------------------------------------------------------
# packet averages


def packet_harmonics(pkt: LabeledPacket, l_max: int) -> np.ndarray:
    pts = np.array([m.point for m in pkt.members], dtype=np.int64)
    return harmonic_matrix(pts, pkt.d, l_max)


def weyl_vector(pkt: LabeledPacket, l_max: int, Y: np.ndarray | None = None) -> np.ndarray:
    """Plain packet averages of every harmonic up to l_max."""
    if Y is None:
        Y = packet_harmonics(pkt, l_max)
    return Y.mean(axis=1)


def weyl_sum(pkt: LabeledPacket, h: Harmonic) -> float:
    return float(weyl_vector(pkt, h.ell)[h.index])


def _char_column_matrix(pkt: LabeledPacket) -> np.ndarray:
    """C[chi, i] = chi evaluated at the label of member i."""
    return pkt.group.character_matrix()[:, list(pkt.labels)]


def twisted_matrix(
    pkt: LabeledPacket, l_max: int, Y: np.ndarray | None = None
) -> np.ndarray:
    """W[k, chi] = (1/|H|) sum_x Y_k(x) chi(label(x))."""
    if Y is None:
        Y = packet_harmonics(pkt, l_max)
    C = _char_column_matrix(pkt)
    return (Y @ C.T) / len(pkt)


def twisted_weyl(pkt: LabeledPacket, h: Harmonic, chi: Character) -> complex:
    if tuple(chi.orders) != tuple(pkt.group.structure):
        raise ValueError("character does not belong to the packet's class group")
    Y = packet_harmonics(pkt, h.ell)[h.index]
    vals = np.array([chi(lab) for lab in pkt.labels])
    return complex((Y * vals).mean())


def joint_matrix(
    pkt: LabeledPacket, s: int, l_max: int, Y: np.ndarray | None = None
) -> np.ndarray:
    """P[a, b] = (1/|H|) sum_x Y_a(x) Y_b(s.x)."""
    if Y is None:
        Y = packet_harmonics(pkt, l_max)
    perm = pkt.shift_permutation(s)
    return (Y @ Y[:, perm].T) / len(pkt)


def joint_period(pkt: LabeledPacket, s: int, h1: Harmonic, h2: Harmonic) -> float:
    l_max = max(h1.ell, h2.ell)
    return float(joint_matrix(pkt, s, l_max)[h1.index, h2.index])


def parseval_residual(
    pkt: LabeledPacket, s: int, l_max: int, Y: np.ndarray | None = None
) -> float:
    """Max over harmonic pairs of |joint period - character expansion|.

    The expansion sums chi(s) W(h1, chi) conj(W(h2, chi)) over all
    characters; on a labeled torsor the identity is exact, so the
    residual measures floating-point error only.
    """
    if Y is None:
        Y = packet_harmonics(pkt, l_max)
    P = joint_matrix(pkt, s, l_max, Y=Y)
    W = twisted_matrix(pkt, l_max, Y=Y)
    chi_s = pkt.group.character_matrix()[:, s]
    expansion = (W * chi_s) @ W.conj().T
    return float(np.abs(P - expansion).max())


def discrepancy(pkt: LabeledPacket, l_max: int, Y: np.ndarray | None = None) -> float:
    """Max |plain Weyl sum| over degrees 1..l_max (degree 0 is the mass).

    Canonical representatives all sit in one rotation wedge, so as d
    grows this tends to the worst wedge average of the family rather
    than to zero; sphere_discrepancy (full point set) and
    symmetrized_harmonic (rotation-averaged test functions) are the
    statistics that decay under equidistribution.
    """
    if not (1 <= l_max <= L_CAP):
        raise ValueError(f"degree cap {l_max} outside [1, {L_CAP}]")
    w = weyl_vector(pkt, l_max, Y=Y)
    return float(np.abs(w[1:]).max())


def sphere_discrepancy(d: int, l_max: int) -> float:
    """Same statistic for the full point set of the sphere."""
    pts = points_array(d)
    Y = harmonic_matrix(pts, d, l_max)
    return float(np.abs(Y.mean(axis=1)[1:]).max())


def shift_q(pkt: LabeledPacket, s: int) -> int:
    """Minimal integer represented by the shift's form class."""
    return minimal_represented(pkt.group.elements[s])


def symmetrized_harmonic(points: np.ndarray, d: int, h: Harmonic) -> np.ndarray:
    """Average of the harmonic over the 12 rotation images of each point."""
    pts = np.asarray(points, dtype=np.int64)
    images = np.einsum("rij,nj->nri", rotation_group(), pts)
    flat = images.reshape(-1, 3)
    vals = harmonic_matrix(flat, d, h.ell)[h.index].reshape(pts.shape[0], 12)
    return vals.mean(axis=1)


# ---------------------------------------------------------------------------
# report assembly


@dataclass(frozen=True)
class WeylReport:
    """All mixing statistics of one packet at one d."""

    d: int
    disc_matched: int
    packet_id: int
    h_class: int
    l_max: int
    weyl: np.ndarray
    twisted: np.ndarray
    shifts: tuple[int, ...]
    shift_q: tuple[int, ...]
    joint_diag: np.ndarray  # (n_shifts, n_harmonics): P(s, h, h)
    parseval_max: float
    discrepancy: float


def packet_report(
    pkt: LabeledPacket, l_max: int, shifts: list[int] | None = None, packet_id: int = 0
) -> WeylReport:
    """Evaluate every statistic once, sharing the harmonic matrix."""
    Y = packet_harmonics(pkt, l_max)
    if shifts is None:
        shifts = list(range(pkt.group.h))
    W = twisted_matrix(pkt, l_max, Y=Y)
    diag = np.empty((len(shifts), Y.shape[0]))
    worst = 0.0
    for row, s in enumerate(shifts):
        P = joint_matrix(pkt, s, l_max, Y=Y)
        diag[row] = np.diag(P)
        chi_s = pkt.group.character_matrix()[:, s]
        expansion = (W * chi_s) @ W.conj().T
        worst = max(worst, float(np.abs(P - expansion).max()))
    return WeylReport(
        d=pkt.d,
        disc_matched=pkt.disc_matched,
        packet_id=packet_id,
        h_class=pkt.group.h,
        l_max=l_max,
        weyl=weyl_vector(pkt, l_max, Y=Y),
        twisted=W,
        shifts=tuple(shifts),
        shift_q=tuple(shift_q(pkt, s) for s in shifts),
        joint_diag=diag,
        parseval_max=worst,
        discrepancy=discrepancy(pkt, max(l_max, 1), Y=Y) if l_max >= 1 else 0.0,
    )


CSV_HEADER = (
    "d,packet_id,h_class,ell,m,chi_index,shift_index,q,"
    "value_re,value_im,parseval_residual"
)


def report_rows(report: WeylReport) -> list[str]:
    """Long-format CSV rows: twisted sums first, then diagonal joint periods.

    Blank fields mark columns that do not apply to a row kind; the trivial
    character's rows are the plain Weyl sums.
    """
    rows = []
    harmonics = harmonics_upto(report.l_max)
    for h in harmonics:
        for c in range(report.twisted.shape[1]):
            v = report.twisted[h.index, c]
            rows.append(
                f"{report.d},{report.packet_id},{report.h_class},{h.ell},{h.m},"
                f"{c},,,{float(v.real)!r},{float(v.imag)!r},"
            )
    for row, s in enumerate(report.shifts):
        for h in harmonics:
            v = float(report.joint_diag[row, h.index])
            rows.append(
                f"{report.d},{report.packet_id},{report.h_class},{h.ell},{h.m},"
                f",{s},{report.shift_q[row]},{v!r},0.0,{float(report.parseval_max)!r}"
            )
    return rows
