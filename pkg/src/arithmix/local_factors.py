"""Exact local computations: p-adic Schwartz bases, Tate integrals, Gamma identities.

The p-adic pieces are all locally constant, so every integral collapses
to a finite sum over valuation shells and unit classes computed in exact
rational arithmetic. Character values are 4th roots of unity (p in
{2,3,5}, conductor at most p), kept as Gaussian rationals. Archimedean
identities are checked numerically: double-exponential quadrature on one
side, an independent Gamma implementation on the other.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np
from scipy.special import gamma as _scipy_gamma
from sympy import primitive_root


class DepthError(ValueError):
    """Residue depth M too small to determine a locally constant value."""


# ---------------------------------------------------------------------------
# exact Gaussian rationals and 4th roots of unity


@dataclass(frozen=True)
class GaussRat:
    """a + b*i with exact rational a, b."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re=0, im=0) -> "GaussRat":
        return GaussRat(Fraction(re), Fraction(im))

    @staticmethod
    def from_root4(t: int) -> "GaussRat":
        return _ROOT4[t % 4]

    def __add__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(self.re - other.re, self.im - other.im)

    def __mul__(self, other: "GaussRat") -> "GaussRat":
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __neg__(self) -> "GaussRat":
        return GaussRat(-self.re, -self.im)

    def conjugate(self) -> "GaussRat":
        return GaussRat(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


_ROOT4 = (
    GaussRat.of(1, 0),
    GaussRat.of(0, 1),
    GaussRat.of(-1, 0),
    GaussRat.of(0, -1),
)


def _valuation(x: int, p: int, cap: int) -> int | None:
    """p-adic valuation of the residue x mod p^cap; None when x = 0 there."""
    x %= p**cap
    if x == 0:
        return None
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# unit-group characters with values in 4th roots of unity


@lru_cache(maxsize=None)
def _dlog_table(p: int) -> dict[int, int]:
    if p == 2:
        return {1: 0}
    g = primitive_root(p)
    return {pow(g, t, p): t for t in range(p - 1)}


@dataclass(frozen=True)
class UnitCharacter:
    """Character of Z_p-units of conductor p^f, extended by a value at p.

    The unit group mod p must embed in the 4th roots of unity, so
    p in {2,3,5}. ``r`` indexes the character among the p-1 of modulus p
    and ``p_exp`` is the i-exponent of the chosen value at p (default 1).
    """

    p: int
    f: int
    r: int = 0
    p_exp: int = 0

    def __post_init__(self):
        if (self.p - 1) not in (1, 2, 4):
            raise ValueError(f"p={self.p}: character values leave the 4th roots of unity")
        if self.f not in (0, 1):
            raise ValueError(f"conductor exponent f={self.f} not supported (f <= 1)")
        object.__setattr__(self, "r", self.r % (self.p - 1))
        if self.f == 0 and self.r != 0:
            raise ValueError("nontrivial unit behavior contradicts conductor 1")
        if self.f == 1 and self.r == 0:
            raise ValueError(f"no primitive character of modulus {self.p} is trivial")
        object.__setattr__(self, "p_exp", self.p_exp % 4)

    @property
    def quarter(self) -> int:
        return 4 // (self.p - 1)

    def unit_exponent(self, u: int) -> int:
        """i-exponent of the character at the unit u (read mod p)."""
        u %= self.p
        if u == 0:
            raise ValueError("character evaluated at a non-unit")
        if self.r == 0:
            return 0
        return (self.quarter * self.r * _dlog_table(self.p)[u]) % 4

    def exponent(self, val: int, unit: int) -> int:
        """i-exponent at t = p^val * unit."""
        return (self.p_exp * val + self.unit_exponent(unit)) % 4

    def at(self, val: int, unit: int) -> GaussRat:
        return GaussRat.from_root4(self.exponent(val, unit))

    @staticmethod
    def all_of_conductor(p: int, f: int, p_exp: int = 0) -> list["UnitCharacter"]:
        if f == 0:
            return [UnitCharacter(p, 0, 0, p_exp)]
        return [UnitCharacter(p, 1, r, p_exp) for r in range(1, p - 1)]


# ---------------------------------------------------------------------------
# Laurent values in p^{-s}


class LaurentValue:
    """Finite sum amp * sum_m c_m p^{-m s}, with amp^2 and c_m exact.

    ``amp2`` is the square of a positive real overall amplitude (the
    basis normalizations are square roots of rationals); coefficients
    are Gaussian rationals. A value with no nonzero coefficients
    normalizes its amplitude to 1.
    """

    __slots__ = ("p", "coeffs", "amp2")

    def __init__(self, p: int, coeffs: dict[int, GaussRat] | None = None, amp2=1):
        self.p = p
        self.coeffs = {m: c for m, c in (coeffs or {}).items() if not c.is_zero()}
        self.amp2 = Fraction(amp2) if self.coeffs else Fraction(1)
        if self.amp2 <= 0:
            raise ValueError("amplitude square must be positive")

    def is_zero(self) -> bool:
        return not self.coeffs

    def keys(self) -> list[int]:
        return sorted(self.coeffs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, LaurentValue)
            and self.p == other.p
            and self.amp2 == other.amp2
            and self.coeffs == other.coeffs
        )

    def __add__(self, other: "LaurentValue") -> "LaurentValue":
        if self.p != other.p:
            raise ValueError("mixed primes")
        if self.is_zero():
            return LaurentValue(self.p, other.coeffs, other.amp2)
        if other.is_zero():
            return LaurentValue(self.p, self.coeffs, self.amp2)
        if self.amp2 != other.amp2:
            raise ValueError("cannot add values with different amplitudes exactly")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, GaussRat.of(0)) + c
        return LaurentValue(self.p, out, self.amp2)

    def __mul__(self, other: "LaurentValue") -> "LaurentValue":
        if self.p != other.p:
            raise ValueError("mixed primes")
        out: dict[int, GaussRat] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                key = m1 + m2
                out[key] = out.get(key, GaussRat.of(0)) + c1 * c2
        return LaurentValue(self.p, out, self.amp2 * other.amp2)

    def scale(self, c: GaussRat) -> "LaurentValue":
        return LaurentValue(self.p, {m: v * c for m, v in self.coeffs.items()}, self.amp2)

    def at(self, s: complex) -> complex:
        amp = math.sqrt(float(self.amp2))
        total = 0j
        for m, c in self.coeffs.items():
            total += c.to_complex() * self.p ** complex(-m * s)
        return amp * total

    def __repr__(self):
        return f"LaurentValue(p={self.p}, coeffs={self.coeffs}, amp2={self.amp2})"


# ---------------------------------------------------------------------------
# Schwartz basis data


def zeta_p1(p: int) -> Fraction:
    return Fraction(p, p - 1)


def phi_plus(p: int, j: int) -> Fraction:
    """Index of the level-p^j congruence subgroup: p^j (1 + 1/p), or 1 at j=0."""
    if j == 0:
        return Fraction(1)
    return Fraction(p ** (j - 1) * (p + 1))


@dataclass(frozen=True)
class PadicSchwartz:
    """Basis function indexed by (j, f, k): chi^{-1}(xy) A_j on its support.

    Support: x in p^j units and y a unit for max(1,f) <= j <= k-1; the x
    part widens to nonzero multiples of p^k when (j,f) = (k,0); and for
    (j,f) = (0,0) the y part relaxes to all of Z_p, which is what makes
    the induced function constant on the complement of the level-p
    congruence cell (its support must be a union of right-translation
    orbits, and the bottom-row orbits are exactly {v(c)=0} and its
    complement). Requires f <= j <= k-f.
    """

    p: int
    j: int
    f: int
    k: int
    chi: UnitCharacter

    def __post_init__(self):
        if self.k < 0 or self.f < 0:
            raise ValueError("negative level or conductor")
        if self.k < 2 * self.f:
            raise ValueError(f"k={self.k} < 2f={2 * self.f}: no invariant vectors")
        if self.k == 0:
            if self.j != 0:
                raise ValueError("spherical case has only j=0")
        elif not (self.f <= self.j <= self.k - self.f):
            raise ValueError(f"j={self.j} outside [{self.f}, {self.k - self.f}]")
        if self.chi.p != self.p or self.chi.f != self.f:
            raise ValueError("character data inconsistent with (p, f)")

    @property
    def amp2(self) -> Fraction:
        """Square of the normalization constant A_j."""
        if self.k == 0:
            return Fraction(1)
        if self.j == 0:
            # the induced function is the indicator of {v(c) = 0}, whose
            # Haar volume inside GL2(Z_p) is p/(p+1)
            return Fraction(self.p + 1, self.p)
        if self.j == self.k:
            return phi_plus(self.p, self.k)
        return zeta_p1(self.p) * phi_plus(self.p, self.j)

    @property
    def wide_support(self) -> bool:
        """True in the (j,f)=(k,0) case where x ranges over p^k Z_p - 0."""
        return self.k >= 1 and self.j == self.k and self.f == 0


def invariant_dimension(p: int, k: int, f: int) -> int:
    """Dimension of the level-p^k invariant subspace for conductor p^f."""
    if k < 0 or f < 0:
        raise ValueError("negative level or conductor")
    dim = max(0, k - 2 * f + 1)
    if k == 0 and f == 0:
        labels = 1  # the spherical vector
    else:
        labels = max(0, (k - f) - f + 1) if k >= 1 else 0
    assert dim == labels, (p, k, f)
    return dim


# ---------------------------------------------------------------------------
# the induced function, evaluated exactly


def _unit_part(x: int, v: int, p: int, cap: int) -> int:
    return (x // p**v) % p ** (cap - v)


def induced_value(S: PadicSchwartz, g, M: int | None = None) -> LaurentValue:
    """Exact value of the induced function at g, as a Laurent sum in p^{-s}.

    The defining integral over t collapses: one coordinate of (0,t)g must
    be a unit (y for j >= 1, x for j = 0), pinning the valuation shell of
    t; the unit average is constant (asserted element by element). The
    result is a single monomial for k >= 1 and a truncated geometric
    series (M terms) in the spherical case.
    """
    p, k, j, f = S.p, S.k, S.j, S.f
    if M is None:
        M = k + 2
    if M < k + 1:
        raise DepthError(f"depth M={M} below the local-constancy bound {k + 1}")
    pM = p**M
    a, b = int(g[0][0]) % pM, int(g[0][1]) % pM
    c, d = int(g[1][0]) % pM, int(g[1][1]) % pM
    det = (a * d - b * c) % pM
    if det % p == 0:
        raise ValueError("det g is not a unit")
    chi = S.chi
    det_exp = chi.unit_exponent(det)

    if k == 0:
        # spherical: all shells m >= 0 contribute 1; truncate at M terms
        coeffs = {}
        for m in range(M):
            coeffs[2 * m] = GaussRat.from_root4((det_exp + 2 * m * chi.p_exp) % 4)
        return LaurentValue(p, coeffs, Fraction(1))

    vc = _valuation(c, p, M)
    if j == 0:
        # support x unit, y anywhere integral: the x-coordinate pins the
        # shell at m = -v(c), and v(d) >= v(c) must hold.  A unit det and
        # integral entries leave only v(c) = 0, where the y-condition is
        # automatic and the unit average is 1 (j = 0 forces f = 0).
        if vc != 0:
            return LaurentValue(p)
        return LaurentValue(p, {0: GaussRat.from_root4(det_exp)}, S.amp2)

    vd = _valuation(d, p, M)
    if vd is None:
        # any lift has v(d) >= M, forcing v(c) >= j + M; but det a unit
        # makes c a unit here, so the support condition is empty
        return LaurentValue(p)
    m0 = -vd

    if S.wide_support:
        if vc is None:
            raise DepthError(
                f"c = 0 mod p^{M}: cannot separate x=0 from deep nonzero x at depth {M}"
            )
        if vc < k + vd:
            return LaurentValue(p)
        v_xy = vc + m0  # valuation of the product of coordinates
    else:
        if vc is None:
            if j + vd < M:
                return LaurentValue(p)  # every lift overshoots v(c) = j + v(d)
            raise DepthError(f"v(c) >= {M} indistinguishable from {j + vd} at depth {M}")
        if vc != j + vd:
            return LaurentValue(p)
        v_xy = j

    uc = _unit_part(c, vc, p, M)
    ud = _unit_part(d, vd, p, M)
    # average over the unit factor of t: chi^2(u) from the integrand and
    # chi^{-2}(u) from chi^{-1}(xy) cancel; assert constancy honestly
    base = max(f, 1)
    exps = set()
    for u in range(1, p**base):
        if u % p == 0:
            continue
        e = (
            det_exp
            + 2 * chi.exponent(m0, u)  # chi^2 |.|^{2s} (t) at t = p^{m0} u
            - chi.exponent(v_xy, (uc * u * ud * u) % p)  # chi^{-1}(xy)
        ) % 4
        exps.add(e)
    assert len(exps) == 1, f"unit average not constant: {sorted(exps)}"
    coeff = GaussRat.from_root4(exps.pop())
    return LaurentValue(p, {2 * m0: coeff}, S.amp2)


def restriction_closed_form(S: PadicSchwartz, g, M: int | None = None) -> LaurentValue:
    """chi((ad-bc)/cd) A_j on the support, read off the bottom row of g.

    Independent of induced_value: no shell sum, just the stated closed
    form for matrices with unit determinant and integral entries.
    """
    p, k, j, f = S.p, S.k, S.j, S.f
    if k == 0:
        raise ValueError("closed form applies to level k >= 1")
    if M is None:
        M = k + 2
    if M < k + 1:
        raise DepthError(f"depth M={M} below the local-constancy bound {k + 1}")
    pM = p**M
    a, b = int(g[0][0]) % pM, int(g[0][1]) % pM
    c, d = int(g[1][0]) % pM, int(g[1][1]) % pM
    det = (a * d - b * c) % pM
    if det % p == 0:
        raise ValueError("det g is not a unit")
    chi = S.chi
    vc = _valuation(c, p, M)
    if j == 0:
        # indicator of the complement of the level-p cell; the character
        # factor degenerates to chi(det), and j = 0 forces f = 0
        if vc != 0:
            return LaurentValue(p)
        return LaurentValue(p, {0: GaussRat.from_root4(chi.unit_exponent(det))}, S.amp2)
    vd = _valuation(d, p, M)
    if vd is None or vd != 0:
        return LaurentValue(p)  # y-part of the support needs a unit
    if S.wide_support:
        if vc is None:
            raise DepthError(f"c = 0 mod p^{M}: support membership undecidable")
        if vc < k:
            return LaurentValue(p)
    else:
        if vc is None:
            return LaurentValue(p)  # v(c) >= M > j for every lift
        if vc != j:
            return LaurentValue(p)
    ud = d % pM
    uc = _unit_part(c, vc, p, M)
    # chi(det / (c d)): valuation -(vc), unit part det/(uc*ud)
    e = (
        chi.unit_exponent(det)
        - chi.exponent(vc, (uc * ud) % p)
    ) % 4
    return LaurentValue(p, {0: GaussRat.from_root4(e)}, S.amp2)


# ---------------------------------------------------------------------------
# sampling and exact-identity verification


def sample_gl2(p: int, M: int, rng) -> list[list[int]]:
    """Uniform element of GL2(Z/p^M) by rejection on the determinant."""
    pM = p**M
    while True:
        a, b, c, d = (rng.randrange(pM) for _ in range(4))
        if (a * d - b * c) % p != 0:
            return [[a, b], [c, d]]


def _basis_elements(p: int, k: int, f: int, p_exp: int = 0) -> list[PadicSchwartz]:
    if k < 2 * f:
        return []
    out = []
    for chi in UnitCharacter.all_of_conductor(p, f, p_exp):
        if k == 0:
            out.append(PadicSchwartz(p, 0, 0, 0, chi))
        else:
            for j in range(f, k - f + 1):
                out.append(PadicSchwartz(p, j, f, k, chi))
    return out


def verify_recovering(p: int, k: int, f: int, n_samples: int = 1000, seed: int = 0,
                      M: int | None = None) -> list[dict]:
    """Sampled exact comparison of induced_value vs the closed form.

    For each character of conductor p^f and each basis label j, draws
    group elements (redrawing on depth-indeterminate corners) and counts
    exact mismatches; also asserts the k >= 1 values are s-independent
    (a single monomial at p^0).
    """
    import random

    if k < 1:
        raise ValueError("closed-form comparison needs k >= 1")
    rows = []
    for S in _basis_elements(p, k, f):
        rng = random.Random(f"recover:{seed}:{p}:{k}:{f}:{S.j}:{S.chi.r}")
        mismatches = 0
        redraws = 0
        done = 0
        while done < n_samples:
            g = sample_gl2(p, M or (k + 2), rng)
            try:
                got = induced_value(S, g, M)
                want = restriction_closed_form(S, g, M)
            except DepthError:
                redraws += 1
                continue
            if not got.is_zero():
                assert got.keys() == [0], "level >= 1 value not s-independent"
            if got != want:
                mismatches += 1
            done += 1
        rows.append(
            {
                "p": p, "k": k, "f": f, "j": S.j, "chi_r": S.chi.r,
                "samples": n_samples, "mismatches": mismatches,
                "depth_redraws": redraws,
            }
        )
    return rows


def verify_equivariance(p: int, k: int, f: int, n_samples: int = 200, seed: int = 0,
                        M: int | None = None) -> list[dict]:
    """Left unipotent/diagonal equivariance and right level-invariance, exact."""
    import random

    depth = M or (k + 2)
    pM = p**depth
    rows = []
    for S in _basis_elements(p, k, f):
        rng = random.Random(f"equivar:{seed}:{p}:{k}:{f}:{S.j}:{S.chi.r}")
        fails = 0
        done = 0
        while done < n_samples:
            g = sample_gl2(p, depth, rng)
            x = rng.randrange(pM)
            lam1, lam2 = (rng.randrange(pM) for _ in range(2))
            if lam1 % p == 0 or lam2 % p == 0:
                continue
            # right translation by K_0(p^k): unit diagonal, c-entry in p^k
            gam = p**S.k * rng.randrange(max(pM // p**S.k, 1))
            kap = [[lam2, rng.randrange(pM)], [gam, lam1]]
            if (kap[0][0] * kap[1][1] - kap[0][1] * kap[1][0]) % p == 0:
                continue
            try:
                base = induced_value(S, g, M)
                ng = _matmul([[1, x], [0, 1]], g, pM)
                left_n = induced_value(S, ng, M)
                ag = _matmul([[lam1, 0], [0, lam2]], g, pM)
                left_a = induced_value(S, ag, M)
                gk = _matmul(g, kap, pM)
                right_k = induced_value(S, gk, M)
            except DepthError:
                continue
            twist = GaussRat.from_root4(
                (S.chi.unit_exponent(lam1) - S.chi.unit_exponent(lam2)) % 4
            )
            ok = (
                left_n == base
                and left_a == base.scale(twist)
                and right_k == base
            )
            if not ok:
                fails += 1
            done += 1
        rows.append(
            {
                "p": p, "k": k, "f": f, "j": S.j, "chi_r": S.chi.r,
                "samples": n_samples, "failures": fails,
            }
        )
    return rows


def _matmul(x, y, pM: int):
    return [
        [
            (x[0][0] * y[0][0] + x[0][1] * y[1][0]) % pM,
            (x[0][0] * y[0][1] + x[0][1] * y[1][1]) % pM,
        ],
        [
            (x[1][0] * y[0][0] + x[1][1] * y[1][0]) % pM,
            (x[1][0] * y[0][1] + x[1][1] * y[1][1]) % pM,
        ],
    ]


# ---------------------------------------------------------------------------
# orthonormality of the basis under the group average


def basis_orthonormality(p: int, k: int, f: int, M: int | None = None) -> float:
    """Max deviation of the Gram matrix from the identity, exactly.

    Averages |induced_value|^2 over GL2(Z/p^M) via exact bottom-row
    counting (the value depends only on the bottom row, and every
    admissible row has the same number of unit-determinant completions).
    Level k = 0 is excluded: the spherical vector's norm is an L-value,
    not a finite sum.
    """
    if k == 0:
        raise ValueError("spherical vector norm is not a finite sum; needs k >= 1")
    if M is None:
        M = k + 2
    if M < k + 1:
        raise DepthError(f"depth M={M} below the local-constancy bound {k + 1}")
    n_rows = Fraction(p ** (2 * M) - p ** (2 * M - 2))  # admissible bottom rows
    units = Fraction(p**M - p ** (M - 1))
    gram_dev = Fraction(0)
    for chi in UnitCharacter.all_of_conductor(p, f):
        basis = [PadicSchwartz(p, j, f, k, chi) for j in range(f, k - f + 1)]
        for i, Si in enumerate(basis):
            for t, St in enumerate(basis):
                if Si.j != St.j:
                    continue  # disjoint supports: off-diagonal is exactly 0
                if Si.wide_support:
                    n_c = Fraction(p ** (M - Si.j))  # v(c) >= k as a residue class
                else:
                    n_c = Fraction(p ** (M - Si.j) - p ** (M - Si.j - 1))
                if Si.j == 0:
                    n_d = Fraction(p**M)  # second coordinate unconstrained
                else:
                    n_d = units
                vol = n_c * n_d / n_rows
                entry = Si.amp2 * vol  # |chi(...)|^2 = 1 on the support
                gram_dev = max(gram_dev, abs(entry - (1 if i == t else 0)))
    return float(gram_dev)


# ---------------------------------------------------------------------------
# unramified Tate integrals over quadratic etale algebras


def tate_unramified(p: int, split_type: str, s: complex, omega=None,
                    M: int = 120) -> tuple[complex, complex]:
    """(closed form, truncated shell sum) for the local Tate integral.

    The closed form is D_p^{-1/2} L_{E_p}(s, omega); the oracle sums the
    integrand over valuation shells with vol(O^x) = |Disc|^{1/2}. The
    geometric tail is asserted below 2.01 r^M / (1-r)^2.
    """
    if M < 40:
        raise ValueError("truncation M below the supported minimum 40")
    sigma = complex(s).real
    if sigma <= 0:
        raise ValueError("Re s must be positive for convergence")
    r = p**-sigma
    if split_type == "split":
        w1, w2 = omega if omega is not None else (1.0, 1.0)
        if abs(w1) * r >= 1 or abs(w2) * r >= 1:
            raise ValueError("nonconvergent character parameters")
        closed = 1.0 / ((1 - w1 * p ** (-s)) * (1 - w2 * p ** (-s)))
        part1 = sum(w1**m * p ** (-m * s) for m in range(M))
        part2 = sum(w2**n * p ** (-n * s) for n in range(M))
        truncated = part1 * part2
        tail_r = max(abs(w1), abs(w2)) * r
    elif split_type == "inert":
        w = omega if omega is not None else 1.0
        if abs(w) * r * r >= 1:
            raise ValueError("nonconvergent character parameters")
        closed = 1.0 / (1 - w * p ** (-2 * s))
        truncated = sum(w**n * p ** (-2 * n * s) for n in range(M))
        tail_r = abs(w) * r * r
    elif split_type == "ramified":
        w = omega if omega is not None else 1.0
        if abs(w) * r >= 1:
            raise ValueError("nonconvergent character parameters")
        vol = p**-0.5  # vol(O^x) = |Disc|^{1/2} = p^{-1/2}
        closed = vol / (1 - w * p ** (-s))
        truncated = vol * sum(w**n * p ** (-n * s) for n in range(M))
        tail_r = abs(w) * r
    else:
        raise ValueError(f"unknown split type {split_type!r}")
    # geometric tail plus a rounding allowance (the tail alone can sit far
    # below one ulp of the closed form at large M)
    tol = 2.01 * tail_r**M / (1 - tail_r) ** 2 + 256 * sys.float_info.epsilon * (1 + abs(closed))
    assert abs(closed - truncated) <= tol
    return complex(closed), complex(truncated)


def tate_ramified_level_bound(p: int, s: complex) -> tuple[float, float]:
    """(zeta integral of the depth-1 element, its stated upper bound).

    The depth-1 basis element is supported on a single unit shell of the
    ramified algebra, so its integral is A_1 p^{-Re s} D_p^{-1/2} exactly;
    the bound is zeta_p(1) p^{1/2 - Re s} D_p^{-1/2}. The inequality
    reduces to A_1 <= zeta_p(1) p^{1/2}, checked exactly on squares.
    """
    sigma = complex(s).real
    a1_sq = zeta_p1(p) * phi_plus(p, 1)
    bound_sq = zeta_p1(p) ** 2 * p
    assert a1_sq <= bound_sq
    lhs = math.sqrt(float(a1_sq)) * p**-sigma * p**-0.5
    bound = float(zeta_p1(p)) * p ** (0.5 - sigma) * p**-0.5
    return lhs, bound


# ---------------------------------------------------------------------------
# archimedean Gamma identities


def _gamma_c(z: complex) -> complex:
    return complex(_scipy_gamma(complex(z)))


def gamma_r(z: complex) -> complex:
    """pi^(-z/2) Gamma(z/2)."""
    return math.pi ** complex(-z / 2) * _gamma_c(z / 2)


def arch_tate(s: complex) -> tuple[complex, complex]:
    """(quadrature of 4 int e^{-pi r^2} r^{2s-1} dr, closed form 2 pi^{-s} Gamma(s))."""
    s = complex(s)
    if s.real <= 0:
        raise ValueError("Re s must be positive")
    with mp.workdps(25):
        sm = mp.mpc(s)
        quad = mp.quad(lambda t: 4 * mp.e ** (-mp.pi * t * t) * t ** (2 * sm - 1), [0, 8])
        numeric = complex(quad)
    closed = 2 * math.pi ** (-s) * _gamma_c(s)
    return numeric, closed


def arch_rs_integral(nu1: complex, nu2: complex, s: complex) -> tuple[complex, complex]:
    """(quadrature of 8 int K_nu1(2 pi y) K_nu2(2 pi y) y^{s-1} dy, Gamma-product).

    Closed form: prod over sign pairs of Gamma_R(s +- nu1 +- nu2) divided
    by Gamma_R(2s). Requires Re s > |Re nu1| + |Re nu2|.
    """
    nu1, nu2, s = complex(nu1), complex(nu2), complex(s)
    if s.real <= abs(nu1.real) + abs(nu2.real):
        raise ValueError("Re s must exceed |Re nu1| + |Re nu2|")
    with mp.workdps(20):
        n1, n2, sm = mp.mpc(nu1), mp.mpc(nu2), mp.mpc(s)

        def integrand(y):
            return 8 * mp.besselk(n1, 2 * mp.pi * y) * mp.besselk(n2, 2 * mp.pi * y) * y ** (sm - 1)

        quad = mp.quad(integrand, [0, 12])
        numeric = complex(quad)
    closed = (
        gamma_r(s + nu1 + nu2)
        * gamma_r(s - nu1 + nu2)
        * gamma_r(s + nu1 - nu2)
        * gamma_r(s - nu1 - nu2)
        / gamma_r(2 * s)
    )
    return numeric, closed
