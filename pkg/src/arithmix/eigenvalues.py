"""Ramanujan tau, normalized Hecke eigenvalues, and their sparse sums.

tau comes from the 24th power of the sparse pentagonal-number Euler
series, computed with exact big integers: polynomials are packed into
single huge integers (192-bit signed limbs) so each convolution is one
GMP multiplication. Normalized eigenvalues lambda(n) = tau(n) / n^5.5
live in double precision; everything downstream quotes 1e-9 slack
because of that single rounding step.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import gmpy2
import numpy as np
from sympy import isprime, primerange

from .quadforms import CacheError, QuadForm, density, is_reduced

_LIMB_BITS = 192
_LIMB_BYTES = _LIMB_BITS // 8
MAX_CUTOFF = 10**7


def _pack(coeffs: list[int]) -> gmpy2.mpz:
    """One big integer with signed coefficients in 192-bit limbs."""
    zero = b"\x00" * _LIMB_BYTES
    pos, neg = [], []
    for c in coeffs:
        if c >= 0:
            pos.append(int(c).to_bytes(_LIMB_BYTES, "little"))
            neg.append(zero)
        else:
            pos.append(zero)
            neg.append(int(-c).to_bytes(_LIMB_BYTES, "little"))
    p = gmpy2.mpz(int.from_bytes(b"".join(pos), "little"))
    n = gmpy2.mpz(int.from_bytes(b"".join(neg), "little"))
    return p - n


def _unpack(value: gmpy2.mpz, count: int) -> list[int]:
    """First ``count`` balanced-signed limbs of the packed integer.

    Adding 2^191 to every limb in a single big addition makes them all
    non-negative without carries (coefficients stay far below 2^190), so
    the result can be sliced out of the byte string in linear time.
    """
    half = 1 << (_LIMB_BITS - 1)
    chunk = b"\x00" * (_LIMB_BYTES - 1) + b"\x80"
    offset = int.from_bytes(chunk * count, "little")
    u = (int(value) + offset) & ((1 << (_LIMB_BITS * count)) - 1)
    buf = u.to_bytes(count * _LIMB_BYTES, "little")
    return [
        int.from_bytes(buf[i * _LIMB_BYTES : (i + 1) * _LIMB_BYTES], "little") - half
        for i in range(count)
    ]


def _poly_mul(a: gmpy2.mpz, b: gmpy2.mpz, count: int) -> gmpy2.mpz:
    """Product of packed polynomials, truncated to ``count`` limbs."""
    prod = a * b
    return prod & ((gmpy2.mpz(1) << (_LIMB_BITS * count)) - 1)


def _euler_series(n: int) -> list[int]:
    """Coefficients of prod (1 - q^k) up to q^(n-1), by pentagonal numbers."""
    e = [0] * n
    e[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= n and g2 >= n:
            break
        sign = -1 if k % 2 else 1
        if g1 < n:
            e[g1] = sign
        if g2 < n:
            e[g2] = sign
        k += 1
    return e


@dataclass(frozen=True)
class TauTable:
    """tau(1..cutoff) as exact integers plus float normalized eigenvalues."""

    cutoff: int
    tau: tuple[int, ...]

    def __post_init__(self):
        lam = np.empty(self.cutoff + 1)
        lam[0] = 0.0
        n = np.arange(1, self.cutoff + 1, dtype=np.float64)
        lam[1:] = np.array([float(t) for t in self.tau]) * n ** (-5.5)
        object.__setattr__(self, "_lam", lam)

    def tau_of(self, n: int) -> int:
        if not (1 <= n <= self.cutoff):
            raise ValueError(f"n={n} outside table range 1..{self.cutoff}")
        return self.tau[n - 1]

    def lam(self, n: int) -> float:
        if not (1 <= n <= self.cutoff):
            raise ValueError(f"n={n} outside table range 1..{self.cutoff}")
        return float(self._lam[n])

    @property
    def lam_array(self) -> np.ndarray:
        """lam[n] indexed by n, with lam[0] = 0."""
        return self._lam


def build_tau(cutoff: int) -> TauTable:
    """Coefficients of q * prod (1-q^n)^24 up to the cutoff.

    Three squarings take the Euler series to its 8th power and a cube of
    that gives the 24th; truncation after every product keeps the packed
    integers at cutoff limbs.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    if cutoff > MAX_CUTOFF:
        raise ValueError(f"cutoff {cutoff} exceeds memory budget {MAX_CUTOFF}")
    e = _pack(_euler_series(cutoff))
    e2 = _poly_mul(e, e, cutoff)
    e4 = _poly_mul(e2, e2, cutoff)
    e8 = _poly_mul(e4, e4, cutoff)
    e16 = _poly_mul(e8, e8, cutoff)
    e24 = _poly_mul(e16, e8, cutoff)
    return TauTable(cutoff=cutoff, tau=tuple(_unpack(e24, cutoff)))


# ---------------------------------------------------------------------------
# disk cache


def save_tau(tab: TauTable, path: str) -> str:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(f"{tab.cutoff}\n")
        fh.write("\n".join(str(t) for t in tab.tau))
        fh.write("\n")
    os.replace(tmp, path)
    return path


def load_tau(path: str) -> TauTable:
    try:
        with open(path) as fh:
            lines = fh.read().split()
    except OSError as exc:
        raise CacheError(f"unreadable tau cache {path}: {exc}") from exc
    try:
        cutoff = int(lines[0])
        tau = tuple(int(t) for t in lines[1:])
    except (IndexError, ValueError) as exc:
        raise CacheError(f"malformed tau cache {path}: {exc}") from exc
    if len(tau) != cutoff:
        raise CacheError(
            f"tau cache {path} declares {cutoff} values but holds {len(tau)}"
        )
    if not tau or tau[0] != 1:
        raise CacheError(f"tau cache {path} fails the tau(1)=1 check")
    return TauTable(cutoff=cutoff, tau=tau)


def get_tau(cutoff: int, cache_dir: str | None = None) -> TauTable:
    """Cached table of at least the requested size, else build and persist."""
    if cache_dir is None:
        return build_tau(cutoff)
    path = os.path.join(cache_dir, f"tau_{cutoff}.txt")
    if os.path.exists(path):
        tab = load_tau(path)
        if tab.cutoff != cutoff:
            raise CacheError(f"tau cache {path} has cutoff {tab.cutoff}, wanted {cutoff}")
        return tab
    os.makedirs(cache_dir, exist_ok=True)
    tab = build_tau(cutoff)
    save_tau(tab, path)
    return tab


# ---------------------------------------------------------------------------
# sums and products


def sparse_sum(tab: TauTable, Y: int, form: QuadForm) -> float:
    """Sum of |lambda| over nonzero form values at lattice points, up to Y."""
    if Y > tab.cutoff:
        raise ValueError(f"Y={Y} beyond the table cutoff {tab.cutoff}")
    if not is_reduced(form):
        raise ValueError("sparse_sum expects a reduced form")
    if Y < form.a:
        return 0.0
    a, _, c = form.astuple()
    absd = -form.disc
    bx = math.isqrt(4 * c * Y // absd) + 1
    by = math.isqrt(4 * a * Y // absd) + 1
    xs = np.arange(-bx, bx + 1, dtype=np.int64)
    ys = np.arange(-by, by + 1, dtype=np.int64)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    vals = (form.a * xx * xx + form.b * xx * yy + form.c * yy * yy).ravel()
    vals = vals[(vals >= 1) & (vals <= Y)]
    counts = np.bincount(vals, minlength=Y + 1).astype(np.float64)
    return float(np.dot(np.abs(tab.lam_array[: Y + 1]), counts))


def sieve_product(form: QuadForm, X: int) -> float:
    """prod over odd primes 3 <= p <= X of (1 - rho(p)/p^2), exactly per factor."""
    if X > 10**6:
        raise ValueError("sieve bound beyond 10^6")
    out = 1.0
    for p in primerange(3, X + 1):
        out *= 1.0 - density(form, p) / p**2
    return out


def kronecker_at(disc: int, p: int) -> int:
    """chi_E(p): the quadratic character of the field of discriminant disc."""
    if p == 2:
        if disc % 2 == 0:
            return 0
        return 1 if disc % 8 == 1 else -1
    if disc % p == 0:
        return 0
    from sympy import legendre_symbol

    return int(legendre_symbol(disc % p, p))


def truncated_l_one(disc: int, X: int) -> float:
    """Euler product for L(1, chi_E) truncated at X, the trend companion."""
    out = 1.0
    for p in primerange(2, X + 1):
        out *= 1.0 / (1.0 - kronecker_at(disc, p) / p)
    return out


def _spf_sieve(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for i in range(2, limit + 1):
        if spf[i] == 0:
            spf[i::i][spf[i::i] == 0] = i
    return spf


def squarefree_sum(tab: TauTable, form: QuadForm, X: int) -> float:
    """Sum over squarefree a <= X of |lambda(a)| rho(a) / a^2."""
    if X > tab.cutoff:
        raise ValueError(f"X={X} beyond the table cutoff {tab.cutoff}")
    if X < 1:
        return 0.0
    spf = _spf_sieve(max(X, 2))
    lam = np.abs(tab.lam_array)
    rho_p: dict[int, int] = {}
    total = lam[1]  # a = 1 contributes |lambda(1)| = 1
    for a in range(2, X + 1):
        n, rho, squarefree = a, 1, True
        while n > 1:
            p = int(spf[n])
            n //= p
            if n % p == 0:
                squarefree = False
                break
            if p not in rho_p:
                rho_p[p] = density(form, p)
            rho *= rho_p[p]
        if squarefree:
            total += lam[a] * rho / (a * a)
    return float(total)


def hecke_inequality_check(tab: TauTable, P: int) -> list[int]:
    """Primes p <= P violating |lam(p)| <= 1 + lam(p^2)/2 - lam(p^2)^2/18.

    lam(p^2) is taken from the Hecke relation lam(p)^2 - 1, so P may run
    to the full cutoff; an empty list means the bound holds everywhere.
    """
    if P > tab.cutoff:
        raise ValueError(f"P={P} beyond the table cutoff {tab.cutoff}")
    bad = []
    for p in primerange(2, P + 1):
        lp = tab.lam(p)
        lp2 = lp * lp - 1.0
        rhs = 1.0 + lp2 / 2.0 - lp2 * lp2 / 18.0
        if abs(lp) > rhs:
            bad.append(p)
    return bad


def deligne_violations(tab: TauTable) -> list[int]:
    """Primes within the cutoff where |lam(p)| exceeds 2."""
    return [p for p in primerange(2, tab.cutoff + 1) if abs(tab.lam(p)) > 2.0]


def prime_log_sum(coeffs: dict[int, float], x: int) -> tuple[float, float]:
    """(sum of c_p/p over p <= x, truncated log L(1) for the same family).

    The companion is sum of -log(1 - c_p/p); coefficients with
    |c_p/p| >= 1 are rejected since the Euler factor would not converge.
    """
    s = 0.0
    logl = 0.0
    for p in sorted(coeffs):
        if not isprime(p):
            raise ValueError(f"coefficient key {p} is not prime")
        if p > x:
            continue
        c = coeffs[p]
        s += c / p
        if abs(c / p) >= 1.0:
            raise ValueError(f"Euler factor diverges at p={p}: coefficient {c}")
        logl += -math.log1p(-c / p)
    return s, logl


def sym_square_coeffs(tab: TauTable, disc: int, x: int) -> dict[int, float]:
    """The family lam(p^2) (1 + chi_E(p)) from the squarefree-sum analysis."""
    out = {}
    for p in primerange(2, x + 1):
        lp = tab.lam(p) if p <= tab.cutoff else None
        if lp is None:
            raise ValueError(f"prime {p} beyond the table cutoff")
        out[p] = (lp * lp - 1.0) * (1 + kronecker_at(disc, p))
    return out
