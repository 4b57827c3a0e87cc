"""Binary quadratic forms of negative discriminant and their class groups.

Reduction, Gauss composition, class-group enumeration with characters,
local zero-count densities, and representation counts. All group and
density arithmetic is exact; floating point enters only through
character values handed to downstream numerics.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np
from sympy import factorint, isprime, legendre_symbol, sqrt_mod

try:
    from sympy.core.intfunc import igcdex
except ImportError:  # older sympy layout
    from sympy.core.numbers import igcdex


class CacheError(RuntimeError):
    """A cached class-group file exists but fails validation."""


@dataclass(frozen=True, order=True)
class QuadForm:
    """Primitive positive definite integral form a*x^2 + b*x*y + c*y^2."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        # accept numpy integer scalars etc., but store plain ints
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not isinstance(v, int):
                object.__setattr__(self, name, int(v))
        a, b, c = self.a, self.b, self.c
        if a <= 0 or b * b - 4 * a * c >= 0:
            raise ValueError(f"form {(a, b, c)} is not positive definite")
        if math.gcd(math.gcd(a, b), c) != 1:
            raise ValueError(f"form {(a, b, c)} is imprimitive")

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x: int, y: int) -> int:
        return self.a * x * x + self.b * x * y + self.c * y * y

    def astuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


def is_valid_disc(disc: int) -> bool:
    return disc < 0 and disc % 4 in (0, 1)


def is_reduced(form: QuadForm) -> bool:
    a, b, c = form.astuple()
    if not (abs(b) <= a <= c):
        return False
    if (abs(b) == a or a == c) and b < 0:
        return False
    return True


def reduce(form: QuadForm) -> QuadForm:
    """Unique reduced representative of the SL2(Z)-class of the form."""
    a, b, c = form.astuple()
    while True:
        if a > c:
            a, c, b = c, a, -b
            continue
        if abs(b) > a:
            # translate b into (-a, a]
            r = b % (2 * a)
            if r > a:
                r -= 2 * a
            q = (b - r) // (2 * a)
            c = c - q * b + q * q * a
            b = r
            continue
        break
    if (abs(b) == a or a == c) and b < 0:
        b = -b
    return QuadForm(a, b, c)


def principal_form(disc: int) -> QuadForm:
    """Identity class: x^2 - (disc/4) y^2, or x^2 + xy + (1-disc)/4 y^2."""
    if not is_valid_disc(disc):
        raise ValueError(f"{disc} is not a negative discriminant")
    if disc % 4 == 0:
        return QuadForm(1, 0, -disc // 4)
    return QuadForm(1, 1, (1 - disc) // 4)


def inverse_form(form: QuadForm) -> QuadForm:
    return reduce(QuadForm(form.a, -form.b, form.c))


def compose(f: QuadForm, g: QuadForm) -> QuadForm:
    """Reduced Gauss composite of two forms of the same discriminant."""
    disc = f.disc
    if g.disc != disc:
        raise ValueError(f"discriminant mismatch: {disc} vs {g.disc}")
    a1, b1, _ = f.astuple()
    a2, b2, _ = g.astuple()
    if a1 == 1:
        return reduce(g)
    if a2 == 1:
        return reduce(f)
    s = (b1 + b2) // 2
    u1, v1, d1 = (int(t) for t in igcdex(a1, a2))
    u2, v2, d = (int(t) for t in igcdex(d1, s))
    # u2*(u1*a1 + v1*a2) + v2*s == d == gcd(a1, a2, s)
    a3 = (a1 * a2) // (d * d)
    num = u2 * u1 * a1 * b2 + u2 * v1 * a2 * b1 + v2 * ((b1 * b2 + disc) // 2)
    if num % d:
        raise ArithmeticError("composition produced a non-integral middle coefficient")
    b3 = (num // d) % (2 * a3)
    if (b3 * b3 - disc) % (4 * a3):
        raise ArithmeticError("composition produced a non-integral last coefficient")
    c3 = (b3 * b3 - disc) // (4 * a3)
    return reduce(QuadForm(a3, b3, c3))


def form_pow(f: QuadForm, n: int) -> QuadForm:
    """n-th composition power; negative n composes the inverse class."""
    if n < 0:
        return form_pow(inverse_form(f), -n)
    result = reduce(principal_form(f.disc))
    base = reduce(f)
    while n:
        if n & 1:
            result = compose(result, base)
        base = compose(base, base)
        n >>= 1
    return result


def enumerate_reduced(disc: int) -> list[QuadForm]:
    """All reduced primitive forms of the discriminant, sorted by (a, b, c)."""
    if not is_valid_disc(disc):
        raise ValueError(f"{disc} is not a negative discriminant")
    absd = -disc
    forms = []
    for a in range(1, math.isqrt(absd // 3) + 1):
        for b in range(-a, a + 1):
            if (b - disc) % 2:
                continue
            if (b * b - disc) % (4 * a):
                continue
            c = (b * b - disc) // (4 * a)
            if c < a:
                continue
            if b < 0 and (-b == a or a == c):
                continue
            if math.gcd(math.gcd(a, b), c) != 1:
                continue
            forms.append(QuadForm(a, b, c))
    return sorted(forms)


def class_number(disc: int) -> int:
    return len(enumerate_reduced(disc))


def minimal_represented(form: QuadForm) -> int:
    """Least positive integer represented by a reduced form (its a coefficient)."""
    if not is_reduced(form):
        raise ValueError(f"form {form.astuple()} is not reduced; call reduce first")
    return form.a


# ---------------------------------------------------------------------------
# zero-count densities mod n


def _count_zeros_odd_prime_power(form: QuadForm, p: int, k: int) -> int:
    """#{(x, y) mod p^k : form = 0 mod p^k} for odd p, by direct counting.

    Unimodular changes of variable first arrange a p-unit leading
    coefficient, then x is traded for u = 2ax + by, a bijection for
    fixed y, leaving u^2 = disc * y^2 to count with a square table.
    """
    n = p**k
    if n > 2_000_000:
        raise ValueError(f"odd prime power {p}^{k} too large for direct counting")
    a, b, c = form.astuple()
    if a % p == 0:
        if c % p:
            a, c = c, a  # swap the variables
        else:
            a, b = a + b + c, b + 2 * c  # (x, y) -> (x, x + y); c unchanged
    assert a % p, "primitive form has a p-unit coefficient after substitution"
    y = np.arange(n, dtype=np.int64)
    sq = (y * y) % n
    sqtable = np.bincount(sq, minlength=n)
    vals = (int(form.disc % n) * sq) % n
    return int(sqtable[vals].sum())


def _count_zeros_two_power(form: QuadForm, k: int) -> int:
    """#{(x, y) mod 2^k : form = 0 mod 2^k} by a full grid count."""
    if k > 11:
        raise ValueError("2-power modulus too large for direct counting")
    n = 1 << k
    a, b, c = (v % n for v in form.astuple())
    x = np.arange(n, dtype=np.int64)
    xx, yy = np.meshgrid(x, x, indexing="ij")
    q = (a * ((xx * xx) % n) + b * ((xx * yy) % n) + c * ((yy * yy) % n)) % n
    return int(np.count_nonzero(q == 0))


def density(form: QuadForm, n: int) -> int:
    """rho(n) = #{(x, y) mod n : form(x, y) = 0 mod n}.

    Multiplicative over coprime prime powers. At odd p away from the
    discriminant the split/inert closed forms are used; powers of 2 and
    of primes dividing the discriminant are counted directly.
    """
    if n < 1:
        raise ValueError("modulus must be positive")
    if n == 1:
        return 1
    disc = form.disc
    total = 1
    for p, k in sorted((int(p), int(k)) for p, k in factorint(n).items()):
        if p == 2:
            cnt = _count_zeros_two_power(form, k)
        elif disc % p == 0:
            cnt = _count_zeros_odd_prime_power(form, p, k)
        else:
            chi = int(legendre_symbol(disc % p, p))
            if chi == 1:
                cnt = (k + 1) * p**k - k * p ** (k - 1)
            else:
                cnt = p ** (2 * (k // 2))
        total *= cnt
    return total


def representation_count(form: QuadForm, n: int, bound: int | None = None) -> int:
    """#{(x, y) in Z^2 : form(x, y) = n}, by an exact bounded box count.

    The box is forced by positivity: 4a*form = (2ax+by)^2 + |disc| y^2,
    so |y| <= sqrt(4a n/|disc|) and symmetrically for x. An explicit
    bound may widen the search box but never changes the answer.
    """
    if n < 0:
        raise ValueError("target value must be nonnegative")
    if n == 0:
        return 1  # the origin
    a, _, c = form.astuple()
    absd = -form.disc
    bx = math.isqrt(4 * c * n // absd) + 1
    by = math.isqrt(4 * a * n // absd) + 1
    if bound is not None:
        bx = max(bx, bound)
        by = max(by, bound)
    xs = np.arange(-bx, bx + 1, dtype=np.int64)
    ys = np.arange(-by, by + 1, dtype=np.int64)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    vals = form.a * xx * xx + form.b * xx * yy + form.c * yy * yy
    return int(np.count_nonzero(vals == n))


def representation_counts_upto(form: QuadForm, limit: int) -> np.ndarray:
    """Array r[0..limit] with r[n] = representation_count(form, n)."""
    a, _, c = form.astuple()
    absd = -form.disc
    bx = math.isqrt(4 * c * limit // absd) + 1
    by = math.isqrt(4 * a * limit // absd) + 1
    xs = np.arange(-bx, bx + 1, dtype=np.int64)
    ys = np.arange(-by, by + 1, dtype=np.int64)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    vals = (form.a * xx * xx + form.b * xx * yy + form.c * yy * yy).ravel()
    vals = vals[vals <= limit]
    return np.bincount(vals, minlength=limit + 1)


# ---------------------------------------------------------------------------
# class group structure and characters


@dataclass
class Character:
    """Character of the class group, given by exponents on the cyclic basis.

    Values are roots of unity handled as exact angle fractions; the
    complex value is produced only at evaluation time.
    """

    orders: tuple[int, ...]
    exps: tuple[int, ...]
    _tuples: tuple[tuple[int, ...], ...]

    def angle(self, index: int) -> Fraction:
        """Angle t in [0, 1) with value exp(2*pi*i*t) at element index."""
        t = Fraction(0)
        for w, v, n in zip(self.exps, self._tuples[index], self.orders):
            t += Fraction(w * v, n)
        return t % 1

    def __call__(self, index: int) -> complex:
        t = self.angle(index)
        if t == 0:
            return complex(1.0, 0.0)
        if 2 * t == 1:
            return complex(-1.0, 0.0)
        if 4 * t == 1:
            return complex(0.0, 1.0)
        if 4 * t == 3:
            return complex(0.0, -1.0)
        return complex(np.exp(2j * np.pi * float(t)))

    @property
    def is_trivial(self) -> bool:
        return all(w == 0 for w in self.exps)

    def conjugate_exps(self) -> tuple[int, ...]:
        return tuple((-w) % n for w, n in zip(self.exps, self.orders))


class ClassGroup:
    """Form class group of a negative discriminant.

    elements are all reduced primitive forms, sorted, with the principal
    form first; table[i][j] is the index of the composite; structure
    lists cyclic factor orders (prime powers, one block per prime).
    """

    def __init__(self, disc: int, elements: list[QuadForm],
                 table: list[list[int]] | None = None):
        self.disc = disc
        self.elements = list(elements)
        self.h = len(self.elements)
        self._index = {f.astuple(): i for i, f in enumerate(self.elements)}
        if len(self._index) != self.h:
            raise ValueError("duplicate forms in element list")
        self.identity = self._index[principal_form(disc).astuple()]
        if table is None:
            table = [[self._index[compose(f, g).astuple()]
                      for g in self.elements] for f in self.elements]
        self.table = [list(map(int, row)) for row in table]
        self._inverse = self._find_inverses()
        self._decompose()
        self._char_matrix = None

    # -- basic group operations ------------------------------------------

    def index(self, form: QuadForm) -> int:
        key = reduce(form).astuple()
        if key not in self._index:
            raise ValueError(f"form {form.astuple()} does not belong to disc {self.disc}")
        return self._index[key]

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inv(self, i: int) -> int:
        return self._inverse[i]

    def pow(self, i: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(i), -n)
        r, b = self.identity, i
        while n:
            if n & 1:
                r = self.table[r][b]
            b = self.table[b][b]
            n >>= 1
        return r

    def order(self, i: int) -> int:
        n, x = 1, i
        while x != self.identity:
            x = self.table[x][i]
            n += 1
        return n

    def _find_inverses(self) -> list[int]:
        inv = [-1] * self.h
        for i in range(self.h):
            row = self.table[i]
            inv[i] = row.index(self.identity)
        return inv

    # -- cyclic decomposition ---------------------------------------------

    def _decompose(self):
        """Split into prime-power cyclic factors and tag every element
        with its exponent tuple on the chosen basis."""
        basis: list[int] = []
        orders: list[int] = []
        tuples = {self.identity: ()}
        if self.h > 1:
            for q in sorted(int(p) for p in factorint(self.h)):
                self._peel_prime(q, basis, orders, tuples)
        if len(tuples) != self.h:
            raise ArithmeticError("cyclic decomposition failed to span the group")
        self.structure = tuple(orders)
        self.basis = tuple(basis)
        self.exponent_tuples = tuple(tuples[i] for i in range(self.h))
        rng = [range(n) for n in orders]
        self.characters = tuple(
            Character(tuple(orders), tuple(w), self.exponent_tuples)
            for w in product(*rng)
        )
        self._char_index = {c.exps: i for i, c in enumerate(self.characters)}

    def _peel_prime(self, q: int, basis, orders, tuples):
        """Extend basis/orders/tuples by a basis of the q-part."""
        hq = 1
        h = self.h
        while h % q == 0:
            hq *= q
            h //= q
        cofactor = self.h // hq
        # component map onto the q-part: g -> g^(cofactor * t), t*cofactor = 1 mod hq
        t = pow(cofactor, -1, hq)
        sylow = sorted({self.pow(i, cofactor * t) for i in range(self.h)})
        span = {self.identity: ()}
        local_basis: list[int] = []
        local_orders: list[int] = []
        while len(span) < len(sylow):
            # element of maximal order in the quotient by the current span
            best, best_t = None, 0
            for g in sylow:
                if g in span:
                    continue
                tq, x = 1, g
                while x not in span:
                    x = self.pow(x, q)
                    tq *= q
                if tq > best_t:
                    best, best_t = g, tq
            lifted = None
            for s in span:
                cand = self.mul(best, s)
                if self.pow(cand, best_t) != self.identity:
                    continue
                if best_t > 1 and self.pow(cand, best_t // q) in span:
                    continue
                lifted = cand
                break
            if lifted is None:
                raise ArithmeticError("no order-preserving lift found for basis element")
            new_span = {g: tup + (0,) for g, tup in span.items()}
            cur = self.identity
            for e in range(1, best_t):
                cur = self.mul(cur, lifted)
                for g, tup in span.items():
                    y = self.mul(g, cur)
                    if y in new_span:
                        raise ArithmeticError("basis extension is not direct")
                    new_span[y] = tup + (e,)
            span = new_span
            local_basis.append(lifted)
            local_orders.append(best_t)
        # combine: every spanned element factors as (previous part)*(q part)
        new_tuples = {}
        for g, tup in tuples.items():
            for s, stup in span.items():
                prod = self.mul(g, s)
                if prod in new_tuples:
                    raise ArithmeticError("prime blocks do not combine directly")
                new_tuples[prod] = tup + stup
        tuples.clear()
        tuples.update(new_tuples)
        basis.extend(local_basis)
        orders.extend(local_orders)

    # -- characters ---------------------------------------------------------

    def character_index(self, exps: tuple[int, ...]) -> int:
        return self._char_index[tuple(exps)]

    def character_matrix(self) -> np.ndarray:
        """Complex matrix C[chi_index, element_index] of character values."""
        if self._char_matrix is None:
            if self.h == 1:
                self._char_matrix = np.ones((1, 1), dtype=complex)
            else:
                v = np.array(self.exponent_tuples, dtype=float)  # h x r
                w = np.array([c.exps for c in self.characters], dtype=float)
                n = np.array(self.structure, dtype=float)
                ang = (w / n) @ v.T  # chars x elements
                self._char_matrix = np.exp(2j * np.pi * ang)
        return self._char_matrix

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "disc": self.disc,
            "forms": [list(f.astuple()) for f in self.elements],
            "table": [list(row) for row in self.table],
            "structure": list(self.structure),
        }

    @classmethod
    def from_json(cls, data: dict) -> "ClassGroup":
        try:
            disc = int(data["disc"])
            forms = [QuadForm(*map(int, t)) for t in data["forms"]]
            table = [[int(k) for k in row] for row in data["table"]]
            structure = [int(n) for n in data["structure"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise CacheError(f"malformed class group record: {exc}") from exc
        h = len(forms)
        if any(f.disc != disc or not is_reduced(f) for f in forms):
            raise CacheError("cached forms are not reduced forms of the stated discriminant")
        if len(table) != h or any(len(row) != h for row in table):
            raise CacheError("cached composition table has wrong shape")
        if any(set(row) != set(range(h)) for row in table):
            raise CacheError("cached composition table is not a Latin square")
        group = cls(disc, forms, table)
        if list(group.structure) != structure:
            raise CacheError("cached structure disagrees with the composition table")
        spot = min(h, 6)
        for i in range(spot):
            for j in range(spot):
                if group.table[i][j] != group.index(compose(forms[i], forms[j])):
                    raise CacheError("cached composition table fails a composition spot check")
        return group


def build_class_group(disc: int) -> ClassGroup:
    """Enumerate reduced forms of the discriminant and build the full group."""
    forms = enumerate_reduced(disc)
    if not forms:
        raise ValueError(f"{disc} is not a valid discriminant")
    return ClassGroup(disc, forms)


# ---------------------------------------------------------------------------
# disk cache


def _cache_path(disc: int, cache_dir: str) -> str:
    return os.path.join(cache_dir, f"classgroup_{-disc}.json")


def save_class_group(group: ClassGroup, cache_dir: str) -> str:
    os.makedirs(cache_dir, exist_ok=True)
    path = _cache_path(group.disc, cache_dir)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(group.to_json(), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    os.replace(tmp, path)
    return path


def get_class_group(disc: int, cache_dir: str | None = None) -> ClassGroup:
    """Load the group from cache if present (refusing corrupt files), else build.

    Freshly built groups are persisted when a cache directory is given.
    """
    if cache_dir is not None:
        path = _cache_path(disc, cache_dir)
        if os.path.exists(path):
            try:
                with open(path) as fh:
                    data = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise CacheError(f"unreadable class group cache {path}: {exc}") from exc
            group = ClassGroup.from_json(data)
            if group.disc != disc:
                raise CacheError(f"cache {path} holds disc {group.disc}, wanted {disc}")
            return group
    group = build_class_group(disc)
    if cache_dir is not None:
        save_class_group(group, cache_dir)
    return group


# ---------------------------------------------------------------------------
# prime forms and mass enumeration


def prime_form(disc: int, p: int, rho: int | None = None) -> QuadForm:
    """A form of leading coefficient p, oriented by a square root of the
    discriminant: the middle coefficient b satisfies b^2 = disc mod 4p.

    For disc = -4d the root rho of rho^2 = -d mod p gives b = 2*rho; for
    odd disc, b is the odd representative of rho mod p. Unreduced output.
    """
    if not is_valid_disc(disc):
        raise ValueError(f"{disc} is not a negative discriminant")
    if p == 2 or not isprime(p):
        raise ValueError("prime_form expects an odd prime")
    if disc % p == 0:
        raise ValueError(f"{p} divides the discriminant")
    if int(legendre_symbol(disc % p, p)) != 1:
        raise ValueError(f"{p} is inert for discriminant {disc}")
    if disc % 4 == 0:
        d = -disc // 4
        if rho is None:
            r = int(sqrt_mod((-d) % p, p))
            rho = min(r, p - r)
        if (rho * rho + d) % p:
            raise ValueError(f"rho={rho} is not a square root of {-d} mod {p}")
        b = 2 * rho
    else:
        d = -disc
        if rho is None:
            r = int(sqrt_mod((-d) % p, p))
            rho = min(r, p - r)
        if (rho * rho + d) % p:
            raise ValueError(f"rho={rho} is not a square root of {-d} mod {p}")
        b = rho if rho % 2 else rho + p
    c, rem = divmod(b * b - disc, 4 * p)
    assert rem == 0
    return QuadForm(p, b, c)


def squarefree_mask(limit: int) -> np.ndarray:
    """Boolean array m[0..limit], True where the index is squarefree."""
    mask = np.ones(limit + 1, dtype=bool)
    mask[0] = False
    for q in range(2, math.isqrt(limit) + 1):
        mask[q * q :: q * q] = False
    return mask


def fundamental_disc_mask(limit: int) -> np.ndarray:
    """Boolean array f[0..limit], True at D where -D is a fundamental discriminant."""
    sf = squarefree_mask(limit)
    out = np.zeros(limit + 1, dtype=bool)
    idx = np.arange(limit + 1)
    out[(idx % 4 == 3) & sf] = True
    m = idx[4::4] // 4
    quad = (sf[: limit // 4 + 1][m] & ((m % 4 == 1) | (m % 4 == 2)))
    out[4::4] = quad
    return out


def reduced_forms_upto(max_absdisc: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized census of all reduced primitive forms with |disc| <= bound.

    Returns (counts, max_a): counts[D] is the number of reduced primitive
    forms of discriminant -D (the class number where -D is a valid
    discriminant), max_a[D] the largest leading coefficient among them.
    """
    counts = np.zeros(max_absdisc + 1, dtype=np.int64)
    max_a = np.zeros(max_absdisc + 1, dtype=np.int64)
    for a in range(1, math.isqrt(max_absdisc // 3) + 1):
        for b in range(-a, a + 1):
            c_lo = max(a, -(-(b * b + 3) // (4 * a)))  # smallest c with disc <= -3
            c_hi = (b * b + max_absdisc) // (4 * a)
            if c_hi < c_lo:
                continue
            c = np.arange(c_lo, c_hi + 1, dtype=np.int64)
            absdisc = 4 * a * c - b * b
            keep = absdisc >= 3
            if b < 0:
                keep &= (c != a) & (a != -b)
            keep &= np.gcd(np.gcd(a, b), c) == 1
            idx = absdisc[keep]
            np.add.at(counts, idx, 1)
            max_a[idx] = np.maximum(max_a[idx], a)
    return counts, max_a
