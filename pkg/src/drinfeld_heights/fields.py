"""Finite fields F_{p^e}, polynomials and rational functions over them.

Field elements are encoded as integers ``0 <= v < q`` whose base-p digits are
the coordinates on the power basis ``1, X, ..., X^{e-1}`` of ``F_p[X]/(m)``.
Multiplication goes through exp/log tables built once per field.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

from .errors import (
    DivisionByZero,
    EmptyTerms,
    InvalidQ,
    MismatchedField,
    ZeroPolynomial,
)

MAX_FIELD_SIZE = 1 << 20


def _is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n):
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def prime_power_exponent(q, p):
    """Return k >= 1 with q == p**k, or None."""
    if q < p:
        return None
    k = 0
    while q % p == 0:
        q //= p
        k += 1
    return k if q == 1 else None


# ---------------------------------------------------------------------------
# polynomials over F_p as plain lists, used only to build fields
# ---------------------------------------------------------------------------

def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _fp_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _fp_mod(a, m, p):
    a = list(a)
    inv = pow(m[-1], p - 2, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, y in enumerate(m):
            a[shift + i] = (a[shift + i] - c * y) % p
        _trim(a)
    return a


def _fp_sub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _fp_gcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _fp_mod(a, b, p)
    return a


def is_irreducible_fp(modulus, p):
    """Rabin-style test: no factor shared with X^{p^k} - X for k <= deg/2."""
    m = _trim([c % p for c in modulus])
    n = len(m) - 1
    if n < 1:
        return False
    h = [0, 1]
    for _ in range(1, n // 2 + 1):
        # h <- h^p mod m
        acc, base, k = [1], h, p
        while k:
            if k & 1:
                acc = _fp_mod(_fp_mul(acc, base, p), m, p)
            base = _fp_mod(_fp_mul(base, base, p), m, p)
            k >>= 1
        h = acc
        if len(_fp_gcd(m, _fp_sub(h, [0, 1], p), p)) > 1:
            return False
    return True


def first_irreducible(p, e):
    """First monic irreducible of degree e over F_p, scanning lower coefficients in integer order."""
    if e == 1:
        return (0, 1)
    for idx in range(p ** e):
        low = [(idx // p ** i) % p for i in range(e)]
        if low[0] == 0:
            continue
        cand = low + [1]
        if is_irreducible_fp(cand, p):
            return tuple(cand)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# ---------------------------------------------------------------------------
# finite fields
# ---------------------------------------------------------------------------

class FiniteField:
    """The field F_{p^e} = F_p[X]/(modulus)."""

    def __init__(self, p, e=1, modulus=None):
        if not _is_prime(p):
            raise ValueError(f"characteristic {p} is not prime")
        if e < 1:
            raise ValueError("degree e must be >= 1")
        if p ** e > MAX_FIELD_SIZE:
            raise ValueError(f"field of size {p}^{e} exceeds desk-scale limit")
        if modulus is None:
            modulus = first_irreducible(p, e)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != e + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree e")
        if e > 1 and not is_irreducible_fp(modulus, p):
            raise ValueError(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.e = e
        self.q = p ** e
        self.modulus = modulus
        self._key = (p, e, modulus)
        self._build_tables()

    def _slow_mul(self, a, b):
        p = self.p
        ca, cb = self.coords(a), self.coords(b)
        prod = _fp_mod(_fp_mul(_trim(list(ca)), _trim(list(cb)), p), list(self.modulus), p)
        return self._from_digits(prod)

    def _from_digits(self, digits):
        v, m = 0, 1
        for d in digits:
            v += (d % self.p) * m
            m *= self.p
        return v

    def coords(self, v):
        out = []
        for _ in range(self.e):
            out.append(v % self.p)
            v //= self.p
        return tuple(out)

    def _build_tables(self):
        q, p = self.q, self.p
        if q == 2:
            gen = 1
        else:
            order = q - 1
            factors = _prime_factors(order)
            gen = None
            for cand in range(2, q) if q > 2 else []:
                ok = True
                for ell in factors:
                    x, n, acc = cand, order // ell, 1
                    while n:
                        if n & 1:
                            acc = self._slow_mul(acc, x)
                        x = self._slow_mul(x, x)
                        n >>= 1
                    if acc == 1:
                        ok = False
                        break
                if ok:
                    gen = cand
                    break
            if gen is None:  # q == 3: 2 is a generator; loop above covers it
                raise AssertionError("no generator")  # pragma: no cover
        exp = [0] * (2 * (q - 1))
        log = [0] * q
        x = 1
        for i in range(q - 1):
            exp[i] = x
            log[x] = i
            x = self._slow_mul(x, gen)
        for i in range(q - 1, 2 * (q - 1)):
            exp[i] = exp[i - (q - 1)]
        self._exp, self._log, self.generator_value = exp, log, gen
        if p == 2:
            self._neg = list(range(q))
        else:
            self._neg = [self._from_digits([(-d) % p for d in self.coords(v)]) for v in range(q)]
        self._add_table = None
        if p != 2 and self.e > 1 and q <= 1024:
            tab = [0] * (q * q)
            digits = [self.coords(v) for v in range(q)]
            for a in range(q):
                da = digits[a]
                for b in range(a, q):
                    s = self._from_digits([(x + y) for x, y in zip(da, digits[b])])
                    tab[a * q + b] = s
                    tab[b * q + a] = s
            self._add_table = tab

    # raw integer-encoded arithmetic -------------------------------------------------
    def add(self, a, b):
        if self.p == 2:
            return a ^ b
        if self.e == 1:
            return (a + b) % self.p
        if self._add_table is not None:
            return self._add_table[a * self.q + b]
        return self._from_digits([x + y for x, y in zip(self.coords(a), self.coords(b))])

    def neg(self, a):
        return self._neg[a]

    def sub(self, a, b):
        return self.add(a, self._neg[b])

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a):
        if a == 0:
            raise DivisionByZero("inverse of zero in " + repr(self))
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def pow(self, a, n):
        if a == 0:
            if n > 0:
                return 0
            if n == 0:
                return 1
            raise DivisionByZero("zero to a negative power")
        return self._exp[(self._log[a] * n) % (self.q - 1)]

    def scalar(self, n):
        """Encoding of the integer n viewed in the prime field."""
        return n % self.p

    # element-level API ---------------------------------------------------------------
    def __call__(self, value):
        if isinstance(value, FieldElement):
            if value.field != self:
                raise MismatchedField(f"{value!r} is not in {self!r}")
            return value
        value = int(value)
        if not 0 <= value < self.q:
            raise ValueError(f"encoding {value} out of range for {self!r}")
        return FieldElement(self, value)

    def from_int(self, n):
        return FieldElement(self, n % self.p)

    def from_coords(self, coords):
        coords = list(coords)
        if len(coords) > self.e:
            # reduce a longer polynomial in X modulo the modulus
            coords = _fp_mod(_trim([c % self.p for c in coords]), list(self.modulus), self.p)
        return FieldElement(self, self._from_digits(coords))

    def zero(self):
        return FieldElement(self, 0)

    def one(self):
        return FieldElement(self, 1)

    def primitive(self):
        return FieldElement(self, self.generator_value)

    def elements(self):
        return [FieldElement(self, v) for v in range(self.q)]

    def nonzero_elements(self):
        return [FieldElement(self, v) for v in range(1, self.q)]

    def extension(self, k):
        """The field F_{q^k}, with its default modulus over F_p."""
        return GF(self.p, self.e * k)

    def embedding_into(self, big):
        """Integer-encoding map self -> big sending X to the least root of self.modulus."""
        return _embedding(self, big)

    def __eq__(self, other):
        return isinstance(other, FiniteField) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        if self.e == 1:
            return f"GF({self.p})"
        return f"GF({self.p}^{self.e}, modulus={list(self.modulus)})"

    def to_config(self):
        return {"p": self.p, "e": self.e, "modulus": list(self.modulus)}

    @classmethod
    def from_config(cls, cfg):
        return GF(int(cfg["p"]), int(cfg.get("e", 1)),
                  tuple(cfg["modulus"]) if cfg.get("modulus") is not None else None)


@functools.lru_cache(maxsize=None)
def GF(p, e=1, modulus=None):
    """Cached field constructor; equal parameters give the same table-backed object."""
    return FiniteField(p, e, modulus)


@functools.lru_cache(maxsize=None)
def _embedding(small, big):
    if small == big:
        return tuple(range(small.q))
    if small.p != big.p or big.e % small.e:
        raise MismatchedField(f"{small!r} does not embed in {big!r}")
    if small.e == 1:
        return tuple(range(small.q))
    theta = None
    for cand in range(big.q):
        acc = 0
        for c in reversed(small.modulus):
            acc = big.add(big.mul(acc, cand), big.scalar(c))
        if acc == 0:
            theta = cand
            break
    powers = [1]
    for _ in range(small.e - 1):
        powers.append(big.mul(powers[-1], theta))
    table = []
    for v in range(small.q):
        acc = 0
        for c, pw in zip(small.coords(v), powers):
            if c:
                acc = big.add(acc, big.mul(big.scalar(c), pw))
        table.append(acc)
    return tuple(table)


@dataclass(frozen=True)
class FieldElement:
    field: FiniteField
    value: int

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise MismatchedField(f"{self.field!r} vs {other.field!r}")
            return other.value
        if isinstance(other, int):
            return self.field.scalar(other)
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.add(self.value, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(self.value, o))

    def __rsub__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.sub(o, self.value))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(self.value, o))

    __rmul__ = __mul__

    def inverse(self):
        return FieldElement(self.field, self.field.inv(self.value))

    def __truediv__(self, other):
        o = self._other(other)
        if o is NotImplemented:
            return o
        return FieldElement(self.field, self.field.mul(self.value, self.field.inv(o)))

    def __pow__(self, n):
        return FieldElement(self.field, self.field.pow(self.value, n))

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == self.field.scalar(other)
        return isinstance(other, FieldElement) and self.field == other.field and self.value == other.value

    def __hash__(self):
        return hash((self.field, self.value))

    @property
    def coords(self):
        return self.field.coords(self.value)

    def embed(self, big):
        return FieldElement(big, self.field.embedding_into(big)[self.value])

    def __repr__(self):
        if self.field.e == 1:
            return str(self.value)
        terms = []
        for i, c in enumerate(self.coords):
            if c:
                mono = "" if i == 0 else ("w" if i == 1 else f"w^{i}")
                coef = "" if (c == 1 and i) else str(c)
                terms.append(coef + mono)
        return "+".join(reversed(terms)) or "0"


def frobenius_q(x, q):
    """x^q computed as repeated p-th powering."""
    k = prime_power_exponent(q, x.field.p)
    if k is None:
        raise InvalidQ(f"{q} is not a power of the characteristic {x.field.p}")
    for _ in range(k):
        x = x ** x.field.p
    return x


# ---------------------------------------------------------------------------
# linear algebra over F_p
# ---------------------------------------------------------------------------

def _rref(rows, p):
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], p - 2, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank_mod_p(rows, p):
    if not rows:
        return 0
    return len(_rref(rows, p)[0])


def nullspace_mod_p(rows, ncols, p):
    """Basis of {y in F_p^ncols : rows . y = 0}."""
    if not rows:
        return [[int(i == j) for i in range(ncols)] for j in range(ncols)]
    red, pivots = _rref(rows, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        y = [0] * ncols
        y[f] = 1
        for row, pc in zip(red, pivots):
            y[pc] = (-row[f]) % p
        basis.append(y)
    return basis


def solve_mod_p(rows, rhs, p):
    """One solution y of rows . y = rhs, or None."""
    ncols = len(rows[0])
    aug = [list(r) + [b % p] for r, b in zip(rows, rhs)]
    red, pivots = _rref(aug, p)
    if ncols in pivots:
        return None
    y = [0] * ncols
    for row, pc in zip(red, pivots):
        y[pc] = row[-1]
    return y


# ---------------------------------------------------------------------------
# additive polynomials
# ---------------------------------------------------------------------------

def _check_additive_terms(terms, domain):
    if not terms:
        raise EmptyTerms("additive polynomial has no terms")
    prev = 0
    out = []
    for c, power in terms:
        if c.field != domain:
            raise MismatchedField(f"coefficient {c!r} not in {domain!r}")
        if not c:
            raise ValueError("additive polynomial coefficients must be nonzero")
        if prime_power_exponent(power, domain.p) is None and power != 1:
            raise InvalidQ(f"exponent {power} is not a power of {domain.p}")
        if power <= prev:
            raise ValueError("exponents must be strictly increasing")
        prev = power
        out.append((c.value, power))
    return out


def _additive_matrix(terms, domain):
    f, p = domain, domain.p
    cols = []
    for i in range(f.e):
        b = p ** i
        acc = 0
        for c, power in terms:
            acc = f.add(acc, f.mul(c, f.pow(b, power)))
        cols.append(f.coords(acc))
    return [[cols[j][i] for j in range(f.e)] for i in range(f.e)]


def _span(basis, field):
    p = field.p
    out = set()
    for combo in itertools.product(range(p), repeat=len(basis)):
        digits = [sum(c * vec[i] for c, vec in zip(combo, basis)) % p for i in range(field.e)]
        out.add(field._from_digits(digits))
    return out


def additive_poly_roots(terms, domain):
    """All x in ``domain`` with sum_j c_j x^{Q_j} = 0 (including 0).

    ``terms`` is a list of (coefficient, Q_j) with Q_j strictly increasing powers of p.
    The kernel is computed as the null space of the F_p-linear map on domain.
    """
    raw = _check_additive_terms(terms, domain)
    mat = _additive_matrix(raw, domain)
    kernel = nullspace_mod_p(mat, domain.e, domain.p)
    return {FieldElement(domain, v) for v in _span(kernel, domain)}


def additive_poly_preimage(terms, target, domain):
    """All x in ``domain`` with sum_j c_j x^{Q_j} = target."""
    raw = _check_additive_terms(terms, domain)
    mat = _additive_matrix(raw, domain)
    y = solve_mod_p(mat, list(domain.coords(domain(target).value)), domain.p)
    if y is None:
        return set()
    part = domain._from_digits(y)
    kernel = nullspace_mod_p(mat, domain.e, domain.p)
    return {FieldElement(domain, domain.add(part, k)) for k in _span(kernel, domain)}


# ---------------------------------------------------------------------------
# univariate polynomials over F_q
# ---------------------------------------------------------------------------

class Poly:
    """Polynomial in t over a finite field; coefficients are integer encodings, lowest degree first."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs=()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.field = field
        self.coeffs = tuple(c)

    @classmethod
    def from_elements(cls, field, elems):
        return cls(field, [field(e).value for e in elems])

    @classmethod
    def monomial(cls, field, k, c=1):
        return cls(field, [0] * k + [c])

    @classmethod
    def t(cls, field):
        return cls(field, [0, 1])

    @classmethod
    def constant(cls, field, c):
        return cls(field, [c.value if isinstance(c, FieldElement) else c])

    @property
    def degree(self):
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    @property
    def lead(self):
        return FieldElement(self.field, self.coeffs[-1]) if self.coeffs else self.field.zero()

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def _check(self, other):
        if isinstance(other, FieldElement):
            other = Poly(self.field, [other.value])
        elif isinstance(other, int):
            other = Poly(self.field, [self.field.scalar(other)])
        if not isinstance(other, Poly):
            return NotImplemented
        if other.field != self.field:
            raise MismatchedField(f"{self.field!r} vs {other.field!r}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly(f, [f.add(self.coeff(i), other.coeff(i)) for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        f = self.field
        if self.is_zero() or other.is_zero():
            return Poly(f)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] = f.add(out[i + j], f.mul(a, b))
        return Poly(f, out)

    __rmul__ = __mul__

    def scale(self, c):
        c = c.value if isinstance(c, FieldElement) else c
        return Poly(self.field, [self.field.mul(c, x) for x in self.coeffs])

    def __divmod__(self, other):
        other = self._check(other)
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        f = self.field
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Poly(f), self
        quo = [0] * (dq + 1)
        inv = f.inv(other.coeffs[-1])
        db = other.degree
        for k in range(dq, -1, -1):
            c = f.mul(rem[k + db], inv)
            quo[k] = c
            if c:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] = f.sub(rem[k + j], f.mul(c, b))
        return Poly(f, quo), Poly(f, rem[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self):
        if self.is_zero():
            raise ZeroPolynomial("zero polynomial has no monic form")
        return self.scale(self.field.inv(self.coeffs[-1]))

    def gcd(self, other):
        a, b = self, self._check(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        acc, base = Poly(self.field, [1]), self
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def powmod(self, n, mod):
        acc, base = Poly(self.field, [1]), self % mod
        while n:
            if n & 1:
                acc = (acc * base) % mod
            base = (base * base) % mod
            n >>= 1
        return acc

    def derivative(self):
        f = self.field
        return Poly(f, [f.mul(f.scalar(i), c) for i, c in enumerate(self.coeffs)][1:])

    def frobenius(self, power):
        """f^power for power a power of p: coefficients raised, exponents scaled."""
        f = self.field
        if self.is_zero():
            return self
        out = [0] * (power * self.degree + 1)
        for i, c in enumerate(self.coeffs):
            out[power * i] = f.pow(c, power)
        return Poly(f, out)

    def __call__(self, x):
        """Horner evaluation; x may be a FieldElement of self.field or any ring element
        accepting multiplication and addition of FieldElements."""
        acc = None
        for c in reversed(self.coeffs or (0,)):
            ce = FieldElement(self.field, c)
            acc = ce if acc is None else acc * x + ce
        return acc

    def __eq__(self, other):
        if isinstance(other, int):
            return self.coeffs == Poly(self.field, [self.field.scalar(other)]).coeffs
        return isinstance(other, Poly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.field, self.coeffs))

    def __lt__(self, other):
        return (self.degree, self.coeffs[::-1]) < (other.degree, other.coeffs[::-1])

    def __repr__(self):
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            cs = repr(FieldElement(self.field, c))
            if self.field.e > 1 and "+" in cs:
                cs = f"({cs})"
            if i == 0:
                terms.append(cs)
            else:
                mono = "t" if i == 1 else f"t^{i}"
                terms.append(mono if c == 1 else f"{cs}*{mono}")
        return " + ".join(terms)

    def to_list(self):
        return list(self.coeffs)

    def base_change(self, big):
        emb = self.field.embedding_into(big)
        return Poly(big, [emb[c] for c in self.coeffs])


# ---------------------------------------------------------------------------
# factorization
# ---------------------------------------------------------------------------

@functools.lru_cache(maxsize=None)
def monic_irreducibles(field, k):
    """All monic irreducible polynomials of degree k, by sieving against lower degrees."""
    q = field.q
    smaller = [g for j in range(1, k // 2 + 1) for g in monic_irreducibles(field, j)]
    out = []
    for idx in range(q ** k):
        low = [(idx // q ** i) % q for i in range(k)]
        cand = Poly(field, low + [1])
        if k > 1 and cand.coeffs[0] == 0:
            continue
        if all(not (cand % g).is_zero() for g in smaller):
            out.append(cand)
    return tuple(out)


def _x_qk_minus_x(f, k):
    t = Poly.t(f.field)
    h = t
    for _ in range(k):
        h = h.powmod(f.field.q, f)
    return (h - t) % f


def is_irreducible(f):
    """No root in F_{q^k} for k <= deg/2, via gcd with t^{q^k} - t."""
    if f.degree < 1:
        return False
    for k in range(1, f.degree // 2 + 1):
        if f.gcd(_x_qk_minus_x(f, k)).degree > 0:
            return False
    return True


def poly_factor(f):
    """Return (lead, {monic irreducible: multiplicity}) with lead * prod == f.

    Distinct-degree splitting isolates the product of degree-k factors; when that
    product holds several factors they are separated by trial division against
    the degree-k monic irreducibles.
    """
    if f.is_zero():
        raise ZeroPolynomial("cannot factor the zero polynomial")
    lead = f.lead
    rem = f.monic()
    factors = {}

    def take(g):
        nonlocal rem
        mult = 0
        while True:
            quo, r = divmod(rem, g)
            if not r.is_zero():
                break
            rem = quo
            mult += 1
        factors[g] = factors.get(g, 0) + mult

    k = 1
    while rem.degree >= 2 * k:
        g = rem.gcd(_x_qk_minus_x(rem, k))
        if g.degree > 0:
            if g.degree == k:
                take(g)
            else:
                for cand in monic_irreducibles(f.field, k):
                    if (g % cand).is_zero():
                        take(cand)
        k += 1
    if rem.degree > 0:
        factors[rem] = factors.get(rem, 0) + 1
    return lead, dict(sorted(factors.items()))


# ---------------------------------------------------------------------------
# rational functions in t
# ---------------------------------------------------------------------------

class RationalFunction:
    """Reduced quotient num/den over F_q with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        field = num.field
        if den is None:
            den = Poly(field, [1])
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.is_zero():
            self.num, self.den = num, Poly(field, [1])
            return
        g = num.gcd(den)
        num, den = num // g, den // g
        c = field.inv(den.coeffs[-1])
        self.num, self.den = num.scale(c), den.scale(c)

    @classmethod
    def from_lists(cls, field, num, den=(1,)):
        return cls(Poly(field, num), Poly(field, den))

    @classmethod
    def t(cls, field):
        return cls(Poly.t(field))

    @classmethod
    def constant(cls, field, c):
        return cls(Poly.constant(field, c))

    @property
    def field(self):
        return self.num.field

    def is_zero(self):
        return self.num.is_zero()

    def _coerce(self, other):
        if isinstance(other, RationalFunction):
            if other.field != self.field:
                raise MismatchedField(f"{self.field!r} vs {other.field!r}")
            return other
        if isinstance(other, (Poly, FieldElement, int)):
            if isinstance(other, Poly):
                return RationalFunction(other)
            return RationalFunction(Poly(self.field, [0]) + other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of zero rational function")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        return RationalFunction(self.num ** n, self.den ** n)

    def frobenius(self, power):
        return RationalFunction(self.num.frobenius(power), self.den.frobenius(power))

    def valuation(self, prime=None):
        """Order at the place given by a monic irreducible ``prime``; ``None`` means infinity."""
        if self.is_zero():
            raise ValueError("valuation of zero")
        if prime is None:
            return self.den.degree - self.num.degree
        return _ord(self.num, prime) - _ord(self.den, prime)

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, RationalFunction) else other
        if o is NotImplemented:
            return False
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        if self.den.degree == 0:
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"

    def to_config(self):
        return {"numer": self.num.to_list(), "denom": self.den.to_list()}

    def base_change(self, big):
        return RationalFunction(self.num.base_change(big), self.den.base_change(big))

    def is_constant(self):
        return self.num.degree <= 0 and self.den.degree == 0


def _ord(f, prime):
    n = 0
    while True:
        quo, r = divmod(f, prime)
        if not r.is_zero():
            return n
        f = quo
        n += 1
