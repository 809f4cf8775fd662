"""Truncated Laurent series over a residue field, and models of places of F_q(t)."""

from __future__ import annotations

import math
import os

from .errors import DivisionByZero, HenselConditionFailed, MismatchedField, PrecisionExhausted
from .fields import FieldElement, GF, Poly, RationalFunction, prime_power_exponent

DEFAULT_PREC = 64


def max_precision():
    return int(os.environ.get("DRINFELD_MAX_PREC", "4096"))


def _conv(F, a, b, n):
    """First n coefficients of the product of two coefficient lists."""
    out = [0] * n
    exp, log = F._exp, F._log
    lb = len(b)
    if F.p == 2:
        for i, x in enumerate(a):
            if i >= n:
                break
            if x:
                lx = log[x]
                for j in range(min(lb, n - i)):
                    y = b[j]
                    if y:
                        out[i + j] ^= exp[lx + log[y]]
        return out
    if F.e == 1:
        p = F.p
        for i, x in enumerate(a):
            if i >= n:
                break
            if x:
                lx = log[x]
                for j in range(min(lb, n - i)):
                    y = b[j]
                    if y:
                        out[i + j] += exp[lx + log[y]]
        return [c % p for c in out]
    add = F.add
    for i, x in enumerate(a):
        if i >= n:
            break
        if x:
            lx = log[x]
            for j in range(min(lb, n - i)):
                y = b[j]
                if y:
                    out[i + j] = add(out[i + j], exp[lx + log[y]])
    return out


class LocalElement:
    """sum_k coeffs[k] * pi^(start + k), known modulo pi^prec (``prec=None``: exact).

    Stored coefficients carry no leading or trailing zeros; every exponent between the
    last stored term and ``prec`` has coefficient zero.  An element whose stored list is
    empty is exact zero (``prec is None``) or zero-within-precision.
    """

    __slots__ = ("field", "start", "coeffs", "prec")

    def __init__(self, field, start, coeffs, prec=None):
        coeffs = list(coeffs)
        if prec is not None and start + len(coeffs) > prec:
            coeffs = coeffs[: max(0, prec - start)]
        lo = 0
        while lo < len(coeffs) and coeffs[lo] == 0:
            lo += 1
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        coeffs = coeffs[lo:]
        start += lo
        if not coeffs:
            start = prec if prec is not None else 0
        self.field = field
        self.start = start
        self.coeffs = tuple(coeffs)
        self.prec = prec

    # constructors ---------------------------------------------------------------
    @classmethod
    def zero(cls, field, prec=None):
        return cls(field, 0, (), prec)

    @classmethod
    def constant(cls, c, prec=None):
        return cls(c.field, 0, (c.value,), prec)

    @classmethod
    def monomial(cls, c, k, prec=None):
        return cls(c.field, k, (c.value,), prec)

    @classmethod
    def one(cls, field):
        return cls(field, 0, (1,))

    @classmethod
    def pi(cls, field):
        return cls(field, 1, (1,))

    @classmethod
    def from_literal(cls, field, lit):
        """Parse ``{v_min, coeffs: [...], prec}``; coefficients are field encodings."""
        return cls(field, int(lit.get("v_min", 0)), [int(c) for c in lit["coeffs"]],
                   None if lit.get("prec") is None else int(lit["prec"]))

    def to_literal(self):
        return {"v_min": self.start, "coeffs": list(self.coeffs), "prec": self.prec}

    # predicates -----------------------------------------------------------------
    @property
    def is_exact(self):
        return self.prec is None

    def is_zero(self):
        """Exact zero."""
        return not self.coeffs and self.prec is None

    def is_zero_within_precision(self):
        return not self.coeffs

    def _vlow(self):
        """Lower bound on the valuation (exact for nonzero-within-precision)."""
        if self.coeffs:
            return self.start
        return math.inf if self.prec is None else self.prec

    def valuation(self):
        if self.coeffs:
            return self.start
        if self.prec is None:
            return math.inf
        raise PrecisionExhausted(f"element is O(pi^{self.prec}); valuation undetermined")

    def angular_component(self):
        if self.coeffs:
            return FieldElement(self.field, self.coeffs[0])
        if self.prec is None:
            raise ValueError("angular component of zero")
        raise PrecisionExhausted(f"element is O(pi^{self.prec}); angular component undetermined")

    def coefficient(self, k):
        if self.prec is not None and k >= self.prec:
            raise PrecisionExhausted(f"coefficient of pi^{k} beyond precision {self.prec}")
        i = k - self.start
        if 0 <= i < len(self.coeffs):
            return FieldElement(self.field, self.coeffs[i])
        return self.field.zero()

    @property
    def relative_precision(self):
        if self.prec is None:
            return math.inf
        return self.prec - self._vlow()

    # arithmetic -----------------------------------------------------------------
    def _check(self, other):
        if isinstance(other, LocalElement):
            if other.field != self.field:
                raise MismatchedField(f"{self.field!r} vs {other.field!r}")
            return other
        if isinstance(other, FieldElement):
            return LocalElement.constant(self.field(other) if other.field == self.field else other)
        if isinstance(other, int):
            return LocalElement(self.field, 0, (self.field.scalar(other),))
        return NotImplemented

    def truncate(self, prec):
        if prec is None or (self.prec is not None and self.prec <= prec):
            return self
        return LocalElement(self.field, self.start, self.coeffs, prec)

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        F = self.field
        prec = _min_prec(self.prec, other.prec)
        if not other.coeffs:
            return self.truncate(prec)
        if not self.coeffs:
            return other.truncate(prec)
        lo = min(self.start, other.start)
        hi = max(self.start + len(self.coeffs), other.start + len(other.coeffs))
        if prec is not None:
            hi = min(hi, prec)
        if hi <= lo:
            return LocalElement(F, 0, (), prec)
        out = [0] * (hi - lo)
        for k, c in enumerate(self.coeffs):
            i = self.start - lo + k
            if i >= len(out):
                break
            out[i] = c
        add = F.add
        for k, c in enumerate(other.coeffs):
            i = other.start - lo + k
            if i >= len(out):
                break
            if c:
                out[i] = add(out[i], c)
        return LocalElement(F, lo, out, prec)

    __radd__ = __add__

    def __neg__(self):
        neg = self.field.neg
        return LocalElement(self.field, self.start, [neg(c) for c in self.coeffs], self.prec)

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
        F = self.field
        if self.is_zero() or other.is_zero():
            return LocalElement.zero(F)
        va, vb = self._vlow(), other._vlow()
        prec = _min_prec(None if self.prec is None else self.prec + vb,
                         None if other.prec is None else other.prec + va)
        if not self.coeffs or not other.coeffs:
            return LocalElement(F, 0, (), prec)
        start = self.start + other.start
        n = len(self.coeffs) + len(other.coeffs) - 1
        if prec is not None:
            n = min(n, prec - start)
        if n <= 0:
            return LocalElement(F, 0, (), prec)
        return LocalElement(F, start, _conv(F, self.coeffs, other.coeffs, n), prec)

    __rmul__ = __mul__

    def scale(self, c):
        """Multiply by a residue-field constant."""
        c = self.field(c)
        mul = self.field.mul
        return LocalElement(self.field, self.start, [mul(c.value, x) for x in self.coeffs], self.prec)

    def shift(self, k):
        """Multiply by pi^k."""
        return LocalElement(self.field, self.start + k, self.coeffs,
                            None if self.prec is None else self.prec + k)

    def inverse(self, prec=None):
        """Multiplicative inverse.

        Inexact inputs give absolute precision ``self.prec - 2 v``.  Exact inputs that are
        not monomials need an explicit absolute target ``prec``.
        """
        if self.is_zero():
            raise DivisionByZero("inverse of exact zero")
        if not self.coeffs:
            raise PrecisionExhausted("inverse of an element that is zero within precision")
        F = self.field
        v = self.start
        if self.prec is None:
            if len(self.coeffs) == 1:
                return LocalElement(F, -v, (F.inv(self.coeffs[0]),))
            if prec is None:
                raise PrecisionExhausted("inverse of a non-monomial exact element needs a target precision")
            target = prec
        else:
            target = self.prec - 2 * v
            if prec is not None:
                target = min(target, prec)
        n = target + v  # number of coefficients of the unit part's inverse
        if n <= 0:
            return LocalElement(F, 0, (), target)
        u = self.coeffs
        inv0 = F.inv(u[0])
        out = [inv0]
        mul, add, neg = F.mul, F.add, F.neg
        lu = len(u)
        for k in range(1, n):
            acc = 0
            for j in range(1, min(k, lu - 1) + 1):
                if u[j]:
                    acc = add(acc, mul(u[j], out[k - j]))
            out.append(mul(neg(acc), inv0))
        return LocalElement(F, -v, out, target)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        if self.is_zero():
            return self
        if other.prec is None and len(other.coeffs) > 1:
            if self.prec is None:
                raise PrecisionExhausted("exact division by a non-monomial needs a target precision")
            return self * other.inverse(prec=self.prec - self._vlow())
        return self * other.inverse()

    def frobenius(self, power):
        """self^power for power a power of the characteristic: coefficient-wise Frobenius."""
        F = self.field
        if power == 1:
            return self
        if prime_power_exponent(power, F.p) is None:
            raise ValueError(f"{power} is not a power of {F.p}")
        if not self.coeffs:
            return LocalElement(F, 0, (), None if self.prec is None else self.prec * power)
        out = [0] * (power * (len(self.coeffs) - 1) + 1)
        fpow = F.pow
        for k, c in enumerate(self.coeffs):
            out[power * k] = fpow(c, power)
        return LocalElement(F, power * self.start, out, None if self.prec is None else self.prec * power)

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        p = self.field.p
        k = 1
        while n and n % p == 0:
            n //= p
            k *= p
        acc, base = LocalElement.one(self.field), self
        while n:
            if n & 1:
                acc = acc * base
            n >>= 1
            if n:
                base = base * base
        return acc.frobenius(k) if k > 1 else acc

    # comparison -----------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, LocalElement):
            return NotImplemented
        return (self.field == other.field and self.start == other.start
                and self.coeffs == other.coeffs and self.prec == other.prec)

    def __hash__(self):
        return hash((self.field, self.start, self.coeffs, self.prec))

    def agrees_with(self, other):
        """Equal on every coefficient both operands certify."""
        prec = _min_prec(self.prec, other.prec)
        return (self - other).truncate(prec).is_zero_within_precision()

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coeffs[:8]):
            if c:
                e = self.start + k
                cs = repr(FieldElement(self.field, c))
                terms.append(cs if e == 0 else f"{cs}*pi^{e}")
        if len(self.coeffs) > 8:
            terms.append("...")
        body = " + ".join(terms) or "0"
        return body + ("" if self.prec is None else f" + O(pi^{self.prec})")


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ---------------------------------------------------------------------------
# polynomials with series coefficients
# ---------------------------------------------------------------------------

def poly_eval(coeffs, x):
    """Horner evaluation of sum coeffs[k] X^k (coefficients LocalElements)."""
    acc = None
    for c in reversed(coeffs):
        acc = c if acc is None else acc * x + c
    return acc


def _derivative(coeffs):
    out = []
    for k, c in enumerate(coeffs[1:], start=1):
        out.append(c * (k % c.field.p))
    return out


def newton_lift(F, x0, prec, max_iter=64):
    """Root x of the polynomial F (series coefficients, low degree first) near x0.

    Requires v(F(x0)) > 2 v(F'(x0)).  Stops once v(F(x)) >= prec.
    """
    dF = _derivative(F)
    if not dF or all(c.is_zero() for c in dF):
        raise HenselConditionFailed("derivative vanishes identically")
    x = x0
    fx = poly_eval(F, x)
    dfx = poly_eval(dF, x)
    if dfx.is_zero_within_precision():
        raise HenselConditionFailed("derivative vanishes at the initial point")
    vD = dfx.valuation()
    vF = fx._vlow()
    if not vF > 2 * vD:
        raise HenselConditionFailed(f"v(F(x0))={vF} is not > 2 v(F'(x0))={2 * vD}")
    work = prec - vD + max(0, -vD)
    for _ in range(max_iter):
        if vF >= prec:
            return x
        if fx.is_zero_within_precision():
            raise PrecisionExhausted("F(x) vanishes within precision below the target")
        step = fx * dfx.inverse(prec=work - vF + vD) if dfx.prec is None else fx * dfx.inverse()
        x = (x - step).truncate(work)
        fx = poly_eval(F, x)
        dfx = poly_eval(dF, x)
        new_vF = fx._vlow()
        if new_vF <= vF:
            raise PrecisionExhausted("Newton iteration stalled; coefficients too imprecise")
        vF = new_vF
    raise PrecisionExhausted("Newton iteration did not converge")


# ---------------------------------------------------------------------------
# place models
# ---------------------------------------------------------------------------

class PlaceModel:
    """A place v of L above a place v_0 of K = F_q(t), with the series image of t.

    ``t_builder(abs_prec)`` returns the image of t to at least that absolute precision;
    exact images ignore the argument.
    """

    def __init__(self, base, residue, kind, prime, e_ram, f_res, ext_degree, t_builder,
                 label=None, spec=None):
        if kind not in ("finite", "infinity"):
            raise ValueError("kind must be 'finite' or 'infinity'")
        if (kind == "finite") != (prime is not None):
            raise ValueError("finite places need a prime polynomial; infinity must not have one")
        deg_v0 = 1 if prime is None else prime.degree
        if e_ram < 1 or f_res < 1 or ext_degree < 1:
            raise ValueError("e_ram, f_res and ext_degree must be positive")
        if e_ram * f_res > ext_degree:
            raise ValueError("e_ram * f_res cannot exceed [L:K]")
        if residue.p != base.p or residue.e != base.e * deg_v0 * f_res:
            raise ValueError("residue field must have q^(deg v0 * f) elements")
        self.base = base
        self.residue = residue
        self.kind = kind
        self.prime = prime
        self.e_ram = e_ram
        self.f_res = f_res
        self.deg_v0 = deg_v0
        self.ext_degree = ext_degree
        self._t_builder = t_builder
        self._cache = {}
        self.label = label or (f"({prime!r})" if prime is not None else "inf")
        self.spec = spec
        self._emb = base.embedding_into(residue)

    def __repr__(self):
        return (f"PlaceModel({self.label}, e={self.e_ram}, f={self.f_res}, "
                f"deg={self.deg_v0}, d={self.ext_degree})")

    @property
    def q(self):
        return self.base.q

    def embed_constant(self, c):
        """Image in the residue field of a constant of K."""
        v = c.value if isinstance(c, FieldElement) else int(c)
        return FieldElement(self.residue, self._emb[v])

    def t_image(self, prec=DEFAULT_PREC):
        exact = self._cache.get(("t", None))
        if exact is not None:
            return exact
        key = ("t", prec)
        if key not in self._cache:
            t = self._t_builder(prec)
            self._cache[("t", None) if t.prec is None else key] = t
            return t
        return self._cache[key]

    @property
    def t_valuation(self):
        if self.prime is None:
            return -self.e_ram
        return self.e_ram * (1 if self.prime == Poly.t(self.base) else 0)

    def valuation_of(self, g):
        """Exact valuation at v of a nonzero element of K."""
        if isinstance(g, Poly):
            g = RationalFunction(g)
        return self.e_ram * g.valuation(self.prime)

    # constructors ---------------------------------------------------------------
    @classmethod
    def finite_unramified(cls, prime):
        """The completion of K at a monic irreducible ``prime``, uniformizer pi = prime(t)."""
        base = prime.field
        k = prime.degree
        if prime != prime.monic() or k < 1:
            raise ValueError("prime must be monic of positive degree")
        residue = base.extension(k) if k > 1 else base
        emb = base.embedding_into(residue)
        lifted = Poly(residue, [emb[c] for c in prime.coeffs])
        theta = next(x for x in residue.elements() if lifted(x) == residue.zero())
        spec = {"kind": "finite", "prime": prime.to_list(), "e_ram": 1, "f_res": 1,
                "ext_degree": 1, "t_image": "auto-unramified"}
        if k == 1:
            t = LocalElement(residue, 0, (theta.value, 1))
            return cls(base, residue, "finite", prime, 1, 1, 1, lambda _p: t, spec=spec)
        coeffs_series = [LocalElement(residue, 0, (c,)) for c in lifted.coeffs]

        def build(prec):
            G = list(coeffs_series)
            G[0] = G[0] - LocalElement.pi(residue)
            return newton_lift(G, LocalElement.constant(theta), prec + 1).truncate(prec + 1)

        return cls(base, residue, "finite", prime, 1, 1, 1, build, spec=spec)

    @classmethod
    def finite_ramified(cls, prime, e_ram, ext_degree=None):
        """Degree-one place (t - c) with t = c + pi^e (a Kummer-type totally ramified model)."""
        if prime.degree != 1:
            raise ValueError("ramified helper supports degree-one places")
        base = prime.field
        c = base.neg(prime.coeffs[0])
        t = LocalElement(base, 0, (c,) + (0,) * (e_ram - 1) + (1,))
        ext = ext_degree or e_ram
        spec = {"kind": "finite", "prime": prime.to_list(), "e_ram": e_ram, "f_res": 1,
                "ext_degree": ext, "t_image": t.to_literal()}
        return cls(base, base, "finite", prime, e_ram, 1, ext, lambda _p: t, spec=spec)

    @classmethod
    def infinity(cls, base, e_ram=1, ext_degree=None):
        """The place at infinity, totally ramified of index e with t = pi^(-e)."""
        t = LocalElement(base, -e_ram, (1,))
        ext = ext_degree or e_ram
        spec = {"kind": "infinity", "e_ram": e_ram, "f_res": 1, "ext_degree": ext,
                "t_image": t.to_literal()}
        return cls(base, base, "infinity", None, e_ram, 1, ext, lambda _p: t, spec=spec)

    @classmethod
    def from_relation(cls, prime, relation, initial, e_ram, ext_degree, f_res=1, residue=None):
        """t is the root near ``initial`` of sum c * P^i * T^j over (c, i, j) in ``relation``,
        where P is the uniformizer."""
        base = prime.field if prime is not None else initial.field
        residue = residue or initial.field
        emb = base.embedding_into(residue)
        degT = max(j for _, _, j in relation)
        coeffs = [LocalElement.zero(residue) for _ in range(degT + 1)]
        for c, i, j in relation:
            cv = c.value if isinstance(c, FieldElement) else base.scalar(c)
            coeffs[j] = coeffs[j] + LocalElement(residue, i, (emb[cv],))
        kind = "finite" if prime is not None else "infinity"
        spec = {"kind": kind, "e_ram": e_ram, "f_res": f_res, "ext_degree": ext_degree,
                "t_image": {"relation": [[_enc(c), i, j] for c, i, j in relation],
                            "initial": initial.to_literal()}}
        if prime is not None:
            spec["prime"] = prime.to_list()

        def build(prec):
            return newton_lift(coeffs, initial, prec).truncate(prec)

        return cls(base, residue, kind, prime, e_ram, f_res, ext_degree, build, spec=spec)


def _enc(c):
    return c.value if isinstance(c, FieldElement) else int(c)


def embed_rational(g, model, prec=DEFAULT_PREC):
    """Image of g in F_q(t) in the completion at ``model``, to absolute precision >= prec."""
    if isinstance(g, Poly):
        g = RationalFunction(g)
    if g.is_zero():
        return LocalElement.zero(model.residue)
    key = ("g", g, prec)
    if key in model._cache:
        return model._cache[key]
    R = model.residue
    emb = model._emb
    vg = model.valuation_of(g)
    tprec = prec + 8
    result = None
    for _ in range(12):
        t = model.t_image(tprec)
        num = poly_eval([LocalElement(R, 0, (emb[c],)) for c in g.num.coeffs], t)
        den = poly_eval([LocalElement(R, 0, (emb[c],)) for c in g.den.coeffs], t)
        if den.is_zero():
            raise DivisionByZero("denominator maps to zero")
        if not den.is_zero_within_precision() and not num.is_zero_within_precision():
            if den.prec is None and len(den.coeffs) > 1:
                result = num * den.inverse(prec=prec - num.start)
            else:
                result = num * den.inverse()
            if (result.prec is None or result.prec >= prec) and result.coeffs and result.start == vg:
                break
        elif num.is_zero():
            raise ValueError("numerator maps to zero")
        result = None
        tprec = 2 * tprec
    if result is None:
        raise PrecisionExhausted(f"could not embed {g!r} to precision {prec}")
    if result.prec is not None:
        result = result.truncate(prec)
    model._cache[key] = result
    return result


def random_series(field, rng, valuation, length, prec=None):
    """Series with the given valuation and ``length`` random coefficients (leading one nonzero)."""
    coeffs = [rng.randrange(1, field.q)] + [rng.randrange(field.q) for _ in range(length - 1)]
    return LocalElement(field, valuation, coeffs, prec)


def product_formula_sum(g):
    """sum over all places rho (including infinity) of deg(rho) * v_rho(g)."""
    from .fields import poly_factor

    total = g.valuation(None)
    for part in (g.num, g.den):
        if part.degree > 0:
            _, facs = poly_factor(part)
            for rho in facs:
                total += rho.degree * g.valuation(rho)
    return total


__all__ = [
    "DEFAULT_PREC", "LocalElement", "PlaceModel", "embed_rational", "newton_lift",
    "poly_eval", "random_series", "product_formula_sum", "max_precision", "GF",
]
