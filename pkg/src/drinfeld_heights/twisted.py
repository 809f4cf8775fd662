"""Twisted polynomials K{tau} and Drinfeld modules phi: F_q[t] -> K{tau}."""

from __future__ import annotations

from .errors import ConfigError, MonicizationError, ZeroGamma, ZeroMultiplier
from .fields import FieldElement, GF, Poly, RationalFunction
from .local import LocalElement, embed_rational, newton_lift


def _is_zero(c):
    return c.is_zero()


class TwistedPoly:
    """sum_i coeffs[i] tau^i with tau a = a^q tau.

    Coefficients are RationalFunction (global) or LocalElement (after localization).
    """

    __slots__ = ("q", "coeffs")

    def __init__(self, q, coeffs):
        self.q = q
        self.coeffs = {int(i): c for i, c in sorted(coeffs.items()) if not _is_zero(c)}

    @property
    def degree(self):
        return max(self.coeffs) if self.coeffs else -1

    @property
    def low(self):
        """Least exponent with a nonzero coefficient (r_0)."""
        return min(self.coeffs) if self.coeffs else -1

    def is_zero(self):
        return not self.coeffs

    def __getitem__(self, i):
        return self.coeffs.get(i)

    def __add__(self, other):
        if self.q != other.q:
            raise ValueError("twisted polynomials over different q")
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out[i] + c if i in out else c
        return TwistedPoly(self.q, out)

    def __mul__(self, other):
        return skew_mul(self, other)

    def __eq__(self, other):
        return isinstance(other, TwistedPoly) and self.q == other.q and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.q, tuple(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in self.coeffs.items():
            mono = "" if i == 0 else ("tau" if i == 1 else f"tau^{i}")
            parts.append(f"({c!r}){'*' + mono if mono else ''}")
        return " + ".join(parts)


def _frob(c, power):
    return c if power == 1 else c.frobenius(power)


def skew_mul(f, g):
    """Product in K{tau}: tau^i * b = b^(q^i) * tau^i."""
    if f.q != g.q:
        raise ValueError("twisted polynomials over different q")
    out = {}
    for i, a in f.coeffs.items():
        Q = f.q ** i
        for j, b in g.coeffs.items():
            term = a * _frob(b, Q)
            k = i + j
            out[k] = out[k] + term if k in out else term
    return TwistedPoly(f.q, out)


class DrinfeldModule:
    """A Drinfeld module over F_q(t) given by the image of t.

    ``model`` is set only when the coefficients are series at one place (for example
    after conjugating by a local element).
    """

    def __init__(self, base, phi_t, model=None):
        # base may be an extension F_{q^k} of the field of constants of A = F_q[t]
        k = 0
        while base.q > phi_t.q ** k:
            k += 1
        if base.q != phi_t.q ** k or k == 0:
            raise ValueError("coefficient field must be an extension of F_q")
        if phi_t.degree < 1:
            raise ValueError("phi_t must have tau-degree at least 1")
        self.base = base
        self.phi_t = phi_t
        self.model = model
        a0 = phi_t[0]
        if a0 is None:
            self.char_kind = "finite"
        else:
            if model is None and a0 != RationalFunction.t(base):
                raise ValueError("generic characteristic requires the tau^0 coefficient to be t")
            self.char_kind = "generic"

    @property
    def q(self):
        return self.phi_t.q

    @property
    def r(self):
        return self.phi_t.degree

    @property
    def r0(self):
        return self.phi_t.low

    @property
    def r0_eff(self):
        """First index >= 1 with a nonzero coefficient (plays the role of r_0 in generic characteristic)."""
        return min(i for i in self.phi_t.coeffs if i >= 1)

    def coefficient(self, i):
        return self.phi_t[i]

    def is_monic(self):
        top = self.phi_t[self.r]
        if isinstance(top, RationalFunction):
            return top == RationalFunction.constant(self.base, 1)
        return top.prec is None and top.coeffs == (1,) and top.start == 0

    def __repr__(self):
        return f"DrinfeldModule(q={self.q}, phi_t={self.phi_t!r})"

    # constructors ---------------------------------------------------------------
    @classmethod
    def from_coefficients(cls, base, coeffs):
        """coeffs: {i: RationalFunction | Poly | int}"""
        out = {}
        for i, c in coeffs.items():
            if isinstance(c, Poly):
                c = RationalFunction(c)
            elif isinstance(c, (int, FieldElement)):
                c = RationalFunction.constant(base, c if isinstance(c, FieldElement) else base.scalar(c))
            out[i] = c
        return cls(base, TwistedPoly(base.q, out))

    @classmethod
    def carlitz(cls, base):
        return cls.from_coefficients(base, {0: RationalFunction.t(base), 1: 1})

    @classmethod
    def e1_family(cls, base, r, r0=1):
        """phi_t = tau^r - t^(1 - q^r0) tau^r0."""
        t = RationalFunction.t(base)
        low = -(t ** (1 - base.q ** r0))
        if r0 == r:
            return cls.from_coefficients(base, {r: low + 1})
        return cls.from_coefficients(base, {r: 1, r0: low})

    @classmethod
    def from_config(cls, cfg):
        try:
            base = GF(int(cfg["p"]), int(cfg.get("e", 1)),
                      tuple(cfg["modulus"]) if cfg.get("modulus") is not None else None)
            coeffs = {}
            for term in cfg["phi_t"]:
                coeffs[int(term["i"])] = RationalFunction.from_lists(
                    base, term["numer"], term.get("denom", [1]))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"bad module config: {exc}") from exc
        return cls(base, TwistedPoly(base.q, coeffs))

    def to_config(self):
        if self.model is not None:
            raise ValueError("local modules have no global config")
        cfg = self.base.to_config()
        cfg["phi_t"] = [{"i": i, **c.to_config()} for i, c in self.phi_t.coeffs.items()]
        return cfg


def phi_a(module, a):
    """phi_a for a in F_q[t], by Horner in t."""
    if isinstance(a, int):
        a = Poly(module.base, [module.base.scalar(a)])
    if a.is_zero():
        raise ZeroMultiplier("phi_0 is not a valid multiplier")
    base = module.base
    phi_t = module.phi_t

    def const(c):
        if module.model is not None:
            return TwistedPoly(module.q, {0: LocalElement.constant(module.model.embed_constant(c))})
        return TwistedPoly(module.q, {0: RationalFunction.constant(base, c)})

    acc = const(a.coeffs[-1])
    for c in reversed(a.coeffs[:-1]):
        acc = skew_mul(acc, phi_t)
        if c:
            acc = acc + const(c)
    return acc


def local_coefficients(f, model, prec):
    """Series images of the coefficients of f, each to relative precision ``prec``."""
    out = {}
    for i, c in f.coeffs.items():
        if isinstance(c, LocalElement):
            if c.field != model.residue:
                raise ValueError("local coefficient lives in a different residue field")
            out[i] = c
        else:
            out[i] = embed_rational(c, model, model.valuation_of(c) + prec)
    return out


def apply(f, x, model=None, prec=64):
    """Evaluate the additive polynomial sum a_i x^(q^i).

    With a LocalElement x the coefficients are embedded at ``model`` to relative
    precision ``prec``; with a RationalFunction x the evaluation is global.
    """
    if isinstance(x, RationalFunction):
        acc = RationalFunction(Poly(x.field))
        for i, c in f.coeffs.items():
            acc = acc + c * x.frobenius(f.q ** i)
        return acc
    coeffs = local_coefficients(f, model, prec)
    acc = LocalElement.zero(x.field)
    for i, c in coeffs.items():
        acc = acc + c * x.frobenius(f.q ** i)
    return acc


def conjugate(module, gamma, model=None, prec=64):
    """The module gamma^-1 phi gamma: coefficient i becomes gamma^-1 a_i gamma^(q^i).

    gamma may be a RationalFunction, a FieldElement of an extension of F_q (the module
    is base-changed), or a LocalElement at ``model`` (giving a local module, with
    coefficients known to relative precision about ``prec``).
    """
    q = module.q
    if isinstance(gamma, FieldElement):
        if not gamma:
            raise ZeroGamma("gamma must be nonzero")
        big = gamma.field
        ginv = RationalFunction.constant(big, gamma.inverse())
        g = RationalFunction.constant(big, gamma)
        coeffs = {i: ginv * c.base_change(big) * g.frobenius(q ** i) if i else c.base_change(big)
                  for i, c in module.phi_t.coeffs.items()}
        return DrinfeldModule(big, TwistedPoly(q, coeffs))
    if isinstance(gamma, RationalFunction):
        if gamma.is_zero():
            raise ZeroGamma("gamma must be nonzero")
        ginv = gamma.inverse()
        coeffs = {i: ginv * c * gamma.frobenius(q ** i) for i, c in module.phi_t.coeffs.items()}
        return DrinfeldModule(module.base, TwistedPoly(q, coeffs))
    if isinstance(gamma, LocalElement):
        if gamma.is_zero_within_precision():
            raise ZeroGamma("gamma must be nonzero")
        m = model or module.model
        if m is None:
            raise ValueError("conjugating by a local element needs a place model")
        ginv = gamma.inverse(prec=prec - gamma.start) if gamma.is_exact else gamma.inverse()
        coeffs = {}
        for i, c in local_coefficients(module.phi_t, m, prec).items():
            coeffs[i] = ginv * c * gamma.frobenius(q ** i)
        return DrinfeldModule(module.base, TwistedPoly(q, coeffs), model=m)
    raise TypeError(f"cannot conjugate by {type(gamma).__name__}")


def monicize(module, model=None, prec=64):
    """Return (gamma, conjugated module) with gamma^(q^r - 1) a_r = 1.

    A constant leading coefficient is handled globally in the least extension of F_q
    containing a root.  Otherwise the root is built at ``model`` as pi^k * c * w with c a
    residue-field root and w a Hensel-lifted unit.
    """
    q, r = module.q, module.r
    N = q ** r - 1
    top = module.phi_t[r]
    if isinstance(top, RationalFunction) and top.is_constant():
        c = top.num.lead
        base = module.base
        for k in range(1, N + 1):
            big = base.extension(k) if k > 1 else base
            target = c.embed(big).inverse()
            for g in big.nonzero_elements():
                if g ** N == target:
                    return g, conjugate(module, g)
        raise MonicizationError("no root found")  # pragma: no cover
    m = model or module.model
    if m is None:
        raise MonicizationError("non-constant leading coefficient needs a place model")
    a_r = local_coefficients(TwistedPoly(q, {r: top}), m, prec)[r]
    v = a_r.valuation()
    if v % N:
        raise MonicizationError(f"v(a_r)={v} is not divisible by q^r - 1 = {N}")
    k = -v // N
    ac = a_r.angular_component()
    target = ac.inverse()
    roots = [g for g in m.residue.nonzero_elements() if g ** N == target]
    if not roots:
        raise MonicizationError("the residue field lacks a (q^r-1)-th root of ac(a_r)^-1; "
                                "a residue extension is required")
    c = roots[0]
    unit = a_r.shift(-v).scale(ac.inverse())
    F = [LocalElement.constant(m.residue.one()).__neg__()] + [LocalElement.zero(m.residue)] * (N - 1) + [unit]
    w = newton_lift(F, LocalElement.one(m.residue), prec)
    gamma = w.scale(c).shift(k)
    return gamma, conjugate(module, gamma, model=m, prec=prec)


__all__ = ["TwistedPoly", "DrinfeldModule", "skew_mul", "phi_a", "apply", "conjugate",
           "monicize", "local_coefficients"]
