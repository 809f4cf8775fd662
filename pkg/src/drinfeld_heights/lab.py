"""Brute-force checks of the combinatorial lemmas, example reproductions, and
seeded random instance generators."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DimensionTooLarge, HypothesisViolated, PrecisionExhausted
from .fields import GF, Poly, RationalFunction, monic_irreducibles, rank_mod_p
from .heights import (INF, _materialize, bound_margin, compute_exception_sets,
                      compute_thresholds, find_escaping_multiplier, local_height, phi_b_of)
from .local import LocalElement, PlaceModel, newton_lift, product_formula_sum
from .twisted import DrinfeldModule, TwistedPoly, apply, conjugate

ENUMERATION_LIMIT = 2 ** 20


# ---------------------------------------------------------------------------
# element sources
# ---------------------------------------------------------------------------

class SeriesSource:
    """A fixed random series, reproducible at any relative precision.

    Coefficients are drawn sequentially from a seeded generator, so a longer prefix
    always extends a shorter one.
    """

    def __init__(self, field, valuation, seed, lead=None):
        self.field = field
        self.valuation = valuation
        self.seed = seed
        self.lead = lead
        self._coeffs = []
        self._rng = random.Random(seed)

    def _extend(self, n):
        while len(self._coeffs) < n:
            if not self._coeffs:
                c = self._rng.randrange(1, self.field.q)
                self._coeffs.append(self.lead.value if self.lead is not None else c)
            else:
                self._coeffs.append(self._rng.randrange(self.field.q))

    def __call__(self, prec):
        self._extend(prec)
        return LocalElement(self.field, self.valuation, self._coeffs[:prec],
                            self.valuation + prec)

    def __repr__(self):
        return f"SeriesSource(v={self.valuation}, seed={self.seed})"


class Transformed:
    """x -> f(x(prec)) for a series-valued map f, keeping the precision interface.
    Sources that are not callables are embedded at ``model``."""

    def __init__(self, source, fn, label="", model=None):
        self.source = source
        self.fn = fn
        self.label = label
        self.model = model

    def __call__(self, prec):
        return self.fn(_materialize(self.source, self.model, prec), prec)

    def __repr__(self):
        return f"{self.label}({self.source!r})"


# ---------------------------------------------------------------------------
# random instances
# ---------------------------------------------------------------------------

@dataclass
class Instance:
    module: DrinfeldModule
    model: PlaceModel
    x: object
    seed: int = 0

    def describe(self):
        return {"seed": self.seed, "module": repr(self.module), "place": repr(self.model),
                "x": repr(self.x)}


def random_base(rng, sizes=(2, 3, 4, 5)):
    q = rng.choice(sizes)
    p = next(p for p in (2, 3, 5, 7) if q % p == 0)
    e = round(math.log(q, p))
    return GF(p, e)


def random_place(rng, base, max_e=3, max_prime_degree=2, max_residue=None, kinds=None):
    kinds = kinds or ("unramified", "ramified", "infinity")
    while True:
        kind = rng.choice(kinds)
        if kind == "infinity":
            e = rng.randint(1, max_e)
            return PlaceModel.infinity(base, e_ram=e, ext_degree=e * rng.randint(1, 2))
        k = 1 if kind == "ramified" else rng.randint(1, max_prime_degree)
        if max_residue is not None and base.q ** k > max_residue:
            continue
        prime = rng.choice(monic_irreducibles(base, k))
        if kind == "ramified":
            e = rng.randint(1, max_e)
            return PlaceModel.finite_ramified(prime, e, ext_degree=e * rng.randint(1, 2))
        return PlaceModel.finite_unramified(prime)


def _random_poly(rng, base, deg):
    coeffs = [rng.randrange(base.q) for _ in range(deg)] + [rng.randrange(1, base.q)]
    return Poly(base, coeffs)


def _pole_coefficient(rng, base, model, order):
    """A rational function with a pole of the given order at the place of ``model``."""
    if model.prime is None:
        return RationalFunction(_random_poly(rng, base, order))
    prime = model.prime
    while True:
        num = _random_poly(rng, base, rng.randint(0, prime.degree))
        if not (num % prime).is_zero():
            return RationalFunction(num, prime ** order)


def _regular_coefficient(rng, base, model):
    if rng.random() < 0.5 or model.prime is None:
        return RationalFunction.constant(base, base(rng.randrange(1, base.q)))
    return RationalFunction(_random_poly(rng, base, rng.randint(0, 2)))


def random_module(rng, base, model, r=None, generic=False, in_S=True, max_pole=3):
    """A monic Drinfeld module; with ``in_S`` some coefficient below tau^r has a pole
    at the place of ``model``."""
    r = r or rng.randint(1, 3)
    # finite characteristic needs a term below tau^r; so does a pole at a finite place
    if r == 1 and (not generic or (in_S and model.prime is not None)):
        r = 2
    while True:
        coeffs = {r: RationalFunction.constant(base, base.one())}
        if generic:
            coeffs[0] = RationalFunction.t(base)
        for i in range(1, r):
            roll = rng.random()
            if roll < 0.45 and in_S:
                coeffs[i] = _pole_coefficient(rng, base, model, rng.randint(1, max_pole))
            elif roll < 0.75:
                coeffs[i] = _regular_coefficient(rng, base, model)
        if len(coeffs) == 1:
            continue
        module = DrinfeldModule(base, TwistedPoly(base.q, coeffs))
        if not in_S or compute_thresholds(module, model).in_S:
            return module


def random_instance(seed, valuation=None, in_S=True, generic=None, max_residue=None,
                    sizes=(2, 3, 4, 5), max_r=3, kinds=None):
    """A seeded (module, place, x) triple.  ``valuation`` may be an int or a callable
    (thresholds, rng) -> int."""
    rng = random.Random(seed)
    base = random_base(rng, sizes)
    model = random_place(rng, base, max_residue=max_residue, kinds=kinds)
    gen = rng.random() < 0.25 if generic is None else generic
    module = random_module(rng, base, model, r=rng.randint(1, max_r), generic=gen,
                           in_S=in_S)
    th = compute_thresholds(module, model)
    if callable(valuation):
        v = valuation(th, rng)
    elif valuation is None:
        v = rng.randint(-6, 6)
    else:
        v = valuation
    x = SeriesSource(model.residue, v, rng.randrange(2 ** 32))
    return Instance(module, model, x, seed)


# ---------------------------------------------------------------------------
# Lemma on subspaces with prescribed valuations and angular components
# ---------------------------------------------------------------------------

@dataclass
class SubspaceSpec:
    basis: list
    q: int
    I: frozenset
    R: dict
    N: int

    def __post_init__(self):
        self.I = frozenset(self.I)
        self.R = {a: frozenset(s) for a, s in self.R.items()}


@dataclass(frozen=True)
class SubspaceCheck:
    codim: int
    bound: int
    holds: bool

    def __iter__(self):
        return iter((self.codim, self.bound, self.holds))


def _subfield(field, q):
    return [c for c in field.elements() if c ** q == c]


def _f_exponent(q, R, I):
    biggest = max((len(R.get(a, ())) for a in I), default=1)
    f = 0
    while q ** f < biggest:
        f += 1
    return max(1, f)


def _combination(basis, coeffs):
    acc = None
    for c, b in zip(coeffs, basis):
        if c:
            term = b.scale(c)
            acc = term if acc is None else acc + term
    return acc


def subspace_codim_check(spec):
    dim = len(spec.basis)
    if spec.q ** dim > ENUMERATION_LIMIT:
        raise DimensionTooLarge(f"q^dim = {spec.q ** dim} exceeds {ENUMERATION_LIMIT}")
    f = _f_exponent(spec.q, spec.R, spec.I)
    bound = len(spec.I) * f
    if dim == 0:
        return SubspaceCheck(0, bound, True)
    field = spec.basis[0].field
    scalars = _subfield(field, spec.q)
    deep = 1    # the zero vector
    for coeffs in itertools.product(scalars, repeat=dim):
        if not any(coeffs):
            continue
        w = _combination(spec.basis, coeffs)
        if w.is_zero_within_precision():
            if w.is_exact:
                raise ValueError("basis is not linearly independent")
            if w.prec <= spec.N:
                raise PrecisionExhausted("combination vanishes to the known precision")
            deep += 1
            continue
        v = w.valuation()
        if v > spec.N:
            deep += 1
            continue
        if v not in spec.I or w.angular_component() not in spec.R.get(v, ()):
            raise HypothesisViolated(
                f"combination {list(map(repr, coeffs))} has (v, ac) = "
                f"({v}, {w.angular_component()!r}) outside I x R", witness=w)
    sub = round(math.log(deep, spec.q))
    if spec.q ** sub != deep:
        raise ArithmeticError("deep part is not a subspace")  # pragma: no cover
    codim = dim - sub
    return SubspaceCheck(codim, bound, codim <= bound)


def leading_rank_codim(basis, q, N):
    """Codimension of {w : v(w) > N} from the F_p-rank of truncated coefficient data.

    The F_q-span of the basis is the F_p-span of omega^s * b_j, where omega^s runs over
    an F_p-basis of F_q; the rank over F_q is the rank over F_p divided by [F_q:F_p].
    """
    if not basis:
        return 0
    field = basis[0].field
    p = field.p
    k = round(math.log(q, p))
    omega = _primitive_of(_subfield(field, q), q) if k > 1 else field.one()
    lo = min(b.start for b in basis)
    rows = []
    for b in basis:
        for s in range(k):
            w = b.scale(omega ** s)
            row = []
            for exp in range(lo, N + 1):
                row.extend(w.coefficient(exp).coords)
            rows.append(row)
    return rank_mod_p(rows, p) // k


def _primitive_of(sub, q):
    one = sub[0].field.one()
    for c in sub:
        if c and all(c ** j != one for j in range(1, q - 1)):
            return c
    raise ValueError("no generator")  # pragma: no cover


def random_subspace_spec(seed, q=None, dim=None, prec=24):
    """A spec whose hypothesis holds by construction: I and R are read off the span."""
    rng = random.Random(seed)
    q = q or rng.choice((2, 3))
    dim = rng.randint(0, 8) if dim is None else dim
    p = q
    field = GF(p, rng.choice((1, 1, 2)))
    vals = [rng.randint(-3, 3) for _ in range(max(1, rng.randint(1, 3)))]
    while True:
        basis = []
        for _ in range(dim):
            v = rng.choice(vals)
            coeffs = [rng.randrange(1, field.q)] + [rng.randrange(field.q) for _ in range(prec - 1)]
            basis.append(LocalElement(field, v, coeffs, v + prec))
        N = rng.randint(min(vals), max(vals) + 2)
        try:
            I, R = _observed(basis, q, N)
        except ValueError:
            continue
        return SubspaceSpec(basis, q, I or {min(vals)}, R or {min(vals): {field.one()}}, N)


def _observed(basis, q, N):
    if not basis:
        return set(), {}
    field = basis[0].field
    scalars = _subfield(field, q)
    I, R = set(), {}
    for coeffs in itertools.product(scalars, repeat=len(basis)):
        if not any(coeffs):
            continue
        w = _combination(basis, coeffs)
        if w.is_zero_within_precision():
            raise ValueError("dependent or too shallow")
        v = w.valuation()
        if v <= N:
            I.add(v)
            R.setdefault(v, set()).add(w.angular_component())
    return I, R


def claim_probe(seed, q=2, trials=50, I=None, R=None, prec=16):
    """Search random spans of dimension 1 + |I| f for one whose nonzero elements all
    land in I x R.  Returns the witnesses found (expected: none)."""
    rng = random.Random(seed)
    field = GF(q)
    I = sorted(I or {0})
    R = R or {a: {field.one()} for a in I}
    f = _f_exponent(q, R, I)
    dim = 1 + len(I) * f
    found = []
    for _ in range(trials):
        basis = []
        for _ in range(dim):
            a = rng.choice(I)
            lead = rng.choice(sorted(R[a], key=lambda c: c.value))
            coeffs = [lead.value] + [rng.randrange(q) for _ in range(prec - 1)]
            basis.append(LocalElement(field, a, coeffs, a + prec))
        ok = True
        for coeffs in itertools.product(_subfield(field, q), repeat=dim):
            if not any(coeffs):
                continue
            w = _combination(basis, coeffs)
            if w.is_zero_within_precision():
                ok = False
                break
            v = w.valuation()
            if v not in R or w.angular_component() not in R[v]:
                ok = False
                break
        if ok:
            found.append(basis)
    return found


# ---------------------------------------------------------------------------
# worked examples
# ---------------------------------------------------------------------------

def e1_model(base, d):
    """The place over (t) totally ramified of index d, with uniformizer 1/alpha where
    alpha^d - alpha = 1/t; this makes t = pi^d / (1 - pi^(d-1))."""
    relation = [(1, 0, 1), (-1, d - 1, 1), (-1, d, 0)]
    start = LocalElement(base, d, (1,))
    return PlaceModel.from_relation(Poly.t(base), relation, start, e_ram=d, ext_degree=d)


def e1_element(model, d):
    """x = t * alpha, with alpha lifted by Newton iteration from pi^-1."""
    base = model.residue

    def build(prec):
        t = model.t_image(prec + 2 * d + 2)
        one = LocalElement.one(base)
        F = [-t.inverse(), -one] + [LocalElement.zero(base)] * (d - 2) + [one]
        if d == 1:
            F = [-t.inverse(), LocalElement.zero(base)]
        alpha = newton_lift(F, LocalElement(base, -1, (1,)), prec)
        return (t * alpha).truncate(d - 1 + prec)

    return build


def reproduce_example_e1(q, r, r0=1, m=None, prec=None):
    if m is None:
        m = r
    if not 1 <= r0 <= r or m < r:
        raise ValueError("need 1 <= r0 <= r and m >= r")
    p = next(p for p in (2, 3, 5, 7, 11, 13) if q % p == 0)
    base = GF(p, round(math.log(q, p)))
    module = DrinfeldModule.e1_family(base, r, r0)
    d = q ** (r0 * m) - 1
    model = e1_model(base, d)
    x = e1_element(model, d)
    th = compute_thresholds(module, model)
    res = local_height(module, model, x, prec=prec)
    out = {
        "q": q, "r": r, "r0": r0, "m": m, "d": d,
        "value": res.value, "certificate": res.certificate,
        "steps": res.steps_used,
        "trajectory": [v for _, v, _ in res.trajectory],
        "M_v": th.M_v, "N_v": th.N_v,
    }
    if th.in_S:
        out["P_v"] = sorted(compute_exception_sets(module, model, th).P_v)
    if r0 == 1:
        out["expected"] = Fraction(q ** (m + 1) - q ** m + 1, q ** (r * (m + 1)) * d)
        out["expected_trajectory"] = [d - q ** i for i in range(m + 1)] + \
            [-q ** (m + 1) + q ** m - 1]
        out["matches"] = (out["value"] == out["expected"]
                          and out["trajectory"] == out["expected_trajectory"])
    if res.value:
        lhs = res.value ** r0 * Fraction(d) ** r
        out["ratio"] = res.value * Fraction(d) ** (r // r0) if r % r0 == 0 else None
        out["below_optimal"] = lhs < Fraction(q) ** ((1 - r) * r0)
    return out


def reproduce_example_e2(p, d, n, prec=None):
    if p < 3:
        raise ValueError("the example needs p >= 3")
    if d < 1 or n < 1:
        raise ValueError("need d >= 1 and n >= 1")
    base = GF(p)
    module = DrinfeldModule.carlitz(base)
    model = PlaceModel.infinity(base, e_ram=d, ext_degree=d)
    x = RationalFunction.t(base) ** (-n)
    res = local_height(module, model, x, prec=prec)
    expected = Fraction(1, p ** (n + 1))
    return {"p": p, "d": d, "n": n, "value": res.value, "certificate": res.certificate,
            "trajectory": [v for _, v, _ in res.trajectory],
            "expected": expected, "matches": res.value == expected}


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------

@dataclass
class SuiteReport:
    name: str
    passed: int = 0
    total: int = 0
    counterexample: object = None
    notes: list = field(default_factory=list)

    @property
    def ok(self):
        return self.passed == self.total and self.counterexample is None

    def record(self, good, witness=None):
        self.total += 1
        if good:
            self.passed += 1
        elif self.counterexample is None:
            self.counterexample = witness


def _nonpositive_valuation(th, rng):
    floor = math.floor(th.M_v) if th.M_v != INF else 0
    return rng.randint(min(floor - 2, 0), 0)


def dichotomy_instance(seed):
    """v in S, v(x) <= 0; sometimes forced into the exceptional set."""
    inst = random_instance(seed, valuation=_nonpositive_valuation)
    rng = random.Random(seed ^ 0x5EED)
    if rng.random() < 0.3:
        sets = compute_exception_sets(inst.module, inst.model)
        choices = [(a, g) for a, gs in sets.R_v.items() if a.denominator == 1 and a <= 0
                   for g in gs]
        if choices:
            a, g = rng.choice(sorted(choices, key=lambda c: (c[0], c[1].value)))
            inst.x = SeriesSource(inst.model.residue, int(a), rng.randrange(2 ** 32), lead=g)
    return inst


def check_dichotomy(inst):
    model, module = inst.model, inst.module
    sets = compute_exception_sets(module, model)
    y = inst.x(64)
    if sets.contains(y.valuation(), y.angular_component(), union=False):
        return True, None
    res = local_height(module, model, inst.x)
    bound = Fraction(model.e_ram, module.q ** (2 * module.r) * model.ext_degree)
    return res.value is not None and res.value >= bound, res


def suite_dichotomy(seed=0, trials=50):
    rep = SuiteReport("dichotomy")
    for k in range(trials):
        inst = dichotomy_instance(seed * 100003 + k)
        good, res = check_dichotomy(inst)
        rep.record(good, {**inst.describe(), "result": repr(res)})
    return rep


def scan_instance(seed, max_residue=16):
    return random_instance(seed, max_residue=max_residue, sizes=(2, 3, 4), generic=False,
                           kinds=("unramified", "ramified", "infinity"), max_r=2)


def scan_images(inst, window=(-10, 10)):
    """(beta, gamma) -> (v, ac) of phi_t(gamma pi^beta) over all data outside P_v x R_v."""
    module, model = inst.module, inst.model
    sets = compute_exception_sets(module, model)
    out = {}
    for beta in range(window[0], window[1] + 1):
        for g in model.residue.nonzero_elements():
            if sets.contains(beta, g, union=False):
                continue
            y = apply(module.phi_t, LocalElement.monomial(g, beta), model)
            out[(beta, g)] = (y.valuation(), y.angular_component())
    return out


def check_different_values(images):
    seen = {}
    for (beta, _), (v, _) in images.items():
        seen.setdefault(v, set()).add(beta)
    bad = {v: bs for v, bs in seen.items() if len(bs) > 1}
    return not bad, bad


def check_lacv(images, q, r):
    seen = {}
    for (_, g), img in images.items():
        seen.setdefault(img, set()).add(g)
    worst = max((len(s) for s in seen.values()), default=0)
    return worst <= q ** r, worst


def suite_different_values(seed=0, trials=10, window=(-10, 10)):
    rep = SuiteReport("different-values")
    for k in range(trials):
        inst = scan_instance(seed * 7919 + k)
        good, bad = check_different_values(scan_images(inst, window))
        rep.record(good, {**inst.describe(), "collisions": repr(bad)})
    return rep


def suite_lacv(seed=0, trials=10, window=(-10, 10)):
    rep = SuiteReport("lacv")
    for k in range(trials):
        inst = scan_instance(seed * 7919 + k)
        good, worst = check_lacv(scan_images(inst, window), inst.module.q, inst.module.r)
        rep.record(good, {**inst.describe(), "max_preimages": worst})
    return rep


def suite_subspace(seed=0, trials=100, q=None, dim=None):
    rep = SuiteReport("subspace")
    for k in range(trials):
        spec = random_subspace_spec(seed * 1009 + k, q=q, dim=dim)
        codim, bound, holds = subspace_codim_check(spec)
        oracle = leading_rank_codim(spec.basis, spec.q, spec.N)
        rep.record(holds and oracle == codim,
                   {"seed": seed * 1009 + k, "codim": codim, "bound": bound, "oracle": oracle})
    return rep


def suite_e1(grid=((2, 2, 1, 2), (2, 2, 1, 3), (2, 2, 1, 4), (3, 2, 1, 2), (2, 3, 1, 3))):
    rep = SuiteReport("e1")
    for q, r, r0, m in grid:
        row = reproduce_example_e1(q, r, r0, m)
        good = row.get("matches", True) and row.get("below_optimal", True)
        rep.record(good, row)
    return rep


def suite_e2(p=3, ns=(1, 2, 3), ds=(1, 2)):
    rep = SuiteReport("e2")
    for n in ns:
        values = {d: reproduce_example_e2(p, d, n)["value"] for d in ds}
        expected = Fraction(1, p ** (n + 1))
        rep.record(all(v == expected for v in values.values()),
                   {"p": p, "n": n, "values": {d: str(v) for d, v in values.items()}})
    return rep


def suite_bounds(seed=0, trials=30):
    rep = SuiteReport("bounds")
    k = 0
    while rep.total < trials and k < 20 * trials:
        inst = random_instance(seed * 31337 + k, generic=False)
        k += 1
        if inst.model.e_ram % inst.model.base.p == 0:
            continue
        res = local_height(inst.module, inst.model, inst.x)
        if not res.value:
            continue
        report = bound_margin(inst.module, inst.model, inst.x, res)
        rep.record(report["passes"], {**inst.describe(), "report": repr(report)})
    return rep


def suite_product_formula(seed=0, trials=100):
    rep = SuiteReport("product-formula")
    rng = random.Random(seed)
    for _ in range(trials):
        base = random_base(rng, (2, 3, 4, 5))
        num = _random_poly(rng, base, rng.randint(0, 5))
        den = _random_poly(rng, base, rng.randint(0, 5))
        g = RationalFunction(num, den)
        rep.record(product_formula_sum(g) == 0, repr(g))
    return rep


SUITES = {
    "dichotomy": suite_dichotomy,
    "different-values": suite_different_values,
    "lacv": suite_lacv,
    "subspace": suite_subspace,
    "e1": suite_e1,
    "e2": suite_e2,
    "bounds": suite_bounds,
    "product-formula": suite_product_formula,
}


# ---------------------------------------------------------------------------
# structural checks used by the tests and the CLI
# ---------------------------------------------------------------------------

def check_scaling(module, model, x):
    """(h(phi_t x), q^r h(x))"""
    y = Transformed(x, lambda s, p: apply(module.phi_t, s, model, p), "phi_t")
    return (local_height(module, model, y).value,
            module.q ** module.r * local_height(module, model, x).value)


def check_isomorphism(module, model, x, gamma):
    """(h_phi(x), h_{phi^gamma}(gamma^-1 x))"""
    conj = conjugate(module, gamma, model=model)

    def scaled(s, p):
        return s * (gamma.inverse(prec=p - gamma.start) if gamma.is_exact else gamma.inverse())

    y = Transformed(x, scaled, "gamma^-1")
    return (local_height(module, model, x).value, local_height(conj, model, y).value)


def check_escape(module, model, x):
    """(b, h(x), h(phi_b x) / q^(r deg b)) for the least escaping multiplier."""
    b = find_escaping_multiplier(module, model, x)
    y = Transformed(x, lambda s, p: phi_b_of(module, model, s, b, p), f"phi_{b!r}")
    direct = local_height(module, model, x).value
    scaled = local_height(module, model, y).value / module.q ** (module.r * b.degree)
    return b, direct, scaled


__all__ = [
    "SeriesSource", "Transformed", "Instance", "random_instance", "random_module",
    "random_place", "SubspaceSpec", "SubspaceCheck", "subspace_codim_check",
    "leading_rank_codim", "random_subspace_spec", "claim_probe", "e1_model", "e1_element",
    "reproduce_example_e1", "reproduce_example_e2", "SuiteReport", "SUITES",
    "dichotomy_instance", "check_dichotomy", "scan_images", "check_different_values",
    "check_lacv", "check_scaling", "check_isomorphism", "check_escape",
]
