"""Local and global canonical heights with termination certificates."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (GlobalUndecided, NoEscapeFound, NotInS, PrecisionExhausted,
                     ZeroHeight)
from .fields import GF, FieldElement, Poly, RationalFunction, additive_poly_preimage, \
    additive_poly_roots, poly_factor
from .local import DEFAULT_PREC, LocalElement, PlaceModel, embed_rational, max_precision
from .twisted import local_coefficients

INF = math.inf

L2_PRIME = "L2-prime"
L11 = "L11"
T3_INTEGRALITY = "T3-integrality"
ESCAPE = "EscapeMultiplier"
UNDECIDED = "Undecided"
TORSION = "Torsion"     # some iterate is exactly zero
ZERO_CERTIFICATES = (L11, T3_INTEGRALITY, TORSION)


@dataclass(frozen=True)
class Thresholds:
    M_v: object          # Fraction or +inf
    N_v: object          # Fraction or -inf
    in_S: bool
    c_v0: int
    m_steps: int
    L_lcm: int
    valuations: dict = field(default_factory=dict)   # i -> v(a_i)
    escape_below: object = INF    # v(y) below this certifies positive height


@dataclass
class ExceptionSets:
    P_v: frozenset
    R_v: dict                     # alpha in P_v -> frozenset of residue elements
    levels: list                  # levels[n] = {alpha: frozenset} for P_v(n)
    P: frozenset
    R: dict                       # union over levels
    z: int
    f_cap: int

    def contains(self, v, ac, union=True):
        """(v, ac) in P x R(v), with the union of levels or only level 0."""
        table = self.R if union else self.R_v
        v = Fraction(v)
        return v in table and ac in table[v]


@dataclass
class HeightResult:
    value: object                 # Fraction, or None when undecided
    certificate: str
    trajectory: list              # [(n, v, ac)]
    steps_used: int
    multiplier: object = None     # Poly b when an escape multiplier was used
    precision: int = DEFAULT_PREC
    inner: object = None          # result for phi_b(x) after an escape

    @property
    def decided(self):
        return self.certificate != UNDECIDED

    def label(self):
        if self.certificate == ESCAPE:
            return f"{ESCAPE}({self.multiplier!r})"
        return self.certificate


# ---------------------------------------------------------------------------
# coefficient data at a place
# ---------------------------------------------------------------------------

def _coefficient_valuation(c, model):
    if isinstance(c, RationalFunction):
        return model.valuation_of(c)
    return c.valuation()


def _v0(c, model, v):
    if isinstance(c, RationalFunction):
        return c.valuation(model.prime)
    return Fraction(v, model.e_ram)


def compute_thresholds(module, model):
    q, r = module.q, module.r
    vals = {i: _coefficient_valuation(c, model) for i, c in module.phi_t.coeffs.items()}
    lower = [Fraction(vals[i], q ** r - q ** i) for i in vals if i < r]
    M_v = min(lower) if lower else INF
    upper = [Fraction(-vals[i], q ** i - 1) for i in vals if i >= 1]
    N_v = max(upper) if upper else -INF
    c = max(math.ceil(-_v0(a, model, vals[i])) for i, a in module.phi_t.coeffs.items())
    e = model.e_ram
    r0 = module.r0_eff
    m = 0
    if c > 0:
        while q ** (r0 * m) < c * e:
            m += 1
    L = 1
    for i in range(1, r - r0 + 1):
        L = math.lcm(L, q ** i - 1)
    # generalization of the L2' window to non-monic phi_t
    vr = vals[r]
    fixed = Fraction(-vr, q ** r - 1)
    cert = [Fraction(vals[i] - vr, q ** r - q ** i) for i in vals if i < r]
    escape_below = min(cert + [fixed])
    return Thresholds(M_v, N_v, M_v < 0, c, m, L, vals, escape_below)


def _ac_coefficients(module, model, prec=DEFAULT_PREC):
    return {i: c.angular_component()
            for i, c in local_coefficients(module.phi_t, model, prec).items()}


def _tie_group(vals, q, alpha):
    """Indices attaining min_i v(a_i) + q^i alpha."""
    scores = {i: vals[i] + q ** i * alpha for i in vals}
    low = min(scores.values())
    return sorted(i for i, s in scores.items() if s == low), low


def compute_exception_sets(module, model, thresholds=None, prec=DEFAULT_PREC):
    th = thresholds or compute_thresholds(module, model)
    if not th.in_S:
        raise NotInS(f"{model.label} is not in S (M_v = {th.M_v})")
    q = module.q
    vals = th.valuations
    acs = _ac_coefficients(module, model, prec)
    residue = model.residue
    one = residue.one()
    idx = sorted(vals)

    P_v = {Fraction(0)}
    for a, b in itertools.combinations(idx, 2):
        P_v.add(Fraction(vals[a] - vals[b], q ** b - q ** a))

    R_v = {}
    for alpha in P_v:
        group, _ = _tie_group(vals, q, alpha)
        sols = {one}
        if len(group) > 1:
            terms = [(acs[i], q ** i) for i in group]
            sols |= {g for g in additive_poly_roots(terms, residue) if g}
        R_v[alpha] = frozenset(sols)

    levels = [dict(R_v)]
    for _ in range(th.m_steps):
        prev = levels[-1]
        nxt = {}
        for alpha, targets in prev.items():
            for i in idx:
                beta = (alpha - vals[i]) / q ** i
                if beta.denominator != 1:
                    continue
                group, low = _tie_group(vals, q, beta)
                if low != alpha or i not in group:
                    continue
                terms = [(acs[j], q ** j) for j in group]
                pre = set()
                for g in targets:
                    pre |= {s for s in additive_poly_preimage(terms, g, residue) if s}
                if pre:
                    nxt[beta] = frozenset(nxt.get(beta, frozenset()) | pre)
        levels.append(nxt)

    R = {}
    for lvl in levels:
        for alpha, sols in lvl.items():
            R[alpha] = frozenset(R.get(alpha, frozenset()) | sols)
    P = frozenset(R)
    biggest = max(len(s) for s in R.values())
    f = 0
    while q ** f < biggest:
        f += 1
    return ExceptionSets(frozenset(P_v), R_v, levels, P, R, len(P), max(1, f))


def in_exception(sets, v, ac, union=False):
    return sets.contains(v, ac, union=union)


# ---------------------------------------------------------------------------
# element sources and the iteration
# ---------------------------------------------------------------------------

def _materialize(x, model, prec):
    """A LocalElement for x at relative precision ``prec``."""
    if isinstance(x, LocalElement):
        return x
    if isinstance(x, (RationalFunction, Poly)):
        g = RationalFunction(x) if isinstance(x, Poly) else x
        if g.is_zero():
            raise ValueError("element must be nonzero")
        return embed_rational(g, model, model.valuation_of(g) + prec)
    if callable(x):
        return x(prec)
    raise TypeError(f"unsupported element {type(x).__name__}")


def _step(coeffs, q, y):
    acc = None
    for i, c in coeffs.items():
        term = c * (y if i == 0 else y.frobenius(q ** i))
        acc = term if acc is None else acc + term
    return acc


def _orbit_value(module, model, th, v, n):
    q, r = module.q, module.r
    shift = Fraction(th.valuations[r], q ** r - 1)
    scale = Fraction(model.deg_v0 * model.f_res, model.ext_degree * q ** (r * n))
    return scale * -(v + shift)


def _zero_regime(module, model):
    """Whether v >= N_v certifies height zero here (always in finite characteristic;
    in generic characteristic only where t is integral)."""
    return module.char_kind == "finite" or model.t_valuation >= 0


def _check(module, model, th, v, n, exact=True):
    """Certificate at step n for valuation v, or None.  With ``exact=False`` v is only
    a lower bound (the iterate vanished to the known precision)."""
    if exact and v != INF and v < th.escape_below:
        return L2_PRIME, _orbit_value(module, model, th, v, n)
    if _zero_regime(module, model) and v >= th.N_v:
        return (L11 if module.char_kind == "finite" else T3_INTEGRALITY), Fraction(0)
    if exact and v == INF:
        return TORSION, Fraction(0)
    return None


def step_budget(module, th, sets):
    z, f = (sets.z, sets.f_cap) if sets is not None else (0, 1)
    return th.m_steps + z * f + module.r + 1


class _Orbit:
    """x, phi_t(x), phi_{t^2}(x), ... computed on first access.  Iterates grow like
    q^(rn) in valuation, so only the ones a search actually touches are built."""

    def __init__(self, module, model, ys, prec):
        self._coeffs = local_coefficients(module.phi_t, model, prec)
        self._q = module.q
        self._ys = list(ys)

    def __getitem__(self, k):
        while len(self._ys) <= k:
            self._ys.append(_step(self._coeffs, self._q, self._ys[-1]))
        return self._ys[k]


def iterate(module, model, x, steps, prec=DEFAULT_PREC):
    """[x, phi_t(x), ..., phi_{t^steps}(x)] as series."""
    coeffs = local_coefficients(module.phi_t, model, prec)
    ys = [x]
    for _ in range(steps):
        ys.append(_step(coeffs, module.q, ys[-1]))
    return ys


def _record(n, y):
    """(n, v, ac); a vanishing-within-precision iterate is recorded as (n, prec, None),
    the valuation being only bounded below."""
    if y.is_zero():
        return (n, INF, None)
    if y.is_zero_within_precision():
        return (n, y.prec, None)
    return (n, y.valuation(), y.angular_component())


def _run(module, model, y0, th, budget, prec):
    coeffs = local_coefficients(module.phi_t, model, prec)
    ys = [y0]
    traj = []
    y = y0
    for n in range(budget + 1):
        entry = _record(n, y)
        traj.append(entry)
        exact = entry[2] is not None or entry[1] == INF
        hit = _check(module, model, th, entry[1], n, exact)
        if hit is not None:
            return hit, traj, ys
        if not exact:
            raise PrecisionExhausted(f"phi_t^{n}(x) vanishes to the working precision")
        if n < budget:
            y = _step(coeffs, module.q, y)
            ys.append(y)
    return None, traj, ys


def _combine(ys, b):
    acc = None
    for k, c in enumerate(b.coeffs):
        if c:
            term = ys[k].scale(FieldElement(ys[k].field, c)) if c != 1 else ys[k]
            acc = term if acc is None else acc + term
    return acc


def _local_height_at(module, model, x, prec, budget, th, sets):
    y0 = _materialize(x, model, prec)
    if y0.is_zero():
        raise ValueError("element must be nonzero")
    hit, traj, ys = _run(module, model, y0, th, budget, prec)
    if hit is not None:
        cert, value = hit
        return HeightResult(value, cert, traj, len(traj) - 1, precision=prec)
    if sets is None:
        return HeightResult(None, UNDECIDED, traj, len(traj) - 1, precision=prec)
    bound = sets.z * sets.f_cap
    try:
        b, w = _search(module, model, _Orbit(module, model, ys, prec), th, sets, bound, False)
    except NoEscapeFound:
        return HeightResult(None, UNDECIDED, traj, len(traj) - 1, precision=prec)
    if b.degree == 0:
        # x already escapes; rerunning from a scalar multiple cannot help
        return HeightResult(None, UNDECIDED, traj, len(traj) - 1, precision=prec)
    hit2, traj2, _ = _run(module, model, w, th, budget, prec)
    inner = HeightResult(hit2[1] if hit2 else None, hit2[0] if hit2 else UNDECIDED,
                         traj2, len(traj2) - 1, precision=prec)
    if hit2 is None:
        return HeightResult(None, UNDECIDED, traj, len(traj) - 1, multiplier=b,
                            precision=prec, inner=inner)
    cert, value = hit2
    value = value / module.q ** (module.r * b.degree)
    if cert in ZERO_CERTIFICATES:
        return HeightResult(Fraction(0), cert, traj, len(traj) - 1, multiplier=b,
                            precision=prec, inner=inner)
    return HeightResult(value, ESCAPE, traj, len(traj) - 1, multiplier=b, precision=prec,
                        inner=inner)


def _escalate(fn, prec):
    prec = prec or DEFAULT_PREC
    cap = max(max_precision(), prec)
    while True:
        try:
            return fn(prec)
        except PrecisionExhausted:
            if prec >= cap:
                raise
            prec = min(2 * prec, cap)


def local_height(module, model, x, budget=None, prec=None):
    """The canonical local height at ``model`` of x (series, rational function, or a
    callable ``prec -> LocalElement``), with a certificate for how it was decided."""
    th = compute_thresholds(module, model)

    def attempt(p):
        sets = compute_exception_sets(module, model, th, p) if th.in_S else None
        n = budget if budget is not None else step_budget(module, th, sets)
        return _local_height_at(module, model, x, p, n, th, sets)

    return _escalate(attempt, prec)


# ---------------------------------------------------------------------------
# escape multipliers
# ---------------------------------------------------------------------------

def _multipliers(base, max_degree):
    """Nonzero b in F_q[t] by degree, then lexicographically on the coefficients
    from the constant term upward."""
    q = base.q
    for deg in range(max_degree + 1):
        for low in itertools.product(range(q), repeat=deg):
            for lead in range(1, q):
                yield Poly(base, list(low) + [lead])


def _search(module, model, ys, th, sets, max_degree, nonpositive):
    base = _constants(module)
    # elements with v >= N_v have height zero, so they cannot serve as escapes
    limit = th.N_v if _zero_regime(module, model) else None
    for b in _multipliers(base, max_degree):
        w = _combine(ys, b)
        if w is None or w.is_zero():
            continue
        if w.is_zero_within_precision():
            if limit is not None and w.prec >= limit:
                continue
            raise PrecisionExhausted("phi_b(x) vanishes to the working precision")
        v = w.valuation()
        if limit is not None and v >= limit:
            continue
        if nonpositive and v > 0:
            continue
        if not sets.contains(v, w.angular_component()):
            return b, w
    raise NoEscapeFound(f"no escaping multiplier of degree <= {max_degree}")


def _constants(module):
    """F_q, the constant field of A."""
    q = module.q
    p = module.base.p
    e = 0
    while p ** e < q:
        e += 1
    if module.base.q == q:
        return module.base
    return GF(p, e)


def find_escaping_multiplier(module, model, x, prec=None, nonpositive=False):
    """Least b (by degree, then lexicographically) with deg b <= z f_cap such that
    phi_b(x) lies outside P x R (and below N_v where that threshold certifies height
    zero).  With ``nonpositive`` also require v(phi_b(x)) <= 0."""
    th = compute_thresholds(module, model)
    if not th.in_S:
        return Poly(_constants(module), [1])

    def attempt(p):
        sets = compute_exception_sets(module, model, th, p)
        bound = sets.z * sets.f_cap
        ys = _Orbit(module, model, [_materialize(x, model, p)], p)
        return _search(module, model, ys, th, sets, bound, nonpositive)[0]

    return _escalate(attempt, prec)


def phi_b_of(module, model, x, b, prec=DEFAULT_PREC):
    y0 = _materialize(x, model, prec)
    return _combine(iterate(module, model, y0, b.degree, prec), b)


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def _ge_power(value, bound_pow, r0):
    """value >= bound where bound^r0 = bound_pow (both positive)."""
    return value ** r0 >= bound_pow


def bound_margin(module, model, x, height, prec=None):
    """Compare a positive local height with the explicit lower bounds."""
    if height.value is None or height.value <= 0:
        raise ZeroHeight("bounds only apply to positive heights")
    q, r, r0 = module.q, module.r, module.r0_eff
    th = compute_thresholds(module, model)
    e, d = model.e_ram, model.ext_degree
    h = height.value
    report = {"e": e, "d": d, "q": q, "r": r, "r0": r0, "value": h,
              "tame": e % model.base.p != 0, "in_S": th.in_S, "monic": module.is_monic()}
    at_infinity_generic = module.char_kind == "generic" and model.t_valuation < 0
    report["applicable"] = report["monic"] and not at_infinity_generic
    if not th.in_S:
        bound = Fraction(1, d)
        report.update(c=th.c_v0, z=0, f_cap=1, bound_not_in_S=bound,
                      passes_not_in_S=h >= bound)
        report["passes"] = report["passes_not_in_S"] or not report["applicable"]
        return report
    sets = compute_exception_sets(module, model, th, prec or DEFAULT_PREC)
    c = th.c_v0
    # work with r0-th powers so that exponents r/r0 stay integral
    c1_pow = Fraction(1, c ** r * q ** (3 * r * r0))
    e_factor_pow = Fraction(e) ** (r - r0)          # (e^(r/r0 - 1))^r0
    d_pow = Fraction(d) ** r0
    e27_pow = Fraction(e) ** r0 * c1_pow / (Fraction(e) ** r * d_pow)
    tame_pow = c1_pow / (Fraction(q) ** (r * sets.z * sets.f_cap * r0) * e_factor_pow * d_pow)
    report.update(c=c, z=sets.z, f_cap=sets.f_cap, c1=_root(c1_pow, r0),
                  e27_bound=_root(e27_pow, r0), tame_bound=_root(tame_pow, r0),
                  bound_power=r0)
    y0 = _materialize(x, model, prec or DEFAULT_PREC)
    outside = not sets.contains(y0.valuation(), y0.angular_component())
    report["e27_applicable"] = report["applicable"] and outside
    report["passes_e27"] = _ge_power(h, e27_pow, r0) if outside else None
    report["passes_tame"] = _ge_power(h, tame_pow, r0)
    if height.multiplier is not None:
        b_pow = c1_pow / (Fraction(q) ** (r * height.multiplier.degree * r0) * e_factor_pow * d_pow)
        report["multiplier_bound"] = _root(b_pow, r0)
        report["passes_multiplier"] = _ge_power(h, b_pow, r0)
    # optimality ratio h * d^(r/r0) against q^(1-r)
    lhs_pow = h ** r0 * Fraction(d) ** r
    rhs_pow = Fraction(q) ** ((1 - r) * r0)
    report["optimality_ratio"] = _root(lhs_pow, r0)
    report["optimality_below"] = lhs_pow < rhs_pow
    checks = [report["passes_tame"]]
    if outside:
        checks.append(report["passes_e27"])
    report["passes"] = all(checks) or not report["applicable"]
    return report


def _root(value, k):
    """Exact k-th root of a positive rational when it exists, else None."""
    if k == 1:
        return value
    n = _iroot(value.numerator, k)
    m = _iroot(value.denominator, k)
    if n is not None and m is not None:
        return Fraction(n, m)
    return None


def _iroot(n, k):
    lo, hi = 0, 1
    while hi ** k < n:
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if mid ** k < n:
            lo = mid + 1
        else:
            hi = mid
    return lo if lo ** k == n else None


# ---------------------------------------------------------------------------
# global heights
# ---------------------------------------------------------------------------

def candidate_places(module, x):
    """Places of F(t) where the local height of x can be nonzero (plus infinity)."""
    base = module.base
    primes = set()
    polys = [x.den] + [c.den for c in module.phi_t.coeffs.values()]
    for f in polys:
        if f.degree > 0:
            _, facs = poly_factor(f)
            primes |= set(facs)
    finite = sorted(primes, key=lambda f: (f.degree, f.to_list()))
    return [PlaceModel.finite_unramified(f) for f in finite] + [PlaceModel.infinity(base)]


def global_height(module, x, budget=None, prec=None, parallel=False, breakdown=False):
    if isinstance(x, Poly):
        x = RationalFunction(x)
    if x.is_zero():
        raise ValueError("element must be nonzero")
    places = candidate_places(module, x)

    def one(model):
        return model, local_height(module, model, x, budget=budget, prec=prec)

    if parallel and len(places) > 1:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(one, places))
    else:
        results = [one(m) for m in places]
    total = Fraction(0)
    parts = []
    for model, res in results:
        if not res.decided:
            raise GlobalUndecided(model.label, res)
        total += res.value
        parts.append((model, res))
    return (total, parts) if breakdown else total


__all__ = [
    "Thresholds", "ExceptionSets", "HeightResult", "compute_thresholds",
    "compute_exception_sets", "in_exception", "local_height", "global_height",
    "find_escaping_multiplier", "bound_margin", "candidate_places", "iterate",
    "phi_b_of", "step_budget", "L2_PRIME", "L11", "T3_INTEGRALITY", "ESCAPE", "UNDECIDED",
    "TORSION",
]
