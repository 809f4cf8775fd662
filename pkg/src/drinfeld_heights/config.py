"""JSON run configurations: modules, places, elements, and rendering of results."""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .errors import ConfigError
from .fields import GF, FieldElement, Poly, RationalFunction
from .local import LocalElement, PlaceModel, embed_rational, newton_lift
from .twisted import DrinfeldModule


def load(path=None, stream=None):
    try:
        if path and path != "-":
            with open(path) as fh:
                return json.load(fh)
        return json.load(stream)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc


def module_from_config(cfg):
    if cfg is None:
        raise ConfigError("config has no 'module'")
    if cfg.get("preset") == "carlitz":
        return DrinfeldModule.carlitz(GF(int(cfg["p"]), int(cfg.get("e", 1))))
    try:
        return DrinfeldModule.from_config(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _residue(base, k):
    return base.extension(k) if k > 1 else base


def place_from_config(cfg, base):
    """Build a PlaceModel.  ``t_image`` is a series literal, ``"auto-unramified"``, or
    ``{relation: [[c, i, j], ...], initial: literal}`` meaning sum c P^i T^j = 0."""
    if cfg is None:
        raise ConfigError("config has no 'place'")
    try:
        kind = cfg["kind"]
        e = int(cfg.get("e_ram", 1))
        f = int(cfg.get("f_res", 1))
        d = int(cfg.get("ext_degree", e * f))
        image = cfg.get("t_image")
        if kind == "infinity":
            if image is None:
                return PlaceModel.infinity(base, e_ram=e, ext_degree=d)
            prime = None
            deg = 1
        elif kind == "finite":
            prime = Poly(base, [int(c) for c in cfg["prime"]])
            deg = prime.degree
            if image in (None, "auto-unramified"):
                if e != 1 or f != 1:
                    raise ConfigError("auto-unramified needs e_ram = f_res = 1")
                model = PlaceModel.finite_unramified(prime)
                if d != 1:
                    model.ext_degree = d
                return model
        else:
            raise ConfigError(f"unknown place kind {kind!r}")
        residue = _residue(base, deg * f)
        if isinstance(image, dict) and "relation" in image:
            initial = LocalElement.from_literal(residue, image["initial"])
            relation = [(int(c), int(i), int(j)) for c, i, j in image["relation"]]
            return PlaceModel.from_relation(prime, relation, initial, e, d, f_res=f,
                                            residue=residue)
        lit = LocalElement.from_literal(residue, image)
        spec = {"kind": kind, "e_ram": e, "f_res": f, "ext_degree": d, "t_image": image}
        return PlaceModel(base, residue, kind, prime, e, f, d, lambda _p: lit, spec=spec)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad place config: {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def rational_from_config(base, cfg):
    try:
        return RationalFunction.from_lists(base, cfg["numer"], cfg.get("denom", [1]))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad rational function: {exc}") from exc


def element_from_config(cfg, base, model=None):
    """Rational function ``{numer, denom}``, series literal ``{series: {...}}``, or an
    algebraic element ``{relation: [{numer, denom}, ...], initial: literal}`` given as a
    root of sum_j c_j(t) X^j near ``initial``."""
    if cfg is None:
        raise ConfigError("config has no 'element'")
    if "numer" in cfg:
        g = rational_from_config(base, cfg)
        if g.is_zero():
            raise ConfigError("element must be nonzero")
        return g
    if model is None:
        raise ConfigError("series and algebraic elements need a place")
    if "series" in cfg:
        x = LocalElement.from_literal(model.residue, cfg["series"])
        if x.is_zero_within_precision():
            raise ConfigError("element must be nonzero")
        return x
    if "relation" in cfg:
        coeffs = [rational_from_config(base, c) for c in cfg["relation"]]
        lit = LocalElement.from_literal(model.residue, cfg["initial"])
        # the starting point is a truncation; Newton steps supply the rest
        initial = LocalElement(model.residue, lit.start, lit.coeffs)

        def build(prec):
            F = [embed_rational(c, model, model.valuation_of(c) + prec + initial.start * len(coeffs))
                 if not c.is_zero() else LocalElement.zero(model.residue) for c in coeffs]
            return newton_lift(F, initial, initial.start + prec)

        return build
    raise ConfigError("element must be a rational function, a series or a relation")


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def render_value(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, FieldElement):
        return list(x.coords)
    if isinstance(x, (Poly, RationalFunction)):
        return repr(x)
    if isinstance(x, dict):
        return {str(k): render_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [render_value(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return [render_value(v) for v in sorted(x, key=_sort_key)]
    return str(x)


def _sort_key(v):
    if isinstance(v, FieldElement):
        return (0, v.value)
    return (1, v)


def render_trajectory(traj):
    return [{"n": n, "v": render_value(v), "ac": render_value(ac)} for n, v, ac in traj]


def render_result(res):
    out = {"value": render_value(res.value), "certificate": res.certificate,
           "steps_used": res.steps_used, "precision": res.precision,
           "trajectory": render_trajectory(res.trajectory)}
    if res.multiplier is not None:
        out["multiplier"] = repr(res.multiplier)
    if res.inner is not None:
        out["after_multiplier"] = render_result(res.inner)
    return out


def place_summary(model):
    return {"place": model.label, "deg": model.deg_v0, "e": model.e_ram, "f": model.f_res,
            "d": model.ext_degree}


def dumps(obj):
    return json.dumps(obj, indent=2)


def text_lines(obj, indent=0):
    pad = " " * indent
    lines = []
    if isinstance(obj, dict):
        width = max((len(str(k)) for k in obj), default=0)
        for k, v in obj.items():
            if isinstance(v, dict) and v or isinstance(v, list) and v and not _flat(v):
                lines.append(f"{pad}{str(k)}:")
                lines.extend(text_lines(v, indent + 2))
            else:
                lines.append(f"{pad}{str(k).ljust(width)}  {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, dict):
                lines.append(pad + "  ".join(f"{k}={_inline(x)}" for k, x in v.items()))
            else:
                lines.append(pad + _inline(v))
    else:
        lines.append(pad + _inline(obj))
    return lines


def _flat(v):
    items = v.values() if isinstance(v, dict) else v
    return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and _flat(x))
               for x in items)


def _inline(v):
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_inline(x)}" for k, x in v.items()) + "}"
    return str(v)
