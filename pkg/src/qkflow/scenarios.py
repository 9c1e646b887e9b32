"""Catalog of named geometries and the scenario-file loader.

Every scenario is an orthonormal coframe (structure functions as jets in the
active coordinates) together with a compatible structure 4-form pattern,
possibly depending on ansatz parameters.  Built-ins:

* ``torus_conformal``   - flat 8-torus, conformal factor f(x1), QK pattern
* ``hh2_conformal``     - quaternionic hyperbolic plane, cohomogeneity-one
                          coframe in the radial coordinate s, conformal f(s)
* ``hh2_rotated``       - solvable-group presentation with the twistor pair
                          (a, b) = (sin phi, cos phi) rotating two coframe legs
* ``su3``               - left-invariant structures on SU(3), angle f in the
                          fibre 2-sphere
* ``euclid_soliton``    - Euclidean R^8 with dx1, dx2 rotated by exp(x1)

The SU(3) structure constants are derived at import time from the
Maurer-Cartan matrix (d theta = -theta ^ theta) in exact arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping, Sequence

import numpy as np

from . import ratlin
from .exprs import Expr, ExprError
from .exterior import DIM, Form, mask_of
from .geometry import CoframeField, FrameData, GeometryContext, make_context, make_frame
from .kernels import NumForm
from .scalars import QQi, Jet, jcos, jexp, jsin
from .structures import Kind, metric_from_form, model_form

DEFAULT_FPOLY = (1.0, 0.25, 0.1)    # conformal factor 1 + x/4 + x^2/10, positive near 0


@dataclass
class Scenario:
    """A ready-to-use geometry: coframe + structure pattern + metadata."""

    name: str
    kind: Kind
    coframe: CoframeField
    xi_builder: Callable
    param_defaults: dict[str, float] = field(default_factory=dict)
    description: str = ""
    sample_box: dict[str, tuple[float, float]] = field(default_factory=dict)
    extras: dict = field(default_factory=dict)
    schema: dict | None = None
    exact_capable: bool = False

    def context(self, point: Mapping[str, float] | None = None,
                params: Mapping[str, float] | None = None,
                param_jets: bool = False, exact: bool = False,
                frame: FrameData | None = None) -> GeometryContext:
        pt = dict(point or {name: 0.0 for name in self.coframe.active_coords})
        pv = dict(self.param_defaults)
        pv.update(params or {})
        return make_context(self.coframe, self.xi_builder, self.kind, pt,
                            params=pv, exact=exact, param_jets=param_jets, frame=frame)

    def sample_points(self, rng: np.random.Generator, n: int) -> list[dict[str, float]]:
        pts = []
        for _ in range(n):
            pt = {}
            for coord in self.coframe.active_coords:
                lo, hi = self.sample_box.get(coord, (-0.5, 0.5))
                pt[coord] = float(rng.uniform(lo, hi))
            pts.append(pt)
        return pts or [{}] * n

    def to_json(self) -> dict:
        if self.schema is None:
            raise ValueError(f"scenario {self.name!r} has no file-schema export")
        return json.loads(json.dumps(self.schema))


# ----------------------------------------------------------------------
# polynomial helpers (full-order jets; no derivative-order loss)
# ----------------------------------------------------------------------

def _poly_eval_jet(coeffs: Sequence, x: Jet) -> Jet:
    tot = Jet.const(x.val * 0, x.m)
    for c in reversed(list(coeffs)):
        tot = tot * x + c
    return tot


def _poly_deriv(coeffs: Sequence) -> list:
    return [k * c for k, c in enumerate(coeffs)][1:] or [0]


def _poly_expr(coeffs: Sequence, var: str) -> str:
    bits = []
    for k, c in enumerate(coeffs):
        if c == 0:
            continue
        if k == 0:
            bits.append(repr(float(c)))
        elif k == 1:
            bits.append(f"{float(c)!r}*{var}")
        else:
            bits.append(f"{float(c)!r}*{var}**{k}")
    return " + ".join(bits).replace("+ -", "- ") if bits else "0"


# ----------------------------------------------------------------------
# structure-constant tables
# ----------------------------------------------------------------------

def _c_from_de(de_table: Mapping[int, Mapping[tuple[int, int], object]], space, scale=None):
    """Structure jets from a table de^i = sum v e^{jk} of constant terms."""
    c = [[[space.zero() for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]
    for i, terms in de_table.items():
        for (j, k), v in terms.items():
            jj, kk, vv = (j, k, v) if j < k else (k, j, -v)
            val = space.const(vv) if not isinstance(vv, Jet) else vv
            if scale is not None:
                val = val * scale
            c[i - 1][jj - 1][kk - 1] = c[i - 1][jj - 1][kk - 1] - val
            c[i - 1][kk - 1][jj - 1] = c[i - 1][kk - 1][jj - 1] + val
    return c


# solvable-group presentation of the quaternionic hyperbolic plane
HH2_DE = {
    1: {(1, 8): -1}, 2: {(2, 8): -1}, 3: {(3, 8): -1}, 4: {(4, 8): -1},
    5: {(1, 3): -2, (2, 4): 2, (5, 8): -2},
    6: {(1, 4): -2, (2, 3): -2, (6, 8): -2},
    7: {(1, 2): 2, (3, 4): 2, (7, 8): -2},
    8: {},
}


@lru_cache(maxsize=None)
def su3_structure_constants() -> dict[tuple[int, int, int], Fraction]:
    """c^i_{jk} of the left-invariant coframe on SU(3), solved exactly.

    The coframe is defined through the Maurer-Cartan matrix; differentiating
    d M = -M ^ M and matching coefficients yields an 18x8 exact linear
    system whose unique solution gives the d theta table.
    """
    I, Z, O = QQi(0, 1), QQi(0, 0), QQi(1, 0)

    def row(*pairs):
        v = [Z] * 8
        for idx, coef in pairs:
            v[idx - 1] = coef
        return v

    mc = [
        [row((1, I), (2, I)), row((3, I), (4, QQi(-1))), row((5, O), (6, I))],
        [row((3, I), (4, O)), row((1, I), (2, QQi(0, -1))), row((7, I), (8, O))],
        [row((5, QQi(-1)), (6, I)), row((7, I), (8, QQi(-1))), row((1, QQi(-2) * I))],
    ]

    def rhs(r, c):
        ent: dict = {}
        for k in range(3):
            for i in range(8):
                for j in range(8):
                    if i == j:
                        continue
                    coef = mc[r][k][i] * mc[k][c][j]
                    if coef == 0:
                        continue
                    m, s = (mask_of((i + 1, j + 1)), coef) if i < j else (mask_of((j + 1, i + 1)), -coef)
                    ent[m] = ent.get(m, Z) + s
        return {m: QQi(0, 0) - v for m, v in ent.items() if not v == 0}

    rows, rhs_forms = [], []
    for r in range(3):
        for c in range(3):
            rr = rhs(r, c)
            rows.append([Fraction(mc[r][c][i].re) for i in range(8)])
            rhs_forms.append({m: v.re for m, v in rr.items()})
            rows.append([Fraction(mc[r][c][i].im) for i in range(8)])
            rhs_forms.append({m: v.im for m, v in rr.items()})
    at = ratlin.transpose(rows)
    pinv = ratlin.matmul(ratlin.inverse(ratlin.matmul(at, rows)), at)

    dtheta = []
    for i in range(8):
        ent: dict = {}
        for rix in range(18):
            w = pinv[i][rix]
            if not w:
                continue
            for m, v in rhs_forms[rix].items():
                ent[m] = ent.get(m, Fraction(0)) + w * v
        dtheta.append({m: v for m, v in ent.items() if v})

    # certify: the solved table reproduces every matrix entry exactly
    for rix in range(18):
        tot: dict = {}
        for i in range(8):
            if rows[rix][i]:
                for m, v in dtheta[i].items():
                    tot[m] = tot.get(m, Fraction(0)) + rows[rix][i] * v
        target = rhs_forms[rix]
        keys = set(tot) | set(target)
        if any(tot.get(m, 0) != target.get(m, 0) for m in keys):
            raise AssertionError("Maurer-Cartan differentiation is inconsistent")

    out: dict[tuple[int, int, int], Fraction] = {}
    for i in range(8):
        for m, v in dtheta[i].items():
            legs = [p + 1 for p in range(8) if m >> p & 1]
            out[(i + 1, legs[0], legs[1])] = -v   # de^i = -1/2 c^i_jk e^jk
    return out


# ----------------------------------------------------------------------
# built-in scenarios
# ----------------------------------------------------------------------

def _standard_pattern_builder(kind: Kind):
    pattern = model_form(kind)

    def build(space, pjets):
        return {m: space.const(v) for m, v in pattern.entries.items()}

    return build


def torus_conformal(fpoly: Sequence[float] = DEFAULT_FPOLY, kind: Kind = "QK") -> Scenario:
    """Flat torus with coframe e^i = f(x1) dx_i and the parallel model pattern."""
    fpoly = tuple(fpoly)
    dfpoly = tuple(_poly_deriv(fpoly))

    def data(pt, space):
        x = space.var("x1", pt["x1"])
        f = _poly_eval_jet([space.const(v) for v in fpoly], x)
        fp = _poly_eval_jet([space.const(v) for v in dfpoly], x)
        q = fp / (f * f)
        c = [[[space.zero() for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]
        for i in range(1, DIM):
            c[i][0][i] = -q
            c[i][i][0] = q
        anchors = [dict() for _ in range(DIM)]
        anchors[0]["x1"] = space.const(1) / f
        return c, anchors

    name = "torus_conformal" if kind == "QK" else "torus_conformal_spin7"
    coframe = CoframeField(name, ("x1",), data)
    schema = _conformal_torus_schema(name, kind, fpoly)
    return Scenario(
        name=name, kind=kind, coframe=coframe,
        xi_builder=_standard_pattern_builder(kind),
        description=f"Conformally flat torus, {kind} pattern, f(x1) polynomial {list(fpoly)}",
        sample_box={"x1": (-0.6, 0.6)},
        extras={"fpoly": fpoly},
        schema=schema,
        exact_capable=all(float(v).is_integer() or isinstance(v, Fraction) for v in fpoly),
    )


def _conformal_torus_schema(name, kind, fpoly):
    f = _poly_expr(fpoly, "x1")
    fp = _poly_expr(_poly_deriv(fpoly), "x1")
    q = f"({fp})/(({f})*({f}))"
    consts = []
    for i in range(2, 9):
        consts.append({"i": i, "j": 1, "k": i, "coeff": f"-({q})"})
    pattern = model_form(kind)
    return {
        "name": name,
        "kind": kind,
        "active_coords": ["x1"],
        "parameters": [],
        "structure_constants": consts,
        "frame_vectors": [{"frame": 1, "components": {"x1": f"1/({f})"}}],
        "structure_form": {"entries": [
            {"idx": list(map(int, _mask_indices(m))), "coeff": str(int(v))}
            for m, v in sorted(pattern.entries.items())
        ]},
    }


def _mask_indices(mask):
    return [p + 1 for p in range(DIM) if mask >> p & 1]


def hh2_conformal(fpoly: Sequence[float] = DEFAULT_FPOLY) -> Scenario:
    """Quaternionic hyperbolic plane (cohomogeneity one in s), conformal f(s).

    Coframe: e^i = (f/(1-s)^(1/4)) dx_i (i <= 4), e^5 = (f/(4(1-s))) ds,
    e^{5+i} = (f/(1-s)^(1/2)) a_i with the Heisenberg 1-forms a_i, whose
    exterior derivatives close onto e-monomials with s-dependent factors
    only.  At f == 1 the structure functions are the constants of the
    solvable presentation and the standard pattern is parallel.
    """
    fpoly = tuple(fpoly)
    dfpoly = tuple(_poly_deriv(fpoly))

    def data(pt, space):
        s = space.var("s", pt["s"])
        one = space.const(1)
        f = _poly_eval_jet([space.const(v) for v in fpoly], s)
        fp = _poly_eval_jet([space.const(v) for v in dfpoly], s)
        ums = one - s
        q = (ums * fp * 4 + f) / (f * f)          # de^i = q e^{5i}, i = 1..4
        r = (ums * fp * 4 + f * 2) / (f * f)      # de^{5+i} = r e^{5,5+i} + ...
        w = space.const(2) / f
        de = {
            1: {(5, 1): q}, 2: {(5, 2): q}, 3: {(5, 3): q}, 4: {(5, 4): q}, 5: {},
            6: {(5, 6): r, (1, 2): w, (3, 4): w},
            7: {(5, 7): r, (1, 3): w, (2, 4): -w},
            8: {(5, 8): r, (1, 4): w, (2, 3): w},
        }
        c = _c_from_de(de, space)
        anchors = [dict() for _ in range(DIM)]
        anchors[4]["s"] = ums * 4 / f
        return c, anchors

    coframe = CoframeField("hh2_conformal", ("s",), data)
    return Scenario(
        name="hh2_conformal", kind="QK", coframe=coframe,
        xi_builder=_standard_pattern_builder("QK"),
        description=f"Conformal quaternionic hyperbolic plane, f(s) polynomial {list(fpoly)}",
        sample_box={"s": (-0.5, 0.5)},
        extras={"fpoly": fpoly},
    )


def _hh2_rotated_omegas(space, pjets):
    phi = pjets["phi"]
    a, b = jsin(phi), jcos(phi)
    one = space.const(1)
    w1 = {mask_of((1, 2)): one, mask_of((3, 4)): one, mask_of((5, 6)): one, mask_of((7, 8)): -one}
    w2 = {mask_of((1, 3)): one, mask_of((2, 4)): -one, mask_of((5, 8)): b,
          mask_of((6, 8)): a, mask_of((5, 7)): a, mask_of((6, 7)): -b}
    w3 = {mask_of((1, 4)): one, mask_of((2, 3)): one, mask_of((5, 7)): b,
          mask_of((6, 7)): a, mask_of((5, 8)): -a, mask_of((6, 8)): b}
    return w1, w2, w3


def _triple_to_xi(space, omegas):
    total = None
    for w in omegas:
        nf = NumForm.from_entries(2, w, space.m)
        sq = nf.wedge(nf)
        total = sq if total is None else total + sq
    return total.scale(0.5)


def hh2_rotated() -> Scenario:
    """Solvable-group hyperbolic plane with the rotated twistor pair.

    The angle chart phi realizes (a, b) = (sin phi, cos phi) exactly, so the
    constraint a^2 + b^2 = 1 never drifts; phi = 0 is the torsion-free point.
    """
    def data(pt, space):
        return _c_from_de(HH2_DE, space), [dict() for _ in range(DIM)]

    coframe = CoframeField("hh2_rotated", (), data, params=("phi",))

    def xi_builder(space, pjets):
        return _triple_to_xi(space, _hh2_rotated_omegas(space, pjets))

    return Scenario(
        name="hh2_rotated", kind="QK", coframe=coframe, xi_builder=xi_builder,
        param_defaults={"phi": 0.0},
        description="Quaternionic hyperbolic plane, twistor-rotated family (a,b) on the solvable coframe",
        extras={"omega_builder": _hh2_rotated_omegas},
        schema=_constant_schema("hh2_rotated", "QK", HH2_DE,
                                [("phi", 0.0)], _HH2_PATTERN_EXPR),
        exact_capable=True,
    )


def _su3_omegas(space, pjets):
    f = pjets["f"]
    if space.exact:
        if not (isinstance(f, Jet) and f.is_zero()):
            raise ValueError("exact SU(3) evaluation is supported at f = 0 only")
        cf, sf = space.const(1), space.const(0)
    else:
        cf, sf = jcos(f), jsin(f)
    one = space.const(1)
    w1 = {mask_of((1, 2)): one, mask_of((3, 4)): one, mask_of((5, 6)): one, mask_of((7, 8)): one}
    w2 = {mask_of((1, 3)): cf, mask_of((1, 4)): sf, mask_of((2, 3)): sf, mask_of((2, 4)): -cf,
          mask_of((5, 7)): one, mask_of((6, 8)): -one}
    w3 = {mask_of((1, 3)): -sf, mask_of((1, 4)): cf, mask_of((2, 3)): cf, mask_of((2, 4)): sf,
          mask_of((5, 8)): one, mask_of((6, 7)): one}
    return w1, w2, w3


def su3() -> Scenario:
    """Left-invariant structures on SU(3) with the fibre angle f."""
    table = su3_structure_constants()

    def data(pt, space):
        c = [[[space.zero() for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]
        for (i, j, k), v in table.items():
            c[i - 1][j - 1][k - 1] = space.const(v)
            c[i - 1][k - 1][j - 1] = space.const(-v)
        return c, [dict() for _ in range(DIM)]

    coframe = CoframeField("su3", (), data, params=("f",))

    def xi_builder(space, pjets):
        if space.exact:
            triple = _su3_omegas(space, pjets)
            total = None
            for w in triple:
                fw = Form(2, w)
                sq = fw.wedge(fw)
                total = sq if total is None else total + sq
            return total.scale(Fraction(1, 2))
        return _triple_to_xi(space, _su3_omegas(space, pjets))

    de_table = {}
    for (i, j, k), v in table.items():
        de_table.setdefault(i, {})[(j, k)] = -v
    return Scenario(
        name="su3", kind="QK", coframe=coframe, xi_builder=xi_builder,
        param_defaults={"f": 0.0},
        description="SU(3) with left-invariant metric, fibre-angle family f",
        extras={"omega_builder": _su3_omegas, "structure_constants": table},
        schema=_constant_schema("su3", "QK", de_table, [("f", 0.0)], _SU3_PATTERN_EXPR),
        exact_capable=True,
    )


def euclid_soliton() -> Scenario:
    """Euclidean R^8 with dx1, dx2 rotated by the angle exp(x1).

    The standard pattern in the rotated coframe induces the flat metric but
    is not parallel; it is a steady gradient soliton with X = d/dx1.
    """
    def data(pt, space):
        x = space.var("x1", pt["x1"])
        u = jexp(x)
        cu, su = jcos(u), jsin(u)
        c = [[[space.zero() for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]
        q1 = u * cu      # de^1 = u' cos(u) e^{12}, u' = u
        q2 = -(u * su)   # de^2 = -u' sin(u) e^{12}
        c[0][0][1] = -q1
        c[0][1][0] = q1
        c[1][0][1] = -q2
        c[1][1][0] = q2
        anchors = [dict() for _ in range(DIM)]
        anchors[0]["x1"] = cu
        anchors[1]["x1"] = -su
        return c, anchors

    coframe = CoframeField("euclid_soliton", ("x1",), data)
    schema = {
        "name": "euclid_soliton",
        "kind": "QK",
        "active_coords": ["x1"],
        "parameters": [],
        "structure_constants": [
            {"i": 1, "j": 1, "k": 2, "coeff": "-exp(x1)*cos(exp(x1))"},
            {"i": 2, "j": 1, "k": 2, "coeff": "exp(x1)*sin(exp(x1))"},
        ],
        "frame_vectors": [
            {"frame": 1, "components": {"x1": "cos(exp(x1))"}},
            {"frame": 2, "components": {"x1": "-sin(exp(x1))"}},
        ],
        "structure_form": {"entries": [
            {"idx": _mask_indices(m), "coeff": str(int(v))}
            for m, v in sorted(model_form("QK").entries.items())
        ]},
    }
    return Scenario(
        name="euclid_soliton", kind="QK", coframe=coframe,
        xi_builder=_standard_pattern_builder("QK"),
        description="Steady gradient soliton on Euclidean R^8 (rotation angle exp(x1))",
        sample_box={"x1": (-0.8, 0.8)},
        schema=schema,
    )


_HH2_PATTERN_EXPR = {
    "w1": {(1, 2): "1", (3, 4): "1", (5, 6): "1", (7, 8): "-1"},
    "w2": {(1, 3): "1", (2, 4): "-1", (5, 8): "cos(phi)", (6, 8): "sin(phi)",
           (5, 7): "sin(phi)", (6, 7): "-cos(phi)"},
    "w3": {(1, 4): "1", (2, 3): "1", (5, 7): "cos(phi)", (6, 7): "sin(phi)",
           (5, 8): "-sin(phi)", (6, 8): "cos(phi)"},
}

_SU3_PATTERN_EXPR = {
    "w1": {(1, 2): "1", (3, 4): "1", (5, 6): "1", (7, 8): "1"},
    "w2": {(1, 3): "cos(f)", (1, 4): "sin(f)", (2, 3): "sin(f)", (2, 4): "-cos(f)",
           (5, 7): "1", (6, 8): "-1"},
    "w3": {(1, 3): "-sin(f)", (1, 4): "cos(f)", (2, 3): "cos(f)", (2, 4): "sin(f)",
           (5, 8): "1", (6, 7): "1"},
}


def _constant_schema(name, kind, de_table, params, pattern_expr):
    consts = []
    for i, terms in sorted(de_table.items()):
        for (j, k), v in sorted(terms.items()):
            consts.append({"i": i, "j": j, "k": k, "coeff": str(Fraction(-Fraction(v)))})
    return {
        "name": name,
        "kind": kind,
        "active_coords": [],
        "parameters": [{"name": n, "default": d} for n, d in params],
        "structure_constants": consts,
        "frame_vectors": [],
        "structure_form": {"triple": {
            key: [{"idx": list(p), "coeff": s} for p, s in sorted(terms.items())]
            for key, terms in pattern_expr.items()
        }},
    }


_BUILTIN_FACTORIES = {
    "torus_conformal": torus_conformal,
    "hh2_conformal": hh2_conformal,
    "hh2_rotated": hh2_rotated,
    "su3": su3,
    "euclid_soliton": euclid_soliton,
}

BUILTIN_NAMES = tuple(_BUILTIN_FACTORIES)


def builtin(name: str, **options) -> Scenario:
    try:
        factory = _BUILTIN_FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; valid names: {', '.join(BUILTIN_NAMES)}") from None
    return factory(**options)


def list_scenarios() -> list[tuple[str, str]]:
    return [(name, _BUILTIN_FACTORIES[name]().description) for name in BUILTIN_NAMES]


# ----------------------------------------------------------------------
# scenario-file loader
# ----------------------------------------------------------------------

class ScenarioError(ValueError):
    pass


def load(path) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return loads(data, origin=str(path))


def loads(data: dict, origin: str = "<dict>") -> Scenario:
    for key in ("name", "kind", "active_coords", "structure_constants", "structure_form"):
        if key not in data:
            raise ScenarioError(f"{origin}: missing key {key!r}")
    name = data["name"]
    kind = data["kind"]
    if kind not in ("QK", "Spin7"):
        raise ScenarioError(f"{origin}: kind must be QK or Spin7, got {kind!r}")
    coords = tuple(data["active_coords"])
    params = tuple(p["name"] for p in data.get("parameters", []))
    param_defaults = {p["name"]: float(p.get("default", 0.0)) for p in data.get("parameters", [])}
    known = set(coords) | set(params)

    struct: dict[tuple[int, int, int], Expr] = {}
    for item in data["structure_constants"]:
        i, j, k = int(item["i"]), int(item["j"]), int(item["k"])
        if not all(1 <= x <= 8 for x in (i, j, k)) or j == k:
            raise ScenarioError(f"{origin}: bad structure-constant indices ({i},{j},{k})")
        expr = Expr(str(item["coeff"]))
        bad = expr.names() - known
        if bad:
            raise ScenarioError(f"{origin}: unknown names {sorted(bad)} in c^{i}_{j}{k}")
        key = (i, j, k)
        if key in struct:
            raise ScenarioError(f"{origin}: duplicate structure constant c^{i}_{j}{k}")
        struct[key] = expr

    # antisymmetry: a redundant mirror entry must be the exact negative
    probe_env = {n: 0.3 + 0.1 * ix for ix, n in enumerate(sorted(known))}
    for (i, j, k), expr in list(struct.items()):
        mirror = struct.get((i, k, j))
        if mirror is not None:
            for trial in range(3):
                env = {n: v + 0.21 * trial for n, v in probe_env.items()}
                if abs(expr.evaluate(env) + mirror.evaluate(env)) > 1e-12:
                    raise ScenarioError(f"{origin}: c^{i}_{j}{k} != -c^{i}_{k}{j}")

    anchor_exprs: dict[int, dict[str, Expr]] = {}
    for item in data.get("frame_vectors", []):
        fr = int(item["frame"])
        comps = {}
        for coord, text in item.get("components", {}).items():
            if coord not in coords:
                raise ScenarioError(f"{origin}: frame vector {fr} names unknown coordinate {coord!r}")
            comps[coord] = Expr(str(text))
        anchor_exprs[fr] = comps

    def data_fn(pt, space):
        env = {}
        for coord in coords:
            env[coord] = space.var(coord, pt[coord])
        for pname in params:
            env[pname] = space.const(param_defaults[pname])
        c = [[[space.zero() for _ in range(DIM)] for _ in range(DIM)] for _ in range(DIM)]
        for (i, j, k), expr in struct.items():
            val = expr.evaluate(env, exact=space.exact)
            if not isinstance(val, Jet):
                val = space.const(val)
            c[i - 1][j - 1][k - 1] = c[i - 1][j - 1][k - 1] + val
            if (i, k, j) not in struct:
                c[i - 1][k - 1][j - 1] = c[i - 1][k - 1][j - 1] - val
        anchors = [dict() for _ in range(DIM)]
        for fr, comps in anchor_exprs.items():
            for coord, expr in comps.items():
                val = expr.evaluate(env, exact=space.exact)
                anchors[fr - 1][coord] = val if isinstance(val, Jet) else space.const(val)
        return c, anchors

    coframe = CoframeField(name, coords, data_fn, params=params)

    sf = data["structure_form"]
    if "triple" in sf:
        triple_exprs = {
            key: [(mask_of(tuple(e["idx"])), Expr(str(e["coeff"]))) for e in items]
            for key, items in sf["triple"].items()
        }

        def xi_builder(space, pjets):
            env = dict(pjets)
            omegas = []
            for key in ("w1", "w2", "w3"):
                ent = {}
                for mask, expr in triple_exprs[key]:
                    val = expr.evaluate(env, exact=space.exact)
                    ent[mask] = val if isinstance(val, Jet) else space.const(val)
                omegas.append(ent)
            return _triple_to_xi(space, omegas)
    else:
        ent_exprs = [(mask_of(tuple(e["idx"])), Expr(str(e["coeff"]))) for e in sf["entries"]]
        for _, expr in ent_exprs:
            bad = expr.names() - set(params)
            if bad:
                raise ScenarioError(f"{origin}: structure-form entries may reference parameters only, got {sorted(bad)}")

        def xi_builder(space, pjets):
            env = dict(pjets)
            out = {}
            for mask, expr in ent_exprs:
                val = expr.evaluate(env, exact=space.exact)
                out[mask] = val if isinstance(val, Jet) else space.const(val)
            return out

    scen = Scenario(
        name=name, kind=kind, coframe=coframe, xi_builder=xi_builder,
        param_defaults=param_defaults,
        description=data.get("description", f"loaded from {origin}"),
        schema=data,
    )
    _validate(scen, origin)
    return scen


def _validate(scen: Scenario, origin: str) -> None:
    rng = np.random.default_rng(7)
    pts = scen.sample_points(rng, 5)
    for pt in pts:
        ctx = scen.context(pt)
        recon = ctx.reconstruction_residual()
        if not np.isfinite(recon) or recon > 1e-9:
            raise ScenarioError(f"{origin}: first structure equation fails at {pt} (residual {recon:.2e})")
        worst = 0.0
        for i in range(DIM):
            dd = ctx.d(ctx.de[i])
            worst = max(worst, _sup(dd))
        if not np.isfinite(worst) or worst > 1e-9:
            raise ScenarioError(f"{origin}: d^2 e != 0 at {pt} (residual {worst:.2e})")
    ctx = scen.context(pts[0])
    g = metric_from_form(ctx.xi.value_form(), scen.kind)
    if np.max(np.abs(g - np.eye(DIM))) > 1e-8:
        raise ScenarioError(f"{origin}: structure form does not induce the orthonormal metric")


def _sup(form) -> float:
    try:
        return form.sup_all()
    except AttributeError:
        return form.sup_value()
