"""Moving-frame Riemannian geometry for orthonormal coframes.

A geometry is described entirely by an orthonormal coframe e^1..e^8 with
prescribed exterior derivatives

    de^i = -1/2 c^i_{jk} e^j ^ e^k,

the structure functions c being order-2 jets in a set of active coordinates
(plus optional non-spatial ansatz parameters).  Everything downstream is
pointwise: Levi-Civita connection coefficients from the first structure
equation, curvature 2-forms from the second, covariant derivatives of the
structure 4-form, intrinsic torsion and its divergence, Bianchi residuals,
exterior and Lie derivatives.

Forms carry jet coefficients so that first and second derivatives are exact
(no finite differencing); the packed-kernel backend is used for floats, the
generic one for exact rational certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .exterior import DIM, Form, indices_of, popcount
from .kernels import NumForm, pack_matrix
from .scalars import Jet, is_exact_zero
from .structures import Kind, standard_structure

Point = Mapping[str, float]


class VarSpace:
    """The jet-variable space of one evaluation: active coords then parameters."""

    def __init__(self, spatial: Sequence[str], params: Sequence[str] = (), exact: bool = False):
        self.spatial = tuple(spatial)
        self.params = tuple(params)
        self.names = self.spatial + self.params
        self.m = len(self.names)
        self.exact = exact
        self.index = {n: i for i, n in enumerate(self.names)}

    def _lift(self, x):
        if self.exact:
            return Fraction(x) if not isinstance(x, Fraction) else x
        return complex(x)

    def const(self, x) -> Jet:
        return Jet.const(self._lift(x), self.m)

    def var(self, name: str, value) -> Jet:
        return Jet.variable(self._lift(value), self.index[name], self.m)

    def zero(self) -> Jet:
        return Jet.const(self._lift(0), self.m)


@dataclass
class CoframeField:
    """Orthonormal coframe with jet-valued structure functions.

    ``data(point, space)`` returns ``(c, anchors)`` where ``c[i][j][k]`` is
    the jet of c^{i+1}_{j+1,k+1} at the point (antisymmetric in j, k) and
    ``anchors[k]`` maps an active-coordinate name to the jet of that
    coordinate component of the frame vector E_{k+1}; anchors drive
    directional derivatives of coefficient functions.
    """

    name: str
    active_coords: tuple[str, ...]
    data: Callable[[Point, VarSpace], tuple[list, list]]
    params: tuple[str, ...] = ()

    def space(self, exact: bool = False) -> VarSpace:
        return VarSpace(self.active_coords, self.params, exact)


class ExactBackend:
    """Form factory for the generic (exact-capable) representation."""

    def __init__(self, space: VarSpace):
        self.space = space

    def form(self, degree: int, entries: Mapping[int, object]) -> Form:
        return Form(degree, dict(entries))

    def zero(self, degree: int) -> Form:
        return Form.zero(degree)


class NumBackend:
    """Form factory for the packed complex128 jet representation."""

    def __init__(self, space: VarSpace):
        self.space = space
        self.m = space.m

    def form(self, degree: int, entries: Mapping[int, object]) -> NumForm:
        return NumForm.from_entries(degree, entries, self.m)

    def zero(self, degree: int) -> NumForm:
        return NumForm.zero(degree, self.m)


def _act_by(form, triples, backend):
    """Dispatch the gl(8) action; NumForm takes packed/sparse triples."""
    if isinstance(form, NumForm):
        return form.act(triples)
    mat = [[0] * DIM for _ in range(DIM)]
    for i, j, s in triples:
        mat[i][j] = mat[i][j] + s if mat[i][j] else s
    return form.act(mat)


def _two_form_triples(b) -> list:
    out = []
    for mask, c in b.items():
        i, j = [p for p in range(DIM) if mask >> p & 1]
        out.append((i, j, c))
        out.append((j, i, -c))
    return out


class FrameData:
    """Evaluated coframe data at one point, shareable across structure forms.

    Holds the structure-function jets, the connection coefficients and their
    packed 2-form avatars, the coframe differentials de^i, and a cache of
    d(e^I) monomial differentials.  The flow integrator reuses one FrameData
    across thousands of right-hand-side evaluations.
    """

    def __init__(self, coframe: CoframeField, point: Point, space: VarSpace, backend):
        self.coframe = coframe
        self.point = dict(point)
        self.space = space
        self.backend = backend
        c, anchors = coframe.data(self.point, space)
        self.c = c
        self.anchors = anchors
        self.Gamma = self._christoffels(c)
        self.gamma_triples = [self._pack([(i, j, self.Gamma[k][i][j])
                                          for i in range(DIM) for j in range(DIM)
                                          if i != j and not is_exact_zero(self.Gamma[k][i][j])])
                              for k in range(DIM)]
        self.de = [self._de(i) for i in range(DIM)]
        # trace vector sum_k Gamma_{kkj}, the frame components of nabla_{E_k} E_k
        self.gamma_trace = []
        for j in range(DIM):
            tot = space.zero()
            for k in range(DIM):
                tot = tot + self.Gamma[k][k][j]
            self.gamma_trace.append(tot)
        self._dmono: dict[int, object] = {}

    def _pack(self, triples):
        if isinstance(self.backend, NumBackend):
            return pack_matrix(triples, self.space.m)
        return triples

    @staticmethod
    def _christoffels(c):
        half = Fraction(1, 2)
        gamma = [[[None] * DIM for _ in range(DIM)] for _ in range(DIM)]
        for k in range(DIM):
            for i in range(DIM):
                for j in range(DIM):
                    # metric-compatible, torsion-free connection of an
                    # orthonormal coframe: 2 Gamma_kij = c^j_ki - c^i_kj - c^k_ij
                    gamma[k][i][j] = (c[j][k][i] - c[i][k][j] - c[k][i][j]) * half
        return gamma

    def _de(self, i: int):
        ent: dict = {}
        for j in range(DIM):
            for k in range(j + 1, DIM):
                v = self.c[i][j][k]
                if not is_exact_zero(v):
                    ent[(1 << j) | (1 << k)] = -v
        return self.backend.form(2, ent)


class GeometryContext:
    """All pointwise geometry of (frame, structure form) at one point."""

    def __init__(self, frame: FrameData, xi, kind: Kind):
        self.frame = frame
        self.coframe = frame.coframe
        self.point = frame.point
        self.space = frame.space
        self.backend = frame.backend
        self.kind = kind
        self.xi = xi
        std = standard_structure(kind)
        self.inv_constant = float(std.inv_constant) if not self.space.exact else std.inv_constant
        self.c = frame.c
        self.anchors = frame.anchors
        self.Gamma = frame.Gamma
        self.gamma_triples = frame.gamma_triples
        self.de = frame.de
        self._dmono = frame._dmono
        self._nabla_xi: list | None = None
        self._torsion: list | None = None

    def _pack(self, triples):
        return self.frame._pack(triples)

    def basis_form(self, mask: int):
        return self.backend.form(popcount(mask), {mask: self.space.const(1)})

    # -- scalar calculus --------------------------------------------------

    def frame_scalar_deriv(self, k: int, h: Jet) -> Jet:
        """Directional derivative E_k(h) through the coordinate anchors."""
        out = self.space.zero()
        for coord, a in self.anchors[k].items():
            if is_exact_zero(a):
                continue
            out = out + a * h.deriv(self.space.index[coord])
        return out

    def d_scalar(self, h: Jet):
        ent = {}
        for k in range(DIM):
            v = self.frame_scalar_deriv(k, h)
            if not is_exact_zero(v):
                ent[1 << k] = v
        return self.backend.form(1, ent)

    def frame_deriv_form(self, k: int, form):
        """E_k applied to each coefficient of a form (no connection term)."""
        out = None
        for coord, a in self.anchors[k].items():
            if is_exact_zero(a):
                continue
            term = form.deriv_coeffs(self.space.index[coord]).scale(a)
            out = term if out is None else out + term
        return self.backend.zero(form.degree) if out is None else out

    # -- exterior and covariant calculus ------------------------------------

    def d_monomial(self, mask: int):
        cached = self._dmono.get(mask)
        if cached is not None:
            return cached
        deg = popcount(mask)
        out = self.backend.zero(deg + 1)
        legs = [p for p in range(DIM) if mask >> p & 1]
        for t, p in enumerate(legs):
            prefix = mask & ((1 << p) - 1)
            suffix = mask ^ prefix ^ (1 << p)
            term = self.de[p]
            if prefix:
                term = self.basis_form(prefix).wedge(term)
            if suffix:
                term = term.wedge(self.basis_form(suffix))
            out = out + (term if t % 2 == 0 else -term)
        self._dmono[mask] = out
        return out

    def d(self, form):
        """Exterior derivative of a form with jet coefficients in this coframe."""
        out = self.backend.zero(form.degree + 1)
        for mask, h in list(form.items()):
            dh = self.d_scalar(h)
            if not dh.is_zero():
                out = out + dh.wedge(self.basis_form(mask))
            if mask:
                out = out + self.d_monomial(mask).scale(h)
        return out

    def covd(self, k: int, form):
        """Covariant derivative nabla_{E_k} of a form with jet coefficients."""
        out = self.frame_deriv_form(k, form)
        return out - _act_by(form, self.gamma_triples[k], self.backend)

    def interior_frame(self, form, k: int):
        v = [self.space.zero()] * DIM
        v = list(v)
        v[k] = self.space.const(1)
        return form.interior(v)

    def lie(self, x_components: Sequence[Jet], form):
        """Cartan formula L_X = X -| d + d(X -| .) with X in frame components."""
        xa = list(x_components)
        return self.d(form).interior(xa) + self.d(form.interior(xa))

    # -- structure operators -------------------------------------------------

    def diamond(self, b):
        return _act_by(self.xi, self._pack(_two_form_triples(b)), self.backend)

    def iota3(self, psi):
        return psi.triple3(self.xi)

    def pi_m(self, b):
        return self.iota3(self.diamond(b)).scale(1.0 / float(self.inv_constant)
                                                 if not self.space.exact else 1 / self.inv_constant)

    def pi4_m(self, psi):
        scale = 1.0 / float(self.inv_constant) if not self.space.exact else 1 / self.inv_constant
        return self.diamond(self.iota3(psi).scale(scale))

    # -- torsion pipeline -------------------------------------------------------

    def nabla_xi(self, k: int):
        if self._nabla_xi is None:
            self._nabla_xi = [None] * DIM
        if self._nabla_xi[k] is None:
            self._nabla_xi[k] = self.covd(k, self.xi)
        return self._nabla_xi[k]

    def torsion(self) -> list:
        """T(E_k) for k = 0..7, from T = iota3(nabla xi) / inversion constant."""
        if self._torsion is None:
            scale = 1.0 / float(self.inv_constant) if not self.space.exact else 1 / self.inv_constant
            self._torsion = [self.iota3(self.nabla_xi(k)).scale(scale) for k in range(DIM)]
        return self._torsion

    def torsion_of_vector(self, x_components: Sequence[Jet]):
        t = self.torsion()
        out = self.backend.zero(2)
        for k in range(DIM):
            if not is_exact_zero(x_components[k]):
                out = out + t[k].scale(x_components[k])
        return out

    def torsion_second_route(self) -> list:
        """-pi_m of the connection 2-forms; must agree with torsion()."""
        out = []
        for k in range(DIM):
            ent = {}
            for i in range(DIM):
                for j in range(i + 1, DIM):
                    g = self.Gamma[k][i][j]
                    if not is_exact_zero(g):
                        ent[(1 << i) | (1 << j)] = g
            gamma2 = self.backend.form(2, ent)
            out.append(-self.pi_m(gamma2))
        return out

    def nabla_torsion(self, a: int, b: int):
        """(nabla_{E_a} T)(E_b) = nabla_a(T(E_b)) - T(nabla_{E_a} E_b)."""
        t = self.torsion()
        out = self.covd(a, t[b])
        for j in range(DIM):
            g = self.Gamma[a][b][j]
            if not is_exact_zero(g):
                out = out - t[j].scale(g)
        return out

    def div_torsion(self):
        """div T = sum_k nabla_{E_k}(T(E_k)) - T(nabla_{E_k} E_k)."""
        t = self.torsion()
        out = self.backend.zero(2)
        for k in range(DIM):
            out = out + self.covd(k, t[k])
        for j in range(DIM):
            g = self.frame.gamma_trace[j]
            if not is_exact_zero(g):
                out = out - t[j].scale(g)
        return out

    def nabla_form_vector(self, form2, a: int):
        """nabla_{E_a} of a 2-form (coefficient derivative plus connection action)."""
        return self.covd(a, form2)

    # -- curvature ----------------------------------------------------------------

    def connection_one_forms(self) -> list:
        """omega^i_j = sum_k Gamma_{k j i} e^k (so nabla E_j = omega^i_j E_i)."""
        om = [[None] * DIM for _ in range(DIM)]
        for i in range(DIM):
            for j in range(DIM):
                ent = {}
                for k in range(DIM):
                    g = self.Gamma[k][j][i]
                    if not is_exact_zero(g):
                        ent[1 << k] = g
                om[i][j] = self.backend.form(1, ent)
        return om

    def curvature(self) -> list:
        """Curvature 2-forms Omega^i_j = d omega^i_j + omega^i_k ^ omega^k_j."""
        om = self.connection_one_forms()
        r = [[None] * DIM for _ in range(DIM)]
        for i in range(DIM):
            for j in range(DIM):
                tot = self.d(om[i][j])
                for k in range(DIM):
                    if om[i][k].is_zero() or om[k][j].is_zero():
                        continue
                    tot = tot + om[i][k].wedge(om[k][j])
                r[i][j] = tot
        return r

    def curvature_two_form(self, r, a: int, b: int):
        """The curvature of the pair (E_a, E_b) viewed as a 2-form.

        Orientation convention: the sign is fixed so that the skew covariant
        derivative of the torsion satisfies
        pi_m((nabla_a T)(E_b) - (nabla_b T)(E_a)) = pi_m(R2(a, b)).
        """
        mask = (1 << a) | (1 << b)
        sgn = 1 if a < b else -1
        ent = {}
        for i in range(DIM):
            for j in range(i + 1, DIM):
                v = r[i][j].coeff(mask)
                if not is_exact_zero(v):
                    ent[(1 << i) | (1 << j)] = v if sgn > 0 else -v
        return self.backend.form(2, ent)

    def ricci(self, r=None) -> np.ndarray:
        """Ricci tensor Ric_ab = sum_k <R(E_k, E_a) E_b, E_k> in the frame."""
        if r is None:
            r = self.curvature()
        ric = np.zeros((DIM, DIM))
        for a in range(DIM):
            for b in range(DIM):
                tot = 0.0
                for k in range(DIM):
                    if k == a:
                        continue
                    mask = (1 << k) | (1 << a)
                    sgn = 1.0 if k < a else -1.0
                    v = r[k][b].coeff(mask)
                    val = v.val if isinstance(v, Jet) else v
                    tot += sgn * complex(val).real
                ric[a, b] = tot
        return ric

    def reconstruction_residual(self) -> float:
        """Sup residual of de^i + omega^i_j ^ e^j over all i (should vanish)."""
        om = self.connection_one_forms()
        worst = 0.0
        for i in range(DIM):
            tot = self.de[i]
            for j in range(DIM):
                if om[i][j].is_zero():
                    continue
                tot = tot + om[i][j].wedge(self.basis_form(1 << j))
            worst = max(worst, _sup_all(tot))
        return worst


def _sup_all(form) -> float:
    if isinstance(form, NumForm):
        return form.sup_all()
    worst = 0.0
    for _, c in form.items():
        if isinstance(c, Jet):
            vals = [c.val, *c.lin, *(c.quad if c.order >= 2 else ())]
        else:
            vals = [c]
        for v in vals:
            worst = max(worst, abs(complex(v)))
    return worst


# ----------------------------------------------------------------------
# spec-level operation surface
# ----------------------------------------------------------------------

def make_frame(coframe: CoframeField, point: Point, exact: bool = False) -> FrameData:
    space = coframe.space(exact)
    backend = ExactBackend(space) if exact else NumBackend(space)
    return FrameData(coframe, point, space, backend)


def make_context(coframe: CoframeField, xi_builder, kind: Kind, point: Point,
                 params: Mapping[str, float] | None = None, exact: bool = False,
                 param_jets: bool = False, frame: FrameData | None = None) -> GeometryContext:
    """Evaluate a coframe + structure pattern at a point.

    ``xi_builder(space, params)`` returns the structure 4-form entries (mask
    -> scalar/Jet).  With ``param_jets`` the parameter values are seeded as
    jet variables so parameter derivatives ride along.  Passing a prebuilt
    ``frame`` (same coframe and point) skips re-evaluating the connection.
    """
    if frame is None:
        frame = make_frame(coframe, point, exact)
    space = frame.space
    backend = frame.backend
    pvals = dict(params or {})
    pjets = {}
    for name in coframe.params:
        val = pvals[name]
        pjets[name] = space.var(name, val) if param_jets else space.const(val)
    entries = xi_builder(space, pjets)
    xi = entries if isinstance(entries, (Form, NumForm)) else backend.form(4, entries)
    return GeometryContext(frame, xi, kind)


def connection(ctx: GeometryContext):
    return ctx.Gamma


def curvature(ctx: GeometryContext):
    return ctx.curvature()


def nabla_structure(ctx: GeometryContext, k: int):
    return ctx.nabla_xi(k)


def torsion_field(ctx: GeometryContext, check_tol: float | None = None) -> list:
    t = ctx.torsion()
    if check_tol is not None:
        t2 = ctx.torsion_second_route()
        worst = max(_sup_all(a - b) for a, b in zip(t, t2))
        if worst > check_tol:
            raise ValueError(f"torsion double-route disagreement {worst:.3e}")
    return t


def divergence_torsion(ctx: GeometryContext):
    return ctx.div_torsion()


def bianchi_residual(ctx: GeometryContext, a: int, b: int, r=None):
    """(lhs, rhs) of the pi_m-projected skew derivative identity for (E_a, E_b)."""
    if r is None:
        r = ctx.curvature()
    lhs = ctx.pi_m(ctx.nabla_torsion(a, b) - ctx.nabla_torsion(b, a))
    rhs = ctx.pi_m(ctx.curvature_two_form(r, a, b))
    return lhs, rhs


def bianchi_full_residual(ctx: GeometryContext, a: int, b: int, r=None) -> float:
    """Residual of the full identity including the quadratic contraction term."""
    if r is None:
        r = ctx.curvature()
    lhs = ctx.nabla_torsion(a, b) - ctx.nabla_torsion(b, a)
    quad = ctx.nabla_xi(b).triple3(ctx.nabla_xi(a)) - ctx.nabla_xi(a).triple3(ctx.nabla_xi(b))
    rhs = ctx.pi_m(ctx.curvature_two_form(r, a, b)) + quad.scale(1.0 / float(ctx.inv_constant))
    return _sup_all(lhs - rhs)


def conformal_torsion(ctx: GeometryContext, df) -> list:
    """Torsion of a conformally parallel structure: T(E_k) = pi_m(e^k ^ df)."""
    return [ctx.pi_m(ctx.basis_form(1 << k).wedge(df)) for k in range(DIM)]


def exterior_derivative(ctx: GeometryContext, form):
    return ctx.d(form)


def lie_derivative(ctx: GeometryContext, form, x_components: Sequence[Jet]):
    return ctx.lie(x_components, form)


def lie_metric(ctx: GeometryContext, x_components: Sequence[Jet]) -> list:
    """Matrix of L_X g in the frame: S_jk = (L_X e^j)(E_k) + (L_X e^k)(E_j)."""
    lxe = []
    for i in range(DIM):
        ei = ctx.basis_form(1 << i)
        lxe.append(ctx.lie(x_components, ei))
    s = [[None] * DIM for _ in range(DIM)]
    for j in range(DIM):
        for k in range(DIM):
            s[j][k] = lxe[j].coeff(1 << k) + lxe[k].coeff(1 << j)
    return s


def d_squared_residual(ctx: GeometryContext, form) -> float:
    return _sup_all(ctx.d(ctx.d(form)))
