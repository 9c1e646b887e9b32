"""Model 4-forms on R^8 and their operator calculus.

Two structure kinds are supported: the quaternion-Kaehler (QK) 4-form

    Omega = (w1^w1 + w2^w2 + w3^w3) / 2

built from the standard symplectic triple, and the Spin(7) 4-form

    Phi = (-w1^w1 + w2^w2 + w3^w3) / 2.

This module certifies their algebra exactly: the eigenspace splitting of
2-forms under a -> *(a ^ xi), the infinitesimal-action ("diamond") operator
and its inverse through the triple contraction, the 4-form submodule
projectors, and metric extraction from a bare nondegenerate 4-form.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np

from . import ratlin
from .exterior import (
    DIM,
    FULL_MASK,
    Form,
    flat,
    indices_of,
    mask_of,
    popcount,
    vol_form,
)
from .scalars import is_exact_zero, scalar_value

Kind = Literal["QK", "Spin7"]

MASKS2 = [m for m in range(1 << DIM) if popcount(m) == 2]
MASKS4 = [m for m in range(1 << DIM) if popcount(m) == 4]
MASKS6 = [m for m in range(1 << DIM) if popcount(m) == 6]
IDX2 = {m: i for i, m in enumerate(MASKS2)}
IDX4 = {m: i for i, m in enumerate(MASKS4)}
IDX6 = {m: i for i, m in enumerate(MASKS6)}


def standard_triple() -> tuple[Form, Form, Form]:
    """The compatible symplectic triple w1, w2, w3 in the coordinate basis."""
    w1 = Form(2, {mask_of(p): Fraction(s) for p, s in [((1, 2), 1), ((3, 4), 1), ((5, 6), 1), ((7, 8), 1)]})
    w2 = Form(2, {mask_of(p): Fraction(s) for p, s in [((1, 3), 1), ((2, 4), -1), ((5, 7), 1), ((6, 8), -1)]})
    w3 = Form(2, {mask_of(p): Fraction(s) for p, s in [((1, 4), 1), ((2, 3), 1), ((5, 8), 1), ((6, 7), 1)]})
    return w1, w2, w3


def model_form(kind: Kind) -> Form:
    w1, w2, w3 = standard_triple()
    half = Fraction(1, 2)
    if kind == "QK":
        return (w1.wedge(w1) + w2.wedge(w2) + w3.wedge(w3)).scale(half)
    if kind == "Spin7":
        return (w2.wedge(w2) + w3.wedge(w3) - w1.wedge(w1)).scale(half)
    raise ValueError(f"unknown structure kind {kind!r}")


# ----------------------------------------------------------------------
# diamond / triple contraction
# ----------------------------------------------------------------------

def two_form_matrix(b: Form):
    """Antisymmetric 8x8 matrix of a 2-form: M[i][j] = b(e_{i+1}, e_{j+1})."""
    zero = 0
    m = [[zero] * DIM for _ in range(DIM)]
    for mask, c in b.entries.items():
        i, j = [p for p in range(DIM) if mask >> p & 1]
        m[i][j] = c
        m[j][i] = -c
    return m


def diamond(b, xi: Form) -> Form:
    """Infinitesimal action b diamond xi for a 2-form or an 8x8 matrix b."""
    if isinstance(b, Form):
        if b.degree != 2:
            raise ValueError("diamond expects a 2-form or an 8x8 matrix")
        return xi.act(two_form_matrix(b))
    return xi.act(b)


def triple_contract(psi: Form, kappa: Form, g=None) -> Form:
    """psi -|3 kappa; non-Euclidean metrics raise sharps through g."""
    if g is None:
        return psi.triple3(kappa)
    gm = np.asarray(g, dtype=float)
    ginv = np.linalg.inv(gm)
    out = Form.zero(2)
    for mask, c in psi.entries.items():
        legs = [p for p in range(DIM) if mask >> p & 1]
        for t in range(4):
            kept = legs[t]
            others = [p for p in legs if p != kept]
            inner = kappa
            for b in reversed(others):
                inner = inner.interior(list(ginv[b]))
            term = Form(1, {1 << kept: 1}).wedge(inner).scale(c if t % 2 == 0 else -c)
            out = out + term
    return out


# ----------------------------------------------------------------------
# exact Lambda^2 splitting
# ----------------------------------------------------------------------

@dataclass
class Lambda2Splitting:
    """Eigenspace data of L: a -> *(a ^ xi) acting on 2-forms."""

    eigenvalues: list[Fraction]
    dimensions: list[int]
    projectors: list[list[list[Fraction]]]
    m_index: int

    def project(self, b: Form, which: int) -> Form:
        p = self.projectors[which]
        vec = form2_to_vec(b)
        out = {}
        for r, mask in enumerate(MASKS2):
            tot = None
            for c, x in enumerate(vec):
                if is_exact_zero(x):
                    continue
                pc = p[r][c]
                if pc:
                    t = pc * x
                    tot = t if tot is None else tot + t
            if tot is not None and not is_exact_zero(tot):
                out[mask] = tot
        return Form(2, out)

    def component(self, b: Form, eigenvalue) -> Form:
        lam = Fraction(eigenvalue)
        return self.project(b, self.eigenvalues.index(lam))


def form2_to_vec(b: Form) -> list:
    vec = [0] * len(MASKS2)
    for mask, c in b.entries.items():
        vec[IDX2[mask]] = c
    return vec


def lambda2_operator_matrix(xi: Form) -> list[list[Fraction]]:
    """Matrix of a -> *(a ^ xi) on the 28 increasing-index 2-form monomials."""
    cols = []
    for mask in MASKS2:
        img = Form(2, {mask: Fraction(1)}).wedge(xi).hodge_euclid()
        cols.append([Fraction(img.coeff(m2)) for m2 in MASKS2])
    return ratlin.transpose(cols)


def lambda2_split(xi: Form, kind: Kind) -> Lambda2Splitting:
    mat = lambda2_operator_matrix(xi)
    try:
        trips = ratlin.eig_projectors(mat)
    except ValueError as exc:
        raise ValueError(f"2-form operator of {kind} form is not rationally diagonalizable: {exc}") from exc
    if len(trips) > 3:
        raise ValueError(f"expected at most 3 eigenvalues, found {[t[0] for t in trips]}")
    trips.sort(key=lambda t: t[0], reverse=True)
    eigenvalues = [t[0] for t in trips]
    dimensions = [t[1] for t in trips]
    projectors = [t[2] for t in trips]
    # m is the complement of the stabilizer algebra: the 15-dim eigenvalue-1
    # space for QK, the 7-dim space for Spin(7).
    if kind == "QK":
        m_index = eigenvalues.index(Fraction(1))
    else:
        m_index = dimensions.index(7)
    return Lambda2Splitting(eigenvalues, dimensions, projectors, m_index)


# ----------------------------------------------------------------------
# StructureForm
# ----------------------------------------------------------------------

@dataclass
class StructureForm:
    """A model 4-form bundled with its induced metric data and operators.

    ``inv_constant`` is the scalar c with iota3(kappa diamond xi) = c kappa on
    the m-module; it is 32 for QK and is derived exactly for Spin(7).
    """

    kind: Kind
    xi: Form
    metric: np.ndarray
    volume: Form
    m_dim: int
    inv_constant: Fraction
    _lambda2: Lambda2Splitting | None = field(default=None, repr=False)

    @property
    def lambda2(self) -> Lambda2Splitting:
        if self._lambda2 is None:
            self._lambda2 = lambda2_split(self.xi, self.kind)
        return self._lambda2

    # operator shortcuts bound to xi -----------------------------------

    def diamond(self, b) -> Form:
        return diamond(b, self.xi)

    def iota3(self, psi: Form) -> Form:
        return triple_contract(psi, self.xi)

    def invert_diamond(self, psi: Form, tol: float | None = 1e-9) -> Form:
        """Inverse of diamond on its image in Lambda^4; rejects other input.

        Returns kappa in the m-module with diamond(kappa) = psi.  When tol is
        None the residual is not checked (used on jets mid-pipeline).
        """
        kappa = self.iota3(psi).scale(1 / self.inv_constant)
        if tol is not None:
            resid = self.diamond(kappa) - psi
            err = resid.value_part().sup_value()
            ref = max(psi.value_part().sup_value(), 1.0)
            if err > tol * ref:
                raise ValueError(f"4-form is not in diamond(m): residual {err:.3e}")
        return kappa

    def pi_m(self, b: Form) -> Form:
        """Projection of a 2-form onto the m-module, via iota3(b diamond xi)/c.

        Works for any scalar type (jets included) since it needs no cached
        eigenprojector; agrees exactly with the spectral projector.
        """
        return self.iota3(self.diamond(b)).scale(1 / self.inv_constant)

    def pi4_m(self, psi: Form) -> Form:
        """Projection of a 4-form onto diamond(m) (Lambda^4+_15 for QK)."""
        return self.diamond(self.iota3(psi).scale(1 / self.inv_constant))


def _derive_inv_constant(xi: Form, kind: Kind, split: Lambda2Splitting) -> Fraction:
    p = split.projectors[split.m_index]
    kappa = None
    for c in range(len(MASKS2)):
        col = [p[r][c] for r in range(len(MASKS2))]
        if any(col):
            kappa = Form(2, {MASKS2[r]: col[r] for r in range(len(MASKS2)) if col[r]})
            break
    assert kappa is not None
    img = triple_contract(diamond(kappa, xi), xi)
    ratios = set()
    for mask, c in kappa.entries.items():
        ratios.add(Fraction(img.coeff(mask)) / Fraction(c))
    for mask, c in img.entries.items():
        if mask not in kappa.entries and not is_exact_zero(c):
            raise ValueError("iota3 after diamond does not preserve the m-module line")
    if len(ratios) != 1:
        raise ValueError(f"iota3 o diamond is not scalar on m: ratios {ratios}")
    return ratios.pop()


@lru_cache(maxsize=None)
def standard_structure(kind: Kind) -> StructureForm:
    """The flat model structure with Euclidean metric and exact splitting."""
    xi = model_form(kind)
    split = lambda2_split(xi, kind)
    if kind == "QK":
        const = Fraction(32)
        derived = _derive_inv_constant(xi, kind, split)
        if derived != const:
            raise AssertionError(f"QK inversion constant came out {derived}, expected 32")
        m_dim = 15
    else:
        const = _derive_inv_constant(xi, kind, split)
        m_dim = split.dimensions[split.m_index]
    s = StructureForm(
        kind=kind,
        xi=xi,
        metric=np.eye(DIM),
        volume=vol_form(),
        m_dim=m_dim,
        inv_constant=const,
        _lambda2=split,
    )
    return s


def structure_for_pattern(xi: Form, kind: Kind) -> StructureForm:
    """Structure object for a (possibly rotated) model pattern.

    The operational projectors only need xi and the inversion constant, so a
    pattern with non-rational or jet-valued coefficients is fine; the exact
    Lambda^2 splitting is computed lazily and only works for rational xi.
    """
    std = standard_structure(kind)
    return StructureForm(
        kind=kind,
        xi=xi,
        metric=np.eye(DIM),
        volume=vol_form(),
        m_dim=std.m_dim,
        inv_constant=std.inv_constant,
    )


# ----------------------------------------------------------------------
# Lambda^4 module decomposition (QK)
# ----------------------------------------------------------------------

LAMBDA4_LABELS = ("L4+_1", "L4+_5", "L4+_15", "L4+_14", "L4-_5", "L4-_30")
LAMBDA4_DIMS = {"L4+_1": 1, "L4+_5": 5, "L4+_15": 15, "L4+_14": 14, "L4-_5": 5, "L4-_30": 30}


def _form4_to_vec(a: Form) -> list:
    vec = [0] * len(MASKS4)
    for mask, c in a.entries.items():
        vec[IDX4[mask]] = c
    return vec


def _vec_to_form4(vec) -> Form:
    return Form(4, {MASKS4[i]: v for i, v in enumerate(vec) if not is_exact_zero(v)})


@lru_cache(maxsize=None)
def lambda4_projectors(kind: Kind = "QK") -> dict[str, list[list[Fraction]]]:
    """Exact orthogonal projectors onto the six QK submodules of 4-forms.

    Built from the defining linear conditions, quantified over the 3-basis of
    the eigenvalue-5 2-form space: self-dual alpha with
    *(alpha^w)^Omega = lam alpha^w for lam = 5 resp. 1, alpha^w = 0, and the
    anti-self-dual analogues with lam = 1 resp. -3.  The line spanned by
    Omega itself also satisfies the lam = 5 condition and is split off
    orthogonally.
    """
    if kind != "QK":
        raise ValueError("4-form module classification is defined for the QK kind only")
    s = standard_structure("QK")
    xi = s.xi
    split = s.lambda2
    w_idx = split.eigenvalues.index(Fraction(5))
    wbasis = _projector_column_basis(split.projectors[w_idx])
    n4 = len(MASKS4)

    # Hodge and wedge-against-w matrices on 4-form coefficient vectors.
    star = ratlin.zeros(n4, n4)
    for c, mask in enumerate(MASKS4):
        img = Form(4, {mask: Fraction(1)}).hodge_euclid()
        for mm, cc in img.entries.items():
            star[IDX4[mm]][c] = Fraction(cc)

    def cond_matrix(w: Form, lam: Fraction) -> list[list[Fraction]]:
        # rows of alpha -> *(alpha ^ w) ^ Omega - lam alpha ^ w, valued in 6-forms
        rows = ratlin.zeros(len(MASKS6), n4)
        for c, mask in enumerate(MASKS4):
            a = Form(4, {mask: Fraction(1)})
            aw = a.wedge(w)
            img = aw.hodge_euclid().wedge(xi) - aw.scale(lam)
            for mm, cc in img.entries.items():
                rows[IDX6[mm]][c] += Fraction(cc)
        return rows

    def wedge_matrix(w: Form) -> list[list[Fraction]]:
        rows = ratlin.zeros(len(MASKS6), n4)
        for c, mask in enumerate(MASKS4):
            img = Form(4, {mask: Fraction(1)}).wedge(w)
            for mm, cc in img.entries.items():
                rows[IDX6[mm]][c] += Fraction(cc)
        return rows

    sd_rows = ratlin.add(star, ratlin.scale(ratlin.eye(n4), -1))      # *a = a
    asd_rows = ratlin.add(star, ratlin.eye(n4))                        # *a = -a

    def joint_kernel(blocks: list[list[list[Fraction]]]) -> list[list[Fraction]]:
        stacked = [row for block in blocks for row in block]
        return ratlin.nullspace(stacked)

    # Forms with alpha ^ w = 0 satisfy every eigen-condition vacuously, and
    # Omega itself meets the lam = 5 condition, so the joint kernels nest:
    # K5 = <Omega> + L4+_5 + L4+_14 and K15 = L4+_15 + L4+_14.  The module
    # projectors are differences of the (commuting, nested) kernel projectors.
    k5 = joint_kernel([sd_rows] + [cond_matrix(w, Fraction(5)) for w in wbasis])
    k15 = joint_kernel([sd_rows] + [cond_matrix(w, Fraction(1)) for w in wbasis])
    k14 = joint_kernel([sd_rows] + [wedge_matrix(w) for w in wbasis])
    k14asd = joint_kernel([asd_rows] + [wedge_matrix(w) for w in wbasis])
    if k14asd:
        raise AssertionError("anti-self-dual forms annihilated by every twistor 2-form should not exist")
    km5 = joint_kernel([asd_rows] + [cond_matrix(w, Fraction(1)) for w in wbasis])
    km30 = joint_kernel([asd_rows] + [cond_matrix(w, Fraction(-3)) for w in wbasis])

    xi_vec = [Fraction(x) for x in _form4_to_vec(xi)]
    p1 = ratlin.orthogonal_projector([xi_vec])
    p14 = ratlin.orthogonal_projector(k14)
    p5 = ratlin.add(ratlin.orthogonal_projector(k5), ratlin.scale(ratlin.add(p1, p14), -1))
    p15 = ratlin.add(ratlin.orthogonal_projector(k15), ratlin.scale(p14, -1))
    out = {
        "L4+_1": p1,
        "L4+_5": p5,
        "L4+_15": p15,
        "L4+_14": p14,
        "L4-_5": ratlin.orthogonal_projector(km5),
        "L4-_30": ratlin.orthogonal_projector(km30),
    }
    for label, proj in out.items():
        tr = sum(proj[i][i] for i in range(n4))
        if tr != LAMBDA4_DIMS[label]:
            raise AssertionError(f"{label} projector has rank {tr}, expected {LAMBDA4_DIMS[label]}")
    return out


def _projector_column_basis(p: list[list[Fraction]]) -> list[Form]:
    cols = ratlin.transpose(p)
    red, pivots = ratlin.rref(cols)
    basis = []
    for r in range(len(pivots)):
        vec = red[r]
        basis.append(Form(2, {MASKS2[i]: vec[i] for i in range(len(MASKS2)) if vec[i]}))
    return basis


def lambda4_classify(a: Form, kind: Kind = "QK", tol: float | None = None) -> dict[str, Form]:
    """Split a 4-form into the six QK submodules; components sum back to a.

    With exact coefficients the residual is required to vanish identically;
    with floats the reconstruction must hold within tol (default 1e-12).
    """
    if a.degree != 4:
        raise ValueError("classification expects a 4-form")
    projs = lambda4_projectors(kind)
    vec = _form4_to_vec(a)
    out = {}
    total = Form.zero(4)
    for label in LAMBDA4_LABELS:
        p = projs[label]
        comp_vec = []
        for r in range(len(MASKS4)):
            tot = None
            row = p[r]
            for c, x in enumerate(vec):
                if is_exact_zero(x) or not row[c]:
                    continue
                t = row[c] * x
                tot = t if tot is None else tot + t
            comp_vec.append(0 if tot is None else tot)
        comp = _vec_to_form4(comp_vec)
        out[label] = comp
        total = total + comp
    resid = total - a
    exact = all(isinstance(scalar_value(c), (int, Fraction)) for c in a.entries.values())
    if exact:
        if not resid.is_zero():
            raise ValueError("exact 4-form classification left a nonzero residual")
    else:
        bound = 1e-12 if tol is None else tol
        if resid.sup_value() > bound * max(1.0, a.sup_value()):
            raise ValueError(f"4-form classification residual {resid.sup_value():.3e} above tolerance")
    return out


# ----------------------------------------------------------------------
# metric extraction
# ----------------------------------------------------------------------

METRIC_CONSTANT = {
    "QK": 125.0 / (4.0 * 6.0 ** (1.0 / 3.0)),
    "Spin7": 343.0 / 6.0 ** (7.0 / 3.0),
}


def _positively_oriented_extension(x: np.ndarray, orient: float) -> list[np.ndarray]:
    """Deterministic extension of x to a basis {x, b1..b7} oriented like the form.

    Gram-Schmidt against the Euclidean product over the standard basis; the
    quotient formula is extension-independent so any deterministic choice is
    valid, the orientation sign is fixed on the last vector.
    """
    basis = [x / np.linalg.norm(x)]
    for i in range(DIM):
        cand = np.zeros(DIM)
        cand[i] = 1.0
        for b in basis:
            cand = cand - np.dot(cand, b) * b
        n = np.linalg.norm(cand)
        if n > 1e-9:
            basis.append(cand / n)
        if len(basis) == DIM:
            break
    full = np.column_stack([x] + basis[1:])
    if np.linalg.det(full) * orient < 0:
        basis[-1] = -basis[-1]
    return basis[1:]


def _quartic_norm(a: Form, x: np.ndarray, const: float, orient: float) -> float:
    ext = _positively_oriented_extension(x, orient)
    xi_x = a.interior(list(x))                      # 3-form
    b = [xi_x.interior(list(e)) for e in ext]       # seven 2-forms
    denom = xi_x.wedge(a).evaluate([list(e) for e in ext])
    denom = complex(scalar_value(denom)).real
    if abs(denom) < 1e-14:
        raise ValueError("degenerate 4-form: denominator of the metric formula vanishes")
    mat = np.zeros((7, 7))
    for i in range(7):
        for j in range(i, 7):
            val = b[i].wedge(b[j]).wedge(xi_x).evaluate([list(e) for e in ext])
            mat[i, j] = mat[j, i] = complex(scalar_value(val)).real
    det = float(np.linalg.det(mat))
    if det <= 0:
        raise ValueError("degenerate 4-form: metric determinant is not positive")
    g2 = const * det ** (1.0 / 3.0) / denom ** 3
    if g2 <= 0:
        raise ValueError("metric formula produced a non-positive square")
    return float(np.sqrt(g2))


def metric_from_form(a: Form, kind: Kind) -> np.ndarray:
    """Recover the metric induced by a nondegenerate model 4-form.

    The closed formula yields g(X, X)^2 for one vector at a time; evaluating
    it on the 36-member polarization family {e_i} and {e_i + e_j} determines
    the full symmetric matrix.
    """
    aa = a.wedge(a)
    top = complex(scalar_value(aa.coeff(FULL_MASK))).real
    if top == 0:
        raise ValueError("degenerate 4-form: its square vanishes")
    # the quotient formula needs a basis positively oriented for the form's
    # own volume; the sign of a^a fixes that orientation
    orient = 1.0 if top > 0 else -1.0
    const = METRIC_CONSTANT[kind]
    af = a.value_part()
    diag = np.zeros(DIM)
    for i in range(DIM):
        x = np.zeros(DIM)
        x[i] = 1.0
        diag[i] = _quartic_norm(af, x, const, orient)
    g = np.diag(diag)
    for i in range(DIM):
        for j in range(i + 1, DIM):
            x = np.zeros(DIM)
            x[i] = 1.0
            x[j] = 1.0
            gpp = _quartic_norm(af, x, const, orient)
            g[i, j] = g[j, i] = 0.5 * (gpp - diag[i] - diag[j])
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise ValueError("extracted metric is not positive-definite") from None
    return g


def quaternionic_pairing(v: Sequence, w: Sequence, u: Sequence, s: StructureForm):
    """Coefficient of vol in (v -| w -| xi) ^ (v -| u -| xi) ^ xi (QK only)."""
    if s.kind != "QK":
        raise ValueError("quaternionic pairing is defined for the QK kind")
    a = s.xi.interior(list(v)).interior(list(w))
    b = s.xi.interior(list(v)).interior(list(u))
    return a.wedge(b).wedge(s.xi).coeff(FULL_MASK)


def decompose_two_form(b: Form, s: StructureForm) -> dict[str, Form]:
    """Split a 2-form into the eigenmodules of a -> *(a ^ xi)."""
    split = s.lambda2
    out = {}
    for which, (lam, dim) in enumerate(zip(split.eigenvalues, split.dimensions)):
        label = f"L2_{dim}"
        out[label] = split.project(b, which)
    return out
