"""Exterior algebra on an oriented 8-dimensional inner-product space.

Forms are sparse maps from canonical bitmasks to scalar coefficients: bit
``i-1`` of a mask stands for the index ``i`` in 1..8, so the monomial
``dx_I`` with strictly increasing I corresponds to a unique mask whose
popcount equals the degree.  All operations are pure; :class:`Form` values
are treated as immutable.

The scalar type is generic: exact rationals (Fraction / QQi) give
zero-tolerance identity certificates, complex floats give the numeric path,
and order-2 jets thread derivatives through (see :mod:`qkflow.scalars`).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .scalars import QQi, is_exact_zero, scalar_conj, scalar_value

DIM = 8
FULL_MASK = (1 << DIM) - 1


# ----------------------------------------------------------------------
# bitmask combinatorics
# ----------------------------------------------------------------------

def mask_of(indices: Iterable[int]) -> int:
    """Bitmask of a strictly increasing sequence of indices in 1..8."""
    mask = 0
    prev = 0
    for i in indices:
        if not 1 <= i <= DIM:
            raise ValueError(f"index {i} out of range 1..{DIM}")
        if i <= prev:
            raise ValueError(f"indices not strictly increasing: {tuple(indices)}")
        prev = i
        mask |= 1 << (i - 1)
    return mask


def indices_of(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in range(DIM) if mask >> i & 1)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def sign_merge(a: int, b: int) -> int:
    """Sign of e^A wedge e^B relative to e^(A|B); 0 when A and B overlap."""
    if a & b:
        return 0
    inv = 0
    for j in range(DIM):
        if b >> j & 1:
            inv += popcount(a >> (j + 1))
    return -1 if inv & 1 else 1


def sign_interior(mask: int, p: int) -> int:
    """Sign picked up when contracting e_(p+1) into e^mask (bit p set)."""
    return -1 if popcount(mask & ((1 << p) - 1)) & 1 else 1


def perm_parity_sign(mask: int) -> int:
    """Orientation sign epsilon(I, I^c) with e^I wedge e^(I^c) = sign * vol."""
    return sign_merge(mask, FULL_MASK ^ mask)


# ----------------------------------------------------------------------
# Form
# ----------------------------------------------------------------------

class Form:
    """Degree-k alternating tensor with sparse bitmask-keyed coefficients."""

    __slots__ = ("degree", "entries")

    def __init__(self, degree: int, entries: dict | None = None):
        if not 0 <= degree <= DIM:
            raise ValueError(f"degree {degree} out of range 0..{DIM}")
        self.degree = degree
        ent = {}
        if entries:
            for mask, c in entries.items():
                if popcount(mask) != degree:
                    raise ValueError(f"mask {mask:#x} has wrong degree for a {degree}-form")
                if not is_exact_zero(c):
                    ent[mask] = ent[mask] + c if mask in ent else c
        self.entries = ent

    # -- constructors ---------------------------------------------------

    @staticmethod
    def monomial(indices: Sequence[int], coeff=1) -> "Form":
        return Form(len(indices), {mask_of(indices): coeff})

    @staticmethod
    def zero(degree: int) -> "Form":
        return Form(degree, {})

    @staticmethod
    def basis_covector(i: int) -> "Form":
        return Form(1, {1 << (i - 1): 1})

    # -- bookkeeping ------------------------------------------------------

    def items(self):
        return self.entries.items()

    def coeff(self, indices_or_mask):
        mask = indices_or_mask if isinstance(indices_or_mask, int) else mask_of(indices_or_mask)
        return self.entries.get(mask, 0)

    def is_zero(self) -> bool:
        return not self.entries

    def map_coeffs(self, fn) -> "Form":
        return Form(self.degree, {m: fn(c) for m, c in self.entries.items()})

    def conjugate(self) -> "Form":
        return self.map_coeffs(scalar_conj)

    def value_part(self) -> "Form":
        return self.map_coeffs(scalar_value)

    value_form = value_part

    def deriv_coeffs(self, i: int) -> "Form":
        """Form of the d/dx_i of each (jet) coefficient; numbers drop out."""
        from .scalars import Jet

        ent = {}
        for m, c in self.entries.items():
            if isinstance(c, Jet):
                d = c.deriv(i)
                if not d.is_zero():
                    ent[m] = d
        return Form(self.degree, ent)

    def __repr__(self):
        if not self.entries:
            return f"Form({self.degree}, 0)"
        bits = [f"{c!r}*e{''.join(map(str, indices_of(m)))}" for m, c in sorted(self.entries.items())]
        return f"Form({self.degree}, {' + '.join(bits)})"

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.degree == other.degree and (self - other).is_zero()

    # -- linear structure -------------------------------------------------

    def __add__(self, other: "Form") -> "Form":
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        ent = dict(self.entries)
        for m, c in other.entries.items():
            ent[m] = ent[m] + c if m in ent else c
        return Form(self.degree, ent)

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return self.map_coeffs(lambda c: -c)

    def scale(self, s) -> "Form":
        if is_exact_zero(s):
            return Form.zero(self.degree)
        return self.map_coeffs(lambda c: s * c)

    def __mul__(self, s):
        return self.scale(s)

    __rmul__ = __mul__

    # -- multiplicative structure -----------------------------------------

    def wedge(self, other: "Form") -> "Form":
        deg = self.degree + other.degree
        if deg > DIM:
            raise ValueError(f"wedge would produce degree {deg} > {DIM}")
        ent: dict = {}
        for ma, ca in self.entries.items():
            for mb, cb in other.entries.items():
                s = sign_merge(ma, mb)
                if s == 0:
                    continue
                m = ma | mb
                t = ca * cb if s > 0 else -(ca * cb)
                ent[m] = ent[m] + t if m in ent else t
        return Form(deg, ent)

    def __xor__(self, other):
        return self.wedge(other)

    def interior(self, v: Sequence) -> "Form":
        """Contraction with the vector whose frame components are v[0..7]."""
        if self.degree == 0:
            return Form.zero(0)
        ent: dict = {}
        for mask, c in self.entries.items():
            for p in range(DIM):
                if not mask >> p & 1:
                    continue
                comp = v[p]
                if is_exact_zero(comp):
                    continue
                t = comp * c if sign_interior(mask, p) > 0 else -(comp * c)
                m = mask ^ (1 << p)
                ent[m] = ent[m] + t if m in ent else t
        return Form(self.degree - 1, ent)

    def act(self, mat) -> "Form":
        """Infinitesimal gl(8) action sum_ij M[i][j] e^(i+1) ^ (e_(j+1) -| self).

        ``mat`` is any 8x8 indexable of scalars; antisymmetric matrices give
        the so(8) action of 2-forms, g itself acts as degree * identity.
        """
        ent: dict = {}
        for mask, c in self.entries.items():
            for j in range(DIM):
                if not mask >> j & 1:
                    continue
                s1 = sign_interior(mask, j)
                rem = mask ^ (1 << j)
                row = [mat[i][j] for i in range(DIM)]
                for i in range(DIM):
                    mij = row[i]
                    if rem >> i & 1 or is_exact_zero(mij):
                        continue
                    s = s1 * sign_interior(rem, i)
                    t = mij * c if s > 0 else -(mij * c)
                    m = rem | (1 << i)
                    ent[m] = ent[m] + t if m in ent else t
        return Form(self.degree, ent)

    def hodge_euclid(self) -> "Form":
        ent = {}
        for mask, c in self.entries.items():
            comp = FULL_MASK ^ mask
            s = sign_merge(mask, comp)
            ent[comp] = c if s > 0 else -c
        return Form(DIM - self.degree, ent)

    def triple3(self, kappa: "Form") -> "Form":
        """Triple contraction self -|3 kappa of two 4-forms (Euclidean sharps).

        On a monomial e^{abcd} the contraction alternates which leg stays a
        1-form while the other three contract into kappa.
        """
        if self.degree != 4 or kappa.degree != 4:
            raise ValueError("triple contraction expects two 4-forms")
        ent: dict = {}
        for mp, cp in self.entries.items():
            legs = [p for p in range(DIM) if mp >> p & 1]
            for t in range(4):
                kept = legs[t]
                others = [p for p in legs if p != kept]
                bits = (1 << others[0]) | (1 << others[1]) | (1 << others[2])
                tsign = -1 if t & 1 else 1
                for mk, ck in kappa.entries.items():
                    if mk & bits != bits:
                        continue
                    s = tsign
                    mm = mk
                    for b in (others[2], others[1], others[0]):
                        s *= sign_interior(mm, b)
                        mm ^= 1 << b
                    if mm >> kept & 1:
                        continue
                    # wedge e^kept with the single remaining leg
                    s *= sign_merge(1 << kept, mm)
                    m = mm | (1 << kept)
                    tt = cp * ck if s > 0 else -(cp * ck)
                    ent[m] = ent[m] + tt if m in ent else tt
        return Form(2, ent)

    # -- metric-dependent operations ---------------------------------------

    def inner(self, other: "Form", g=None):
        """Pairing with increasing-index monomials orthonormal for g = None."""
        if self.degree != other.degree:
            raise ValueError("inner product requires equal degrees")
        if g is None:
            tot = 0
            for m, c in self.entries.items():
                if m in other.entries:
                    tot = tot + c * other.entries[m]
            return tot
        sh = self.hodge(g)
        prod = other.wedge(sh)
        vol = float(np.sqrt(np.linalg.det(np.asarray(g, dtype=float))))
        return prod.coeff(FULL_MASK) / vol

    def hodge(self, g=None, orientation: int = 1) -> "Form":
        """Hodge star; g = None means the Euclidean metric, exact combinatorics."""
        if orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")
        if g is None:
            out = self.hodge_euclid()
            return out if orientation == 1 else -out
        gm = np.asarray(g, dtype=float)
        _require_spd(gm)
        ginv = np.linalg.inv(gm)
        sqrtdet = float(np.sqrt(np.linalg.det(gm)))
        k = self.degree
        ent: dict = {}
        for mi in _degree_masks(k):
            tot = 0.0
            rows = [p for p in range(DIM) if mi >> p & 1]
            for mj, c in self.entries.items():
                cols = [p for p in range(DIM) if mj >> p & 1]
                gram = ginv[np.ix_(rows, cols)] if k else np.ones((0, 0))
                tot += (np.linalg.det(gram) if k else 1.0) * c
            if tot == 0.0:
                continue
            comp = FULL_MASK ^ mi
            s = sign_merge(mi, comp) * orientation
            val = s * tot * sqrtdet
            ent[comp] = ent.get(comp, 0) + val
        return Form(DIM - self.degree, ent)

    def evaluate(self, vectors: Sequence[Sequence]):
        """Multilinear alternating evaluation on deg(self) vectors."""
        if len(vectors) != self.degree:
            raise ValueError(f"expected {self.degree} vectors, got {len(vectors)}")
        out = self
        for v in vectors:
            out = out.interior(v)
        return out.coeff(0)

    def pullback(self, a) -> "Form":
        """Pullback along the linear map with matrix a (vectors v -> a v)."""
        amat = a
        ent: dict = {}
        for mask, c in self.entries.items():
            rows = [p for p in range(DIM) if mask >> p & 1]
            cols_gen = _degree_masks(self.degree)
            for mj in cols_gen:
                cols = [p for p in range(DIM) if mj >> p & 1]
                d = _det_generic([[amat[r][cc] for cc in cols] for r in rows])
                if is_exact_zero(d):
                    continue
                t = c * d
                ent[mj] = ent[mj] + t if mj in ent else t
        return Form(self.degree, ent)

    def norm2_value(self) -> float:
        """Sum of squared coefficient magnitudes (value parts, increasing-index)."""
        tot = 0.0
        for c in self.entries.values():
            v = complex(scalar_value(c))
            tot += v.real * v.real + v.imag * v.imag
        return tot

    def sup_value(self) -> float:
        return max((abs(complex(scalar_value(c))) for c in self.entries.values()), default=0.0)

    # -- serialization ------------------------------------------------------

    def to_json(self, exact: bool = False) -> dict:
        entries = []
        for mask in sorted(self.entries):
            c = self.entries[mask]
            if exact:
                re, im = _exact_parts(c)
                entries.append({"idx": list(indices_of(mask)), "re": str(re), "im": str(im)})
            else:
                v = complex(scalar_value(c))
                entries.append({"idx": list(indices_of(mask)), "re": v.real, "im": v.imag})
        return {"degree": self.degree, "entries": entries}

    @staticmethod
    def from_json(data: dict) -> "Form":
        deg = int(data["degree"])
        ent = {}
        for e in data["entries"]:
            mask = mask_of(e["idx"])
            re, im = e.get("re", 0), e.get("im", 0)
            if isinstance(re, str) or isinstance(im, str):
                c: object = QQi(Fraction(str(re)), Fraction(str(im)))
                if isinstance(c, QQi) and c.im == 0:
                    c = c.re
            else:
                c = complex(float(re), float(im))
                if c.imag == 0.0:
                    c = c.real
            ent[mask] = c
        return Form(deg, ent)


def _exact_parts(c):
    if isinstance(c, QQi):
        return c.re, c.im
    if isinstance(c, (int, Fraction)):
        return Fraction(c), Fraction(0)
    raise TypeError(f"coefficient {c!r} is not exact; serialize with exact=False")


def _degree_masks(k: int):
    for mask in range(1 << DIM):
        if popcount(mask) == k:
            yield mask


def _det_generic(rows):
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    tot = None
    for c in range(n):
        piv = rows[0][c]
        if is_exact_zero(piv):
            continue
        minor = _det_generic([r[:c] + r[c + 1:] for r in rows[1:]])
        term = piv * minor if c % 2 == 0 else -(piv * minor)
        tot = term if tot is None else tot + term
    return 0 if tot is None else tot


def _require_spd(gm: np.ndarray) -> None:
    if gm.shape != (DIM, DIM) or not np.allclose(gm, gm.T):
        raise ValueError("metric must be a symmetric 8x8 matrix")
    try:
        np.linalg.cholesky(gm)
    except np.linalg.LinAlgError:
        raise ValueError("metric is not positive-definite") from None


# ----------------------------------------------------------------------
# module-level operation surface
# ----------------------------------------------------------------------

def wedge(a: Form, b: Form) -> Form:
    return a.wedge(b)


def hodge(a: Form, g=None, orientation: int = 1) -> Form:
    return a.hodge(g, orientation)


def interior(v: Sequence, a: Form) -> Form:
    return a.interior(v)


def form_inner(a: Form, b: Form, g=None):
    return a.inner(b, g)


def evaluate(a: Form, vectors: Sequence[Sequence]):
    return a.evaluate(vectors)


def flat(v: Sequence, g=None) -> Form:
    """Musical flat: the covector g(v, .) as a 1-form."""
    if g is None:
        return Form(1, {1 << i: v[i] for i in range(DIM) if not is_exact_zero(v[i])})
    gm = np.asarray(g, dtype=float)
    _require_spd(gm)
    comps = gm @ np.asarray([complex(scalar_value(x)) for x in v])
    return Form(1, {1 << i: comps[i] for i in range(DIM) if comps[i] != 0})


def sharp(alpha: Form, g=None):
    """Musical sharp of a 1-form; returns frame components of the vector."""
    if alpha.degree != 1:
        raise ValueError("sharp expects a 1-form")
    comps = [alpha.coeff(1 << i) for i in range(DIM)]
    if g is None:
        return comps
    gm = np.asarray(g, dtype=float)
    _require_spd(gm)
    vec = np.linalg.solve(gm, np.asarray([complex(scalar_value(x)) for x in comps]))
    return list(vec)


def vol_form() -> Form:
    return Form(DIM, {FULL_MASK: 1})
