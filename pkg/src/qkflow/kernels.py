"""Packed numeric forms and kernel-backend selection.

The hot inner loops (flow integration, torsion pipelines, quartic metric
extraction) run on :class:`NumForm`: sparse bitmask-keyed forms whose
coefficients are order-2 jet blocks stored as contiguous complex128 arrays.
The block operations live in a compiled Cython extension when available and
in the pure-Python twin :mod:`qkflow._kernel_py` otherwise; set
``QKFLOW_PURE=1`` to force the fallback.  ``benchmarks/bench_kernels.py``
compares the two.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernel_py
from .exterior import DIM, Form, popcount
from .scalars import Jet, mul_table, quad_index, quad_len

if os.environ.get("QKFLOW_PURE", "") not in ("", "0"):
    _impl = _kernel_py
else:
    try:
        from . import _kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _kernel_py


def backend_name() -> str:
    """Which kernel implementation is live: 'cython' or 'pure'."""
    return _impl.BACKEND


@lru_cache(maxsize=None)
def _table(m: int) -> np.ndarray:
    return np.asarray(mul_table(m), dtype=np.int32)


def jet_dim(m: int) -> int:
    return 1 + m + quad_len(m)


def _pack_scalar(s, m: int) -> np.ndarray:
    jd = jet_dim(m)
    row = np.zeros(jd, dtype=np.complex128)
    if isinstance(s, Jet):
        if s.m != m:
            raise ValueError(f"jet has {s.m} variables, form expects {m}")
        row[0] = complex(s.val)
        for i in range(m):
            row[1 + i] = complex(s.lin[i])
        for q in range(quad_len(m)):
            row[1 + m + q] = complex(s.quad[q])
    else:
        row[0] = complex(s)
    return row


def _unpack_scalar(row: np.ndarray, m: int, order: int) -> Jet:
    return Jet(
        complex(row[0]),
        tuple(complex(x) for x in row[1 : 1 + m]),
        tuple(complex(x) for x in row[1 + m :]),
        m,
        order,
    )


@lru_cache(maxsize=None)
def _deriv_matrix(m: int, i: int) -> np.ndarray:
    """Right-multiplication matrix taking Taylor blocks to their d/dx_i blocks."""
    jd = jet_dim(m)
    d = np.zeros((jd, jd))
    d[1 + i, 0] = 1.0
    for j in range(m):
        q = 1 + m + quad_index(i, j, m)
        d[q, 1 + j] = 2.0 if i == j else 1.0
    return d


@dataclass
class PackedMatrix:
    """Pre-packed sparse gl(8) matrix for repeated NumForm.act calls."""

    mi: np.ndarray
    mj: np.ndarray
    mco: np.ndarray
    order: int


def pack_matrix(triples: Iterable[tuple[int, int, object]], m: int) -> PackedMatrix:
    tri = list(triples)
    mi = np.asarray([t[0] for t in tri], dtype=np.int32)
    mj = np.asarray([t[1] for t in tri], dtype=np.int32)
    mco = np.zeros((len(tri), jet_dim(m)), dtype=np.complex128)
    order = 2
    for r, (_, _, s) in enumerate(tri):
        mco[r] = _pack_scalar(s, m)
        if isinstance(s, Jet):
            order = min(order, s.order)
    return PackedMatrix(mi, mj, mco, order)


class NumForm:
    """Degree-k form with packed jet coefficients; ops dispatch to the kernel."""

    __slots__ = ("degree", "m", "masks", "co", "order")

    def __init__(self, degree: int, m: int, masks: np.ndarray, co: np.ndarray, order: int = 2):
        self.degree = degree
        self.m = m
        self.masks = masks
        self.co = co
        self.order = order

    # -- construction ----------------------------------------------------

    @staticmethod
    def from_entries(degree: int, entries: Mapping[int, object], m: int, order: int = 2) -> "NumForm":
        items = sorted(entries.items())
        masks = np.asarray([mk for mk, _ in items], dtype=np.int32)
        jd = jet_dim(m)
        co = np.zeros((len(items), jd), dtype=np.complex128)
        ordr = order
        for r, (mk, s) in enumerate(items):
            if popcount(mk) != degree:
                raise ValueError(f"mask {mk:#x} has wrong degree for a {degree}-form")
            co[r] = _pack_scalar(s, m)
            if isinstance(s, Jet):
                ordr = min(ordr, s.order)
        return NumForm(degree, m, masks, co, ordr)

    @staticmethod
    def zero(degree: int, m: int) -> "NumForm":
        return NumForm(degree, m, np.zeros(0, dtype=np.int32), np.zeros((0, jet_dim(m)), dtype=np.complex128))

    @staticmethod
    def from_form(f: Form, m: int) -> "NumForm":
        return NumForm.from_entries(f.degree, dict(f.entries), m)

    def to_form(self) -> Form:
        return Form(self.degree, {int(mk): self.coeff(int(mk)) for mk in self.masks})

    def value_form(self) -> Form:
        ent = {}
        for r, mk in enumerate(self.masks):
            v = complex(self.co[r, 0])
            if v != 0:
                ent[int(mk)] = v
        return Form(self.degree, ent)

    # -- access ------------------------------------------------------------

    def items(self):
        for r, mk in enumerate(self.masks):
            yield int(mk), _unpack_scalar(self.co[r], self.m, self.order)

    def coeff(self, mask: int) -> Jet:
        idx = np.searchsorted(self.masks, mask)
        if idx < len(self.masks) and self.masks[idx] == mask:
            return _unpack_scalar(self.co[idx], self.m, self.order)
        return Jet.const(0j, self.m)

    def is_zero(self, tol: float = 0.0) -> bool:
        if len(self.masks) == 0:
            return True
        return bool(np.all(np.abs(self.co) <= tol))

    # -- linear ops ----------------------------------------------------------

    def __add__(self, other: "NumForm") -> "NumForm":
        if self.degree != other.degree:
            raise ValueError("cannot add forms of different degree")
        if len(self.masks) == 0:
            return NumForm(other.degree, other.m, other.masks, other.co, min(self.order, other.order))
        if len(other.masks) == 0:
            return NumForm(self.degree, self.m, self.masks, self.co, min(self.order, other.order))
        masks, co = _impl.add(self.masks, self.co, other.masks, other.co)
        return NumForm(self.degree, self.m, masks, co, min(self.order, other.order))

    def __sub__(self, other: "NumForm") -> "NumForm":
        return self + other.neg()

    def neg(self) -> "NumForm":
        return NumForm(self.degree, self.m, self.masks, -self.co, self.order)

    __neg__ = neg

    def scale(self, s) -> "NumForm":
        if isinstance(s, Jet):
            masks, co = _impl.scale_jet(self.masks, self.co, _pack_scalar(s, self.m), _table(self.m))
            return NumForm(self.degree, self.m, masks, co, min(self.order, s.order))
        return NumForm(self.degree, self.m, self.masks, self.co * complex(s), self.order)

    # -- kernel ops ------------------------------------------------------------

    def wedge(self, other: "NumForm") -> "NumForm":
        deg = self.degree + other.degree
        if deg > DIM:
            raise ValueError(f"wedge would produce degree {deg} > {DIM}")
        masks, co = _impl.wedge(self.degree, self.masks, self.co, other.degree, other.masks, other.co, _table(self.m))
        return NumForm(deg, self.m, masks, co, min(self.order, other.order))

    def interior(self, v: Sequence) -> "NumForm":
        if self.degree == 0:
            return NumForm.zero(0, self.m)
        vco = np.zeros((DIM, jet_dim(self.m)), dtype=np.complex128)
        ordr = self.order
        for p in range(DIM):
            vco[p] = _pack_scalar(v[p], self.m)
            if isinstance(v[p], Jet):
                ordr = min(ordr, v[p].order)
        masks, co = _impl.interior(vco, self.masks, self.co, self.degree, _table(self.m))
        return NumForm(self.degree - 1, self.m, masks, co, ordr)

    def act(self, sparse_mat) -> "NumForm":
        """gl(8) action by a sparse matrix: (i, j, scalar) triples or a PackedMatrix."""
        pm = sparse_mat if isinstance(sparse_mat, PackedMatrix) else pack_matrix(sparse_mat, self.m)
        if len(pm.mi) == 0:
            return NumForm.zero(self.degree, self.m)
        masks, co = _impl.act(pm.mi, pm.mj, pm.mco, self.masks, self.co, self.degree, _table(self.m))
        return NumForm(self.degree, self.m, masks, co, min(self.order, pm.order))

    def triple3(self, kappa: "NumForm") -> "NumForm":
        if self.degree != 4 or kappa.degree != 4:
            raise ValueError("triple contraction expects two 4-forms")
        masks, co = _impl.triple3(self.masks, self.co, kappa.masks, kappa.co, _table(self.m))
        return NumForm(2, self.m, masks, co, min(self.order, kappa.order))

    def hodge_euclid(self) -> "NumForm":
        masks, co = _impl.hodge8(self.masks, self.co, self.degree)
        return NumForm(DIM - self.degree, self.m, masks, co, self.order)

    # -- coefficient calculus ----------------------------------------------------

    def deriv_coeffs(self, i: int) -> "NumForm":
        """Form whose coefficients are the d/dx_i of the original coefficients."""
        co = self.co @ _deriv_matrix(self.m, i)
        keep = np.any(co != 0, axis=1)
        return NumForm(self.degree, self.m, self.masks[keep], co[keep], min(self.order, 2) - 1)

    def coeff_vector(self, masks: Sequence[int]) -> np.ndarray:
        """Value parts aligned against an external mask list."""
        out = np.zeros(len(masks), dtype=np.complex128)
        pos = {int(mk): r for r, mk in enumerate(self.masks)}
        for k, mk in enumerate(masks):
            r = pos.get(mk)
            if r is not None:
                out[k] = self.co[r, 0]
        return out

    def grad_vector(self, masks: Sequence[int], i: int) -> np.ndarray:
        out = np.zeros(len(masks), dtype=np.complex128)
        pos = {int(mk): r for r, mk in enumerate(self.masks)}
        for k, mk in enumerate(masks):
            r = pos.get(mk)
            if r is not None:
                out[k] = self.co[r, 1 + i]
        return out

    # -- norms --------------------------------------------------------------------

    def norm2_value(self) -> float:
        """Sum of squared value-part magnitudes over increasing-index monomials."""
        if len(self.masks) == 0:
            return 0.0
        v = self.co[:, 0]
        return float(np.sum(v.real * v.real + v.imag * v.imag))

    def sup_value(self) -> float:
        if len(self.masks) == 0:
            return 0.0
        return float(np.max(np.abs(self.co[:, 0])))

    def sup_all(self) -> float:
        """Sup over every jet component, value and derivatives alike."""
        if len(self.masks) == 0:
            return 0.0
        upto = 1 + self.m if self.order == 1 else (1 if self.order <= 0 else self.co.shape[1])
        return float(np.max(np.abs(self.co[:, :upto])))

    def __repr__(self):
        return f"NumForm(deg={self.degree}, m={self.m}, {len(self.masks)} entries, order={self.order})"
