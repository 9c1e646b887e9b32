"""Pure-Python kernels for packed numeric forms.

This module is the reference twin of the compiled extension ``_kernel``:
identical signatures, identical semantics, selected at import time by
:mod:`qkflow.kernels` when the extension is unavailable (or forced via
``QKFLOW_PURE=1``).

Packed layout: a degree-k form is (masks, co) with ``masks`` a sorted
int32 array of bitmasks (bit i = index i+1) and ``co`` a complex128 array
of shape (n, jd) holding order-2 jet blocks in Taylor layout
``[1, x_1..x_m, x_i x_j (i<=j)]``.  ``table`` is the (K, 3) int32 jet
multiplication table from :func:`qkflow.scalars.mul_table`.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"

_POP = np.array([bin(m).count("1") for m in range(256)], dtype=np.int32)
_SIGN_MERGE = np.zeros((256, 256), dtype=np.int8)
for _a in range(256):
    for _b in range(256):
        if _a & _b:
            continue
        inv = 0
        for _j in range(8):
            if _b >> _j & 1:
                inv += int(_POP[_a >> (_j + 1)])
        _SIGN_MERGE[_a, _b] = -1 if inv & 1 else 1
_SIGN_INT = np.zeros((256, 8), dtype=np.int8)
for _m in range(256):
    for _p in range(8):
        if _m >> _p & 1:
            _SIGN_INT[_m, _p] = -1 if int(_POP[_m & ((1 << _p) - 1)]) & 1 else 1


def _jmulacc(out_row, a_row, b_row, sgn, table):
    for ia, ib, io in table:
        out_row[io] += sgn * a_row[ia] * b_row[ib]


def _compress(acc: dict, jd: int):
    masks = sorted(m for m, row in acc.items() if np.any(row != 0))
    if not masks:
        return np.zeros(0, dtype=np.int32), np.zeros((0, jd), dtype=np.complex128)
    co = np.array([acc[m] for m in masks], dtype=np.complex128)
    return np.asarray(masks, dtype=np.int32), co


def wedge(degA, masksA, coA, degB, masksB, coB, table):
    jd = coA.shape[1]
    acc: dict = {}
    for ia in range(len(masksA)):
        ma = int(masksA[ia])
        ra = coA[ia]
        for ib in range(len(masksB)):
            mb = int(masksB[ib])
            s = int(_SIGN_MERGE[ma, mb])
            if s == 0:
                continue
            m = ma | mb
            row = acc.get(m)
            if row is None:
                row = acc[m] = np.zeros(jd, dtype=np.complex128)
            _jmulacc(row, ra, coB[ib], s, table)
    return _compress(acc, jd)


def interior(vco, masks, co, deg, table):
    jd = co.shape[1]
    acc: dict = {}
    for k in range(len(masks)):
        m = int(masks[k])
        row = co[k]
        for p in range(8):
            if not m >> p & 1:
                continue
            vrow = vco[p]
            if not np.any(vrow != 0):
                continue
            s = int(_SIGN_INT[m, p])
            mm = m ^ (1 << p)
            out = acc.get(mm)
            if out is None:
                out = acc[mm] = np.zeros(jd, dtype=np.complex128)
            _jmulacc(out, vrow, row, s, table)
    return _compress(acc, jd)


def act(mi, mj, mco, masks, co, deg, table):
    """Infinitesimal gl(8) action by the sparse matrix {(mi, mj): mco rows}."""
    jd = co.shape[1]
    acc: dict = {}
    for k in range(len(masks)):
        m = int(masks[k])
        row = co[k]
        for t in range(len(mi)):
            j = int(mj[t])
            if not m >> j & 1:
                continue
            i = int(mi[t])
            s1 = int(_SIGN_INT[m, j])
            rem = m ^ (1 << j)
            if rem >> i & 1:
                continue
            s = s1 * int(_SIGN_INT[rem | (1 << i), i])
            mm = rem | (1 << i)
            out = acc.get(mm)
            if out is None:
                out = acc[mm] = np.zeros(jd, dtype=np.complex128)
            _jmulacc(out, mco[t], row, s, table)
    return _compress(acc, jd)


def triple3(masksP, coP, masksK, coK, table):
    """Triple contraction of two packed 4-forms into a 2-form."""
    jd = coP.shape[1]
    acc: dict = {}
    for ip in range(len(masksP)):
        mp = int(masksP[ip])
        rp = coP[ip]
        legs = [p for p in range(8) if mp >> p & 1]
        for t in range(4):
            kept = legs[t]
            others = [p for p in legs if p != kept]
            bits = (1 << others[0]) | (1 << others[1]) | (1 << others[2])
            tsign = -1 if t & 1 else 1
            for ik in range(len(masksK)):
                mk = int(masksK[ik])
                if mk & bits != bits:
                    continue
                s = tsign
                mm = mk
                for b in (others[2], others[1], others[0]):
                    s *= int(_SIGN_INT[mm, b])
                    mm ^= 1 << b
                if mm >> kept & 1:
                    continue
                s *= int(_SIGN_MERGE[1 << kept, mm])
                m2 = mm | (1 << kept)
                out = acc.get(m2)
                if out is None:
                    out = acc[m2] = np.zeros(jd, dtype=np.complex128)
                _jmulacc(out, rp, coK[ik], s, table)
    return _compress(acc, jd)


def add(masksA, coA, masksB, coB):
    jd = coA.shape[1]
    acc: dict = {}
    for k in range(len(masksA)):
        acc[int(masksA[k])] = coA[k].copy()
    for k in range(len(masksB)):
        m = int(masksB[k])
        if m in acc:
            acc[m] = acc[m] + coB[k]
        else:
            acc[m] = coB[k].copy()
    return _compress(acc, jd)


def hodge8(masks, co, deg):
    n = len(masks)
    out_masks = np.empty(n, dtype=np.int32)
    out_co = np.empty_like(co)
    for k in range(n):
        m = int(masks[k])
        comp = 0xFF ^ m
        out_masks[k] = comp
        out_co[k] = co[k] * int(_SIGN_MERGE[m, comp])
    order = np.argsort(out_masks)
    return out_masks[order].astype(np.int32), out_co[order]


def scale_jet(masks, co, s_row, table):
    jd = co.shape[1]
    out = np.zeros_like(co)
    for k in range(co.shape[0]):
        _jmulacc(out[k], s_row, co[k], 1, table)
    keep = np.any(out != 0, axis=1)
    return masks[keep].astype(np.int32), out[keep]
