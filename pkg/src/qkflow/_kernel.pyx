# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for packed numeric forms.

Semantics twin of qkflow._kernel_py; see that module for the layout contract.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

ctypedef cnp.int32_t I32
ctypedef double complex C128

cdef signed char SIGN_MERGE[256][256]
cdef signed char SIGN_INT[256][8]


def _init_tables():
    cdef int a, b, j, p, inv, m
    pop = [bin(x).count("1") for x in range(256)]
    for a in range(256):
        for b in range(256):
            if a & b:
                SIGN_MERGE[a][b] = 0
                continue
            inv = 0
            for j in range(8):
                if b >> j & 1:
                    inv += pop[a >> (j + 1)]
            SIGN_MERGE[a][b] = -1 if inv & 1 else 1
    for m in range(256):
        for p in range(8):
            if m >> p & 1:
                SIGN_INT[m][p] = -1 if pop[m & ((1 << p) - 1)] & 1 else 1
            else:
                SIGN_INT[m][p] = 0


_init_tables()


cdef inline void _jmulacc(C128 *out, const C128 *a, const C128 *b, double sgn,
                          I32[:, ::1] table, int ntab) noexcept nogil:
    cdef int t
    for t in range(ntab):
        out[table[t, 2]] += sgn * a[table[t, 0]] * b[table[t, 1]]


cdef _compress(C128[:, ::1] acc, signed char *touched, int jd):
    cdef int m, j, n = 0
    cdef bint nz
    out_masks = []
    for m in range(256):
        if not touched[m]:
            continue
        nz = False
        for j in range(jd):
            if acc[m, j] != 0:
                nz = True
                break
        if nz:
            out_masks.append(m)
    masks = np.asarray(out_masks, dtype=np.int32)
    co = np.zeros((len(out_masks), jd), dtype=np.complex128)
    cdef C128[:, ::1] cov = co
    cdef int r = 0
    for m in out_masks:
        for j in range(jd):
            cov[r, j] = acc[m, j]
        r += 1
    return masks, co


def wedge(int degA, I32[:] masksA, C128[:, ::1] coA,
          int degB, I32[:] masksB, C128[:, ::1] coB, I32[:, ::1] table):
    cdef int jd = coA.shape[1]
    cdef int nA = masksA.shape[0], nB = masksB.shape[0], ntab = table.shape[0]
    acc_arr = np.zeros((256, jd), dtype=np.complex128)
    cdef C128[:, ::1] acc = acc_arr
    cdef signed char touched[256]
    cdef int ia, ib, ma, mb, m
    cdef double s
    for m in range(256):
        touched[m] = 0
    for ia in range(nA):
        ma = masksA[ia]
        for ib in range(nB):
            mb = masksB[ib]
            s = SIGN_MERGE[ma][mb]
            if s == 0:
                continue
            m = ma | mb
            touched[m] = 1
            _jmulacc(&acc[m, 0], &coA[ia, 0], &coB[ib, 0], s, table, ntab)
    return _compress(acc, touched, jd)


def interior(C128[:, ::1] vco, I32[:] masks, C128[:, ::1] co, int deg, I32[:, ::1] table):
    cdef int jd = co.shape[1]
    cdef int n = masks.shape[0], ntab = table.shape[0]
    acc_arr = np.zeros((256, jd), dtype=np.complex128)
    cdef C128[:, ::1] acc = acc_arr
    cdef signed char touched[256]
    cdef int k, p, m, mm, j
    cdef double s
    cdef bint nzv
    for m in range(256):
        touched[m] = 0
    cdef signed char vnz[8]
    for p in range(8):
        vnz[p] = 0
        for j in range(jd):
            if vco[p, j] != 0:
                vnz[p] = 1
                break
    for k in range(n):
        m = masks[k]
        for p in range(8):
            if not m >> p & 1 or not vnz[p]:
                continue
            s = SIGN_INT[m][p]
            mm = m ^ (1 << p)
            touched[mm] = 1
            _jmulacc(&acc[mm, 0], &vco[p, 0], &co[k, 0], s, table, ntab)
    return _compress(acc, touched, jd)


def act(I32[:] mi, I32[:] mj, C128[:, ::1] mco,
        I32[:] masks, C128[:, ::1] co, int deg, I32[:, ::1] table):
    cdef int jd = co.shape[1]
    cdef int n = masks.shape[0], nt = mi.shape[0], ntab = table.shape[0]
    acc_arr = np.zeros((256, jd), dtype=np.complex128)
    cdef C128[:, ::1] acc = acc_arr
    cdef signed char touched[256]
    cdef int k, t, m, i, j, rem, mm
    cdef double s
    for m in range(256):
        touched[m] = 0
    for k in range(n):
        m = masks[k]
        for t in range(nt):
            j = mj[t]
            if not m >> j & 1:
                continue
            i = mi[t]
            rem = m ^ (1 << j)
            if rem >> i & 1:
                continue
            mm = rem | (1 << i)
            s = SIGN_INT[m][j] * SIGN_INT[mm][i]
            touched[mm] = 1
            _jmulacc(&acc[mm, 0], &mco[t, 0], &co[k, 0], s, table, ntab)
    return _compress(acc, touched, jd)


def triple3(I32[:] masksP, C128[:, ::1] coP, I32[:] masksK, C128[:, ::1] coK, I32[:, ::1] table):
    cdef int jd = coP.shape[1]
    cdef int nP = masksP.shape[0], nK = masksK.shape[0], ntab = table.shape[0]
    acc_arr = np.zeros((256, jd), dtype=np.complex128)
    cdef C128[:, ::1] acc = acc_arr
    cdef signed char touched[256]
    cdef int ip, ik, t, u, mp, mk, kept, bits, mm, m2, nlegs, b
    cdef int legs[4]
    cdef int others[3]
    cdef double s, tsign
    for mm in range(256):
        touched[mm] = 0
    for ip in range(nP):
        mp = masksP[ip]
        nlegs = 0
        for b in range(8):
            if mp >> b & 1:
                legs[nlegs] = b
                nlegs += 1
        for t in range(4):
            kept = legs[t]
            u = 0
            for b in range(4):
                if b != t:
                    others[u] = legs[b]
                    u += 1
            bits = (1 << others[0]) | (1 << others[1]) | (1 << others[2])
            tsign = -1.0 if t & 1 else 1.0
            for ik in range(nK):
                mk = masksK[ik]
                if mk & bits != bits:
                    continue
                s = tsign
                mm = mk
                s *= SIGN_INT[mm][others[2]]
                mm ^= 1 << others[2]
                s *= SIGN_INT[mm][others[1]]
                mm ^= 1 << others[1]
                s *= SIGN_INT[mm][others[0]]
                mm ^= 1 << others[0]
                if mm >> kept & 1:
                    continue
                s *= SIGN_MERGE[1 << kept][mm]
                m2 = mm | (1 << kept)
                touched[m2] = 1
                _jmulacc(&acc[m2, 0], &coP[ip, 0], &coK[ik, 0], s, table, ntab)
    return _compress(acc, touched, jd)


def add(I32[:] masksA, C128[:, ::1] coA, I32[:] masksB, C128[:, ::1] coB):
    cdef int jd = coA.shape[1]
    cdef int nA = masksA.shape[0], nB = masksB.shape[0]
    acc_arr = np.zeros((256, jd), dtype=np.complex128)
    cdef C128[:, ::1] acc = acc_arr
    cdef signed char touched[256]
    cdef int k, m, j
    for m in range(256):
        touched[m] = 0
    for k in range(nA):
        m = masksA[k]
        touched[m] = 1
        for j in range(jd):
            acc[m, j] += coA[k, j]
    for k in range(nB):
        m = masksB[k]
        touched[m] = 1
        for j in range(jd):
            acc[m, j] += coB[k, j]
    return _compress(acc, touched, jd)


def hodge8(I32[:] masks, C128[:, ::1] co, int deg):
    cdef int n = masks.shape[0], jd = co.shape[1]
    out_masks = np.empty(n, dtype=np.int32)
    out_co = np.empty((n, jd), dtype=np.complex128)
    cdef I32[:] omv = out_masks
    cdef C128[:, ::1] ocv = out_co
    cdef int k, m, comp, j
    cdef double s
    for k in range(n):
        m = masks[k]
        comp = 0xFF ^ m
        s = SIGN_MERGE[m][comp]
        omv[k] = comp
        for j in range(jd):
            ocv[k, j] = s * co[k, j]
    order = np.argsort(out_masks)
    return out_masks[order].astype(np.int32), out_co[order]


def scale_jet(I32[:] masks, C128[:, ::1] co, C128[:] s_row, I32[:, ::1] table):
    cdef int n = masks.shape[0], jd = co.shape[1], ntab = table.shape[0]
    out = np.zeros((n, jd), dtype=np.complex128)
    cdef C128[:, ::1] ov = out
    cdef int k
    for k in range(n):
        _jmulacc(&ov[k, 0], &s_row[0], &co[k, 0], 1.0, table, ntab)
    keep = np.any(out != 0, axis=1)
    masks_np = np.asarray(masks)
    return masks_np[keep].astype(np.int32), out[keep]
