"""Derive su(3) coframe structure constants from the Maurer-Cartan matrix (exact)."""
import sys
sys.path.insert(0, "src")
from fractions import Fraction

from qkflow import ratlin
from qkflow.exterior import Form, mask_of, indices_of
from qkflow.scalars import QQi

# M[r][c] = sum_i A[r][c][i] theta_i, complex coefficients
I = QQi(0, 1)
Z = QQi(0, 0)
O = QQi(1, 0)

def row(*pairs):
    v = [Z] * 8
    for idx, coef in pairs:
        v[idx - 1] = coef
    return v

A = [
    [row((1, I), (2, I)), row((3, I), (4, QQi(-1))), row((5, O), (6, I))],
    [row((3, I), (4, O)), row((1, I), (2, QQi(0, -1))), row((7, I), (8, O))],
    [row((5, QQi(-1)), (6, I)), row((7, I), (8, QQi(-1))), row((1, QQi(-2) * I))],
]

# RHS_{rc} = -(M ^ M)_{rc}: 2-form with QQi coefficients over theta_{ij}
def mc_rhs(r, c):
    ent = {}
    for k in range(3):
        for i in range(8):
            for j in range(8):
                if i == j:
                    continue
                coef = A[r][k][i] * A[k][c][j]
                if coef == 0:
                    continue
                if i < j:
                    m = mask_of((i + 1, j + 1))
                    s = coef
                else:
                    m = mask_of((j + 1, i + 1))
                    s = -coef
                ent[m] = ent.get(m, Z) + s
    return {m: -v for m, v in ent.items() if not v == 0}

# Solve A . dtheta = RHS as a real 18x8 exact least-squares (the map is injective)
rows = []
rhs_forms = []
for r in range(3):
    for c in range(3):
        rhs = mc_rhs(r, c)
        rows.append([Fraction(A[r][c][i].re) for i in range(8)])
        rhs_forms.append({m: v.re for m, v in rhs.items()})
        rows.append([Fraction(A[r][c][i].im) for i in range(8)])
        rhs_forms.append({m: v.im for m, v in rhs.items()})

AT = ratlin.transpose(rows)
gram = ratlin.matmul(AT, rows)
pinv = ratlin.matmul(ratlin.inverse(gram), AT)  # 8 x 18

dtheta = []
for i in range(8):
    ent = {}
    for rix in range(18):
        w = pinv[i][rix]
        if not w:
            continue
        for m, v in rhs_forms[rix].items():
            ent[m] = ent.get(m, Fraction(0)) + w * v
    dtheta.append(Form(2, {m: v for m, v in ent.items() if v}))

# verify the solution reproduces every matrix entry exactly
ok = True
for rix in range(18):
    tot = Form.zero(2)
    for i in range(8):
        if rows[rix][i]:
            tot = tot + dtheta[i].scale(rows[rix][i])
    target = Form(2, rhs_forms[rix])
    if not (tot - target).is_zero():
        ok = False
print("Maurer-Cartan system solved exactly:", ok)

for i in range(8):
    print(f"dtheta_{i+1} =", {indices_of(m): str(c) for m, c in sorted(dtheta[i].entries.items())})

# structure constants c^i_{jk}: de^i = -1/2 c^i_{jk} e^jk  =>  c^i_{jk} = -coeff(jk)
print()
print("structure constants c[i][j][k] (i 1-based, de^i = -1/2 c e^jk):")
c_table = {}
for i in range(8):
    for m, v in dtheta[i].entries.items():
        j, k = indices_of(m)
        c_table[(i + 1, j, k)] = -v
for key in sorted(c_table):
    print("  c^%d_%d%d = %s" % (*key, c_table[key]))
