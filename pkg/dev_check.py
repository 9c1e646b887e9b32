"""Scratch validation of the core algebra (not part of the package)."""
import sys
sys.path.insert(0, "src")
from fractions import Fraction

import numpy as np

from qkflow.exterior import Form, mask_of, vol_form, indices_of
from qkflow.structures import (
    standard_structure, standard_triple, model_form, diamond, triple_contract,
    lambda4_classify, metric_from_form, quaternionic_pairing, two_form_matrix,
)

w1, w2, w3 = standard_triple()
om = model_form("QK")
ph = model_form("Spin7")

print("Omega entries:")
for m, c in sorted(om.entries.items()):
    print("  ", indices_of(m), c)

print("Omega^Omega:", (om.wedge(om)).entries)
print("Phi^Phi:", (ph.wedge(ph)).entries)
print("*Omega == Omega:", om.hodge_euclid() == om)
print("*Phi == Phi:", ph.hodge_euclid() == ph)
print("<Omega,Omega>:", om.inner(om))
print("<w1,w1>:", w1.inner(w1))

S = standard_structure("QK")
print("QK eigenvalues:", S.lambda2.eigenvalues, "dims:", S.lambda2.dimensions, "m_index:", S.lambda2.m_index)
S7 = standard_structure("Spin7")
print("Spin7 eigenvalues:", S7.lambda2.eigenvalues, "dims:", S7.lambda2.dimensions, "inv const:", S7.inv_constant)

print("*(w1^Omega) == 5 w1:", w1.wedge(om).hodge_euclid() == w1.scale(Fraction(5)))

# diamond worked example
alpha = Form(2, {mask_of((2, 8)): Fraction(1), mask_of((3, 5)): Fraction(1)})
beta = Form(2, {mask_of((1, 5)): Fraction(1), mask_of((2, 6)): Fraction(-1)})
da = diamond(alpha, om)
expected_da = Form(4, {mask_of((1,2,4,5)): Fraction(4), mask_of((1,3,4,8)): Fraction(-4),
                       mask_of((2,5,6,7)): Fraction(-4), mask_of((3,6,7,8)): Fraction(4)})
print("alpha<>Omega == 4(e1245-e1348-e2567+e3678):", da == expected_da)
db = diamond(beta, om)
expected_db = Form(4, {mask_of((1,3,4,6)): Fraction(4), mask_of((1,6,7,8)): Fraction(4),
                       mask_of((2,3,4,5)): Fraction(4), mask_of((2,5,7,8)): Fraction(4)})
print("beta<>Omega == 4(e1346+e1678+e2345+e2578):", db == expected_db)

pair = triple_contract(da, db)
expected_pair = Form(2, {mask_of((1, 3)): Fraction(-32), mask_of((6, 8)): Fraction(32)})
print("(a<>O) i3 (b<>O) == 32(-e13+e68):", pair == expected_pair)

print("iota3(beta<>Omega) == 32 beta:", triple_contract(db, om) == beta.scale(Fraction(32)))

# kernel of diamond
print("diamond(w1) == 0:", diamond(w1, om).is_zero())
print("diamond(identity) == 4 Omega:", om.act(np.eye(8)) == om.scale(4.0) or S.diamond([[Fraction(1) if i==j else Fraction(0) for j in range(8)] for i in range(8)]) == om.scale(Fraction(4)))

# the 15 listed basis elements
listed = [
    [((1,5),1),((2,6),-1)], [((1,6),1),((2,5),1)], [((1,5),1),((3,7),-1)], [((1,6),1),((3,8),1)],
    [((2,8),1),((3,5),1)], [((1,7),1),((2,8),-1)], [((1,8),1),((4,5),1)], [((2,7),1),((3,6),1)],
    [((2,8),1),((4,6),1)], [((3,8),1),((4,7),1)], [((3,7),1),((4,8),-1)], [((1,8),1),((2,7),1)],
    [((1,2),1),((3,4),1),((5,6),-1),((7,8),-1)],
    [((1,3),1),((2,4),-1),((5,7),-1),((6,8),1)],
    [((1,4),1),((2,3),1),((5,8),-1),((6,7),-1)],
]
ok15 = []
for spec_entry in listed:
    f = Form(2, {mask_of(p): Fraction(s) for p, s in spec_entry})
    ok15.append(S.lambda2.component(f, 1) == f)
print("pi15 fixes the 15 listed elements:", ok15)

# lambda4 machinery
comps = lambda4_classify(om)
print("Omega classification:", {k: ("0" if v.is_zero() else "nonzero") for k, v in comps.items()})
psi = diamond(Form(2, {mask_of((1,5)): Fraction(1), mask_of((2,6)): Fraction(-1)}), om)
comps2 = lambda4_classify(psi)
print("(e15-e26)<>Omega classification:", {k: ("0" if v.is_zero() else "nz") for k, v in comps2.items()})

# metric extraction
g = metric_from_form(om, "QK")
print("metric_from_form(Omega) == I:", np.allclose(g, np.eye(8), atol=1e-10), np.max(np.abs(g - np.eye(8))))
g7 = metric_from_form(ph, "Spin7")
print("metric_from_form(Phi) == I:", np.allclose(g7, np.eye(8), atol=1e-10), np.max(np.abs(g7 - np.eye(8))))
for c in (0.5, 2.0, 3.0):
    gc = metric_from_form(om.scale(c ** 4), "QK")
    print(f"metric_from_form({c}^4 Om) == {c}^2 I:", np.allclose(gc, c * c * np.eye(8), rtol=1e-10))

# quaternionic pairing
e = lambda i: [1.0 if k == i - 1 else 0.0 for k in range(8)]
print("pairing(d1,d2,d2):", quaternionic_pairing(e(1), e(2), e(2), S))
print("pairing(d1,d5,d5):", quaternionic_pairing(e(1), e(5), e(5), S))
print("pairing(d1,d1,d1):", quaternionic_pairing(e(1), e(1), e(1), S))

# operational pi_m equals spectral projector
import random
random.seed(0)
for _ in range(3):
    b = Form(2, {m: Fraction(random.randint(-3, 3)) for m in [mask_of((i, j)) for i in range(1, 8) for j in range(i + 1, 9)]})
    lhs = S.pi_m(b)
    rhs = S.lambda2.project(b, S.lambda2.m_index)
    print("pi_m matches spectral projector:", lhs == rhs)
