"""Prototype the geometry pipeline on SU(3); calibrate conventions."""
import sys
sys.path.insert(0, "src")
import math
from fractions import Fraction

import numpy as np

from qkflow.exterior import Form, mask_of, indices_of
from qkflow.geometry import (CoframeField, make_context, torsion_field, divergence_torsion,
                             bianchi_residual, bianchi_full_residual, d_squared_residual, lie_derivative)
from qkflow.scalars import Jet, jcos, jsin

SU3_C = {
    (1,5,6): 1, (1,7,8): -1,
    (2,3,4): 2, (2,5,6): 1, (2,7,8): 1,
    (3,2,4): -2, (3,5,7): 1, (3,6,8): -1,
    (4,2,3): 2, (4,5,8): 1, (4,6,7): 1,
    (5,1,6): -3, (5,2,6): -1, (5,3,7): -1, (5,4,8): -1,
    (6,1,5): 3, (6,2,5): 1, (6,3,8): 1, (6,4,7): -1,
    (7,1,8): 3, (7,2,8): -1, (7,3,5): 1, (7,4,6): 1,
    (8,1,7): -3, (8,2,7): 1, (8,3,6): -1, (8,4,5): 1,
}

def su3_data(pt, space):
    c = [[[space.zero() for _ in range(8)] for _ in range(8)] for _ in range(8)]
    for (i, j, k), v in SU3_C.items():
        c[i-1][j-1][k-1] = space.const(v)
        c[i-1][k-1][j-1] = space.const(-v)
    anchors = [dict() for _ in range(8)]
    return c, anchors

coframe = CoframeField("su3", (), su3_data, params=("f",))

def su3_xi(space, pjets):
    f = pjets["f"]
    cf, sf = jcos(f), jsin(f)
    one = space.const(1)
    w1 = {mask_of((1,2)): one, mask_of((3,4)): one, mask_of((5,6)): one, mask_of((7,8)): one}
    w2 = {mask_of((1,3)): cf, mask_of((1,4)): sf, mask_of((2,3)): sf, mask_of((2,4)): -cf,
          mask_of((5,7)): one, mask_of((6,8)): -one}
    w3 = {mask_of((1,3)): -sf, mask_of((1,4)): cf, mask_of((2,3)): cf, mask_of((2,4)): sf,
          mask_of((5,8)): one, mask_of((6,7)): one}
    from qkflow.kernels import NumForm
    m = space.m
    W = [NumForm.from_entries(2, w, m) for w in (w1, w2, w3)]
    xi = W[0].wedge(W[0]) + W[1].wedge(W[1]) + W[2].wedge(W[2])
    return {mask: jet * 0.5 for mask, jet in xi.items()}

fval = 0.7
ctx = make_context(coframe, su3_xi, "QK", {}, params={"f": fval}, param_jets=True)
print("reconstruction residual:", ctx.reconstruction_residual())
print("d^2 e^i residual:", max(d_squared_residual(ctx, ctx.basis_form(1 << i)) for i in range(8)))

T = torsion_field(ctx, check_tol=1e-10)
print("double-route torsion OK")
names = "12345678"
for k in range(8):
    ent = {indices_of(m): round(jet.val.real, 6) for m, jet in T[k].items()}
    print(f"T(E{k+1}) =", ent if ent else 0)

cf, sf = math.cos(fval), math.sin(fval)
exp3 = Form(2, {mask_of((1,3)): 8*(cf-1), mask_of((2,4)): -8*(cf-1), mask_of((5,7)): 8*(cf-1), mask_of((6,8)): -8*(cf-1),
                mask_of((1,4)): 8*sf, mask_of((2,3)): 8*sf, mask_of((5,8)): -8*sf, mask_of((6,7)): -8*sf})
print("T(E3) vs printed table:", (T[2].value_form() - exp3).sup_value())

div = divergence_torsion(ctx)
print("div T =", {indices_of(m): round(j.val.real, 6) for m, j in div.items()})
print("expected 32 sin f =", 32*sf)

# nabla_xi in Lambda4+15?
for k in range(8):
    nx = ctx.nabla_xi(k)
    resid = (nx - ctx.pi4_m(nx))
    print(f"pi4_15 residual k={k+1}:", resid.sup_value() if hasattr(resid,'sup_value') else resid)

# Bianchi check (sign calibration)
r = ctx.curvature()
worst_pi, worst_full = 0.0, 0.0
for a in range(8):
    for b in range(a+1, 8):
        lhs, rhs = bianchi_residual(ctx, a, b, r)
        worst_pi = max(worst_pi, (lhs - rhs).sup_value())
        worst_full = max(worst_full, bianchi_full_residual(ctx, a, b, r))
print("bianchi pi15 worst residual:", worst_pi)
print("bianchi full worst residual:", worst_full)

# also try opposite curvature sign to see which matches
ric = ctx.ricci(r)
print("ricci diag:", np.diag(ric).round(6))

# Lie-invariance counts at f=0 and f=0.5
for f0 in (0.0, 0.5):
    ctx2 = make_context(coframe, su3_xi, "QK", {}, params={"f": f0})
    norms = []
    for i in range(8):
        x = [ctx2.space.const(1.0 if k == i else 0.0) for k in range(8)]
        norms.append(round(lie_derivative(ctx2, ctx2.xi, x).sup_value(), 6))
    print(f"f={f0}: |L_Ei Omega| =", norms)

# energy density
n = sum(t.norm2_value() for t in T)
print("N(T) =", n, " expected 3584(1-4/7 cos f) =", 3584*(1-4/7*cf))
