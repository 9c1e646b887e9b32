"""Scalar fields used throughout the package.

Three interchangeable scalar kinds flow through the exterior algebra:

* plain Python numbers (int, float, complex, ``fractions.Fraction``),
* :class:`QQi`, exact complex rationals for zero-tolerance certificates,
* :class:`Jet`, order-2 forward-mode jets in a fixed set of variables,
  carrying exact first and second partials through every computation.

Jets store *Taylor* coefficients rather than raw derivatives: a jet with
variables x_1..x_m represents

    f = val + sum_i lin[i] x_i + sum_{i<=j} quad[q(i,j)] x_i x_j

so multiplication is plain truncated polynomial multiplication with unit
structure constants.  ``gradient``/``hessian`` convert back to derivatives.
Components may themselves be exact (Fraction) or floating (complex).
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from typing import Sequence


def quad_index(i: int, j: int, m: int) -> int:
    """Flat index of the upper-triangular pair (i, j), i <= j, in m variables."""
    if i > j:
        i, j = j, i
    return i * m - (i * (i - 1)) // 2 + (j - i)


def quad_len(m: int) -> int:
    return m * (m + 1) // 2


def mul_table(m: int) -> list[tuple[int, int, int]]:
    """Index triples (ia, ib, iout) with out[iout] += a[ia] * b[ib].

    Encodes truncated polynomial multiplication for the order-2 jet layout
    [1, x_1..x_m, {x_i x_j}_{i<=j}] of length 1 + m + m(m+1)/2.
    """
    q0 = 1 + m
    table = [(0, 0, 0)]
    for i in range(m):
        table.append((0, 1 + i, 1 + i))
        table.append((1 + i, 0, 1 + i))
    for i in range(m):
        for j in range(i, m):
            qo = q0 + quad_index(i, j, m)
            table.append((0, qo, qo))
            table.append((qo, 0, qo))
            if i == j:
                table.append((1 + i, 1 + i, qo))
            else:
                table.append((1 + i, 1 + j, qo))
                table.append((1 + j, 1 + i, qo))
    return table


class Jet:
    """Order-2 forward-mode scalar in ``m`` variables.

    ``order`` tracks how many derivative levels are still meaningful: taking
    a partial derivative of an order-2 jet yields an order-1 jet whose
    quadratic part is no longer trustworthy.  Binary operations propagate the
    minimum order of their operands.
    """

    __slots__ = ("val", "lin", "quad", "m", "order")

    def __init__(self, val, lin, quad, m: int, order: int = 2):
        self.val = val
        self.lin = tuple(lin)
        self.quad = tuple(quad)
        self.m = m
        self.order = order

    # -- constructors -------------------------------------------------

    @staticmethod
    def const(x, m: int) -> "Jet":
        z = x * 0
        return Jet(x, (z,) * m, (z,) * quad_len(m), m)

    @staticmethod
    def variable(x, i: int, m: int) -> "Jet":
        z = x * 0
        one = z + 1
        lin = [z] * m
        lin[i] = one
        return Jet(x, lin, (z,) * quad_len(m), m)

    # -- derivative access (true derivatives, not Taylor data) --------

    def gradient(self) -> tuple:
        return self.lin

    def hessian(self) -> list:
        h = [[None] * self.m for _ in range(self.m)]
        for i in range(self.m):
            for j in range(i, self.m):
                q = self.quad[quad_index(i, j, self.m)]
                h[i][j] = h[j][i] = (q + q) if i == j else q
        return h

    def deriv(self, i: int) -> "Jet":
        """Partial derivative with respect to variable i; drops one order."""
        m = self.m
        z = self.val * 0
        lin = []
        for j in range(m):
            q = self.quad[quad_index(i, j, m)]
            lin.append((q + q) if i == j else q)
        return Jet(self.lin[i], lin, (z,) * quad_len(m), m, order=min(self.order, 2) - 1)

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.m != self.m:
                raise ValueError("jet variable count mismatch: %d vs %d" % (self.m, other.m))
            return other
        if isinstance(other, (int, float, complex, Fraction)):
            return Jet.const(other, self.m)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(
            self.val + o.val,
            tuple(a + b for a, b in zip(self.lin, o.lin)),
            tuple(a + b for a, b in zip(self.quad, o.quad)),
            self.m,
            min(self.order, o.order),
        )

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Jet(
            self.val - o.val,
            tuple(a - b for a, b in zip(self.lin, o.lin)),
            tuple(a - b for a, b in zip(self.quad, o.quad)),
            self.m,
            min(self.order, o.order),
        )

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return Jet(-self.val, tuple(-a for a in self.lin), tuple(-a for a in self.quad), self.m, self.order)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        m = self.m
        val = self.val * o.val
        lin = tuple(self.val * o.lin[i] + self.lin[i] * o.val for i in range(m))
        quad = []
        for i in range(m):
            for j in range(i, m):
                q = quad_index(i, j, m)
                t = self.val * o.quad[q] + self.quad[q] * o.val
                if i == j:
                    t = t + self.lin[i] * o.lin[i]
                else:
                    t = t + self.lin[i] * o.lin[j] + self.lin[j] * o.lin[i]
                quad.append(t)
        return Jet(val, lin, quad, m, min(self.order, o.order))

    __rmul__ = __mul__

    def inverse(self) -> "Jet":
        v = self.val
        iv = 1 / v
        return self.compose(iv, -iv / v, 2 * iv / (v * v))

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = Jet.const(self.val * 0 + 1, self.m)
            base = self
            n = p
            while n:
                if n & 1:
                    out = out * base
                base = base * base
                n >>= 1
            return out
        v = self.val
        return self.compose(v ** p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))

    def compose(self, f0, f1, f2) -> "Jet":
        """Jet of F(self) given F, F', F'' at self.val (chain rule, order 2)."""
        m = self.m
        lin = tuple(f1 * a for a in self.lin)
        quad = []
        for i in range(m):
            for j in range(i, m):
                q = quad_index(i, j, m)
                t = f1 * self.quad[q]
                if i == j:
                    t = t + f2 * self.lin[i] * self.lin[i] / 2
                else:
                    t = t + f2 * self.lin[i] * self.lin[j]
                quad.append(t)
        return Jet(f0, lin, quad, m, self.order)

    def conjugate(self) -> "Jet":
        cj = lambda x: x.conjugate() if isinstance(x, complex) else x
        return Jet(cj(self.val), tuple(cj(a) for a in self.lin), tuple(cj(a) for a in self.quad), self.m, self.order)

    def is_zero(self) -> bool:
        return self.val == 0 and all(a == 0 for a in self.lin) and all(a == 0 for a in self.quad)

    def __repr__(self):
        return f"Jet({self.val!r}, lin={self.lin!r}, quad={self.quad!r})"


def _num_fn(fn_cmath, fn_math, x):
    if isinstance(x, complex):
        return fn_cmath(x)
    return fn_math(x)


def jexp(x):
    if isinstance(x, Jet):
        e = _num_fn(cmath.exp, math.exp, x.val)
        return x.compose(e, e, e)
    return _num_fn(cmath.exp, math.exp, x)


def jsin(x):
    if isinstance(x, Jet):
        s = _num_fn(cmath.sin, math.sin, x.val)
        c = _num_fn(cmath.cos, math.cos, x.val)
        return x.compose(s, c, -s)
    return _num_fn(cmath.sin, math.sin, x)


def jcos(x):
    if isinstance(x, Jet):
        s = _num_fn(cmath.sin, math.sin, x.val)
        c = _num_fn(cmath.cos, math.cos, x.val)
        return x.compose(c, -s, -c)
    return _num_fn(cmath.cos, math.cos, x)


def jlog(x):
    if isinstance(x, Jet):
        v = x.val
        return x.compose(_num_fn(cmath.log, math.log, v), 1 / v, -1 / (v * v))
    return _num_fn(cmath.log, math.log, x)


def jsqrt(x):
    if isinstance(x, Jet):
        r = _num_fn(cmath.sqrt, math.sqrt, x.val)
        return x.compose(r, 1 / (2 * r), -1 / (4 * r * x.val))
    return _num_fn(cmath.sqrt, math.sqrt, x)


class QQi:
    """Exact complex rational a + b*i with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _lift(x):
        if isinstance(x, QQi):
            return x
        if isinstance(x, (int, Fraction)):
            return QQi(x)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QQi(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QQi(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return QQi(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero QQi")
        return QQi((self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def conjugate(self) -> "QQi":
        return QQi(self.re, -self.im)

    def __eq__(self, other):
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == complex(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QQi({self.re}, {self.im})"


QQI_I = QQi(0, 1)


def is_exact_zero(s) -> bool:
    """True when the scalar is identically zero (exact for every scalar kind)."""
    if isinstance(s, Jet):
        return s.is_zero()
    return s == 0


def scalar_value(s):
    """Numeric value part of a scalar, as a Python complex/float/Fraction."""
    if isinstance(s, Jet):
        return scalar_value(s.val)
    if isinstance(s, QQi):
        return complex(s) if s.im else s.re
    return s


def scalar_conj(s):
    if isinstance(s, (Jet, QQi, complex)):
        return s.conjugate()
    return s
