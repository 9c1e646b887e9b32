"""Small exact linear algebra toolkit over Fractions.

Powers the zero-tolerance certificates: row reduction, kernels, minimal
polynomials of integer matrices, and orthogonal projectors onto rational
subspaces.  Matrices are lists of lists of Fractions; sizes stay below
~100 so dense Gaussian elimination is plenty.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def mat(rows) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def zeros(n: int, m: int) -> list[list[Fraction]]:
    return [[Fraction(0)] * m for _ in range(n)]


def eye(n: int) -> list[list[Fraction]]:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def matmul(a, b) -> list[list[Fraction]]:
    n, k, m = len(a), len(b), len(b[0])
    out = zeros(n, m)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(m):
                    if bt[j]:
                        oi[j] += x * bt[j]
    return out


def matvec(a, v) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in a]


def add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def scale(a, s):
    s = Fraction(s)
    return [[s * x for x in row] for row in a]


def transpose(a):
    return [list(col) for col in zip(*a)]


def rref(a) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot column list."""
    m = [row[:] for row in a]
    nrows, ncols = len(m), len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(a) -> int:
    return len(rref(a)[1])


def nullspace(a) -> list[list[Fraction]]:
    """Basis of the right kernel, one vector per non-pivot column."""
    if not a:
        return []
    red, pivots = rref(a)
    ncols = len(a[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(a, b) -> list[Fraction] | None:
    """One solution of a x = b, or None when inconsistent."""
    aug = [row[:] + [Fraction(bb)] for row, bb in zip(a, b)]
    red, pivots = rref(aug)
    ncols = len(a[0])
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][-1]
    return x


def inverse(a) -> list[list[Fraction]]:
    n = len(a)
    aug = [row[:] + eye(n)[i] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in red]


def minimal_polynomial(a) -> list[Fraction]:
    """Monic minimal polynomial coefficients [c0, c1, ..., 1] of a square matrix."""
    n = len(a)
    powers = [eye(n)]
    for _ in range(n):
        powers.append(matmul(a, powers[-1]))
    flat = lambda m: [x for row in m for x in row]
    for deg in range(1, n + 1):
        # solve c0 I + c1 A + ... + c_{deg-1} A^{deg-1} = -A^deg
        cols = [flat(powers[k]) for k in range(deg)]
        rhs = [-x for x in flat(powers[deg])]
        system = transpose(cols)
        sol = solve(system, rhs)
        if sol is not None:
            return [*sol, Fraction(1)]
    raise RuntimeError("minimal polynomial not found (unreachable)")


def poly_roots_rational(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """All rational roots of a polynomial that splits into distinct linear factors.

    Raises when the polynomial has an irrational or repeated factor; in that
    case the operator is not rationally diagonalizable.
    """
    c = list(coeffs)
    roots = []
    while len(c) > 1:
        root = _find_rational_root(c)
        if root is None:
            raise ValueError("polynomial does not split over the rationals")
        roots.append(root)
        c = _deflate(c, root)
    if len(set(roots)) != len(roots):
        raise ValueError("minimal polynomial has a repeated root; not diagonalizable")
    return roots


def _find_rational_root(c: list[Fraction]) -> Fraction | None:
    den = 1
    for x in c:
        den = den * x.denominator // _gcd(den, x.denominator)
    ic = [int(x * den) for x in c]
    while ic and ic[-1] == 0:
        ic.pop()
    lead, const = ic[-1], ic[0]
    if const == 0:
        return Fraction(0)
    for p in _divisors(abs(const)):
        for q in _divisors(abs(lead)):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if _poly_eval(c, cand) == 0:
                    return cand
    return None


def _poly_eval(c, x):
    tot = Fraction(0)
    for coef in reversed(c):
        tot = tot * x + coef
    return tot


def _deflate(c, root):
    # synthetic division by (x - root); assumes root is exact
    n = len(c) - 1
    q = [Fraction(0)] * n
    q[n - 1] = c[n]
    for k in range(n - 1, 0, -1):
        q[k - 1] = c[k] + root * q[k]
    return q


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n: int):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def orthogonal_projector(basis: list[list[Fraction]]) -> list[list[Fraction]]:
    """Orthogonal projector (standard inner product) onto span(basis), exact."""
    if not basis:
        return []
    b = transpose(basis)  # columns are basis vectors
    bt = basis
    gram = matmul(bt, b)
    ginv = inverse(gram)
    return matmul(b, matmul(ginv, bt))


def eig_projectors(a) -> list[tuple[Fraction, int, list[list[Fraction]]]]:
    """Exact spectral projectors of a rationally diagonalizable matrix.

    Returns (eigenvalue, multiplicity, projector) triples built as Lagrange
    polynomials in the matrix; the projectors are idempotent, mutually
    annihilating and sum to the identity, all certified by construction.
    """
    n = len(a)
    mp = minimal_polynomial(a)
    lams = poly_roots_rational(mp)
    out = []
    for lam in lams:
        p = eye(n)
        denom = Fraction(1)
        for mu in lams:
            if mu == lam:
                continue
            p = matmul(p, add(a, scale(eye(n), -mu)))
            denom *= lam - mu
        p = scale(p, 1 / denom)
        tr = sum(p[i][i] for i in range(n))
        out.append((lam, int(tr), p))
    return out
