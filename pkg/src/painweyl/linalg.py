"""Small dense matrices over the exact rational-function field.

Only the few operations the verification suites need: products, determinants,
inverses, nullspaces, characteristic polynomials and rational-root
extraction.  Matrices are plain lists of lists of RationalFunction; sizes
stay at 2x2 or 4x4 throughout the package, so cofactor expansion and
fraction-free elimination are entirely adequate.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .symkernel import RationalFunction

RF = RationalFunction
Matrix = list[list[RF]]

_ZERO = RF.zero()
_ONE = RF.one()


def identity(n: int) -> Matrix:
    return [[_ONE if i == j else _ZERO for j in range(n)] for i in range(n)]


def zero_matrix(n: int, m: int) -> Matrix:
    return [[_ZERO for _ in range(m)] for _ in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    out = zero_matrix(n, m)
    for i in range(n):
        row = a[i]
        for j in range(m):
            acc = _ZERO
            for s in range(k):
                if not row[s].is_zero and not b[s][j].is_zero:
                    acc = acc + row[s] * b[s][j]
            out[i][j] = acc
    return out


def mat_sub(a: Matrix, b: Matrix) -> Matrix:
    return [[a[i][j] - b[i][j] for j in range(len(a[0]))] for i in range(len(a))]


def mat_scale(a: Matrix, c: RF) -> Matrix:
    return [[entry * c for entry in row] for row in a]


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def mat_equal(a: Matrix, b: Matrix) -> bool:
    return all(a[i][j].equals(b[i][j])
               for i in range(len(a)) for j in range(len(a[0])))


def det(a: Matrix) -> RF:
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    total = _ZERO
    for j in range(n):
        if a[0][j].is_zero:
            continue
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        term = a[0][j] * det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


def inverse(a: Matrix) -> Matrix:
    """Gauss-Jordan inverse; raises ValueError on a singular matrix."""
    n = len(a)
    work = [row[:] + identity(n)[i][:] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not work[r][col].is_zero), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        inv_p = _ONE / work[col][col]
        work[col] = [entry * inv_p for entry in work[col]]
        for r in range(n):
            if r != col and not work[r][col].is_zero:
                factor = work[r][col]
                work[r] = [work[r][j] - factor * work[col][j] for j in range(2 * n)]
    return [row[n:] for row in work]


def _clear_row(row: Sequence[RF]) -> list:
    """Scale a matrix row by a common denominator, returning polynomials.

    Row scaling by non-zero polynomials preserves both the nullspace and
    determinant vanishing, which is all the callers rely on.
    """
    from .symkernel import Polynomial

    distinct = []
    for entry in row:
        if entry.den.is_constant:
            continue
        if not any(entry.den.terms == d.terms for d in distinct):
            distinct.append(entry.den)
    common = Polynomial.constant(1)
    for d in distinct:
        common = common * d
    scale = RF(common)
    out = []
    for entry in row:
        cleared = entry * scale       # the denominator divides the common one
        if not cleared.den.is_constant:
            raise ValueError("row clearing left a non-trivial denominator")
        out.append(cleared.num)
    return out


def nullspace(a: Matrix) -> list[list[RF]]:
    """Basis of the right nullspace over the rational-function field.

    Uses fraction-free (Bareiss) forward elimination on denominator-cleared
    rows so intermediate entries stay polynomial, then back-substitutes in
    the fraction field.
    """
    from .symkernel import Polynomial, exact_divide

    n, m = len(a), len(a[0])
    rows = [_clear_row(row) for row in a]
    one = Polynomial.constant(1)
    prev = one
    pivots: list[int] = []
    r = 0
    for c in range(m):
        pivot = next((i for i in range(r, n) if not rows[i][c].is_zero), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        for i in range(r + 1, n):
            for j in range(m):
                if j == c:
                    continue
                new = rows[r][c] * rows[i][j] - rows[i][c] * rows[r][j]
                if prev is not one:
                    divided = exact_divide(new, prev)
                    if divided is not None:
                        new = divided
                rows[i][j] = new
            rows[i][c] = Polynomial.zero()
        prev = rows[r][c]
        pivots.append(c)
        r += 1
        if r == n:
            break
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for fc in free:
        vec: list[RF] = [_ZERO] * m
        vec[fc] = _ONE
        for k in range(len(pivots) - 1, -1, -1):
            pc = pivots[k]
            acc = _ZERO
            for j in range(pc + 1, m):
                if not vec[j].is_zero and not rows[k][j].is_zero:
                    acc = acc + RF(rows[k][j]) * vec[j]
            vec[pc] = -acc / RF(rows[k][pc])
        basis.append(vec)
    return basis


def char_poly(a: Matrix) -> list[RF]:
    """Coefficients [c0, ..., cn] of det(x I - A), cn = 1 (Faddeev-LeVerrier)."""
    n = len(a)
    coeffs: list[RF] = [_ZERO] * (n + 1)
    coeffs[n] = _ONE
    m = identity(n)
    for k in range(1, n + 1):
        m = mat_mul(a, m)
        trace = _ZERO
        for i in range(n):
            trace = trace + m[i][i]
        c = -trace / RF.constant(k)
        coeffs[n - k] = c
        for i in range(n):
            m[i][i] = m[i][i] + c
    return coeffs


def poly_eval(coeffs: Sequence[RF], x: RF) -> RF:
    acc = _ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_deflate(coeffs: Sequence[RF], root: RF) -> Optional[list[RF]]:
    """Synthetic division by (x - root); None if root is not a root."""
    n = len(coeffs) - 1
    out: list[RF] = [_ZERO] * n
    carry = coeffs[n]
    for k in range(n - 1, -1, -1):
        out[k] = carry
        carry = coeffs[k] + carry * root
    if not carry.is_zero:
        return None
    return out + [_ZERO] * 0


def rational_function_roots(coeffs: Sequence[RF], candidates: Sequence[RF]):
    """Roots with multiplicity drawn from a candidate list; None if the
    polynomial does not split over the candidates."""
    work = list(coeffs)
    roots: list[RF] = []
    degree = len(work) - 1
    while degree > 0:
        for cand in candidates:
            if poly_eval(work, cand).is_zero:
                deflated = poly_deflate(work, cand)
                if deflated is not None:
                    roots.append(cand)
                    work = deflated
                    degree -= 1
                    break
        else:
            return None
    return roots


def extract_integer_form(a: Matrix) -> Optional[tuple[RF, list[list[int]]]]:
    """Write A = prefactor * M with M an integer matrix, if possible.

    The prefactor is chosen so that the integer entries of M have overall
    gcd 1 and the first non-zero entry of M is positive.
    """
    n, m = len(a), len(a[0])
    first: Optional[RF] = None
    for row in a:
        for entry in row:
            if not entry.is_zero:
                first = entry
                break
        if first is not None:
            break
    if first is None:
        return RF.one(), [[0] * m for _ in range(n)]
    ints: list[list[Fraction]] = []
    for row in a:
        out_row = []
        for entry in row:
            ratio = entry / first
            if not ratio.is_constant:
                return None
            out_row.append(ratio.constant_value())
        ints.append(out_row)
    denom_lcm = 1
    for row in ints:
        for v in row:
            denom_lcm = denom_lcm * v.denominator // _gcd_int(denom_lcm, v.denominator)
    scaled = [[v * denom_lcm for v in row] for row in ints]
    g = 0
    for row in scaled:
        for v in row:
            g = _gcd_int(g, int(v))
    g = g or 1
    matrix = [[int(v) // g for v in row] for row in scaled]
    prefactor = first * RF.constant(Fraction(g, denom_lcm))
    return prefactor, matrix


def _gcd_int(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def integer_matrix_eigenvalues(m: list[list[int]]) -> Optional[list[int]]:
    """Integer spectrum with multiplicity, or None if it is not integral."""
    n = len(m)
    coeffs = char_poly([[RF.constant(v) for v in row] for row in m])
    work = [c.constant_value() for c in coeffs]
    const = work[0]
    candidates = {0}
    bound = 1 + max(abs(int(c)) for c in work)
    limit = abs(int(const)) if const else 0
    for d in range(1, min(limit, bound) + 1):
        if limit % d == 0:
            candidates.add(d)
            candidates.add(-d)
    for d in range(1, bound + 1):
        candidates.add(d)
        candidates.add(-d)
    roots: list[int] = []
    poly = list(work)
    degree = n
    while degree > 0:
        for cand in sorted(candidates, key=abs):
            value = Fraction(0)
            for c in reversed(poly):
                value = value * cand + c
            if value == 0:
                new = [Fraction(0)] * degree
                carry = poly[degree]
                for k in range(degree - 1, -1, -1):
                    new[k] = carry
                    carry = poly[k] + carry * cand
                poly = new
                roots.append(cand)
                degree -= 1
                break
        else:
            return None
    return roots
