"""Small dense exact linear algebra over a coefficient field.

Matrices are lists of rows. Nothing here is meant for large sizes; the
pencils handled by the decomposition have at most a few dozen rows.
"""

from __future__ import annotations

from .polycore import Field


def zeros(F: Field, rows: int, cols: int) -> list[list]:
    return [[F.zero] * cols for _ in range(rows)]


def identity(F: Field, n: int) -> list[list]:
    out = zeros(F, n, n)
    for i in range(n):
        out[i][i] = F.one
    return out


def transpose(A: list[list]) -> list[list]:
    return [list(col) for col in zip(*A)] if A else []


def matmul(F: Field, A: list[list], B: list[list]) -> list[list]:
    if not A:
        return []
    inner = len(B)
    cols = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(cols):
            s = F.zero
            for k in range(inner):
                a = row[k]
                if a:
                    b = B[k][j]
                    if b:
                        s = F.add(s, F.mul(a, b))
            new.append(s)
        out.append(new)
    return out


def matvec(F: Field, A: list[list], v: list) -> list:
    return [col[0] for col in matmul(F, A, [[x] for x in v])] if A else []


def combine(F: Field, a, A: list[list], b, B: list[list]) -> list[list]:
    """``a*A + b*B`` entrywise."""
    return [
        [F.add(F.mul(a, x), F.mul(b, y)) for x, y in zip(ra, rb)] for ra, rb in zip(A, B)
    ]


def rref(F: Field, A: list[list]) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(r) for r in A]
    rows = len(M)
    cols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pr = next((i for i in range(r, rows) if M[i][c]), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, x) for x in M[r]]
        for i in range(rows):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return M, pivots


def rank(F: Field, A: list[list]) -> int:
    return len(rref(F, A)[1]) if A and A[0] else 0


def nullspace(F: Field, A: list[list], ncols: int | None = None) -> list[list]:
    """Basis of ``{v : A v = 0}`` as a list of vectors."""
    if ncols is None:
        ncols = len(A[0]) if A else 0
    if not A:
        return [[F.one if i == j else F.zero for i in range(ncols)] for j in range(ncols)]
    R, pivots = rref(F, A)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [F.zero] * ncols
        v[fc] = F.one
        for row, pc in enumerate(pivots):
            v[pc] = F.neg(R[row][fc])
        basis.append(v)
    return basis


def inverse(F: Field, A: list[list]) -> list[list]:
    n = len(A)
    aug = [list(row) + e for row, e in zip(A, identity(F, n))]
    R, pivots = rref(F, aug)
    if pivots[:n] != list(range(n)) or len(pivots) > n:
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in R]


def solve(F: Field, A: list[list], b: list) -> list | None:
    """One solution of ``A x = b`` or ``None`` when inconsistent."""
    rows = len(A)
    ncols = len(A[0]) if A else 0
    aug = [list(A[i]) + [b[i]] for i in range(rows)]
    R, pivots = rref(F, aug)
    if ncols in pivots:
        return None
    x = [F.zero] * ncols
    for row, pc in enumerate(pivots):
        x[pc] = R[row][ncols]
    return x


def is_invertible(F: Field, A: list[list]) -> bool:
    return bool(A) and len(A) == len(A[0]) and rank(F, A) == len(A)


def extend_to_basis(F: Field, vectors: list[list], dim: int) -> list[list]:
    """Append standard basis vectors until ``vectors`` spans the whole space."""
    basis = [list(v) for v in vectors]
    current = rank(F, basis) if basis else 0
    if current != len(basis):
        raise ValueError("vectors are linearly dependent")
    for i in range(dim):
        if len(basis) == dim:
            break
        e = [F.one if j == i else F.zero for j in range(dim)]
        if rank(F, basis + [e]) > len(basis):
            basis.append(e)
    return basis


def columns_to_matrix(cols: list[list]) -> list[list]:
    return transpose(cols)


def det(F: Field, A: list[list]):
    n = len(A)
    M = [list(r) for r in A]
    d = F.one
    for c in range(n):
        pr = next((i for i in range(c, n) if M[i][c]), None)
        if pr is None:
            return F.zero
        if pr != c:
            M[c], M[pr] = M[pr], M[c]
            d = F.neg(d)
        d = F.mul(d, M[c][c])
        inv = F.inv(M[c][c])
        for i in range(c + 1, n):
            if M[i][c]:
                f = F.mul(M[i][c], inv)
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[c])]
    return d


def charpoly(F: Field, T: list[list]) -> list:
    """Coefficients (lowest degree first) of ``det(x I - T)``.

    Computed by evaluating the determinant at ``n+1`` field points and
    interpolating; needs ``|F| > n``.
    """
    n = len(T)
    if isinstance(getattr(F, "p", None), int) and F.p <= n:
        raise ValueError("field too small for interpolation")
    xs = [F(i) for i in range(n + 1)]
    ys = []
    for x in xs:
        M = [[F.sub(x if i == j else F.zero, T[i][j]) for j in range(n)] for i in range(n)]
        ys.append(det(F, M))
    # Lagrange interpolation in coefficient form
    coeffs = [F.zero] * (n + 1)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        if not yi:
            continue
        basis = [F.one]
        denom = F.one
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [F.zero] + basis
            for k in range(len(basis) - 1):
                basis[k] = F.sub(basis[k], F.mul(xj, basis[k + 1]))
            denom = F.mul(denom, F.sub(xi, xj))
        scale = F.div(yi, denom)
        for k in range(n + 1):
            coeffs[k] = F.add(coeffs[k], F.mul(scale, basis[k]))
    return coeffs
