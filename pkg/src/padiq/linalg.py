"""Vectors and matrices over Q_p, the standard symplectic form, conformal
classification and the antisymmetric reduction over Z_p."""

from __future__ import annotations

from fractions import Fraction

from .context import INF, PadicContext, SingularMatrixError
from .number import Qp


def _as_qp(ctx, x):
    return x if isinstance(x, Qp) else Qp.exact(ctx, x)


class Vec:
    """Immutable vector of Qp entries sharing one context."""

    __slots__ = ("ctx", "entries")

    def __init__(self, ctx: PadicContext, entries):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "entries", tuple(_as_qp(ctx, e) for e in entries))

    def __setattr__(self, *a):
        raise AttributeError("Vec is immutable")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __add__(self, other):
        return Vec(self.ctx, (a + b for a, b in zip(self.entries, other.entries, strict=True)))

    def __sub__(self, other):
        return Vec(self.ctx, (a - b for a, b in zip(self.entries, other.entries, strict=True)))

    def __neg__(self):
        return Vec(self.ctx, (-a for a in self.entries))

    def scale(self, c) -> "Vec":
        c = _as_qp(self.ctx, c)
        return Vec(self.ctx, (c * a for a in self.entries))

    def dot(self, other) -> Qp:
        total = Qp.exact(self.ctx, 0)
        for a, b in zip(self.entries, other.entries, strict=True):
            total = total + a * b
        return total

    def sup_norm(self) -> Fraction:
        """max |v_i|_p; raises if some entry is an undecided zero."""
        return max((e.abs_value() for e in self.entries), default=Fraction(0))

    def norm_at_most(self, radius_exp: int) -> bool:
        """Decide ||v|| <= p^radius_exp digit-window-safely."""
        return all(e.val_at_least(-radius_exp) for e in self.entries)

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries)

    def __eq__(self, other):
        if not isinstance(other, Vec) or len(other) != len(self):
            return NotImplemented
        return all(a == b for a, b in zip(self.entries, other.entries))

    __hash__ = None

    def __repr__(self):
        return "Vec[" + ", ".join(e.to_literal() for e in self.entries) + "]"


class Mat:
    """Immutable rectangular matrix of Qp entries."""

    __slots__ = ("ctx", "rows")

    def __init__(self, ctx: PadicContext, rows):
        rows = tuple(tuple(_as_qp(ctx, e) for e in r) for r in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, *a):
        raise AttributeError("Mat is immutable")

    @staticmethod
    def identity(ctx, n: int) -> "Mat":
        return Mat(ctx, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @staticmethod
    def zero(ctx, m: int, k: int) -> "Mat":
        return Mat(ctx, [[0] * k for _ in range(m)])

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i) -> Vec:
        return Vec(self.ctx, self.rows[i])

    def col(self, j) -> Vec:
        return Vec(self.ctx, (r[j] for r in self.rows))

    def transpose(self) -> "Mat":
        m, k = self.shape
        return Mat(self.ctx, [[self.rows[i][j] for i in range(m)] for j in range(k)])

    @property
    def T(self) -> "Mat":
        return self.transpose()

    def __add__(self, other):
        return Mat(self.ctx, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return Mat(self.ctx, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return Mat(self.ctx, [[-a for a in r] for r in self.rows])

    def scale(self, c) -> "Mat":
        c = _as_qp(self.ctx, c)
        return Mat(self.ctx, [[c * a for a in r] for r in self.rows])

    def __matmul__(self, other):
        if isinstance(other, Vec):
            if self.shape[1] != len(other):
                raise ValueError("dimension mismatch")
            return Vec(self.ctx, (self.row(i).dot(other) for i in range(self.shape[0])))
        m, k = self.shape
        k2, n = other.shape
        if k != k2:
            raise ValueError("dimension mismatch")
        cols = other.transpose().rows
        return Mat(self.ctx, [[Vec(self.ctx, r).dot(Vec(self.ctx, c)) for c in cols] for r in self.rows])

    def apply(self, v: Vec) -> Vec:
        return self @ v

    def sup_norm(self) -> Fraction:
        return max((e.abs_value() for r in self.rows for e in r), default=Fraction(0))

    def min_val(self):
        """Minimal valuation over the entries (INF for the zero matrix)."""
        out = INF
        for r in self.rows:
            for e in r:
                if not e.is_zero():
                    out = min(out, e.val)
        return out

    def is_integral(self) -> bool:
        return all(e.val_at_least(0) for r in self.rows for e in r)

    def is_exact(self) -> bool:
        return all(e.is_exact for r in self.rows for e in r)

    def __eq__(self, other):
        if not isinstance(other, Mat) or other.shape != self.shape:
            return NotImplemented
        return all(a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    __hash__ = None

    def __repr__(self):
        body = "; ".join(", ".join(e.to_literal() for e in r) for r in self.rows)
        return f"Mat[{body}]"

    # ------------------------------------------------------------------

    def _eliminated(self):
        """Row echelon pass with minimal-valuation pivoting.

        Returns (pivot product with sign, row-reduced copy, inverse-accumulator
        or None).  Shared by det and inv.
        """
        m, k = self.shape
        if m != k:
            raise ValueError("square matrix required")
        a = [list(r) for r in self.rows]
        inv = [[Qp.exact(self.ctx, 1 if i == j else 0) for j in range(m)] for i in range(m)]
        det = Qp.exact(self.ctx, 1)
        for col in range(m):
            piv, pval = None, INF
            for i in range(col, m):
                e = a[i][col]
                if not e.is_zero() and e.val < pval:
                    piv, pval = i, e.val
            if piv is None:
                raise SingularMatrixError(
                    "matrix singular at the working precision"
                )
            if piv != col:
                a[piv], a[col] = a[col], a[piv]
                inv[piv], inv[col] = inv[col], inv[piv]
                det = -det
            det = det * a[col][col]
            pinv = Qp.exact(self.ctx, 1) / a[col][col]
            a[col] = [pinv * e for e in a[col]]
            inv[col] = [pinv * e for e in inv[col]]
            for i in range(m):
                if i == col or a[i][col].is_zero():
                    continue
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
                inv[i] = [x - f * y for x, y in zip(inv[i], inv[col])]
        return det, a, inv

    def det(self) -> Qp:
        try:
            d, _, _ = self._eliminated()
        except SingularMatrixError:
            if self.is_exact():
                return Qp.exact(self.ctx, 0)
            raise
        return d

    def inv(self) -> "Mat":
        _, _, inv = self._eliminated()
        return Mat(self.ctx, inv)


def omega0(n: int, ctx: PadicContext) -> Mat:
    """The standard symplectic form: n diagonal blocks [[0,1],[-1,0]]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = [[0] * (2 * n) for _ in range(2 * n)]
    for i in range(n):
        rows[2 * i][2 * i + 1] = 1
        rows[2 * i + 1][2 * i] = -1
    return Mat(ctx, rows)


def pairing(form: Mat, u: Vec, v: Vec) -> Qp:
    """The bilinear value u^T * form * v."""
    if form.shape != (len(u), len(v)):
        raise ValueError("dimension mismatch")
    return u.dot(form @ v)


def conformal_factor(a: Mat) -> Qp | None:
    """c with A*Omega0*A^T = c*Omega0 when the product is any multiple of
    Omega0; None otherwise.  c = 1 means symplectic, c = -1 antisymplectic."""
    m, k = a.shape
    if m != k or m % 2 != 0:
        raise ValueError("square even-dimensional matrix required")
    form = omega0(m // 2, a.ctx)
    prod = a @ form @ a.T
    c = prod[0, 1]
    if prod == form.scale(c):
        return c
    return None


def antisymmetric_reduce(d: Mat) -> Mat:
    """Integral C with C*Omega0*C^T = D, for D antisymmetric, nondegenerate
    and integral.

    Runs the three-transformation Gaussian reduction from D down to the
    standard form, always pivoting on an entry of minimal valuation so every
    division stays in Z_p, and accumulates the reversed (multiplying)
    transformation sequence into C.  The identity C*Omega0*C^T = D is
    re-checked before returning.
    """
    m, k = d.shape
    if m != k or m % 2 != 0:
        raise ValueError("square even-dimensional matrix required")
    if not d.is_integral():
        raise ValueError("entries must lie in Z_p")
    if d != -d.T:
        raise ValueError("matrix must be antisymmetric")
    ctx = d.ctx
    work = [list(r) for r in d.rows]
    c = [[Qp.exact(ctx, 1 if i == j else 0) for j in range(m)] for i in range(m)]

    def swap(i, j):
        work[i], work[j] = work[j], work[i]
        for r in work:
            r[i], r[j] = r[j], r[i]
        for r in c:
            r[i], r[j] = r[j], r[i]

    def add_row(i, j, f):
        # row_i += f*row_j and col_i += f*col_j on work; col_j -= f*col_i on C
        work[i] = [x + f * y for x, y in zip(work[i], work[j])]
        for r in work:
            r[i] = r[i] + f * r[j]
        for r in c:
            r[j] = r[j] - f * r[i]

    for s in range(0, m, 2):
        piv, pval = None, INF
        for i in range(s, m):
            for j in range(i + 1, m):
                e = work[i][j]
                if not e.is_zero() and e.val < pval:
                    piv, pval = (i, j), e.val
        if piv is None:
            raise SingularMatrixError("degenerate antisymmetric matrix")
        i, j = piv
        if i != s:
            swap(i, s)
            if j == s:
                j = i
        if j != s + 1:
            swap(j, s + 1)
        alpha = work[s][s + 1]
        inv_alpha = Qp.exact(ctx, 1) / alpha
        work[s] = [inv_alpha * e for e in work[s]]
        for r in work:
            r[s] = inv_alpha * r[s]
        for r in c:
            r[s] = alpha * r[s]
        for t in range(s + 2, m):
            f = work[t][s + 1]
            if not f.is_zero():
                add_row(t, s, -f)
            f = work[t][s]
            if not f.is_zero():
                add_row(t, s + 1, f)
    out = Mat(ctx, c)
    n = m // 2
    if not out.is_integral() or (out @ omega0(n, ctx) @ out.T) != d:
        raise SingularMatrixError(
            "reduction failed to certify C*Omega0*C^T = D"
        )  # pragma: no cover
    return out
