"""p-adic ellipsoids: shapes, membership, the constructive Farkas dichotomy,
containment, inner symplectic balls, and linear symplectic width."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .context import INF, PadicContext, PrecisionError, SingularMatrixError
from .linalg import Mat, Vec, antisymmetric_reduce, conformal_factor, omega0
from .number import Qp, ordp_fraction

# ---------------------------------------------------------------------------
# shapes


@dataclass(frozen=True)
class Ball:
    """{v : ||v|| <= p^radius_exp} in dimension dim."""

    radius_exp: int
    dim: int


@dataclass(frozen=True)
class Cylinder:
    """First coordinate pair in a 2-dim ball of radius p^radius_exp, rest free."""

    radius_exp: int
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("cylinders need dimension >= 2")


@dataclass(frozen=True)
class PuncturedTorusSpace:
    """Product of punctured planes: no coordinate pair may be (0, 0)."""

    dim: int

    def __post_init__(self):
        if self.dim % 2:
            raise ValueError("dimension must be even")


@dataclass(frozen=True)
class FullSpace:
    dim: int


@dataclass(frozen=True)
class Ellipsoid:
    """{v : ||A(v - center)|| <= 1} for an invertible defining matrix A."""

    matrix: Mat
    center: Vec = None

    def __post_init__(self):
        m, k = self.matrix.shape
        if m != k:
            raise ValueError("defining matrix must be square")
        if self.center is None:
            object.__setattr__(
                self, "center", Vec(self.matrix.ctx, [0] * m)
            )
        if len(self.center) != m:
            raise ValueError("center dimension mismatch")
        self.matrix.inv()  # rejects singular defining matrices

    @property
    def dim(self):
        return self.matrix.shape[0]


def shape_contains(shape, v: Vec) -> bool:
    """Membership test; raises PrecisionError when a window is too short to
    decide (never guesses)."""
    if isinstance(shape, FullSpace):
        if len(v) != shape.dim:
            raise ValueError("dimension mismatch")
        return True
    if isinstance(shape, Ball):
        if len(v) != shape.dim:
            raise ValueError("dimension mismatch")
        return v.norm_at_most(shape.radius_exp)
    if isinstance(shape, Cylinder):
        if len(v) != shape.dim:
            raise ValueError("dimension mismatch")
        return Vec(v.ctx, v.entries[:2]).norm_at_most(shape.radius_exp)
    if isinstance(shape, PuncturedTorusSpace):
        if len(v) != shape.dim:
            raise ValueError("dimension mismatch")
        for i in range(0, len(v), 2):
            x, y = v[i], v[i + 1]
            if x.is_exact_zero() and y.is_exact_zero():
                return False
            if x.is_zero() and y.is_zero():
                raise PrecisionError(
                    "coordinate pair indistinguishable from (0,0) at this precision"
                )
        return True
    if isinstance(shape, Ellipsoid):
        if len(v) != shape.dim:
            raise ValueError("dimension mismatch")
        return (shape.matrix @ (v - shape.center)).norm_at_most(0)
    raise TypeError(f"unsupported shape {shape!r}")


# ---------------------------------------------------------------------------
# Farkas


@dataclass(frozen=True)
class FarkasCertificate:
    """Either an integral solution x of Ax = b, or a separating functional y
    with y^T A integral and y^T b non-integral.  Exactly one exists."""

    kind: str  # "solution" | "separating"
    vector: Vec

    @property
    def is_solution(self):
        return self.kind == "solution"


def _ord(q: Fraction, p: int):
    return ordp_fraction(q, p)


def _farkas(a: list[list[Fraction]], b: list[Fraction], p: int):
    """Recursive dichotomy on the row count.  Returns ("x"|"y", list)."""
    m, k = len(a), len(a[0])

    if m == 1:
        row, beta = a[0], b[0]
        if all(e == 0 for e in row):
            if beta == 0:
                return "x", [Fraction(0)] * k
            ell = 1 + max(0, -_ord(beta, p))
            return "y", [Fraction(p) ** (-ell)]
        j = min(range(k), key=lambda i: INF if row[i] == 0 else _ord(row[i], p))
        x = beta / row[j]
        if _ord(x, p) >= 0:
            return "x", [x if i == j else Fraction(0) for i in range(k)]
        return "y", [Fraction(p) ** (-_ord(row[j], p))]

    first = a[0]
    if all(e == 0 for e in first):
        if b[0] == 0:
            tag, vec = _farkas(a[1:], b[1:], p)
            if tag == "y":
                vec = [Fraction(0)] + vec
            return tag, vec
        ell = 1 + max(0, -_ord(b[0], p))
        return "y", [Fraction(p) ** (-ell) if i == 0 else Fraction(0) for i in range(m)]

    if k == 1:
        alpha, beta = first[0], b[0]  # alpha != 0: the zero row case ran above
        x = beta / alpha
        if _ord(x, p) < 0:
            return "y", [1 / alpha if i == 0 else Fraction(0) for i in range(m)]
        bad = next((i for i in range(m) if a[i][0] * x != b[i]), None)
        if bad is None:
            return "x", [x]
        r = alpha * (a[bad][0] * x - b[bad])
        ell = 1 + max(0, -_ord(r, p))
        scale = Fraction(p) ** (-ell)
        y = [Fraction(0)] * m
        y[0] = scale * a[bad][0]
        y[bad] = -scale * alpha
        return "y", y

    # k >= 2, some nonzero entry in the first row: put the entry of minimal
    # order first, clear the rest of the row with integral column operations
    j = min(
        (i for i in range(k) if first[i] != 0),
        key=lambda i: _ord(first[i], p),
    )
    cols = list(range(k))
    cols[0], cols[j] = cols[j], cols[0]
    a1 = [[row[c] for c in cols] for row in a]
    alpha = a1[0][0]
    mults = [a1[0][c] / alpha for c in range(1, k)]  # in Z_p by pivot choice
    a2 = [
        [row[0]] + [row[c] - mults[c - 1] * row[0] for c in range(1, k)]
        for row in a1
    ]
    beta = b[0]
    x1 = beta / alpha
    if _ord(x1, p) < 0:
        return "y", [1 / alpha if i == 0 else Fraction(0) for i in range(m)]
    sub_a = [row[1:] for row in a2[1:]]
    sub_b = [b[i] - x1 * a2[i][0] for i in range(1, m)]
    tag, vec = _farkas(sub_a, sub_b, p)
    if tag == "x":
        x2 = [x1] + vec
        # undo the column operations: x = C x2 with C = swap then shears
        x_sheared = [x2[0] - sum(mults[c - 1] * x2[c] for c in range(1, k))] + x2[1:]
        out = [Fraction(0)] * k
        for pos, c in enumerate(cols):
            out[c] = x_sheared[pos]
        return "x", out
    ya = vec
    lead = -sum(ya[i - 1] * a2[i][0] for i in range(1, m)) / alpha
    return "y", [lead] + ya
    # y^T A = y^T A2 C^{-1} stays integral because C and C^{-1} are integral


def farkas_certificate(a: Mat, b: Vec) -> FarkasCertificate:
    """One and only one of: an integral x with Ax = b, or y with y^T A
    integral and y^T b non-integral.  Inputs must be exact."""
    if not a.is_exact() or not all(e.is_exact for e in b):
        raise ValueError("the dichotomy needs exact (rational-backed) inputs")
    m, k = a.shape
    if len(b) != m:
        raise ValueError("dimension mismatch")
    ctx = a.ctx
    rows = [[e.frac for e in r] for r in a.rows]
    tag, vec = _farkas(rows, [e.frac for e in b], ctx.p)
    cert = FarkasCertificate(
        "solution" if tag == "x" else "separating", Vec(ctx, vec)
    )
    ok, why = verify_farkas(a, b, cert)
    if not ok:  # pragma: no cover
        raise AssertionError(f"internal error: certificate fails its contract: {why}")
    return cert


def verify_farkas(a: Mat, b: Vec, cert: FarkasCertificate):
    """Independent validity check of either certificate branch."""
    if cert.is_solution:
        x = cert.vector
        if not all(e.val_at_least(0) for e in x):
            return False, "solution is not integral"
        if (a @ x) != b:
            return False, "Ax != b"
        return True, ""
    y = cert.vector
    ya = a.T @ y
    if not all(e.val_at_least(0) for e in ya):
        return False, "y^T A is not integral"
    yb = y.dot(b)
    if yb.is_zero() or yb.val >= 0:
        return False, "y^T b is integral"
    return True, ""


# ---------------------------------------------------------------------------
# containment, inner balls, width


def ellipsoid_containment(e1: Ellipsoid, e2: Ellipsoid) -> bool:
    """E1 inside E2 iff center(E1) in E2 and A2*A1^{-1} is integral."""
    if e1.dim != e2.dim:
        raise ValueError("dimension mismatch")
    if not shape_contains(e2, e1.center):
        return False
    c = e2.matrix @ e1.matrix.inv()
    return c.is_integral()


def inner_symplectic_ball(e: Ellipsoid):
    """(S, center) with S symplectic and {||S(v-center)|| <= 1} inside E,
    when A*Omega0*A^T is integral; None otherwise."""
    if e.dim % 2:
        raise ValueError("even dimension required")
    n = e.dim // 2
    a = e.matrix
    m = a @ omega0(n, a.ctx) @ a.T
    if not m.is_integral():
        return None
    c = antisymmetric_reduce(m)
    s = c.inv() @ a
    one = conformal_factor(s)
    if one is None or one != 1:  # pragma: no cover
        raise AssertionError("reduction produced a non-symplectic factor")
    ball = Ellipsoid(s, e.center)
    if not ellipsoid_containment(ball, e):  # pragma: no cover
        raise AssertionError("inner ball fails containment")
    return s, e.center


def ellipsoid_width(e: Ellipsoid) -> Fraction:
    """The largest power of p^2 dividing every entry of A*Omega0*A^T
    (extended to negative even powers by conformal scaling)."""
    if e.dim % 2:
        raise ValueError("even dimension required")
    n = e.dim // 2
    a = e.matrix
    m = a @ omega0(n, a.ctx) @ a.T
    v = m.min_val()
    if v is INF:  # pragma: no cover (defining matrix is invertible)
        raise SingularMatrixError("degenerate form")
    return Fraction(a.ctx.p) ** (2 * (v // 2))
