"""p-adic polar coordinates on the punctured plane.

A nonzero point (x, y) gets six coordinates (z, k', k'', a, b, t):

* z = x^2 + y^2;
* k', k'' are the orders of x + iy and x - iy when p = 1 mod 4, and are
  determined by z otherwise;
* (a, b) is a residue pair of norm one, locating the leading digits of the
  point relative to a canonical representative of its residue class;
* t is an angle in p^d Z_p rotating the canonical reference point onto the
  actual point.

Only z and t are continuous coordinates; the other four are discrete.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .analytic import (
    _i0,
    angle_from_sin,
    padic_cos,
    padic_sin,
    sqrt_minus_one,
    sqrt_with_leading_digit,
)
from .context import INF, DomainError, PadicContext, PrecisionError
from .number import Qp

# ---------------------------------------------------------------------------
# residue classes of a^2 + b^2

_D2 = {
    1: ((0, 1), (0, 3), (1, 0), (3, 0)),
    2: ((1, 1), (1, 3), (3, 1), (3, 3)),
    5: ((2, 1), (2, 3), (1, 2), (3, 2)),
}


def dp_modulus(p: int) -> int:
    return 4 if p == 2 else p


@lru_cache(maxsize=None)
def dp_class(p: int, c) -> tuple[tuple[int, int], ...]:
    """The residue pairs with a^2 + b^2 = c; c is "+0"/"-0" for the two
    null classes available when p = 1 mod 4."""
    if p == 2:
        if c not in _D2:
            raise ValueError(f"valid classes for p=2 are 1, 2, 5; got {c}")
        return _D2[c]
    if c in ("+0", "-0"):
        if p % 4 != 1:
            raise ValueError("null classes exist only for p = 1 mod 4")
        i0 = _i0(p)
        if c == "-0":
            i0 = p - i0
        return tuple(sorted((a, a * i0 % p) for a in range(1, p)))
    c = int(c)
    if not 1 <= c < p:
        raise ValueError(f"class label must be a nonzero residue mod {p}")
    return tuple(
        sorted(
            (a, b)
            for a in range(p)
            for b in range(p)
            if (a * a + b * b) % p == c
        )
    )


def dp_mul(p: int, u: tuple[int, int], v: tuple[int, int]) -> tuple[int, int]:
    m = dp_modulus(p)
    a, b = u
    c, d = v
    return ((a * c - b * d) % m, (a * d + b * c) % m)


def dp_canonical(p: int, c) -> tuple[int, int]:
    """Lexicographically least element of the class."""
    return min(dp_class(p, c))


def dp_class_of(p: int, pair: tuple[int, int]):
    """The class label of a residue pair ("+0"/"-0" for the null classes)."""
    a, b = pair
    if p == 2:
        c = (a * a + b * b) % 8
        if c not in _D2 or pair not in _D2[c]:
            raise ValueError(f"{pair} is not a valid residue pair for p=2")
        return c
    c = (a * a + b * b) % p
    if c:
        return c
    if p % 4 != 1 or a % p == 0:
        raise ValueError(f"{pair} is not in any residue class mod {p}")
    return "+0" if b % p == a * _i0(p) % p else "-0"


def dp_solve(p: int, base: tuple[int, int], target: tuple[int, int]) -> tuple[int, int]:
    """The unique norm-one pair g with base * g = target (both in one class)."""
    if p == 2:
        for g in _D2[1]:
            if dp_mul(2, base, g) == target:
                return g
        raise ValueError(f"{target} not reachable from {base}")
    a, b = base
    c = (a * a + b * b) % p
    if c:
        cinv = pow(c, -1, p)
        inv = (a * cinv % p, (p - b) * cinv % p)
        g = dp_mul(p, inv, target)
    else:
        # null classes: base and target are s*(1, +-i0); g scales s
        i0 = _i0(p)
        s = target[0] * pow(a, -1, p) % p
        # g = (a', b') with a' - i0 b' = s (for +0) or a' + i0 b' = s (for -0)
        sinv = pow(s, -1, p)
        a1 = (s + sinv) * pow(2, -1, p) % p
        b1 = (s - sinv) * pow(2, -1, p) * i0 % p
        g = (a1, b1) if b % p == a * i0 % p else (a1, (p - b1) % p)
    if dp_mul(p, base, g) != target or dp_class_of(p, g) != (1 if p != 2 else 1):
        raise ValueError(f"{target} not reachable from {base}")  # pragma: no cover
    return g


# ---------------------------------------------------------------------------
# the coordinates


@dataclass(frozen=True)
class PolarCoords:
    """(z, k', k'', a, b, t) with the validity constraints of the punctured
    plane; kp/kpp may be INF (never both)."""

    z: Qp
    kp: object  # int | INF
    kpp: object
    ab: tuple[int, int]
    t: Qp

    def validate(self):
        ctx = self.z.ctx
        p = ctx.p
        if self.kp == INF and self.kpp == INF:
            raise ValueError("k' and k'' cannot both be infinite")
        ordz = self.kp + self.kpp
        if self.z.is_exact_zero():
            if ordz != INF:
                raise ValueError("z = 0 needs k' + k'' infinite")
        else:
            if self.z.is_zero() or self.z.val != ordz:
                raise ValueError(f"k' + k'' = {ordz} must equal ord(z)")
        if p % 4 == 3 and self.kp != self.kpp:
            raise ValueError("k'' = k' is forced for p = 3 mod 4")
        if p == 2:
            if self.kpp not in (self.kp, self.kp + 1):
                raise ValueError("k'' must be k' or k'+1 for p = 2")
            if not self.z.is_exact_zero():
                v = self.z.val
                if self.z.digit(v) != 1 or self.z.digit(v + 1) != 0:
                    raise ValueError("z must end in 01 for p = 2")
        if dp_class_of(p, self.ab) != 1:
            raise ValueError("(a, b) must be a norm-one residue pair")
        if not self.t.val_at_least(ctx.d):
            raise DomainError(f"t must lie in p^{ctx.d}Z_{p}")
        return self


def unit_i(ctx: PadicContext, prec=None) -> Qp:
    """The fixed square root of -1 (leading digit the smaller residue root)."""
    return sqrt_minus_one(ctx, prec=prec)


def leading_data(x: Qp, y: Qp):
    """(k, x0, y0, z0, z): minimal order, leading digit data and the class
    digit of z = x^2 + y^2.  Digit pairs/triples are packed for p = 2."""
    ctx = x.ctx
    p = ctx.p
    if x.is_exact_zero() and y.is_exact_zero():
        raise ValueError("the origin has no polar data")
    if x.is_zero() and y.is_zero():
        raise PrecisionError("point indistinguishable from the origin")
    k = min(v for v in (x.val, y.val) if v is not INF)
    z = x * x + y * y
    if z.is_zero() and not z.is_exact_zero():
        raise PrecisionError("x^2 + y^2 vanishes at the working precision")
    if p == 2:
        x0 = x.digit(k) + 2 * x.digit(k + 1)
        y0 = y.digit(k) + 2 * y.digit(k + 1)
        z0 = z.digit(2 * k) + 2 * z.digit(2 * k + 1) + 4 * z.digit(2 * k + 2)
    else:
        x0, y0 = x.digit(k), y.digit(k)
        z0 = z.digit(2 * k)
    return k, x0, y0, z0, z


def reference_point(ctx: PadicContext, z: Qp, k: int, x0: int, y0: int, prec=None):
    """The unique (x', y') with x'^2 + y'^2 = z, leading digits (x0, y0) at
    order k, and the pinning rule: the coordinate whose digit cannot anchor a
    square root is fixed to digit * p^k exactly, the other is the root with
    the prescribed leading digit."""
    p = ctx.p
    pin_x = (x0 == 0) or (p == 2 and x0 % 2 == 0)
    pk = Qp.exact(ctx, p) ** k
    if pin_x:
        xr = Qp.exact(ctx, x0) * pk
        rest = z - xr * xr
        yr = sqrt_with_leading_digit(rest, y0, prec=prec)
        if yr.val != k:
            raise ValueError("inconsistent leading data")  # pragma: no cover
    else:
        yr = Qp.exact(ctx, y0) * pk
        rest = z - yr * yr
        xr = sqrt_with_leading_digit(rest, x0, prec=prec)
        if xr.val != k:
            raise ValueError("inconsistent leading data")  # pragma: no cover
    return xr, yr


def rotation_angle(x: Qp, y: Qp, xr: Qp, yr: Qp, z: Qp, prec=None) -> Qp:
    """The unique t in p^d Z_p rotating (xr, yr) onto (x, y)."""
    ctx = x.ctx
    if not z.is_zero():
        cos_t = (x * xr + y * yr) / z
        sin_t = (y * xr - x * yr) / z
    else:
        # on the null cone the rotation acts as scalar multiplication
        lam = x / xr if not xr.is_zero() else y / yr
        inv = 1 / lam
        cos_t = (lam + inv) / 2
        sin_t = (lam - inv) / 2
        ii = unit_i(ctx, prec=prec)
        # lam = cos t -+ i sin t depending on the branch y = +-i x
        sin_t = sin_t / (-ii) if (y - ii * x).is_zero() else sin_t / ii
    if not (cos_t - 1).val_at_least(ctx.d) or not sin_t.val_at_least(ctx.d):
        raise DomainError("points are not in the same p^d Z_p rotation orbit")
    t = angle_from_sin(sin_t, prec=prec)
    if padic_cos(t, prec=prec) != cos_t:
        raise DomainError("rotation consistency check failed")
    return t


# ---------------------------------------------------------------------------
# torsion lifts: the finite-order circle elements realizing each residue pair
#
# The angle coordinate must be anchored so that every circle element acts on
# (a, b, t) by constants that do not depend on the point; this forces the
# references of the non-canonical classes to be *finite-order* rotations of
# the canonical one.  The unique finite-order lift of a residue pair is the
# limit of repeated p^2-th powers of any lift.

_TORSION_2 = {(1, 0): (1, 0), (3, 0): (-1, 0), (0, 1): (0, 1), (0, 3): (0, -1)}


def _circle_mul(u, v):
    a, b = u
    c, d = v
    return (a * c - b * d, a * d + b * c)


def _circle_pow(g, e: int):
    out = (Qp.exact(g[0].ctx, 1), Qp.exact(g[0].ctx, 0))
    base = g
    while e:
        if e & 1:
            out = _circle_mul(out, base)
        e >>= 1
        if e:
            base = _circle_mul(base, base)
    return out


@lru_cache(maxsize=None)
def _torsion_lift_cached(p: int, ab: tuple[int, int], prec: int):
    ctx = PadicContext(p, prec)
    if p == 2:
        a, b = _TORSION_2[ab]
        return (Qp.exact(ctx, a), Qp.exact(ctx, b))
    a0, b0 = ab
    if b0 % p == 0:
        lift = (Qp.exact(ctx, 1 if a0 % p == 1 else -1), Qp.exact(ctx, 0))
        return lift
    a = Qp.exact(ctx, a0)
    b = sqrt_with_leading_digit(Qp.exact(ctx, 1) - a * a, b0, prec=prec)
    g = (a, b)
    for _ in range(prec + 2):
        nxt = _circle_pow(g, p * p)
        if nxt[0] == g[0] and nxt[1] == g[1]:
            break
        g = nxt
    return g


def torsion_lift(ctx: PadicContext, ab: tuple[int, int], prec=None):
    """The finite-order circle element with the given residue pair."""
    return _torsion_lift_cached(ctx.p, ab, prec or ctx.precision)


@lru_cache(maxsize=None)
def _teichmuller_cached(p: int, alpha: int, prec: int) -> Qp:
    """The (p-1)-st root of unity in Z_p with residue alpha."""
    ctx = PadicContext(p, prec)
    m = p**prec
    w = alpha % p
    for _ in range(prec.bit_length() + 2):
        w = pow(w, p, m)  # Frobenius iteration converges to the fixed point
    for _ in range(prec + 1):
        nxt = pow(w, p, m)
        if nxt == w:
            break
        w = nxt
    return Qp.windowed(ctx, 0, w, prec)


def _alpha_of(p: int, ab: tuple[int, int]) -> int:
    """a + i0*b mod p: the scalar avatar of a norm-one residue pair."""
    return (ab[0] + _i0(p) * ab[1]) % p


def _ab_of(p: int, alpha: int) -> tuple[int, int]:
    inv = pow(alpha, -1, p)
    half = pow(2, -1, p)
    a = (alpha + inv) * half % p
    b = (alpha - inv) * half * pow(_i0(p), -1, p) % p
    return (a, b)


def _alpha_base(p: int, z: Qp) -> int:
    """Residue normalizing the unit part of x + iy against the canonical
    class of z, so balanced points keep the classical (a, b) reading."""
    if z.is_exact_zero():
        return 1
    v = z.val
    if v % 2:
        return 1
    a0, b0 = dp_canonical(p, z.digit(v))
    return _alpha_of(p, (a0, b0))


def _exp_angle(ctx, e_val: Qp, e_inv: Qp, prec=None) -> Qp:
    """t with cos t + i sin t = e_val (and its inverse e_inv supplied)."""
    two = Qp.exact(ctx, 2)
    cos_t = (e_val + e_inv) / two
    sin_t = (e_val - e_inv) / (two * unit_i(ctx, prec=prec))
    if not (cos_t - 1).val_at_least(ctx.d) or not sin_t.val_at_least(ctx.d):
        raise DomainError("unit is not in the angle subgroup")
    t = angle_from_sin(sin_t, prec=prec)
    if padic_cos(t, prec=prec) != cos_t:
        raise DomainError("angle consistency check failed")
    return t


def _to_polar_split(x: Qp, y: Qp, prec=None) -> PolarCoords:
    """p = 1 mod 4: multiplicative decomposition of x + iy.

    x + iy = p^k' * T * e with T the Teichmuller part and e in the image of
    the angle subgroup; (a, b) is the residue pair of T relative to the
    canonical class of z and t the angle of e.  Every circle element then
    shifts (k', k'', a, b, t) by constants independent of the point.
    """
    ctx = x.ctx
    p = ctx.p
    ii = unit_i(ctx, prec=prec)
    plus, minus = x + ii * y, x - ii * y
    if (plus.is_zero() and not plus.is_exact_zero()) or (
        minus.is_zero() and not minus.is_exact_zero()
    ):
        raise PrecisionError("ord(x +- iy) exceeds the working precision")
    kp, kpp = plus.val, minus.val
    z = x * x + y * y
    work = ctx.precision if prec is None else prec
    pw = Qp.exact(ctx, p)
    if kp != INF:
        unit = plus * pw ** (-kp)
        inv_unit = (minus * pw**kp) / z if not z.is_exact_zero() else 1 / unit
    else:
        unit = (pw**kpp) / minus
        inv_unit = minus * pw ** (-kpp)
    alpha_full = unit.unit_int(1)
    teich = _teichmuller_cached(p, alpha_full, work)
    e_val = unit / teich
    e_inv = inv_unit * teich
    t = _exp_angle(ctx, e_val, e_inv, prec=prec)
    alpha = alpha_full * pow(_alpha_base(p, z), -1, p) % p
    return PolarCoords(z, kp, kpp, _ab_of(p, alpha), t).validate()


def _from_polar_split(ctx: PadicContext, pc: PolarCoords):
    """Inverse of _to_polar_split."""
    p = ctx.p
    work = ctx.precision + max(0, -min(k for k in (pc.kp, pc.kpp) if k != INF))
    ii = unit_i(ctx, prec=work)
    alpha_full = _alpha_of(p, pc.ab) * _alpha_base(p, pc.z) % p
    teich = _teichmuller_cached(p, alpha_full, work)
    e_val = padic_cos(pc.t, prec=work) + ii * padic_sin(pc.t, prec=work)
    unit = teich * e_val
    pw = Qp.exact(ctx, p)
    if pc.kp != INF:
        plus = unit * pw**pc.kp
        minus = pc.z / plus if not pc.z.is_exact_zero() else Qp.exact(ctx, 0)
    else:
        plus = Qp.exact(ctx, 0)
        minus = pw**pc.kpp / unit
    two = Qp.exact(ctx, 2)
    x = (plus + minus) / two
    y = (plus - minus) / (two * ii)
    return x, y


def to_polar(x: Qp, y: Qp, prec=None) -> PolarCoords:
    """Polar coordinates of a nonzero point.

    ``prec`` raises the working precision of the continuous outputs (useful
    for exact inputs whose images will live at deep valuations)."""
    ctx = x.ctx
    p = ctx.p
    if p % 4 == 1:
        if x.is_exact_zero() and y.is_exact_zero():
            raise ValueError("the origin has no polar data")
        if x.is_zero() and y.is_zero():
            raise PrecisionError("point indistinguishable from the origin")
        return _to_polar_split(x, y, prec=prec)
    k, x0, y0, z0, z = leading_data(x, y)
    kp = k
    kpp = z.val - k
    base = dp_canonical(p, z0)
    ab = dp_solve(p, base, (x0, y0))
    sx, sy = _section_point(ctx, z, ab, prec=prec)
    t = rotation_angle(x, y, sx, sy, z, prec=prec)
    return PolarCoords(z, kp, kpp, ab, t).validate()


def _section_point(ctx: PadicContext, z: Qp, ab, prec=None):
    """The reference of the class (a, b): the canonical-class reference of z
    rotated by the finite-order lift of (a, b).  Keeping the lift finite-order
    makes the whole assignment commute with the circle action."""
    p = ctx.p
    k = z.val // 2  # for p = 2 the order may be odd; the class sits at 2k
    if p == 2:
        z0 = z.digit(2 * k) + 2 * z.digit(2 * k + 1) + 4 * z.digit(2 * k + 2)
    else:
        z0 = z.digit(2 * k)
    a0, b0 = dp_canonical(p, z0)
    xr, yr = reference_point(ctx, z, k, a0, b0, prec=prec)
    ta, tb = torsion_lift(ctx, ab, prec=prec)
    return (ta * xr - tb * yr, tb * xr + ta * yr)


def from_polar(ctx: PadicContext, pc: PolarCoords):
    """The unique point with the given polar coordinates."""
    pc.validate()
    if ctx.p % 4 == 1:
        return _from_polar_split(ctx, pc)
    k = min(pc.kp, pc.kpp)
    # deep valuations need extra working digits so the output keeps the
    # context's absolute precision
    target = ctx.precision + max(0, -k)
    sx, sy = _section_point(ctx, pc.z, pc.ab, prec=ctx.precision)
    cos_t = padic_cos(pc.t, prec=target)
    sin_t = padic_sin(pc.t, prec=target)
    x = cos_t * sx - sin_t * sy
    y = sin_t * sx + cos_t * sy
    return x, y
