"""Circle and torus actions, the rotation-invariant subgroup, and the
equivariant squeeze onto the cylinder via marker digits.

The embedding works on polar coordinates of the first two coordinate pairs.
Points already in the cylinder only get the low digits of the second radial
coordinate shifted down two places; the digit of order 1 stays 0.  All other
points are flagged with a 1 at order 1 and the low digits of both radial
coordinates are interleaved below it.  A base marker digit is written at the
first even order leaving a gap below the data (an even order keeps the
result a valid radial coordinate for every prime), and, when p = 1 mod 4,
two further marker digits encode the first pair's k-data so the map stays
injective.  Markers are decoded right to left; the gap layout guarantees
they never collide with data digits.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .analytic import padic_cos, padic_sin
from .context import INF, DomainError, NotInImageError, PadicContext, PrecisionError
from .ellipsoid import (
    Ball,
    Cylinder,
    Ellipsoid,
    FullSpace,
    PuncturedTorusSpace,
    ellipsoid_width,
)
from .linalg import Vec
from .number import Qp, ordp_fraction
from .polar import PolarCoords, from_polar, to_polar, unit_i

# ---------------------------------------------------------------------------
# circle and torus actions


def on_circle(g: tuple[Qp, Qp]) -> bool:
    a, b = g
    return (a * a + b * b - 1).is_zero()


def circle_act(g: tuple[Qp, Qp], pt: tuple[Qp, Qp]) -> tuple[Qp, Qp]:
    """(a,b) . (x,y) = (ax - by, bx + ay)."""
    if not on_circle(g):
        raise ValueError("group element is not on the circle")
    a, b = g
    x, y = pt
    return (a * x - b * y, b * x + a * y)


def torus_act(gs, m: Vec) -> Vec:
    """Componentwise rotation of each coordinate pair."""
    if 2 * len(gs) != len(m):
        raise ValueError("need one circle element per coordinate pair")
    out = []
    for i, g in enumerate(gs):
        out.extend(circle_act(g, (m[2 * i], m[2 * i + 1])))
    return Vec(m.ctx, out)


def angle_element(ctx: PadicContext, t: Qp) -> tuple[Qp, Qp]:
    """The circle element (cos t, sin t) for t in p^d Z_p."""
    if not t.val_at_least(ctx.d):
        raise DomainError(f"angles live in p^{ctx.d}Z_{ctx.p}")
    return padic_cos(t), padic_sin(t)


def gp_contains(g: tuple[Qp, Qp]) -> bool:
    """Membership in the largest circle subgroup preserving every ball:
    everything when p != 1 mod 4, else the ord(a + ib) = 0 subgroup."""
    if not on_circle(g):
        raise ValueError("group element is not on the circle")
    ctx = g[0].ctx
    if ctx.p % 4 != 1:
        return True
    a, b = g
    w = a + unit_i(ctx) * b
    if w.is_zero():
        raise PrecisionError("ord(a + ib) undecided at the working precision")
    return w.val == 0


# ---------------------------------------------------------------------------
# the embedding on polar data


@dataclass(frozen=True)
class EmbedTrace:
    """Digit-level record of one embedding: branch, the interleaved value,
    the marker digits placed (order, digit), and the k-bookkeeping."""

    branch: str  # "in-cylinder" | "marker"
    u: Qp | None
    markers: tuple
    k_before: tuple
    k_after: tuple


def _shift_low(z: Qp, delta: int) -> Qp:
    """Move all digits at orders <= 1 down by delta places (delta = 2)."""
    low = z.low_part(2)
    shifted = low * Qp.exact(z.ctx, Fraction(z.ctx.p) ** (-delta))
    return z.high_part(2) + shifted


def _unshift_low(z: Qp, delta: int) -> Qp:
    low = z.low_part(2 - delta)
    return z.high_part(2) + low * Qp.exact(z.ctx, Fraction(z.ctx.p) ** delta)


def _interleave(z1: Qp, z2: Qp) -> Qp:
    """D + p + the digits of z1, z2 at orders <= 1 woven into orders <= 0,
    z1's at even orders and z2's at odd ones."""
    ctx = z1.ctx
    p = ctx.p
    u = z2.high_part(2) + Qp.exact(ctx, p)
    for o, dgt in z1.digits_in_range(min(z1.val, -1) if not z1.is_zero() else 1, 2):
        u = u + Qp.exact(ctx, dgt * Fraction(p) ** (2 * o - 2))
    for o, dgt in z2.digits_in_range(min(z2.val, -1) if not z2.is_zero() else 1, 2):
        u = u + Qp.exact(ctx, dgt * Fraction(p) ** (2 * o - 3))
    return u


def _deinterleave(u: Qp):
    """Inverse of _interleave: (z1 low digits restored, z2 with high part)."""
    ctx = u.ctx
    p = ctx.p
    if u.digit(1) != 1:
        raise NotInImageError("interleave flag digit missing")
    z2 = u.high_part(2)
    z1 = Qp.exact(ctx, 0)
    for o, dgt in u.digits_in_range(min(u.val, 0), 1):
        if o % 2 == 0:
            z1 = z1 + Qp.exact(ctx, dgt * Fraction(p) ** ((o + 2) // 2))
        else:
            z2 = z2 + Qp.exact(ctx, dgt * Fraction(p) ** ((o + 3) // 2))
    return z1, z2


def _base_marker_order(u: Qp) -> int:
    """Largest even order strictly below (lowest nonzero digit order of u) - 1."""
    ell = u.val  # u always carries the flag digit, so it is nonzero
    cand = ell - 2
    return cand if cand % 2 == 0 else cand - 1


def _set_digit(z: Qp, order: int, dgt: int) -> Qp:
    if z.digit(order) != 0:
        raise AssertionError("marker slot already occupied")  # pragma: no cover
    return z + Qp.exact(z.ctx, dgt * Fraction(z.ctx.p) ** order)


def _k_marker(k) -> tuple[int, int]:
    """(digit, distance) encoding one k-value below the current lowest digit."""
    if k == INF:
        return 3, 1
    if k >= 0:
        return 1, k + 1
    return 2, -k


def _strip_k_marker(z: Qp):
    """Decode and remove the lowest marker digit; returns (k, stripped z)."""
    o = z.val
    dgt = z.digit(o)
    stripped = z - Qp.exact(z.ctx, dgt * Fraction(z.ctx.p) ** o)
    dist = stripped.val - o
    if dgt == 1:
        k = dist - 1
    elif dgt == 2:
        k = -dist
    elif dgt == 3:
        if dist != 1:
            raise NotInImageError("infinite-k marker must sit next to the data")
        k = INF
    else:
        raise NotInImageError(f"invalid marker digit {dgt}")
    return k, stripped


def in_cylinder(pc: PolarCoords) -> bool:
    return pc.kp >= 0 and pc.kpp >= 0


def _recomputed_ks(ctx: PadicContext, z: Qp):
    """k', k'' as forced by z when p != 1 mod 4."""
    if z.is_exact_zero():
        raise ValueError("z = 0 never occurs for these primes")
    v = z.val
    if ctx.p == 2:
        k = v // 2  # floor: odd order means k'' = k' + 1
        return k, v - k
    if v % 2:
        raise ValueError("radial coordinate of odd order is invalid here")
    return v // 2, v // 2


def embed_pair(pc1: PolarCoords, pc2: PolarCoords, carrier_polar: bool = True):
    """The equivariant squeeze on the polar data of two coordinate pairs.

    With carrier_polar=False the second tuple is treated as a plain cartesian
    carrier (its z is the coordinate itself and its k-data is ignored), which
    is the semitoric variant.
    """
    ctx = pc1.z.ctx
    p = ctx.p
    one_mod_4 = p % 4 == 1
    k_before = (pc1.kp, pc1.kpp, pc2.kp, pc2.kpp)

    if in_cylinder(pc1):
        z2p = _shift_low(pc2.z, 2)
        if carrier_polar and one_mod_4 and not pc2.z.is_exact_zero():
            delta = z2p.val - pc2.z.val
            k2p, k2pp = pc2.kp + delta, pc2.kpp
        elif carrier_polar and one_mod_4:
            k2p, k2pp = pc2.kp, pc2.kpp
        elif carrier_polar:
            k2p, k2pp = _recomputed_ks(ctx, z2p)
        else:
            k2p = k2pp = None
        out1 = PolarCoords(pc1.z, pc1.kp, pc1.kpp, pc1.ab, pc1.t)
        out2 = PolarCoords(z2p, k2p, k2pp, pc2.ab, pc2.t)
        trace = EmbedTrace(
            "in-cylinder", None, (), k_before, (out1.kp, out1.kpp, k2p, k2pp)
        )
        return out1, out2, trace

    z1p = pc1.z.high_part(2) + 1
    u = _interleave(pc1.z, pc2.z)
    markers = []
    base_digit = 2 if (carrier_polar and pc2.kp == INF) else 1
    pos = _base_marker_order(u)
    z2p = _set_digit(u, pos, base_digit)
    markers.append((pos, base_digit))
    if one_mod_4:
        for k in (pc1.kp, pc1.kpp):
            dgt, dist = _k_marker(k)
            pos -= dist
            z2p = _set_digit(z2p, pos, dgt)
            markers.append((pos, dgt))
    if carrier_polar:
        if one_mod_4:
            if pc2.kp == INF:
                k2p, k2pp = z2p.val - pc2.kpp, pc2.kpp
            else:
                k2p, k2pp = pc2.kp, z2p.val - pc2.kp
        else:
            k2p, k2pp = _recomputed_ks(ctx, z2p)
    else:
        k2p = k2pp = None
    out1 = PolarCoords(z1p, 0, 0, pc1.ab, pc1.t)
    out2 = PolarCoords(z2p, k2p, k2pp, pc2.ab, pc2.t)
    trace = EmbedTrace("marker", u, tuple(markers), k_before, (0, 0, k2p, k2pp))
    return out1, out2, trace


def unembed_pair(pc1: PolarCoords, pc2: PolarCoords, carrier_polar: bool = True):
    """Exact inverse of embed_pair on its image."""
    ctx = pc1.z.ctx
    p = ctx.p
    one_mod_4 = p % 4 == 1
    z2p = pc2.z
    flag = 0 if z2p.is_exact_zero() else z2p.digit(1)

    if flag == 0:
        if z2p.digit(0) != 0:
            raise NotInImageError("cylinder-branch image has a zero digit at order 0")
        z2 = _unshift_low(z2p, 2)
        if carrier_polar and one_mod_4 and not z2.is_exact_zero():
            delta = z2p.val - z2.val
            k2p, k2pp = pc2.kp - delta, pc2.kpp
        elif carrier_polar and one_mod_4:
            k2p, k2pp = pc2.kp, pc2.kpp
        elif carrier_polar:
            k2p, k2pp = _recomputed_ks(ctx, z2)
        else:
            k2p = k2pp = None
        if not in_cylinder(pc1):
            raise NotInImageError("first pair outside the cylinder on a 0 flag")
        out1 = pc1
        out2 = PolarCoords(z2, k2p, k2pp, pc2.ab, pc2.t)
        return out1, out2
    if flag != 1:
        raise NotInImageError(f"flag digit at order 1 must be 0 or 1, got {flag}")

    if pc1.z.is_exact_zero() or pc1.z.val != 0 or pc1.z.digit(0) != 1 or pc1.z.digit(1) != 0:
        raise NotInImageError("marker-branch first coordinate must be 1 + O(p^2)")
    if pc1.kp != 0 or pc1.kpp != 0:
        raise NotInImageError("marker-branch first pair must have k-data 0")
    work = z2p
    if one_mod_4:
        k1pp, work = _strip_k_marker(work)
        k1p, work = _strip_k_marker(work)
    base_order = work.val
    base_digit = work.digit(base_order)
    if base_digit not in (1, 2) or base_order % 2:
        raise NotInImageError("malformed base marker")
    u = work - Qp.exact(ctx, base_digit * Fraction(p) ** base_order)
    if base_order != _base_marker_order(u):
        raise NotInImageError("base marker is not at its canonical position")
    z1_low, z2 = _deinterleave(u)
    z1 = (pc1.z - 1) + z1_low
    if not one_mod_4:
        if z1.is_exact_zero():
            raise NotInImageError("z must stay nonzero for these primes")
        k1p, k1pp = _recomputed_ks(ctx, z1)
    if carrier_polar:
        if base_digit == 2:
            if not one_mod_4 or not z2.is_exact_zero():
                raise NotInImageError("infinite-k base marker needs a zero coordinate")
            k2p, k2pp = INF, pc2.kpp
        elif one_mod_4:
            k2p = pc2.kp
            k2pp = (z2.val if not z2.is_exact_zero() else INF) - k2p
        else:
            k2p, k2pp = _recomputed_ks(ctx, z2)
    else:
        if base_digit != 1:
            raise NotInImageError("cartesian carrier images use base digit 1")
        k2p = k2pp = None
    out1 = PolarCoords(z1, k1p, k1pp, pc1.ab, pc1.t)
    out2 = PolarCoords(z2, k2p, k2pp, pc2.ab, pc2.t)
    return out1, out2


# ---------------------------------------------------------------------------
# point-level maps


def _pair_polar(m: Vec, i: int) -> PolarCoords:
    return to_polar(m[2 * i], m[2 * i + 1])


def class_key(m: Vec):
    """Discrete data shared by an equivalence class: the digits of each
    radial coordinate at orders <= 1, the first pair's k-data and the
    infinity pattern of the second pair's."""
    if len(m) < 4 or len(m) % 2:
        raise ValueError("need an even dimension of at least 4")
    pc1, pc2 = _pair_polar(m, 0), _pair_polar(m, 1)
    low = lambda z: tuple(z.digits_in_range(min(z.val, 0) if not z.is_zero() else 1, 2))
    return (
        low(pc1.z),
        low(pc2.z),
        pc1.kp,
        pc1.kpp,
        pc2.kp == INF,
        pc2.kpp == INF,
    )


def _output_depth(pc: PolarCoords) -> int:
    """Extra digits the continuous coordinates need for a faithful
    reconstruction at this valuation depth."""
    ks = [k for k in (pc.kp, pc.kpp) if k != INF]
    return max(0, -min(ks)) if ks else 0


def equivariant_embed(m: Vec, trace: bool = False):
    """Point-level equivariant squeeze: polar transform on the first two
    coordinate pairs, identity on the rest.  Requires every pair nonzero."""
    if len(m) < 4 or len(m) % 2:
        raise ValueError("need an even dimension of at least 4")
    ctx = m.ctx
    for i in range(len(m) // 2):
        if m[2 * i].is_exact_zero() and m[2 * i + 1].is_exact_zero():
            raise ValueError("points must avoid the zero coordinate pairs")
    pc1, pc2 = _pair_polar(m, 0), _pair_polar(m, 1)
    o1, o2, tr = embed_pair(pc1, pc2)
    depth = _output_depth(o2)
    if depth:
        # the image sits deeper than the input: redo the angle extraction
        # with enough working digits that the image keeps full precision
        pc2 = to_polar(m[2], m[3], prec=ctx.precision + depth + 8)
        o1, o2, tr = embed_pair(pc1, pc2)
    x1, y1 = from_polar(ctx, o1)
    x2, y2 = from_polar(ctx, o2)
    out = Vec(ctx, [x1, y1, x2, y2, *m.entries[4:]])
    return (out, tr) if trace else out


def equivariant_inverse(m: Vec) -> Vec:
    if len(m) < 4 or len(m) % 2:
        raise ValueError("need an even dimension of at least 4")
    ctx = m.ctx
    pc1, pc2 = _pair_polar(m, 0), _pair_polar(m, 1)
    o1, o2 = unembed_pair(pc1, pc2)
    d1, d2 = _output_depth(o1), _output_depth(o2)
    if d1 and m[0].is_exact and m[1].is_exact:
        pc1 = to_polar(m[0], m[1], prec=ctx.precision + d1 + 8)
    if d2 and m[2].is_exact and m[3].is_exact:
        pc2 = to_polar(m[2], m[3], prec=ctx.precision + d2 + 8)
    if (d1 or d2):
        o1, o2 = unembed_pair(pc1, pc2)
    x1, y1 = from_polar(ctx, o1)
    x2, y2 = from_polar(ctx, o2)
    return Vec(ctx, [x1, y1, x2, y2, *m.entries[4:]])


def _cartesian_carrier(x: Qp) -> PolarCoords:
    """Wrap a plain coordinate so the digit machinery can carry it."""
    ab = (0, 1) if x.ctx.p == 2 else (1, 0)
    return PolarCoords(x, None, None, ab, Qp.exact(x.ctx, 0))


def semitoric_embed(m: Vec, s: int, inverse: bool = False) -> Vec:
    """The semitoric squeeze: polar data on the first pair, the third
    coordinate as a cartesian digit carrier, everything else unchanged.
    Fixed points of the rotation (first pair zero) keep their first pair."""
    if len(m) < 4 or len(m) % 2:
        raise ValueError("need an even dimension of at least 4")
    n = len(m) // 2
    if not 1 <= s <= n - 1:
        raise ValueError(f"the torus rank must be in 1..{n - 1}")
    ctx = m.ctx
    x1, y1, x2 = m[0], m[1], m[2]
    zero_pair = x1.is_exact_zero() and y1.is_exact_zero()
    if not zero_pair and x1.is_zero() and y1.is_zero():
        raise PrecisionError("first pair indistinguishable from (0,0)")
    carrier = _cartesian_carrier(x2)
    if zero_pair:
        # always the cylinder branch: only the carrier digits move
        z2 = _shift_low(x2, 2) if not inverse else _unshift_low(x2, 2)
        if inverse and (x2.digit(1) != 0 or x2.digit(0) != 0):
            raise NotInImageError("carrier has nonzero flag digits at a fixed point")
        return Vec(ctx, [x1, y1, z2, *m.entries[3:]])
    pc1 = to_polar(x1, y1)
    if not inverse:
        o1, o2, _ = embed_pair(pc1, carrier, carrier_polar=False)
    else:
        o1, o2 = unembed_pair(pc1, carrier, carrier_polar=False)
    nx1, ny1 = from_polar(ctx, o1)
    return Vec(ctx, [nx1, ny1, o2.z, *m.entries[3:]])


# ---------------------------------------------------------------------------
# widths and existence predicates


@dataclass(frozen=True)
class WidthResult:
    value: object  # Fraction, 0, or INF
    note: str = ""


def gromov_width(shape, ctx: PadicContext, mode: str = "equivariant") -> WidthResult:
    """Rotation-equivariant Gromov width (or the linear symplectic width)
    of the supported shapes."""
    if mode not in ("equivariant", "linear"):
        raise ValueError("mode must be 'equivariant' or 'linear'")
    p = Fraction(ctx.p)
    if isinstance(shape, Ball):
        return WidthResult(p ** (2 * shape.radius_exp))
    if isinstance(shape, Cylinder):
        return WidthResult(p ** (2 * shape.radius_exp))
    if isinstance(shape, PuncturedTorusSpace):
        if mode == "equivariant":
            return WidthResult(Fraction(0))
        raise ValueError("the punctured space is supported in equivariant mode only")
    if isinstance(shape, FullSpace):
        note = "" if mode == "equivariant" or shape.dim == 2 else (
            "no unrestricted capacity exists in dimension >= 4; "
            "this is the supremum of embedded ball widths"
        )
        return WidthResult(INF, note)
    if isinstance(shape, Ellipsoid):
        if mode == "linear":
            return WidthResult(ellipsoid_width(shape))
        coeffs = _diagonal_pair_coefficients(shape)
        worst = min(ordp_fraction(c, ctx.p) for c in coeffs)
        return WidthResult(p ** (2 * worst))
    raise TypeError(f"unsupported shape {shape!r}")


def _diagonal_pair_coefficients(e: Ellipsoid) -> list[Fraction]:
    """Coefficients (a_1, ..., a_n) of a diagonal defining matrix with equal
    entries on each coordinate pair; rejects anything else."""
    mtx = e.matrix
    m, _ = mtx.shape
    if m % 2:
        raise ValueError("even dimension required")
    out = []
    for i in range(m):
        for j in range(m):
            if i != j and not mtx[i, j].is_exact_zero():
                raise ValueError("equivariant width needs a diagonal defining matrix")
    for i in range(0, m, 2):
        a, b = mtx[i, i], mtx[i + 1, i + 1]
        if not a.is_exact or not a.exactly_equals(b):
            raise ValueError("diagonal entries must agree on each pair")
        out.append(a.frac)
    return out


def equivariant_embedding_exists(r, R, p: int) -> bool:
    """Existence of an equivariant squeeze of the radius-r ball into the
    radius-R cylinder: true iff r <= R (radii must be powers of p)."""
    from .squeezing import _power_exp

    return _power_exp(r, p) <= _power_exp(R, p)
