"""The explicit symplectomorphism squeezing all of (Q_p)^2n onto the unit
cylinder, by interleaving fractional digits.

The first two coordinates keep only their integer parts; their fractional
digits are woven into the third and fourth coordinates, the digits of the
first pair landing at odd fractional places and those of the second pair at
even ones.  The map is a bijection onto the cylinder, restricts to a
translation on every unit ball, and is exact digit surgery at any working
precision.
"""

from __future__ import annotations

from dataclasses import dataclass

from .context import PadicContext
from .ellipsoid import Ball
from .linalg import Vec
from .number import Qp


@dataclass(frozen=True)
class DigitSplit:
    """Trace of one squeeze: integer parts and fractional digit lists of the
    four transformed coordinates (digit lists indexed by fractional place)."""

    int_parts: tuple
    frac_digits: tuple  # four tuples of (place, digit), place >= 1


def _weave(anchor: Qp, odd_src: Qp, even_src: Qp) -> Qp:
    """anchor's integer part plus odd_src's fractional digit i at place 2i-1
    and even_src's at place 2i."""
    out = anchor.int_part()
    p = anchor.ctx.p
    for o, dgt in odd_src.digits_in_range(odd_src.val if odd_src.val < 0 else 0, 0):
        out = out + Qp.exact(anchor.ctx, dgt) * Qp.exact(anchor.ctx, p) ** (2 * o + 1)
    for o, dgt in even_src.digits_in_range(even_src.val if even_src.val < 0 else 0, 0):
        out = out + Qp.exact(anchor.ctx, dgt) * Qp.exact(anchor.ctx, p) ** (2 * o)
    return out


def _unweave(ctx: PadicContext, woven: Qp):
    """Inverse of _weave: (integer part, odd-place value, even-place value)."""
    core = woven.int_part()
    odd = Qp.exact(ctx, 0)
    even = Qp.exact(ctx, 0)
    for o, dgt in woven.digits_in_range(min(woven.val, 0), 0):
        term = Qp.exact(ctx, dgt)
        if o % 2:  # odd fractional place -(2i-1) -> source place -i
            odd = odd + term * Qp.exact(ctx, ctx.p) ** ((o - 1) // 2)
        else:
            even = even + term * Qp.exact(ctx, ctx.p) ** (o // 2)
    return core, odd, even


def squeeze(m: Vec, trace: bool = False):
    """Map a point of (Q_p)^2n (n >= 2) into the unit cylinder."""
    if len(m) < 4 or len(m) % 2:
        raise ValueError("need an even dimension of at least 4")
    x1, y1, x2, y2 = m[0], m[1], m[2], m[3]
    out = [
        x1.int_part(),
        y1.int_part(),
        _weave(x2, x1, x2),
        _weave(y2, y1, y2),
        *m.entries[4:],
    ]
    result = Vec(m.ctx, out)
    if not trace:
        return result
    split = DigitSplit(
        tuple(c.int_part() for c in (x1, y1, x2, y2)),
        tuple(
            tuple((-o, d) for o, d in c.digits_in_range(min(c.val, -1), 0))
            for c in (x1, y1, x2, y2)
        ),
    )
    return result, split


def unsqueeze(m: Vec) -> Vec:
    """Two-sided inverse of squeeze on the unit cylinder."""
    if len(m) < 4 or len(m) % 2:
        raise ValueError("need an even dimension of at least 4")
    if not (m[0].val_at_least(0) and m[1].val_at_least(0)):
        raise ValueError("point is outside the unit cylinder")
    ctx = m.ctx
    c2, x1f, x2f = _unweave(ctx, m[2])
    d2, y1f, y2f = _unweave(ctx, m[3])
    return Vec(
        ctx,
        [m[0] + x1f, m[1] + y1f, c2 + x2f, d2 + y2f, *m.entries[4:]],
    )


def squeeze_ball_image(n: int, radius_exp: int) -> list[Ball]:
    """The image of the 2n-dim ball of radius p^radius_exp, as a product of
    balls (unchanged when the radius is at most 1)."""
    if n < 2:
        raise ValueError("need n >= 2")
    k = radius_exp
    if k <= 0:
        return [Ball(k, 2 * n)]
    return [Ball(0, 2), Ball(2 * k, 2), Ball(k, 2 * n - 4)]


def unsqueeze_ball_preimage(n: int, radius_exp: int) -> list[Ball]:
    """The preimage of the 2n-dim ball of radius p^radius_exp under squeeze."""
    if n < 2:
        raise ValueError("need n >= 2")
    r = radius_exp
    if r <= 0:
        return [Ball(r, 2 * n)]
    k, odd = divmod(r, 2)
    if odd:
        return [Ball(k + 1, 2), Ball(k, 2), Ball(r, 2 * n - 4)]
    return [Ball(k, 2), Ball(k, 2), Ball(r, 2 * n - 4)]


def product_contains(factors: list[Ball], v: Vec) -> bool:
    """Membership in a product of balls (factors listed in coordinate order)."""
    at = 0
    for ball in factors:
        if ball.dim == 0:
            continue
        part = Vec(v.ctx, v.entries[at : at + ball.dim])
        if not part.norm_at_most(ball.radius_exp):
            return False
        at += ball.dim
    if at != len(v):
        raise ValueError("product dimension mismatch")
    return True


def iterated_squeeze(m: Vec) -> Vec:
    """Apply the squeeze to successive coordinate windows, landing in
    Ball^(2n-2)(1) x (Q_p)^2."""
    if len(m) < 4 or len(m) % 2:
        raise ValueError("need an even dimension of at least 4")
    n = len(m) // 2
    cur = m
    for j in range(n - 1):
        window = Vec(m.ctx, cur.entries[2 * j : 2 * j + 4])
        mapped = squeeze(window)
        cur = Vec(m.ctx, cur.entries[: 2 * j] + mapped.entries + cur.entries[2 * j + 4 :])
    return cur
