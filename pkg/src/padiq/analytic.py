"""Square detection, Hensel square roots and the elementary p-adic series.

The exponential, cosine and sine series converge exactly on p^d Z_p (d = 2
for p = 2, else 1); everything here raises DomainError outside that set.
"""

from __future__ import annotations

from functools import lru_cache

from .context import (
    INF,
    DomainError,
    NotASquareError,
    PadicContext,
    PrecisionError,
)
from .number import Qp, ordp_int


def _quadratic_residues(p: int) -> frozenset[int]:
    return frozenset(a * a % p for a in range(1, p))


def is_square(x: Qp) -> bool:
    """Two-case criterion: even order plus square leading digit (p odd), or
    even order plus unit part ending in 001 (p = 2)."""
    p = x.ctx.p
    if x.is_exact_zero():
        raise ValueError("is_square is defined for nonzero values")
    if x.is_zero():
        raise PrecisionError(f"value indistinguishable from zero at O(p^{x.prec})")
    if x.val % 2 != 0:
        return False
    if p == 2:
        return x.unit_int(3) == 1
    return x.unit_int(1) in _quadratic_residues(p)


def sqrt_with_leading_digit(x: Qp, lead: int, prec=None) -> Qp:
    """The square root of x whose leading digit is ``lead`` (leading digit
    pair, read as a value in {1,3}, when p = 2).

    The two roots of a square have leading digits d and p-d (resp. 1 and 3
    mod 4), so ``lead`` pins down one of them.
    """
    ctx = x.ctx
    p = ctx.p
    if not is_square(x):
        raise NotASquareError(f"{x!r} is not a square in Q_{p}")
    m = x.val // 2
    loss = m + (1 if p == 2 else 0)
    if prec is None:
        prec = ctx.precision + max(m, 0)
    if not x.is_exact:
        prec = min(prec, x.prec - loss)
    n = prec - m  # unit digits to produce
    if n <= 0:
        raise PrecisionError("no digits of the root are determined")
    u = x.unit_int(n + (1 if p == 2 else 0))
    if p == 2:
        if lead not in (1, 3):
            raise ValueError("for p = 2 the leading pair must be 1 or 3")
        w = lead
        e = 3
        # each pass fixes the digit at 2^(e-1); (w + 2^(e-1))^2 flips bit e
        while e < n + 1:
            if (u - w * w) % (1 << (e + 1)):
                w += 1 << (e - 1)
            e += 1
        w %= 1 << n
    else:
        if not 1 <= lead < p:
            raise ValueError(f"leading digit must be in 1..{p - 1}")
        if lead * lead % p != u % p:
            raise NotASquareError(
                f"leading digit {lead} is not a root of the unit digit mod {p}"
            )
        w = lead
        pk = p
        target = p**n
        inv2 = pow(2 * lead, -1, p)
        while pk < target:
            c = (u - w * w) // pk % p
            w += c * inv2 % p * pk
            pk *= p
        w %= target
    root = Qp.windowed(ctx, m, w, prec)
    if not (root * root - x).is_zero():
        raise NotASquareError("Hensel lift failed to verify")  # pragma: no cover
    return root


@lru_cache(maxsize=None)
def _i0(p: int) -> int:
    """The smaller residue root of -1 mod p (p = 1 mod 4)."""
    for a in range(2, p):
        if a * a % p == p - 1:
            return min(a, p - a)
    raise AssertionError("unreachable for p = 1 mod 4")


def sqrt_minus_one(ctx: PadicContext, prec=None) -> Qp:
    """The square root of -1 whose leading digit is the smaller residue root."""
    if ctx.p % 4 != 1:
        raise DomainError(f"-1 is not a square in Q_{ctx.p}")
    return sqrt_with_leading_digit(Qp.exact(ctx, -1), _i0(ctx.p), prec=prec)


def _series_terms(p: int, d: int, target: int) -> int:
    """Index past which every term of exp/cos/sin has order >= target."""
    # ord(t^n/n!) >= n*d - (n-1)/(p-1); solve the bound for n
    n = 1
    while n * d - (n - 1) // (p - 1) < target:
        n += 1
    return n


def _eval_series(x: Qp, which: str, prec) -> Qp:
    ctx = x.ctx
    p, d = ctx.p, ctx.d
    if not x.val_at_least(d):
        raise DomainError(
            f"series domain is p^{d}Z_{p}; argument has order "
            f"{'>= ' + str(x.prec) if x.val is INF else x.val}"
        )
    K = ctx.precision if prec is None else prec
    if not x.is_exact:
        K = min(K, x.prec)
    if x.is_zero():
        base = 0 if which == "sin" else 1
        return Qp.exact(ctx, base).truncate(K)
    N = _series_terms(p, d, K)
    ev, uv = x.val, x.unit_int(max(K - x.val, 1))
    modulus = p**K
    # term_n = p^e * u, with the p-part of n! folded into e only
    e, u = 0, 1
    total = 1 if which != "sin" else 0
    for n in range(1, N + 1):
        e += ev
        u = u * uv % modulus
        vn = ordp_int(n, p)
        e -= vn
        nu = n // p**vn
        u = u * pow(nu, -1, modulus) % modulus
        if e >= K:
            continue
        if which == "exp":
            sgn = 1
        elif which == "cos":
            if n % 2:
                continue
            sgn = -1 if n % 4 == 2 else 1
        else:  # sin
            if n % 2 == 0:
                continue
            sgn = -1 if n % 4 == 3 else 1
        total += sgn * u * p**e
    return Qp.windowed(ctx, 0, total, K)


def padic_exp(x: Qp, prec=None) -> Qp:
    return _eval_series(x, "exp", prec)


def padic_cos(x: Qp, prec=None) -> Qp:
    return _eval_series(x, "cos", prec)


def padic_sin(x: Qp, prec=None) -> Qp:
    return _eval_series(x, "sin", prec)


def angle_from_sin(s: Qp, prec=None) -> Qp:
    """The unique t in p^d Z_p with sin(t) = s, by Newton iteration."""
    ctx = s.ctx
    d = ctx.d
    if not s.val_at_least(d):
        raise DomainError(f"sine values live in p^{d}Z_{ctx.p}")
    if prec is None:
        K = ctx.precision if s.is_exact else s.prec
    else:
        K = prec if s.is_exact else min(prec, s.prec)
    t = s.truncate(K)
    for _ in range(K.bit_length() + 3):
        err = padic_sin(t, prec=K) - s
        if err.is_zero():
            return t
        t = t - err / padic_cos(t, prec=K)
    raise AssertionError("Newton failed to converge")  # pragma: no cover
