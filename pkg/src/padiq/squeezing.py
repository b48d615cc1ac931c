"""Linear/affine squeezing theory: witness checks, the both-non-squeezing
classification and width-preserving matrix detection.

A matrix is squeezing iff some pair u, v with nonzero pairing loses at least
two orders of magnitude: ord(u^T A Omega0 A^T v) >= ord(u^T Omega0 v) + 2
(an exact zero on the left also counts).  When A Omega0 A^T is proportional
to Omega0 with factor of order in {-1, 0, 1}, both A and its inverse are
non-squeezing; outside the proportional case a witness always exists and is
constructed explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .context import INF, PadicContext, SingularMatrixError
from .linalg import Mat, Vec, conformal_factor, omega0, pairing
from .number import Qp, ordp_fraction


def squeezing_gap(a: Mat, u: Vec, v: Vec):
    """ord(u^T A Omega0 A^T v) - ord(u^T Omega0 v); INF when the numerator
    vanishes.  Raises ValueError when the pair has zero pairing."""
    n2 = a.shape[0]
    form = omega0(n2 // 2, a.ctx)
    denom = pairing(form, u, v)
    if denom.is_zero():
        raise ValueError("witness pairs must have nonzero pairing")
    numer = pairing(a @ form @ a.T, u, v)
    if numer.is_zero():
        return INF
    return numer.val - denom.val


def squeezing_witness_check(a: Mat, u: Vec, v: Vec) -> bool:
    return squeezing_gap(a, u, v) >= 2


@dataclass(frozen=True)
class BothNonSqueezing:
    c: Qp


@dataclass(frozen=True)
class NotBoth:
    witness: tuple[Vec, Vec] | None = None


def classify_nonsqueezing_pair(a: Mat):
    """BothNonSqueezing(c) iff A*Omega0*A^T = c*Omega0 with ord(c) in
    {-1, 0, 1}; NotBoth otherwise."""
    a.inv()  # raises on singular input
    c = conformal_factor(a)
    if c is not None and not c.is_zero() and c.val in (-1, 0, 1):
        return BothNonSqueezing(c)
    return NotBoth()


def is_width_preserving(a: Mat) -> bool:
    """True iff A^T*Omega0*A = c*Omega0 for a unit c (order 0); this is
    equivalent to the same relation with A and A^T exchanged."""
    c = conformal_factor(a)
    return c is not None and not c.is_zero() and c.val == 0


def _canonical_pairs(ctx, n2):
    basis = [Vec(ctx, [1 if k == i else 0 for k in range(n2)]) for i in range(n2)]
    for t in range(0, n2, 2):
        yield basis[t], basis[t + 1]


def _nonproportional_direction(m1: Mat, m0: Mat):
    """u with m1^T u not parallel to m0^T u, or None if proportional.

    Tries the canonical basis, then two-element sums; if all of those give
    parallel images the matrices are proportional.
    """
    ctx = m1.ctx
    n2 = m1.shape[0]
    basis = [Vec(ctx, [1 if k == i else 0 for k in range(n2)]) for i in range(n2)]
    candidates = list(basis) + [basis[i] + basis[j] for i, j in combinations(range(n2), 2)]
    t1, t0 = m1.T, m0.T
    for u in candidates:
        f1, f0 = t1 @ u, t0 @ u
        for i, j in combinations(range(n2), 2):
            if not (f1[i] * f0[j] - f1[j] * f0[i]).is_zero():
                return u, f1, f0
    return None


def find_squeezing_witness(a: Mat, depth: int = 3):
    """A witness pair for the squeezing inequality, or None.

    Search order: the canonical pairs (e_i, e_j) with pairing +-1; then, when
    A*Omega0*A^T is not proportional to Omega0, a directed construction that
    lands u^T A Omega0 A^T v exactly on zero; finally a bounded enumeration
    of residue pairs mod p^depth (reachable only for inexact inputs).
    None is returned in the certified proportional small-order case.
    """
    a.inv()  # raises on singular input
    ctx = a.ctx
    n2 = a.shape[0]
    form = omega0(n2 // 2, ctx)
    for u, v in _canonical_pairs(ctx, n2):
        if squeezing_gap(a, u, v) >= 2:
            return u, v
    m1 = a @ form @ a.T
    found = _nonproportional_direction(m1, form)
    if found is not None:
        u, f1, f0 = found
        # v in ker(f1) with f0(v) != 0: exact-zero numerator, infinite gap
        s = min((i for i in range(n2) if not f1[i].is_zero()), key=lambda i: f1[i].val)
        for r in range(n2):
            if r == s:
                continue
            v = Vec(ctx, [f1[s] if k == r else (-f1[r] if k == s else 0) for k in range(n2)])
            if not pairing(form, u, v).is_zero():
                assert squeezing_witness_check(a, u, v)
                return u, v
        raise AssertionError("kernel direction must pair nontrivially")  # pragma: no cover
    c = conformal_factor(a)
    if c is not None and not c.is_zero() and c.val in (-1, 0, 1):
        return None
    return _enumerate_witness(a, depth)


def _enumerate_witness(a: Mat, depth: int, cap: int = 200_000):
    """Deterministic sweep of primitive residue pairs mod p^depth (first found
    in lexicographic order); None when the budget is exhausted."""
    ctx = a.ctx
    n2 = a.shape[0]
    residues = range(ctx.p**depth)
    count = 0
    for uc in product(residues, repeat=n2):
        if all(r % ctx.p == 0 for r in uc):
            continue
        u = Vec(ctx, uc)
        for vc in product(residues, repeat=n2):
            if all(r % ctx.p == 0 for r in vc):
                continue
            count += 1
            if count > cap:
                return None
            v = Vec(ctx, vc)
            try:
                if squeezing_gap(a, u, v) >= 2:
                    return u, v
            except ValueError:
                continue
    return None


def affine_nonsqueezing_predicate(r, R, p: int) -> bool:
    """Existence of an affine symplectic embedding of the radius-r ball into
    the radius-R cylinder: true iff r <= R.  Radii must be powers of p."""
    return _power_exp(r, p) <= _power_exp(R, p)


def _power_exp(r, p: int) -> int:
    q = Fraction(r)
    if q <= 0:
        raise ValueError("radii are positive powers of p")
    e = ordp_fraction(q, p)
    if q != Fraction(p) ** e:
        raise ValueError(f"{r} is not a power of {p}")
    return e
