"""Exact p-adic scalars: valuation + digit window + tracked absolute precision.

A value is *exact* when it is backed by a rational number; exact values have
infinite absolute precision and every digit of them can be materialized on
demand.  Values coming out of square roots, series and other limits are
*windowed*: they carry finitely many correct digits and an absolute precision
K meaning "correct modulo p^K".  Arithmetic propagates precision
pessimistically, so a result never claims more digits than it has.
"""

from __future__ import annotations

from fractions import Fraction

from .context import INF, DomainError, PadicContext, PrecisionError

_DIGIT_CHARS = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ"


def ordp_int(n: int, p: int) -> int | float:
    """p-adic order of an integer (INF for 0)."""
    if n == 0:
        return INF
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def ordp_fraction(q: Fraction, p: int) -> int | float:
    if q == 0:
        return INF
    return ordp_int(q.numerator, p) - ordp_int(q.denominator, p)


class Qp:
    """An element of Q_p, immutable.

    Internals: ``frac`` is the exact rational backing or None; windowed
    values keep ``unit`` = the integer whose base-p digits are the digits at
    orders val, val+1, ..., prec-1.  Zero at precision K has val = INF and
    unit = 0.
    """

    __slots__ = ("ctx", "val", "unit", "prec", "frac")

    def __init__(self, ctx, val, unit, prec, frac):
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "val", val)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "frac", frac)

    def __setattr__(self, *a):
        raise AttributeError("Qp values are immutable")

    # ------------------------------------------------------------------
    # construction

    @staticmethod
    def exact(ctx: PadicContext, q) -> "Qp":
        q = Fraction(q)
        return Qp(ctx, ordp_fraction(q, ctx.p), None, INF, q)

    @staticmethod
    def from_rational(num: int, den: int, ctx: PadicContext) -> "Qp":
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        return Qp.exact(ctx, Fraction(num, den))

    @staticmethod
    def zero(ctx: PadicContext, prec=INF) -> "Qp":
        if prec is INF:
            return Qp.exact(ctx, 0)
        return Qp(ctx, INF, 0, prec, None)

    @staticmethod
    def windowed(ctx: PadicContext, val: int, unit: int, prec: int) -> "Qp":
        """Build a windowed value, normalizing the digit-window invariants."""
        if prec is INF:
            raise ValueError("windowed values need a finite precision")
        n = prec - val
        if n <= 0:
            return Qp(ctx, INF, 0, prec, None)
        unit %= ctx.p ** n
        if unit == 0:
            return Qp(ctx, INF, 0, prec, None)
        shift = ordp_int(unit, ctx.p)
        return Qp(ctx, val + shift, unit // ctx.p**shift, prec, None)

    @staticmethod
    def from_digits(ctx: PadicContext, digits, prec=INF) -> "Qp":
        """Value with the given (order, digit) pairs; exact when prec is INF."""
        q = Fraction(0)
        for o, dgt in digits:
            if not 0 <= dgt < ctx.p:
                raise ValueError(f"digit {dgt} out of range for p={ctx.p}")
            q += Fraction(dgt) * Fraction(ctx.p) ** o
        x = Qp.exact(ctx, q)
        return x if prec is INF else x.truncate(prec)

    # ------------------------------------------------------------------
    # basic queries

    @property
    def is_exact(self) -> bool:
        return self.frac is not None

    def is_zero(self) -> bool:
        """Zero at the available precision (exactly zero if exact)."""
        return self.val is INF

    def is_exact_zero(self) -> bool:
        return self.frac == 0 if self.is_exact else False

    def val_at_least(self, k) -> bool:
        """Decide val >= k, raising if the window is too short to tell."""
        if self.val is INF and not self.is_exact and self.prec < k:
            raise PrecisionError(
                f"cannot decide ord >= {k}: zero at precision O(p^{self.prec})"
            )
        return self.val >= k

    def abs_value(self) -> Fraction:
        """|x|_p as an exact rational; 0 for zero."""
        if self.val is INF:
            if not self.is_exact and self.prec <= 0:
                raise PrecisionError("absolute value undecided at this precision")
            return Fraction(0)
        return Fraction(self.ctx.p) ** (-self.val)

    def unit_int(self, n: int) -> int:
        """The first n digits of the unit part, packed as an integer."""
        if self.val is INF or n <= 0:
            return 0
        p = self.ctx.p
        if self.is_exact:
            num, den = self.frac.numerator, self.frac.denominator
            vn, vd = ordp_int(num, p), ordp_int(den, p)
            a, b = num // p**vn, den // p**vd
            m = p**n
            return a * pow(b, -1, m) % m
        if self.val + n > self.prec:
            raise PrecisionError(
                f"requested {n} unit digits, window ends at O(p^{self.prec})"
            )
        return self.unit % self.ctx.p**n

    def digit(self, order) -> int:
        """Base-p digit at the given order (0 below the valuation and on zero)."""
        if self.val is INF:
            if not self.is_exact and order >= self.prec:
                raise PrecisionError(f"digit at order {order} beyond O(p^{self.prec})")
            return 0
        if order < self.val:
            return 0
        if order >= self.prec:
            raise PrecisionError(f"digit at order {order} beyond O(p^{self.prec})")
        k = order - self.val
        return self.unit_int(k + 1) // self.ctx.p**k % self.ctx.p

    def digits_in_range(self, lo, hi) -> list[tuple[int, int]]:
        """Nonzero (order, digit) pairs with lo <= order < hi."""
        if self.val is INF:
            if not self.is_exact and hi > self.prec:
                raise PrecisionError("digit range extends beyond the window")
            return []
        if hi > self.prec:
            raise PrecisionError("digit range extends beyond the window")
        lo = max(lo, self.val)
        if hi <= lo:
            return []
        u = self.unit_int(hi - self.val) // self.ctx.p ** (lo - self.val)
        out = []
        o = lo
        while u:
            u, dgt = divmod(u, self.ctx.p)
            if dgt:
                out.append((o, dgt))
            o += 1
        return out

    def scaled_int(self, origin: int, hi: int) -> int:
        """Integer congruent to x / p^origin modulo p^(hi-origin); needs val >= origin."""
        if self.val is INF or self.val >= hi:
            return 0
        if self.val < origin:
            raise ValueError("value has digits below the requested origin")
        return self.unit_int(hi - self.val) * self.ctx.p ** (self.val - origin)

    # ------------------------------------------------------------------
    # digit surgery helpers (exact on exact inputs)

    def low_part(self, cut) -> "Qp":
        """The digits at orders < cut, as an exact value (a finite sum)."""
        if self.val is INF:
            if not self.is_exact and cut > self.prec:
                raise PrecisionError("low part extends beyond the window")
            return Qp.exact(self.ctx, 0)
        if self.val >= cut:
            return Qp.exact(self.ctx, 0)
        if cut > self.prec:
            raise PrecisionError("low part extends beyond the window")
        u = self.unit_int(cut - self.val)
        return Qp.exact(self.ctx, Fraction(u) * Fraction(self.ctx.p) ** self.val)

    def high_part(self, cut) -> "Qp":
        """The digits at orders >= cut (self minus the low part)."""
        return self - self.low_part(cut)

    def int_part(self) -> "Qp":
        return self.high_part(0)

    def frac_part(self) -> "Qp":
        return self.low_part(0)

    def truncate(self, prec: int) -> "Qp":
        """Forget digits at orders >= prec (turn into a windowed value)."""
        if self.prec is not INF and self.prec <= prec:
            return self
        if self.val is INF or self.val >= prec:
            return Qp(self.ctx, INF, 0, prec, None)
        return Qp.windowed(self.ctx, self.val, self.unit_int(prec - self.val), prec)

    # ------------------------------------------------------------------
    # field arithmetic

    def _coerce(self, other):
        if isinstance(other, Qp):
            if other.ctx.p != self.ctx.p:
                raise ValueError("mixed primes")
            return other
        if isinstance(other, (int, Fraction)):
            return Qp.exact(self.ctx, other)
        return None

    def __add__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        a = self
        if a.is_exact and b.is_exact:
            return Qp.exact(a.ctx, a.frac + b.frac)
        prec = min(a.prec, b.prec)
        if a.is_zero() and b.is_zero():
            return Qp.zero(a.ctx, prec)
        m = min(x.val for x in (a, b) if x.val is not INF)
        m = min(m, prec)
        total = a.scaled_int(m, prec) + b.scaled_int(m, prec)
        return Qp.windowed(a.ctx, m, total, prec)

    __radd__ = __add__

    def __neg__(self):
        if self.is_exact:
            return Qp.exact(self.ctx, -self.frac)
        if self.val is INF:
            return self
        n = self.prec - self.val
        return Qp(self.ctx, self.val, self.ctx.p**n - self.unit, self.prec, None)

    def __sub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return self + (-b)

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return b + (-self)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        a = self
        if a.is_exact and b.is_exact:
            return Qp.exact(a.ctx, a.frac * b.frac)
        if a.is_exact_zero() or b.is_exact_zero():
            return Qp.exact(a.ctx, 0)
        if a.is_zero() or b.is_zero():
            # ord(product) >= prec of the zero side + val of the other
            if a.is_zero() and b.is_zero():
                prec = a.prec + b.prec
            elif a.is_zero():
                prec = a.prec + b.val
            else:
                prec = b.prec + a.val
            return Qp.zero(a.ctx, prec)
        prec = min(a.prec + b.val, b.prec + a.val)
        val = a.val + b.val
        n = prec - val
        return Qp.windowed(a.ctx, val, a.unit_int(n) * b.unit_int(n), prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        a = self
        if b.is_exact_zero():
            raise ZeroDivisionError("division by zero")
        if b.is_zero():
            raise PrecisionError(
                f"divisor indistinguishable from zero at O(p^{b.prec})"
            )
        if a.is_exact and b.is_exact:
            return Qp.exact(a.ctx, a.frac / b.frac)
        if a.is_exact_zero():
            return a
        if a.is_zero():
            return Qp.zero(a.ctx, a.prec - b.val)
        prec = min(a.prec - b.val, b.prec + a.val - 2 * b.val)
        val = a.val - b.val
        n = prec - val
        if n <= 0:
            return Qp.zero(a.ctx, prec)
        m = a.ctx.p**n
        return Qp.windowed(a.ctx, val, a.unit_int(n) * pow(b.unit_int(n), -1, m), prec)

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return b / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return Qp.exact(self.ctx, 1) / self ** (-k)
        out = Qp.exact(self.ctx, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # ------------------------------------------------------------------
    # comparison

    def eq_prec(self) -> int | float:
        """The precision at which equality against this value is decided."""
        return self.prec

    def __eq__(self, other):
        b = self._coerce(other)
        if b is None:
            return NotImplemented
        return (self - b).is_zero()

    def __ne__(self, other):
        r = self.__eq__(other)
        return NotImplemented if r is NotImplemented else not r

    __hash__ = None

    def same_mod(self, other, k: int) -> bool:
        """Equality modulo p^k (k must be within both windows)."""
        d = self - self._coerce(other)
        if d.is_exact:
            return d.frac == 0 or d.val >= k
        if d.prec < k:
            raise PrecisionError(f"equality mod p^{k} undecidable at O(p^{d.prec})")
        return d.val >= k

    def exactly_equals(self, other) -> bool:
        b = self._coerce(other)
        if not (self.is_exact and b.is_exact):
            raise ValueError("exact equality is defined for exact values only")
        return self.frac == b.frac

    # ------------------------------------------------------------------
    # printing

    def _digit_string(self, lo, hi) -> str:
        chars = []
        for o in range(hi - 1, lo - 1, -1):
            if o == -1:
                chars.append(".")
            chars.append(_DIGIT_CHARS[self.digit(o)])
        return "".join(chars)

    def to_literal(self) -> str:
        """Literal using the digit grammar; exact values round-trip bit-exactly."""
        if self.is_exact:
            q = self.frac
            if q == 0:
                return "0"
            sign, q = ("-", -q) if q < 0 else ("", q)
            den = q.denominator
            v = ordp_int(den, self.ctx.p)
            if den == self.ctx.p**v:  # terminating expansion
                x = Qp.exact(self.ctx, q)
                u = (q * Fraction(self.ctx.p) ** (-x.val)).numerator
                hi = x.val
                while u:
                    u //= self.ctx.p
                    hi += 1
                return sign + x._digit_string(min(x.val, 0), max(hi, 1))
            return f"{sign}{q.numerator}/{den}"
        if self.val is INF:
            return f"0+O({self.ctx.p}^{self.prec})"
        s = self._digit_string(min(self.val, 0), max(self.prec, 1))
        return f"{s}+O({self.ctx.p}^{self.prec})"

    def __repr__(self):
        return f"Qp({self.to_literal()}, p={self.ctx.p})"


def parse_literal(text: str, ctx: PadicContext) -> Qp:
    """Parse the literal grammar: base-p digits with optional point, or num/den,
    optionally followed by +O(p^K)."""
    s = text.strip()
    prec = INF
    if "+O(" in s:
        s, tail = s.split("+O(", 1)
        tail = tail.strip()
        if not tail.endswith(")"):
            raise ValueError(f"malformed precision suffix in {text!r}")
        base, _, exp = tail[:-1].partition("^")
        if base.strip() not in ("p", str(ctx.p)):
            raise ValueError(f"precision suffix names a different prime in {text!r}")
        prec = int(exp) if exp else 1
        s = s.strip()
    neg = s.startswith("-")
    if neg:
        s = s[1:]
    if "/" in s:
        num, den = s.split("/", 1)
        x = Qp.from_rational(int(num), int(den), ctx)
    else:
        if s.count(".") > 1 or not s:
            raise ValueError(f"malformed p-adic literal {text!r}")
        whole, _, fracpart = s.partition(".")
        digits = []
        for k, ch in enumerate(reversed(whole)):
            digits.append((k, _DIGIT_CHARS.index(ch.upper())))
        for k, ch in enumerate(fracpart):
            digits.append((-k - 1, _DIGIT_CHARS.index(ch.upper())))
        if any(d >= ctx.p for _, d in digits):
            raise ValueError(f"digit out of range for p={ctx.p} in {text!r}")
        x = Qp.from_digits(ctx, digits)
    if neg:
        x = -x
    return x if prec is INF else x.truncate(prec)
