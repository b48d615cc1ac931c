"""Arithmetic context: the prime, the working precision and derived constants."""

from dataclasses import dataclass

INF = float("inf")

# Witnesses that make Miller-Rabin deterministic for every n < 3.3 * 10**24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class PadiqError(Exception):
    """Base class for all mathematical errors raised by this package."""


class PrecisionError(PadiqError):
    """A result would need more digits than the inputs carry."""


class DomainError(PadiqError):
    """Argument outside the convergence/validity domain of an operation."""


class NotASquareError(PadiqError):
    """Square root requested of a non-square."""


class SingularMatrixError(PadiqError):
    """Matrix singular (possibly only at the working precision)."""


class NotInImageError(PadiqError):
    """Point is not in the image of the map being inverted."""


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (exact for all inputs this package meets)."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class PadicContext:
    """Prime p plus the default count of retained digits.

    ``d`` is the exponent of the convergence domain p^d Z_p shared by the
    exponential, cosine and sine series: 2 for p = 2, else 1.
    """

    p: int
    precision: int = 24

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.precision < 1:
            raise ValueError("precision must be a positive integer")

    @property
    def d(self) -> int:
        return 2 if self.p == 2 else 1
