"""Truncated Taylor models with certified remainder on t in [-1, 1].

A ``TaylorModel`` of degree m is a polynomial with interval coefficients plus
an interval ``remainder`` R such that every admissible function v satisfies

    v(t) in sum_j coeffs[j] t^j + R * t^(m+1)     for all t in [-1, 1].

Arithmetic (sum, product, composition with Bessel kernels) preserves this
enclosure.  Products fold coefficients above degree m into the remainder with
a |t|^(m+1) factor bound, which keeps the degree fixed.
"""

from __future__ import annotations

from .bessel import cyl_scaled_derivatives
from .interval import Interval, hull, isum

__all__ = [
    "MAX_DEGREE",
    "ParityError",
    "TaylorModel",
    "bessel_taylor",
    "integrate_even_part",
]

MAX_DEGREE = 64


class ParityError(ValueError):
    """integrate_even_part requires an odd-degree model."""


class DegreeOverflowError(ValueError):
    """Requested model degree exceeds the configured maximum."""


_SYM = Interval(-1, 1)
_POS = Interval(0, 1)


class TaylorModel:
    __slots__ = ("coeffs", "remainder")

    def __init__(self, coeffs, remainder=None):
        coeffs = tuple(c if isinstance(c, Interval) else Interval(c) for c in coeffs)
        if len(coeffs) - 1 > MAX_DEGREE:
            raise DegreeOverflowError(f"degree {len(coeffs) - 1} exceeds {MAX_DEGREE}")
        self.coeffs = coeffs
        self.remainder = Interval(0) if remainder is None else Interval(remainder)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, degree: int) -> "TaylorModel":
        z = Interval(0)
        return cls([Interval(value)] + [z] * degree)

    @classmethod
    def linear(cls, c0, c1, degree: int) -> "TaylorModel":
        z = Interval(0)
        return cls([Interval(c0), Interval(c1)] + [z] * (degree - 1))

    # ----- arithmetic --------------------------------------------------

    def _check(self, other: "TaylorModel"):
        if self.degree != other.degree:
            raise ValueError("mixed-degree Taylor model arithmetic")

    def __add__(self, other):
        if isinstance(other, TaylorModel):
            self._check(other)
            cs = tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
            return TaylorModel(cs, self.remainder + other.remainder)
        cs = (self.coeffs[0] + other,) + self.coeffs[1:]
        return TaylorModel(cs, self.remainder)

    __radd__ = __add__

    def __neg__(self):
        return TaylorModel(tuple(-c for c in self.coeffs), -self.remainder)

    def __sub__(self, other):
        if isinstance(other, TaylorModel):
            return self.__add__(other.__neg__())
        return self.__add__(-Interval(other))

    def __rsub__(self, other):
        return self.__neg__().__add__(other)

    def scale(self, factor) -> "TaylorModel":
        f = factor if isinstance(factor, Interval) else Interval(factor)
        return TaylorModel(tuple(c * f for c in self.coeffs), self.remainder * f)

    def __mul__(self, other):
        if not isinstance(other, TaylorModel):
            return self.scale(other)
        self._check(other)
        m = self.degree
        z = Interval(0)
        out = [z] * (m + 1)
        high = Interval(0)  # coefficients of t^k, k > m, folded via |t| <= 1
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                k = i + j
                p = a * b
                if k <= m:
                    out[k] = out[k] + p
                elif k == m + 1:
                    high = high + p
                else:
                    high = high + p * _SYM
        rem = (
            high
            + self.poly_range() * other.remainder
            + other.poly_range() * self.remainder
            + self.remainder * other.remainder * _SYM
        )
        return TaylorModel(tuple(out), rem)

    def sqr(self) -> "TaylorModel":
        return self * self

    # ----- enclosures ---------------------------------------------------

    def poly_range(self) -> Interval:
        """Enclosure of the polynomial part over t in [-1, 1]."""
        acc = self.coeffs[0]
        for c in self.coeffs[1:]:
            acc = acc + c * _SYM
        return acc

    def range(self) -> Interval:
        """Enclosure of the modeled function over t in [-1, 1]."""
        return self.poly_range() + self.remainder * _SYM

    def enclose_at(self, t: Interval) -> Interval:
        """Enclosure of the modeled function at parameter t (subset of [-1,1])."""
        acc = Interval(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc + self.remainder * t.pow_int(self.degree + 1)

    def split_halves(self):
        """Models of v((t-1)/2) and v((t+1)/2), reparametrized to [-1, 1].

        Not needed for the integration path (segments are re-evaluated after
        geometric splitting), provided for model-level experiments.
        """
        out = []
        half = Interval(0.5)
        for sign in (-1, 1):
            shift = Interval(0.5 * sign)
            m = self.degree
            base = TaylorModel.linear(shift, half, m)
            acc = TaylorModel.constant(0, m)
            for c in reversed(self.coeffs):
                acc = acc * base + c
            rem = self.remainder * (shift.abs() + half).pow_int(m + 1)
            out.append(TaylorModel(acc.coeffs, acc.remainder + rem))
        return out


def integrate_even_part(model: TaylorModel, length: Interval) -> Interval:
    """Rigorous enclosure of the line integral of the modeled function.

    The segment is linearly parametrized by t in [-1, 1] and has total length
    `length`; odd-degree coefficients integrate to zero, so the result is

        length * (sum_i coeffs[2i] / (2i+1)  +  remainder / (m+2)),

    valid when the model degree m is odd (so t^(m+1) is even and its mass
    over [-1,1] equals 2/(m+2)).
    """
    if model.degree % 2 == 0:
        raise ParityError(f"model degree must be odd, got {model.degree}")
    length = length if isinstance(length, Interval) else Interval(length)
    if length.lo_float < 0:
        raise ValueError("segment length must be nonnegative")
    acc = isum(
        model.coeffs[k] / (k + 1) for k in range(0, model.degree + 1, 2)
    )
    acc = acc + model.remainder / (model.degree + 2)
    return acc * length


def bessel_taylor(kind: str, order: int, center_model: TaylorModel) -> TaylorModel:
    """Taylor model of Bessel(kind, order) composed with the modeled path.

    Expands the kernel around the midpoint value of the path, with the
    Lagrange coefficient taken over the full path range; derivative values
    come from the two-term recurrence for cylinder functions.
    """
    m = center_model.degree
    if m + 1 > MAX_DEGREE:
        raise DegreeOverflowError(f"composition order {m + 1} exceeds {MAX_DEGREE}")
    c0 = Interval(center_model.coeffs[0].mid_float)
    full = center_model.range()
    # derivatives at the expansion point, scaled: C^(j)(c0)/j!, j <= m
    ders = cyl_scaled_derivatives(kind, order, c0, m)
    # Lagrange coefficient of order m+1 over the whole path
    lagrange = cyl_scaled_derivatives(kind, order, full.hull(c0), m + 1)[m + 1]
    w = center_model - c0
    acc = TaylorModel.constant(lagrange, m)
    for j in range(m, -1, -1):
        acc = acc * w + ders[j]
    return acc
