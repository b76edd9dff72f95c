"""Numbers too large (or too small) to write down.

``Big`` is a positive real held either exactly as a Fraction or through its
base-2 logarithm.  That logarithm is a ``Real``: an mpmath float while its
exponent is moderate, otherwise a sign times another ``Big``.  The nesting
gives towers 2^(2^(...)) with ordinary comparison and the few operations the
constant recursion needs: products, powers, reciprocals, +c, min and max.

Sums of a huge and a moderate quantity keep the huge one; the dropped part
is below the working precision of the logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

PREC_BITS = 256
EXACT_BITS = 100_000  # beyond this a Fraction is replaced by its logarithm
REAL_MAG_LIMIT = 1 << 20  # an mpf with |x| > 2^REAL_MAG_LIMIT becomes a tower

_ctx = mpmath.mp.clone()
_ctx.prec = PREC_BITS


def _log2_fraction(q: Fraction):
    return _ctx.log(_ctx.mpf(q.numerator), 2) - _ctx.log(_ctx.mpf(q.denominator), 2)


@dataclass(frozen=True)
class Real:
    v: object = None  # mpf, when moderate
    sign: int = 0
    mag: "Big | None" = None

    @staticmethod
    def of(x) -> "Real":
        if isinstance(x, Real):
            return x
        if isinstance(x, Fraction):
            x = _ctx.mpf(x.numerator) / x.denominator
        x = _ctx.mpf(x)
        if x != 0 and _ctx.mag(x) > REAL_MAG_LIMIT:
            return Real(None, 1 if x > 0 else -1, Big(lg=Real.of(_ctx.log(abs(x), 2))))
        return Real(x, 0, None)

    @staticmethod
    def from_big(b: "Big") -> "Real":
        if b.is_exact:
            return Real.of(b.q)
        if b.lg.huge or b.lg.v > REAL_MAG_LIMIT:
            return Real(None, 1, b)
        return Real.of(_ctx.power(2, b.lg.v))

    @property
    def huge(self) -> bool:
        return self.mag is not None

    def _sgn(self) -> int:
        if self.huge:
            return self.sign
        return (self.v > 0) - (self.v < 0)

    def __neg__(self) -> "Real":
        if self.huge:
            return Real(None, -self.sign, self.mag)
        return Real(-self.v)

    def __add__(self, other) -> "Real":
        other = Real.of(other) if not isinstance(other, Real) else other
        if not self.huge and not other.huge:
            return Real.of(self.v + other.v)
        if not other.huge:
            return self
        if not self.huge:
            return other
        if self.mag > other.mag:
            return self
        if other.mag > self.mag:
            return other
        if self.sign == other.sign:
            return Real(None, self.sign, self.mag * Big.exact(2))
        return Real.of(0)

    def __sub__(self, other) -> "Real":
        return self + (-Real.of(other) if not isinstance(other, Real) else -other)

    def __mul__(self, other) -> "Real":
        other = Real.of(other) if not isinstance(other, Real) else other
        if not self.huge and not other.huge:
            return Real.of(self.v * other.v)
        s = self._sgn() * other._sgn()
        if s == 0:
            return Real.of(0)
        return Real(None, s, self.abs_big() * other.abs_big())

    __rmul__ = __mul__

    def abs_big(self) -> "Big":
        if self.huge:
            return self.mag
        return Big(lg=Real.of(_ctx.log(abs(self.v), 2)))

    def log2_abs(self) -> "Real":
        if self.huge:
            return self.mag.log2()
        return Real.of(_ctx.log(abs(self.v), 2))

    def _cmp(self, other) -> int:
        other = Real.of(other) if not isinstance(other, Real) else other
        a, b = self._sgn(), other._sgn()
        if a != b:
            return (a > b) - (a < b)
        if a == 0:
            return 0
        if not self.huge and not other.huge:
            return (self.v > other.v) - (self.v < other.v)
        if self.huge and not other.huge:
            mag_cmp = 1
        elif other.huge and not self.huge:
            mag_cmp = -1
        else:
            mag_cmp = (self.mag > other.mag) - (self.mag < other.mag)
        return mag_cmp * a

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        return isinstance(other, (Real, int, float, Fraction)) and self._cmp(other) == 0

    def __hash__(self):
        return hash(str(self))

    def __float__(self) -> float:
        if self.huge:
            return math.copysign(math.inf, self.sign)
        return float(self.v)

    def __str__(self) -> str:
        if self.huge:
            return ("-" if self.sign < 0 else "") + str(self.mag)
        return mpmath.nstr(self.v, 20, strip_zeros=True)


@dataclass(frozen=True)
class Big:
    q: Fraction | None = None
    lg: Real | None = None
    form: tuple | None = None  # (base, exponent, addend): base**exponent + addend

    @staticmethod
    def exact(q) -> "Big":
        q = Fraction(q)
        if q <= 0:
            raise ValueError("Big holds positive numbers only")
        if q.numerator.bit_length() + q.denominator.bit_length() > EXACT_BITS:
            return Big(lg=Real.of(_log2_fraction(q)))
        return Big(q=q)

    @staticmethod
    def of(x) -> "Big":
        return x if isinstance(x, Big) else Big.exact(x)

    @property
    def is_exact(self) -> bool:
        return self.q is not None

    def log2(self) -> Real:
        if self.q is not None:
            return Real.of(_log2_fraction(self.q))
        return self.lg

    def __mul__(self, other) -> "Big":
        other = Big.of(other)
        if self.is_exact and other.is_exact:
            return Big.exact(self.q * other.q)
        return Big(lg=self.log2() + other.log2())

    __rmul__ = __mul__

    def reciprocal(self) -> "Big":
        if self.is_exact:
            return Big.exact(1 / self.q)
        return Big(lg=-self.lg)

    def __truediv__(self, other) -> "Big":
        return self * Big.of(other).reciprocal()

    def __rtruediv__(self, other) -> "Big":
        return Big.of(other) * self.reciprocal()

    def __pow__(self, y) -> "Big":
        """self ** y for an integer, Fraction or Real exponent."""
        if isinstance(y, int):
            y = Fraction(y)
        if self.is_exact and isinstance(y, Fraction) and y.denominator == 1:
            bits = (self.q.numerator.bit_length() + self.q.denominator.bit_length()) * abs(y.numerator)
            if bits <= EXACT_BITS:
                return Big.exact(self.q ** y.numerator)
        if self.is_exact and self.q == 1:
            return self
        lg = self.log2() * (y if isinstance(y, Real) else Real.of(y))
        form = None
        if self.is_exact and self.q.denominator == 1 and isinstance(y, Fraction):
            form = (self.q.numerator, y, 0)
        return Big(lg=lg, form=form)

    def add(self, c: int) -> "Big":
        """self + c for a small integer c."""
        if self.is_exact:
            return Big.exact(self.q + c)
        lg = self.lg
        if lg.huge or lg.v > 64:
            form = (self.form[0], self.form[1], self.form[2] + c) if self.form else None
            return Big(lg=lg, form=form)
        val = _ctx.power(2, lg.v) + c
        return Big(lg=Real.of(_ctx.log(val, 2)))

    def _cmp(self, other) -> int:
        other = Big.of(other)
        if self.is_exact and other.is_exact:
            return (self.q > other.q) - (self.q < other.q)
        if self.form and other.form and self.form[:2] == other.form[:2]:
            return (self.form[2] > other.form[2]) - (self.form[2] < other.form[2])
        return self.log2()._cmp(other.log2())

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        return isinstance(other, (Big, int, Fraction)) and self._cmp(other) == 0

    def __hash__(self):
        return hash(str(self))

    def __str__(self) -> str:
        if self.is_exact:
            q = self.q
            return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
        if self.form:
            base, y, c = self.form
            ys = str(y.numerator) if y.denominator == 1 else f"{y.numerator}/{y.denominator}"
            return f"{base}^({ys})" + (f" + {c}" if c else "")
        return f"2^({self.lg})"

    def log2_str(self) -> str:
        return str(self.log2())


def bmin(values):
    values = [Big.of(v) for v in values]
    best = values[0]
    for v in values[1:]:
        if v < best:
            best = v
    return best


def bmax(values):
    values = [Big.of(v) for v in values]
    best = values[0]
    for v in values[1:]:
        if v > best:
            best = v
    return best
