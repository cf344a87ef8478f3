"""Exact arithmetic in a totally ramified extension of the p-adic rationals.

Elements of K = Q_p(pi), pi**e == p, are represented *exactly* as vectors of
``e`` rationals (c_0, ..., c_{e-1}), standing for sum(c_i * pi**i).  All
arithmetic is done with :class:`fractions.Fraction`, so there is no precision
to manage and no rounding anywhere.  The valuation is normalized so that
v(p) = 1 and hence v(pi) = 1/e; the value group is (1/e)Z.

Because v_p(c_i) + i/e has denominator-e fractional part exactly i/e, the
terms of a nonzero element have pairwise distinct valuations, the minimum in
the valuation formula is attained exactly once, and no cancellation can hide
it.  This is what makes the vector representation a faithful model of the
complete field for every question asked here.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering


class DivisionByZero(ZeroDivisionError):
    """Division by the zero element of K."""


class NegativeValuation(ValueError):
    """Residue asked of an element outside the valuation ring."""


class NotRepresentable(ValueError):
    """A valuation does not lie in the value group (1/e)Z.

    Carries ``needed_e``: the least enlargement of e (a multiple of the
    current one) whose value group contains the offending rational.
    """

    def __init__(self, q, current_e, needed_e):
        self.q = q
        self.current_e = current_e
        self.needed_e = needed_e
        super().__init__(
            f"valuation {q} is not in (1/{current_e})Z; enlarge e to {needed_e}"
        )


def _is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def vp(q, p):
    """p-adic valuation of a rational number (None for 0)."""
    q = Fraction(q)
    if q == 0:
        return None
    n, d = q.numerator, q.denominator
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    while d % p == 0:
        d //= p
        k -= 1
    return k


@total_ordering
class Valuation:
    """A value of the valuation: a rational number, or infinity (for 0).

    Totally ordered, with infinity as the top element; addition and scalar
    multiplication follow the usual absorbing rules.
    """

    __slots__ = ("q",)

    def __init__(self, q=None):
        self.q = None if q is None else Fraction(q)

    @classmethod
    def infinite(cls):
        return cls(None)

    @property
    def is_infinite(self):
        return self.q is None

    def _coerce(self, other):
        if isinstance(other, Valuation):
            return other
        return Valuation(other)

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.q == other.q

    def __lt__(self, other):
        other = self._coerce(other)
        if self.q is None:
            return False
        if other.q is None:
            return True
        return self.q < other.q

    def __add__(self, other):
        other = self._coerce(other)
        if self.q is None or other.q is None:
            return Valuation.infinite()
        return Valuation(self.q + other.q)

    __radd__ = __add__

    def __mul__(self, k):
        if self.q is None:
            return Valuation.infinite()
        return Valuation(self.q * Fraction(k))

    __rmul__ = __mul__

    def __neg__(self):
        if self.q is None:
            raise ValueError("cannot negate the infinite valuation")
        return Valuation(-self.q)

    def __hash__(self):
        return hash(self.q)

    def __repr__(self):
        return "oo" if self.q is None else f"{self.q}"


def fmt_rat(q):
    """Render a rational as 'a' or 'a/b' (exactly, no floats)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def parse_rat(s):
    """Parse 'a' or 'a/b' into a Fraction."""
    return Fraction(str(s).strip())


class FieldContext:
    """The field K = Q_p(pi) with pi**e == p.

    Holds p (prime) and e (ramification index of the chosen extension) and
    acts as element factory.  Contexts with the same (p, e) are
    interchangeable.
    """

    __slots__ = ("p", "e")

    def __init__(self, p, e=1):
        p, e = int(p), int(e)
        if not _is_prime(p):
            raise ValueError(f"p must be prime, got {p}")
        if e < 1:
            raise ValueError(f"e must be >= 1, got {e}")
        self.p = p
        self.e = e

    def __eq__(self, other):
        return (
            isinstance(other, FieldContext)
            and self.p == other.p
            and self.e == other.e
        )

    def __hash__(self):
        return hash((self.p, self.e))

    def __repr__(self):
        return f"FieldContext(p={self.p}, e={self.e})"

    # -- element construction ------------------------------------------

    def element(self, coeffs):
        """Element from an iterable of <= e rationals (coeffs of pi**i)."""
        cs = [Fraction(c) for c in coeffs]
        if len(cs) > self.e:
            raise ValueError(f"expected at most {self.e} coefficients, got {len(cs)}")
        cs += [Fraction(0)] * (self.e - len(cs))
        return Element(self, tuple(cs))

    def from_rational(self, q):
        return self.element([Fraction(q)])

    def zero(self):
        return self.from_rational(0)

    def one(self):
        return self.from_rational(1)

    def pi(self):
        """The uniformizer of this context (p itself when e == 1)."""
        return self.uniformizer_power(Fraction(1, self.e))

    def uniformizer_power(self, q):
        """The canonical element p**a * pi**b of valuation q = a + b/e.

        Raises NotRepresentable when q*e is not an integer, with the least
        sufficient enlargement of e attached.
        """
        q = Fraction(q)
        t = q * self.e
        if t.denominator != 1:
            needed = self.e * t.denominator
            raise NotRepresentable(q, self.e, needed)
        t = t.numerator
        b = t % self.e
        a = (t - b) // self.e
        coeffs = [Fraction(0)] * self.e
        coeffs[b] = Fraction(self.p) ** a
        return Element(self, tuple(coeffs))

    def element_from_strings(self, strings):
        return self.element([parse_rat(s) for s in strings])

    # -- moving to a bigger field --------------------------------------

    def enlarged(self, new_e):
        new_e = int(new_e)
        if new_e % self.e != 0:
            raise ValueError(f"new e {new_e} must be a multiple of {self.e}")
        return FieldContext(self.p, new_e)

    def embed(self, x, new_ctx):
        """Re-express x in a context with e' a multiple of e (same p)."""
        if new_ctx.p != self.p:
            raise ValueError("cannot embed between different primes")
        if new_ctx.e % self.e != 0:
            raise ValueError(f"e'={new_ctx.e} is not a multiple of e={self.e}")
        k = new_ctx.e // self.e
        coeffs = [Fraction(0)] * new_ctx.e
        for i, c in enumerate(x.coeffs):
            coeffs[i * k] = c
        return Element(new_ctx, tuple(coeffs))


def _poly_divmod_q(a, b):
    # divmod in Q[X]; a, b are lists of Fractions, b != 0
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    q = [Fraction(0)] * max(1, len(a) - db)
    while len(a) - 1 >= db and any(a):
        while a and a[-1] == 0:
            a.pop()
        if len(a) - 1 < db:
            break
        c = a[-1] / lb
        k = len(a) - 1 - db
        q[k] = c
        for i, bi in enumerate(b):
            a[i + k] -= c * bi
        a.pop()
    while len(a) > 1 and a[-1] == 0:
        a.pop()
    return q, a


def _poly_xgcd_q(a, b):
    # extended euclid in Q[X]: returns (g, s, t) with s*a + t*b = g
    r0, r1 = list(a), list(b)
    s0, s1 = [Fraction(1)], [Fraction(0)]
    t0, t1 = [Fraction(0)], [Fraction(1)]

    def _mul(u, v):
        out = [Fraction(0)] * (len(u) + len(v) - 1)
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            for j, vj in enumerate(v):
                if vj:
                    out[i + j] += ui * vj
        return out or [Fraction(0)]

    def _sub(u, v):
        out = [Fraction(0)] * max(len(u), len(v))
        for i, ui in enumerate(u):
            out[i] += ui
        for i, vi in enumerate(v):
            out[i] -= vi
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return out

    while any(r1):
        q, r = _poly_divmod_q(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _sub(s0, _mul(q, s1))
        t0, t1 = t1, _sub(t0, _mul(q, t1))
    return r0, s0, t0


class Element:
    """An exact element of K, as coefficients over the basis 1, pi, ..., pi**(e-1)."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx, coeffs):
        self.ctx = ctx
        self.coeffs = coeffs  # tuple of Fractions, length e

    # -- predicates ----------------------------------------------------

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def is_unit(self):
        return self.val() == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, self.coeffs))

    # -- valuation and residue ------------------------------------------

    def val(self):
        """The valuation: min over i of v_p(c_i) + i/e (infinite for 0).

        The minimum is attained exactly once because the fractional parts
        i/e are pairwise distinct for 0 <= i < e.
        """
        best = None
        p, e = self.ctx.p, self.ctx.e
        for i, c in enumerate(self.coeffs):
            k = vp(c, p)
            if k is None:
                continue
            v = Fraction(k) + Fraction(i, e)
            if best is None or v < best:
                best = v
        return Valuation.infinite() if best is None else Valuation(best)

    def residue(self):
        """Image in F_p = residue field, for elements of valuation >= 0."""
        v = self.val()
        if v < 0:
            raise NegativeValuation(f"element has valuation {v} < 0")
        if v > 0:
            return 0
        # only the i = 0 coefficient can have valuation exactly 0
        c = self.coeffs[0]
        p = self.ctx.p
        num = c.numerator % p
        den = c.denominator % p
        return (num * pow(den, -1, p)) % p

    # -- arithmetic ------------------------------------------------------

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return self.ctx.from_rational(other)
        if not isinstance(other, Element):
            raise TypeError(f"cannot combine Element with {type(other).__name__}")
        if other.ctx != self.ctx:
            raise ValueError("elements belong to different field contexts")
        return other

    def __add__(self, other):
        other = self._check(other)
        return Element(
            self.ctx, tuple(a + b for a, b in zip(self.coeffs, other.coeffs))
        )

    __radd__ = __add__

    def __neg__(self):
        return Element(self.ctx, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._check(other)
        return Element(
            self.ctx, tuple(a - b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        other = self._check(other)
        e, p = self.ctx.e, self.ctx.p
        if e == 1:
            return Element(self.ctx, (self.coeffs[0] * other.coeffs[0],))
        # convolution, then fold pi**(e+k) = p * pi**k
        out = [Fraction(0)] * e
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b == 0:
                    continue
                k = i + j
                if k >= e:
                    out[k - e] += a * b * p
                else:
                    out[k] += a * b
        return Element(self.ctx, tuple(out))

    __rmul__ = __mul__

    def scale(self, q):
        """Multiply by a plain rational (cheap path, no convolution)."""
        q = Fraction(q)
        return Element(self.ctx, tuple(c * q for c in self.coeffs))

    def inverse(self):
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        e, p = self.ctx.e, self.ctx.p
        if e == 1:
            return Element(self.ctx, (1 / self.coeffs[0],))
        # invert modulo the minimal polynomial X**e - p via extended euclid
        modulus = [Fraction(-p)] + [Fraction(0)] * (e - 1) + [Fraction(1)]
        g, s, _ = _poly_xgcd_q(list(self.coeffs), modulus)
        # X**e - p is irreducible (Eisenstein), so g is a nonzero constant
        c = g[0]
        inv = [si / c for si in s]
        inv += [Fraction(0)] * (e - len(inv))
        return Element(self.ctx, tuple(inv[:e]))

    def __truediv__(self, other):
        other = self._check(other)
        if other.is_zero():
            raise DivisionByZero("division by zero element")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._check(other) / self

    def __pow__(self, n):
        n = int(n)
        if n < 0:
            return self.inverse() ** (-n)
        out = self.ctx.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- presentation ----------------------------------------------------

    def to_strings(self):
        return [fmt_rat(c) for c in self.coeffs]

    def __repr__(self):
        e = self.ctx.e
        if e == 1 or all(c == 0 for c in self.coeffs[1:]):
            return fmt_rat(self.coeffs[0])
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(fmt_rat(c))
            elif i == 1:
                terms.append(f"({fmt_rat(c)})*pi")
            else:
                terms.append(f"({fmt_rat(c)})*pi^{i}")
        return " + ".join(terms) if terms else "0"
