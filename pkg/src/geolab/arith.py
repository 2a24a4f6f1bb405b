"""Exact arithmetic primitives.

Roots of unity with rational exponents, Eisenstein integers, real
quadratic surds, the extended Jacobi symbol, and the cubic residue
symbol.  Everything is integer/Fraction exact; floats appear only in
explicit conversion helpers.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "RootOfUnity",
    "EisensteinInt",
    "OMEGA",
    "LAMBDA",
    "EISENSTEIN_UNITS",
    "primary_normalize",
    "jacobi_extended",
    "cubic_residue_symbol",
    "QuadraticSurd",
    "cyclotomic_polynomial",
    "phase_sum_is_zero",
    "phase_sums_equal",
]


class RootOfUnity:
    """e(q) = exp(2*pi*i*q) for rational q; the exponent lives in Q/Z.

    Multiplier-system values in this package all lie in the 24th roots,
    so construction asserts denominator | 24.
    """

    __slots__ = ("q",)

    def __init__(self, q=0):
        q = Fraction(q) % 1
        if 24 % q.denominator:
            raise ValueError(f"exponent {q} has denominator not dividing 24")
        object.__setattr__(self, "q", q)

    def __setattr__(self, *a):
        raise AttributeError("RootOfUnity is immutable")

    def __reduce__(self):
        return (RootOfUnity, (self.q,))

    def __mul__(self, other):
        if not isinstance(other, RootOfUnity):
            return NotImplemented
        return RootOfUnity(self.q + other.q)

    def __pow__(self, n: int):
        return RootOfUnity(self.q * n)

    def __neg__(self):
        return RootOfUnity(self.q + Fraction(1, 2))

    def conjugate(self):
        return RootOfUnity(-self.q)

    def inverse(self):
        return self.conjugate()

    def __eq__(self, other):
        if isinstance(other, RootOfUnity):
            return self.q == other.q
        if other == 1:
            return self.q == 0
        if other == -1:
            return self.q == Fraction(1, 2)
        return NotImplemented

    def __hash__(self):
        return hash(("RootOfUnity", self.q))

    @property
    def value(self) -> complex:
        return cmath.exp(2j * cmath.pi * float(self.q))

    def __complex__(self):
        return self.value

    def __repr__(self):
        return f"e({self.q})"


ONE = RootOfUnity(0)


class EisensteinInt:
    """a + b*omega with omega = e(1/3), omega**2 = -1 - omega.

    Norm a**2 - a*b + b**2; the ring is norm-Euclidean, divmod rounds
    to the nearest lattice point.
    """

    __slots__ = ("a", "b")

    def __init__(self, a: int, b: int = 0):
        object.__setattr__(self, "a", int(a))
        object.__setattr__(self, "b", int(b))

    def __setattr__(self, *a):
        raise AttributeError("EisensteinInt is immutable")

    def __reduce__(self):
        return (EisensteinInt, (self.a, self.b))

    def __add__(self, other):
        other = _as_eis(other)
        return EisensteinInt(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_eis(other)
        return EisensteinInt(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return _as_eis(other) - self

    def __mul__(self, other):
        other = _as_eis(other)
        # omega**2 = -1 - omega
        return EisensteinInt(
            self.a * other.a - self.b * other.b,
            self.a * other.b + self.b * other.a - self.b * other.b,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return EisensteinInt(-self.a, -self.b)

    def conjugate(self):
        return EisensteinInt(self.a - self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def __divmod__(self, other):
        other = _as_eis(other)
        if other.is_zero():
            raise ZeroDivisionError
        num = self * other.conjugate()
        n = other.norm()
        qa = _round_nearest(num.a, n)
        qb = _round_nearest(num.b, n)
        q = EisensteinInt(qa, qb)
        r = self - q * other
        assert r.norm() < n, "division failed to reduce the norm"
        return q, r

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def divides(self, other) -> bool:
        return (_as_eis(other) % self).is_zero()

    def exact_div(self, other):
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError(f"{other} does not divide {self}")
        return q

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers leave the ring")
        out, base = EisensteinInt(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        try:
            other = _as_eis(other)
        except TypeError:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash(("EisensteinInt", self.a, self.b))

    def __repr__(self):
        return f"EisensteinInt({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}w"
        return f"{self.a}{self.b:+d}w"

    @staticmethod
    def gcd(x: "EisensteinInt", y: "EisensteinInt") -> "EisensteinInt":
        while not y.is_zero():
            x, y = y, x % y
        if x.is_zero():
            return x
        # deterministic associate: lexicographically largest (a, b)
        return max(x.associates(), key=lambda z: (z.a, z.b))

    def associates(self):
        return [self * u for u in EISENSTEIN_UNITS]

    def complex_value(self) -> complex:
        return self.a + self.b * complex(-0.5, math.sqrt(3) / 2)


def _as_eis(x) -> EisensteinInt:
    if isinstance(x, EisensteinInt):
        return x
    if isinstance(x, int):
        return EisensteinInt(x)
    raise TypeError(f"cannot coerce {x!r} to EisensteinInt")


def _round_nearest(num: int, den: int) -> int:
    # nearest integer to num/den, den > 0, ties toward +inf (any tie rule works)
    return (2 * num + den) // (2 * den)


OMEGA = EisensteinInt(0, 1)
LAMBDA = EisensteinInt(1, 2)  # sqrt(-3), norm 3; ramified prime above 3
EISENSTEIN_UNITS = (
    EisensteinInt(1, 0),
    EisensteinInt(0, 1),
    EisensteinInt(-1, -1),  # omega**2
    EisensteinInt(-1, 0),
    EisensteinInt(0, -1),
    EisensteinInt(1, 1),  # -omega**2
)


def _is_primary(x: EisensteinInt) -> bool:
    # primary  <=>  x = -1 (mod 3)
    return x.a % 3 == 2 and x.b % 3 == 0


def primary_normalize(alpha: EisensteinInt):
    """Return (u, alpha') with alpha = u * alpha', alpha' = -1 (mod 3).

    Exactly one associate is primary when alpha is coprime to lambda;
    raises otherwise.
    """
    if alpha.norm() % 3 == 0:
        raise ValueError(f"{alpha!r} is not coprime to lambda")
    for u, uinv in _UNIT_INVERSES:
        cand = uinv * alpha
        if _is_primary(cand):
            return u, cand
    raise AssertionError("unreachable: some associate must be primary")


_UNIT_INVERSES = tuple(
    (u, next(v for v in EISENSTEIN_UNITS if (u * v) == EisensteinInt(1)))
    for u in EISENSTEIN_UNITS
)

# omega exponent of each unit (unit = ±omega**j)
_OMEGA_EXPONENT = {
    EisensteinInt(1, 0): 0,
    EisensteinInt(-1, 0): 0,
    EisensteinInt(0, 1): 1,
    EisensteinInt(0, -1): 1,
    EisensteinInt(-1, -1): 2,
    EisensteinInt(1, 1): 2,
}


def _jacobi_positive(a: int, n: int) -> int:
    # classical Jacobi symbol, n odd positive
    a %= n
    t = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    return t if n == 1 else 0


def jacobi_extended(c: int, d: int) -> int:
    """Quadratic residue symbol (c/d) extended to all odd d.

    For d > 0 this is the classical Jacobi symbol with (c/1) = 1; for
    d < 0 the sign of c enters: (c/d) = sign(c) * (c/|d|), so in
    particular (c/-1) = sign(c), except (0/-1) = 1.  This is the
    convention under which the weight-1/2 theta multipliers factor
    through closed formulas; (0/-1) = -1 would break them on -T**n.
    Multiplicative in nonzero numerators.
    """
    if d % 2 == 0:
        raise ValueError("lower argument must be odd")
    if d == 1:
        return 1
    if d > 0:
        return _jacobi_positive(c, d)
    s = -1 if c < 0 else 1
    return s * _jacobi_positive(c, -d)


def _remove_lambda(x: EisensteinInt):
    # x = LAMBDA**e * rest with rest coprime to lambda; lambda | x iff a+b = 0 (mod 3)
    e = 0
    while (x.a + x.b) % 3 == 0:
        x = x.exact_div(LAMBDA)
        e += 1
    return e, x


def cubic_residue_symbol(alpha: EisensteinInt, beta: EisensteinInt):
    """Cubic residue symbol (alpha/beta)_3 in mu_3, or the integer 0
    when alpha and beta share a factor.

    Computed by the Euclidean reciprocity-and-reduction walk: Kubota-
    style flip (a/b) = (b/a) for primary coprime arguments, with unit
    and lambda supplements
        (omega/beta)  = omega**((N(beta)-1)/3)
        (lambda/beta) = omega**(b/3)          for primary beta = a + b*omega
    and (-1/beta) = 1.  beta must be a nonunit coprime to lambda.
    """
    beta = _as_eis(beta)
    alpha = _as_eis(alpha)
    if beta.is_zero() or beta.is_unit():
        raise ValueError("denominator must be a nonunit")
    if beta.norm() % 3 == 0:
        raise ValueError("denominator must be coprime to lambda")
    _, beta = primary_normalize(beta)  # symbol depends only on the ideal (beta)
    t = 0
    while True:
        alpha = alpha % beta
        if alpha.is_zero():
            return 0
        e, rest = _remove_lambda(alpha)
        t += e * (beta.b // 3)
        u, alpha = primary_normalize(rest)
        t += _OMEGA_EXPONENT[u] * ((beta.norm() - 1) // 3)
        if alpha.is_unit():
            # alpha primary and a unit forces alpha = -1, and (-1/beta) = 1
            return RootOfUnity(Fraction(t % 3, 3))
        alpha, beta = beta, alpha


# ---------------------------------------------------------------------------
# real quadratic surds


@lru_cache(maxsize=None)
def _squarefree_split(d: int):
    # d = f**2 * d0 with d0 squarefree; trial division, desk scale
    if d <= 0:
        raise ValueError("radicand must be positive")
    f, d0, p = 1, 1, 2
    while p * p <= d:
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        f *= p ** (e // 2)
        if e % 2:
            d0 *= p
        p += 1 if p == 2 else 2
    return f, d0 * d


class QuadraticSurd:
    """(p + q*sqrt(d)) / r, exact.

    Normal form: d squarefree (square part folded into q), r > 0,
    gcd(p, q, r) = 1, and d = 1 forced when q = 0.  Comparisons are
    exact across different radicands (distinct values in distinct
    quadratic fields are separated by integer interval refinement).
    """

    __slots__ = ("p", "q", "d", "r")

    def __init__(self, p, q, d, r=1):
        p, q, d, r = int(p), int(q), int(d), int(r)
        if r == 0:
            raise ZeroDivisionError
        if q:
            f, d0 = _squarefree_split(d)
            if d0 == 1:  # d was a perfect square
                p, q, d = p + q * f, 0, 1
            else:
                q, d = q * f, d0
        else:
            d = 1
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(abs(p), abs(q)), r)
        if g > 1:
            p, q, r = p // g, q // g, r // g
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "r", r)

    def __setattr__(self, *a):
        raise AttributeError("QuadraticSurd is immutable")

    def __reduce__(self):
        return (QuadraticSurd, (self.p, self.q, self.d, self.r))

    @classmethod
    def from_rational(cls, x):
        x = Fraction(x)
        return cls(x.numerator, 0, 1, x.denominator)

    def is_rational(self) -> bool:
        return self.q == 0

    def __float__(self) -> float:
        return (self.p + self.q * math.sqrt(self.d)) / self.r

    def mpf(self, dps: int = 40):
        """High-precision value (mpmath mpf at dps decimal digits)."""
        import mpmath

        with mpmath.workdps(dps):
            return (self.p + self.q * mpmath.sqrt(self.d)) / self.r

    # -- exact comparisons ---------------------------------------------------

    @staticmethod
    def _sign_of(A: int, B: int, d: int) -> int:
        # sign of A + B*sqrt(d)
        if B == 0:
            return (A > 0) - (A < 0)
        if A == 0:
            return (B > 0) - (B < 0)
        if A > 0 and B > 0:
            return 1
        if A < 0 and B < 0:
            return -1
        s = (A * A > B * B * d) - (A * A < B * B * d)
        return s if A > 0 else -s

    def _cmp(self, other) -> int:
        if not isinstance(other, QuadraticSurd):
            other = QuadraticSurd.from_rational(other)
        if (self.p, self.q, self.d, self.r) == (other.p, other.q, other.d, other.r):
            return 0
        if self.d == other.d or self.q == 0 or other.q == 0:
            d = self.d if self.q else other.d
            A = self.p * other.r - other.p * self.r
            B = self.q * other.r - other.q * self.r
            return self._sign_of(A, B, d)
        # distinct squarefree radicands: values differ; refine intervals
        bits = 64
        while True:
            lo1, hi1 = self._bounds(bits)
            lo2, hi2 = other._bounds(bits)
            if hi1 < lo2:
                return -1
            if hi2 < lo1:
                return 1
            bits *= 2
            assert bits <= 1 << 16, "interval refinement failed to separate"

    def _bounds(self, bits: int):
        # integer bounds on value * 2**bits * r1*r2... kept per-surd: value*2**bits in [lo/r, hi/r]
        s = math.isqrt(self.d << (2 * bits))
        if self.q >= 0:
            lo = (self.p << bits) + self.q * s
            hi = (self.p << bits) + self.q * (s + 1)
        else:
            lo = (self.p << bits) + self.q * (s + 1)
            hi = (self.p << bits) + self.q * s
        # divide by r with outward rounding
        return -((-lo) // self.r), hi // self.r

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, QuadraticSurd):
            return (self.p, self.q, self.d, self.r) == (other.p, other.q, other.d, other.r)
        if isinstance(other, (int, Fraction)):
            return self.q == 0 and Fraction(self.p, self.r) == other
        return NotImplemented

    def __hash__(self):
        if self.q == 0:
            return hash(Fraction(self.p, self.r))
        return hash(("QuadraticSurd", self.p, self.q, self.d, self.r))

    # -- arithmetic ----------------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadraticSurd.from_rational(other)
        if self.q and other.q and self.d != other.d:
            raise ValueError("product leaves the quadratic field")
        d = self.d if self.q else other.d
        return QuadraticSurd(
            self.p * other.p + self.q * other.q * d,
            self.p * other.q + self.q * other.p,
            d,
            self.r * other.r,
        )

    __rmul__ = __mul__

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadraticSurd.from_rational(other)
        if self.q and other.q and self.d != other.d:
            raise ValueError("sum leaves the quadratic field")
        d = self.d if self.q else other.d
        return QuadraticSurd(
            self.p * other.r + other.p * self.r,
            self.q * other.r + other.q * self.r,
            d,
            self.r * other.r,
        )

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = QuadraticSurd.from_rational(other)
        return self + QuadraticSurd(-other.p, -other.q, other.d, other.r)

    def __neg__(self):
        return QuadraticSurd(-self.p, -self.q, self.d, self.r)

    def inverse(self):
        n = self.p * self.p - self.q * self.q * self.d  # r**2 * field norm
        if n == 0:
            raise ZeroDivisionError
        return QuadraticSurd(self.p * self.r, -self.q * self.r, self.d, n)

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadraticSurd(1, 0, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conjugate(self):
        """Galois conjugate (p - q*sqrt(d))/r."""
        return QuadraticSurd(self.p, -self.q, self.d, self.r)

    def __repr__(self):
        if self.q == 0:
            return f"QuadraticSurd({Fraction(self.p, self.r)})"
        return f"QuadraticSurd(({self.p}{self.q:+d}*sqrt({self.d}))/{self.r})"


# ---------------------------------------------------------------------------
# exact zero tests for rational-phase sums


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple:
    """Coefficients of Phi_n, low degree first."""
    if n < 1:
        raise ValueError
    # start from x**n - 1 and divide out Phi_d for proper divisors d
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_div_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


def _poly_div_exact(num, den):
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        assert c % den[-1] == 0
        c //= den[-1]
        out[i] = c
        for j, dj in enumerate(den):
            num[i + j] -= c * dj
    assert all(v == 0 for v in num)
    return out


def phase_sum_is_zero(terms) -> bool:
    """Exact test of sum(coeff * e(phase)) == 0.

    terms: iterable of (coeff, phase) with coeff rational and phase a
    Fraction (interpreted mod 1).  Decided by reduction against the
    cyclotomic polynomial of the common denominator.
    """
    terms = [(Fraction(c), Fraction(ph) % 1) for c, ph in terms]
    terms = [(c, ph) for c, ph in terms if c != 0]
    if not terms:
        return True
    N = 1
    for _, ph in terms:
        N = N * ph.denominator // math.gcd(N, ph.denominator)
    scale = 1
    for c, _ in terms:
        scale = scale * c.denominator // math.gcd(scale, c.denominator)
    poly = [0] * N
    for c, ph in terms:
        poly[int(ph * N) % N] += int(c * scale)
    phi = list(cyclotomic_polynomial(N))
    # remainder of poly mod phi (phi monic): value at e(1/N) is 0 iff remainder 0
    poly = list(poly)
    for i in range(len(poly) - 1, len(phi) - 2, -1):
        c = poly[i]
        if c:
            for j, pj in enumerate(phi):
                poly[i - len(phi) + 1 + j] -= c * pj
    return all(v == 0 for v in poly)


def phase_sums_equal(lhs, rhs) -> bool:
    """Exact equality of two rational-phase sums."""
    terms = [(Fraction(c), ph) for c, ph in lhs]
    terms += [(-Fraction(c), ph) for c, ph in rhs]
    return phase_sum_is_zero(terms)
