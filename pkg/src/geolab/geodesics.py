"""Hyperbolic conjugacy classes of the modular group.

Classes of trace t > 2 biject with proper equivalence classes of
integral binary quadratic forms of discriminant t**2 - 4.  A class
whose associated form has content u is the m-th power of the primitive
class attached to the content-1 part, where (t, u) is the m-th solution
of X**2 - D*Y**2 = 4 for the underlying discriminant D.  Enumeration
therefore walks traces in ascending order (the norm is monotone in the
trace), splits each t**2 - 4 over square divisors, and counts primitive
classes per discriminant by reduced-form cycles.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import QuadraticSurd

__all__ = [
    "Mat2",
    "QuadForm",
    "GeodesicClass",
    "pell_fundamental",
    "form_classes",
    "class_representative",
    "norm_from_trace",
    "enumerate_classes",
    "brute_force_classes",
]


class Mat2:
    """2x2 matrix over a commutative ring (ints or EisensteinInt)."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *args):
        raise AttributeError("Mat2 is immutable")

    def __reduce__(self):
        return (Mat2, self.entries())

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def __mul__(self, other):
        return Mat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self):
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def inverse(self):
        if self.det() != 1:
            raise ValueError("inverse implemented for determinant 1 only")
        return Mat2(self.d, -self.b, -self.c, self.a)

    def __pow__(self, n: int):
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        out = Mat2(1, 0, 0, 1) if isinstance(self.a, int) else None
        if out is None:
            one, zero = self.a - self.a + 1, self.a - self.a
            out = Mat2(one, zero, zero, one)
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return self.entries() == other.entries()

    def __hash__(self):
        return hash(("Mat2",) + self.entries())

    def __repr__(self):
        return f"Mat2({self.a}, {self.b}, {self.c}, {self.d})"


IDENTITY = Mat2(1, 0, 0, 1)


# ---------------------------------------------------------------------------
# integral binary quadratic forms, positive nonsquare discriminant


def _check_disc(D: int) -> int:
    if D <= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a positive discriminant")
    s = math.isqrt(D)
    if s * s == D:
        raise ValueError(f"{D} is a perfect square")
    return s


class QuadForm:
    """Integral form A*x**2 + B*x*y + C*y**2 of positive nonsquare
    discriminant."""

    __slots__ = ("A", "B", "C")

    def __init__(self, A: int, B: int, C: int):
        object.__setattr__(self, "A", int(A))
        object.__setattr__(self, "B", int(B))
        object.__setattr__(self, "C", int(C))
        _check_disc(self.disc())

    def __setattr__(self, *args):
        raise AttributeError("QuadForm is immutable")

    def __reduce__(self):
        return (QuadForm, self.tuple())

    def disc(self) -> int:
        return self.B * self.B - 4 * self.A * self.C

    def content(self) -> int:
        return math.gcd(math.gcd(abs(self.A), abs(self.B)), abs(self.C))

    def primitive_part(self) -> "QuadForm":
        g = self.content()
        return QuadForm(self.A // g, self.B // g, self.C // g)

    def tuple(self):
        return (self.A, self.B, self.C)

    def apply(self, g: Mat2) -> "QuadForm":
        """Right action: (F.apply(g))(x, y) = F(g11*x + g12*y, g21*x + g22*y)."""
        p, q, r, s = g.a, g.b, g.c, g.d
        A, B, C = self.A, self.B, self.C
        return QuadForm(
            A * p * p + B * p * r + C * r * r,
            2 * A * p * q + B * (p * s + q * r) + 2 * C * r * s,
            A * q * q + B * q * s + C * s * s,
        )

    def is_reduced(self) -> bool:
        D = self.disc()
        B = self.B
        if B <= 0 or B * B >= D:
            return False
        twoA = 2 * abs(self.A)
        if twoA > B and (twoA - B) ** 2 >= D:  # need 2|A| < sqrt(D) + B
            return False
        return (twoA + B) ** 2 > D  # need 2|A| > sqrt(D) - B

    def reduction_step(self):
        """One rho step; returns (next_form, g) with next == self.apply(g)."""
        D = self.disc()
        s = math.isqrt(D)
        C = self.C
        c2 = 2 * abs(C)
        if C * C < D:
            # reduced target window (sqrt(D) - 2|C|, sqrt(D))
            Bn = s - ((s + self.B) % c2)
        else:
            r = (-self.B) % c2
            Bn = r if r <= abs(C) else r - c2
        q, r = divmod(self.B + Bn, 2 * C)
        assert r == 0
        g = Mat2(0, -1, 1, q)
        nxt = QuadForm(C, Bn, (Bn * Bn - D) // (4 * C))
        return nxt, g

    def reduce(self):
        """Walk to a reduced form; returns (reduced, g) with reduced == self.apply(g)."""
        form, g = self, IDENTITY
        guard = 0
        while not form.is_reduced():
            form, step = form.reduction_step()
            g = g * step
            guard += 1
            assert guard < 10_000, "reduction failed to terminate"
        return form, g

    def cycle(self):
        """The cycle of reduced forms properly equivalent to self."""
        start, _ = self.reduce()
        out = [start]
        form, _ = start.reduction_step()
        guard = 0
        while form.tuple() != start.tuple():
            out.append(form)
            form, _ = form.reduction_step()
            guard += 1
            assert guard < 100_000, "cycle walk failed to close"
        return out

    def canonical(self):
        """Lexicographically smallest tuple on the reduced cycle; a proper
        class invariant."""
        return min(f.tuple() for f in self.cycle())

    def __eq__(self, other):
        return isinstance(other, QuadForm) and self.tuple() == other.tuple()

    def __hash__(self):
        return hash(("QuadForm",) + self.tuple())

    def __repr__(self):
        return f"QuadForm{self.tuple()}"


@lru_cache(maxsize=None)
def _reduced_forms(D: int):
    """All reduced forms of discriminant D (any content)."""
    _check_disc(D)
    out = []
    B = 2 - D % 2
    while B * B < D:
        M = (D - B * B) // 4
        for a in _divisors(M):
            twoa = 2 * a
            if (twoa + B) ** 2 <= D:
                continue
            if twoa > B and (twoa - B) ** 2 >= D:
                continue
            out.append(QuadForm(a, B, -(M // a)))
            out.append(QuadForm(-a, B, M // a))
        B += 2
    return tuple(out)


@lru_cache(maxsize=None)
def form_classes(D: int):
    """One reduced representative per proper class of *primitive* forms
    of discriminant D, sorted; len() is the proper (narrow-sense) class
    number.
    """
    seen = set()
    reps = []
    for f in _reduced_forms(D):
        if f.tuple() in seen or f.content() != 1:
            continue
        cyc = f.cycle()
        seen.update(g.tuple() for g in cyc)
        reps.append(QuadForm(*min(g.tuple() for g in cyc)))
    reps.sort(key=QuadForm.tuple)
    return tuple(reps)


@lru_cache(maxsize=None)
def pell_fundamental(D: int):
    """Fundamental (t, u), t, u > 0, of t**2 - D*u**2 = 4.

    Obtained by composing the transition matrices once around the
    reduced cycle of a primitive form of discriminant D; the first
    return is the fundamental automorph.
    """
    _check_disc(D)
    start = None
    for f in _reduced_forms(D):
        if f.content() == 1:
            start = f
            break
    assert start is not None, "principal class always provides a primitive form"
    g = IDENTITY
    form, step = start.reduction_step()
    g = g * step
    guard = 0
    while form.tuple() != start.tuple():
        form, step = form.reduction_step()
        g = g * step
        guard += 1
        assert guard < 100_000, "cycle walk failed to close"
    t = abs(g.trace())
    u = abs(g.c) // abs(start.A) if start.A else abs(g.b)
    assert t * t - D * u * u == 4, (D, g.entries())
    return t, u


def class_representative(form: QuadForm, t: int, u: int) -> Mat2:
    """Automorph of `form` attached to the Pell solution (t, u)."""
    A, B, C = form.tuple()
    assert (t - B * u) % 2 == 0
    M = Mat2((t - B * u) // 2, -C * u, A * u, (t + B * u) // 2)
    assert M.det() == 1 and M.trace() == t
    return M


def norm_from_trace(t: int) -> QuadraticSurd:
    """N = ((t + sqrt(t**2-4))/2)**2, the common norm of all classes of
    trace t."""
    if t < 3:
        raise ValueError("hyperbolic classes have trace >= 3")
    return QuadraticSurd(t * t - 2, t, t * t - 4, 2)


@dataclass(frozen=True)
class GeodesicClass:
    """One conjugacy class: m-th power of a primitive class of
    discriminant disc, materialized at trace."""

    rep: Mat2
    trace: int
    disc: int  # discriminant of the primitive part
    content: int  # u in the Pell solution (trace, u); 1 iff primitive at this trace
    fundamental: tuple  # (t0, u0) fundamental solution for disc
    power: int  # m with norm == primitive_norm**m
    form: QuadForm  # primitive form representative (cycle-canonical)
    norm: QuadraticSurd  # exact norm
    lam: float  # log of the primitive norm

    @property
    def is_primitive(self) -> bool:
        return self.power == 1

    @property
    def norm_float(self) -> float:
        return float(self.norm)

    def norm_mpf(self, dps: int = 40):
        return self.norm.mpf(dps)

    def sort_key(self):
        return (self.trace, self.content, self.disc) + self.form.tuple()


def _factor(n: int) -> dict:
    out = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    p = 5
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 2 if p % 6 == 5 else 4  # 5,7,11,13,... wheel
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _divisors(n: int):
    out = [1]
    for p, e in _factor(n).items():
        out = [d * p ** k for d in out for k in range(e + 1)]
    return sorted(out)


def _square_divisors(n: int):
    out = [1]
    for p, e in _factor(n).items():
        out = [d * p ** k for d in out for k in range(e // 2 + 1)]
    return sorted(out)


def _power_index(D: int, t: int, u: int) -> int:
    """m such that ((t + u*sqrt(D))/2) is the m-th power of the
    fundamental unit of the Pell equation for D."""
    t0, u0 = pell_fundamental(D)
    eps0 = QuadraticSurd(t0, u0, D, 2)
    target = QuadraticSurd(t, u, D, 2)
    power = eps0
    m = 1
    while power != target:
        power = power * eps0
        m += 1
        assert m < 200, "power index search ran away"
    return m


def _classes_of_trace(t: int, include_powers: bool):
    delta = t * t - 4
    out = []
    norm = norm_from_trace(t)
    for u in _square_divisors(delta):
        D = delta // (u * u)
        if D % 4 not in (0, 1):
            continue
        m = _power_index(D, t, u)
        if m > 1 and not include_powers:
            continue
        t0, u0 = pell_fundamental(D)
        lam = 2.0 * math.log(float(QuadraticSurd(t0, u0, D, 2)))
        for form in form_classes(D):
            out.append(
                GeodesicClass(
                    rep=class_representative(form, t, u),
                    trace=t,
                    disc=D,
                    content=u,
                    fundamental=(t0, u0),
                    power=m,
                    form=form,
                    norm=norm,
                    lam=lam,
                )
            )
    out.sort(key=GeodesicClass.sort_key)
    return out


def _trace_ceiling(x) -> int:
    """Largest t with norm_from_trace(t) <= x (2 when empty)."""
    bound = QuadraticSurd.from_rational(Fraction(x))
    # norm(t) ~ t**2, so start near sqrt(x) and fix up exactly
    t = max(3, math.isqrt(max(0, int(x))))
    while t >= 3 and norm_from_trace(t) > bound:
        t -= 1
    if t < 3:
        return 2
    while norm_from_trace(t + 1) <= bound:
        t += 1
    return t


def _shard_worker(args):
    lo, hi, include_powers = args
    out = []
    for t in range(lo, hi):
        out.extend(_classes_of_trace(t, include_powers))
    return out


def enumerate_classes(x, include_powers: bool = True, shards: int = 1, workers: int = 1):
    """All hyperbolic classes with norm <= x, sorted by norm (trace).

    x may be int, float, or Fraction and is compared exactly.  With
    include_powers=False only primitive classes are returned.  The trace
    range can be partitioned into `shards` blocks evaluated by up to
    `workers` processes; the merge is deterministic and independent of
    the shard count.
    """
    if shards < 1 or workers < 1:
        raise ValueError("shards and workers must be >= 1")
    t_top = _trace_ceiling(x)
    if t_top < 3:
        return []
    traces = range(3, t_top + 1)
    if shards == 1 or len(traces) <= 1:
        jobs = [(3, t_top + 1, include_powers)]
    else:
        shards = min(shards, len(traces))
        step = -(-len(traces) // shards)
        jobs = [
            (3 + i * step, min(3 + (i + 1) * step, t_top + 1), include_powers)
            for i in range(shards)
            if 3 + i * step <= t_top
        ]
    if workers == 1:
        blocks = [_shard_worker(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(_shard_worker, jobs))
    out = []
    for b in blocks:  # trace blocks are already norm-ordered
        out.extend(b)
    return out


# ---------------------------------------------------------------------------
# brute-force oracle


def class_key(cls_or_mat) -> tuple:
    """Conjugacy invariant (trace, content, canonical primitive form)."""
    if isinstance(cls_or_mat, GeodesicClass):
        return (cls_or_mat.trace, cls_or_mat.content) + cls_or_mat.form.canonical()
    M = cls_or_mat
    if M.trace() < 0:
        M = -M
    t = M.trace()
    assert t > 2, "hyperbolic matrices only"
    form = QuadForm(M.c, M.d - M.a, -M.b)
    g = form.content()
    return (t, g) + form.primitive_part().canonical()


def brute_force_classes(x):
    """Independent enumeration: scan all matrices with entries bounded by
    the maximal trace, dedupe by conjugacy invariants.

    Every class of trace t contains an automorph representative with all
    entries below t, so the entry bound t_max is exhaustive.  Returns a
    sorted list of class keys (with multiplicity); desk scale, x <= 500.
    """
    if float(x) > 500:
        raise ValueError("brute force is limited to x <= 500")
    t_top = _trace_ceiling(x)
    keys = set()
    B = t_top
    for c in range(-B, B + 1):
        if c == 0:
            continue
        for d in range(-B, B + 1):
            for a in range(-B, B + 1):
                num = a * d - 1
                if num % c:
                    continue
                b = num // c
                t = abs(a + d)
                if t < 3 or t > t_top:
                    continue
                keys.add(class_key(Mat2(a, b, c, d)))
    return sorted(keys)
