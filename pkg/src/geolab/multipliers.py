"""Multiplier systems on the modular group and the cubic Kubota character.

The 3-fold theta multiplier nu_Theta is the weight-1/2 system of the
vector (theta2, theta3, theta4); its values on T and S were measured
once against the theta series and are frozen here as exact constants,
with arbitrary group elements evaluated by a generator-word walk plus
factor-system corrections.  All values are monomial matrices over roots
of unity, so the arithmetic stays exact end to end.  The numerical
theta-series oracle that calibrated the constants lives in this module
so tests and users can re-derive them at will.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import (
    EisensteinInt,
    RootOfUnity,
    cubic_residue_symbol,
    jacobi_extended,
)
from .geodesics import GeodesicClass, Mat2

__all__ = [
    "MultiplierMatrix",
    "GeneratorWord",
    "CuspData",
    "THETA_CUSP_INFINITY",
    "NU_T",
    "NU_S",
    "NU_MINUS_I",
    "factor_system",
    "word_decompose",
    "evaluate_theta_multiplier",
    "theta_component",
    "theta_oracle",
    "evaluate_scalar_multiplier",
    "kubota_character",
    "class_trace",
]

ONE = RootOfUnity(0)
T_MAT = Mat2(1, 1, 0, 1)
S_MAT = Mat2(0, -1, 1, 0)


class MultiplierMatrix:
    """Monomial unitary matrix: row i carries phases[i] in column perm[i].

    Products of the frozen generator values never leave this class, and
    multiplication, inversion, and traces are exact.
    """

    __slots__ = ("perm", "phases")

    def __init__(self, perm, phases):
        perm = tuple(perm)
        phases = tuple(phases)
        if sorted(perm) != list(range(len(perm))) or len(phases) != len(perm):
            raise ValueError("not a monomial shape")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "phases", phases)

    def __setattr__(self, *a):
        raise AttributeError("MultiplierMatrix is immutable")

    def __reduce__(self):
        return (MultiplierMatrix, (self.perm, self.phases))

    @staticmethod
    def identity(dim: int) -> "MultiplierMatrix":
        return MultiplierMatrix(range(dim), (ONE,) * dim)

    @staticmethod
    def scalar(dim: int, phase: RootOfUnity) -> "MultiplierMatrix":
        return MultiplierMatrix(range(dim), (phase,) * dim)

    @property
    def dim(self) -> int:
        return len(self.perm)

    def entry(self, i: int, j: int):
        return self.phases[i] if self.perm[i] == j else 0

    def entries(self):
        return tuple(
            tuple(self.entry(i, j) for j in range(self.dim)) for i in range(self.dim)
        )

    def __mul__(self, other):
        if isinstance(other, MultiplierMatrix):
            if self.dim != other.dim:
                raise ValueError("dimension mismatch")
            perm = tuple(other.perm[self.perm[i]] for i in range(self.dim))
            phases = tuple(
                self.phases[i] * other.phases[self.perm[i]] for i in range(self.dim)
            )
            return MultiplierMatrix(perm, phases)
        if isinstance(other, RootOfUnity):
            return MultiplierMatrix(self.perm, tuple(p * other for p in self.phases))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, RootOfUnity):
            return self * other
        return NotImplemented

    def conj_transpose(self) -> "MultiplierMatrix":
        inv = [0] * self.dim
        for i, j in enumerate(self.perm):
            inv[j] = i
        return MultiplierMatrix(
            inv, tuple(self.phases[inv[j]].conjugate() for j in range(self.dim))
        )

    def __pow__(self, n: int) -> "MultiplierMatrix":
        base = self if n >= 0 else self.conj_transpose()
        n = abs(n)
        out = MultiplierMatrix.identity(self.dim)
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_unitary(self) -> bool:
        return self * self.conj_transpose() == MultiplierMatrix.identity(self.dim)

    def trace_terms(self):
        """Exact diagonal phases at the fixed points of the permutation."""
        return tuple(
            self.phases[i] for i in range(self.dim) if self.perm[i] == i
        )

    def trace(self) -> complex:
        return sum((t.value for t in self.trace_terms()), 0j)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for i in range(self.dim):
            out[i, self.perm[i]] = self.phases[i].value
        return out

    def __eq__(self, other):
        if not isinstance(other, MultiplierMatrix):
            return NotImplemented
        return self.perm == other.perm and self.phases == other.phases

    def __hash__(self):
        return hash((self.perm, self.phases))

    def __repr__(self):
        return f"MultiplierMatrix(perm={self.perm}, phases={self.phases})"


# frozen generator values, calibrated once against theta_oracle:
#   nu(T): component 1 picks up e(1/8), components 2 and 3 swap;
#   nu(S): antidiagonal flip of components 1 and 3 times a common e(-1/8);
#   nu(-I) = e(-k pi i) I with k = 1/2.
NU_T = MultiplierMatrix((0, 2, 1), (RootOfUnity(Fraction(1, 8)), ONE, ONE))
NU_S = MultiplierMatrix((2, 1, 0), (RootOfUnity(Fraction(-1, 8)),) * 3)
NU_MINUS_I = MultiplierMatrix.scalar(3, RootOfUnity(Fraction(-1, 4)))


# ---------------------------------------------------------------------------
# factor system


def _arg(c: int, d: int) -> float:
    """Principal argument of c*i + d, in (-pi, pi]."""
    if c == 0:
        return 0.0 if d > 0 else math.pi
    hi = max(abs(c), abs(d)).bit_length()
    if hi > 500:  # keep float conversion in range; the ratio is what matters
        s = hi - 60
        c, d = c >> s if c >= 0 else -((-c) >> s), d >> s if d >= 0 else -((-d) >> s)
    return math.atan2(c, d)


def omega_tilde(g1: Mat2, g2: Mat2) -> int:
    """The integer (arg i(g1, g2 z) + arg i(g2, z) - arg i(g1 g2, z))/2pi
    at z = i."""
    # g2(i) = (p + i)/q exactly
    p = g2.a * g2.c + g2.b * g2.d
    q = g2.c * g2.c + g2.d * g2.d
    a1 = _arg(g1.c, g1.c * p + g1.d * q)
    a2 = _arg(g2.c, g2.d)
    g12 = g1 * g2
    a3 = _arg(g12.c, g12.d)
    w = (a1 + a2 - a3) / (2 * math.pi)
    n = round(w)
    assert abs(w - n) < 0.25 and -1 <= n <= 1, (g1, g2, w)
    return n


def factor_system(g1: Mat2, g2: Mat2, k) -> RootOfUnity:
    """omega(g1, g2) = e(k * omega_tilde) of weight k."""
    k = Fraction(k)
    if k == 0:
        return ONE
    return RootOfUnity(k * omega_tilde(g1, g2))


# ---------------------------------------------------------------------------
# generator words


@dataclass(frozen=True)
class GeneratorWord:
    """Run-length word over T and S whose product is sign * source."""

    factors: tuple  # of ("T", n) with n != 0, or ("S", 1)
    sign: int

    def matrix(self) -> Mat2:
        out = Mat2(1, 0, 0, 1)
        for tok, n in self.factors:
            out = out * (T_MAT ** n if tok == "T" else S_MAT)
        return out if self.sign == 1 else -out

    def letter_count(self) -> int:
        return sum(abs(n) if tok == "T" else 1 for tok, n in self.factors)


def word_decompose(g: Mat2) -> GeneratorWord:
    """Euclidean descent on the first column; product is +-g with the
    sign recorded."""
    if g.det() != 1:
        raise ValueError("not in SL2(Z)")
    a, b, c, d = g.entries()
    factors = []
    while c != 0:
        n = a // c
        if n:
            factors.append(("T", n))
        # S^{-1} T^{-n} (a,b;c,d) = (c, d; -(a-nc), -(b-nd))
        a, b, c, d = c, d, -(a - n * c), -(b - n * d)
        factors.append(("S", 1))
    # what's left is +-T^m with a == d == +-1
    if a == 1:
        if b:
            factors.append(("T", b))
        sign = 1
    else:
        if b:
            factors.append(("T", -b))
        sign = -1
    word = GeneratorWord(tuple(factors), sign)
    assert word.matrix() == g
    return word


def evaluate_theta_multiplier(g: Mat2) -> MultiplierMatrix:
    """nu_Theta(g) by word evaluation with weight-1/2 cocycle corrections."""
    word = word_decompose(g)
    value = MultiplierMatrix.identity(3)
    suffix = Mat2(1, 0, 0, 1)
    for tok, n in reversed(word.factors):
        gmat = T_MAT ** n if tok == "T" else S_MAT
        gval = NU_T ** n if tok == "T" else NU_S
        if suffix == Mat2(1, 0, 0, 1):
            value, suffix = gval, gmat
            continue
        value = factor_system(gmat, suffix, Fraction(1, 2)) * gval * value
        suffix = gmat * suffix
    if word.sign == -1:
        minus = Mat2(-1, 0, 0, -1)
        value = factor_system(minus, suffix, Fraction(1, 2)) * NU_MINUS_I * value
        suffix = -suffix
    assert suffix == g
    return value


# ---------------------------------------------------------------------------
# theta series oracle


def theta_component(which: int, x: Fraction, y: float) -> complex:
    """theta_{which}(x + iy) with the phase reduced exactly mod 2 before
    any float enters; terms below 1e-20 are dropped."""
    if y <= 0:
        raise ValueError("need Im(z) > 0")
    x = Fraction(x)
    p, q = x.numerator, x.denominator
    if which == 2:
        # sum over n of e(pi i (n+1/2)^2 z), n and -n-1 pair up
        n_top = math.isqrt(int(47 / (math.pi * y))) + 2
        total = 0j
        for n in range(n_top):
            m = (2 * n + 1) ** 2
            amp = math.exp(-math.pi * m * y / 4)
            if amp < 1e-20:
                break
            ang = math.pi * ((m * p) % (8 * q)) / (4 * q)
            total += 2 * amp * complex(math.cos(ang), math.sin(ang))
        return total
    if which not in (3, 4):
        raise ValueError("component must be 2, 3, or 4")
    n_top = math.isqrt(int(47 / (math.pi * y))) + 2
    total = 1 + 0j
    for n in range(1, n_top + 1):
        amp = math.exp(-math.pi * n * n * y)
        if amp < 1e-20:
            break
        if which == 4 and n % 2:
            amp = -amp
        ang = math.pi * ((n * n * p) % (2 * q)) / q
        total += 2 * amp * complex(math.cos(ang), math.sin(ang))
    return total


def _theta_vector(x: Fraction, y) -> np.ndarray:
    yf = float(y)
    return np.array([theta_component(w, x, yf) for w in (2, 3, 4)])


def _apply_mobius(g: Mat2, x: Fraction, y: Fraction):
    """g(x + iy) as exact rational coordinates, plus cz + d as a complex."""
    a, b, c, d = g.entries()
    cxd = c * x + d
    denom = cxd * cxd + c * c * y * y
    wx = ((a * x + b) * cxd + a * c * y * y) / denom
    wy = y / denom
    return wx, wy, complex(float(cxd), c * float(y))


_SAMPLE_SHIFTS = (
    (Fraction(0), Fraction(1)),
    (Fraction(1, 3), Fraction(1)),
    (Fraction(1, 7), Fraction(5, 4)),
)


def theta_oracle(g: Mat2, component: int | None = None, z0=None):
    """Numerically measured rows of nu_Theta(g) from the transformation
    law Theta(gz) = (cz+d)^(1/2) nu_Theta(g) Theta(z).

    Solves a 3x3 linear system over three nearby sample points (one
    point alone cannot separate the components: theta2(i) = theta4(i)).
    z0 = (x: Fraction, y: Fraction) shifts the sample cluster; default i.
    Returns the full 3x3 array, or one row if component in {1, 2, 3}.
    """
    if z0 is None:
        x0, y0 = Fraction(0), Fraction(1)
    else:
        x0, y0 = Fraction(z0[0]), Fraction(z0[1])
    rows_lhs = []
    rhs = []
    for dx, sy in _SAMPLE_SHIFTS:
        x, y = x0 + dx, y0 * sy
        wx, wy, czd = _apply_mobius(g, x, y)
        # principal square root; Im(cz+d) = c*y vanishes only for c = 0,
        # where cz + d = d is real and cmath.sqrt picks Arg in (-pi, pi]
        rows_lhs.append(cmath.sqrt(czd) * _theta_vector(x, y))
        rhs.append(_theta_vector(wx, wy))
    lhs = np.array(rows_lhs)
    out = np.linalg.solve(lhs, np.array(rhs)).T
    if component is None:
        return out
    if component not in (1, 2, 3):
        raise ValueError("component must be 1, 2, or 3")
    return out[component - 1]


# ---------------------------------------------------------------------------
# scalar multipliers and the Kubota character


def evaluate_scalar_multiplier(g: Mat2, which: int) -> RootOfUnity:
    """Closed forms for the component multipliers nu_2, nu_3, nu_4.

    nu_2 on Gamma_0(2) is (c/d) e((d-1+bd)/8) with the sign-of-numerator
    symbol of jacobi_extended.  nu_3 on the theta group splits by parity
    class: (c/d) e((d-1)/8) when gamma = I mod 2, and (d/|c|) e(-c/8)
    when gamma = S mod 2, where the second symbol reduces d mod |c| and
    carries no sign factor (measured against the theta series; the
    sign-rule symbol is off by -1 when c and d are both negative).
    nu_4(gamma) = nu_3(T^-1 gamma T) on the group with b even.
    """
    a, b, c, d = g.entries()
    if g.det() != 1:
        raise ValueError("not in SL2(Z)")
    if which == 2:
        if c % 2:
            raise ValueError("nu_2 needs c even (Gamma_0(2))")
        jac = jacobi_extended(c, d)
        val = RootOfUnity(Fraction(d - 1 + b * d, 8))
    elif which == 3:
        if b % 2 == 0 and c % 2 == 0:
            jac = jacobi_extended(c, d)
            val = RootOfUnity(Fraction(d - 1, 8))
        elif a % 2 == 0 and d % 2 == 0:
            jac = jacobi_extended(d % abs(c), abs(c))
            val = RootOfUnity(Fraction(-c, 8))
        else:
            raise ValueError("nu_3 needs gamma = I or S mod 2 (theta group)")
    elif which == 4:
        if b % 2:
            raise ValueError("nu_4 needs b even (upper Gamma^0(2))")
        return evaluate_scalar_multiplier(
            Mat2(1, -1, 0, 1) * g * Mat2(1, 1, 0, 1), 3
        )
    else:
        raise ValueError("which must be 2, 3, or 4")
    if jac == 0:
        raise ValueError("Jacobi symbol degenerate; matrix not unimodular?")
    return val if jac == 1 else -val


def _as_eisenstein_mat(g: Mat2) -> Mat2:
    def coerce(v):
        return v if isinstance(v, EisensteinInt) else EisensteinInt(v)

    return Mat2(*(coerce(v) for v in g.entries()))


def _is_identity_mod3(g: Mat2) -> bool:
    offdiag = (g.b, g.c)
    diag = (g.a - EisensteinInt(1), g.d - EisensteinInt(1))
    return all(e.a % 3 == 0 and e.b % 3 == 0 for e in offdiag + diag)


def _kubota_gamma1(g: Mat2) -> RootOfUnity:
    if g.c.is_zero():
        return ONE
    if g.d.is_unit():  # (c/1)_3 is the empty product
        return ONE
    sym = cubic_residue_symbol(g.c, g.d)
    assert sym != 0, "c and d are coprime for determinant 1"
    return sym


def _is_rational_mod3(g: Mat2) -> bool:
    return all(e.b % 3 == 0 for e in g.entries())


def _sl2z_lift_table():
    """Integer lifts for all of SL2(Z/3), built from short T/S words."""
    table = {}
    frontier = [Mat2(1, 0, 0, 1)]
    table[(1, 0, 0, 1)] = frontier[0]
    while frontier:
        nxt = []
        for m in frontier:
            for step in (T_MAT, T_MAT.inverse(), S_MAT):
                cand = m * step
                key = tuple(v % 3 for v in cand.entries())
                if key not in table:
                    table[key] = cand
                    nxt.append(cand)
        frontier = nxt
    assert len(table) == 24
    return table


_LIFTS = None


def kubota_character(g: Mat2) -> RootOfUnity:
    """chi_3 on Gamma_2 = <PSL2(Z), Gamma_1(3)> over Z[omega].

    On Gamma_1(3) this is the cubic symbol (c/d)_3 (or 1 when c = 0); a
    general element is shifted by an SL2(Z) lift of its reduction mod 3,
    which carries character value 1.  Defined on PSL classes: g and -g
    agree.
    """
    g = _as_eisenstein_mat(g)
    if g.det() != 1:
        raise ValueError("determinant must be 1")
    for cand in (g, -g):
        if _is_identity_mod3(cand):
            return _kubota_gamma1(cand)
    if not _is_rational_mod3(g):
        raise ValueError("not in Gamma_2: reduction mod 3 is not rational")
    global _LIFTS
    if _LIFTS is None:
        _LIFTS = _sl2z_lift_table()
    key = tuple(v.a % 3 for v in g.entries())
    sigma = _LIFTS.get(key)
    if sigma is None:
        raise ValueError("not in Gamma_2: reduction mod 3 misses SL2(Z/3)")
    eta = _as_eisenstein_mat(sigma.inverse()) * g
    for cand in (eta, -eta):
        if _is_identity_mod3(cand):
            return _kubota_gamma1(cand)
    raise AssertionError("lift failed to land in Gamma_1(3)")


# ---------------------------------------------------------------------------
# cusp data and class traces


@dataclass(frozen=True)
class CuspData:
    """Stabilizer eigendata at a cusp: e(kappa) eigenvalues with an
    unnormalized rational eigenbasis (norms carried separately)."""

    label: str
    kappas: tuple  # of Fraction in [0, 1)
    frame: tuple  # of integer-vector rows, unnormalized

    def frame_norm2(self, ell: int) -> int:
        return sum(v * v for v in self.frame[ell])


# nu_Theta(T) has eigenvalues e(1/8), 1, -1 with this eigenbasis
THETA_CUSP_INFINITY = CuspData(
    label="infinity",
    kappas=(Fraction(1, 8), Fraction(0), Fraction(1, 2)),
    frame=((1, 0, 0), (0, 1, 1), (0, 1, -1)),
)


def class_trace(cls: GeodesicClass, multiplier: str) -> complex:
    """tr(nu(gamma)) at the class representative."""
    if multiplier == "trivial":
        return 1 + 0j
    if multiplier == "theta":
        return evaluate_theta_multiplier(cls.rep).trace()
    if multiplier == "kubota":
        return kubota_character(cls.rep).value
    raise ValueError(f"unknown multiplier tag {multiplier!r}")
