"""Kloosterman sums by explicit double-coset enumeration.

Sums are assembled as exact term lists [(coeff, phase)] with rational
coefficients and rational phases (in turns), so tests can certify
equalities through cyclotomic reduction; the complex value is a thin
float view of the same list.  Only the cusp pair (infinity, infinity)
is implemented: there the stabilizer is generated by T and every
modulus is an integer.  Other cusp pairs need scaling-matrix choices
that are not pinned down here.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .arith import RootOfUnity
from .geodesics import Mat2
from .multipliers import (
    THETA_CUSP_INFINITY,
    evaluate_scalar_multiplier,
    evaluate_theta_multiplier,
)

__all__ = [
    "DoubleCosetRep",
    "double_coset_reps",
    "kloosterman_terms",
    "kloosterman_sum",
    "vector_kloosterman",
    "vector_kloosterman_terms",
    "eisenstein_coeff_partial",
]

# scalar systems, keyed by CLI tag: (group tag, kappa at infinity, weight)
_SCALAR_SYSTEMS = {
    "trivial": ("sl2z", Fraction(0), Fraction(0)),
    "theta": ("gamma0_2", Fraction(1, 8), Fraction(1, 2)),
}


@dataclass(frozen=True)
class DoubleCosetRep:
    """One representative of Gamma_infinity \\ Gamma / Gamma_infinity."""

    c: int
    mat: Mat2

    @property
    def a(self) -> int:
        return self.mat.a

    @property
    def d(self) -> int:
        return self.mat.d

    def shifted(self, alpha: int, beta: int) -> Mat2:
        """The lift T**alpha * mat * T**beta of the same double coset."""
        t = Mat2(1, 1, 0, 1)
        return t ** alpha * self.mat * t ** beta


def _check_modulus(c: int, group: str) -> None:
    if c < 1:
        raise ValueError("modulus must be a positive integer")
    if group == "sl2z":
        return
    if group == "gamma0_2":
        if c % 2:
            raise ValueError(f"modulus {c} is odd; Gamma_0(2) needs c even")
        return
    raise ValueError(f"unknown group tag {group!r}")


def double_coset_reps(c: int, group: str = "sl2z"):
    """All (a,b;c,d) with 0 <= d < c, ad = 1 (mod c), one per coset.

    The count is phi(c); for c = 1 the single representative is S.
    """
    _check_modulus(c, group)
    reps = []
    for d in range(c):
        if math.gcd(d, c) != 1:
            continue
        a = pow(d, -1, c)
        b = (a * d - 1) // c
        reps.append(DoubleCosetRep(c, Mat2(a, b, c, d)))
    return reps


def _scalar_weight(g: Mat2, tag: str) -> Fraction:
    """Phase (in turns) of the conjugated multiplier value at g."""
    if tag == "trivial":
        return Fraction(0)
    return -evaluate_scalar_multiplier(g, 2).q


def kloosterman_terms(m: int, n: int, c: int, multiplier: str = "trivial"):
    """S(m, n, c, nu) as exact [(coeff, phase)] with phases in turns.

    Each double-coset representative contributes
    conj(nu(gamma)) e(((m + kappa) a + (n + kappa) d) / c); for the
    trivial system this is the classical sum S(m, n; c).
    """
    if multiplier not in _SCALAR_SYSTEMS:
        raise ValueError(f"unknown multiplier tag {multiplier!r}")
    group, kappa, _ = _SCALAR_SYSTEMS[multiplier]
    terms = []
    for rep in double_coset_reps(c, group):
        phase = ((m + kappa) * rep.a + (n + kappa) * rep.d) / Fraction(c)
        terms.append((Fraction(1), (phase + _scalar_weight(rep.mat, multiplier)) % 1))
    return terms


def _terms_value(terms) -> complex:
    return sum(
        (float(co) * cmath.exp(2j * cmath.pi * float(ph)) for co, ph in terms), 0j
    )


def kloosterman_sum(m: int, n: int, c: int, multiplier: str = "trivial") -> complex:
    return _terms_value(kloosterman_terms(m, n, c, multiplier))


def vector_kloosterman_terms(ell: int, m: int, n: int, c: int):
    """Exact term list of the component-ell vector sum for nu_Theta.

    Weights are (f^H conj(nu_Theta(gamma)) f) / <f, f> with the integer
    eigenframe of nu_Theta(T) from THETA_CUSP_INFINITY, and both index
    offsets are kappa_ell.  Runs over the full modular group, any c.
    """
    if ell not in (1, 2, 3):
        raise ValueError("component must be 1, 2, or 3")
    kappa = THETA_CUSP_INFINITY.kappas[ell - 1]
    frame = THETA_CUSP_INFINITY.frame[ell - 1]
    norm2 = THETA_CUSP_INFINITY.frame_norm2(ell - 1)
    terms = []
    for rep in double_coset_reps(c, "sl2z"):
        xi = evaluate_theta_multiplier(rep.mat)
        phase = ((m + kappa) * rep.a + (n + kappa) * rep.d) / Fraction(c)
        for i in range(3):
            coeff = Fraction(frame[i] * frame[xi.perm[i]], norm2)
            if coeff:
                terms.append((coeff, (phase - xi.phases[i].q) % 1))
    return terms


def vector_kloosterman(ell: int, m: int, n: int, c: int, frame=None) -> complex:
    """Component-ell vector Kloosterman sum; complex value.

    frame overrides the eigenvector (a length-3 complex sequence, any
    normalization and phase); the result must not depend on either,
    which is what the override is there to demonstrate.
    """
    if frame is None:
        return _terms_value(vector_kloosterman_terms(ell, m, n, c))
    if ell not in (1, 2, 3):
        raise ValueError("component must be 1, 2, or 3")
    kappa = THETA_CUSP_INFINITY.kappas[ell - 1]
    f = [complex(v) for v in frame]
    norm2 = sum(abs(v) ** 2 for v in f)
    total = 0j
    for rep in double_coset_reps(c, "sl2z"):
        xi = evaluate_theta_multiplier(rep.mat).to_array().conj()
        w = sum(f[i].conjugate() * xi[i, j] * f[j] for i in range(3) for j in range(3))
        phase = float((m + kappa) * rep.a + (n + kappa) * rep.d) / c
        total += (w / norm2) * cmath.exp(2j * cmath.pi * phase)
    return total


def eisenstein_coeff_partial(
    n: int, s: complex, c_max: int, multiplier: str = "trivial"
):
    """Partial Fourier coefficient of the Eisenstein series at infinity.

    prefactor * sum_{allowed c <= c_max} S(0, n, c, nu) / c^(2s), where
    the prefactor carries the gamma factors:
        n_b != 0:  e(-k/4) pi^s |n_b|^(s-1) / Gamma(s + (k/2) sgn n_b)
        n_b == 0:  e(-k/4) 4^(1-s) pi Gamma(2s-1) / (Gamma(s+k/2) Gamma(s-k/2))
    with n_b = n + kappa.  Returns (value, |last increment|); the second
    entry is the convergence indicator.
    """
    if multiplier not in _SCALAR_SYSTEMS:
        raise ValueError(f"unknown multiplier tag {multiplier!r}")
    group, kappa, k = _SCALAR_SYSTEMS[multiplier]
    s = mpmath.mpmathify(s)
    n_b = n + kappa
    front = complex(RootOfUnity(-k * Fraction(1, 4)).value)
    if n_b != 0:
        pref = front * complex(
            mpmath.pi ** s
            * abs(float(n_b)) ** (s - 1)
            / mpmath.gamma(s + (float(k) / 2) * (1 if n_b > 0 else -1))
        )
    else:
        pref = front * complex(
            4 ** (1 - s)
            * mpmath.pi
            * mpmath.gamma(2 * s - 1)
            / (mpmath.gamma(s + float(k) / 2) * mpmath.gamma(s - float(k) / 2))
        )
    step = 2 if group == "gamma0_2" else 1
    total = 0j
    last = 0.0
    for c in range(step, c_max + 1, step):
        inc = kloosterman_sum(0, n, c, multiplier) * complex(mpmath.power(c, -2 * s))
        total += inc
        last = abs(inc)
    return pref * total, last
