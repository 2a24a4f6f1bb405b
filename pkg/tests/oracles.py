"""Independent brute-force oracles used to freeze expected values.

These deliberately avoid the library's algorithmic paths: residue
symbols go through Euler congruences in the quotient field, Pell
solutions through ascending search, and so on.
"""

from __future__ import annotations

import math
from fractions import Fraction

from geolab.arith import EisensteinInt, RootOfUnity


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
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


def primes_up_to(n: int):
    sieve = bytearray([1]) * (n + 1)
    sieve[:2] = b"\x00\x00"
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [p for p in range(n + 1) if sieve[p]]


def legendre_euler(c: int, p: int) -> int:
    """Euler-criterion Legendre symbol for odd prime p."""
    c %= p
    if c == 0:
        return 0
    v = pow(c, (p - 1) // 2, p)
    return 1 if v == 1 else -1


def eisenstein_primes_up_to_norm(nmax: int):
    """One representative per prime ideal of Z[omega] with norm <= nmax,
    excluding the ramified prime above 3."""
    out = []
    for p in primes_up_to(nmax):
        if p == 3:
            continue
        if p % 3 == 2:
            if p * p <= nmax:
                out.append(EisensteinInt(p))
        else:
            for b in range(1, math.isqrt(4 * p // 3) + 1):
                disc = 4 * p - 3 * b * b
                s = math.isqrt(disc)
                if s * s == disc and (b + s) % 2 == 0:
                    a = (b + s) // 2
                    pi = EisensteinInt(a, b)
                    assert pi.norm() == p
                    out.append(pi)
                    out.append(pi.conjugate())
                    break
            else:
                raise AssertionError(f"no split representation for {p}")
    return out


def _eis_powmod(x: EisensteinInt, e: int, q: int) -> EisensteinInt:
    # power in Z[omega]/q, coefficients reduced mod q each step
    out = EisensteinInt(1)
    x = EisensteinInt(x.a % q, x.b % q)
    while e:
        if e & 1:
            y = out * x
            out = EisensteinInt(y.a % q, y.b % q)
        y = x * x
        x = EisensteinInt(y.a % q, y.b % q)
        e >>= 1
    return out


def cubic_symbol_euler(alpha: EisensteinInt, pi: EisensteinInt):
    """(alpha/pi)_3 via alpha**((N(pi)-1)/3) = omega**j (mod pi), pi prime.

    Returns RootOfUnity(j/3) or the integer 0.  Runs in the quotient
    field: F_p for split pi, F_{q^2} for inert pi.
    """
    n = pi.norm()
    if n % 3 == 0:
        raise ValueError("ramified prime")
    if is_prime(n):
        p = n
        omega_img = (-pi.a) * pow(pi.b % p, -1, p) % p
        m = (alpha.a + alpha.b * omega_img) % p
        if m == 0:
            return 0
        v = pow(m, (p - 1) // 3, p)
        for j in range(3):
            if v == pow(omega_img, j, p):
                return RootOfUnity(Fraction(j, 3))
        raise AssertionError("Euler power not a cube root of unity")
    q = math.isqrt(n)
    assert q * q == n and is_prime(q) and q % 3 == 2
    if alpha.a % q == 0 and alpha.b % q == 0:
        return 0
    v = _eis_powmod(alpha, (q * q - 1) // 3, q)
    targets = {
        (1, 0): 0,
        (0, 1): 1,
        ((-1) % q, (-1) % q): 2,
    }
    key = (v.a % q, v.b % q)
    if key not in targets:
        raise AssertionError("Euler power not a cube root of unity")
    return RootOfUnity(Fraction(targets[key], 3))


def pell_fundamental_ascending(D: int, u_cap: int | None = None):
    """Smallest (t, u) with t*t - D*u*u = 4 by ascending search over u."""
    u = 1
    while u_cap is None or u <= u_cap:
        tt = 4 + D * u * u
        t = math.isqrt(tt)
        if t * t == tt:
            return t, u
        u += 1
    return None


def _icbrt(n: int) -> int:
    if n <= 0:
        return 0
    x = 1 << ((n.bit_length() + 2) // 3)
    while True:
        y = (2 * x + n // (x * x)) // 3
        if y >= x:
            return x
        x = y


def pell_fundamental_cf(D: int):
    """Fundamental (t, u) of t*t - D*u*u = 4 via the continued fraction
    of sqrt(D).

    Convergents give the least (x1, y1) with x1*x1 - D*y1*y1 = 1; the
    equation with 4 on the right is solved by (2*x1, 2*y1) unless the
    half-integral unit exists, in which case the fundamental solution is
    its cube root: t*t*t - 3*t = 2*x1 with (t*t - 4)/D a perfect square.
    For D = 4*d the equation is (t/2)**2 - d*u**2 = 1 directly.
    """
    if D % 4 == 0:
        x1, y1 = _pell_one_cf(D // 4)
        return 2 * x1, y1
    x1, y1 = _pell_one_cf(D)
    c = _icbrt(2 * x1)
    for t in range(max(3, c - 2), c + 3):
        if t * t * t - 3 * t == 2 * x1:
            uu, r = divmod(t * t - 4, D)
            if r == 0:
                u = math.isqrt(uu)
                if u * u == uu:
                    return t, u
    return 2 * x1, 2 * y1


def _pell_one_cf(D: int):
    """Least (x, y), y > 0, with x*x - D*y*y = 1, from CF convergents."""
    a0 = math.isqrt(D)
    assert a0 * a0 != D
    # CF recurrence on sqrt(D): x_k = (P + sqrt(D)) / Q
    P, Q, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while True:
        P = a * Q - P
        Q = (D - P * P) // Q
        a = (a0 + P) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
        if p_prev * p_prev - D * q_prev * q_prev == 1:
            return p_prev, q_prev
        assert p.bit_length() < 10 ** 6


def kloosterman_direct_terms(m: int, n: int, c: int):
    """Classical S(m, n; c) as exact phase terms, inverses by scanning.

    Avoids pow(d, -1, c): the inverse is found by trying every residue,
    so agreement with the library certifies its modular arithmetic too.
    """
    assert c >= 1
    terms = []
    for d in range(c):
        for a in range(c):
            if (a * d - 1) % c == 0:
                terms.append((Fraction(1), Fraction(m * a + n * d, c) % 1))
                break
    return terms


def theta_group_scalar_terms(m: int, n: int, c: int, nu3):
    """Kloosterman-type sum for the theta subgroup with the theta3 system.

    Cosets of the translation subgroup inside the theta group with lower
    left entry c are enumerated by d mod 2c (the cusp width is 2, but the
    phases below use width-1 normalization so the result is comparable to
    width-1 sums).  Entry parities split by the parity of c:

      c even: a, d odd, b even  (identity type mod 2)
      c odd:  a, d even, b odd  (S type mod 2)

    ``nu3`` maps a matrix to its theta3 root of unity; the weight enters
    conjugated, as in the scalar sums.
    """
    from geolab.geodesics import Mat2

    assert c >= 1
    kap = Fraction(0)
    terms = []
    if c % 2 == 0:
        for d in range(2 * c):
            if math.gcd(d, 2 * c) != 1:
                continue
            a = pow(d, -1, 2 * c)
            b = (a * d - 1) // c
            if b % 2 != 0:
                continue
            g = Mat2(a, b, c, d)
            ph = (Fraction((m + kap) * a + (n + kap) * d, c) - nu3(g).q) % 1
            terms.append((Fraction(1), ph))
    else:
        for d in range(0, 2 * c, 2):
            if math.gcd(d, c) != 1:
                continue
            ainv = pow(d, -1, c) if c > 1 else 0
            a = ainv if ainv % 2 == 0 else ainv + c
            b = (a * d - 1) // c
            assert b % 2 == 1
            g = Mat2(a, b, c, d)
            ph = (Fraction((m + kap) * a + (n + kap) * d, c) - nu3(g).q) % 1
            terms.append((Fraction(1), ph))
    return terms
