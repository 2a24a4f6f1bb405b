"""Twisted Chebyshev-style counting functions and error diagnostics.

The 2-dimensional counter is materialized once as a PsiSeries (sorted
jump list with prefix sums) because moments and exponent fits evaluate
it thousands of times.  The 3-dimensional count over the Eisenstein
integers is a brute-force matrix enumeration whose conjugacy classes
are recovered by a union-find over generator conjugations; nothing
there is authoritative without the radius-doubling stability flag.
The cubic twist lives on an index-27 subgroup whose classes are not
re-enumerated; they are split off the full-group classes exactly in
the finite quotient mod 3.
"""

from __future__ import annotations

import bisect
import cmath
import heapq
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import EisensteinInt
from .geodesics import Mat2, enumerate_classes
from .multipliers import class_trace, kubota_character

__all__ = [
    "MainTermSpec",
    "MAIN_TERMS",
    "main_term",
    "PsiSeries",
    "build_psi",
    "error_at",
    "second_moment",
    "short_interval_diff",
    "fit_error_exponent",
    "Psi3Class",
    "Psi3Result",
    "psi3_bruteforce",
]


# ------------------------------------------------------------- main terms


@dataclass(frozen=True)
class MainTermSpec:
    """Residual-spectrum exponents (s_j, 1/s_j) of one counting problem."""

    terms: tuple

    def value(self, x: float) -> float:
        return sum(float(co) * x ** float(s) for s, co in self.terms)


MAIN_TERMS = {
    "trivial": MainTermSpec(((Fraction(1), Fraction(1)),)),
    "theta": MainTermSpec(((Fraction(3, 4), Fraction(4, 3)),)),
    "kubota": MainTermSpec(((Fraction(4, 3), Fraction(3, 4)),)),
}

# |k| entering the short-interval admissibility window y >= x^((1+|k|)/2)
_WEIGHTS = {"trivial": 0.0, "theta": 0.5}


def main_term(x: float, multiplier: str) -> float:
    """sum x^(s_j)/s_j over the residual exponents of the system."""
    if multiplier not in MAIN_TERMS:
        raise ValueError(f"unknown multiplier tag {multiplier!r}")
    if x < 1:
        raise ValueError("main term is defined for x >= 1")
    return MAIN_TERMS[multiplier].value(x)


# -------------------------------------------------------------- PsiSeries


@dataclass(frozen=True)
class PsiSeries:
    multiplier: str
    norms: np.ndarray  # strictly increasing jump positions
    weights: np.ndarray  # complex jump sizes
    prefix: np.ndarray  # prefix[i] = Psi(norms[i])
    x_max: float

    @classmethod
    def from_events(cls, multiplier: str, events, x_max: float) -> "PsiSeries":
        """Merge events at equal norms, sort, and take prefix sums."""
        merged: dict = {}
        for pos, w in events:
            merged[float(pos)] = merged.get(float(pos), 0j) + complex(w)
        norms = np.array(sorted(merged), dtype=float)
        weights = np.array([merged[p] for p in norms], dtype=complex)
        if multiplier == "trivial":
            assert np.all(weights.real > 0) and np.all(weights.imag == 0)
        return cls(multiplier, norms, weights, np.cumsum(weights), float(x_max))

    def value_at(self, x: float) -> complex:
        i = bisect.bisect_right(self.norms, x)
        return complex(self.prefix[i - 1]) if i else 0j

    def __len__(self) -> int:
        return len(self.norms)


def build_psi(x_max, multiplier: str = "trivial", shards: int = 1, workers: int = 1):
    if multiplier not in ("trivial", "theta"):
        raise ValueError(f"unknown multiplier tag {multiplier!r}")
    if x_max < 1:
        raise ValueError("x_max must be >= 1")
    events = [
        (c.norm_float, class_trace(c, multiplier) * c.lam)
        for c in enumerate_classes(x_max, include_powers=True, shards=shards, workers=workers)
    ]
    return PsiSeries.from_events(multiplier, events, x_max)


def error_at(series: PsiSeries, x: float) -> complex:
    if not 1 <= x <= series.x_max:
        raise ValueError(f"x={x} outside the built range [1, {series.x_max}]")
    return series.value_at(x) - main_term(x, series.multiplier)


def second_moment(series: PsiSeries, X: float, Y: float, nodes: int = 32) -> float:
    """((1/Y) int_X^{X+Y} |E(x)|^2 dx)^(1/2) by piecewise quadrature.

    Between jumps E is a smooth main term minus a constant, so each
    piece is integrated by Gauss-Legendre; long pieces are subdivided
    to keep the rule honest on the x^(s) curvature.
    """
    if X < 2 or Y <= 0 or X + Y > series.x_max:
        raise ValueError("window must satisfy X >= 2, Y > 0, X + Y <= x_max")
    lo = bisect.bisect_right(series.norms, X)
    hi = bisect.bisect_right(series.norms, X + Y)
    cuts = [X] + [float(p) for p in series.norms[lo:hi]] + [X + Y]
    xs_gl, ws_gl = np.polynomial.legendre.leggauss(nodes)
    spec = MAIN_TERMS[series.multiplier].terms
    total = 0.0
    step_cap = Y / 8
    for u, v in zip(cuts, cuts[1:]):
        if v <= u:
            continue
        psi_val = series.value_at(u)
        pieces = max(1, math.ceil((v - u) / step_cap))
        for j in range(pieces):
            a = u + (v - u) * j / pieces
            b = u + (v - u) * (j + 1) / pieces
            pts = (b + a) / 2 + (b - a) / 2 * xs_gl
            main = np.zeros_like(pts)
            for s, co in spec:
                main += float(co) * pts ** float(s)
            err2 = (psi_val.real - main) ** 2 + psi_val.imag ** 2
            total += (b - a) / 2 * float(np.dot(ws_gl, err2))
    return math.sqrt(total / Y)


def _binomial_main_diff(x: float, y: float, spec: MainTermSpec) -> float:
    """M(x+y) - M(x) expanded binomially; stable when y << x."""
    out = 0.0
    for s, co in spec.terms:
        sf = float(s)
        binom = 1.0
        acc = 0.0
        for ell in range(1, 200):
            binom *= (sf - ell + 1) / ell
            if binom == 0.0:
                break
            term = float(co) * binom * x ** (sf - ell) * y ** ell
            acc += term
            if abs(term) < 1e-12 * max(abs(acc), 1e-300):
                break
        out += acc
    return out


def short_interval_diff(series: PsiSeries, x: float, y: float):
    """(Psi(x+y) - Psi(x), binomial main-term difference)."""
    if y < 0 or x < 1 or x + y > series.x_max:
        raise ValueError("need 0 <= y and 1 <= x and x + y <= x_max")
    if y == 0:
        return 0j, 0.0
    k = _WEIGHTS[series.multiplier]
    if not x ** ((1 + k) / 2) <= y <= x:
        warnings.warn(
            f"window y={y} outside [x^{(1 + k) / 2}, x]; the main-term "
            "comparison is not meaningful there",
            RuntimeWarning,
            stacklevel=2,
        )
    lhs = series.value_at(x + y) - series.value_at(x)
    return lhs, _binomial_main_diff(x, y, MAIN_TERMS[series.multiplier])


def fit_error_exponent(series: PsiSeries, x_lo: float, x_hi: float, n_samples: int = 32):
    """Least-squares slope of log|E| against log x on a geometric grid.

    Samples with |E| < 1e-9 sit next to sign changes and would drag the
    regression to -inf, so they are dropped.  Returns (slope, stderr).
    """
    if n_samples < 10:
        raise ValueError("need at least 10 samples")
    if not 1 <= x_lo < x_hi <= series.x_max:
        raise ValueError("need 1 <= x_lo < x_hi <= x_max")
    xs = np.geomspace(x_lo, x_hi, n_samples)
    errs = np.array([abs(error_at(series, float(x))) for x in xs])
    keep = errs >= 1e-9
    if int(keep.sum()) < 3:
        raise ValueError("insufficient usable samples (|E| below threshold)")
    lx = np.log(xs[keep])
    le = np.log(errs[keep])
    (slope, _), cov = np.polyfit(lx, le, 1, cov=True)
    return float(slope), float(math.sqrt(cov[0, 0]))


# ----------------------------------------------- 3-dimensional brute force
#
# Eisenstein integers are (u, v) int pairs meaning u + v*omega; matrices
# are flat 8-tuples (a1,a2, b1,b2, c1,c2, d1,d2) so the inner loops stay
# in plain-int arithmetic.


def _emul(a, b, c, d):
    return a * c - b * d, a * d + b * c - b * d

def _enorm(u, v):
    return u * u - u * v + v * v

def _mmul(x, y):
    a1, a2 = _emul(x[0], x[1], y[0], y[1])
    p, q = _emul(x[2], x[3], y[4], y[5])
    a1, a2 = a1 + p, a2 + q
    b1, b2 = _emul(x[0], x[1], y[2], y[3])
    p, q = _emul(x[2], x[3], y[6], y[7])
    b1, b2 = b1 + p, b2 + q
    c1, c2 = _emul(x[4], x[5], y[0], y[1])
    p, q = _emul(x[6], x[7], y[4], y[5])
    c1, c2 = c1 + p, c2 + q
    d1, d2 = _emul(x[4], x[5], y[2], y[3])
    p, q = _emul(x[6], x[7], y[6], y[7])
    d1, d2 = d1 + p, d2 + q
    return (a1, a2, b1, b2, c1, c2, d1, d2)

def _minv(x):  # det 1
    return (x[6], x[7], -x[2], -x[3], -x[4], -x[5], x[0], x[1])

def _mcanon(x):
    y = tuple(-t for t in x)
    return x if x <= y else y

def _height(x):
    return max(abs(t) for t in x)


def _eis_complex(u, v):
    return complex(u - 0.5 * v, v * math.sqrt(3) / 2)


def _loxodromic_norm(u, v):
    """|lambda|^2 for trace u + v*omega, or None when not loxodromic."""
    if v == 0 and abs(u) <= 2:
        return None  # real trace in [-2, 2]: elliptic or parabolic
    t = _eis_complex(u, v)
    rt = cmath.sqrt(t * t - 4)
    lam = (t + rt) / 2
    if abs(lam) < 1:
        lam = (t - rt) / 2
    return abs(lam) ** 2


_GEN_MATS = (
    (0, 0, -1, 0, 1, 0, 0, 0),  # inversion
    (1, 0, 0, 0, 1, 0, 1, 0),  # lower translation by 1
    (1, 0, 0, 0, 0, 1, 1, 0),  # lower translation by w
    (0, 1, 0, 0, 0, 0, -1, -1),  # diag(w, w^2)
)


def _gen_pairs():
    # upper translations are folded into the canonical form; only the
    # c-changing conjugations remain as explicit edges
    out = []
    for g in _GEN_MATS:
        out.append((g, _minv(g)))
        out.append((_minv(g), g))
    return tuple(out)


def _t_reduce(m):
    """Conjugate by an upper translation to pull the upper-left entry
    down.  The result depends only on the translation coset, so it
    doubles as a canonical form and makes translation edges free.
    """
    c1, c2 = m[4], m[5]
    nc = _enorm(c1, c2)
    if nc == 0:
        return m
    p, q = _emul(m[0], m[1], c1 - c2, -c2)  # a * conj(c)
    mu0, nu0 = round(-p / nc), round(-q / nc)
    best = None
    for du in (0, -1, 1):
        for dv in (0, -1, 1):
            mu, nu = mu0 + du, nu0 + dv
            s1, s2 = _emul(mu, nu, c1, c2)
            a1, a2 = m[0] + s1, m[1] + s2
            key = (_enorm(a1, a2), a1, a2)
            if best is None or key < best[0]:
                best = (key, mu, nu)
    mu, nu = best[1], best[2]
    if mu == 0 and nu == 0:
        return m
    # T^mu: a += mu c, d -= mu c, b += mu (d - a) - mu^2 c
    s1, s2 = _emul(mu, nu, c1, c2)
    a1, a2 = m[0] + s1, m[1] + s2
    d1, d2 = m[6] - s1, m[7] - s2
    p, q = _emul(mu, nu, m[6] - m[0], m[7] - m[1])
    r1, r2 = _emul(mu, nu, s1, s2)
    b1, b2 = m[2] + p - r1, m[3] + q - r2
    return (a1, a2, b1, b2, c1, c2, d1, d2)


def _canon(m):
    return min(_t_reduce(m), _t_reduce(tuple(-t for t in m)))


def _enumerate_trace(u, v, radius):
    """Canonical candidate matrices of trace u + v*omega.

    c runs over norms up to radius^2; for each c the upper-left entry
    only matters modulo the translation lattice, so it is scanned over
    a window of residue size plus overlap and stored canonically.
    """
    out = set()
    for c1 in range(-radius, radius + 1):
        for c2 in range(-radius, radius + 1):
            nc = _enorm(c1, c2)
            if not 0 < nc <= radius * radius:
                continue
            ab = math.isqrt(nc) + 3
            for a1 in range(-ab, ab + 1):
                for a2 in range(-ab, ab + 1):
                    d1, d2 = u - a1, v - a2
                    p, q = _emul(a1, a2, d1, d2)
                    p -= 1  # ad - 1
                    b1, b2 = _emul(p, q, c1 - c2, -c2)
                    if b1 % nc or b2 % nc:
                        continue
                    out.add(_canon((a1, a2, b1 // nc, b2 // nc, c1, c2, d1, d2)))
    return out


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


@dataclass(frozen=True)
class Psi3Class:
    trace: tuple  # (u, v) with the sign canonicalized
    norm: float
    lam: float  # log of the primitive norm
    primitive: bool
    character: complex  # chi_3 at the class (1 for the trivial run)

    @property
    def weight(self) -> complex:
        return self.character * self.lam


@dataclass(frozen=True)
class Psi3Result:
    value: complex
    stable: bool
    x: float
    radius: int
    classes: tuple  # Psi3Class entries from the doubled-radius run
    notes: tuple

    def real_trace_classes(self):
        return tuple(c for c in self.classes if c.trace[1] == 0)


def _reduce_into(mat, mats, gens, cap: int = 600, beam: int = 24):
    """Beam-search conjugation descent until a matrix in the window is hit.

    Strict greedy descent stalls on plateaus of the height function, so
    a small frontier of the lowest candidates is kept instead.
    """
    start = _canon(mat)
    if start in mats:
        return start
    seen = {start}
    open_heap = [(_height(start), start)]
    for _ in range(cap):
        if not open_heap:
            return None
        _, cur = heapq.heappop(open_heap)
        for g, gi in gens:
            cand = _canon(_mmul(_mmul(g, cur), gi))
            if cand in seen:
                continue
            if cand in mats:
                return cand
            seen.add(cand)
            if len(open_heap) < 50 * beam:
                heapq.heappush(open_heap, (_height(cand), cand))
    return None


def _psi3_classes(x: float, radius: int):
    """Loxodromic conjugacy classes of the full group with norm <= x.

    Returns (components, notes).  A component is a tuple
    (u, v, nrm, rep, root, mexp): rep is the stored class
    representative, conjugate to root**mexp with root the stored
    representative of a primitive class.
    """
    gens = _gen_pairs()
    notes = []

    traces = []
    t_cap = int(x) + 3
    r = int(math.isqrt(t_cap)) + 2
    for u in range(-r, r + 1):
        for v in range(0, r + 1):
            if v == 0 and u <= 0:
                continue  # one representative per PSL sign pair
            if _enorm(u, v) > t_cap:
                continue
            nrm = _loxodromic_norm(u, v)
            if nrm is not None and nrm <= x * (1 + 1e-12):
                traces.append((u, v, nrm))

    mats: dict = {}
    uf = _UnionFind()
    for u, v, nrm in traces:
        for m in _enumerate_trace(u, v, radius):
            if m not in mats:
                mats[m] = (u, v, nrm)
                uf.add(m)
    for m in list(mats):
        for g, gi in gens:
            m2 = _canon(_mmul(_mmul(g, m), gi))
            if m2 in mats:
                uf.union(m, m2)

    comps: dict = {}
    for m in mats:
        root = uf.find(m)
        if root not in comps or m < comps[root]:
            comps[root] = m

    # Power linking, smallest norms first.  A class can be claimed by
    # powers of two different primitive roots when its axis carries
    # torsion; the earlier claim comes from the smaller primitive norm,
    # hence the larger exponent, and is the von Mangoldt root.
    ordered = sorted(comps, key=lambda root: (mats[root][2], root))
    link: dict = {}
    for root in ordered:
        if root in link:
            continue  # powers of a power are covered by its own root
        u, v, nrm = mats[root]
        rep = comps[root]
        power = rep
        mexp = 1
        while True:
            mexp += 1
            if nrm ** mexp > x * (1 + 1e-12):
                break
            power = _mmul(power, rep)
            target = _reduce_into(power, mats, gens)
            if target is None:
                notes.append(f"lost power {mexp} of trace ({u},{v})")
                continue
            troot = uf.find(target)
            if troot not in link:
                link[troot] = (rep, mexp)

    components = []
    for root in ordered:
        u, v, nrm = mats[root]
        rootrep, mexp = link.get(root, (comps[root], 1))
        components.append((u, v, nrm, comps[root], rootrep, mexp))
    return components, notes


# ------------------------------------------- subgroup splitting mod 3

# The rational-mod-lambda^2 subgroup contains the principal congruence
# subgroup of level 3, which is normal, so membership is a condition on
# the matrix mod 3 and the splitting of a full-group class into
# subgroup classes is a finite double-coset computation in SL2 over
# Z[w]/3.  That computation is exact; no search radius is involved.


def _mod3(m):
    return tuple(t % 3 for t in m)


def _mul3(a, b):
    return tuple(t % 3 for t in _mmul(a, b))


def _neg3(k):
    return tuple((-t) % 3 for t in k)


def _canon3(k):
    n = _neg3(k)
    return k if k <= n else n


def _rational3(k):
    return k[1] == 0 and k[3] == 0 and k[5] == 0 and k[7] == 0


_IDENT = (1, 0, 0, 0, 0, 0, 1, 0)
_MOD3 = None


def _mod3_table():
    """SL2 over Z[w]/3 modulo sign: 324 elements with integer lifts."""
    global _MOD3
    if _MOD3 is not None:
        return _MOD3
    gens = [
        (1, 0, 1, 0, 0, 0, 1, 0),  # upper translation by 1
        (1, 0, 0, 1, 0, 0, 1, 0),  # upper translation by w
        (0, 0, -1, 0, 1, 0, 0, 0),  # inversion
    ]
    gens += [_minv(g) for g in gens]
    lifts = {_canon3(_mod3(_IDENT)): _IDENT}
    frontier = [_IDENT]
    while frontier:
        nxt = []
        for lift in frontier:
            for g in gens:
                cand = _mmul(lift, g)
                key = _canon3(_mod3(cand))
                if key not in lifts:
                    lifts[key] = cand
                    nxt.append(cand)
        frontier = nxt
    assert len(lifts) == 324
    keys = sorted(lifts)
    # the rational subgroup of the quotient is generated by the images
    # of the integer translation and the inversion
    hgens = []
    for g in (gens[0], gens[2]):
        hgens.append(_mod3(g))
        hgens.append(_mod3(_minv(g)))
    _MOD3 = {
        "idx": {k: i for i, k in enumerate(keys)},
        "lift": [lifts[k] for k in keys],
        "s3": [_mod3(lifts[k]) for k in keys],
        "s3inv": [_mod3(_minv(lifts[k])) for k in keys],
        "hgens": tuple(hgens),
    }
    return _MOD3


_W_IM = math.sqrt(3) / 2


def _round_eis(z):
    v = round(z.imag / _W_IM)
    u = round(z.real + v / 2)
    return u, v


def _as_complex8(m):
    return (
        _eis_complex(m[0], m[1]),
        _eis_complex(m[2], m[3]),
        _eis_complex(m[4], m[5]),
        _eis_complex(m[6], m[7]),
    )


def _round_mat(entries):
    out = []
    for z in entries:
        u, v = _round_eis(z)
        if abs(z - _eis_complex(u, v)) > 1e-6:
            return None
        out.extend((u, v))
    return tuple(out)


def _mat_det(m):
    p, q = _emul(m[0], m[1], m[6], m[7])
    r, s = _emul(m[2], m[3], m[4], m[5])
    return p - r, q - s


def _axis_torsion(delta):
    """A finite-order element sharing the axis of delta, if one exists.

    Torsion commuting with a loxodromic element is a rotation about its
    axis, here of order 2 (trace 0) or 3 (trace +-1).  Candidates are
    solved for in the commuting algebra numerically, then verified
    exactly.  Returns (tau, order), or (None, 1) on a torsion-free
    axis.
    """
    t = _eis_complex(delta[0] + delta[6], delta[1] + delta[7])
    mc = _as_complex8(delta)
    disc = 4 - t * t
    for order, trace_targets, qq in ((3, (1, -1), 3), (2, (0,), 4)):
        q0 = cmath.sqrt(qq / disc)
        for tr in trace_targets:
            for q in (q0, -q0):
                p = (tr - q * t) / 2
                cand = _round_mat(
                    (p + q * mc[0], q * mc[1], q * mc[2], p + q * mc[3])
                )
                if cand is None or _mat_det(cand) != (1, 0):
                    continue
                if _mmul(cand, delta) != _mmul(delta, cand):
                    continue
                return cand, order
    return None, 1


def _kth_roots(m, k):
    """Integral k-th roots of a loxodromic integer matrix.

    The analytic root is formed on each eigenvalue branch, rounded to
    the lattice, and verified exactly (up to sign, which is invisible
    here).
    """
    t = _eis_complex(m[0] + m[6], m[1] + m[7])
    rt = cmath.sqrt(t * t - 4)
    lam = (t + rt) / 2
    if abs(lam) < 1:
        lam = (t - rt) / 2
    mc = _as_complex8(m)
    denom = lam - 1 / lam
    out = []
    base = lam ** (1 / k)
    for b in range(k):
        mu = base * cmath.exp(2j * math.pi * b / k)
        alpha = (mu - 1 / mu) / denom
        beta = (lam / mu - mu / lam) / denom
        cand = _round_mat(
            (alpha * mc[0] + beta, alpha * mc[1], alpha * mc[2], alpha * mc[3] + beta)
        )
        if cand is None or _mat_det(cand) != (1, 0):
            continue
        if _loxodromic_norm(cand[0] + cand[6], cand[1] + cand[7]) is None:
            continue
        power = cand
        for _ in range(k - 1):
            power = _mmul(power, cand)
        if _mcanon(power) == _mcanon(m):
            out.append(cand)
    return out


_MIN_LOX_NORM = 2.3  # the smallest loxodromic norm is about 2.37


def _axis_root(delta, tau, order):
    """Minimal-translation loxodromic element on the axis of delta.

    A primitive element on a torsion axis can still be a proper power
    times a rotation; dividing such roots out is what makes the
    centralizer image correct.
    """
    best = delta
    nrm = _loxodromic_norm(best[0] + best[6], best[1] + best[7])
    progress = True
    while progress:
        progress = False
        cands = [best]
        if tau is not None:
            cur = best
            for _ in range(order - 1):
                cur = _mmul(cur, tau)
                cands.append(cur)
        kcap = int(math.log(nrm) / math.log(_MIN_LOX_NORM)) + 1
        for k in range(kcap, 1, -1):
            hit = None
            for cand in cands:
                roots = _kth_roots(cand, k)
                if roots:
                    hit = roots[0]
                    break
            if hit is not None:
                best = hit
                nrm = _loxodromic_norm(best[0] + best[6], best[1] + best[7])
                progress = True
                break
    return best


def _gamma2_pieces(w_mat, rho, tau, order, lam_rho, notes):
    """Split one full-group class into subgroup classes, exactly.

    Pieces are double cosets H sigma Z in the mod-3 quotient, where H
    is the image of the subgroup and Z the image of the centralizer
    (generated by the minimal axis element and the axis torsion).  Each
    piece carries its own character value and subgroup-primitive root.
    """
    tab = _mod3_table()
    wb = _mod3(w_mat)
    nrm_w = _loxodromic_norm(w_mat[0] + w_mat[6], w_mat[1] + w_mat[7])
    big_m = round(math.log(nrm_w) / lam_rho)
    if big_m < 1 or abs(big_m * lam_rho - math.log(nrm_w)) > 1e-6:
        notes.append("axis root exponent mismatch")
        return []
    # torsion offset t0 in w = rho**big_m * tau**t0, up to sign
    probe = w_mat
    rho_inv = _minv(rho)
    for _ in range(big_m):
        probe = _mmul(probe, rho_inv)
    t0 = None
    cur = _IDENT
    for i in range(order):
        if _mcanon(probe) == _mcanon(cur):
            t0 = i
            break
        if tau is not None:
            cur = _mmul(cur, tau)
    if t0 is None:
        notes.append("axis torsion offset unresolved")
        return []

    s3, s3inv = tab["s3"], tab["s3inv"]
    in_s = set()
    for i in range(len(s3)):
        if _rational3(_mul3(_mul3(s3[i], wb), s3inv[i])):
            in_s.add(i)

    rb = _mod3(rho)
    zgens = [rb, _mod3(rho_inv)]
    tpow3 = [_mod3(_IDENT)]
    if tau is not None:
        tb = _mod3(tau)
        zgens += [tb, _mod3(_minv(tau))]
        for _ in range(order - 1):
            tpow3.append(_mul3(tpow3[-1], tb))
    rpow3 = [_mod3(_IDENT)]
    for _ in range(big_m):
        rpow3.append(_mul3(rpow3[-1], rb))

    idx, hgens = tab["idx"], tab["hgens"]
    unseen = set(in_s)
    seeds = []
    while unseen:
        seed = min(unseen)
        orbit = {seed}
        stack = [seed]
        while stack:
            i = stack.pop()
            si = s3[i]
            for h in hgens:
                j = idx[_canon3(_mul3(h, si))]
                if j in in_s and j not in orbit:
                    orbit.add(j)
                    stack.append(j)
            for z in zgens:
                j = idx[_canon3(_mul3(si, z))]
                if j in in_s and j not in orbit:
                    orbit.add(j)
                    stack.append(j)
        unseen -= orbit
        seeds.append(seed)

    out = []
    lift = tab["lift"]
    divisors = [k for k in range(1, big_m + 1) if big_m % k == 0]
    for seed in seeds:
        sig = lift[seed]
        gp = _mmul(_mmul(sig, w_mat), _minv(sig))
        g = Mat2(
            EisensteinInt(gp[0], gp[1]),
            EisensteinInt(gp[2], gp[3]),
            EisensteinInt(gp[4], gp[5]),
            EisensteinInt(gp[6], gp[7]),
        )
        chi = complex(kubota_character(g).value)
        si, sii = s3[seed], s3inv[seed]
        kmax = 1
        for k in sorted(divisors, reverse=True):
            j = big_m // k
            hit = False
            for b in range(order):
                if (b * k - t0) % order:
                    continue  # the b-twisted root does not power to w
                gb = _mul3(rpow3[j], tpow3[b])
                if _rational3(_mul3(_mul3(si, gb), sii)):
                    hit = True
                    break
            if hit:
                kmax = k
                break
        out.append((chi, (big_m // kmax) * lam_rho, kmax == 1))
    return out


def _kubota_classes(components, notes):
    out = []
    for u, v, nrm, rep, root, mexp in components:
        w_mat = root
        for _ in range(mexp - 1):
            w_mat = _mmul(w_mat, root)
        tau, order = _axis_torsion(root)
        rho = _axis_root(root, tau, order)
        lam_rho = math.log(_loxodromic_norm(rho[0] + rho[6], rho[1] + rho[7]))
        for chi, lamp, prim in _gamma2_pieces(w_mat, rho, tau, order, lam_rho, notes):
            out.append(Psi3Class((u, v), nrm, lamp, prim, chi))
    return out


def _assemble(x: float, radius: int, character: str):
    components, notes = _psi3_classes(x, radius)
    if character == "kubota":
        classes = _kubota_classes(components, notes)
        # entrywise w -> w^2 is a class bijection conjugating chi_3, so
        # conjugate character values must pair up at every length
        hist: dict = {}
        for cls in classes:
            key = (round(cls.lam, 9), round(cls.character.imag, 6))
            hist[key] = hist.get(key, 0) + 1
        for (lam_r, im), n in sorted(hist.items()):
            if hist.get((lam_r, -im), 0) != n:
                notes.append(f"Galois asymmetry among classes at lam={lam_r}")
                break
    else:
        classes = [
            Psi3Class((u, v), nrm, math.log(nrm) / mexp, mexp == 1, 1 + 0j)
            for u, v, nrm, rep, root, mexp in components
        ]
    total = 0j
    for cls in classes:
        total += cls.weight
    return total, tuple(classes), notes


def psi3_bruteforce(x: float, character: str = "trivial", radius: int = 6):
    """Desk-scale Psi over hyperbolic 3-space at x, with a stability flag.

    `character` is "trivial" (all of PSL_2(Z[omega])) or "kubota" (the
    rational-mod-lambda^2 subgroup with its cubic character).  The full
    group is enumerated at coefficient heights `radius` and
    `2 * radius`; the result is only authoritative when both runs find
    the same classes and value.  Subgroup classes are split off each
    run exactly in the finite quotient mod 3, so their stability
    reduces to the full-group window's.
    """
    if character not in ("trivial", "kubota"):
        raise ValueError(f"unknown character tag {character!r}")
    if not 0 < x <= 1000:
        raise ValueError("brute force is restricted to 0 < x <= 1000")
    if radius < 2:
        raise ValueError("radius must be at least 2")
    v1, cls1, notes1 = _assemble(x, radius, character)
    v2, cls2, notes2 = _assemble(x, 2 * radius, character)

    def keys(classes):
        return sorted(
            (
                c.trace,
                round(c.lam, 9),
                round(c.character.real, 6),
                round(c.character.imag, 6),
            )
            for c in classes
        )

    k1, k2 = keys(cls1), keys(cls2)
    notes = list(notes1) + list(notes2)
    stable = not notes and k1 == k2 and abs(v1 - v2) <= 1e-9 * max(1.0, abs(v2))
    if k1 != k2:
        notes.append(
            f"class lists differ: {len(cls1)} at r={radius}, {len(cls2)} at r={2 * radius}"
        )
    return Psi3Result(v2, stable, float(x), radius, cls2, tuple(notes))
