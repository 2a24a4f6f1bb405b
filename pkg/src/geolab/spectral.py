"""Spectral-side calculus: eigenvalue datasets, the half-spectral
correspondence, explicit-formula sums, Weyl counts, and the exact
exponent arithmetic.

Conventions.  2D data carries t with lambda = 1/4 + t^2; 3D data sits
at s = 1 + it.  The 2D correspondence halves the distance to the
symmetry point (t maps to t/2 on the tempered line, s - 1/2 to
(s - 1/2)/2), its 3D counterpart divides s - 1 by 3 with an unresolved
sign, so both branches are always returned.

Datasets are immutable after ingest.  The shipped reference file mixes
ten published spectral parameters with a synthetic comb that inverts
the two-term Weyl count; see `weyl_comb_dataset` and the CSV header.
Nothing here computes eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

__all__ = [
    "SpectralDatum",
    "EigenDataset",
    "WeylReport",
    "ingest",
    "reference_dataset_path",
    "weyl_comb_dataset",
    "half_weight_dataset",
    "shimura_map",
    "explicit_formula_sum",
    "spectral_exp_sum",
    "explicit_formula_diagnostic",
    "weyl_check",
    "mean_to_max",
    "table_invariant",
]

TAGS = ("weight0-2D", "weight1/2-2D", "trivial-3D", "kubota-3D")

# dimension of the multiplier system behind each tag; the vector-valued
# half-integral system has three components
_TAG_DIM = {"weight0-2D": 1, "weight1/2-2D": 3, "trivial-3D": 1, "kubota-3D": 1}

_VOL_MODULAR = math.pi / 3

# Spectral parameters of the first ten Maass cusp forms on PSL(2,Z),
# both parities merged, as tabulated in the classical numerical
# literature and the LMFDB.
PUBLISHED_WEIGHT0 = (
    9.53369526135,
    12.17300832468,
    13.77975135189,
    14.35850951826,
    16.13807317714,
    16.64425920190,
    17.73856338107,
    18.18091783446,
    19.42348147168,
    19.48471385063,
)


@dataclass(frozen=True)
class SpectralDatum:
    t: float
    multiplicity: int
    tag: str

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"negative spectral parameter {self.t}")
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be a positive integer")
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")


@dataclass(frozen=True)
class EigenDataset:
    """Sorted spectral data plus the surface constants the Weyl count
    needs.  Volume defaults to the modular surface."""

    data: tuple
    provenance: str = ""
    volume: float = _VOL_MODULAR
    cusps: int = 1

    def __post_init__(self):
        ts = [d.t for d in self.data]
        if ts != sorted(ts):
            raise ValueError("data must be sorted by t")

    def __len__(self):
        return len(self.data)

    def __iter__(self):
        return iter(self.data)

    def count(self, T):
        return sum(d.multiplicity for d in self.data if 0 < d.t <= T)


def ingest(path) -> EigenDataset:
    """Read a `t,multiplicity,tag` CSV.

    `#` comment lines before the header may carry `vol=` and `cusps=`
    and otherwise accumulate into the provenance string.  Rows must be
    ascending in t; all diagnostics are line-numbered.
    """
    volume, cusps = _VOL_MODULAR, 1
    notes = []
    data = []
    header_seen = False
    prev = -1.0
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("vol="):
                volume = float(body[4:])
            elif body.startswith("cusps="):
                cusps = int(body[6:])
            elif body:
                notes.append(body)
            continue
        if not header_seen:
            if line != "t,multiplicity,tag":
                raise ValueError(
                    f"line {lineno}: expected header 't,multiplicity,tag', got {line!r}"
                )
            header_seen = True
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected 3 fields, got {len(parts)}")
        try:
            t = float(parts[0])
            mult = int(parts[1])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        try:
            datum = SpectralDatum(t, mult, parts[2].strip())
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if t < prev:
            raise ValueError(f"line {lineno}: t values must be ascending")
        prev = t
        data.append(datum)
    return EigenDataset(tuple(data), " ".join(notes), volume, cusps)


def reference_dataset_path(name="weylcomb") -> Path:
    """Path of a shipped dataset: 'published' (ten genuine parameters)
    or 'weylcomb' (published head plus synthetic comb to t = 105)."""
    fname = {
        "published": "maass_weight0_psl2z.csv",
        "weylcomb": "maass_weight0_weylcomb.csv",
    }.get(name)
    if fname is None:
        raise ValueError(f"unknown reference dataset {name!r}")
    return Path(resources.files("geolab").joinpath("data", fname))


def _weyl_count(t, volume=_VOL_MODULAR, cusps=1, dim=1):
    # two-term prediction; log term switched off below t = 1
    main = volume * dim / (4 * math.pi) * t * t
    second = cusps * dim / math.pi * t * math.log(t) if t > 1 else 0.0
    return main - second


def weyl_comb_dataset(t_max=105.0) -> EigenDataset:
    """Published head plus a deterministic synthetic tail.

    Comb points solve N(t) = n - 1/2 for the two-term count
    N(t) = t^2/12 - (t/pi) log t by Newton iteration, picking up right
    after the count at the last published parameter.  The tail is a
    plumbing surrogate for counting diagnostics, not spectral data.
    """
    if t_max <= PUBLISHED_WEIGHT0[-1]:
        raise ValueError("t_max must exceed the published range")
    ts = list(PUBLISHED_WEIGHT0)
    n = math.floor(_weyl_count(ts[-1]) + 0.5) + 1
    while True:
        target = n - 0.5
        t = math.sqrt(12.0 * (target + 5.0))
        for _ in range(60):
            f = _weyl_count(t) - target
            fp = t / 6.0 - (math.log(t) + 1.0) / math.pi
            step = f / fp
            t -= step
            if abs(step) < 1e-13:
                break
        if t > t_max:
            break
        ts.append(t)
        n += 1
    data = tuple(SpectralDatum(t, 1, "weight0-2D") for t in ts)
    return EigenDataset(
        data,
        "ten published parameters, then a synthetic Weyl comb (surrogate)",
    )


def half_weight_dataset(dataset: EigenDataset) -> EigenDataset:
    """Image of weight-0 data under the 2D correspondence, tagged as
    the three-component half-integral system."""
    data = tuple(
        SpectralDatum(d.t / 2.0, d.multiplicity, "weight1/2-2D") for d in dataset
    )
    return EigenDataset(
        data,
        (dataset.provenance + "; halved spectral parameters").strip("; "),
        dataset.volume,
        dataset.cusps,
    )


def _exact(value):
    return isinstance(value, (int, Fraction))


def shimura_map(value, direction="down", dimension="2D", variable=None):
    """Correspondence arithmetic on spectral parameters.

    2D default variable is t (tempered line, halved going down); pass
    variable="s" to act on s with fixed point 1/2.  3D acts on s with
    fixed point 1 and an undetermined sign, so it returns both branches
    whichever the direction.  Exact inputs stay exact.
    """
    if direction not in ("down", "up"):
        raise ValueError(f"unknown direction {direction!r}")
    if _exact(value):
        value = Fraction(value)
    if dimension == "2D":
        if variable is None:
            variable = "t"
        base = 0 if variable == "t" else (Fraction(1, 2) if _exact(value) else 0.5)
        off = value - base
        return base + (off / 2 if direction == "down" else off * 2)
    if dimension == "3D":
        one = 1 if _exact(value) else 1.0
        off = value - one
        if direction == "down":
            off = off / 3
            return (one + off, one - off)
        return (one + 3 * off, one - 3 * off)
    raise ValueError(f"unknown dimension {dimension!r}")


def explicit_formula_sum(x, T, dataset: EigenDataset, dimension="2D") -> complex:
    """Truncated spectral side: sum over 0 < t <= T of
    mult * (x^(b+it)/(b+it) + x^(b-it)/(b-it)) with b = 1/2 or 1.

    Scattering and residual terms are out of scope, so against a real
    error term this is a diagnostic, not an identity.
    """
    if x <= 0:
        raise ValueError("x must be positive")
    if T < 1:
        raise ValueError("T must be >= 1")
    b = 0.5 if dimension == "2D" else 1.0
    if dimension not in ("2D", "3D"):
        raise ValueError(f"unknown dimension {dimension!r}")
    total = 0j
    for d in dataset:
        if 0 < d.t <= T:
            up = b + 1j * d.t
            dn = b - 1j * d.t
            total += d.multiplicity * (x**up / up + x**dn / dn)
    return total


def spectral_exp_sum(X, T, dataset: EigenDataset) -> complex:
    """sum of mult * X^(it) over 0 < t <= T; |result| <= count always,
    with equality at X = 1."""
    if X <= 0:
        raise ValueError("X must be positive")
    if T < 1:
        raise ValueError("T must be >= 1")
    total = 0j
    for d in dataset:
        if 0 < d.t <= T:
            total += d.multiplicity * X ** (1j * d.t)
    return total


def explicit_formula_diagnostic(xs, T, dataset: EigenDataset, psi):
    """For each x report whether subtracting the truncated spectral sum
    shrinks the counting error E(x) = psi(x) - x.

    Returns (improved, total, rows) with rows of (x, |E|, |E - sum|).
    Report only: the omitted terms keep this from being an identity.
    """
    rows = []
    improved = 0
    for x in xs:
        err = psi(x) - x
        sm = explicit_formula_sum(x, T, dataset, "2D").real
        rows.append((x, abs(err), abs(err - sm)))
        if abs(err - sm) < abs(err):
            improved += 1
    return improved, len(rows), tuple(rows)


@dataclass(frozen=True)
class WeylReport:
    observed: int
    predicted: float
    ratio: float
    window_counts: tuple
    window_constant: float


def weyl_check(dataset: EigenDataset, T) -> WeylReport:
    """Counted spectrum against the two-term prediction
    vol*dim/(4 pi) T^2 - cusps*dim/pi T log T, plus unit-window counts.

    The dataset must be homogeneous in tag; the tag sets dim.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    tags = {d.tag for d in dataset}
    if len(tags) > 1:
        raise ValueError("mixed tags in one Weyl count")
    dim = _TAG_DIM[tags.pop()] if tags else 1
    observed = dataset.count(T)
    predicted = _weyl_count(float(T), dataset.volume, dataset.cusps, dim)
    windows = [0] * math.ceil(T)
    for d in dataset:
        if 0 < d.t <= T:
            windows[min(int(d.t), len(windows) - 1)] += d.multiplicity
    const = max(windows) / T if windows else 0.0
    return WeylReport(observed, predicted, observed / predicted, tuple(windows), const)


def mean_to_max(delta2, eta2, k) -> Fraction:
    """Max-norm exponent from a second-moment pair:
    (delta2 + (1 - |k|/2) eta2) / (1 + eta2), exact."""
    d2, e2, kk = Fraction(delta2), Fraction(eta2), Fraction(k)
    if not Fraction(1, 2) <= d2 <= Fraction(8, 5):
        raise ValueError(f"delta2 = {d2} out of range [1/2, 8/5]")
    if e2 < 0:
        raise ValueError("eta2 must be nonnegative")
    if abs(kk) > 2:
        raise ValueError("weight out of range")
    return (d2 + (1 - abs(kk) / 2) * e2) / (1 + e2)


def table_invariant(delta_plain, delta_twisted, dimension) -> Fraction:
    """Exponent-column combination that the correspondence keeps
    constant: plain - 2(twisted - 1/2) in 2D, plain - 3(twisted - 1)
    in 3D."""
    p, tw = Fraction(delta_plain), Fraction(delta_twisted)
    if dimension == "2D":
        return p - 2 * (tw - Fraction(1, 2))
    if dimension == "3D":
        return p - 3 * (tw - 1)
    raise ValueError(f"unknown dimension {dimension!r}")
