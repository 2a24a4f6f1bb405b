"""Multiplier systems: frozen generator values against the theta series,
cocycle laws, Petersson closed forms, and the cubic Kubota character."""

import cmath
import math
import random
import sys
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geolab.arith import EisensteinInt, RootOfUnity, phase_sums_equal
from geolab.geodesics import Mat2, enumerate_classes
from geolab.multipliers import (
    NU_MINUS_I,
    NU_S,
    NU_T,
    THETA_CUSP_INFINITY,
    CuspData,
    MultiplierMatrix,
    evaluate_scalar_multiplier,
    evaluate_theta_multiplier,
    factor_system,
    kubota_character,
    theta_component,
    theta_oracle,
    word_decompose,
)

sys.path.insert(0, "tests")
from oracles import cubic_symbol_euler  # noqa: E402

T = Mat2(1, 1, 0, 1)
S = Mat2(0, -1, 1, 0)
NEG_I = Mat2(-1, 0, 0, -1)
V = Mat2(1, 0, 2, 1)
E = EisensteinInt
HALF = Fraction(1, 2)


def random_word(rng, steps, negate=0.3):
    g = Mat2(1, 0, 0, 1)
    for _ in range(steps):
        if rng.random() < 0.6:
            g = g * T ** rng.choice([-3, -2, -1, 1, 2, 3])
        else:
            g = g * S
    return -g if rng.random() < negate else g


# ------------------------------------------------------------- frozen values


def test_frozen_generators_match_theta_series():
    # [DERIVED: 3-point transformation-law solve against the series]
    for g, frozen in ((T, NU_T), (S, NU_S), (NEG_I, NU_MINUS_I)):
        assert np.abs(theta_oracle(g) - frozen.to_array()).max() < 1e-10


def test_identity_and_minus_identity():
    assert evaluate_theta_multiplier(Mat2(1, 0, 0, 1)) == MultiplierMatrix.identity(3)
    nu = evaluate_theta_multiplier(NEG_I)
    # nu(S)^2 with omega(S,S) = 1 forces the scalar e(-1/4) = e^{-pi i/2}
    assert factor_system(S, S, HALF) == RootOfUnity(0)
    assert nu == NU_S * NU_S
    assert nu == MultiplierMatrix.scalar(3, RootOfUnity(Fraction(-1, 4)))


def test_word_evaluation_matches_oracle():
    rng = random.Random(101)
    for _ in range(40):
        g = random_word(rng, rng.randint(1, 9))
        err = np.abs(theta_oracle(g) - evaluate_theta_multiplier(g).to_array()).max()
        assert err < 1e-8, (g.entries(), err)


def test_oracle_component_rows():
    full = theta_oracle(V)
    for comp in (1, 2, 3):
        assert np.allclose(theta_oracle(V, component=comp), full[comp - 1])
    with pytest.raises(ValueError):
        theta_oracle(V, component=4)


def test_theta_components_against_mpmath():
    for x, y in [(Fraction(0), 1), (Fraction(1, 3), 1), (Fraction(1, 7), Fraction(5, 4)),
                 (Fraction(3, 5), Fraction(2, 7)), (Fraction(-4, 9), Fraction(1, 3))]:
        q = cmath.exp(1j * math.pi * complex(x, float(y)))
        for which, jt in ((2, 2), (3, 3), (4, 4)):
            ours = theta_component(which, x, float(y))
            ref = complex(mpmath.jtheta(jt, 0, mpmath.mpc(q)))
            assert abs(ours - ref) < 1e-12 * max(1, abs(ref)), (which, x, y)


def test_theta_component_rejects_bad_input():
    with pytest.raises(ValueError):
        theta_component(3, Fraction(0), -1.0)
    with pytest.raises(ValueError):
        theta_component(5, Fraction(0), 1.0)


# ------------------------------------------------------------- cocycle laws


def test_cocycle_consistency_random_pairs():
    rng = random.Random(7)
    for _ in range(1000):
        g1 = random_word(rng, rng.randint(1, 8))
        g2 = random_word(rng, rng.randint(1, 8))
        lhs = evaluate_theta_multiplier(g1 * g2)
        rhs = factor_system(g1, g2, HALF) * (
            evaluate_theta_multiplier(g1) * evaluate_theta_multiplier(g2)
        )
        assert lhs == rhs, (g1.entries(), g2.entries())


def test_factor_system_basics():
    rng = random.Random(9)
    eye = Mat2(1, 0, 0, 1)
    for _ in range(200):
        g1 = random_word(rng, rng.randint(1, 7))
        g2 = random_word(rng, rng.randint(1, 7))
        assert factor_system(g1, eye, HALF) == RootOfUnity(0)
        assert factor_system(eye, g2, HALF) == RootOfUnity(0)
        assert factor_system(g1, g2, 0) == RootOfUnity(0)
        # weight-1 factor system is e(integer) = 1
        assert factor_system(g1, g2, 1) == RootOfUnity(0)


def test_unitarity_of_word_values():
    rng = random.Random(13)
    for _ in range(300):
        assert evaluate_theta_multiplier(random_word(rng, rng.randint(1, 10))).is_unitary()


@given(st.lists(st.sampled_from(["T", "t", "S"]), min_size=1, max_size=12))
@settings(max_examples=200, deadline=None)
def test_cocycle_against_generator_suffix(tokens):
    g = Mat2(1, 0, 0, 1)
    for tok in tokens:
        g = g * {"T": T, "t": T.inverse(), "S": S}[tok]
    for suffix in (T, S, -T):
        lhs = evaluate_theta_multiplier(g * suffix)
        rhs = factor_system(g, suffix, HALF) * (
            evaluate_theta_multiplier(g) * evaluate_theta_multiplier(suffix)
        )
        assert lhs == rhs


# ------------------------------------------------------------- words


def test_word_decompose_roundtrip_and_length():
    rng = random.Random(3)
    for _ in range(300):
        g = Mat2(1, 0, 0, 1)
        while True:
            step = T ** rng.choice([-4, -2, -1, 1, 3, 5]) if rng.random() < 0.6 else S
            if max(abs(v) for v in (g * step).entries()) > 10 ** 6:
                break
            g = g * step
        if rng.random() < 0.3:
            g = -g
        word = word_decompose(g)
        assert word.matrix() == g
        assert word.sign in (1, -1)
        top = max(abs(v) for v in g.entries())
        # floor-quotient chains with sign flips run ~3.4 factors per bit
        # in the worst sampled case; 5 per bit is a safe O(log) envelope
        # (a linear-in-entry regression would need ~2^20 factors here)
        assert len(word.factors) <= 5 * top.bit_length() + 8
        for tok, n in word.factors:
            assert (tok == "T" and n != 0) or (tok == "S" and n == 1)


def test_word_decompose_generators():
    assert word_decompose(S).factors == (("S", 1),)
    assert word_decompose(T ** 5).factors == (("T", 5),)
    assert word_decompose(NEG_I).factors == ()
    assert word_decompose(NEG_I).sign == -1


def test_word_decompose_rejects_nonunimodular():
    with pytest.raises(ValueError):
        word_decompose(Mat2(1, 0, 0, 2))


# ------------------------------------------------------------- monomial algebra


def test_monomial_matrix_algebra():
    assert NU_T.entry(0, 0) == RootOfUnity(Fraction(1, 8))
    assert NU_T.entry(0, 1) == 0
    assert NU_T.trace_terms() == (RootOfUnity(Fraction(1, 8)),)
    assert NU_S.trace_terms() == (RootOfUnity(Fraction(-1, 8)),)
    assert NU_T ** -1 == NU_T.conj_transpose()
    assert NU_T ** -2 == (NU_T * NU_T).conj_transpose()
    assert NU_T ** 0 == MultiplierMatrix.identity(3)
    # nu(T^-1) really is the inverse matrix: omega(T^a, T^b) = 1
    assert evaluate_theta_multiplier(T.inverse()) == NU_T ** -1
    scaled = RootOfUnity(Fraction(1, 3)) * NU_S
    assert scaled == NU_S * RootOfUnity(Fraction(1, 3))
    assert scaled.entry(0, 2) == RootOfUnity(Fraction(1, 3) - Fraction(1, 8))
    with pytest.raises(ValueError):
        MultiplierMatrix((0, 0, 1), (RootOfUnity(0),) * 3)
    with pytest.raises(ValueError):
        MultiplierMatrix.identity(2) * NU_T


def test_nu_t_eigenframe_matches_cusp_data():
    arr = NU_T.to_array()
    for kappa, vec in zip(THETA_CUSP_INFINITY.kappas, THETA_CUSP_INFINITY.frame):
        v = np.array(vec, dtype=complex)
        expect = cmath.exp(2j * math.pi * float(kappa)) * v
        assert np.abs(arr @ v - expect).max() < 1e-14
    assert THETA_CUSP_INFINITY.frame_norm2(0) == 1
    assert THETA_CUSP_INFINITY.frame_norm2(1) == 2
    assert THETA_CUSP_INFINITY.frame_norm2(2) == 2
    # frame rows are orthogonal
    f = np.array(THETA_CUSP_INFINITY.frame)
    assert np.abs(f @ f.T - np.diag(np.diag(f @ f.T))).max() == 0


# ------------------------------------------------------------- closed forms


def rand_gamma0_2(rng):
    g = Mat2(1, 0, 0, 1)
    for _ in range(rng.randint(1, 8)):
        g = g * (T ** rng.choice([-2, -1, 1, 2]) if rng.random() < 0.5
                 else V ** rng.choice([-1, 1, 2]))
    return -g if rng.random() < 0.3 else g


def rand_theta_group(rng):
    g = Mat2(1, 0, 0, 1)
    for _ in range(rng.randint(1, 8)):
        g = g * (T ** rng.choice([-4, -2, 2, 4]) if rng.random() < 0.5 else S)
    return -g if rng.random() < 0.3 else g


def test_closed_forms_match_theta_multiplier_rows():
    rng = random.Random(55)
    for _ in range(120):
        g = rand_gamma0_2(rng)
        nu = evaluate_theta_multiplier(g)
        assert nu.entry(0, 0) == evaluate_scalar_multiplier(g, 2)
        assert nu.entry(0, 1) == 0 and nu.entry(0, 2) == 0
    for _ in range(120):
        g = rand_theta_group(rng)
        assert evaluate_theta_multiplier(g).entry(1, 1) == evaluate_scalar_multiplier(g, 3)
    for _ in range(120):
        g = S * rand_gamma0_2(rng) * S.inverse()
        assert g.b % 2 == 0
        assert evaluate_theta_multiplier(g).entry(2, 2) == evaluate_scalar_multiplier(g, 4)


def test_closed_form_worked_values():
    assert evaluate_scalar_multiplier(V, 2) == RootOfUnity(0)
    assert evaluate_scalar_multiplier(S, 3) == RootOfUnity(Fraction(-1, 8))
    assert evaluate_scalar_multiplier(T ** 2, 3) == RootOfUnity(0)  # theta3 has period 2
    # both-negative c, d lands in the measured no-sign branch of nu_3
    g = -(S * T ** 2)  # (0,1;-1,-2): a even, d even
    assert g.entries() == (0, 1, -1, -2)
    assert evaluate_scalar_multiplier(g, 3) == evaluate_theta_multiplier(g).entry(1, 1)


def test_closed_form_subgroup_rejection():
    with pytest.raises(ValueError):
        evaluate_scalar_multiplier(S, 2)
    with pytest.raises(ValueError):
        evaluate_scalar_multiplier(T, 3)
    with pytest.raises(ValueError):
        evaluate_scalar_multiplier(T, 4)
    with pytest.raises(ValueError):
        evaluate_scalar_multiplier(V, 5)
    with pytest.raises(ValueError):
        evaluate_scalar_multiplier(Mat2(1, 0, 0, 2), 2)


# ------------------------------------------------------------- Kubota


def rand_gamma1_3(rng):
    g = Mat2(E(1), E(0), E(0), E(1))
    for _ in range(rng.randint(1, 6)):
        w = E(rng.randint(-2, 2), rng.randint(-2, 2))
        if rng.random() < 0.5:
            f = Mat2(E(1), w * E(3), E(0), E(1))
        else:
            f = Mat2(E(1), E(0), w * E(3), E(1))
        g = g * f
    return g


def test_kubota_congruence_examples():
    assert kubota_character(Mat2(1, 0, 3, 1)) == RootOfUnity(0)
    assert kubota_character(Mat2(1, 3, 3, 10)) == RootOfUnity(0)
    # [DERIVED: Euler-criterion oracle across the prime factorization
    #  N(d) = 7 * 37 of d = -17 - 15w]
    g = Mat2(E(-8, -3), E(-12, -6), E(-12, -9), E(-17, -15))
    assert g.det() == 1
    assert kubota_character(g) == RootOfUnity(Fraction(2, 3))
    val = RootOfUnity(0)
    for p in (E(3, 1), E(4, -3)):
        val = val * cubic_symbol_euler(E(-12, -9), p)
    assert val == RootOfUnity(Fraction(2, 3))


def test_kubota_homomorphism_on_gamma1_products():
    rng = random.Random(5)
    for _ in range(400):
        a, b = rand_gamma1_3(rng), rand_gamma1_3(rng)
        assert kubota_character(a * b) == kubota_character(a) * kubota_character(b)


def test_kubota_psl_invariance_and_integer_triviality():
    rng = random.Random(17)
    for _ in range(200):
        g = rand_gamma1_3(rng)
        assert kubota_character(-g) == kubota_character(g)
    for _ in range(200):
        h = random_word(rng, rng.randint(1, 9))
        assert kubota_character(h) == RootOfUnity(0)


def test_kubota_extension_is_homomorphism_on_gamma2():
    rng = random.Random(29)
    omega_s = Mat2(E(0), E(-1), E(1), E(0))
    for _ in range(200):
        h = Mat2(E(1), E(0), E(0), E(1))
        for _ in range(rng.randint(1, 4)):
            h = h * (omega_s if rng.random() < 0.5 else rand_gamma1_3(rng))
        g = rand_gamma1_3(rng)
        assert kubota_character(h * g) == kubota_character(h) * kubota_character(g)


def test_kubota_rejects_outside_gamma2():
    with pytest.raises(ValueError):
        kubota_character(Mat2(E(1), E(0, 1), E(0), E(1)))
    with pytest.raises(ValueError):
        kubota_character(Mat2(E(1), E(0), E(0), E(2)))


# ------------------------------------------------------------- class traces


def test_class_traces_are_conjugation_invariant():
    rng = random.Random(31)
    for cls in enumerate_classes(100):
        base = evaluate_theta_multiplier(cls.rep).trace_terms()
        for _ in range(5):
            sig = random_word(rng, rng.randint(1, 6), negate=0)
            terms = evaluate_theta_multiplier(sig * cls.rep * sig.inverse()).trace_terms()
            assert phase_sums_equal(
                [(1, t.q) for t in terms], [(1, t.q) for t in base]
            ), (cls.rep.entries(), sig.entries())


def test_class_trace_values():
    from geolab.multipliers import class_trace

    classes = enumerate_classes(60)
    smallest = classes[0]
    assert class_trace(smallest, "trivial") == 1
    # rep (1,-1;-1,2) has order-3 image mod 2: no component is fixed
    assert class_trace(smallest, "theta") == 0
    assert class_trace(smallest, "kubota") == 1  # integer matrices are trivial
    disc8 = next(c for c in classes if c.disc == 8)
    assert evaluate_theta_multiplier(disc8.rep).trace_terms() == (
        RootOfUnity(Fraction(3, 4)),
        RootOfUnity(0),
        RootOfUnity(Fraction(1, 4)),
    )
    assert abs(class_trace(disc8, "theta") - 1) < 1e-15
    with pytest.raises(ValueError):
        class_trace(smallest, "petersson")
