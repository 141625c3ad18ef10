import numpy as np
import pytest

from rhode import (
    ConstantCoefficient,
    HalfLineCut,
    KhrapkovCoefficient,
    RationalCoefficient,
    RationalFn,
    ScalarCoefficient,
    build_mesh,
    demo_coefficient,
    khrapkov_f,
    lift_scalar,
)
from rhode.errors import EvaluationFailure, ZeroArgument


def test_demo_matrix_frozen_values():
    coef = demo_coefficient()
    assert coef.base == 2j
    m2 = coef.eval(2j)
    assert np.allclose(m2, [[0.75, -0.5j], [0.5j, 1.25]], atol=1e-15)
    m1 = coef.eval(1j)
    assert np.allclose(m1, [[0.0, -1j], [1j, 2.0]], atol=1e-15)
    # slow decay: deviation from identity at the truncation end is 1/80
    assert np.max(np.abs(coef.eval(80j) - np.eye(2))) == pytest.approx(
        0.0125, rel=1e-12)


def test_demo_determinant_value():
    # det(I + z^-2 [[1, z], [-z, -1]]) = 1 + z^-2 - z^-4; at z = 2i: 11/16
    coef = demo_coefficient()
    m = coef.eval(2j)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    assert det == pytest.approx(11.0 / 16.0, rel=1e-14)


def test_demo_quadratic_form_coefficients():
    coef = demo_coefficient()
    f = khrapkov_f(coef)
    # l^2 + m n = 1 - z^2
    assert np.allclose(f, [1.0, 0.0, -1.0])


def test_khrapkov_eval_matches_structure():
    coef = demo_coefficient()
    rng = np.random.default_rng(3)
    zs = rng.uniform(-5, 5, 8) + 1j * rng.uniform(2.5, 40, 8)
    many = coef.eval_many(zs)
    for k, z in enumerate(zs):
        c = 1.0
        p = 1.0 / z**2
        expect = c * np.eye(2) + p * np.array([[1.0, z], [-z, -1.0]])
        assert np.allclose(many[k], expect, atol=1e-14)
        assert np.allclose(coef.eval(complex(z)), expect, atol=1e-14)


def test_khrapkov_quadratic_degree_cap():
    with pytest.raises(ValueError):
        KhrapkovCoefficient(
            c=RationalFn(np.array([1.0 + 0j])),
            p=RationalFn(np.array([1.0 + 0j])),
            l=np.array([0.0 + 0j, 0.0, 1.0]),  # l = z^2 -> f degree 4
            m=np.array([0.0 + 0j]),
            n=np.array([0.0 + 0j]),
            base=2j,
        )


def test_rational_fn_pole_raises():
    fn = RationalFn(np.array([1.0 + 0j]), np.array([0.0 + 0j, 1.0]))  # 1/z
    assert fn(2.0 + 0j) == pytest.approx(0.5)
    with pytest.raises(EvaluationFailure):
        fn(0.0 + 0j)


def test_rational_coefficient_validates_on_mesh():
    # entry with a pole at 5i, which lies on the cut from 2i upward
    pole = RationalFn(np.array([1.0 + 0j]), np.array([-5j, 1.0]))
    one = RationalFn(np.array([1.0 + 0j]))
    zero = RationalFn(np.array([0.0 + 0j]))
    coef = RationalCoefficient([[one, pole], [zero, one]], base=2j)
    mesh = build_mesh(HalfLineCut(2j), 10.0, 0.5)
    with pytest.raises(EvaluationFailure) as info:
        coef.validate_on_mesh(mesh)
    assert "node" in str(info.value)


def test_constant_coefficient_decay_flag():
    k = np.array([[2.0, 0.5], [0.25, 1.0]], dtype=np.complex128)
    coef = ConstantCoefficient(k, base=1j)
    assert not coef.decays
    assert np.array_equal(coef.eval(5.0 + 5j), k)
    many = coef.eval_many(np.array([1j, 2j, 3j]))
    assert many.shape == (3, 2, 2)
    assert np.array_equal(many[2], k)
    ident = ConstantCoefficient(np.eye(2, dtype=np.complex128), base=1j)
    assert ident.decays


def test_scalar_coefficient_embeds_diagonally():
    m = RationalFn(np.array([26.0 + 0j, 2.0, 1.0]),
                   np.array([25.0 + 0j, 2.0, 1.0]))
    coef = ScalarCoefficient(m, base=2j)
    z = 3.0 + 4j
    got = coef.eval(z)
    assert got[0, 0] == pytest.approx(m(z), rel=1e-15)
    assert got[1, 1] == 1.0
    assert got[0, 1] == 0.0 and got[1, 0] == 0.0


def test_lift_scalar_from_callable():
    coef = lift_scalar(lambda z: 1.0 + 0.5 * np.exp(1j * z), base=2j)
    z = 0.5 + 3j
    assert coef.eval(z)[0, 0] == pytest.approx(1.0 + 0.5 * np.exp(1j * z),
                                               rel=1e-14)


def test_lift_scalar_rejects_vanishing_function():
    # m(iy) = 1 - 3 e^{2-y} crosses zero near y = 3.1 on the probe span
    with pytest.raises((ZeroArgument, EvaluationFailure)):
        lift_scalar(lambda z: 1.0 - 3.0 * np.exp(2.0 + 1j * z), base=2j)


def test_spec_key_distinguishes_parameters():
    a = demo_coefficient()
    b = KhrapkovCoefficient(
        c=RationalFn(np.array([1.0 + 0j])),
        p=RationalFn(np.array([2.0 + 0j]),
                     np.array([0.0 + 0j, 0.0, 1.0])),
        l=np.array([1.0 + 0j]),
        m=np.array([0.0 + 0j, 1.0]),
        n=np.array([0.0 + 0j, -1.0]),
        base=2j,
    )
    assert a.spec_key() != b.spec_key()
    assert a.cache_hash() != b.cache_hash()
    assert a.cache_hash() == demo_coefficient().cache_hash()
