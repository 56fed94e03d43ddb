import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectral_sens.errors import InputFormatError, NotHermitianError, ShapeError
from spectral_sens.families import (
    AffineFamily,
    MatrixFamily,
    fd_partial_check,
    kato_family,
    make_affine,
)
from spectral_sens.instances import random_hermitian
from spectral_sens.linalg import ComplexMatrix, hermitian_eig, hermiticity_defect

B1 = np.array([[1.0, 0.0], [0.0, -1.0]])
B2 = np.array([[0.0, 1.0j], [-1.0j, 0.0]])


class TestMakeAffine:
    def test_kato_point_value(self):
        fam = make_affine(ComplexMatrix.zeros(2, 2), [B1, B2])
        value = fam.evaluate([3.0, 4.0])
        assert np.allclose(value.data, np.array([[3.0, 4.0j], [-4.0j, -3.0]]), atol=0)

    def test_partials_are_constant(self, rng):
        fam = make_affine(random_hermitian(rng, 3), [random_hermitian(rng, 3) for _ in range(2)])
        p_here = fam.partial([0.0, 0.0], 1)
        p_there = fam.partial([5.0, -2.0], 1)
        assert np.array_equal(p_here.data, p_there.data)

    def test_rejects_zero_parameters(self):
        with pytest.raises(ShapeError):
            make_affine(ComplexMatrix.identity(2), [])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ShapeError):
            make_affine(ComplexMatrix.identity(2), [np.zeros((3, 3))])

    def test_detects_hermitian(self):
        assert make_affine(ComplexMatrix.zeros(2, 2), [B1, B2]).hermitian
        assert not make_affine(ComplexMatrix.zeros(2, 2), [np.array([[0.0, 1.0], [0.0, 0.0]])]).hermitian

    def test_declared_hermitian_is_verified(self):
        with pytest.raises(NotHermitianError):
            make_affine(
                ComplexMatrix.zeros(2, 2),
                [np.array([[0.0, 1.0], [0.0, 0.0]])],
                hermitian=True,
            )

    def test_hermitian_partials_within_tolerance(self, rng):
        fam = make_affine(random_hermitian(rng, 4), [random_hermitian(rng, 4) for _ in range(3)])
        for j in (1, 2, 3):
            p = fam.partial(np.zeros(3), j)
            assert hermiticity_defect(p) <= 1e-12 * max(1.0, np.linalg.norm(p.data))


class TestKatoFamily:
    def test_zero_at_origin(self):
        assert np.array_equal(kato_family().evaluate([0.0, 0.0]).data, np.zeros((2, 2)))

    def test_eigenvalues_at_3_4(self):
        dec = hermitian_eig(kato_family().evaluate([3.0, 4.0]))
        assert dec.eigenvalues == pytest.approx([5.0, -5.0], abs=1e-13)

    def test_partials(self):
        fam = kato_family()
        assert np.array_equal(fam.partial([1.0, 1.0], 1).data, B1)
        assert np.array_equal(fam.partial([1.0, 1.0], 2).data, B2)


class TestFdPartialCheck:
    def test_affine_is_exact(self, rng):
        fam = make_affine(random_hermitian(rng, 3), [random_hermitian(rng, 3) for _ in range(2)])
        for j in (1, 2):
            assert fd_partial_check(fam, [0.3, -0.7], j, h=0.1) <= 1e-12

    def test_kato_small_step(self):
        assert fd_partial_check(kato_family(), [1.0, 2.0], 1, h=1e-5) <= 1e-10

    def test_detects_corrupted_partial(self):
        # declared partial is B1 + I while the family actually varies as B1
        def partials(x, j):
            return B1 + np.eye(2) if j == 1 else B2

        fam = MatrixFamily(
            param_dim=2,
            rows=2,
            cols=2,
            hermitian=True,
            evaluator=lambda x: x[0] * B1 + x[1] * B2,
            partials=partials,
        )
        assert fd_partial_check(fam, [0.0, 0.0], 1, h=1e-3) > 0.1

    def test_rejects_bad_index_and_step(self):
        fam = kato_family()
        with pytest.raises(ShapeError):
            fd_partial_check(fam, [0.0, 0.0], 3, h=1e-3)
        with pytest.raises(ValueError):
            fd_partial_check(fam, [0.0, 0.0], 1, h=0.0)

    def test_second_order_on_smooth_family(self):
        # entries sin/cos in x: central differences converge at order h^2
        def evaluator(x):
            return np.array(
                [
                    [np.sin(x[0]), np.cos(x[0] + x[1])],
                    [np.cos(x[0] + x[1]), np.sin(x[1])],
                ],
                dtype=np.complex128,
            )

        def partials(x, j):
            if j == 1:
                return np.array(
                    [
                        [np.cos(x[0]), -np.sin(x[0] + x[1])],
                        [-np.sin(x[0] + x[1]), 0.0],
                    ],
                    dtype=np.complex128,
                )
            return np.array(
                [
                    [0.0, -np.sin(x[0] + x[1])],
                    [-np.sin(x[0] + x[1]), np.cos(x[1])],
                ],
                dtype=np.complex128,
            )

        fam = MatrixFamily(
            param_dim=2, rows=2, cols=2, hermitian=True, evaluator=evaluator, partials=partials
        )
        x0 = [0.4, -0.9]
        defects = [fd_partial_check(fam, x0, 1, h) for h in (1e-2, 5e-3, 2.5e-3)]
        assert defects[0] / defects[1] == pytest.approx(4.0, rel=0.15)
        assert defects[1] / defects[2] == pytest.approx(4.0, rel=0.15)

    def test_quadratic_entries_are_exact_for_central_differences(self):
        def evaluator(x):
            return np.array([[x[0] ** 2, 0.0], [0.0, -(x[0] ** 2)]], dtype=np.complex128)

        def partials(x, j):
            return np.array([[2 * x[0], 0.0], [0.0, -2 * x[0]]], dtype=np.complex128)

        fam = MatrixFamily(
            param_dim=1, rows=2, cols=2, hermitian=True, evaluator=evaluator, partials=partials
        )
        assert fd_partial_check(fam, [1.3], 1, h=1e-2) <= 1e-12


class TestDomainBox:
    def test_rejects_point_outside_box(self):
        fam = make_affine(
            ComplexMatrix.zeros(2, 2), [B1], domain=(np.array([-1.0]), np.array([1.0]))
        )
        fam.evaluate([0.5])
        with pytest.raises(ValueError):
            fam.evaluate([2.0])


class TestAffineFamilyJson:
    def test_round_trip(self, rng):
        payload = AffineFamily(
            base=ComplexMatrix(random_hermitian(rng, 2)),
            coefficients=(ComplexMatrix(B1), ComplexMatrix(B2)),
            hermitian=True,
        )
        again = AffineFamily.from_json(payload.to_json())
        assert np.array_equal(again.base.data, payload.base.data)
        assert again.hermitian
        fam = again.to_family()
        assert fam.param_dim == 2 and fam.hermitian

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda obj: obj.pop("hermitian"),
            lambda obj: obj.update(hermitian="yes"),
            lambda obj: obj.update(coefficients=[]),
            lambda obj: obj.pop("base"),
        ],
    )
    def test_rejects_malformed(self, mutate, rng):
        obj = AffineFamily(
            base=ComplexMatrix(random_hermitian(rng, 2)),
            coefficients=(ComplexMatrix(B1),),
            hermitian=True,
        ).to_json()
        mutate(obj)
        with pytest.raises(InputFormatError):
            AffineFamily.from_json(obj)

    def test_rejects_false_hermitian_declaration(self):
        obj = {
            "base": ComplexMatrix.zeros(2, 2).to_json(),
            "coefficients": [ComplexMatrix(np.array([[0.0, 1.0], [0.0, 0.0]])).to_json()],
            "hermitian": True,
        }
        with pytest.raises(InputFormatError):
            AffineFamily.from_json(obj)


@given(seed=st.integers(0, 10**9), n=st.integers(2, 6), p=st.integers(1, 4))
def test_affine_partial_check_property(seed, n, p):
    rng = np.random.default_rng(seed)
    fam = make_affine(random_hermitian(rng, n), [random_hermitian(rng, n) for _ in range(p)])
    x0 = rng.uniform(-1, 1, p)
    j = int(rng.integers(1, p + 1))
    assert fd_partial_check(fam, x0, j, h=0.25) <= 1e-11
