"""Tests for the coefficient table, the polynomials f_nu and their roots."""

import numpy as np
import pytest

from atomlaser.models.records import RootCatalog
from atomlaser.models.schemas import COEFFICIENT_NAMES
from atomlaser.services.coeffs import analyze, coefficients, polynomials, roots
from atomlaser.services.linear_theory import classical_intensity
from atomlaser.services.params import reduced
from atomlaser.utils.errors import DegenerateRegimeError, DomainError, RootSelectionError
from atomlaser.utils.numerics import PolyRoots, real_roots

ROOT_POINTS = [
    # (I_s, c, r, I_-4, I_+4, I_-5, I_+5)
    (2.0, 40.0, 3.0, -1.220, 4.891, 0.8414, 4.9399),
    (1.0, 10.0, 1.0, -0.788, 1.825, -0.8627, 1.9127),
    (40.0, 20.0, 9.0, -94.88, 200.905, 59.9999, 200.998),
    (95.95, 100.0, 20.0, -154.258, 1008.435, 699.376, 1008.47),
]


class TestCoefficients:
    """Test cases for the b_ik table."""

    def test_symmetric_point(self):
        """Test omega = eta = tau = 1/2."""
        table = coefficients(reduced(1.0, 1.0, 4.0))
        assert table.b03 == pytest.approx(0.25)
        assert table.b52 == pytest.approx(1.0)
        assert table.b02 == pytest.approx(-0.375)

    def test_leading_terms(self, table_params):
        """Test b03 = b33 = 4 tau^4 and b52 = 4 tau^2."""
        table = coefficients(table_params)
        tau = table_params.tau
        assert table.b03 == pytest.approx(4 * tau**4)
        assert table.b33 == pytest.approx(4 * tau**4)
        assert table.b52 == pytest.approx(4 * tau**2)
        assert table.b13 == pytest.approx(3 * table.b03)

    def test_mutated(self, table_params):
        """Test a one-percent perturbation of one coefficient."""
        table = coefficients(table_params)
        changed = table.mutated("b41")
        assert changed.b41 == pytest.approx(1.01 * table.b41)
        assert changed.b42 == table.b42
        with pytest.raises(DomainError):
            table.mutated("b99")

    def test_all_names_present(self, table_params):
        """Test the table exposes every coefficient name."""
        dumped = coefficients(table_params).model_dump()
        assert tuple(dumped) == COEFFICIENT_NAMES


class TestPolynomials:
    """Test cases for f_0..f_5."""

    def test_degrees(self, table_params):
        """Test the degree pattern and the vanishing low orders of f_4, f_5."""
        polys = polynomials(coefficients(table_params))
        assert [polys.degree(nu) for nu in range(6)] == [2, 2, 3, 3, 3, 3]
        assert polys[4][0] == 0.0
        assert polys[5][0] == 0.0
        assert polys[5][1] == 0.0

    def test_evaluate(self, table_params):
        """Test f_nu(0) is its constant coefficient."""
        table = coefficients(table_params)
        polys = polynomials(table)
        assert polys.evaluate(0, 0.0) == pytest.approx(table.b50)
        assert polys.evaluate(1, [0.0, 2.0]) == pytest.approx(
            [table.b40, table.b40 + 2 * table.b41 + 4 * table.b42],
        )


class TestRoots:
    """Test cases for root labelling."""

    @pytest.mark.parametrize(("i_s", "c", "r", "i_m4", "i_p4", "i_m5", "i_p5"), ROOT_POINTS)
    def test_labelled_roots(self, i_s, c, r, i_m4, i_p4, i_m5, i_p5):
        """Test the four labelled roots at reference points."""
        _table, _polys, catalog = analyze(reduced(r, i_s, c))
        assert catalog.i_minus4 == pytest.approx(i_m4, rel=2e-3)
        assert catalog.i_plus4 == pytest.approx(i_p4, rel=2e-3)
        assert catalog.i_minus5 == pytest.approx(i_m5, rel=2e-3)
        assert catalog.i_plus5 == pytest.approx(i_p5, rel=2e-3)
        assert catalog.i_minus4 < 0 < catalog.i_plus4

    def test_classical_roots(self, table_params):
        """Test I_-5 tracks I0 and I_+4, I_+5 nearly coincide when c I_s is large."""
        _table, _polys, catalog = analyze(table_params)
        i0 = classical_intensity(table_params.r, table_params.i_s, table_params.c)
        assert catalog.i_minus5 == pytest.approx(i0, rel=1e-2)
        assert catalog.i_plus5 == pytest.approx(catalog.i_plus4, rel=1e-2)
        assert catalog.decay_ratio == pytest.approx(0.59334, rel=1e-4)

    @pytest.mark.parametrize("point", [(2.0, 40.0, 3.0), (95.95, 100.0, 20.0), (1.0, 4.0, 0.3)])
    def test_factorization(self, point):
        """Test the factored form rebuilds every f_nu."""
        i_s, c, r = point
        _table, polys, catalog = analyze(reduced(r, i_s, c))
        for nu in range(6):
            scale = np.max(np.abs(polys[nu]))
            assert np.max(np.abs(catalog.expand(nu) - polys[nu])) <= 1e-10 * scale

    @pytest.mark.parametrize("point", [(2.0, 40.0, 3.0), (95.95, 100.0, 20.0)])
    def test_named_roots(self, point):
        """Test I_11..I_33 are zeros of f_4, f_3 and f_2."""
        i_s, c, r = point
        _table, polys, catalog = analyze(reduced(r, i_s, c))
        named = {
            4: (catalog.i_11, catalog.i_12),
            3: (catalog.i_21, catalog.i_22, catalog.i_23),
            2: (catalog.i_31, catalog.i_32, catalog.i_33),
        }
        polyval = np.polynomial.polynomial.polyval
        for nu, labelled in named.items():
            for root in labelled:
                assert root is not None
                scale = polyval(abs(root), np.abs(polys[nu]))
                assert abs(polyval(root, polys[nu])) <= 1e-8 * scale
            real = [root.real for root in labelled if root.imag == 0]
            assert real == sorted(real)

    def test_degenerate(self, table_params):
        """Test a vanishing b42 is reported as degenerate."""
        table = coefficients(table_params).mutated("b42", factor=0.0)
        with pytest.raises(DegenerateRegimeError):
            roots(polynomials(table), table)


class TestThermalRoot:
    """Test cases for the negative root of the thermal cubic."""

    @pytest.mark.parametrize(
        ("i_s", "c", "r", "expected"),
        [
            (1.0, 4.0, 1e-6, -1.0),
            (1.0, 4.0, 1e6, -0.999996),
            (40.0, 20.0, 0.01254, -0.988368),
            (2.0, 40.0, 0.01, -0.993513),
            (1.0, 10.0, 0.005, -0.99773),
            (40.0, 20.0, 0.5, -0.565369),
            (1.0, 1.0, 1.0, -0.843347),
        ],
    )
    def test_reference_values(self, i_s, c, r, expected):
        """Test lambda against reference values and the cubic residual."""
        table, _polys, catalog = analyze(reduced(r, i_s, c))
        lam = catalog.thermal_root
        assert lam == pytest.approx(expected, abs=2e-6)
        terms = np.array([table.b50, table.b40 * lam, table.b30 * lam**2, table.b20 * lam**3])
        assert abs(terms.sum()) <= 1e-10 * np.abs(terms).sum()
        assert catalog.thermal_scale == pytest.approx(1.0 / lam)

    def test_no_negative_root(self):
        """Test selection fails when the cubic has no negative real root."""
        catalog = RootCatalog(
            leading=(1.0,) * 6,
            factor_roots=(PolyRoots(real=()),) * 6,
            thermal_cubic=real_roots([-1.0, 1.0]),
        )
        with pytest.raises(RootSelectionError):
            _ = catalog.thermal_root
