import math

import numpy as np
import pytest

from boxforge import box_core as bc
from boxforge import quantum as qm

SZ = np.diag([1.0, -1.0]).astype(complex)
SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def random_realization(rng, da=2, db=2):
    g = rng.standard_normal(da * db) + 1j * rng.standard_normal(da * db)
    state = qm.PureState(da, db, g / np.linalg.norm(g))
    meas_a = tuple(
        qm.ProjectiveMeasurement.from_projector(
            qm._haar_projector(da, int(rng.integers(1, da)), rng)
        )
        for _ in range(2)
    )
    meas_b = tuple(
        qm.ProjectiveMeasurement.from_projector(
            qm._haar_projector(db, int(rng.integers(1, db)), rng)
        )
        for _ in range(2)
    )
    return qm.QuantumRealization(state=state, a_measurements=meas_a, b_measurements=meas_b)


class TestTypes:
    def test_state_normalization_enforced(self):
        with pytest.raises(qm.QuantumError):
            qm.PureState(2, 2, np.array([1.0, 1.0, 0.0, 0.0]))

    def test_measurement_validation(self):
        with pytest.raises(qm.QuantumError):
            qm.ProjectiveMeasurement(dim=2, projectors=(SZ, np.eye(2) - SZ))
        m = qm.ProjectiveMeasurement.from_observable(SZ)
        assert np.allclose(m.projectors[0], np.diag([1.0, 0.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(qm.QuantumError):
            qm.QuantumRealization(
                state=qm.phi_plus(4),
                a_measurements=(qm.ProjectiveMeasurement.from_observable(SZ),) * 2,
                b_measurements=(qm.ProjectiveMeasurement.from_observable(SZ),) * 2,
            )


class TestRealizeBox:
    def test_tsirelson_value(self):
        box = qm.realize_box(qm.tsirelson_realization())
        assert bc.evaluate(bc.chsh(), box) == pytest.approx(2 * math.sqrt(2), abs=1e-12)

    def test_z_basis_correlation(self):
        m = qm.ProjectiveMeasurement.from_observable(SZ)
        box = qm.realize_box(
            qm.QuantumRealization(
                state=qm.phi_plus(2), a_measurements=(m, m), b_measurements=(m, m)
            )
        )
        assert box.table[0, 0, 0, 0] == pytest.approx(0.5, abs=1e-12)
        assert box.table[0, 0, 1, 1] == pytest.approx(0.5, abs=1e-12)
        assert box.table[0, 0, 0, 1] == pytest.approx(0.0, abs=1e-12)

    def test_tilted_at_pi_over_4_is_tsirelson(self):
        realization, alpha = qm.tilted_realization(math.pi / 4)
        assert alpha == 0.0
        box = qm.realize_box(realization)
        ref = qm.realize_box(qm.tsirelson_realization())
        assert box.allclose(ref, 1e-12)

    def test_tsirelson_box_is_not_hardy(self):
        hs = bc.hardy_stats(qm.realize_box(qm.tsirelson_realization()))
        # cells follow from the correlators: (1 +- 1/sqrt(2))/4
        assert hs.z01 == pytest.approx((1 + 2**-0.5) / 4, abs=1e-12)
        assert hs.z10 == pytest.approx((1 + 2**-0.5) / 4, abs=1e-12)
        assert hs.z11 == pytest.approx((1 - 2**-0.5) / 4, abs=1e-12)
        assert not hs.is_hardy_point()

    def test_output_no_signaling_tight(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            da, db = rng.choice([2, 3, 4]), rng.choice([2, 3, 4])
            box = qm.realize_box(random_realization(rng, int(da), int(db)))
            marg_a = box.table.sum(axis=3)
            assert np.max(np.abs(marg_a - marg_a[:, :1, :])) < 1e-12
            marg_b = box.table.sum(axis=2)
            assert np.max(np.abs(marg_b - marg_b[:1, :, :])) < 1e-12


class TestRicochet:
    def test_identity(self):
        assert qm.ricochet_check(np.eye(2), np.eye(2)) == 0.0

    def test_symmetric_x(self):
        assert qm.ricochet_check(SX, np.eye(2)) == pytest.approx(0.0, abs=1e-15)

    @pytest.mark.parametrize("d", [2, 4, 8])
    def test_random_pairs(self, d):
        rng = np.random.default_rng(d)
        for _ in range(100):
            x = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            y = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            assert qm.ricochet_check(x, y) < 1e-12

    def test_wrong_transpose_breaks(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        y = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        phi = np.eye(3, dtype=complex).reshape(-1)
        wrong = np.max(np.abs(np.kron(x, y) @ phi - np.kron(np.eye(3), x.T @ y) @ phi))
        assert wrong > 1e-3


class TestSpectra:
    def test_phi_plus_schmidt(self):
        sd = qm.schmidt(qm.phi_plus(2))
        assert sd.coefficients == pytest.approx((2**-0.5, 2**-0.5))

    @pytest.mark.parametrize("theta", [0.2, 0.5, math.pi / 4])
    def test_schmidt_of_schmidt_form(self, theta):
        sd = qm.schmidt(qm.two_qubit_theta(theta))
        expected = tuple(sorted((math.cos(theta), math.sin(theta)), reverse=True))
        assert sd.coefficients == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_tensor_power_flat(self, n):
        power = qm.state_power(qm.phi_plus(2), n)
        sd = qm.schmidt(power)
        assert len(sd.coefficients) == 2**n
        assert sd.coefficients == pytest.approx((2 ** (-n / 2),) * 2**n)
        # the n-fold tensor power of the qubit pair IS the 2^n-dim pair
        assert np.allclose(power.amplitudes, qm.phi_plus(2**n).amplitudes)

    def test_reduced_spectrum_matches_schmidt(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            g = rng.standard_normal(12) + 1j * rng.standard_normal(12)
            state = qm.PureState(3, 4, g / np.linalg.norm(g))
            spec = qm.reduced_spectrum(state)
            assert spec.shape == (3,)
            assert spec.sum() == pytest.approx(1.0, abs=1e-10)
            sq = np.array([c**2 for c in qm.schmidt(state).coefficients])[:3]
            assert np.allclose(spec, sq, atol=1e-10)

    def test_power_spectrum_binomial(self):
        # squared Schmidt weights of a power state: s^(n-j) (1-s)^j
        state = qm.two_qubit_theta(0.6)
        s = math.cos(0.6) ** 2
        spec = sorted(qm.reduced_spectrum(qm.state_power(state, 3)), reverse=True)
        expected = sorted(
            (s ** (3 - j) * (1 - s) ** j for j in range(4) for _ in range(math.comb(3, j))),
            reverse=True,
        )
        assert spec == pytest.approx(expected, abs=1e-12)


class TestSpectrumObstruction:
    def test_balanced_never_obstructed(self):
        for n in (1, 2, 5, 20):
            assert not qm.spectrum_obstruction(0.5, n)

    def test_unbalanced_obstructed(self):
        assert qm.spectrum_obstruction(0.3, 5)
        assert qm.spectrum_obstruction(0.3, 1)

    def test_grid_equivalence_with_closed_form(self):
        grid = np.concatenate([np.linspace(1e-3, 1 - 1e-3, 999), [0.5]])
        for s in grid:
            predicate = abs(s - 0.5) > 1e-12
            for n in (1, 2, 7, 20):
                assert qm.spectrum_obstruction(float(s), n) == predicate

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            qm.spectrum_obstruction(0.0, 3)
        with pytest.raises(ValueError):
            qm.spectrum_obstruction(1.0, 3)
        with pytest.raises(ValueError):
            qm.spectrum_obstruction(0.4, 0)


class TestTiltedRealization:
    def test_printed_formula_value(self):
        # the often-quoted closed form evaluates to sqrt(2) at theta = pi/8
        assert qm.tilted_alpha_printed(math.pi / 8) == pytest.approx(math.sqrt(2.0))

    def test_matching_alpha_differs_from_printed(self):
        _, alpha = qm.tilted_realization(math.pi / 8)
        assert alpha == pytest.approx(2.0 / math.sqrt(3.0), abs=1e-12)
        assert abs(alpha - qm.tilted_alpha_printed(math.pi / 8)) > 0.2

    @pytest.mark.parametrize("theta", [0.1, math.pi / 8, 0.5, 0.75])
    def test_realization_attains_closed_bound(self, theta):
        realization, alpha = qm.tilted_realization(theta)
        value = bc.evaluate(bc.tilted_chsh(alpha), qm.realize_box(realization))
        assert value == pytest.approx(qm.chsh_alpha_bound(alpha), abs=1e-12)

    @pytest.mark.parametrize("theta", [0.15, 0.5, 0.7])
    def test_realization_attains_seesaw_max(self, theta):
        realization, alpha = qm.tilted_realization(theta)
        value = bc.evaluate(bc.tilted_chsh(alpha), qm.realize_box(realization))
        oracle = qm.chsh_alpha_quantum_max(alpha, restarts=6, seed=2)
        assert value == pytest.approx(oracle, abs=1e-6)

    def test_domain(self):
        with pytest.raises(ValueError):
            qm.tilted_realization(0.0)
        with pytest.raises(ValueError):
            qm.tilted_realization(math.pi / 3)

    def test_fractions_vanish_at_own_alpha(self):
        realization, alpha = qm.tilted_realization(0.6)
        box = qm.realize_box(realization)
        fr = bc.fractions(box, alpha)
        assert fr.tilted_distance == pytest.approx(0.0, abs=1e-6)
        tbox = qm.realize_box(qm.tsirelson_realization())
        fr0 = bc.fractions(tbox, 0.0)
        assert fr0.tsirelson_distance == pytest.approx(0.0, abs=1e-9)
