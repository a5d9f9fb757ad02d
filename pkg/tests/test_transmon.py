import numpy as np
import pytest

from fieldcqed.errors import ContractViolationError
from fieldcqed.qops import commutator
from fieldcqed.transmon import (
    TransmonParams,
    TunnelingSign,
    anharmonicity,
    build_charge_hamiltonian,
    charge_dispersion,
    charge_matrix_element,
    charge_number_op,
    cos_phi_op,
    sin_phi_op,
    solve,
    transition_dispersion,
)


class TestHamiltonian:
    def test_diagonal_at_zero_ej(self):
        p = TransmonParams(EC=1.3, EJ=0.0, ng=0.0, n_cutoff=1)
        h = build_charge_hamiltonian(p).mat
        assert np.allclose(h, np.diag([4 * 1.3, 0.0, 4 * 1.3]), atol=0, rtol=0)

    def test_offdiagonal_sign(self):
        pp = TransmonParams(EC=1.0, EJ=2.0, n_cutoff=2, sign=TunnelingSign.PLUS)
        pm = TransmonParams(EC=1.0, EJ=2.0, n_cutoff=2, sign=TunnelingSign.MINUS)
        assert build_charge_hamiltonian(pp).mat[0, 1] == 1.0
        assert build_charge_hamiltonian(pm).mat[0, 1] == -1.0

    def test_spectra_gauge_equivalent(self):
        # |N> -> (-1)^N |N> maps one tunneling sign onto the other
        for ec, ej, ng in [(0.3, 15.0, 0.0), (1.0, 50.0, 0.37), (0.2, 0.5, 0.5)]:
            wp = solve(TransmonParams(ec, ej, ng, 20, TunnelingSign.PLUS)).levels
            wm = solve(TransmonParams(ec, ej, ng, 20, TunnelingSign.MINUS)).levels
            scale = np.abs(wp).max()
            assert np.allclose(wp, wm, atol=1e-12 * scale, rtol=0)

    def test_degeneracy_point_block_gap(self):
        # at n_g = 1/2 the |0>,|1> block is [[EC, EJ/2], [EJ/2, EC]]: gap EJ
        ec, ej = 1.0, 0.1
        p = TransmonParams(ec, ej, ng=0.5, n_cutoff=3)
        h = build_charge_hamiltonian(p).mat
        i0 = p.n_cutoff  # row of N=0
        block = h[i0 : i0 + 2, i0 : i0 + 2]
        ev = np.linalg.eigvalsh(block)
        assert ev[1] - ev[0] == pytest.approx(ej, abs=1e-14)

    def test_invalid_params(self):
        with pytest.raises(ContractViolationError):
            TransmonParams(EC=0.0, EJ=1.0)
        with pytest.raises(ContractViolationError):
            TransmonParams(EC=1.0, EJ=-1.0)
        with pytest.raises(ContractViolationError):
            TransmonParams(EC=1.0, EJ=1.0, n_cutoff=0)


class TestSolve:
    def test_zero_ej_levels(self):
        ec = 0.7
        s = solve(TransmonParams(EC=ec, EJ=0.0, n_cutoff=5))
        assert np.allclose(s.levels[:4], [0.0, 4 * ec, 4 * ec, 16 * ec], atol=1e-12)

    def test_asymptotic_qubit_frequency(self):
        # sqrt(8 EC EJ) - EC from the large-EJ/EC expansion, independent of
        # the diagonalization path
        ec, ej = 0.3, 15.0
        s = solve(TransmonParams(ec, ej, n_cutoff=40))
        w01 = s.transition(0, 1)
        approx = np.sqrt(8 * ec * ej) - ec
        assert abs(w01 - approx) / approx < 0.03

    def test_cutoff_convergence(self):
        a = solve(TransmonParams(1.0, 50.0, n_cutoff=20)).levels[:5]
        b = solve(TransmonParams(1.0, 50.0, n_cutoff=30)).levels[:5]
        denom = np.maximum(np.abs(b), 1.0)
        assert np.max(np.abs(a - b) / denom) < 1e-10

    def test_orthonormal_eigvecs(self):
        s = solve(TransmonParams(0.25, 12.0, ng=0.2))
        g = s.eigvecs.conj().T @ s.eigvecs
        assert np.max(np.abs(g - np.eye(s.n_levels))) < 1e-10

    def test_phase_fixing(self):
        s = solve(TransmonParams(0.25, 12.0, ng=0.13))
        for j in range(s.n_levels):
            v = s.eigvecs[:, j]
            k = np.argmax(np.abs(v))
            assert v[k].real > 0
            assert abs(v[k].imag) < 1e-14

    def test_ng_symmetries(self):
        base = solve(TransmonParams(1.0, 30.0, ng=0.21)).levels[:6]
        shifted = solve(TransmonParams(1.0, 30.0, ng=1.21)).levels[:6]
        mirrored = solve(TransmonParams(1.0, 30.0, ng=-0.21)).levels[:6]
        scale = np.abs(base).max()
        assert np.allclose(base, shifted, atol=1e-10 * scale, rtol=0)
        assert np.allclose(base, mirrored, atol=1e-10 * scale, rtol=0)


class TestChargeMatrixElement:
    def test_parity_zero(self):
        s = solve(TransmonParams(1.0, 50.0, ng=0.0))
        assert abs(charge_matrix_element(s, 0, 0)) < 1e-12

    def test_asymptotic_01(self):
        # (1/sqrt 2) (EJ / 8 EC)^(1/4) at EJ/EC = 50 -> 1.11803...
        s = solve(TransmonParams(1.0, 50.0))
        val = abs(charge_matrix_element(s, 0, 1))
        approx = (50.0 / 8.0) ** 0.25 / np.sqrt(2.0)
        assert abs(val - approx) / approx < 0.03

    def test_nearest_neighbor_dominance(self):
        s = solve(TransmonParams(1.0, 50.0))
        r = abs(charge_matrix_element(s, 0, 2)) / abs(charge_matrix_element(s, 0, 1))
        assert r < 0.05

    def test_symmetric_exactly(self):
        s = solve(TransmonParams(0.3, 15.0, ng=0.4))
        assert charge_matrix_element(s, 1, 2) == charge_matrix_element(s, 2, 1)

    def test_index_range(self):
        s = solve(TransmonParams(0.3, 15.0, n_cutoff=2))
        with pytest.raises(IndexError):
            charge_matrix_element(s, 0, 5)


class TestDispersion:
    def test_zero_ej_closed_form(self):
        # diagonal spectrum: level 0 sweeps from 0 to 4 EC / 4 = EC peak to peak
        ec = 0.9
        d = charge_dispersion(TransmonParams(EC=ec, EJ=0.0, n_cutoff=4), level=0)
        assert d == pytest.approx(ec, abs=1e-12)

    def test_flat_in_transmon_regime(self):
        p = TransmonParams(1.0, 50.0)
        d = charge_dispersion(p, level=0)
        w01 = solve(p).transition(0, 1)
        assert d / w01 < 1e-5

    def test_transition_dispersion_smaller_than_levels(self):
        p = TransmonParams(0.3, 15.0)
        dt = transition_dispersion(p, 0, 1)
        w01 = solve(p).transition(0, 1)
        assert dt / w01 < 1e-5
        assert dt >= 0.0


class TestAnharmonicity:
    def test_zero_ej(self):
        ec = 0.5
        s = solve(TransmonParams(EC=ec, EJ=0.0, n_cutoff=5))
        assert anharmonicity(s) == pytest.approx(8 * ec, rel=1e-12)

    def test_transmon_regime_value(self):
        s = solve(TransmonParams(1.0, 50.0))
        assert abs(anharmonicity(s) - (-1.0)) < 0.15

    def test_negative_across_regime(self):
        for ratio in (20.0, 50.0, 100.0):
            s = solve(TransmonParams(1.0, ratio))
            assert anharmonicity(s) < 0

    def test_needs_three_levels(self):
        s = solve(TransmonParams(1.0, 1.0, n_cutoff=1))
        assert s.n_levels == 3
        anharmonicity(s)  # exactly three is enough


class TestPhaseOperators:
    def test_charge_velocity_identity(self):
        # i[H, n] = -EJ sin(phi) exactly in the truncated basis
        for sign in TunnelingSign:
            p = TransmonParams(0.8, 7.0, ng=0.3, n_cutoff=6, sign=sign)
            h = build_charge_hamiltonian(p)
            n = charge_number_op(p.n_cutoff)
            lhs = 1j * commutator(h, n).mat
            rhs = -p.EJ * sin_phi_op(p.n_cutoff, sign).mat
            assert np.allclose(lhs, rhs, atol=1e-13, rtol=0)

    def test_cos_reproduces_tunneling_block(self):
        p = TransmonParams(0.8, 7.0, n_cutoff=4)
        h = build_charge_hamiltonian(p).mat
        n_vals = np.arange(-4, 5, dtype=float)
        diag = np.diag(4 * p.EC * (n_vals - p.ng) ** 2)
        rebuilt = diag - p.EJ * cos_phi_op(4, p.sign).mat
        assert np.allclose(h, rebuilt, atol=0, rtol=0)

    def test_hermitian(self):
        assert cos_phi_op(5).hermitian
        assert sin_phi_op(5).hermitian
