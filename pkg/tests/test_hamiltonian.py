import numpy as np
import pytest

from awisim.hamiltonian import build_h0, build_h_nh, jump_channels
from awisim.scheme import SchemeParams, departure_rates

from conftest import random_params


class TestH0:
    def test_free_atom_is_zero(self):
        p = SchemeParams(gamma_21=1.0, gamma_32=5.0, gamma_34=10.0, lambda_pump=0.3)
        assert np.all(build_h0(p) == 0.0)

    def test_scan_configuration_entries(self):
        p = SchemeParams(omega_p=0.001, omega_s=70.0, omega_w=20.0,
                         gamma_21=1.0, gamma_32=5.0, gamma_34=10.0, lambda_pump=0.3)
        h = build_h0(p)
        assert h[0, 1] == pytest.approx(-0.0005)
        assert h[1, 1] == 0.0  # probe on resonance
        p2 = p.replace(delta_p=0.7)
        assert build_h0(p2)[1, 1] == pytest.approx(0.7)

    def test_cumulative_detuning_diagonal(self):
        p = SchemeParams(delta_p=1.0, delta_s=2.0, delta_w=5.0, gamma_21=1.0)
        diag = np.real(np.diag(build_h0(p)))
        assert diag == pytest.approx([0.0, 1.0, 3.0, -2.0])
        # reduces to (0, 0, Ds, Ds - Dw) at probe resonance
        diag0 = np.real(np.diag(build_h0(p.replace(delta_p=0.0))))
        assert diag0 == pytest.approx([0.0, 0.0, 2.0, -3.0])

    def test_hermitian(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            h = build_h0(random_params(rng))
            assert np.max(np.abs(h - h.conj().T)) < 1e-14

    def test_equals_hermitian_part_of_h_nh(self):
        rng = np.random.default_rng(12)
        for _ in range(100):
            p = random_params(rng)
            h0 = build_h0(p)
            hnh = build_h_nh(p)
            assert np.max(np.abs(h0 - 0.5 * (hnh + hnh.conj().T))) < 1e-14


class TestHNH:
    def test_no_dissipation_is_hermitian(self):
        p = SchemeParams(omega_p=1.0, omega_s=2.0, omega_w=3.0, delta_p=0.5)
        hnh = build_h_nh(p)
        assert np.max(np.abs(hnh - hnh.conj().T)) < 1e-14
        assert np.max(np.abs(hnh - build_h0(p))) < 1e-14

    def test_three_photon_resonant_corner(self):
        p = SchemeParams(omega_p=0.001, omega_s=70.0, omega_w=20.0,
                         delta_p=0.0, delta_s=5.0, delta_w=5.0,
                         gamma_21=1.0, gamma_32=5.0, gamma_34=10.0, lambda_pump=0.3)
        assert build_h_nh(p)[3, 3] == 0.0

    def test_antihermitian_part_is_departure_rates(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            p = random_params(rng)
            hnh = build_h_nh(p)
            anti = 1j * (hnh - hnh.conj().T)
            g = departure_rates(p).as_tuple()
            assert np.real(np.diag(anti)) == pytest.approx(g, abs=1e-14)
            assert np.max(np.abs(anti - np.diag(np.diag(anti)))) < 1e-14

    def test_decomposition_identity(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            p = random_params(rng)
            expected = build_h0(p).astype(complex)
            for ch in jump_channels(p):
                proj = np.zeros((4, 4), dtype=complex)
                proj[ch.from_level - 1, ch.from_level - 1] = 1.0
                expected -= 0.5j * ch.rate * proj
            assert np.max(np.abs(build_h_nh(p) - expected)) < 1e-14

    def test_eigenvalues_decay(self):
        rng = np.random.default_rng(15)
        for _ in range(200):
            vals = np.linalg.eigvals(build_h_nh(random_params(rng)))
            assert np.all(vals.imag <= 1e-12)


class TestJumpChannels:
    def test_scan_configuration_rates(self):
        p = SchemeParams(gamma_21=1.0, gamma_32=5.0, gamma_34=10.0, lambda_pump=0.3)
        rates = {ch.label: ch.rate for ch in jump_channels(p)}
        assert rates == {"J12": 0.3, "J21": 1.3, "J32": 5.0, "J34": 10.0}

    def test_no_pump(self):
        p = SchemeParams(gamma_21=1.0, gamma_32=5.0, gamma_34=10.0)
        rates = {ch.label: ch.rate for ch in jump_channels(p)}
        assert rates["J12"] == 0.0
        assert rates["J21"] == 1.0

    def test_zero_rate_channels_retained(self):
        chans = jump_channels(SchemeParams(gamma_21=1.0))
        assert len(chans) == 4
        assert [ch.label for ch in chans] == ["J12", "J21", "J32", "J34"]

    def test_topology(self):
        for ch in jump_channels(SchemeParams(gamma_21=1.0, gamma_32=1.0, gamma_34=1.0,
                                             lambda_pump=1.0)):
            assert ch.to_level != 3
            assert ch.from_level != 4
            op = ch.operator()
            assert op[ch.to_level - 1, ch.from_level - 1] == 1.0
            assert np.sum(np.abs(op)) == 1.0

    def test_rates_sum_to_departure_rates(self):
        rng = np.random.default_rng(16)
        for _ in range(100):
            p = random_params(rng)
            g = departure_rates(p).as_tuple()
            for level in (1, 2, 3, 4):
                total = sum(ch.rate for ch in jump_channels(p) if ch.from_level == level)
                assert total == pytest.approx(g[level - 1], abs=1e-14)
