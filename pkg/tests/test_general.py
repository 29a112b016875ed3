"""Tests for general (active) synthesis via the Bogoliubov factorization."""

import numpy as np
import pytest

from helpers import random_general_model
from lqss.errors import LqssError, ParameterError, UnitEigenvalueError
from lqss.general import (
    active_port_damped_form,
    general_cayley,
    general_inv_cayley,
    general_tf,
    synthesize_general,
)
from lqss.krein import (
    flat_adjoint,
    jmat,
    random_bogoliubov,
    random_hermitian_doubled_up,
)
from lqss.statespace import Model, close_feedback, verify_realization

# worked 2-mode example: doubled-up M and N with an indefinite Gram
M4 = np.array([
    [2.0, 1.0, 0.0, -1.0],
    [1.0, 2.0, -1.0, 0.0],
    [0.0, -1.0, 2.0, 1.0],
    [-1.0, 0.0, 1.0, 2.0],
])
N4 = np.array([
    [0.0, 1.0, 2.0, 0.0],
    [-1.0, 2.0, 1.0, -1.0],
    [2.0, 0.0, 0.0, 1.0],
    [1.0, -1.0, -1.0, 2.0],
])
@pytest.fixture(scope="module")
def real4():
    return synthesize_general(M4, N4)


class TestGeneralCayley:
    def test_roundtrip(self):
        rng = np.random.default_rng(51)
        h = random_hermitian_doubled_up(2, rng)
        x = 1j * jmat(4) @ h  # J-skew and doubled-up
        r = general_inv_cayley(x)
        assert np.linalg.norm(general_cayley(r) - x) < 1e-10

    def test_result_is_bogoliubov(self):
        rng = np.random.default_rng(52)
        h = random_hermitian_doubled_up(3, rng)
        x = 1j * jmat(6) @ h
        r = general_inv_cayley(x)
        assert np.linalg.norm(r @ flat_adjoint(r) - np.eye(6)) < 1e-9

    def test_unit_eigenvalue(self):
        with pytest.raises(UnitEigenvalueError) as info:
            general_cayley(np.eye(4))
        assert abs(info.value.eigenvalue - 1.0) < 1e-10

    def test_loop_gain_identity(self):
        # (I - R)^-1 R = -I/2 + X/2 is what feedback elimination uses
        rng = np.random.default_rng(53)
        h = random_hermitian_doubled_up(2, rng)
        x = 1j * jmat(4) @ h
        r = general_inv_cayley(x)
        eye = np.eye(4)
        lhs = np.linalg.solve(eye - r, r)
        assert np.linalg.norm(lhs - (-eye / 2 + x / 2)) < 1e-10


class TestActivePortDampedForm:
    @pytest.mark.parametrize("x", [0.0, 0.3, -1.1, 2.0])
    def test_gram_is_constant(self, x):
        lam = -2.7
        nhat = active_port_damped_form(lam, x)
        gram = flat_adjoint(nhat) @ nhat
        assert np.allclose(gram, lam * np.eye(2), atol=1e-12)

    def test_positive_rejected(self):
        with pytest.raises(ParameterError):
            active_port_damped_form(1.0, 0.5)


class TestWorkedExample:
    def test_gram_eigenvalues(self, real4):
        evals = np.sort(np.real(
            np.linalg.eigvals(flat_adjoint(N4) @ N4)))
        lam = 2.0 * np.sqrt(2.0)
        assert np.allclose(evals, [-lam, -lam, lam, lam], atol=1e-3)

    def test_block_kinds(self, real4):
        kinds = sorted(b.kind for b in real4.factorization.blocks)
        assert kinds == ["real_negative", "real_positive"]

    def test_canonical_coupling_entries(self, real4):
        nhat = real4.nhat
        amp = np.sqrt(2.0 * np.sqrt(2.0))
        for pos in [(0, 0), (1, 3), (2, 2), (3, 1)]:
            assert abs(nhat[pos]) == pytest.approx(amp, abs=1e-3)
        assert np.sum(np.abs(nhat)) == pytest.approx(4 * amp, abs=1e-6)

    def test_reduced_hamiltonian(self, real4):
        # Mhat = W^dag M W depends on the (hyperbolic) basis freedom inside
        # degenerate eigenspaces, but J Mhat = W^-1 (J M) W is a similarity:
        # the drift spectrum is preserved exactly
        j = jmat(4)
        lhs = np.sort_complex(np.linalg.eigvals(j @ real4.mhat))
        rhs = np.sort_complex(np.linalg.eigvals(j @ M4))
        # J M4 has a defective zero eigenvalue, which rounds like sqrt(eps)
        assert np.allclose(lhs, rhs, atol=1e-6)
        assert np.allclose(real4.mhat, real4.mhat.conj().T, atol=1e-12)

    def test_zero_detunings_give_zero_bank_hamiltonian(self, real4):
        assert np.linalg.norm(real4.m_conc) == 0.0
        assert np.allclose(real4.x, 2j * jmat(4) @ real4.mhat, atol=1e-12)

    def test_hamiltonian_recovery_identity(self, real4):
        j = jmat(4)
        lhs = (j @ real4.m_conc
               - 0.5j * flat_adjoint(real4.ntilde) @ real4.x @ real4.ntilde)
        assert np.linalg.norm(lhs - j @ real4.mhat) < 1e-12

    def test_factorization(self, real4):
        recon = real4.v @ real4.nhat @ flat_adjoint(real4.w)
        assert np.linalg.norm(recon - N4) < 1e-10

    def test_verification(self, real4):
        model = Model(kind="general", m_mat=M4, n_mat=N4, s_mat=np.eye(4))
        report = verify_realization(model, real4, tol=1e-7)
        assert report.passed, report.summary()

    def test_dual_feedback_paths(self, real4):
        for s in (0.4 + 1.5j, 5.0j, 2.0 + 0.1j):
            g1 = close_feedback("general", real4.nhat, real4.m_conc,
                                real4.ntilde, real4.r_feedback,
                                method="elimination").eval(s)
            g2 = close_feedback("general", real4.nhat, real4.m_conc,
                                real4.ntilde, real4.r_feedback,
                                method="cayley").eval(s)
            assert np.linalg.norm(g1 - g2) < 1e-10

    def test_cavity_roles(self, real4):
        roles = sorted(c.role for c in real4.cavities)
        assert roles == ["active", "passive"]


@pytest.fixture(scope="module")
def model():
    roots = np.sqrt(np.array([1.0, 2.0, 3.0])).reshape(3, 1)
    n_mat = np.block([[roots, roots], [roots, roots]]).astype(complex)
    m_mat = np.zeros((2, 2), dtype=complex)
    return Model(kind="general", m_mat=m_mat, n_mat=n_mat,
                 s_mat=np.eye(6, dtype=complex))


class TestDegenerateExample:
    """One cavity, three channels, equal passive and active rates."""

    def test_synthesis(self, model):
        real = synthesize_general(model.m_mat, model.n_mat, model.s_mat)
        (block,) = real.factorization.blocks
        assert block.kind == "degenerate_zero"
        # total rate kappa_1 + kappa_2 + kappa_3 = 6 on a single port
        nhat1 = real.nhat[:3, :1]
        nhat2 = real.nhat[:3, 1:2]
        target = np.array([[np.sqrt(6.0)], [0.0], [0.0]])
        assert np.allclose(nhat1, target, atol=1e-10)
        assert np.allclose(nhat2, target, atol=1e-10)
        assert np.linalg.norm(real.mhat) < 1e-10
        assert np.linalg.norm(real.x) < 1e-10

    def test_verification(self, model):
        real = synthesize_general(model.m_mat, model.n_mat, model.s_mat)
        report = verify_realization(model, real, tol=1e-10)
        assert report.passed, report.summary()

    def test_tunable_cavity(self, model):
        real = synthesize_general(model.m_mat, model.n_mat, model.s_mat)
        (cav,) = real.cavities
        assert cav.role == "tunable"
        (port,) = cav.ports
        assert port.kappa == pytest.approx(6.0, abs=1e-10)
        assert port.g == pytest.approx(6.0, abs=1e-10)


class TestComplexPair:
    def test_pair_cavities_and_interaction(self):
        rng = np.random.default_rng(54)
        # plant a complex quadruple and synthesize around it
        from helpers import planted_coupling
        n_mat, _, _, n = planted_coupling([("pair", 1.0 + 1.5j)], rng)
        m_mat = random_hermitian_doubled_up(n, rng, scale=0.5)
        real = synthesize_general(m_mat, n_mat)
        roles = [c.role for c in real.cavities]
        assert roles == ["pair", "pair"]
        assert len(real.devices) == 1
        assert real.devices[0].kind == "beamsplitter"
        # the cascade-induced interaction term nu/2 sits in the upper-right
        # (two-photon) half-block of the bank Hamiltonian
        nu = 1.5
        assert real.m_conc[0, n + 1] == pytest.approx(-nu / 2, abs=1e-8)
        assert real.m_conc[1, n] == pytest.approx(-nu / 2, abs=1e-8)
        model = Model(kind="general", m_mat=m_mat, n_mat=n_mat,
                      s_mat=np.eye(n_mat.shape[0], dtype=complex))
        assert verify_realization(model, real, tol=1e-7).passed


def test_general_tf_matches_model():
    rng = np.random.default_rng(55)
    m_mat, n_mat = random_general_model(2, 2, rng)
    model = Model(kind="general", m_mat=m_mat, n_mat=n_mat,
                  s_mat=np.eye(4, dtype=complex))
    for s in (0.7 + 2.0j, 4.0j):
        assert np.allclose(model.tf(s),
                           general_tf(s, m_mat, n_mat, np.eye(4)),
                           atol=1e-12)


def test_scattering_matrix_applied():
    rng = np.random.default_rng(56)
    m_mat, n_mat = random_general_model(2, 2, rng)
    s_mat = random_bogoliubov(2, seed=56)
    model = Model(kind="general", m_mat=m_mat, n_mat=n_mat, s_mat=s_mat)
    real = synthesize_general(m_mat, n_mat, s_mat)
    assert verify_realization(model, real, tol=1e-7).passed


def test_random_general_sweep():
    rng = np.random.default_rng(57)
    done = 0
    while done < 10:
        n = int(rng.integers(1, 4))
        m = int(rng.integers(1, 4))
        m_mat, n_mat = random_general_model(n, m, rng)
        try:
            real = synthesize_general(m_mat, n_mat)
        except LqssError:
            continue  # non-generic spectrum; resample
        model = Model(kind="general", m_mat=m_mat, n_mat=n_mat,
                      s_mat=np.eye(2 * m, dtype=complex))
        report = verify_realization(model, real, tol=1e-7)
        assert report.passed, report.summary()
        done += 1
