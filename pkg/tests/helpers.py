"""Shared builders for planted factorization test cases.

A planted case starts from a hand-built canonical coupling Nhat (whose Gram
eigenvalues are known exactly) and hides it behind random Bogoliubov factors:
N = V Nhat W^b.  Recovering the factorization must then reproduce the planted
eigenvalue multiset and reconstruct N.
"""

import numpy as np

from lqss.dusvd import SIGMA2, jordan2_factor, pair_weights
from lqss.krein import flat_adjoint, random_bogoliubov


def random_unitary(n, rng):
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_passive_model(n, m, rng):
    """Hermitian M, dense N, random unitary S for a passive (S, N, M)."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m_mat = (a + a.conj().T) / 2
    n_mat = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    s_mat = random_unitary(m, rng)
    return m_mat, n_mat, s_mat


def random_general_model(n, m, rng, scale=0.6):
    """Doubled-up Hermitian M and doubled-up N for a general (I, N, M)."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    m1 = (a + a.conj().T) / 2
    m2 = (b + b.T) / 2
    m_mat = np.block([[m1, m2], [m2.conj(), m1.conj()]])
    n1 = rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n))
    n2 = scale * (rng.normal(size=(m, n)) + 1j * rng.normal(size=(m, n)))
    n_mat = np.block([[n1, n2], [n2.conj(), n1.conj()]])
    return m_mat, n_mat


def canonical_block(spec):
    """(nbar1, nbar2) half-blocks for one planted block spec.

    spec is ('pos', lam), ('neg', lam), ('pair', lam), ('jordan', lam) or
    ('deg', h).
    """
    kind = spec[0]
    if kind == "pos":
        return np.array([[np.sqrt(spec[1])]]), np.zeros((1, 1))
    if kind == "neg":
        return np.zeros((1, 1)), np.array([[np.sqrt(-spec[1])]])
    if kind == "pair":
        alpha, beta = pair_weights(spec[1])
        return alpha * np.eye(2), -beta * SIGMA2
    if kind == "jordan":
        nbar1, nbar2, _ = jordan2_factor(float(spec[1]))
        return nbar1, nbar2
    if kind == "deg":
        h = np.atleast_1d(np.asarray(spec[1], dtype=float))
        return np.diag(h), np.diag(h)
    raise ValueError(f"unknown planted block kind {kind!r}")


def planted_coupling(specs, rng, extra_ports=0, extra_modes=0):
    """Build N = V Nhat W^b hiding the canonical blocks of ``specs``.

    Returns (coupling, expected_eigenvalues, m, n) where the eigenvalues are
    those of the exactly-known planted Gram Nhat^b Nhat (length 2n).
    """
    blocks = [canonical_block(s) for s in specs]
    r = sum(b[0].shape[0] for b in blocks)
    m = r + extra_ports
    n = r + extra_modes
    nhat1 = np.zeros((m, n), dtype=complex)
    nhat2 = np.zeros((m, n), dtype=complex)
    pos = 0
    for b1, b2 in blocks:
        s = b1.shape[0]
        nhat1[pos:pos + s, pos:pos + s] = b1
        nhat2[pos:pos + s, pos:pos + s] = b2
        pos += s
    nhat = np.block([[nhat1, nhat2], [np.conj(nhat2), np.conj(nhat1)]])
    expected = np.linalg.eigvals(flat_adjoint(nhat) @ nhat)
    v = random_bogoliubov(m, seed=rng.integers(2 ** 31), scale=0.4)
    w = random_bogoliubov(n, seed=rng.integers(2 ** 31), scale=0.4)
    coupling = v @ nhat @ flat_adjoint(w)
    return coupling, expected, m, n


def multiset_distance(expected, computed):
    """Greedy matching distance between two complex multisets."""
    expected = list(np.asarray(expected, dtype=complex))
    computed = list(np.asarray(computed, dtype=complex))
    assert len(expected) == len(computed)
    worst = 0.0
    for x in sorted(expected, key=abs, reverse=True):
        gaps = [abs(x - y) for y in computed]
        k = int(np.argmin(gaps))
        worst = max(worst, gaps[k])
        computed.pop(k)
    return worst
