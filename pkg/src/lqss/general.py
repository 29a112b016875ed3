"""Synthesis of general (active) models via the Bogoliubov factorization.

A general model (S, N, M) with doubled-up matrices factors as
G(s) = V Ghat(s) (V^b S) where N = V Nhat W^b is the Bogoliubov
factorization and Ghat is the transfer function of the reduced system
(I, Nhat, Mhat) with Mhat = W^dag M W.  The reduced system is realized by a
bank of cavities — one per mode, with passive and/or active port couplings
dictated by the canonical blocks — plus a Bogoliubov feedback network

    R = (X - I)(X + I)^-1,
    X = 2i (Ntilde^b)^-1 (J Mhat - J M_conc) Ntilde^-1,

closing the interconnect ports.  X is doubled-up and J-skew (X^b = -X), so
R is Bogoliubov.  Unlike the passive case, X + I can be singular; when that
happens the interconnect rates are perturbed slightly and the transform is
retried.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dusvd import DuSvdResult, bogoliubov_svd
from .errors import (
    NumericalError,
    ParameterError,
    StructureError,
    UnitEigenvalueError,
)
from .krein import (
    check_bogoliubov,
    check_doubled_up,
    flat_adjoint,
    is_doubled_up,
    jmat,
)

#: beamsplitter inserted between the two cavities realizing a complex pair
PAIR_BEAMSPLITTER = np.array([[0.0, 1.0], [-1.0, 0.0]])


def general_tf(s: complex, m_mat: np.ndarray, n_mat: np.ndarray,
               s_mat: np.ndarray) -> np.ndarray:
    """G(s) = [I - N (sI + iJM + N^b N / 2)^-1 N^b] S."""
    dim = m_mat.shape[0]
    nflat = flat_adjoint(n_mat)
    core = np.linalg.solve(
        s * np.eye(dim) + 1j * jmat(dim) @ m_mat + 0.5 * nflat @ n_mat,
        nflat @ s_mat)
    return s_mat - n_mat @ core


def general_cayley(r_mat: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """X = (I + R)(I - R)^-1 for Bogoliubov R without unit eigenvalues."""
    r_mat = np.asarray(r_mat, dtype=complex)
    eye = np.eye(r_mat.shape[0])
    evals = np.linalg.eigvals(r_mat)
    gap = np.abs(evals - 1.0)
    worst = int(np.argmin(gap))
    if gap[worst] < np.sqrt(tol):
        raise UnitEigenvalueError(complex(evals[worst]))
    return (eye + r_mat) @ np.linalg.inv(eye - r_mat)


def general_inv_cayley(x_mat: np.ndarray) -> np.ndarray:
    """R = (X - I)(X + I)^-1 for doubled-up J-skew X."""
    x_mat = np.asarray(x_mat, dtype=complex)
    scale = max(1.0, np.linalg.norm(x_mat))
    if np.linalg.norm(flat_adjoint(x_mat) + x_mat) > 1e-8 * scale:
        raise StructureError("feedback generator must be J-skew (X^b = -X)")
    check_doubled_up(x_mat, what="feedback generator")
    eye = np.eye(x_mat.shape[0])
    shifted = x_mat + eye
    cond = np.linalg.cond(shifted)
    if not np.isfinite(cond) or cond > 1e12:
        raise NumericalError(
            "X + I is numerically singular; the Cayley transform of the "
            "feedback generator does not exist for these interconnect rates")
    return (x_mat - eye) @ np.linalg.inv(shifted)


def active_port_damped_form(lam: float, x: float) -> np.ndarray:
    """Damped one-port representation of an active coupling of strength
    |lam|: the doubled-up 2 x 2 coupling sqrt(|lam|) [[sh x, ch x],
    [ch x, sh x]], whose Gram matrix is lam * I for any damping angle x."""
    if lam >= 0:
        raise ParameterError("damped form applies to negative eigenvalues")
    s, c = np.sinh(x), np.cosh(x)
    return np.sqrt(abs(lam)) * np.array([[s, c], [c, s]])


@dataclass
class PortSpec:
    """Coupling of one cavity mode to one port channel."""

    port: int
    kappa: float = 0.0   # passive rate
    g: float = 0.0       # active rate
    phi: float = 0.0     # passive phase
    theta: float = 0.0   # active phase


@dataclass
class CavitySpec:
    mode: int
    role: str          # passive | active | pair | jordan | tunable | idle
    detuning: float
    ports: list = field(default_factory=list)
    block_value: complex = 0.0


@dataclass
class IntraBlockDevice:
    """A static device wired between cavities of one canonical block."""

    kind: str
    channels: tuple
    matrix: np.ndarray


def assign_cavities(result: DuSvdResult, detunings: np.ndarray) -> tuple:
    """Map canonical blocks to cavities and build the bank Hamiltonian.

    Returns (cavities, devices, m_conc) where m_conc is the 2n x 2n
    doubled-up Hamiltonian of the concatenated bank: the chosen detunings on
    the diagonal plus the interaction terms generated by cascading the two
    cavities of each complex pair through a beamsplitter.
    """
    n = sum(b.size for b in result.blocks)
    detunings = np.asarray(detunings, dtype=float)
    if detunings.shape != (n,):
        raise ParameterError(f"expected {n} detunings, got {detunings.shape}")
    m1 = np.diag(detunings).astype(complex)
    m2 = np.zeros((n, n), dtype=complex)
    cavities, devices = [], []
    pos = 0
    for b in result.blocks:
        if b.kind == "real_positive":
            lam = float(np.real(b.value))
            cavities.append(CavitySpec(
                mode=pos, role="passive", detuning=detunings[pos],
                block_value=b.value,
                ports=[PortSpec(port=pos, kappa=lam)]))
        elif b.kind == "real_negative":
            lam = float(np.real(b.value))
            cavities.append(CavitySpec(
                mode=pos, role="active", detuning=detunings[pos],
                block_value=b.value,
                ports=[PortSpec(port=pos, g=abs(lam))]))
        elif b.kind == "complex_pair":
            alpha = b.params["alpha"]
            beta = b.params["beta"]
            nu = float(np.imag(b.value))
            for k in (0, 1):
                other = pos + 1 - k
                theta = -np.pi / 2 if k == 0 else np.pi / 2
                cavities.append(CavitySpec(
                    mode=pos + k, role="pair",
                    detuning=detunings[pos + k], block_value=b.value,
                    ports=[PortSpec(port=pos + k, kappa=alpha ** 2),
                           PortSpec(port=other, g=beta ** 2, theta=theta)]))
            devices.append(IntraBlockDevice(
                kind="beamsplitter", channels=(pos, pos + 1),
                matrix=PAIR_BEAMSPLITTER.copy()))
            # cascading the two cavities through the beamsplitter induces a
            # mode-mode interaction of strength nu/2
            m2[pos, pos + 1] = m2[pos + 1, pos] = -nu / 2.0
        elif b.kind == "jordan2":
            for k in (0, 1):
                ports = []
                for p in (0, 1):
                    amp1 = b.nbar1[p, k]
                    amp2 = b.nbar2[p, k]
                    if abs(amp1) > 1e-14 or abs(amp2) > 1e-14:
                        ports.append(PortSpec(
                            port=pos + p,
                            kappa=float(abs(amp1)) ** 2,
                            phi=float(np.angle(amp1)) if abs(amp1) > 0 else 0.0,
                            g=float(abs(amp2)) ** 2,
                            theta=float(np.angle(amp2)) if abs(amp2) > 0 else 0.0))
                cavities.append(CavitySpec(
                    mode=pos + k, role="jordan",
                    detuning=detunings[pos + k], block_value=b.value,
                    ports=ports))
        elif b.kind == "degenerate_zero":
            h1 = b.params["h1"]
            e1 = b.params["e1"]
            for k in range(b.size):
                rate = float(h1[k]) ** 2
                theta = 0.0 if e1[k] > 0 else np.pi
                cavities.append(CavitySpec(
                    mode=pos + k, role="tunable",
                    detuning=detunings[pos + k], block_value=0.0,
                    ports=[PortSpec(port=pos + k, kappa=rate, g=rate,
                                    theta=theta)]))
        elif b.kind == "kernel":
            cavities.append(CavitySpec(
                mode=pos, role="idle", detuning=detunings[pos]))
        else:  # pragma: no cover - defensive
            raise NumericalError(f"unknown block kind {b.kind!r}")
        pos += b.size
    m_conc = np.block([[m1, m2], [np.conj(m2), np.conj(m1)]])
    return cavities, devices, m_conc


@dataclass
class GeneralRealization:
    kind: str
    v: np.ndarray              # 2m x 2m Bogoliubov (post network)
    w: np.ndarray              # 2n x 2n Bogoliubov
    factorization: DuSvdResult
    nhat: np.ndarray           # 2m x 2n canonical coupling
    mhat: np.ndarray           # 2n x 2n reduced Hamiltonian W^dag M W
    detunings: np.ndarray
    kappas_tilde: np.ndarray
    m_conc: np.ndarray
    ntilde: np.ndarray
    x: np.ndarray
    r_feedback: np.ndarray
    pre: np.ndarray
    post: np.ndarray
    cavities: list = field(default_factory=list)
    devices: list = field(default_factory=list)
    retries: int = 0


def synthesize_general(m_mat: np.ndarray, n_mat: np.ndarray,
                       s_mat: np.ndarray | None = None,
                       detunings: np.ndarray | None = None,
                       interconnect_kappa=1.0,
                       max_retries: int = 3,
                       rng_seed: int = 7) -> GeneralRealization:
    """Realize a general model as static Bogoliubov networks around a
    cavity bank with feedback."""
    m_mat = np.asarray(m_mat, dtype=complex)
    n_mat = np.asarray(n_mat, dtype=complex)
    dim = m_mat.shape[0]
    n = dim // 2
    m = n_mat.shape[0] // 2
    if s_mat is None:
        s_mat = np.eye(2 * m, dtype=complex)
    s_mat = np.asarray(s_mat, dtype=complex)
    check_doubled_up(m_mat, what="Hamiltonian matrix")
    if np.linalg.norm(m_mat - m_mat.conj().T) > 1e-9 * max(
            1.0, np.linalg.norm(m_mat)):
        raise StructureError("Hamiltonian matrix must be Hermitian")
    check_bogoliubov(s_mat, what="scattering matrix")
    if n_mat.shape[1] != dim:
        raise StructureError("coupling matrix column count must match the "
                             "doubled mode dimension")

    detunings = (np.zeros(n) if detunings is None
                 else np.asarray(detunings, dtype=float))
    kappas_tilde = np.broadcast_to(
        np.asarray(interconnect_kappa, dtype=float), (n,)).copy()
    if np.any(kappas_tilde <= 0):
        raise ParameterError("interconnect rates must be positive")

    fact = bogoliubov_svd(n_mat)
    mhat = fact.w.conj().T @ m_mat @ fact.w
    mhat = (mhat + mhat.conj().T) / 2
    cavities, devices, m_conc = assign_cavities(fact, detunings)

    jfull = jmat(dim)
    rng = np.random.default_rng(rng_seed)
    rates = kappas_tilde
    retries = 0
    while True:
        roots = np.sqrt(np.concatenate([rates, rates]))
        ntilde = np.diag(roots).astype(complex)
        nt_inv = np.diag(1.0 / roots)
        # Ntilde is diagonal positive, so (Ntilde^b)^-1 = Ntilde^-1
        x = 2j * nt_inv @ jfull @ (mhat - m_conc) @ nt_inv
        if not is_doubled_up(x, 1e-7):
            raise NumericalError(
                "feedback generator lost the doubled-up structure")
        try:
            r_feedback = general_inv_cayley(x)
            break
        except NumericalError:
            retries += 1
            if retries > max_retries:
                raise
            rates = kappas_tilde * rng.uniform(0.9, 1.1, size=n)

    return GeneralRealization(
        kind="general", v=fact.v, w=fact.w, factorization=fact,
        nhat=fact.nhat, mhat=mhat, detunings=detunings,
        kappas_tilde=rates, m_conc=m_conc, ntilde=ntilde, x=x,
        r_feedback=r_feedback, pre=flat_adjoint(fact.v) @ s_mat,
        post=fact.v, cavities=cavities, devices=devices, retries=retries)
