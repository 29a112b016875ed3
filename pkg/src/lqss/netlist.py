"""Decomposition of static networks into optical device schedules.

A Bogoliubov matrix R factors as (Bloch-Messiah)

    R = diag(U2, U2#) [[cosh X, sinh X], [sinh X, cosh X]] diag(U1, U1#)

with U1, U2 unitary and X = diag(x_1..x_m) >= 0; the unitary factors then
break into at most m(m-1)/2 two-channel beamsplitters plus output phases
(triangular elimination), and the middle factor into m single-mode
squeezers.  A ``DeviceSchedule`` is an ordered list of such devices whose
embedded matrices multiply out (left to right) to the decomposed matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag, sqrtm

from .errors import NumericalError, StructureError
from .krein import check_bogoliubov, is_bogoliubov

ANGLE_EPS = 1e-12


def takagi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric factorization A = U diag(s) U^T with s >= 0, U unitary.

    Works for complex symmetric A, including repeated singular values:
    within each group of equal singular values the left/right singular
    bases differ only by a unitary whose symmetric square root realigns
    them.
    """
    a = np.asarray(a, dtype=complex)
    if np.linalg.norm(a - a.T) > 1e-9 * max(1.0, np.linalg.norm(a)):
        raise StructureError("takagi requires a complex symmetric matrix")
    v, s, wh = np.linalg.svd(a)
    w = wh.conj().T
    scale = s[0] if s.size and s[0] > 0 else 1.0
    groups, start = [], 0
    for i in range(1, len(s) + 1):
        if i == len(s) or abs(s[i] - s[start]) > 1e-9 * scale:
            groups.append((start, i))
            start = i
    qs = []
    for lo, hi in groups:
        if s[lo] <= 1e-12 * scale:
            qs.append(np.eye(hi - lo))
            continue
        # v_g^T w_g is unitary symmetric on the group; its principal square
        # root q satisfies v_g conj(q) diag(s) (v_g conj(q))^T = a on it
        q = sqrtm(v[:, lo:hi].T @ w[:, lo:hi])
        qs.append(q)
    u = v @ np.conj(block_diag(*qs))
    if np.linalg.norm(u @ np.diag(s) @ u.T - a) > 1e-7 * max(1.0, scale):
        raise NumericalError("symmetric factorization failed to converge")
    return s, u


def bloch_messiah(r_mat: np.ndarray) -> tuple:
    """Factor Bogoliubov R = diag(U2, U2#) S(x) diag(U1, U1#).

    Returns (u2, x, u1) with x the vector of squeezing parameters >= 0 and
    S(x) = [[cosh X, sinh X], [sinh X, cosh X]].
    """
    r_mat = np.asarray(r_mat, dtype=complex)
    check_bogoliubov(r_mat, tol=1e-7, what="static network")
    m = r_mat.shape[0] // 2
    r1 = r_mat[:m, :m]
    r2 = r_mat[:m, m:]
    # R1 R1^dag = I + R2 R2^dag, so R1 is always invertible.
    b = r2 @ np.conj(np.linalg.inv(r1))
    tanh, u2 = takagi((b + b.T) / 2)
    tanh = np.clip(tanh, 0.0, 1.0 - 1e-15)
    x = np.arctanh(tanh)
    cosh = 1.0 / np.sqrt(1.0 - tanh ** 2)
    u1 = np.diag(1.0 / cosh) @ u2.conj().T @ r1
    # residual check of both half-blocks
    res1 = np.linalg.norm(u2 @ np.diag(cosh) @ u1 - r1)
    res2 = np.linalg.norm(u2 @ np.diag(np.sinh(x)) @ u1.conj() - r2)
    if max(res1, res2) > 1e-7 * max(1.0, np.linalg.norm(r_mat)):
        raise NumericalError("squeezer-unitary factorization residual too "
                             f"large ({max(res1, res2):.3e})")
    return u2, x, u1


@dataclass
class Device:
    kind: str            # beamsplitter | phase | squeezer
    channels: tuple
    params: dict = field(default_factory=dict)

    def embed(self, m: int, doubled: bool) -> np.ndarray:
        """Matrix of the device on m channels (2m x 2m when doubled)."""
        if self.kind == "beamsplitter":
            g = beamsplitter_matrix(**self.params)
            u = np.eye(m, dtype=complex)
            i, k = self.channels
            u[np.ix_([i, k], [i, k])] = g
            return _embed_unitary(u, doubled)
        if self.kind == "phase":
            u = np.eye(m, dtype=complex)
            (i,) = self.channels
            u[i, i] = np.exp(1j * self.params["theta"])
            return _embed_unitary(u, doubled)
        if self.kind == "squeezer":
            if not doubled:
                raise StructureError(
                    "squeezers only exist in doubled-up schedules")
            (i,) = self.channels
            out = np.eye(2 * m, dtype=complex)
            blk = squeezer_matrix(self.params["x"],
                                  self.params.get("phi", 0.0),
                                  self.params.get("psi", 0.0))
            out[np.ix_([i, i + m], [i, i + m])] = blk
            return out
        raise StructureError(f"unknown device kind {self.kind!r}")


def _embed_unitary(u: np.ndarray, doubled: bool) -> np.ndarray:
    if not doubled:
        return u
    m = u.shape[0]
    out = np.zeros((2 * m, 2 * m), dtype=complex)
    out[:m, :m] = u
    out[m:, m:] = np.conj(u)
    return out


def beamsplitter_matrix(theta: float, phi: float = 0.0, psi: float = 0.0,
                        zeta: float = 0.0) -> np.ndarray:
    """Two-channel unitary with transmission cos(theta/2) and three phases."""
    c = np.cos(theta / 2.0)
    s = np.sin(theta / 2.0)
    return np.exp(1j * zeta) * np.array([
        [np.exp(1j * (phi + psi) / 2) * c, np.exp(1j * (psi - phi) / 2) * s],
        [-np.exp(1j * (phi - psi) / 2) * s, np.exp(-1j * (phi + psi) / 2) * c],
    ])


def squeezer_matrix(x: float, phi: float = 0.0, psi: float = 0.0) -> np.ndarray:
    """Doubled-up 2 x 2 single-mode squeezer block."""
    ch, sh = np.cosh(x), np.sinh(x)
    return np.array([
        [np.exp(1j * (phi + psi)) * ch, np.exp(1j * (psi - phi)) * sh],
        [np.exp(1j * (phi - psi)) * sh, np.exp(-1j * (phi + psi)) * ch],
    ])


def beamsplitter_params(g: np.ndarray) -> dict:
    """Recover (theta, phi, psi, zeta) from an arbitrary 2 x 2 unitary."""
    det = np.linalg.det(g)
    zeta = float(np.angle(det) / 2.0)
    gs = g * np.exp(-1j * zeta)
    a, b = gs[0, 0], gs[0, 1]
    theta = float(2.0 * np.arctan2(abs(b), abs(a)))
    half_sum = float(np.angle(a)) if abs(a) > ANGLE_EPS else 0.0
    half_diff = float(np.angle(b)) if abs(b) > ANGLE_EPS else 0.0
    phi = half_sum - half_diff
    psi = half_sum + half_diff
    params = {"theta": theta, "phi": phi, "psi": psi, "zeta": zeta}
    if np.linalg.norm(beamsplitter_matrix(**params) - g) > 1e-8:
        raise NumericalError("beamsplitter parameter extraction failed")
    return params


@dataclass
class DeviceSchedule:
    """Ordered device list; ``matrix()`` multiplies the embeddings out."""

    channels: int
    doubled: bool
    devices: list = field(default_factory=list)

    def matrix(self) -> np.ndarray:
        dim = 2 * self.channels if self.doubled else self.channels
        out = np.eye(dim, dtype=complex)
        for dev in self.devices:
            out = out @ dev.embed(self.channels, self.doubled)
        return out

    def residual(self, target: np.ndarray) -> float:
        return float(np.linalg.norm(self.matrix() - target)
                     / max(1.0, np.linalg.norm(target)))


def reck_decompose(u: np.ndarray) -> DeviceSchedule:
    """Factor a unitary into adjacent-channel beamsplitters plus phases.

    Entries below the diagonal are eliminated column by column from the
    bottom with two-channel rotations; the leftover diagonal becomes output
    phase shifters.  At most m(m-1)/2 beamsplitters are produced.
    """
    u = np.asarray(u, dtype=complex)
    m = u.shape[0]
    if np.linalg.norm(u @ u.conj().T - np.eye(m)) > 1e-8 * m:
        raise StructureError("reck decomposition requires a unitary matrix")
    work = u.copy()
    rotations = []
    for col in range(m - 1):
        for row in range(m - 1, col, -1):
            a = work[row - 1, col]
            b = work[row, col]
            if abs(b) <= ANGLE_EPS * max(1.0, abs(a)):
                continue
            nrm = np.sqrt(abs(a) ** 2 + abs(b) ** 2)
            t = np.array([[np.conj(a), np.conj(b)], [-b, a]]) / nrm
            work[[row - 1, row], :] = t @ work[[row - 1, row], :]
            rotations.append((row - 1, t))
    schedule = DeviceSchedule(channels=m, doubled=False)
    # work = t_k .. t_1 u is diagonal, so u = t_1^dag .. t_k^dag diag
    for row, t in rotations:
        params = beamsplitter_params(t.conj().T)
        schedule.devices.append(Device(
            kind="beamsplitter", channels=(row, row + 1), params=params))
    for i in range(m):
        theta = float(np.angle(work[i, i]))
        if abs(theta) > ANGLE_EPS:
            schedule.devices.append(Device(
                kind="phase", channels=(i,), params={"theta": theta}))
    if schedule.residual(u) > 1e-8:
        raise NumericalError("triangular unitary decomposition residual "
                             "too large")
    return schedule


def schedule_static(r_mat: np.ndarray,
                    kind: str | None = None) -> DeviceSchedule:
    """Device schedule for a static network.

    Unitary inputs give a beamsplitter/phase schedule; Bogoliubov inputs are
    split by ``bloch_messiah`` into (unitary, squeezers, unitary) and the
    pieces concatenated on doubled-up channels.  ``kind`` forces the
    interpretation ('unitary' or 'bogoliubov'); by default Bogoliubov
    structure is preferred when present.
    """
    r_mat = np.asarray(r_mat, dtype=complex)
    dim = r_mat.shape[0]
    eye = np.eye(dim)
    unitary = np.linalg.norm(r_mat @ r_mat.conj().T - eye) <= 1e-8 * dim
    bogoliubov = dim % 2 == 0 and is_bogoliubov(r_mat, 1e-7)
    if kind is None:
        kind = "bogoliubov" if bogoliubov else "unitary"
    if kind == "unitary":
        if not unitary:
            raise StructureError("static network is not unitary")
        return reck_decompose(r_mat)
    if kind != "bogoliubov":
        raise StructureError(f"unknown static network kind {kind!r}")
    if not bogoliubov:
        raise StructureError("static network is not Bogoliubov")
    m = dim // 2
    u2, x, u1 = bloch_messiah(r_mat)
    schedule = DeviceSchedule(channels=m, doubled=True)
    for dev in reck_decompose(u2).devices:
        schedule.devices.append(dev)
    for i in range(m):
        if abs(x[i]) > ANGLE_EPS:
            schedule.devices.append(Device(
                kind="squeezer", channels=(i,), params={"x": float(x[i])}))
    for dev in reck_decompose(u1).devices:
        schedule.devices.append(dev)
    if schedule.residual(r_mat) > 1e-7:
        raise NumericalError("static network schedule residual too large")
    return schedule
