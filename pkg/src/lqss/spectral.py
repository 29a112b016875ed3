"""Eigenvalue classification of coupling Gram matrices in the J-geometry.

For a doubled-up coupling matrix N (2m x 2n), the Gram matrix G = N^b N is
doubled-up and J-Hermitian (G^b = G).  Its eigenvalues come in the patterns

* real positive / real negative: eigenvectors appear in pairs (z, Sigma z#)
  with J-norms +1 / -1,
* complex conjugate quadruples: for each lambda with Im > 0 a pair
  (z1, z2) with <z1, z2> = 1 and all self-J-norms zero,
* zeros, split by whether the eigenvector is annihilated by N itself.

The routines here compute that classification and produce J-orthonormalized
eigenvectors in the normalizations required by the factorization code in
``dusvd``.  Real eigenvalues carrying a 2 x 2 Jordan block are detected and
returned as generalized-eigenvector pairs; larger Jordan blocks are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigvals as dense_eigvals

from .errors import (
    DegeneracyError,
    NumericalError,
    StructureError,
    UnsupportedStructureError,
)
from .krein import (
    check_doubled_up,
    flat_adjoint,
    j_inner,
    jmat,
    swap_conj,
)

# Classification bands.  The class tolerance follows the convention that a
# computed eigenvalue within the band of the real axis / origin is treated as
# real / zero.  Clustering uses a wider band than classification because the
# eigenvalues of a defective (Jordan) matrix split like sqrt(machine eps)
# under rounding; 1e-8 would fail to re-merge them.
TOL_CLASS = 1e-8
TOL_RANK = 1e-8
TOL_CLUSTER = 1e-6


@dataclass
class EigenClass:
    """One classified eigenvalue of the Gram matrix.

    ``vectors`` holds one entry per mode pair: a single J-normalized vector z
    (partner Sigma z# implied) for real and zero eigenvalues, or a tuple
    (z1, z2) for complex pairs and size-2 Jordan blocks.
    """

    kind: str  # real_positive | real_negative | complex_pair |
    #            zero_in_kernel | zero_off_kernel
    value: complex
    vectors: list = field(default_factory=list)
    jordan_size: int = 1
    in_kernel: bool = False  # for jordan_size == 2, value == 0 only

    @property
    def pair_count(self) -> int:
        return len(self.vectors)


@dataclass
class KreinSpectrum:
    """Classified spectrum of a Gram matrix G = N^b N."""

    classes: list
    dim: int  # 2n

    def by_kind(self, kind: str, jordan_size: int | None = None) -> list:
        out = []
        for c in self.classes:
            if c.kind != kind:
                continue
            if jordan_size is not None and c.jordan_size != jordan_size:
                continue
            out.append(c)
        return out

    @property
    def r_plus(self) -> int:
        return sum(c.pair_count for c in self.by_kind("real_positive", 1))

    @property
    def r_minus(self) -> int:
        return sum(c.pair_count for c in self.by_kind("real_negative", 1))

    @property
    def r_c(self) -> int:
        return sum(c.pair_count for c in self.by_kind("complex_pair"))

    @property
    def r_0_off_kernel(self) -> int:
        return sum(c.pair_count for c in self.by_kind("zero_off_kernel", 1))

    @property
    def r_0_kernel(self) -> int:
        return sum(c.pair_count for c in self.by_kind("zero_in_kernel", 1))

    @property
    def jordan_pairs(self) -> list:
        return [c for c in self.classes if c.jordan_size == 2]


def j_gram(n: np.ndarray) -> np.ndarray:
    """Gram matrix N^b N of a doubled-up coupling matrix."""
    check_doubled_up(n, what="coupling matrix")
    return flat_adjoint(n) @ n


def null_space(a: np.ndarray, rtol: float,
               scale: float | None = None) -> np.ndarray:
    """Orthonormal basis of the (numerical) kernel of a.

    The cutoff is ``rtol * scale``; by default ``scale`` is the largest
    singular value of ``a`` itself.  Pass an external scale when ``a`` is a
    shifted matrix that may be close to zero as a whole.
    """
    u, s, vh = np.linalg.svd(a)
    if scale is None:
        scale = s[0] if s.size else 0.0
    cutoff = rtol * scale
    rank = int(np.sum(s > cutoff))
    return vh[rank:].conj().T


def numeric_rank(a: np.ndarray, rtol: float = 1e-10,
                 scale: float | None = None) -> int:
    """Rank with cutoff rtol * scale (scale defaults to the largest
    singular value; pass the natural scale of the problem when ``a`` may be
    a numerically-zero residue of larger quantities)."""
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0:
        return 0
    if scale is None:
        scale = s[0]
    if scale == 0.0:
        return 0
    return int(np.sum(s > rtol * scale))


def _orthonormal_columns(cols: np.ndarray, atol: float = 1e-8) -> np.ndarray:
    """Orthonormal basis of the column span, dropping near-null directions.

    The cutoff is absolute: callers pass unit-norm columns, so directions
    with singular value below ``atol`` are deflation residue, not signal.
    """
    if cols.size == 0:
        return cols.reshape(cols.shape[0], 0)
    u, s, _ = np.linalg.svd(cols, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return cols[:, :0]
    return u[:, s > atol]


def _j_project_off(cols: np.ndarray, span: np.ndarray) -> np.ndarray:
    """Remove from each column its J-orthogonal projection onto span(span).

    Requires the J-Gram of ``span`` to be invertible.
    """
    if span.shape[1] == 0:
        return cols
    j = jmat(span.shape[0])
    gram = span.conj().T @ j @ span
    coeff = np.linalg.solve(gram, span.conj().T @ j @ cols)
    return cols - span @ coeff


def j_positive_vectors(basis: np.ndarray, count: int,
                       tol: float = 1e-8) -> list:
    """Extract ``count`` J-orthonormal vectors of J-norm +1 from a subspace.

    ``basis`` must span a subspace invariant under v -> Sigma v# on which J
    restricts nondegenerately with ``count`` positive directions.  Each
    extracted vector z is paired with Sigma z# (J-norm -1); both are deflated
    before the next extraction.
    """
    work = _orthonormal_columns(np.asarray(basis, dtype=complex))
    j = jmat(work.shape[0])
    out = []
    for _ in range(count):
        if work.shape[1] == 0:
            raise NumericalError("subspace exhausted before extracting "
                                 "the requested number of positive vectors")
        gram = work.conj().T @ j @ work
        gram = (gram + gram.conj().T) / 2
        evals, evecs = np.linalg.eigh(gram)
        if evals[-1] <= tol:
            raise DegeneracyError(
                "no J-positive direction left in subspace; the restricted "
                "inner product is degenerate")
        z = work @ evecs[:, -1]
        z = z / np.sqrt(j_inner(z, z).real)
        zc = swap_conj(z)
        pair = np.column_stack([z, zc])
        work = _j_project_off(work, pair)
        work = _orthonormal_columns(work)
        out.append(z)
    return out


def _cluster(values: np.ndarray, tol: float) -> list:
    """Group scalars whose pairwise distance is below tol (union-find)."""
    n = len(values)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for k in range(i + 1, n):
            if abs(values[i] - values[k]) < tol:
                ri, rk = find(i), find(k)
                if ri != rk:
                    parent[rk] = ri
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _extract_jordan2_pair(gram: np.ndarray, lam: float, cand: np.ndarray,
                          tol: float) -> tuple:
    """Pick a normalized generalized pair (z1, z2) with <z1,z2> = 1,
    <z2,z2> = 0 from candidate generalized directions ``cand``."""
    shifted = gram - lam * np.eye(gram.shape[0])
    best = None
    for idx in range(cand.shape[1]):
        z2 = cand[:, idx]
        z1 = shifted @ z2
        g = j_inner(z1, z2)
        if abs(g.imag) > 1e-6 * max(1.0, abs(g)):
            raise NumericalError(
                "generalized eigenvector pairing produced a non-real "
                "normalization constant")
        if best is None or abs(g.real) > abs(best[2]):
            best = (z1, z2, g.real)
    z1, z2, g = best
    if abs(g) < tol:
        raise NumericalError(
            "Jordan pair normalization constant is numerically zero")
    if g < 0:
        z1, z2 = swap_conj(z1), swap_conj(z2)
        g = -g
    z2 = z2 / np.sqrt(g)
    z1 = shifted @ z2
    c2 = j_inner(z2, z2).real
    z2 = z2 - (c2 / 2) * z1
    return z1, z2


def _real_cluster_classes(gram, coupling, lam, mult, scale, tol_rank):
    """Classify one real (possibly zero) eigenvalue cluster."""
    dim = gram.shape[0]
    eye = np.eye(dim)
    shifted = gram - lam * eye
    e1 = null_space(shifted, tol_rank, scale=scale)
    geo = e1.shape[1]
    classes = []

    n_jordan = mult - geo
    jordan_pairs = []
    if n_jordan > 0:
        e2 = null_space(shifted @ shifted, max(tol_rank, 1e-6),
                        scale=scale ** 2)
        if e2.shape[1] - geo != n_jordan:
            e3 = null_space(shifted @ shifted @ shifted,
                            max(tol_rank, 1e-6), scale=scale ** 3)
            if e3.shape[1] > e2.shape[1]:
                raise UnsupportedStructureError(
                    f"eigenvalue {lam:.6g} of the Gram matrix carries a "
                    "Jordan block of size > 2")
            raise NumericalError(
                f"inconsistent Jordan structure detected at eigenvalue "
                f"{lam:.6g}")
        if n_jordan % 2:
            raise UnsupportedStructureError(
                f"eigenvalue {lam:.6g} has odd Jordan deficiency; only "
                "size-2 blocks in conjugate pairs are supported")
        work2 = e2
        for _ in range(n_jordan // 2):
            # candidate generalized directions: part of work2 outside e1
            proj = work2 - e1 @ (e1.conj().T @ work2)
            cand = _orthonormal_columns(proj, 1e-8)
            z1, z2 = _extract_jordan2_pair(gram, lam, cand, 1e-8)
            jordan_pairs.append((z1, z2))
            span = np.column_stack([z1, z2, swap_conj(z1), swap_conj(z2)])
            work2 = _orthonormal_columns(_j_project_off(work2, span))
            e1 = _orthonormal_columns(_j_project_off(e1, span))

    zero = abs(lam) < TOL_CLUSTER * scale
    if jordan_pairs:
        if zero:
            for z1, z2 in jordan_pairs:
                in_ker = (np.linalg.norm(coupling @ z1)
                          <= 1e-7 * max(1.0, np.linalg.norm(coupling)))
                classes.append(EigenClass(
                    kind="zero_in_kernel" if in_ker else "zero_off_kernel",
                    value=0.0, vectors=[(z1, z2)], jordan_size=2,
                    in_kernel=in_ker))
        else:
            kind = "real_positive" if lam > 0 else "real_negative"
            classes.append(EigenClass(kind=kind, value=lam,
                                      vectors=jordan_pairs, jordan_size=2))

    # remaining semisimple part of the eigenspace
    semi = e1.shape[1]
    if semi == 0:
        return classes
    if semi % 2:
        raise NumericalError(
            f"eigenspace of {lam:.6g} has odd dimension {semi} after "
            "Jordan extraction")

    if not zero:
        kind = "real_positive" if lam > 0 else "real_negative"
        vecs = j_positive_vectors(e1, semi // 2)
        classes.append(EigenClass(kind=kind, value=lam, vectors=vecs))
        return classes

    # zero eigenvalue: split by membership of the image under N
    classes.extend(_zero_semisimple_classes(coupling, e1, jordan_pairs))
    return classes


def _zero_semisimple_classes(coupling, e1, jordan_pairs):
    """Split semisimple kernel directions of the Gram matrix into modes in
    Ker N and modes outside it (the J-degenerate situation)."""
    classes = []
    semi = e1.shape[1]
    nnorm = max(1.0, np.linalg.norm(coupling))

    # kernel modes are J-positive directions killed by N and (after the
    # conjugation swap) by N again.  That swap-invariant space also picks
    # up J-neutral combinations contributed by off-kernel modes with a
    # neutral image, so the kernel pair count is the positive signature of
    # J restricted to it, not half its dimension.
    kn = _orthonormal_columns(
        e1 @ null_space(coupling @ e1, 1e-10, scale=nnorm))
    if kn.shape[1]:
        kn2_coeff = null_space(coupling @ swap_conj(kn), 1e-10, scale=nnorm)
        kn2 = _orthonormal_columns(kn @ kn2_coeff)
    else:
        kn2 = kn
    if kn2.shape[1]:
        jg = kn2.conj().T @ jmat(coupling.shape[1]) @ kn2
        # genuine kernel pairs contribute a +/- eigenvalue pair of
        # magnitude bounded away from zero; neutral pollution sits at
        # machine precision
        r_ker = int(np.sum(np.linalg.eigvalsh((jg + jg.conj().T) / 2) > 1e-7))
    else:
        r_ker = 0
    r_off = semi // 2 - r_ker
    if r_off < 0:
        raise NumericalError(
            "inconsistent rank margins while splitting the Gram kernel; "
            "the degeneracy structure is not numerically resolvable")

    kernel_vecs = []
    if r_ker > 0:
        kernel_vecs = j_positive_vectors(kn2, r_ker)
        classes.append(EigenClass(kind="zero_in_kernel", value=0.0,
                                  vectors=kernel_vecs))
    if r_off > 0:
        work = e1
        if kernel_vecs:
            span = np.column_stack(
                [np.column_stack([z, swap_conj(z)]) for z in kernel_vecs])
            work = _orthonormal_columns(_j_project_off(e1, span))
        off_vecs = j_positive_vectors(work, r_off)
        classes.append(EigenClass(kind="zero_off_kernel", value=0.0,
                                  vectors=off_vecs))
    return classes


def _complex_cluster_class(gram, lam, mult, tol_rank):
    """Build the paired-vector class for a complex eigenvalue (Im > 0)."""
    dim = gram.shape[0]
    eye = np.eye(dim)
    e_lam = null_space(gram - lam * eye, tol_rank,
                       scale=max(1.0, float(np.linalg.norm(gram, 2))))
    if e_lam.shape[1] != mult:
        raise UnsupportedStructureError(
            f"complex eigenvalue {lam:.6g} is not semisimple; Jordan "
            "structure at complex eigenvalues is not supported")
    # Skew bilinear pairing h(v, w) = (Sigma v#)^dag J w = v^T (Sigma J) w
    # between E_lam and itself; nondegenerate by J-nondegeneracy of the
    # eigenspace pairing.  A Darboux basis of h yields the required pairs.
    sj = np.zeros((dim, dim))
    half = dim // 2
    sj[:half, half:] = -np.eye(half)
    sj[half:, :half] = np.eye(half)

    def h(v, w):
        return complex(v @ sj @ w)

    work = [e_lam[:, i] for i in range(e_lam.shape[1])]
    pairs = []
    while work:
        p = work.pop(0)
        if not work:
            raise NumericalError(
                "odd leftover dimension while pairing a complex eigenspace")
        vals = [abs(h(p, w)) for w in work]
        k = int(np.argmax(vals))
        if vals[k] < 1e-10:
            raise NumericalError(
                "degenerate skew pairing in complex eigenspace")
        q = work[k] / h(p, work[k])
        work.pop(k)
        new_work = []
        for u in work:
            u = u - h(p, u) * q + h(q, u) * p
            nu = np.linalg.norm(u)
            if nu > 1e-10:
                new_work.append(u)
        work = new_work
        # normalize Euclidean size of the pair for conditioning
        z1 = p
        z2 = -swap_conj(q)
        pairs.append((z1, z2))
    return EigenClass(kind="complex_pair", value=lam, vectors=pairs)


def krein_spectrum(gram: np.ndarray, coupling: np.ndarray,
                   tol_rank: float = TOL_RANK) -> KreinSpectrum:
    """Classify the spectrum of G = N^b N and return prepared eigenvectors.

    Raises UnsupportedStructureError for Jordan blocks of size > 2 and
    NumericalError when the classification is not numerically resolvable.
    """
    gram = np.asarray(gram, dtype=complex)
    dim = gram.shape[0]
    scale = max(1.0, float(np.linalg.norm(gram, 2)))
    evals = dense_eigvals(gram)
    groups = _cluster(evals, TOL_CLUSTER * scale)

    classes = []
    for idx in groups:
        lam = complex(np.mean(evals[idx]))
        mult = len(idx)
        if abs(lam.imag) < TOL_CLUSTER * scale:
            lam_r = lam.real
            if abs(lam_r) < TOL_CLUSTER * scale:
                lam_r = 0.0
            classes.extend(_real_cluster_classes(
                gram, coupling, lam_r, mult, scale, tol_rank))
        elif lam.imag > 0:
            if mult % 2:
                raise NumericalError(
                    f"complex eigenvalue {lam:.6g} has odd multiplicity")
            classes.append(_complex_cluster_class(gram, lam, mult, tol_rank))
        # Im < 0 clusters are the conjugates of the Im > 0 ones; skip.

    _order_classes(classes)
    spec = KreinSpectrum(classes=classes, dim=dim)
    # each real/zero pair covers 2 dimensions (z and its swap-conjugate);
    # complex pairs and Jordan pairs cover 4 (two columns plus partners)
    total = 2 * sum(
        c.pair_count
        * (2 if (c.jordan_size == 2 or c.kind == "complex_pair") else 1)
        for c in classes)
    if total != dim:
        raise NumericalError(
            f"classified multiplicities sum to {total}, expected {dim}; "
            "eigenvalue clustering failed")
    return spec


def _order_classes(classes: list) -> None:
    """Deterministic canonical ordering of classes and of vectors inside."""
    rank = {"real_positive": 0, "real_negative": 1, "complex_pair": 2,
            "zero_off_kernel": 4, "zero_in_kernel": 5}

    def key(c):
        primary = rank[c.kind] if c.jordan_size == 1 else 3
        return (primary, -abs(c.value), -np.real(c.value), -np.imag(c.value))

    classes.sort(key=key)


def check_degeneracy(coupling: np.ndarray, gram: np.ndarray | None = None,
                     rtol: float = 1e-10) -> str:
    """Classify the kernel structure of a coupling matrix.

    Returns 'nondegenerate' when Ker(N^b N) = Ker N, 'degenerate_special'
    when the extra kernel directions have a J-neutral image (P P^b = 0), and
    'degenerate_unsupported' otherwise.
    """
    coupling = np.asarray(coupling, dtype=complex)
    if gram is None:
        gram = j_gram(coupling)
    nnorm = max(1.0, float(np.linalg.norm(coupling, 2)))
    if numeric_rank(coupling, rtol) == numeric_rank(gram, rtol,
                                                    scale=nnorm ** 2):
        return "nondegenerate"
    spec = krein_spectrum(gram, coupling)
    z_off = []
    for c in spec.by_kind("zero_off_kernel", 1):
        z_off.extend(c.vectors)
    if not z_off:
        return "degenerate_unsupported"
    zmat = np.column_stack(z_off)
    p = coupling @ np.column_stack([zmat, swap_conj(zmat)])
    resid = np.linalg.norm(p @ flat_adjoint(p))
    if resid <= 1e-8 * max(1.0, np.linalg.norm(p) ** 2):
        return "degenerate_special"
    return "degenerate_unsupported"
