"""Dense complex eigensolvers.

``hermitian_eig`` is a cyclic complex Jacobi solver, with LAPACK (numpy's
``eigh``) available as an alternative backend.  ``unitary_eig`` reduces a
unitary matrix to its two commuting Hermitian parts

    H_R = (W + W^dag) / 2,    H_I = (W - W^dag) / 2i

and recovers eigenphases from their joint eigenvectors.  Equal ``cos w``
for ``+w`` and ``-w`` is why the second (compressed) stage is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import ConvergenceError, NonUnitaryError, NumericalContractError, ValidationError

JACOBI_TOL = 1e-12
RESIDUAL_TOL = 1e-9
CLUSTER_TOL = 1e-8
UNITARITY_TOL = 1e-10
MAX_SWEEPS = 60

# chain tolerances for the H_R / H_I splitting, coarse to fine
_SPLIT_TOLS = (1e-5, 1e-8, 1e-11)


def _as_square(A, name: str = "matrix") -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValidationError(f"{name} has non-finite entries")
    return A


def hermiticity_defect(A: np.ndarray) -> float:
    return float(np.max(np.abs(A - A.conj().T))) if A.size else 0.0


def unitarity_defect(W: np.ndarray) -> float:
    """Frobenius norm of ``W^dag W - I``."""
    W = np.asarray(W)
    return float(np.linalg.norm(W.conj().T @ W - np.eye(W.shape[0])))


def _off_norm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A - np.diag(np.diagonal(A))))


def jacobi_eigh(A, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS) -> Tuple[np.ndarray, np.ndarray, int]:
    """Cyclic Jacobi diagonalization of a Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a_pq`` and then
    applies the real symmetric 2x2 rotation.  Iteration stops once the
    off-diagonal Frobenius norm drops below ``tol * ||A||_F``.

    Returns ``(eigenvalues ascending, eigenvectors as columns, sweeps)``.
    """
    A = np.array(A, dtype=complex)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = np.linalg.norm(A)
    if n <= 1 or scale == 0.0:
        order = np.argsort(A.diagonal().real, kind="stable")
        return A.diagonal().real[order].copy(), V[:, order], 0
    target = tol * scale
    tiny = np.finfo(float).tiny / np.finfo(float).eps
    sweeps = 0
    off = _off_norm(A)
    while off > target:
        if sweeps >= max_sweeps:
            raise ConvergenceError(sweeps, off)
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                r = abs(apq)
                if r <= tiny:
                    continue
                app = A[p, p].real
                aqq = A[q, q].real
                zeta = (aqq - app) / (2.0 * r)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                ph = apq / r  # e^{i phi}
                # columns p, q  <-  [c, s; -s e^{-i phi}, c e^{-i phi}]
                G = np.array([[c, s], [-s * ph.conjugate(), c * ph.conjugate()]])
                cols = A[:, [p, q]] @ G
                A[:, p], A[:, q] = cols[:, 0], cols[:, 1]
                rows = G.conj().T @ A[[p, q], :]
                A[p, :], A[q, :] = rows[0], rows[1]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vc = V[:, [p, q]] @ G
                V[:, p], V[:, q] = vc[:, 0], vc[:, 1]
        off = _off_norm(A)
    w = A.diagonal().real
    order = np.argsort(w, kind="stable")
    return w[order].copy(), V[:, order], sweeps


def hermitian_eig(A, tol: float = JACOBI_TOL, method: str = "jacobi") -> Tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    A = _as_square(A)
    scale = max(1.0, float(np.max(np.abs(A)))) if A.size else 1.0
    if hermiticity_defect(A) > 1e-12 * scale:
        raise ValidationError(f"matrix is not Hermitian (defect {hermiticity_defect(A):.3e})")
    if method == "jacobi":
        w, V, _ = jacobi_eigh(A, tol)
        return w, V
    if method == "lapack":
        w, V = np.linalg.eigh(A)
        return w, V
    raise ValidationError(f"unknown eigensolver backend {method!r}")


def wrap_phase(w):
    """Map angles into (-pi, pi]."""
    w = np.mod(np.asarray(w, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(w <= -np.pi, np.pi, w)


def circular_distance(a, b):
    d = np.abs(np.mod(np.asarray(a) - np.asarray(b) + np.pi, 2 * np.pi) - np.pi)
    return d


@dataclass(frozen=True)
class UnitaryEigensystem:
    """Eigenphases in (-pi, pi] sorted ascending, eigenvectors as columns, and
    index groups of equal phase."""

    phases: np.ndarray
    vectors: np.ndarray
    clusters: Tuple[Tuple[int, ...], ...]
    residual: float

    def __post_init__(self) -> None:
        labels = np.empty(len(self.phases), dtype=int)
        for k, c in enumerate(self.clusters):
            labels[list(c)] = k
        object.__setattr__(self, "labels", labels)
        nc = len(self.clusters)
        z = np.bincount(labels, np.cos(self.phases), nc) + 1j * np.bincount(labels, np.sin(self.phases), nc)
        mean = wrap_phase(np.angle(z))
        # the -pi end of the circle is reported as +pi
        mean = np.where(mean < -np.pi + CLUSTER_TOL, np.pi, mean)
        object.__setattr__(self, "_cluster_phases", mean)
        object.__setattr__(self, "_cluster_dims", np.bincount(labels, minlength=nc))

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def cluster_phase(self, k: int) -> float:
        """Circular mean of the phases in cluster ``k``, in (-pi, pi]."""
        return float(self._cluster_phases[k])

    def cluster_phases(self) -> np.ndarray:
        return self._cluster_phases.copy()

    def cluster_dims(self) -> np.ndarray:
        return self._cluster_dims.copy()

    def reconstruct(self) -> np.ndarray:
        V = self.vectors
        return (V * np.exp(1j * self.phases)) @ V.conj().T


def _chains(values: np.ndarray, tol: float) -> List[List[int]]:
    """Split sorted values wherever consecutive gaps reach ``tol``."""
    cuts = (np.nonzero(np.diff(values) >= tol)[0] + 1).tolist()
    bounds = [0] + cuts + [len(values)]
    return [list(range(a, b)) for a, b in zip(bounds[:-1], bounds[1:])]


def _small_eigh(C: np.ndarray, tol: float, method: str):
    if method == "lapack":
        return np.linalg.eigh(C)
    return hermitian_eig(C, tol, method)


def _refine(Q, HR, HI, level, method, tol, out):
    """Append to ``out`` an orthonormal basis of span(Q) that jointly
    diagonalizes HR and HI (up to the finest split tolerance)."""
    k = Q.shape[1]
    if k == 1:
        out.append(Q)
        return
    split_tol = _SPLIT_TOLS[level]
    for H in (HR, HI):
        C = Q.conj().T @ H @ Q
        C = (C + C.conj().T) / 2
        w, X = _small_eigh(C, tol, method)
        groups = _chains(w, split_tol)
        if len(groups) > 1:
            for g in groups:
                _refine(Q @ X[:, g], HR, HI, level, method, tol, out)
            return
    if level + 1 < len(_SPLIT_TOLS):
        _refine(Q, HR, HI, level + 1, method, tol, out)
    else:
        out.append(Q)


def _cluster_indices(phases: np.ndarray, cluster_tol: float) -> Tuple[Tuple[int, ...], ...]:
    n = len(phases)
    if n == 0:
        return ()
    groups = _chains(phases, cluster_tol)
    if len(groups) > 1 and phases[0] + 2 * np.pi - phases[-1] < cluster_tol:
        groups[0] = groups.pop() + groups[0]
    return tuple(tuple(g) for g in groups)


def unitary_eig(
    W,
    tol: float = JACOBI_TOL,
    cluster_tol: float = CLUSTER_TOL,
    method: str = "lapack",
    unitarity_tol: float = UNITARITY_TOL,
    residual_tol: float = RESIDUAL_TOL,
) -> UnitaryEigensystem:
    """Full eigensystem of a unitary matrix via its Hermitian parts.

    Raises :class:`NonUnitaryError` (carrying the defect) if ``W`` is not
    unitary, and :class:`NumericalContractError` if the final residual
    ``max_m ||W psi_m - e^{i w_m} psi_m||`` exceeds ``residual_tol``.

    ``tol`` is the Jacobi stopping tolerance; it is capped at 1e-14 here
    because eigenvector errors of H_R are amplified by up to the full
    eigenvalue spread of W.
    """
    W = _as_square(W, "W")
    defect = unitarity_defect(W)
    if defect > unitarity_tol:
        raise NonUnitaryError(defect, unitarity_tol)
    n = W.shape[0]
    tol = min(tol, 1e-14)
    HR = (W + W.conj().T) / 2
    HI = (W - W.conj().T) / 2j

    w, V = hermitian_eig(HR, tol, method)
    groups = _chains(w, _SPLIT_TOLS[0])
    singles = [g[0] for g in groups if len(g) == 1]
    parts: list = [V[:, singles]]
    for g in groups:
        if len(g) > 1:
            _refine(V[:, g], HR, HI, 0, method, tol, parts)
    vecs = np.concatenate(parts, axis=1)

    # <psi|W|psi> = <psi|H_R|psi> + i <psi|H_I|psi>
    Wv = W @ vecs
    q = np.einsum("ij,ij->j", vecs.conj(), Wv)
    phases = wrap_phase(np.arctan2(q.imag, q.real))
    order = np.argsort(phases, kind="stable")
    phases = phases[order]
    vecs = vecs[:, order]
    Wv = Wv[:, order]

    resid = np.linalg.norm(Wv - vecs * np.exp(1j * phases), axis=0)
    residual = float(resid.max()) if n else 0.0
    if residual > residual_tol:
        raise NumericalContractError(f"unitary eigensystem residual {residual:.3e} exceeds {residual_tol:.1e}")
    return UnitaryEigensystem(phases, vecs, _cluster_indices(phases, cluster_tol), residual)


def cluster_probabilities(sys: UnitaryEigensystem, phi) -> np.ndarray:
    """Squared norm of the projection of ``phi`` onto each cluster's eigenspace."""
    phi = np.asarray(getattr(phi, "amplitudes", phi), dtype=complex)
    if phi.shape != (sys.dim,):
        raise ValidationError(f"state dimension {phi.shape} does not match eigensystem dimension {sys.dim}")
    w = np.abs(sys.vectors.conj().T @ phi) ** 2
    return np.bincount(sys.labels, w, len(sys.clusters))


def eigenspace_projection_probability(sys: UnitaryEigensystem, phi) -> List[Tuple[float, float]]:
    """``[(cluster phase, p), ...]`` with ``p = ||Pi_cluster phi||^2``."""
    p = cluster_probabilities(sys, phi)
    return [(sys.cluster_phase(k), float(p[k])) for k in range(len(sys.clusters))]


def cluster_subspace_weights(sys: UnitaryEigensystem, slots: Sequence[int]) -> np.ndarray:
    """Largest weight on ``slots`` attainable by a unit vector inside each
    cluster's eigenspace.

    For a single slot this equals the projection probability of that basis
    state; for several slots it is the top eigenvalue of the compressed
    projector and does not depend on the basis chosen inside a degenerate
    cluster.
    """
    slots = list(slots)
    out = np.empty(len(sys.clusters))
    for k, c in enumerate(sys.clusters):
        B = sys.vectors[np.ix_(slots, list(c))]
        if B.shape[1] == 1:
            out[k] = float(np.sum(np.abs(B) ** 2))
        else:
            out[k] = float(np.linalg.eigvalsh(B.conj().T @ B)[-1])
    return out
