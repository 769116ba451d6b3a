"""Swap probabilities of W(tau) = P U(tau) and scans over tau and N."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import ValidationError
from .exchange import ExchangeOperator, ExchangeSpec, build
from .linalg import (
    CLUSTER_TOL,
    UnitaryEigensystem,
    cluster_probabilities,
    cluster_subspace_weights,
    unitary_eig,
)
from .sector import XY, ModelParams, SectorBasis, basis_state, propagator, spectrum

DEFAULT_TAU = (0.0, 50.0, 0.01)
EXACT_MARGIN = 1e-3
_TIE = 1e-12


def tau_grid(start: float, end: float, step: float) -> np.ndarray:
    """Inclusive grid ``start, start+step, ..., <= end``."""
    if not step > 0:
        raise ValidationError(f"tau step must be positive, got {step}")
    if end < start:
        raise ValidationError(f"tau end {end} is before start {start}")
    n = int(math.floor((end - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 12)


def classify(p: float) -> str:
    if p > 1 - EXACT_MARGIN:
        return "exact"
    if p > 0.5 + 1e-9:
        return "partial"
    return "none"


def compose_w(P, U) -> np.ndarray:
    P = getattr(P, "matrix", P)
    P = np.asarray(P)
    U = np.asarray(U)
    if P.shape != U.shape or P.ndim != 2:
        raise ValidationError(f"cannot compose exchange of shape {P.shape} with propagator of shape {U.shape}")
    return P @ U


def joint_fidelity(a: float, b: float, phase: float, overlap: complex, zero_phase: float = 0.0) -> float:
    """``|a^2 + b^2 e^{i(w - w0)} <1|psi>|`` for the unknown state a|0> + b|1>.

    ``zero_phase`` is the eigenphase picked up by the zero-magnon state
    (0 for the XY chain).
    """
    if a < 0 or b < 0:
        raise ValidationError("amplitudes a, b must be non-negative")
    if abs(a * a + b * b - 1.0) > 1e-12:
        raise ValidationError(f"a^2 + b^2 must equal 1, got {a * a + b * b!r}")
    return float(abs(a * a + b * b * np.exp(1j * (phase - zero_phase)) * overlap))


def best_joint_fidelity(a: float, b: float, phase: float, p: float, zero_phase: float = 0.0) -> float:
    """Joint fidelity with the eigenvector's free phase chosen so that
    ``e^{i(w - w0)} <1|psi>`` is real and positive; reduces to a^2 + b^2 sqrt(p)."""
    overlap = math.sqrt(max(p, 0.0)) * np.exp(-1j * (phase - zero_phase))
    return joint_fidelity(a, b, phase, overlap, zero_phase)


@dataclass(frozen=True)
class ScanConfig:
    exchange: ExchangeSpec
    initial: Union[int, str] = 1
    tau_start: float = DEFAULT_TAU[0]
    tau_end: float = DEFAULT_TAU[1]
    tau_step: float = DEFAULT_TAU[2]
    include_zero: bool = False
    target_sites: Optional[Tuple[int, ...]] = None
    params: ModelParams = XY
    fidelity: Optional[Tuple[float, float]] = None
    method: str = "lapack"
    cluster_tol: float = CLUSTER_TOL

    def __post_init__(self) -> None:
        if not self.tau_step > 0:
            raise ValidationError("tau_step must be positive")
        if self.tau_start < 0 or self.tau_end < self.tau_start:
            raise ValidationError("need tau_end >= tau_start >= 0")
        if self.target_sites is not None:
            object.__setattr__(self, "target_sites", tuple(int(s) for s in self.target_sites))
        if self.fidelity is not None:
            a, b = self.fidelity
            joint_fidelity(a, b, 0.0, 1.0)  # validates normalization

    @property
    def N(self) -> int:
        return self.exchange.N

    def grid(self) -> np.ndarray:
        return tau_grid(self.tau_start, self.tau_end, self.tau_step)

    def with_exchange(self, exchange: ExchangeSpec, **changes) -> "ScanConfig":
        fields = dict(self.__dict__)
        fields.update(exchange=exchange, **changes)
        return ScanConfig(**fields)


@dataclass
class ScanRecord:
    tau: float
    best_phase: float
    best_p: float
    cluster_dim: int
    label: str
    fidelity: Optional[float] = None
    all_clusters: Optional[List[Tuple[float, float]]] = None

    def row(self) -> dict:
        out = {
            "tau": self.tau,
            "best_phase": self.best_phase,
            "best_p": self.best_p,
            "cluster_dim": self.cluster_dim,
            "label": self.label,
        }
        if self.fidelity is not None:
            out["fidelity"] = self.fidelity
        return out


@dataclass
class SweepRecord:
    N: int
    p_peak: float
    tau_at_peak: float
    fidelity_peak: Optional[float] = None


class SwapProblem:
    """Everything about a configuration that does not depend on tau."""

    def __init__(self, config: ScanConfig):
        self.config = config
        self.basis = SectorBasis(config.N, config.include_zero)
        self.spectrum = spectrum(self.basis, config.params)
        self.operator: ExchangeOperator = build(config.exchange, self.basis)
        if config.target_sites is not None:
            self.target_slots = [self.basis.index(s) for s in config.target_sites]
            self.phi = None
        else:
            self.target_slots = None
            self.phi = basis_state(self.basis, config.initial).amplitudes

    def w(self, tau: float) -> np.ndarray:
        return compose_w(self.operator, propagator(self.spectrum, tau))

    def eigensystem(self, tau: float) -> UnitaryEigensystem:
        return unitary_eig(self.w(tau), cluster_tol=self.config.cluster_tol, method=self.config.method)

    def zero_phase(self, tau: float) -> float:
        return -self.spectrum.zero_energy * tau

    def cluster_scores(self, sys: UnitaryEigensystem) -> np.ndarray:
        if self.target_slots is not None:
            return cluster_subspace_weights(sys, self.target_slots)
        return cluster_probabilities(sys, self.phi)

    def record(self, tau: float, keep_clusters: bool = False) -> ScanRecord:
        sys = self.eigensystem(tau)
        p = self.cluster_scores(sys)
        phases = sys.cluster_phases()
        dims = sys.cluster_dims()
        k = select_best(p, phases, dims)
        best_p = float(min(max(p[k], 0.0), 1.0))
        fid = None
        if self.config.fidelity is not None:
            a, b = self.config.fidelity
            fid = best_joint_fidelity(a, b, float(phases[k]), best_p, self.zero_phase(tau))
        clusters = [(float(ph), float(q)) for ph, q in zip(phases, p)] if keep_clusters else None
        return ScanRecord(float(tau), float(phases[k]), best_p, int(dims[k]), classify(best_p), fid, clusters)


def select_best(p: np.ndarray, phases: np.ndarray, dims: np.ndarray) -> int:
    """Index of the highest-probability cluster.

    Near-ties (within 1e-12) go to the smaller cluster, then to the phase
    closest to pi.
    """
    cand = np.nonzero(p >= p.max() - _TIE)[0]
    return int(min(cand, key=lambda k: (dims[k], -abs(phases[k]), k)))


def swap_probability_profile(config: ScanConfig, tau: float, keep_clusters: bool = True) -> ScanRecord:
    return SwapProblem(config).record(tau, keep_clusters)


@dataclass
class ScanResult:
    records: List[ScanRecord]
    best: ScanRecord


def scan_tau(config: ScanConfig, keep_clusters: bool = False, taus: Optional[Sequence[float]] = None) -> ScanResult:
    problem = SwapProblem(config)
    grid = config.grid() if taus is None else np.asarray(taus, dtype=float)
    if len(grid) == 0:
        raise ValidationError("empty tau grid")
    records = [problem.record(t, keep_clusters) for t in grid]
    return ScanResult(records, _peak(records))


def _peak(records: Sequence[ScanRecord]) -> ScanRecord:
    best = records[0]
    for rec in records[1:]:
        if rec.best_p > best.best_p + _TIE:
            best = rec
    return best


def sweep_chain_sizes(
    template: ScanConfig,
    Ns: Iterable[int],
    skip_static: bool = True,
    auto_targets: bool = True,
) -> List[SweepRecord]:
    """Peak probability over the template's tau grid for each chain size.

    With ``skip_static`` the point tau=0 is left out of the peak search:
    there W equals P and the maximizer only reflects P's own eigenspaces.
    With ``auto_targets`` multi-site exchanges are scored on their sender
    sites at every N (see :func:`default_targets`); otherwise the
    template's ``target_sites`` are used unchanged.
    """
    out = []
    for N in Ns:
        exchange = template.exchange.with_n(int(N))
        targets = default_targets(exchange) if auto_targets else template.target_sites
        config = template.with_exchange(exchange, target_sites=targets)
        grid = config.grid()
        if skip_static:
            grid = grid[grid > 0]
        if len(grid) == 0:
            raise ValidationError("tau grid has no points after removing tau=0")
        res = scan_tau(config, taus=grid)
        fids = [r.fidelity for r in res.records if r.fidelity is not None]
        out.append(SweepRecord(int(N), res.best.best_p, res.best.tau, max(fids) if fids else None))
    return out


@dataclass
class ProductEigenvector:
    tau: float
    phase: float
    cluster_dim: int
    sender_weight: float


@dataclass
class TransferCertificate:
    found: bool
    tau: Optional[float]
    p: float
    threshold: float
    grid_step: float
    tau_range: Tuple[float, float]
    product_eigenvectors: List[ProductEigenvector] = field(default_factory=list)
    caveat: str = ""


def _product_vectors(sys: UnitaryEigensystem, basis: SectorBasis, sender: Sequence[int], tau: float, tol: float):
    """Eigenspace vectors of the form |A> (x) |C> with a non-trivial A part.

    Within the zero/one-magnon sector such a vector has no one-magnon
    amplitude outside processor A.
    """
    sender_slots = [basis.index(s) for s in sender]
    outside = [basis.index(j) for j in range(1, basis.N + 1) if j not in sender]
    found = []
    for k, c in enumerate(sys.clusters):
        Vc = sys.vectors[:, list(c)]
        B = Vc[outside, :]
        _, s, Vh = np.linalg.svd(B, full_matrices=True)
        s = np.concatenate([s, np.zeros(Vc.shape[1] - len(s))])
        null = Vh.conj().T[:, s < tol]
        if null.shape[1] == 0:
            continue
        A = (Vc @ null)[sender_slots, :]
        wA = float(np.linalg.eigvalsh(A.conj().T @ A)[-1])
        if wA > tol:
            found.append(ProductEigenvector(float(tau), sys.cluster_phase(k), len(c), wA))
    return found


def exact_transfer_search(config: ScanConfig, threshold: float = 0.999, factor_tol: float = 1e-8) -> TransferCertificate:
    """Search the tau grid for ``best_p >= threshold`` and for eigenvectors of
    W that factorize between processor A and the rest.

    A negative result holds at the grid resolution only.
    """
    if not 0.5 < threshold <= 1.0:
        raise ValidationError(f"threshold must lie in (0.5, 1], got {threshold}")
    problem = SwapProblem(config)
    sender = config.exchange.sender_sites
    grid = config.grid()
    best_tau, best_p, hit = None, -1.0, None
    products: List[ProductEigenvector] = []
    for tau in grid:
        sys = problem.eigensystem(tau)
        p = problem.cluster_scores(sys)
        k = select_best(p, sys.cluster_phases(), sys.cluster_dims())
        if p[k] > best_p + _TIE:
            best_tau, best_p = float(tau), float(p[k])
        if hit is None and p[k] >= threshold:
            hit = (float(tau), float(p[k]))
        products.extend(_product_vectors(sys, problem.basis, sender, tau, factor_tol))
    caveat = (
        f"checked {len(grid)} points on [{grid[0]:g}, {grid[-1]:g}] with step {config.tau_step:g}; "
        "a negative answer does not exclude exact swaps between grid points"
    )
    if hit is not None:
        return TransferCertificate(True, hit[0], hit[1], threshold, config.tau_step, (float(grid[0]), float(grid[-1])), products, caveat)
    return TransferCertificate(False, best_tau, best_p, threshold, config.tau_step, (float(grid[0]), float(grid[-1])), products, caveat)


def default_targets(exchange: ExchangeSpec) -> Optional[Tuple[int, ...]]:
    """Sender sites when processor A holds more than one site, else None."""
    sites = exchange.sender_sites
    return sites if len(sites) > 1 else None
