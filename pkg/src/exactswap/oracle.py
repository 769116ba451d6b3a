"""Brute-force 2^N state-vector reference for the sector fast path.

Bit convention: site ``j`` (1-based) is bit ``j - 1`` of the basis index,
so ``|j^>`` is index ``2**(j-1)`` and the all-down state is index 0.
Spin-up is bit value 1.

Spin Hamiltonians (periodic unless asked otherwise)::

    XY   H = -J sum (Sx Sx + Sy Sy)
    XXZ  H =  J sum (Sx Sx + Sy Sy + Delta Sz Sz) + h sum Sz
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .errors import ValidationError
from .exchange import ExchangeSpec, Kind
from .linalg import unitarity_defect
from .sector import XY, ModelParams, SectorBasis, propagator, spectrum

MAX_QUBITS = 12


def _check_cap(N: int) -> None:
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 1:
        raise ValidationError(f"qubit count must be a positive integer, got {N!r}")
    if N > MAX_QUBITS:
        raise ValidationError(f"full-space oracle is capped at N <= {MAX_QUBITS} (2^N amplitudes), got N={N}")


def bitstring(index: int, N: int) -> str:
    """Sites 1..N left to right, e.g. ``|100>`` is site 1 up."""
    return "".join("1" if index >> j & 1 else "0" for j in range(N))


@dataclass(frozen=True)
class FullState:
    N: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        _check_cap(self.N)
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (2**self.N,):
            raise ValidationError(f"expected {2**self.N} amplitudes, got shape {amps.shape}")
        if abs(np.linalg.norm(amps) - 1.0) > 1e-12:
            raise ValidationError(f"state is not normalized (norm {np.linalg.norm(amps)!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def product(cls, N: int, up_sites: Iterable[int] = ()) -> "FullState":
        idx = 0
        for s in up_sites:
            if not 1 <= s <= N:
                raise ValidationError(f"site {s} outside [1, {N}]")
            idx |= 1 << (s - 1)
        amps = np.zeros(2**N, dtype=complex)
        amps[idx] = 1.0
        return cls(N, amps)

    def nonzero(self, tol: float = 1e-12) -> Dict[str, complex]:
        return {bitstring(i, self.N): complex(a) for i, a in enumerate(self.amplitudes) if abs(a) > tol}


@dataclass(frozen=True)
class ProcessorLayout:
    A_sites: Tuple[int, ...]
    B_sites: Tuple[int, ...]

    def __post_init__(self) -> None:
        A = tuple(int(s) for s in self.A_sites)
        B = tuple(int(s) for s in self.B_sites)
        object.__setattr__(self, "A_sites", A)
        object.__setattr__(self, "B_sites", B)
        if len(A) == 0 or len(A) != len(B):
            raise ValidationError(f"registers must be non-empty and equal in size, got |A|={len(A)}, |B|={len(B)}")
        if len(set(A)) != len(A) or len(set(B)) != len(B):
            raise ValidationError("repeated site inside a register")
        if set(A) & set(B):
            raise ValidationError(f"registers overlap on sites {sorted(set(A) & set(B))}")

    @property
    def K(self) -> int:
        return len(self.A_sites)

    def validate(self, N: int) -> None:
        for s in self.A_sites + self.B_sites:
            if not 1 <= s <= N:
                raise ValidationError(f"site {s} outside [1, {N}]")


def _bits(N: int) -> np.ndarray:
    """``bits[i, j]`` is the occupation of site j+1 in basis index i."""
    idx = np.arange(2**N)
    return (idx[:, None] >> np.arange(N)[None, :]) & 1


def magnon_number(N: int) -> np.ndarray:
    """Diagonal of M = sum (Sz + 1/2)."""
    _check_cap(N)
    return _bits(N).sum(axis=1).astype(float)


def full_hamiltonian(N: int, params: ModelParams = XY, periodic: bool = True) -> np.ndarray:
    """Dense real symmetric Hamiltonian on all 2^N basis states."""
    _check_cap(N)
    if N < 2:
        raise ValidationError("need at least two sites for a coupling")
    dim = 2**N
    bits = _bits(N)
    sz = bits - 0.5
    bonds = [(j, j + 1) for j in range(N - 1)]
    if periodic and N > 2:
        bonds.append((N - 1, 0))
    hop = -params.J / 2 if params.model == "XY" else params.J / 2
    H = np.zeros((dim, dim))
    idx = np.arange(dim)
    for a, b in bonds:
        # S+S- + S-S+ flips an anti-aligned pair
        anti = bits[:, a] != bits[:, b]
        src = idx[anti]
        dst = src ^ ((1 << a) | (1 << b))
        H[dst, src] += hop
        if params.model == "XXZ":
            H[idx, idx] += params.J * params.Delta * sz[:, a] * sz[:, b]
    if params.model == "XXZ":
        H[idx, idx] += params.h * sz.sum(axis=1)
    return H


def sector_indices(basis: SectorBasis) -> np.ndarray:
    """Full-space indices of the sector basis, in sector order."""
    idx = [1 << (j - 1) for j in range(1, basis.N + 1)]
    if basis.include_zero:
        idx = [0] + idx
    return np.array(idx)


def restrict_to_sector(op: np.ndarray, basis: SectorBasis) -> np.ndarray:
    idx = sector_indices(basis)
    return op[np.ix_(idx, idx)]


def embed(amplitudes: np.ndarray, basis: SectorBasis) -> FullState:
    _check_cap(basis.N)
    amps = np.zeros(2**basis.N, dtype=complex)
    amps[sector_indices(basis)] = amplitudes
    return FullState(basis.N, amps)


def project(state: FullState, basis: SectorBasis) -> np.ndarray:
    return state.amplitudes[sector_indices(basis)].copy()


def full_evolve(H: np.ndarray, state: FullState, tau: float) -> FullState:
    """``exp(-i H tau) |state>`` through a full eigendecomposition."""
    if H.shape != (2**state.N, 2**state.N):
        raise ValidationError(f"Hamiltonian shape {H.shape} does not match N={state.N}")
    if tau == 0:
        return state
    w, V = np.linalg.eigh(H)
    out = V @ (np.exp(-1j * w * tau) * (V.conj().T @ state.amplitudes))
    norm = np.linalg.norm(out)
    if abs(norm - 1.0) > 1e-10:
        raise ValidationError(f"evolution changed the norm to {norm!r}")
    return FullState(state.N, out / norm)


def full_propagator(H: np.ndarray, tau: float) -> np.ndarray:
    if tau == 0:
        return np.eye(len(H), dtype=complex)
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * tau)) @ V.conj().T


@dataclass
class EquivalenceReport:
    N: int
    params: ModelParams
    taus: List[float]
    max_deviation: float
    max_leakage: float

    def passed(self, tol: float = 1e-10) -> bool:
        return self.max_deviation < tol and self.max_leakage < tol


def sector_equivalence_check(N: int, params: ModelParams = XY, taus: Sequence[float] = (0.1, 1.0, 10.0)) -> EquivalenceReport:
    """Worst |amplitude| difference between the sector propagator and
    projected full evolution of every sector basis state, zero-magnon
    state included.  Leakage is the norm that ends up outside the sector."""
    _check_cap(N)
    basis = SectorBasis(N, include_zero=True)
    H = full_hamiltonian(N, params, periodic=True)
    w, V = np.linalg.eigh(H)
    idx = sector_indices(basis)
    spec = spectrum(basis, params)
    worst, leak = 0.0, 0.0
    for tau in taus:
        # columns of the full propagator for the embedded sector states
        if tau == 0:
            cols = np.eye(len(H), dtype=complex)[:, idx]
        else:
            cols = (V * np.exp(-1j * w * tau)) @ V[idx, :].conj().T
        inside = cols[idx, :]
        U = propagator(spec, tau)
        worst = max(worst, float(np.max(np.abs(inside - U))))
        outside = np.delete(cols, idx, axis=0)
        leak = max(leak, float(np.max(np.linalg.norm(outside, axis=0))) if outside.size else 0.0)
    return EquivalenceReport(N, params, [float(t) for t in taus], worst, leak)


def permutation_e_ab(layout: ProcessorLayout, N: int) -> np.ndarray:
    """0/1 matrix swapping bit A_k with bit B_k for every k."""
    _check_cap(N)
    layout.validate(N)
    idx = np.arange(2**N)
    out = idx.copy()
    for a, b in zip(layout.A_sites, layout.B_sites):
        ba = (idx >> (a - 1)) & 1
        bb = (idx >> (b - 1)) & 1
        diff = ba ^ bb
        out ^= (diff << (a - 1)) | (diff << (b - 1))
    E = np.zeros((2**N, 2**N))
    E[out, idx] = 1.0
    return E


class Gate(str, Enum):
    IDENTITY = "identity"
    XXX_FLIP = "xxx-flip"
    REMOTE_EXCHANGE = "remote-exchange"


_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _gate_matrix(gate: Gate) -> np.ndarray:
    if gate is Gate.XXX_FLIP:
        return np.kron(np.kron(_X, _X), _X)
    if gate is Gate.REMOTE_EXCHANGE:
        # exp(-i pi XX / 4) = (I - i XX) / sqrt(2) since (XX)^2 = I
        XX = np.kron(_X, _X)
        return (np.eye(4) - 1j * XX) / np.sqrt(2)
    raise ValueError(gate)


def _apply_on_sites(gate: np.ndarray, sites: Sequence[int], N: int) -> np.ndarray:
    """Embed a k-qubit gate acting on ``sites`` (first site = most
    significant bit of the gate's own index) into the full space."""
    k = len(sites)
    dim = 2**N
    idx = np.arange(dim)
    local = np.zeros(dim, dtype=int)
    for pos, s in enumerate(sites):
        local |= ((idx >> (s - 1)) & 1) << (k - 1 - pos)
    mask = sum(1 << (s - 1) for s in sites)
    rest = idx & ~mask
    op = np.zeros((dim, dim), dtype=complex)
    for out_local in range(2**k):
        target = rest.copy()
        for pos, s in enumerate(sites):
            target |= ((out_local >> (k - 1 - pos)) & 1) << (s - 1)
        op[target, idx] += gate[out_local, local]
    return op


def local_gate_v_b(gate, layout: ProcessorLayout, N: int) -> np.ndarray:
    gate = Gate(gate)
    _check_cap(N)
    layout.validate(N)
    if gate is Gate.IDENTITY:
        return np.eye(2**N, dtype=complex)
    arity = 3 if gate is Gate.XXX_FLIP else 2
    if layout.K != arity:
        raise ValidationError(f"gate {gate.value!r} acts on {arity} qubits but B has {layout.K}")
    return _apply_on_sites(_gate_matrix(gate), layout.B_sites, N)


def p_ab(gate, layout: ProcessorLayout, N: int) -> np.ndarray:
    """V_B E_AB."""
    return local_gate_v_b(gate, layout, N) @ permutation_e_ab(layout, N)


def exchange_layout(spec: ExchangeSpec) -> ProcessorLayout:
    """Register layout whose E_AB restricts to a permutation-kind exchange."""
    if spec.kind in (Kind.PE, Kind.PE_PRIME, Kind.PES):
        raise ValidationError(f"{spec.kind.value!r} is not a register permutation")
    pairs = spec.pair_list()
    if not pairs:
        raise ValidationError("empty pair list has no register layout")
    return ProcessorLayout(tuple(a for a, _ in pairs), tuple(b for _, b in pairs))


def w_full_defect(gate, layout: ProcessorLayout, N: int, params: ModelParams, tau: float) -> float:
    H = full_hamiltonian(N, params)
    return unitarity_defect(p_ab(gate, layout, N) @ full_propagator(H, tau))


@dataclass
class GateDemo:
    title: str
    layout: ProcessorLayout
    N: int
    before: Dict[str, complex]
    after: Dict[str, complex]

    def lines(self) -> List[str]:
        def fmt(d):
            return " + ".join(f"({a.real:+.6f}{a.imag:+.6f}j)|{k}>" for k, a in d.items())

        return [
            f"{self.title}: A={list(self.layout.A_sites)} B={list(self.layout.B_sites)} N={self.N}",
            f"  in : {fmt(self.before)}",
            f"  out: {fmt(self.after)}",
        ]


def demo_gates() -> List[GateDemo]:
    """Amplification |000>_A -> |111>_B and the remote exchange |01>_A -> B."""
    demos = []
    layout = ProcessorLayout((1, 2, 3), (4, 5, 6))
    psi = FullState.product(6)
    out = p_ab(Gate.XXX_FLIP, layout, 6) @ psi.amplitudes
    demos.append(GateDemo("amplification (V_B = XXX)", layout, 6, psi.nonzero(), FullState(6, out).nonzero()))

    layout = ProcessorLayout((1, 2), (3, 4))
    psi = FullState.product(4, up_sites=[2])  # A register in |01>
    out = p_ab(Gate.REMOTE_EXCHANGE, layout, 4) @ psi.amplitudes
    demos.append(GateDemo("remote exchange (V_B = exp(-i pi XX/4))", layout, 4, psi.nonzero(), FullState(4, out).nonzero()))
    return demos
