"""Zero/one-magnon sector of a periodic spin-1/2 ring.

Basis ordering is fixed: the all-down state ``|0^>`` first (when included),
then ``|j^>`` for ``j = 1..N`` where site ``j`` carries the single spin-up.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ValidationError

ZERO = "zero"
"""Tag selecting the zero-magnon state in :func:`basis_state`."""


@dataclass(frozen=True)
class SectorBasis:
    N: int
    include_zero: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool):
            raise ValidationError(f"N must be an integer, got {self.N!r}")
        if self.N % 2 == 0:
            raise ValidationError(f"N must be odd, got N={self.N}")
        if self.N < 3:
            raise ValidationError(f"N must be odd and >= 3, got N={self.N}")

    @property
    def dim(self) -> int:
        return self.N + 1 if self.include_zero else self.N

    @property
    def r(self) -> int:
        """Receiver site (N+1)/2."""
        return (self.N + 1) // 2

    @property
    def offset(self) -> int:
        return 1 if self.include_zero else 0

    def index(self, site: Union[int, str]) -> int:
        """Slot of site ``j`` (1-based) or of the ``ZERO`` tag."""
        if site == ZERO:
            if not self.include_zero:
                raise ValidationError("zero-magnon state requested but basis has include_zero=False")
            return 0
        if isinstance(site, bool) or not isinstance(site, (int, np.integer)):
            raise ValidationError(f"site must be an integer or {ZERO!r}, got {site!r}")
        if not 1 <= site <= self.N:
            raise ValidationError(f"site {site} outside [1, {self.N}]")
        return int(site) - 1 + self.offset

    def site_slots(self) -> np.ndarray:
        """Slots of the one-magnon states in site order."""
        return np.arange(self.N) + self.offset


def make_basis(N: int, include_zero: bool = False) -> SectorBasis:
    return SectorBasis(N, include_zero)


@dataclass(frozen=True)
class SectorState:
    basis: SectorBasis
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.basis.dim,):
            raise ValidationError(f"amplitude vector has shape {amps.shape}, expected ({self.basis.dim},)")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.norm**2 - 1.0) < tol


def basis_state(basis: SectorBasis, j: Union[int, str]) -> SectorState:
    amps = np.zeros(basis.dim, dtype=complex)
    amps[basis.index(j)] = 1.0
    return SectorState(basis, amps)


def superposition(basis: SectorBasis, coefficients: dict) -> SectorState:
    """Normalized state from ``{site_or_ZERO: amplitude}``."""
    amps = np.zeros(basis.dim, dtype=complex)
    for key, c in coefficients.items():
        amps[basis.index(key)] += c
    norm = np.linalg.norm(amps)
    if norm == 0:
        raise ValidationError("superposition has zero norm")
    return SectorState(basis, amps / norm)


@dataclass(frozen=True)
class ModelParams:
    model: str = "XY"
    J: float = 1.0
    Delta: float = 0.0
    h: float = 0.0

    def __post_init__(self) -> None:
        model = self.model.upper()
        if model not in ("XY", "XXZ"):
            raise ValidationError(f"unknown model {self.model!r}; expected XY or XXZ")
        object.__setattr__(self, "model", model)
        if self.J == 0:
            raise ValidationError("coupling J must be nonzero")
        if model == "XY":
            # anisotropy and field have no meaning for the XY chain
            object.__setattr__(self, "Delta", 0.0)
            object.__setattr__(self, "h", 0.0)


XY = ModelParams("XY")


@dataclass(frozen=True)
class SpectralData:
    """Eigenpairs of the sector Hamiltonian.

    ``modes[:, m-1]`` is the one-magnon eigenvector for mode ``m`` expressed
    over the site slots only (length N); ``zero_energy`` is the energy of the
    all-down state.
    """

    basis: SectorBasis
    energies: np.ndarray
    modes: np.ndarray
    zero_energy: float = 0.0
    circulant: bool = False
    """True when the modes are plane waves, making U(tau) a circulant matrix."""
    _mode_conj: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_mode_conj", self.modes.conj().T.copy())
        if self.circulant:
            j = np.arange(self.basis.N)
            object.__setattr__(self, "_offsets", (j[:, None] - j[None, :]) % self.basis.N)


def _fourier_modes(N: int) -> np.ndarray:
    j = np.arange(1, N + 1)
    m = np.arange(1, N + 1)
    return np.exp(2j * np.pi * np.outer(j, m) / N) / np.sqrt(N)


def xy_spectrum(basis: SectorBasis, params: ModelParams = XY) -> SpectralData:
    """Analytic spectrum ``E_m = -J cos(2 pi m / N)`` with plane-wave modes."""
    if params.model != "XY":
        raise ValidationError("xy_spectrum requires model=XY; use spectrum() for XXZ")
    N = basis.N
    m = np.arange(1, N + 1)
    energies = -params.J * np.cos(2 * np.pi * m / N)
    return SpectralData(basis, energies, _fourier_modes(N), 0.0, circulant=True)


def xxz_diagonals(N: int, params: ModelParams) -> tuple[float, float]:
    """(one-magnon diagonal, zero-magnon diagonal) of the XXZ ring."""
    one = params.J * params.Delta * (N - 4) / 4 + params.h * (2 - N) / 2
    zero = params.J * params.Delta * N / 4 - params.h * N / 2
    return one, zero


def spectrum(basis: SectorBasis, params: ModelParams = XY) -> SpectralData:
    """Analytic sector spectrum for either model.

    XXZ hopping has the opposite sign to XY, so its one-magnon band is
    ``+J cos(2 pi m / N)`` shifted by a constant diagonal.
    """
    if params.model == "XY":
        return xy_spectrum(basis, params)
    N = basis.N
    m = np.arange(1, N + 1)
    one, zero = xxz_diagonals(N, params)
    energies = params.J * np.cos(2 * np.pi * m / N) + one
    return SpectralData(basis, energies, _fourier_modes(N), zero, circulant=True)


def one_magnon_hamiltonian(basis: SectorBasis, params: ModelParams = XY) -> np.ndarray:
    N, off = basis.N, basis.offset
    H = np.zeros((basis.dim, basis.dim), dtype=complex)
    hop = -params.J / 2 if params.model == "XY" else params.J / 2
    for j in range(N):
        k = (j + 1) % N
        H[off + j, off + k] += hop
        H[off + k, off + j] += hop
    if params.model == "XXZ":
        one, zero = xxz_diagonals(N, params)
        H[off:, off:] += one * np.eye(N)
        if basis.include_zero:
            H[0, 0] = zero
    return H


def propagator(spec: SpectralData, tau: float) -> np.ndarray:
    """``U(tau) = exp(-i H tau)`` on the sector basis (hbar = 1)."""
    basis = spec.basis
    if tau == 0:
        return np.eye(basis.dim, dtype=complex)
    phases = np.exp(-1j * spec.energies * tau)
    if spec.circulant:
        # U[j, k] depends only on (j - k) mod N; build it from its first column
        first = (spec.modes * phases) @ spec._mode_conj[:, 0]
        block = first[spec._offsets]
    else:
        block = (spec.modes * phases) @ spec._mode_conj
    if not basis.include_zero:
        return block
    U = np.zeros((basis.dim, basis.dim), dtype=complex)
    U[0, 0] = np.exp(-1j * spec.zero_energy * tau)
    U[1:, 1:] = block
    return U


def shifted(spec: SpectralData, c: float) -> SpectralData:
    """Same modes with every energy (zero-magnon included) raised by ``c``."""
    return SpectralData(spec.basis, spec.energies + c, spec.modes, spec.zero_energy + c, spec.circulant)
