"""Exchange operators on the zero/one-magnon sector.

Permutation kinds (P1, P3, PAll, custom pair lists) are built as 0/1
matrices.  The entangling kinds (PE, PEPrime, PES) exchange a source site
with a uniform superposition over target sites; as written they are not
unitary, so by default they are replaced by the reflection

    R = I - 2 w w^dag,   w = (u - v) / ||u - v||

which maps the source ``u`` to the normalized target ``v`` and back and is
the identity on everything orthogonal to both.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import ValidationError
from .linalg import unitarity_defect
from .sector import SectorBasis


class Kind(str, Enum):
    P1 = "p1"
    P3 = "p3"
    PALL = "pall"
    PE = "pe"
    PE_PRIME = "pe-prime"
    PES = "pes"
    PAIRS = "pairs"


class Completion(str, Enum):
    UNITARY = "unitary"
    RAW = "raw"


ENTANGLING = (Kind.PE, Kind.PE_PRIME, Kind.PES)


def pall_bounds(N: int) -> Tuple[int, int]:
    """Upper summation limits (M1, M2) for the all-pairs operator."""
    if ((N - 3) // 2) % 2 == 0:
        return (N + 1) // 4, (3 * N - 1) // 4
    return (N - 1) // 4, (3 * N + 1) // 4


def pall_pairs(N: int) -> List[Tuple[int, int]]:
    """Pairs (j, r+1-j) for j <= M1 and (j, N+r+1-j) for r < j <= M2.

    Self-pairings are dropped (they are fixed points).
    """
    r = (N + 1) // 2
    M1, M2 = pall_bounds(N)
    pairs = [(j, r + 1 - j) for j in range(1, M1 + 1)]
    pairs += [(j, N + r + 1 - j) for j in range(r + 1, M2 + 1)]
    return [(a, b) for a, b in pairs if a != b]


@dataclass(frozen=True)
class ExchangeSpec:
    kind: Kind
    N: int
    pairs: Tuple[Tuple[int, int], ...] = ()
    completion: Completion = Completion.UNITARY
    degenerate: bool = False
    """Permit PEPrime at N=3, where sites 1, 2 and r=2 collide."""

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "completion", Completion(self.completion))
        object.__setattr__(self, "pairs", tuple((int(a), int(b)) for a, b in self.pairs))
        N = self.N
        if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 3 or N % 2 == 0:
            raise ValidationError(f"N must be odd and >= 3, got N={N}")
        if self.kind is Kind.P3 and N < 7:
            raise ValidationError(f"p3 needs N >= 7 so sites 1, 2, N, r-1, r, r+1 are distinct (N={N})")
        if self.kind is Kind.PE_PRIME and N < 5 and not (N == 3 and self.degenerate):
            raise ValidationError("pe-prime needs N >= 5 for distinct sites 1, 2, r; N=3 only with the degenerate flag")
        if self.kind is not Kind.PAIRS and self.pairs:
            raise ValidationError(f"explicit pairs are only valid for kind 'pairs', not {self.kind.value!r}")
        if self.kind in (Kind.P1, Kind.P3, Kind.PALL, Kind.PAIRS):
            _check_pairs(self.pair_list(), N)

    @property
    def r(self) -> int:
        return (self.N + 1) // 2

    @property
    def is_degenerate(self) -> bool:
        return self.kind is Kind.PE_PRIME and self.N == 3

    def pair_list(self) -> List[Tuple[int, int]]:
        N, r = self.N, self.r
        if self.kind is Kind.P1:
            return [(1, r)]
        if self.kind is Kind.P3:
            return [(1, r), (2, r - 1), (N, r + 1)]
        if self.kind is Kind.PALL:
            return pall_pairs(N)
        if self.kind is Kind.PAIRS:
            return list(self.pairs)
        raise ValidationError(f"{self.kind.value!r} is not a permutation-type exchange")

    def entangling_sites(self) -> Tuple[int, Tuple[int, ...], float]:
        """(source site, target sites, literal prefactor) for PE-type kinds."""
        N, r = self.N, self.r
        if self.kind is Kind.PE:
            return 1, (r, r + 1), 1 / np.sqrt(2)
        if self.kind is Kind.PE_PRIME:
            return 2, (1, r), 1 / np.sqrt(2)
        if self.kind is Kind.PES:
            return 1, tuple(range(2, N + 1)), 1 / np.sqrt(N)
        raise ValidationError(f"{self.kind.value!r} is not an entangling exchange")

    @property
    def sender_sites(self) -> Tuple[int, ...]:
        """Sites of processor A."""
        if self.kind is Kind.PALL:
            return tuple(range(1, self.r + 1))
        if self.kind in ENTANGLING:
            return (self.entangling_sites()[0],)
        return tuple(a for a, _ in self.pair_list())

    def text(self) -> str:
        if self.kind is Kind.PAIRS:
            return "pairs:" + ",".join(f"{a}-{b}" for a, b in self.pairs)
        return self.kind.value

    def with_n(self, N: int) -> "ExchangeSpec":
        degenerate = self.degenerate and N == 3
        return ExchangeSpec(self.kind, N, self.pairs, self.completion, degenerate)


def _check_pairs(pairs, N: int) -> None:
    seen = set()
    for a, b in pairs:
        for s in (a, b):
            if not 1 <= s <= N:
                raise ValidationError(f"site {s} outside [1, {N}]")
        if a == b:
            raise ValidationError(f"pair ({a}, {b}) swaps a site with itself")
        if a in seen or b in seen:
            raise ValidationError(f"site collision in pair list {list(pairs)}")
        seen.update((a, b))


_PAIR_RE = re.compile(r"^\s*(\d+)\s*-\s*(\d+)\s*$")


def parse_exchange(text: str, N: int, raw: bool = False, degenerate: bool = False) -> ExchangeSpec:
    """Parse ``p1``, ``p3``, ``pall``, ``pe``, ``pe-prime``, ``pes`` or
    ``pairs:1-5,2-4``."""
    text = text.strip().lower()
    completion = Completion.RAW if raw else Completion.UNITARY
    if text.startswith("pairs:"):
        body = text[len("pairs:"):]
        pairs = []
        for item in filter(None, body.split(",")):
            m = _PAIR_RE.match(item)
            if not m:
                raise ValidationError(f"bad pair {item!r}; expected 'a-b'")
            pairs.append((int(m.group(1)), int(m.group(2))))
        return ExchangeSpec(Kind.PAIRS, N, tuple(pairs), completion, degenerate)
    aliases = {"pe'": "pe-prime", "peprime": "pe-prime", "pe_prime": "pe-prime", "p_all": "pall"}
    text = aliases.get(text, text)
    try:
        kind = Kind(text)
    except ValueError:
        raise ValidationError(f"unknown exchange {text!r}") from None
    if kind is Kind.PAIRS:
        raise ValidationError("pairs exchange needs a list, e.g. 'pairs:1-5,2-4'")
    return ExchangeSpec(kind, N, (), completion, degenerate)


@dataclass(frozen=True)
class ExchangeOperator:
    spec: ExchangeSpec
    basis: SectorBasis
    matrix: np.ndarray
    unitarity_defect: float

    @property
    def sender_slots(self) -> List[int]:
        return [self.basis.index(s) for s in self.spec.sender_sites]


def _permutation_matrix(basis: SectorBasis, pairs) -> np.ndarray:
    P = np.eye(basis.dim, dtype=complex)
    for a, b in pairs:
        ia, ib = basis.index(a), basis.index(b)
        P[[ia, ib], :] = P[[ib, ia], :]
    return P


def _raw_entangling(spec: ExchangeSpec, basis: SectorBasis) -> np.ndarray:
    """The operator exactly as written: c |s>(sum_t <t|) + H.c. + identity on
    untouched sites.  A term that is its own conjugate (only possible when
    the source is also a target) is counted once."""
    source, targets, c = spec.entangling_sites()
    M = np.zeros((basis.dim, basis.dim), dtype=complex)
    s = basis.index(source)
    for t in targets:
        i = basis.index(t)
        M[s, i] = c
        M[i, s] = c
    touched = {source, *targets}
    for j in range(1, basis.N + 1):
        if j not in touched:
            M[basis.index(j), basis.index(j)] = 1.0
    if basis.include_zero:
        M[0, 0] = 1.0
    return M


def _reflection(basis: SectorBasis, source: int, targets) -> np.ndarray:
    u = np.zeros(basis.dim)
    u[basis.index(source)] = 1.0
    v = np.zeros(basis.dim)
    for t in targets:
        v[basis.index(t)] += 1.0
    v /= np.linalg.norm(v)
    w = u - v
    w /= np.linalg.norm(w)
    return (np.eye(basis.dim) - 2.0 * np.outer(w, w)).astype(complex)


def polar_unitary(M: np.ndarray) -> np.ndarray:
    """Nearest unitary to a Hermitian matrix: eigenvalues mapped to their
    sign, with the kernel sent to +1."""
    w, V = np.linalg.eigh(M)
    s = np.where(w < -1e-12, -1.0, 1.0)
    return (V * s) @ V.conj().T


def build(spec: ExchangeSpec, basis: SectorBasis) -> ExchangeOperator:
    if spec.N != basis.N:
        raise ValidationError(f"exchange built for N={spec.N} but basis has N={basis.N}")
    if spec.kind in ENTANGLING:
        source, targets, _ = spec.entangling_sites()
        raw = _raw_entangling(spec, basis)
        if spec.completion is Completion.RAW:
            M = raw
        elif spec.is_degenerate:
            # source is among the targets, so there is no pair of orthogonal
            # vectors to swap; fall back to the nearest unitary of the
            # written operator
            M = polar_unitary(raw)
        else:
            M = _reflection(basis, source, targets)
    else:
        M = _permutation_matrix(basis, spec.pair_list())
    M.setflags(write=False)
    return ExchangeOperator(spec, basis, M, unitarity_defect(M))


@dataclass(frozen=True)
class ExchangeReport:
    involution: bool
    unitarity_defect: float
    fixed_sites: List[int]

    def as_dict(self) -> Dict:
        return {"involution": self.involution, "unitarity_defect": self.unitarity_defect, "fixed_sites": self.fixed_sites}


def verify_exchange(op: ExchangeOperator, tol: float = 1e-12) -> ExchangeReport:
    P = op.matrix
    involution = float(np.linalg.norm(P @ P - np.eye(P.shape[0]))) < tol
    fixed = []
    for j in range(1, op.basis.N + 1):
        i = op.basis.index(j)
        e = np.zeros(P.shape[0])
        e[i] = 1.0
        if np.max(np.abs(P[:, i] - e)) < tol:
            fixed.append(j)
    return ExchangeReport(involution, op.unitarity_defect, fixed)


def identity_exchange(N: int) -> ExchangeSpec:
    return ExchangeSpec(Kind.PAIRS, N, ())


def custom_pairs(N: int, pairs, completion: Optional[Completion] = None) -> ExchangeSpec:
    return ExchangeSpec(Kind.PAIRS, N, tuple(pairs), completion or Completion.UNITARY)
