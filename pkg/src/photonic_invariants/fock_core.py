"""Fock sectors, sector-block photonic states, expectations and spectra.

A state is stored as one density block per total photon number. Every
operator handled by this package conserves photon number, so coherences
between sectors never enter any result and are dropped on construction
("dephased in total photon number").
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import CapacityError, ContractViolation, InvalidArgument

Occupation = tuple[int, ...]

HERMITIAN_TOL = 1e-12
CHAIN_TOL = 1e-10
PSD_TOL = 1e-10
WEIGHT_TOL = 1e-12
TRUNCATION_WARN = 1e-8

DEPHASED_NOTE = "dephased in total photon number"


def sector_dimension(m: int, n: int) -> int:
    """Number of ways to place ``n`` photons in ``m`` modes."""
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise InvalidArgument(f"mode count must be a positive integer, got {m!r}")
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise InvalidArgument(f"photon count must be a non-negative integer, got {n!r}")
    dim = comb(int(m) + int(n) - 1, int(n))
    if dim > sys.maxsize:
        raise CapacityError(f"sector dimension C({m + n - 1},{n}) exceeds {sys.maxsize}")
    return dim


def _compositions(n: int, m: int) -> Iterable[Occupation]:
    # descending lexicographic: (n,0,...,0) first
    if m == 1:
        yield (n,)
        return
    for first in range(n, -1, -1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _basis(m: int, n: int) -> tuple[Occupation, ...]:
    return tuple(_compositions(n, m))


def enumerate_basis(m: int, n: int) -> list[Occupation]:
    """Occupation vectors of the ``(m, n)`` sector in canonical order.

    The order is descending lexicographic, so ``(n, 0, ..., 0)`` comes first
    and ``(0, ..., 0, n)`` last. Every matrix in the package is expressed in
    this order.
    """
    sector_dimension(m, n)
    return list(_basis(int(m), int(n)))


@dataclass(frozen=True, eq=False)
class FockSector:
    modes: int
    photons: int
    basis: tuple[Occupation, ...]
    index_lookup: Mapping[Occupation, int] = field(repr=False)

    @property
    def dimension(self) -> int:
        return len(self.basis)

    def index(self, occupation: Sequence[int]) -> int:
        occ = tuple(int(c) for c in occupation)
        try:
            return self.index_lookup[occ]
        except KeyError:
            raise InvalidArgument(
                f"{occ} is not in the sector m={self.modes}, n={self.photons}"
            ) from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FockSector):
            return NotImplemented
        return self.modes == other.modes and self.photons == other.photons

    def __hash__(self) -> int:
        return hash((self.modes, self.photons))


@lru_cache(maxsize=None)
def _sector(m: int, n: int) -> FockSector:
    basis = _basis(m, n)
    lookup = {occ: i for i, occ in enumerate(basis)}
    return FockSector(m, n, basis, lookup)


def fock_sector(m: int, n: int) -> FockSector:
    """Return the (cached, immutable) sector of ``n`` photons in ``m`` modes."""
    sector_dimension(m, n)
    return _sector(int(m), int(n))


def basis_index(sector: FockSector, occupation: Sequence[int]) -> int:
    return sector.index(occupation)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def hermiticity_residue(matrix: np.ndarray) -> float:
    """Largest entry of ``A - A^dagger`` relative to ``max(1, max|A|)``."""
    matrix = np.asarray(matrix)
    if matrix.size == 0:
        return 0.0
    scale = max(1.0, float(np.max(np.abs(matrix))))
    return float(np.max(np.abs(matrix - matrix.conj().T))) / scale


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """A dense Hermitian matrix on one Fock sector."""

    sector: FockSector
    matrix: np.ndarray
    tol: float = field(default=CHAIN_TOL, repr=False)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        dim = self.sector.dimension
        if mat.shape != (dim, dim):
            raise InvalidArgument(f"expected a {dim}x{dim} matrix, got shape {mat.shape}")
        residue = hermiticity_residue(mat)
        if residue > self.tol:
            raise ContractViolation(f"operator is not Hermitian (residue {residue:.3e})")
        object.__setattr__(self, "matrix", _frozen(mat))

    def spectrum(self) -> np.ndarray:
        return hermitian_spectrum(self)


@dataclass(frozen=True, eq=False)
class SectorBlock:
    """Density block of one photon-number sector; its trace is the sector weight."""

    sector: FockSector
    matrix: np.ndarray
    weight: float = field(default=None)

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        dim = self.sector.dimension
        if mat.shape != (dim, dim):
            raise InvalidArgument(f"expected a {dim}x{dim} block, got shape {mat.shape}")
        residue = hermiticity_residue(mat)
        if residue > HERMITIAN_TOL:
            raise ContractViolation(f"density block is not Hermitian (residue {residue:.3e})")
        mat = 0.5 * (mat + mat.conj().T)
        trace = float(np.trace(mat).real)
        if self.weight is None:
            object.__setattr__(self, "weight", trace)
        elif abs(trace - self.weight) > WEIGHT_TOL:
            raise InvalidArgument(f"block trace {trace} differs from weight {self.weight}")
        if not -WEIGHT_TOL <= self.weight <= 1 + WEIGHT_TOL:
            raise InvalidArgument(f"block weight {self.weight} outside [0, 1]")
        lowest = np.linalg.eigvalsh(mat)[0] if dim else 0.0
        if lowest < -PSD_TOL:
            raise ContractViolation(f"density block is not PSD (eigenvalue {lowest:.3e})")
        object.__setattr__(self, "matrix", _frozen(mat))

    @property
    def photons(self) -> int:
        return self.sector.photons


@dataclass(frozen=True, eq=False)
class PhotonicState:
    """A photonic state as a collection of fixed-photon-number blocks.

    Attributes:
        modes: Number of optical modes.
        blocks: Map from photon number to its density block.
        pure: True only for a rank-one state living in a single sector.
        truncation_deficit: Probability mass dropped by a photon-number cutoff.
        notes: Free-form provenance tags (e.g. the dephasing note).
    """

    modes: int
    blocks: Mapping[int, SectorBlock]
    pure: bool = False
    truncation_deficit: float = 0.0
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.blocks:
            raise InvalidArgument("a state needs at least one sector block")
        blocks = dict(sorted(self.blocks.items()))
        for n, block in blocks.items():
            if block.sector.modes != self.modes or block.sector.photons != n:
                raise InvalidArgument(
                    f"block for n={n} lives in sector m={block.sector.modes}, "
                    f"n={block.sector.photons}; state has m={self.modes}"
                )
        if self.truncation_deficit < 0:
            raise InvalidArgument("truncation deficit must be non-negative")
        total = sum(b.weight for b in blocks.values()) + self.truncation_deficit
        if abs(total - 1.0) > WEIGHT_TOL:
            raise InvalidArgument(f"block weights plus truncation deficit sum to {total}, not 1")
        object.__setattr__(self, "blocks", blocks)

    @property
    def sectors(self) -> list[int]:
        return list(self.blocks)

    @property
    def max_photons(self) -> int:
        return max(self.blocks)

    def block(self, n: int) -> SectorBlock:
        try:
            return self.blocks[n]
        except KeyError:
            raise InvalidArgument(f"state has no block with {n} photons") from None

    def warnings(self) -> list[str]:
        if self.truncation_deficit > TRUNCATION_WARN:
            return [
                f"truncation deficit {self.truncation_deficit:.3e} exceeds "
                f"{TRUNCATION_WARN:g}; values carry a truncation error"
            ]
        return []


def make_pure(terms: Sequence[tuple[complex, Sequence[int]]], m: int) -> PhotonicState:
    """Build a normalized state from ``(amplitude, occupation)`` terms.

    Terms may span several photon numbers; each sector becomes one rank-one
    block and cross-sector coherences are dropped. Repeated occupations add.
    """
    if not terms:
        raise InvalidArgument("no terms given")
    vectors: dict[int, np.ndarray] = {}
    for amplitude, occupation in terms:
        occ = tuple(int(c) for c in occupation)
        if len(occ) != m:
            raise InvalidArgument(f"occupation {occ} has {len(occ)} modes, expected {m}")
        if any(c < 0 for c in occ):
            raise InvalidArgument(f"negative occupation in {occ}")
        n = sum(occ)
        sector = fock_sector(m, n)
        vec = vectors.setdefault(n, np.zeros(sector.dimension, dtype=complex))
        vec[sector.index(occ)] += complex(amplitude)
    norm2 = sum(float(np.vdot(v, v).real) for v in vectors.values())
    if norm2 == 0.0:
        raise InvalidArgument("all amplitudes are zero")
    blocks = {}
    for n, vec in vectors.items():
        vec = vec / np.sqrt(norm2)
        if not np.any(vec):
            continue
        blocks[n] = SectorBlock(fock_sector(m, n), np.outer(vec, vec.conj()))
    _renormalize(blocks)
    single = len(blocks) == 1
    notes = () if single else (DEPHASED_NOTE,)
    return PhotonicState(m, blocks, pure=single, notes=notes)


def _renormalize(blocks: dict[int, SectorBlock], deficit: float = 0.0) -> None:
    # absorb floating-point drift so weights + deficit == 1 to rounding
    total = sum(b.weight for b in blocks.values())
    target = 1.0 - deficit
    if total > 0 and abs(total - target) > 0:
        for n, b in blocks.items():
            mat = np.array(b.matrix) * (target / total)
            blocks[n] = SectorBlock(b.sector, mat)


def state_from_blocks(
    m: int,
    matrices: Mapping[int, np.ndarray],
    *,
    truncation_deficit: float = 0.0,
    pure: bool | None = None,
    notes: tuple[str, ...] = (),
) -> PhotonicState:
    """Assemble a state from raw per-sector density matrices."""
    blocks = {int(n): SectorBlock(fock_sector(m, int(n)), mat) for n, mat in matrices.items()}
    if pure is None:
        pure = len(blocks) == 1 and _is_rank_one(next(iter(blocks.values())).matrix)
    return PhotonicState(m, blocks, pure=pure, truncation_deficit=truncation_deficit, notes=notes)


def _is_rank_one(mat: np.ndarray) -> bool:
    vals = np.linalg.eigvalsh(mat)
    return bool(abs(vals[-1] - np.trace(mat).real) < 1e-10 and abs(vals[-1] - 1.0) < 1e-10)


def make_mixed(components: Sequence[tuple[float, PhotonicState]]) -> PhotonicState:
    """Convex combination of states, merged sector by sector."""
    if not components:
        raise InvalidArgument("no components given")
    weights = [float(w) for w, _ in components]
    if any(w < 0 for w in weights):
        raise InvalidArgument(f"negative mixture weight in {weights}")
    if abs(sum(weights) - 1.0) > WEIGHT_TOL:
        raise InvalidArgument(f"mixture weights sum to {sum(weights)}, not 1")
    m = components[0][1].modes
    if any(s.modes != m for _, s in components):
        raise InvalidArgument("all mixture components must have the same mode count")
    live = [(w, s) for w, s in components if w > 0]
    if len(live) == 1:
        return live[0][1]
    merged: dict[int, np.ndarray] = {}
    for w, state in live:
        for n, block in state.blocks.items():
            merged[n] = merged.get(n, 0) + w * np.asarray(block.matrix)
    deficit = sum(w * s.truncation_deficit for w, s in live)
    blocks = {n: SectorBlock(fock_sector(m, n), mat) for n, mat in merged.items()}
    _renormalize(blocks, deficit)
    notes = tuple(sorted({note for _, s in live for note in s.notes}))
    return PhotonicState(m, blocks, pure=False, truncation_deficit=deficit, notes=notes)


OperatorFamily = Union[
    Callable[[int], Union[HermitianOperator, np.ndarray]],
    Mapping[int, Union[HermitianOperator, np.ndarray]],
]


def _sector_operator(op_family: OperatorFamily, n: int) -> np.ndarray:
    if callable(op_family):
        op = op_family(n)
    else:
        if n not in op_family:
            raise InvalidArgument(f"no operator supplied for the {n}-photon sector")
        op = op_family[n]
    if op is None:
        raise InvalidArgument(f"no operator supplied for the {n}-photon sector")
    return np.asarray(op.matrix if isinstance(op, HermitianOperator) else op)


def expectation(
    op_family: OperatorFamily, state: PhotonicState, *, with_residue: bool = False
):
    """Expectation value ``sum_n tr(op_n rho_n)`` of a number-conserving operator.

    Args:
        op_family: Callable ``n -> operator`` or a mapping keyed by photon number.
        state: The state.
        with_residue: Also return the imaginary residue of the trace.

    Returns:
        The real expectation value, or ``(value, residue)``.
    """
    total = 0j
    for n, block in state.blocks.items():
        op = _sector_operator(op_family, n)
        if op.shape != block.matrix.shape:
            raise InvalidArgument(
                f"operator for n={n} has shape {op.shape}, block has {block.matrix.shape}"
            )
        total += np.einsum("ij,ji->", op, block.matrix)
    if with_residue:
        return float(total.real), float(abs(total.imag))
    return float(total.real)


def hermitian_spectrum(op, tol: float = CHAIN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian operator or matrix.

    Raises:
        ContractViolation: if the input is not Hermitian within ``tol``
            (relative to ``max(1, max|A|)``).
    """
    mat = np.asarray(op.matrix if isinstance(op, HermitianOperator) else op, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidArgument(f"expected a square matrix, got shape {mat.shape}")
    residue = hermiticity_residue(mat)
    if residue > tol:
        raise ContractViolation(f"matrix is not Hermitian (residue {residue:.3e})")
    if mat.shape[0] == 0:
        return np.zeros(0)
    return np.linalg.eigvalsh(0.5 * (mat + mat.conj().T))
