"""Single-photon algebra, its multiphoton image and the photonic homomorphism.

Conventions pinned here (every report echoes them):

* Creation operators evolve as ``a_k^dag -> sum_j S[j, k] a_j^dag``, so the
  multiphoton unitary is a group homomorphism ``phi(S1 S2) = phi(S1) phi(S2)``
  and ``phi(exp(i h)) = exp(i dphi(h))``.
* Algebra basis order: all ``x_jk`` (j < k, lexicographic), then all ``y_jk``,
  then ``z_1 ... z_m``. Mode labels are 1-based.
* Beam splitter block on modes (j, k):
  ``[[cos t, -e^{i p} sin t], [e^{-i p} sin t, cos t]]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from math import factorial, prod
from typing import Sequence, Union

import numpy as np
from scipy.linalg import expm, logm

from .errors import InvalidArgument
from .fock_core import (
    FockSector,
    HermitianOperator,
    PhotonicState,
    SectorBlock,
    enumerate_basis,
    fock_sector,
    hermiticity_residue,
)

UNITARY_TOL = 1e-10

BASIS_ORDER_NOTE = "x_jk (j<k lexicographic), y_jk (j<k lexicographic), z_j; modes 1-based"
PHI_CONVENTION = "a_k^dag -> sum_j S[j,k] a_j^dag"
BEAM_SPLITTER_CONVENTION = "[[cos t, -exp(i p) sin t], [exp(-i p) sin t, cos t]] on modes (j, k)"


def _frozen(a, dtype=complex) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ScatteringMatrix:
    """Unitary single-photon scattering matrix ``S`` of an ``m``-mode interferometer."""

    entries: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.entries, dtype=complex)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] == 0:
            raise InvalidArgument(f"scattering matrix must be square, got shape {s.shape}")
        err = np.max(np.abs(s @ s.conj().T - np.eye(s.shape[0])))
        if err > UNITARY_TOL:
            raise InvalidArgument(f"scattering matrix is not unitary (deviation {err:.3e})")
        object.__setattr__(self, "entries", _frozen(s))

    @property
    def modes(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def hamiltonian(self) -> np.ndarray:
        """Hermitian ``h`` with ``exp(i h) = S``, from the principal logarithm."""
        h = logm(self.entries) / 1j
        return _frozen(0.5 * (h + h.conj().T))

    def __matmul__(self, other: "ScatteringMatrix") -> "ScatteringMatrix":
        return ScatteringMatrix(self.entries @ other.entries)

    @property
    def dagger(self) -> "ScatteringMatrix":
        return ScatteringMatrix(self.entries.conj().T)


@dataclass(frozen=True, eq=False)
class AlgebraBasis:
    """Trace-orthonormal basis of ``m x m`` Hermitian matrices."""

    modes: int
    elements: np.ndarray
    labels: tuple[str, ...]
    order: str = BASIS_ORDER_NOTE

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True, eq=False)
class ImageBasis:
    """Images ``O_i = dphi(b_i)`` restricted to one sector, same order as the algebra basis."""

    sector: FockSector
    elements: np.ndarray
    labels: tuple[str, ...]

    @property
    def modes(self) -> int:
        return self.sector.modes

    @property
    def photons(self) -> int:
        return self.sector.photons

    def operator(self, i: int) -> HermitianOperator:
        return HermitianOperator(self.sector, self.elements[i])


@dataclass(frozen=True, eq=False)
class AdjointMatrix:
    """Real orthogonal ``C`` with ``S^dag b_i S = sum_j C[i, j] b_j``."""

    modes: int
    entries: np.ndarray
    basis_order: str = BASIS_ORDER_NOTE


@lru_cache(maxsize=None)
def _u_basis(m: int) -> AlgebraBasis:
    elems, labels = [], []
    pairs = list(combinations(range(m), 2))
    s = 1 / np.sqrt(2)
    for j, k in pairs:
        b = np.zeros((m, m), dtype=complex)
        b[j, k] = b[k, j] = s
        elems.append(b)
        labels.append(f"x{j + 1},{k + 1}")
    for j, k in pairs:
        b = np.zeros((m, m), dtype=complex)
        b[j, k] = 1j * s
        b[k, j] = -1j * s
        elems.append(b)
        labels.append(f"y{j + 1},{k + 1}")
    for j in range(m):
        b = np.zeros((m, m), dtype=complex)
        b[j, j] = 1
        elems.append(b)
        labels.append(f"z{j + 1}")
    return AlgebraBasis(m, _frozen(elems), tuple(labels))


def u_basis(m: int) -> AlgebraBasis:
    """The ``m**2`` orthonormal Hermitian generators ``b_i`` in recorded order."""
    if m < 1:
        raise InvalidArgument(f"mode count must be positive, got {m}")
    return _u_basis(int(m))


@lru_cache(maxsize=64)
def hopping_operators(m: int, n: int) -> np.ndarray:
    """Array ``E[j, k]`` holding the sector matrix of ``a_j^dag a_k``.

    Shape ``(m, m, M, M)``; real, read-only.
    """
    sector = fock_sector(m, n)
    dim = sector.dimension
    ops = np.zeros((m, m, dim, dim))
    for col, occ in enumerate(sector.basis):
        for k in range(m):
            if occ[k] == 0:
                continue
            lowered = list(occ)
            lowered[k] -= 1
            for j in range(m):
                raised = list(lowered)
                raised[j] += 1
                row = sector.index_lookup[tuple(raised)]
                ops[j, k, row, col] += np.sqrt(occ[k] * raised[j])
    ops.setflags(write=False)
    return ops


def dphi(h: np.ndarray, n: int) -> HermitianOperator:
    """Sector matrix of ``sum_jk h[j, k] a_j^dag a_k``."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidArgument(f"h must be square, got shape {h.shape}")
    if hermiticity_residue(h) > 1e-10:
        raise InvalidArgument("h is not Hermitian")
    m = h.shape[0]
    mat = np.einsum("jk,jkab->ab", h, hopping_operators(m, n))
    return HermitianOperator(fock_sector(m, n), mat)


def _image_elements(basis: AlgebraBasis, n: int) -> np.ndarray:
    return np.einsum("ijk,jkab->iab", basis.elements, hopping_operators(basis.modes, n))


@lru_cache(maxsize=64)
def _image_basis(m: int, n: int) -> ImageBasis:
    basis = _u_basis(m)
    return ImageBasis(fock_sector(m, n), _frozen(_image_elements(basis, n)), basis.labels)


def image_basis(m: int, n: int, basis: AlgebraBasis | None = None) -> ImageBasis:
    """Images ``O_i = dphi(b_i)`` on the ``(m, n)`` sector.

    A custom orthonormal ``basis`` may be supplied; its order is kept.
    """
    if basis is None:
        fock_sector(m, n)
        return _image_basis(int(m), int(n))
    if basis.modes != m:
        raise InvalidArgument(f"basis has {basis.modes} modes, expected {m}")
    return ImageBasis(fock_sector(m, n), _frozen(_image_elements(basis, n)), basis.labels)


def _as_matrix(S: Union[ScatteringMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(S, ScatteringMatrix):
        return S.entries
    return ScatteringMatrix(S).entries


def photonic_unitary(S: Union[ScatteringMatrix, np.ndarray], n: int) -> np.ndarray:
    """Multiphoton unitary ``phi(S)`` on the ``n``-photon sector.

    Column ``|in>`` is built by expanding ``prod_k (sum_j S[j,k] a_j^dag)^{in_k}``
    multinomially and collecting output occupations.
    """
    s = _as_matrix(S)
    m = s.shape[0]
    sector = fock_sector(m, n)
    out = np.zeros((sector.dimension, sector.dimension), dtype=complex)
    # per-mode expansions of (sum_j S[j,k] a_j^dag)^c, cached by (k, c)
    expansions: dict[tuple[int, int], list[tuple[tuple[int, ...], complex]]] = {}

    def expansion(k: int, c: int):
        key = (k, c)
        if key not in expansions:
            terms = []
            for comp in enumerate_basis(m, c):
                coef = factorial(c) / prod(factorial(x) for x in comp)
                coef *= prod(s[j, k] ** x for j, x in enumerate(comp))
                terms.append((comp, coef))
            expansions[key] = terms
        return expansions[key]

    for col, occ in enumerate(sector.basis):
        partial: dict[tuple[int, ...], complex] = {(0,) * m: 1.0 + 0j}
        for k, c in enumerate(occ):
            if c == 0:
                continue
            nxt: dict[tuple[int, ...], complex] = {}
            for base, amp in partial.items():
                for comp, coef in expansion(k, c):
                    key = tuple(a + b for a, b in zip(base, comp))
                    nxt[key] = nxt.get(key, 0) + amp * coef
            partial = nxt
        norm_in = np.sqrt(prod(factorial(x) for x in occ))
        for target, amp in partial.items():
            row = sector.index_lookup[target]
            out[row, col] = amp * np.sqrt(prod(factorial(x) for x in target)) / norm_in
    return out


def permanent(a: np.ndarray) -> complex:
    """Permanent by Ryser's inclusion-exclusion formula with Gray-code updates."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if a.shape != (n, n):
        raise InvalidArgument(f"permanent needs a square matrix, got {a.shape}")
    if n == 0:
        return 1.0 + 0j
    row_sums = np.zeros(n, dtype=complex)
    total = 0j
    subset = 0
    for i in range(1, 2 ** n):
        # flip the column given by the lowest set bit of i
        col = (i & -i).bit_length() - 1
        if subset >> col & 1:
            row_sums -= a[:, col]
        else:
            row_sums += a[:, col]
        subset ^= 1 << col
        sign = -1 if bin(subset).count("1") % 2 else 1
        total += sign * np.prod(row_sums)
    return (-1) ** n * total


def amplitude_permanent(
    S: Union[ScatteringMatrix, np.ndarray], inp: Sequence[int], out: Sequence[int]
) -> complex:
    """``<out| phi(S) |in>`` from the permanent of the repeated submatrix of ``S``."""
    s = _as_matrix(S)
    m = s.shape[0]
    inp, out = tuple(int(x) for x in inp), tuple(int(x) for x in out)
    if len(inp) != m or len(out) != m:
        raise InvalidArgument(f"occupations must have {m} modes")
    if sum(inp) != sum(out):
        raise InvalidArgument(f"{inp} and {out} are in different photon-number sectors")
    rows = [j for j, c in enumerate(out) for _ in range(c)]
    cols = [k for k, c in enumerate(inp) for _ in range(c)]
    sub = s[np.ix_(rows, cols)]
    norm = np.sqrt(prod(factorial(x) for x in inp) * prod(factorial(x) for x in out))
    return permanent(sub) / norm


def adjoint_matrix(S: Union[ScatteringMatrix, np.ndarray], basis: AlgebraBasis | None = None) -> AdjointMatrix:
    """``C[i, j] = tr(b_j S^dag b_i S)``, computed on the single-photon level."""
    s = _as_matrix(S)
    m = s.shape[0]
    basis = u_basis(m) if basis is None else basis
    b = basis.elements
    conj = np.einsum("ab,ibc,cd->iad", s.conj().T, b, s)
    c = np.einsum("jab,iba->ij", b, conj)
    if np.max(np.abs(c.imag), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(c))):
        raise InvalidArgument("adjoint matrix has a non-negligible imaginary part")
    return AdjointMatrix(m, _frozen(c.real, dtype=float), basis.order)


def _check_modes(m: int, *idx: int) -> None:
    for j in idx:
        if not 1 <= j <= m:
            raise InvalidArgument(f"mode index {j} outside 1..{m}")


def beam_splitter(m: int, j: int, k: int, theta: float, phi: float = 0.0) -> ScatteringMatrix:
    """Beam splitter of angle ``theta`` and phase ``phi`` between modes ``j < k`` (1-based)."""
    _check_modes(m, j, k)
    if not j < k:
        raise InvalidArgument(f"beam splitter needs j < k, got j={j}, k={k}")
    s = np.eye(m, dtype=complex)
    c, t = np.cos(theta), np.sin(theta)
    s[j - 1, j - 1] = c
    s[j - 1, k - 1] = -np.exp(1j * phi) * t
    s[k - 1, j - 1] = np.exp(-1j * phi) * t
    s[k - 1, k - 1] = c
    return ScatteringMatrix(s)


def phase_shifter(m: int, j: int, phi: float) -> ScatteringMatrix:
    """Phase ``exp(i phi)`` on mode ``j`` (1-based)."""
    _check_modes(m, j)
    s = np.eye(m, dtype=complex)
    s[j - 1, j - 1] = np.exp(1j * phi)
    return ScatteringMatrix(s)


def haar_unitary(m: int, seed: Union[int, np.random.Generator, None] = 0) -> ScatteringMatrix:
    """Haar-random ``m x m`` unitary.

    QR of a complex Gaussian matrix with the phases of ``diag(R)`` moved into
    ``Q``. ``seed`` is an int or an explicit ``numpy.random.Generator``.
    """
    if m < 1:
        raise InvalidArgument(f"mode count must be positive, got {m}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    q = q * (d / np.abs(d))
    return ScatteringMatrix(q)


def unitary_from_hamiltonian(h: np.ndarray) -> ScatteringMatrix:
    return ScatteringMatrix(expm(1j * np.asarray(h, dtype=complex)))


def compose(elements: Sequence[ScatteringMatrix], m: int) -> ScatteringMatrix:
    """Circuit of elements applied left to right (first element acts first)."""
    s = np.eye(m, dtype=complex)
    for el in elements:
        if el.modes != m:
            raise InvalidArgument(f"circuit element has {el.modes} modes, expected {m}")
        s = el.entries @ s
    return ScatteringMatrix(s)


def unitary_from_spec(spec: dict, seed: int = 0) -> ScatteringMatrix:
    """Read a unitary from its JSON description.

    Kinds: ``matrix`` (``re``/``im`` nested lists), ``circuit`` (``m`` and a
    list of ``{"bs": {...}}`` / ``{"ps": {...}}`` elements applied left to
    right) and ``haar`` (``m`` and optional ``seed``, defaulting to ``seed``).
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidArgument("a unitary spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "matrix":
        if "re" not in spec:
            raise InvalidArgument("matrix unitary needs 're' (and optionally 'im')")
        re = np.asarray(spec["re"], dtype=float)
        im = np.asarray(spec.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise InvalidArgument(f"'re' shape {re.shape} differs from 'im' shape {im.shape}")
        return ScatteringMatrix(re + 1j * im)
    if kind == "circuit":
        m = int(spec["m"])
        elements = []
        for el in spec.get("elements", []):
            if "bs" in el:
                p = el["bs"]
                elements.append(
                    beam_splitter(m, int(p["j"]), int(p["k"]), float(p.get("theta", np.pi / 4)), float(p.get("phi", 0.0)))
                )
            elif "ps" in el:
                p = el["ps"]
                elements.append(phase_shifter(m, int(p["j"]), float(p["phi"])))
            else:
                raise InvalidArgument(f"unknown circuit element {el!r}")
        return compose(elements, m)
    if kind == "haar":
        return haar_unitary(int(spec["m"]), int(spec.get("seed", seed)))
    raise InvalidArgument(f"unknown unitary kind {kind!r}")


def evolve_state(state: PhotonicState, S: Union[ScatteringMatrix, np.ndarray]) -> PhotonicState:
    """``U rho U^dag`` sector by sector with ``U = phi(S)``."""
    s = _as_matrix(S)
    if s.shape[0] != state.modes:
        raise InvalidArgument(f"unitary has {s.shape[0]} modes, state has {state.modes}")
    blocks = {}
    for n, block in state.blocks.items():
        u = photonic_unitary(s, n)
        mat = u @ np.asarray(block.matrix) @ u.conj().T
        blocks[n] = SectorBlock(block.sector, 0.5 * (mat + mat.conj().T), block.weight)
    return PhotonicState(
        state.modes, blocks, pure=state.pure,
        truncation_deficit=state.truncation_deficit, notes=state.notes,
    )
