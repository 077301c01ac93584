"""Invariants of photonic states under passive linear-optical evolution.

Tuple sums over the algebra basis are evaluated with the completeness
relation ``sum_i (b_i)[a, c] O_i = a_c^dag a_a``: a sum over ``(m**2)**k``
tuples of ``O_i`` weighted by entries or traces of ``b_i`` products becomes a
chain of ``m x m`` arrays of hopping operators. The literal tuple sums are
kept in the test oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Union

import numpy as np

from .errors import ComplexityError, InvalidArgument
from .fock_core import (
    CHAIN_TOL,
    FockSector,
    HermitianOperator,
    PhotonicState,
    SectorBlock,
    fock_sector,
    hermitian_spectrum,
)
from .lie import BASIS_ORDER_NOTE, AlgebraBasis, hopping_operators, image_basis, u_basis

DEFAULT_MAX_TERMS = 10**6
DEFAULT_MAX_DIM = 60
CLUSTER_RTOL = 1e-8
CLUSTER_ATOL = 1e-10

NESTED_SIGN_NOTE = "(-1)^k"
COVARIANCE_NOTE = "orthonormal O basis (1/sqrt(2) factors on x, y generators)"

BlockLike = Union[SectorBlock, PhotonicState]


def _guard(m: int, k: int, max_terms: int) -> int:
    if k < 1:
        raise InvalidArgument(f"order k must be >= 1, got {k}")
    terms = (m * m) ** k
    if terms > max_terms:
        raise ComplexityError(terms, max_terms)
    return terms


def _as_block(block: BlockLike) -> SectorBlock:
    if isinstance(block, SectorBlock):
        return block
    if isinstance(block, PhotonicState):
        if len(block.blocks) != 1:
            raise InvalidArgument(
                f"expected a single-sector state, got sectors {block.sectors}"
            )
        return next(iter(block.blocks.values()))
    raise InvalidArgument(f"expected a SectorBlock, got {type(block).__name__}")


def _hop_chain_ops(m: int, n: int) -> np.ndarray:
    """``T[a, c] = sum_i (b_i)[a, c] O_i = a_c^dag a_a`` on the sector."""
    return hopping_operators(m, n).transpose(1, 0, 2, 3)


@dataclass(frozen=True)
class CoefficientVector:
    """Expectations ``r_i = <O_i>`` summed over sectors, in algebra-basis order."""

    modes: int
    values: np.ndarray
    labels: tuple[str, ...]
    residue: float = 0.0
    basis_order: str = BASIS_ORDER_NOTE


@dataclass(frozen=True)
class TangentData:
    """Coherency matrix ``h_rho = sum_i r_i b_i`` with its spectrum and trace powers."""

    h_rho: np.ndarray
    spectrum: np.ndarray
    trace_invariants: np.ndarray


def coefficient_vector(state: PhotonicState, basis: AlgebraBasis | None = None) -> CoefficientVector:
    m = state.modes
    values = np.zeros(m * m, dtype=complex)
    for n, block in state.blocks.items():
        if n == 0:
            continue
        ops = image_basis(m, n, basis).elements
        values += np.einsum("iab,ba->i", ops, block.matrix)
    labels = (basis or u_basis(m)).labels
    residue = float(np.max(np.abs(values.imag), initial=0.0))
    return CoefficientVector(m, values.real.copy(), labels, residue)


def h_rho(state: PhotonicState, basis: AlgebraBasis | None = None) -> TangentData:
    """Coherency matrix ``sum_i <O_i> b_i``; entry ``(j, k)`` is ``<a_k^dag a_j>``."""
    basis = basis or u_basis(state.modes)
    r = coefficient_vector(state, basis).values
    h = np.einsum("i,iab->ab", r, basis.elements)
    spectrum = hermitian_spectrum(h)
    powers, acc = [], np.eye(state.modes, dtype=complex)
    for _ in range(state.modes):
        acc = acc @ h
        powers.append(np.trace(acc).real)
    return TangentData(h, spectrum, np.array(powers))


def trace_invariants_explicit(
    state: PhotonicState, k: int, *, max_terms: int = DEFAULT_MAX_TERMS
) -> float:
    """``sum over k-tuples of tr(b_i1 ... b_ik) r_i1 ... r_ik`` evaluated term by term."""
    m = state.modes
    _guard(m, k, max_terms)
    b = u_basis(m).elements
    r = coefficient_vector(state).values
    # one row per index tuple: its matrix product and its coefficient product
    prods = b.copy()
    weights = r.astype(complex)
    for _ in range(k - 1):
        prods = np.einsum("Iab,jbc->Ijac", prods, b).reshape(-1, m, m)
        weights = np.einsum("I,j->Ij", weights, r).reshape(-1)
    traces = np.einsum("Iaa->I", prods)
    return float(np.sum(traces * weights).real)


def _vacuum(block: SectorBlock) -> HermitianOperator:
    return HermitianOperator(block.sector, np.zeros_like(block.matrix))


def tangent_coefficient_projection(
    block: BlockLike, basis: AlgebraBasis | None = None
) -> HermitianOperator:
    """``sum_i tr(O_i rho) O_i`` on one sector (not an orthogonal projection)."""
    block = _as_block(block)
    if block.photons == 0:
        return _vacuum(block)
    ops = image_basis(block.sector.modes, block.photons, basis).elements
    r = np.einsum("iab,ba->i", ops, block.matrix).real
    return HermitianOperator(block.sector, np.einsum("i,iab->ab", r, ops))


@lru_cache(maxsize=64)
def tangent_frame(m: int, n: int) -> np.ndarray:
    """Trace-orthonormal Hermitian operators spanning ``dphi(u(m))`` on the sector.

    Obtained as ``G^{-1/2} O`` with ``G[i, j] = tr(O_i O_j)``. Empty at ``n = 0``.
    """
    if n == 0:
        dim = fock_sector(m, 0).dimension
        return np.zeros((0, dim, dim), dtype=complex)
    ops = image_basis(m, n).elements
    gram = np.einsum("iab,jba->ij", ops, ops).real
    vals, vecs = np.linalg.eigh(gram)
    inv_sqrt = vecs @ np.diag(vals ** -0.5) @ vecs.T
    frame = np.einsum("ij,jab->iab", inv_sqrt, ops)
    frame.setflags(write=False)
    return frame


def tangent_orthogonal_projection(block: BlockLike) -> tuple[HermitianOperator, HermitianOperator]:
    """Orthogonal split ``rho = rho_T + rho_perp`` w.r.t. ``span{O_i}``.

    ``rho_T`` solves the Gram system ``G c = r``; ``rho_perp`` is orthogonal to
    every ``O_i`` under the trace inner product. On the vacuum sector
    ``rho_T = 0``.
    """
    block = _as_block(block)
    rho = np.asarray(block.matrix)
    if block.photons == 0:
        return _vacuum(block), HermitianOperator(block.sector, rho)
    frame = tangent_frame(block.sector.modes, block.photons)
    coords = np.einsum("iab,ba->i", frame, rho).real
    rho_t = np.einsum("i,iab->ab", coords, frame)
    return (
        HermitianOperator(block.sector, rho_t),
        HermitianOperator(block.sector, rho - rho_t),
    )


def _chain_products(m: int, n: int, k: int) -> np.ndarray:
    """``X[a, c]`` = sum over index chains a=c0..ck=c of ``T[c0,c1] ... T[c_{k-1},c_k]``."""
    t = _hop_chain_ops(m, n)
    x = t
    for _ in range(k - 1):
        x = np.einsum("acxy,cdyz->adxz", x, t)
    return x


def higher_preimage(
    state: PhotonicState, k: int, *, max_terms: int = DEFAULT_MAX_TERMS
) -> np.ndarray:
    """``sum over k-tuples of tr(O_i1 ... O_ik rho) b_i1 ... b_ik`` (an ``m x m`` matrix)."""
    m = state.modes
    _guard(m, k, max_terms)
    out = np.zeros((m, m), dtype=complex)
    for n, block in state.blocks.items():
        if n == 0:
            continue
        chains = _chain_products(m, n, k)
        out += np.einsum("acxy,yx->ac", chains, block.matrix)
    return out


def higher_traces(state: PhotonicState, k: int, *, max_terms: int = DEFAULT_MAX_TERMS) -> float:
    """``sum over k-tuples of tr(b_i1 ... b_ik) tr(O_i1 ... O_ik rho)``."""
    return float(np.trace(higher_preimage(state, k, max_terms=max_terms)).real)


def _tuple_products(ops: np.ndarray, k: int, max_entries: int = 2**22) -> Iterator[np.ndarray]:
    """Yield the products ``O_i1 ... O_ik`` for all tuples, in lexicographic chunks."""
    d, dim = ops.shape[0], ops.shape[1]
    inner = ops
    inner_k = 1
    while inner_k < k and inner.shape[0] * d * dim * dim <= max_entries:
        inner = np.einsum("Iab,jbc->Ijac", inner, ops).reshape(-1, dim, dim)
        inner_k += 1
    outer_k = k - inner_k
    if outer_k == 0:
        yield inner
        return

    def walk(prefix: np.ndarray, depth: int):
        if depth == outer_k:
            yield prefix @ inner
            return
        for i in range(d):
            yield from walk(prefix @ ops[i], depth + 1)

    yield from walk(np.eye(dim, dtype=complex), 0)


def higher_projection(
    block: BlockLike, k: int, *, max_terms: int = DEFAULT_MAX_TERMS
) -> HermitianOperator:
    """``P_k(rho) = sum over k-tuples of tr(O_I rho) O_I`` with ``O_I = O_i1 ... O_ik``."""
    block = _as_block(block)
    m = block.sector.modes
    _guard(m, k, max_terms)
    if block.photons == 0:
        return _vacuum(block)
    ops = image_basis(m, block.photons).elements
    rho = np.asarray(block.matrix)
    out = np.zeros_like(rho)
    for prods in _tuple_products(ops, k):
        coef = np.einsum("Iab,ba->I", prods, rho)
        out += np.einsum("I,Iab->ab", coef, prods)
    return HermitianOperator(block.sector, out)


def _nested_apply(x: np.ndarray, m: int, n: int, k: int) -> np.ndarray:
    """Apply ``N_k`` to a batch of operators ``x`` of shape ``(B, M, M)``."""
    t = _hop_chain_ops(m, n)
    # y[B, a, c] = [T[a, c], x]
    y = np.einsum("acij,Bjk->Bacik", t, x) - np.einsum("Bij,acjk->Bacik", x, t)
    for _ in range(k - 1):
        # y'[a, d] = sum_c [T[c, d], y[a, c]]
        y = np.einsum("cdij,Bacjk->Badik", t, y) - np.einsum("Bacij,cdjk->Badik", y, t)
    return (-1) ** k * np.einsum("Baaij->Bij", y)


def nested_commutator(
    block: BlockLike, k: int, *, max_terms: int = DEFAULT_MAX_TERMS
) -> HermitianOperator:
    """``N_k(rho) = (-1)^k sum tr(b_i1 ... b_ik) [O_ik, [..., [O_i1, rho]...]]``."""
    block = _as_block(block)
    m = block.sector.modes
    _guard(m, k, max_terms)
    if block.photons == 0:
        return _vacuum(block)
    out = _nested_apply(np.asarray(block.matrix)[None], m, block.photons, k)[0]
    return HermitianOperator(block.sector, out)


def covariance(state: PhotonicState) -> np.ndarray:
    """``M[i, j] = <O_i><O_j> - <(O_i O_j + O_j O_i) / 2>`` with sector-summed moments."""
    m = state.modes
    d = m * m
    mean = np.zeros(d)
    second = np.zeros((d, d))
    for n, block in state.blocks.items():
        if n == 0:
            continue
        ops = image_basis(m, n).elements
        rho = np.asarray(block.matrix)
        mean += np.einsum("iab,ba->i", ops, rho).real
        o_rho = np.einsum("jbc,ca->jba", ops, rho)
        second += np.einsum("iab,jba->ij", ops, o_rho).real
    sym = 0.5 * (second + second.T)
    return np.outer(mean, mean) - sym


@dataclass(frozen=True, eq=False)
class SubspaceDecomposition:
    """Eigenspaces of an Ad-equivariant self-adjoint map on sector operators.

    ``bases[c]`` holds trace-orthonormal Hermitian operators spanning cluster
    ``c`` with eigenvalue ``eigenvalues[c]``.
    """

    sector: FockSector
    kind: str
    order: int
    eigenvalues: tuple[float, ...]
    multiplicities: tuple[int, ...]
    bases: tuple[np.ndarray, ...] = field(repr=False)

    @property
    def dimensions(self) -> tuple[int, ...]:
        return self.multiplicities


_KIND_ALIASES = {
    "p": "P", "projection": "P", "higher_projection": "P",
    "n": "N", "nested": "N", "nested_commutator": "N",
    "tangent": "tangent", "t": "tangent",
}


def normalize_kind(kind: str) -> str:
    try:
        return _KIND_ALIASES[kind.strip().lower()]
    except KeyError:
        raise InvalidArgument(
            f"unknown operator kind {kind!r}; expected P, N or tangent"
        ) from None


def _cluster(values: np.ndarray) -> list[tuple[int, int]]:
    groups, start = [], 0
    for i in range(1, len(values) + 1):
        if i == len(values):
            groups.append((start, i))
            break
        ref = values[start]
        tol = max(CLUSTER_ATOL, CLUSTER_RTOL * max(abs(ref), abs(values[i])))
        if abs(values[i] - ref) > tol:
            groups.append((start, i))
            start = i
    return groups


def superoperator_matrix(
    m: int, n: int, kind: str, k: int = 1, *, max_terms: int = DEFAULT_MAX_TERMS
) -> np.ndarray:
    """Real symmetric matrix ``T[a, b] = tr(e_a T(e_b))`` in the basis ``u_basis(M)``."""
    kind = normalize_kind(kind)
    sector = fock_sector(m, n)
    dim = sector.dimension
    e = u_basis(dim).elements
    e_cols = e.transpose(0, 2, 1).reshape(dim * dim, -1).T  # column a is vec(e_a^T)
    if kind == "tangent":
        frame = tangent_frame(m, n)
        w = frame.reshape(frame.shape[0], -1) @ e_cols
        t = (w.T @ w).real
    elif kind == "P":
        _guard(m, k, max_terms)
        ops = image_basis(m, n).elements
        t = np.zeros((dim * dim, dim * dim), dtype=complex)
        if n > 0:
            for prods in _tuple_products(ops, k):
                w = prods.reshape(prods.shape[0], -1) @ e_cols
                t += w.T @ w
        t = t.real
    else:
        _guard(m, k, max_terms)
        t = np.zeros((dim * dim, dim * dim))
        if n > 0:
            chunk = max(1, int(2**22 // (m * m * dim * dim)))
            e_flat = e.reshape(dim * dim, -1)
            for s in range(0, dim * dim, chunk):
                images = _nested_apply(e[s : s + chunk], m, n, k)
                t[:, s : s + chunk] = (e_flat @ images.transpose(0, 2, 1).reshape(len(images), -1).T).real
    asym = np.max(np.abs(t - t.T), initial=0.0)
    if asym > CHAIN_TOL * max(1.0, np.max(np.abs(t), initial=0.0)):
        raise InvalidArgument(f"{kind}_{k} map is not self-adjoint here (asymmetry {asym:.3e})")
    return 0.5 * (t + t.T)


def equivariant_eigenspaces(
    m: int,
    n: int,
    kind: str,
    k: int = 1,
    *,
    max_dim: int = DEFAULT_MAX_DIM,
    max_terms: int = DEFAULT_MAX_TERMS,
) -> SubspaceDecomposition:
    """Decompose the sector operator space into eigenspaces of ``P_k``, ``N_k`` or the tangent projector.

    Eigenvalues are clustered with relative tolerance 1e-8 (absolute floor
    1e-10), in ascending order.
    """
    kind = normalize_kind(kind)
    sector = fock_sector(m, n)
    dim = sector.dimension
    if dim > max_dim:
        raise ComplexityError(dim, max_dim, what="sector dimensions")
    t = superoperator_matrix(m, n, kind, k, max_terms=max_terms)
    vals, vecs = np.linalg.eigh(t)
    e = u_basis(dim).elements
    eigenvalues, mults, bases = [], [], []
    for lo, hi in _cluster(vals):
        eigenvalues.append(float(np.mean(vals[lo:hi])))
        mults.append(hi - lo)
        basis = np.einsum("ac,axy->cxy", vecs[:, lo:hi], e)
        basis.setflags(write=False)
        bases.append(basis)
    order = 1 if kind == "tangent" else k
    return SubspaceDecomposition(sector, kind, order, tuple(eigenvalues), tuple(mults), tuple(bases))


def subspace_spectra(
    block: BlockLike, decomposition: SubspaceDecomposition
) -> list[tuple[float, np.ndarray]]:
    """Per-cluster projections ``rho^lambda`` of the block and their ascending spectra."""
    block = _as_block(block)
    if block.sector != decomposition.sector:
        raise InvalidArgument(
            f"block lives in sector (m={block.sector.modes}, n={block.photons}), "
            f"decomposition in (m={decomposition.sector.modes}, n={decomposition.sector.photons})"
        )
    rho = np.asarray(block.matrix)
    out = []
    for lam, basis in zip(decomposition.eigenvalues, decomposition.bases):
        out.append((lam, hermitian_spectrum(subspace_projection(rho, basis))))
    return out


def subspace_projection(rho: np.ndarray, basis: np.ndarray) -> np.ndarray:
    coords = np.einsum("iab,ba->i", basis, rho).real
    return np.einsum("i,iab->ab", coords, basis)
