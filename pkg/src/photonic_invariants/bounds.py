"""Distances between invariant spectra, heralded success bounds, feasibility verdicts.

Passive evolution is block diagonal in photon number, so every spectral
comparison is made sector by sector and per-sector squared distances add.
A sector present in only one state is compared against zeros.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import invariants as inv
from .errors import InvalidArgument, PreconditionError
from .fock_core import PhotonicState, SectorBlock, fock_sector, hermitian_spectrum
from .lie import BASIS_ORDER_NOTE, BEAM_SPLITTER_CONVENTION, PHI_CONVENTION

DEFAULT_TOL = 1e-8
CHAIN_SLACK = 1e-10

VERDICT_IMPOSSIBLE = "impossible"
VERDICT_UNDECIDED = "undecided"

DEFAULT_FAMILIES = ("tangent", "trace", "covariance", "projection")

CONVENTIONS = {
    "basis_order": BASIS_ORDER_NOTE,
    "fock_order": "descending lexicographic occupations",
    "phi": PHI_CONVENTION,
    "beam_splitter": BEAM_SPLITTER_CONVENTION,
    "nested_sign": inv.NESTED_SIGN_NOTE,
    "covariance": inv.COVARIANCE_NOTE,
    "cross_sector": "dephased in total photon number",
    "tangent_projection": "orthogonal (Gram-corrected) for projection spectra and distances",
}


def _pad(a: np.ndarray, length: int) -> np.ndarray:
    return np.sort(np.concatenate([a, np.zeros(length - len(a))]))


def spectral_distance(a: Sequence[float], b: Sequence[float]) -> float:
    """l2 distance between two spectra after ascending sort; the shorter is zero-padded."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    size = max(len(a), len(b))
    return float(np.linalg.norm(_pad(a, size) - _pad(b, size)))


def _sector_blocks(rho: PhotonicState, sigma: PhotonicState) -> Iterable[tuple[int, SectorBlock | None, SectorBlock | None]]:
    for n in sorted(set(rho.blocks) | set(sigma.blocks)):
        yield n, rho.blocks.get(n), sigma.blocks.get(n)


def _split_spectra(block: SectorBlock | None, m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    if block is None:
        dim = fock_sector(m, n).dimension
        return np.zeros(dim), np.zeros(dim)
    t, perp = inv.tangent_orthogonal_projection(block)
    return t.spectrum(), perp.spectrum()


@dataclass
class SectorDistance:
    photons: int
    d_T: float
    d_perp: float


def _check_modes(rho: PhotonicState, sigma: PhotonicState) -> int:
    if rho.modes != sigma.modes:
        raise InvalidArgument(f"mode mismatch: {rho.modes} vs {sigma.modes}")
    return rho.modes


def sector_distances(rho: PhotonicState, sigma: PhotonicState) -> list[SectorDistance]:
    m = _check_modes(rho, sigma)
    out = []
    for n, a, b in _sector_blocks(rho, sigma):
        ta, pa = _split_spectra(a, m, n)
        tb, pb = _split_spectra(b, m, n)
        out.append(SectorDistance(n, spectral_distance(ta, tb), spectral_distance(pa, pb)))
    return out


def tangent_distances(rho: PhotonicState, sigma: PhotonicState) -> tuple[float, float]:
    """``(d_T, d_perp)`` with per-sector squared distances summed."""
    parts = sector_distances(rho, sigma)
    d_t = float(np.sqrt(sum(p.d_T**2 for p in parts)))
    d_perp = float(np.sqrt(sum(p.d_perp**2 for p in parts)))
    return d_t, d_perp


@dataclass
class BoundReport:
    d_T: float
    d_perp: float
    p_max: float
    sectors: list[SectorDistance]
    conventions: dict = field(default_factory=lambda: dict(CONVENTIONS))

    def to_dict(self) -> dict:
        return {
            "kind": "heralded_bound",
            "d_T": self.d_T,
            "d_perp": self.d_perp,
            "p_max": self.p_max,
            "sectors": [
                {"n": s.photons, "d_T": s.d_T, "d_perp": s.d_perp} for s in self.sectors
            ],
            "convention": self.conventions,
        }


def heralded_bound(inp: PhotonicState, target: PhotonicState) -> BoundReport:
    """Upper bound ``1 - (d_T**2 + d_perp**2) / 2`` on heralded success probability.

    Both states must be pure: the bound rests on ``||rho' - sigma||_2**2 =
    2 (1 - p)``, which holds for pure states only. Ancilla and herald modes
    are expected to be included in ``inp`` and ``target``.
    """
    _check_modes(inp, target)
    for name, state in (("input", inp), ("target", target)):
        if not state.pure:
            raise PreconditionError(f"{name} state must be pure for the heralded bound")
    parts = sector_distances(inp, target)
    d_t = float(np.sqrt(sum(p.d_T**2 for p in parts)))
    d_perp = float(np.sqrt(sum(p.d_perp**2 for p in parts)))
    p_max = float(np.clip(1.0 - (d_t**2 + d_perp**2) / 2.0, 0.0, 1.0))
    return BoundReport(d_t, d_perp, p_max, parts)


def norm_chain(rho_a: SectorBlock, rho_b: SectorBlock) -> tuple[float, float, float]:
    """``(hw, frobenius, trace_norm)``; always ``hw <= frobenius <= trace_norm``.

    ``hw`` is the spectral distance of the orthogonal tangent projections.
    """
    rho_a, rho_b = inv._as_block(rho_a), inv._as_block(rho_b)
    if rho_a.sector != rho_b.sector:
        raise InvalidArgument("blocks live in different sectors")
    ta, _ = inv.tangent_orthogonal_projection(rho_a)
    tb, _ = inv.tangent_orthogonal_projection(rho_b)
    hw = spectral_distance(ta.spectrum(), tb.spectrum())
    diff = np.asarray(rho_a.matrix) - np.asarray(rho_b.matrix)
    frob = float(np.linalg.norm(diff, "fro"))
    trace_norm = float(np.sum(np.abs(hermitian_spectrum(diff))))
    return hw, frob, trace_norm


@dataclass
class Check:
    invariant: str
    deviation: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "invariant": self.invariant,
            "deviation": self.deviation,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class CompareConfig:
    families: tuple[str, ...] = DEFAULT_FAMILIES
    tol: float = DEFAULT_TOL
    max_terms: int = inv.DEFAULT_MAX_TERMS
    max_dim: int = inv.DEFAULT_MAX_DIM

    def __post_init__(self):
        if not self.tol > 0:
            raise InvalidArgument(f"tolerance must be positive, got {self.tol}")
        self.families = tuple(validate_family(f) for f in self.families)

    def to_dict(self) -> dict:
        return {
            "families": list(self.families),
            "tol": self.tol,
            "max_terms": self.max_terms,
            "max_dim": self.max_dim,
        }


@dataclass
class FeasibilityReport:
    verdict: str
    checks: list[Check]
    config: CompareConfig
    effective_tol: float
    warnings: list[str] = field(default_factory=list)

    @property
    def impossible(self) -> bool:
        return self.verdict == VERDICT_IMPOSSIBLE

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "kind": "feasibility",
            "verdict": self.verdict,
            "checks": [c.to_dict() for c in self.checks],
            "config": self.config.to_dict(),
            "effective_tol": self.effective_tol,
            "convention": dict(CONVENTIONS),
            "warnings": list(self.warnings),
        }


def validate_family(name: str) -> str:
    """Canonical form of an invariant-family name, or ``InvalidArgument``.

    Accepted: ``tangent``, ``trace``, ``covariance``, ``projection``,
    ``higher:k``, ``nested:k``, ``subspaces:kind:k``.
    """
    parts = name.strip().split(":")
    head = parts[0].lower()
    if head in ("tangent", "trace", "covariance", "projection") and len(parts) == 1:
        return head
    try:
        if head in ("higher", "nested") and len(parts) == 2:
            k = int(parts[1])
            if k >= 1:
                return f"{head}:{k}"
        if head == "subspaces" and len(parts) == 3:
            kind = inv.normalize_kind(parts[1])
            k = int(parts[2])
            if k >= 1:
                return f"subspaces:{kind}:{k}"
    except ValueError:
        pass
    raise InvalidArgument(
        f"unknown invariant {name!r}; expected tangent, trace, covariance, projection, "
        "higher:k, nested:k or subspaces:kind:k"
    )


def _per_sector(
    state: PhotonicState, sectors: Sequence[int], fn: Callable[[SectorBlock], np.ndarray]
) -> dict[int, np.ndarray]:
    out = {}
    for n in sectors:
        if n in state.blocks:
            out[n] = np.asarray(fn(state.blocks[n]), dtype=float)
        else:
            out[n] = np.zeros(fock_sector(state.modes, n).dimension)
    return out


def family_values(
    family: str, state: PhotonicState, sectors: Sequence[int], config: CompareConfig
) -> list[tuple[str, np.ndarray]]:
    """Named value arrays for one invariant family, sectors given explicitly."""
    family = validate_family(family)
    head, *rest = family.split(":")
    if head == "tangent":
        return [("tangent", inv.h_rho(state).spectrum)]
    if head == "trace":
        return [("trace", inv.h_rho(state).trace_invariants)]
    if head == "covariance":
        return [("covariance", np.linalg.eigvalsh(inv.covariance(state)))]
    if head == "projection":
        out = []
        for n in sectors:
            t, p = _split_spectra(state.blocks.get(n), state.modes, n)
            out += [(f"projection[n={n}]:T", t), (f"projection[n={n}]:perp", p)]
        return out
    if head == "higher":
        k = int(rest[0])
        h = inv.higher_preimage(state, k, max_terms=config.max_terms)
        out = [
            (f"higher:{k}:preimage", hermitian_spectrum(h)),
            (f"higher:{k}:trace", np.array([np.trace(h).real])),
        ]
        spectra = _per_sector(
            state, sectors,
            lambda b: inv.higher_projection(b, k, max_terms=config.max_terms).spectrum(),
        )
        out += [(f"higher:{k}:P[n={n}]", s) for n, s in spectra.items()]
        return out
    if head == "nested":
        k = int(rest[0])
        spectra = _per_sector(
            state, sectors,
            lambda b: inv.nested_commutator(b, k, max_terms=config.max_terms).spectrum(),
        )
        return [(f"nested:{k}[n={n}]", s) for n, s in spectra.items()]
    kind, k = rest[0], int(rest[1])
    out = []
    for n in sectors:
        dec = inv.equivariant_eigenspaces(
            state.modes, n, kind, k, max_dim=config.max_dim, max_terms=config.max_terms
        )
        if n in state.blocks:
            spectra = inv.subspace_spectra(state.blocks[n], dec)
        else:
            spectra = [(lam, np.zeros(dec.sector.dimension)) for lam in dec.eigenvalues]
        for c, (lam, spec) in enumerate(spectra):
            out.append((f"subspaces:{kind}:{k}[n={n}][cluster {c}, lambda={lam:.6g}]", spec))
    return out


def _deviation(a: np.ndarray, b: np.ndarray) -> float:
    size = max(len(a), len(b))
    if size == 0:
        return 0.0
    return float(np.max(np.abs(_pad(np.asarray(a, float), size) - _pad(np.asarray(b, float), size))))


def compare(
    rho_a: PhotonicState, rho_b: PhotonicState, config: CompareConfig | None = None
) -> FeasibilityReport:
    """Necessary-condition test for passive preparation of ``rho_b`` from ``rho_a``.

    The verdict is ``impossible`` iff some selected invariant differs beyond
    tolerance, ``undecided`` otherwise. With a truncation deficit present the
    tolerance is widened by ``(deficit_a + deficit_b) * (1 + n_max)**2``,
    a bound on the tail's contribution to moments up to second order.
    """
    config = config or CompareConfig()
    _check_modes(rho_a, rho_b)
    warnings = rho_a.warnings() + rho_b.warnings()
    deficit = rho_a.truncation_deficit + rho_b.truncation_deficit
    n_max = max(rho_a.max_photons, rho_b.max_photons)
    tol = config.tol + deficit * (1 + n_max) ** 2
    if deficit > 0 and rho_a.max_photons != rho_b.max_photons:
        warnings.append(
            f"states truncated at different photon numbers ({rho_a.max_photons} vs "
            f"{rho_b.max_photons}); tolerance widened to {tol:.3e}"
        )
    sectors = sorted(set(rho_a.blocks) | set(rho_b.blocks))
    checks = []
    for family in config.families:
        va = family_values(family, rho_a, sectors, config)
        vb = family_values(family, rho_b, sectors, config)
        for (name, a), (_, b) in zip(va, vb):
            dev = _deviation(a, b)
            checks.append(Check(name, dev, tol, dev <= tol))
    verdict = VERDICT_IMPOSSIBLE if any(not c.passed for c in checks) else VERDICT_UNDECIDED
    return FeasibilityReport(verdict, checks, config, tol, warnings)
