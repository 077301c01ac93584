"""Structured invariant reports and their JSON / text renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import invariants as inv
from .bounds import CONVENTIONS, CompareConfig, validate_family
from .fock_core import PhotonicState, hermitian_spectrum
from .lie import u_basis

DEFAULT_SET = ("tangent", "trace", "covariance")


@dataclass
class InvariantReport:
    kind: str
    m: int
    sectors: list[int]
    values: Any = None
    spectrum: Any = None
    truncation_deficit: float = 0.0
    warnings: list[str] = field(default_factory=list)
    n: int | None = None

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"kind": self.kind, "m": self.m}
        if self.n is not None:
            out["n"] = self.n
        else:
            out["sectors"] = list(self.sectors)
        out["basis_order"] = list(u_basis(self.m).labels)
        out["convention"] = dict(CONVENTIONS)
        if self.spectrum is not None:
            out["spectrum"] = self.spectrum
        if self.values is not None:
            out["values"] = self.values
        out["truncation_deficit"] = self.truncation_deficit
        out["warnings"] = list(self.warnings)
        return out


def _floats(a) -> list:
    return [float(x) + 0.0 for x in np.asarray(a, dtype=float).ravel()]


def _matrix(a) -> list:
    return [_floats(row) for row in np.asarray(a, dtype=float)]


def _complex_matrix(a) -> dict:
    a = np.asarray(a, dtype=complex)
    return {"re": _matrix(a.real), "im": _matrix(a.imag)}


def invariant_reports(
    state: PhotonicState, families: Sequence[str] = DEFAULT_SET, config: CompareConfig | None = None
) -> list[InvariantReport]:
    """Evaluate the requested invariant families on one state."""
    config = config or CompareConfig()
    families = [validate_family(f) for f in families]
    m = state.modes
    common = dict(
        m=m,
        sectors=state.sectors,
        truncation_deficit=state.truncation_deficit,
        warnings=state.warnings(),
    )
    reports = []
    for family in families:
        head, *rest = family.split(":")
        if head == "tangent":
            data = inv.h_rho(state)
            coeffs = inv.coefficient_vector(state)
            reports.append(InvariantReport(
                "tangent", spectrum=_floats(data.spectrum),
                values={"coefficients": _floats(coeffs.values), "h_rho": _complex_matrix(data.h_rho)},
                **common,
            ))
        elif head == "trace":
            data = inv.h_rho(state)
            reports.append(InvariantReport("trace", values=_floats(data.trace_invariants), **common))
        elif head == "covariance":
            cov = inv.covariance(state)
            reports.append(InvariantReport(
                "covariance", spectrum=_floats(np.linalg.eigvalsh(cov)), values=_matrix(cov), **common
            ))
        elif head == "projection":
            for n, block in state.blocks.items():
                t, p = inv.tangent_orthogonal_projection(block)
                reports.append(InvariantReport(
                    "projection", n=n, spectrum={"T": _floats(t.spectrum()), "perp": _floats(p.spectrum())},
                    **common,
                ))
        elif head == "higher":
            k = int(rest[0])
            h = inv.higher_preimage(state, k, max_terms=config.max_terms)
            reports.append(InvariantReport(
                family, spectrum=_floats(hermitian_spectrum(h)),
                values={"trace": float(np.trace(h).real)}, **common,
            ))
            for n, block in state.blocks.items():
                p = inv.higher_projection(block, k, max_terms=config.max_terms)
                reports.append(InvariantReport(f"{family}:P", n=n, spectrum=_floats(p.spectrum()), **common))
        elif head == "nested":
            k = int(rest[0])
            for n, block in state.blocks.items():
                op = inv.nested_commutator(block, k, max_terms=config.max_terms)
                reports.append(InvariantReport(family, n=n, spectrum=_floats(op.spectrum()), **common))
        else:
            kind, k = rest[0], int(rest[1])
            for n, block in state.blocks.items():
                dec = inv.equivariant_eigenspaces(
                    m, n, kind, k, max_dim=config.max_dim, max_terms=config.max_terms
                )
                clusters = [
                    {"lambda": float(lam), "dimension": dim, "spectrum": _floats(spec)}
                    for (lam, spec), dim in zip(inv.subspace_spectra(block, dec), dec.multiplicities)
                ]
                reports.append(InvariantReport(family, n=n, values=clusters, **common))
    return reports


def decomposition_dict(dec: inv.SubspaceDecomposition, with_bases: bool = False) -> dict:
    out = {
        "kind": "decomposition",
        "operator": dec.kind,
        "order": dec.order,
        "m": dec.sector.modes,
        "n": dec.sector.photons,
        "dimension": dec.sector.dimension,
        "clusters": [
            {"lambda": float(lam), "dimension": d}
            for lam, d in zip(dec.eigenvalues, dec.multiplicities)
        ],
        "fock_basis": [list(o) for o in dec.sector.basis],
        "convention": dict(CONVENTIONS),
    }
    if with_bases:
        for cluster, basis in zip(out["clusters"], dec.bases):
            cluster["basis"] = [_complex_matrix(v) for v in basis]
    return out


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _text_lines(obj: Any, prefix: str = "") -> list[str]:
    if isinstance(obj, dict):
        lines = []
        for key, val in obj.items():
            lines += _text_lines(val, f"{prefix}.{key}" if prefix else str(key))
        return lines
    if isinstance(obj, list) and obj and all(isinstance(x, (dict, list)) for x in obj):
        lines = []
        for i, val in enumerate(obj):
            lines += _text_lines(val, f"{prefix}[{i}]")
        return lines
    if isinstance(obj, list):
        return [f"{prefix}\t" + " ".join(_fmt(x) for x in obj)]
    return [f"{prefix}\t{_fmt(obj)}"]


def _fmt(x: Any) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def to_text(obj: Any) -> str:
    """Tab-delimited ``path<TAB>value`` lines, one per leaf."""
    return "\n".join(_text_lines(obj)) + "\n"
