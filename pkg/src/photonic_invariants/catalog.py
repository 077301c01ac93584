"""Named constructors for the state families used in the worked examples."""

from __future__ import annotations

import warnings
from math import factorial, lgamma, log
from typing import Sequence

import numpy as np
from scipy.stats import poisson

from .errors import InvalidArgument
from .fock_core import (
    DEPHASED_NOTE,
    PhotonicState,
    SectorBlock,
    fock_sector,
    make_mixed,
    make_pure,
    state_from_blocks,
)

POISSON_TAIL = 1e-10
MAX_CUTOFF = 40
DEFICIT_WARN = 0.1


def fock(occupations: Sequence[int]) -> PhotonicState:
    """The Fock state ``|k_1 ... k_m>``."""
    occ = tuple(int(c) for c in occupations)
    if not occ:
        raise InvalidArgument("a Fock state needs at least one mode")
    return make_pure([(1.0, occ)], len(occ))


def superposition(terms: Sequence[tuple[complex, Sequence[int]]], m: int) -> PhotonicState:
    return make_pure(terms, m)


def noon(N: int) -> PhotonicState:
    """``(|N0> + |0N>) / sqrt(2)``; for ``N = 1`` this is ``(|10> + |01>) / sqrt(2)``."""
    if N < 1:
        raise InvalidArgument(f"NOON state needs N >= 1, got {N}")
    return make_pure([(1.0, (N, 0)), (1.0, (0, N))], 2)


def gamma(beta: complex) -> float:
    """Mean photon number of the photon-added coherent state ``a^dag|beta>``."""
    x = abs(beta) ** 2
    return (x * x + 3 * x + 1) / (1 + x)


def default_cutoff(mean: float, tail: float = POISSON_TAIL, cap: int = MAX_CUTOFF) -> int:
    """Smallest cutoff whose Poisson(mean) tail is below ``tail``, capped at ``cap``."""
    if mean == 0:
        return 0
    c = 0
    while poisson.sf(c, mean) >= tail and c < cap:
        c += 1
    return c


def _warn_deficit(deficit: float) -> None:
    if deficit > DEFICIT_WARN:
        warnings.warn(f"truncation deficit {deficit:.3g} exceeds {DEFICIT_WARN}", stacklevel=3)


def coherent(alphas: Sequence[complex], cutoff: int | None = None) -> PhotonicState:
    """Product of coherent states ``|alpha_1> ... |alpha_m>`` truncated at ``cutoff`` photons.

    Sector ``n`` carries weight Poisson(n; sum |alpha_j|^2) and the normalized
    amplitudes ``prod alpha_j^{n_j} / sqrt(n_j!)``.
    """
    alphas = np.asarray(alphas, dtype=complex)
    m = len(alphas)
    if m == 0:
        raise InvalidArgument("need at least one amplitude")
    mean = float(np.sum(np.abs(alphas) ** 2))
    if cutoff is None:
        cutoff = default_cutoff(mean)
    if cutoff < 0 or (mean > 0 and cutoff < 1):
        raise InvalidArgument(f"cutoff must be >= 1, got {cutoff}")
    matrices = {}
    for n in range(cutoff + 1):
        weight = poisson.pmf(n, mean) if mean > 0 else float(n == 0)
        if weight == 0.0:
            continue
        sector = fock_sector(m, n)
        vec = np.array(
            [np.prod([alphas[j] ** c / np.sqrt(factorial(c)) for j, c in enumerate(occ)])
             for occ in sector.basis],
            dtype=complex,
        )
        vec /= np.linalg.norm(vec)
        matrices[n] = weight * np.outer(vec, vec.conj())
    deficit = float(poisson.sf(cutoff, mean)) if mean > 0 else 0.0
    _warn_deficit(deficit)
    return _assemble(m, matrices, deficit)


def _assemble(m: int, matrices: dict[int, np.ndarray], deficit: float) -> PhotonicState:
    total = sum(np.trace(a).real for a in matrices.values())
    # rescale away rounding drift between pmf sums and the survival function
    scale = (1.0 - deficit) / total
    matrices = {n: a * scale for n, a in matrices.items()}
    notes = (DEPHASED_NOTE,) if len(matrices) > 1 else ()
    return state_from_blocks(m, matrices, truncation_deficit=deficit, notes=notes)


def _photon_added_weights(x: float, js: np.ndarray) -> np.ndarray:
    # P(j) = e^{-x} x^j (j + 1) / (j! (1 + x)), computed in log space
    if x == 0:
        return (js == 0).astype(float)
    logs = np.array([-x + j * log(x) - lgamma(j + 1) for j in js])
    return np.exp(logs) * (js + 1) / (1 + x)


def _photon_added_tail(x: float, last: int) -> float:
    # sum_{j > last} (j + 1) Pois(j; x) / (1 + x) = (x sf(last - 1) + sf(last)) / (1 + x)
    if x == 0:
        return 0.0
    return float((x * poisson.sf(last - 1, x) + poisson.sf(last, x)) / (1 + x))


def photon_added_coherent(beta: complex, k2: int = 0, cutoff: int | None = None) -> PhotonicState:
    """``a_1^dag |beta> |k2> / sqrt(1 + |beta|^2)`` on two modes.

    ``cutoff`` bounds the total photon number; it must be at least ``k2 + 1``.
    """
    beta = complex(beta)
    x = abs(beta) ** 2
    k2 = int(k2)
    if k2 < 0:
        raise InvalidArgument(f"mode-2 occupation must be >= 0, got {k2}")
    if cutoff is None:
        last = 0
        while _photon_added_tail(x, last) >= POISSON_TAIL and last + k2 + 1 < MAX_CUTOFF:
            last += 1
        cutoff = last + k2 + 1
    if cutoff < k2 + 1:
        raise InvalidArgument(f"cutoff must be >= k2 + 1 = {k2 + 1}, got {cutoff}")
    last = cutoff - k2 - 1
    js = np.arange(last + 1)
    weights = _photon_added_weights(x, js)
    matrices = {}
    for j, w in zip(js, weights):
        if w == 0.0:
            continue
        occ = (int(j) + 1, k2)
        n = sum(occ)
        sector = fock_sector(2, n)
        vec = np.zeros(sector.dimension, dtype=complex)
        # amplitude phase beta^j; magnitude carried by the weight
        vec[sector.index(occ)] = np.exp(1j * np.angle(beta) * j) if j else 1.0
        matrices[n] = w * np.outer(vec, vec.conj())
    deficit = _photon_added_tail(x, last)
    _warn_deficit(deficit)
    return _assemble(2, matrices, deficit)


def product(first: PhotonicState, second: PhotonicState) -> PhotonicState:
    """Tensor product over concatenated modes.

    Sector ``n`` of the result collects all pairs ``(n1, n2)`` with
    ``n1 + n2 = n``. Coherences between different pairs are dropped, which is
    exact whenever either factor occupies a single sector.
    """
    m1, m2 = first.modes, second.modes
    m = m1 + m2
    matrices: dict[int, np.ndarray] = {}
    for n1, b1 in first.blocks.items():
        for n2, b2 in second.blocks.items():
            n = n1 + n2
            sector = fock_sector(m, n)
            idx = [
                sector.index(o1 + o2)
                for o1 in b1.sector.basis
                for o2 in b2.sector.basis
            ]
            mat = matrices.setdefault(n, np.zeros((sector.dimension,) * 2, dtype=complex))
            mat[np.ix_(idx, idx)] += np.kron(b1.matrix, b2.matrix)
    deficit = 1.0 - (1.0 - first.truncation_deficit) * (1.0 - second.truncation_deficit)
    single = first.pure and second.pure
    notes = tuple(sorted(set(first.notes) | set(second.notes)))
    if len(matrices) > 1 and DEPHASED_NOTE not in notes:
        notes += (DEPHASED_NOTE,)
    return state_from_blocks(m, matrices, truncation_deficit=deficit, pure=single, notes=notes)


def mixed(components: Sequence[tuple[float, PhotonicState]]) -> PhotonicState:
    return make_mixed(components)


def _complex(obj) -> complex:
    if isinstance(obj, dict):
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        return complex(float(obj[0]), float(obj[1]))
    raise InvalidArgument(f"cannot read a complex number from {obj!r}")


def _require(spec: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in spec]
    if missing:
        raise InvalidArgument(f"state spec of kind {spec.get('kind')!r} is missing {missing}")


def from_spec(spec: dict) -> PhotonicState:
    """Build a state from its JSON description (see README for the schema)."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidArgument("a state spec must be an object with a 'kind' field")
    kind = spec["kind"]
    if kind == "fock":
        _require(spec, "occupations")
        return fock(spec["occupations"])
    if kind == "superposition":
        _require(spec, "m", "terms")
        terms = [(_complex(t), t["occupations"]) for t in spec["terms"]]
        return superposition(terms, int(spec["m"]))
    if kind == "noon":
        _require(spec, "N")
        return noon(int(spec["N"]))
    if kind == "coherent":
        _require(spec, "alphas")
        return coherent([_complex(a) for a in spec["alphas"]], spec.get("cutoff"))
    if kind == "photon_added_coherent":
        _require(spec, "beta")
        return photon_added_coherent(_complex(spec["beta"]), int(spec.get("k2", 0)), spec.get("cutoff"))
    if kind == "mixed":
        _require(spec, "components")
        return mixed([(float(c["weight"]), from_spec(c["state"])) for c in spec["components"]])
    if kind == "product":
        _require(spec, "factors")
        factors = [from_spec(f) for f in spec["factors"]]
        if not factors:
            raise InvalidArgument("product needs at least one factor")
        out = factors[0]
        for f in factors[1:]:
            out = product(out, f)
        return out
    if kind == "blocks":
        _require(spec, "m", "blocks")
        matrices = {
            int(b["n"]): np.asarray(b["re"], dtype=float) + 1j * np.asarray(b.get("im", 0.0), dtype=float)
            for b in spec["blocks"]
        }
        return state_from_blocks(
            int(spec["m"]),
            matrices,
            truncation_deficit=float(spec.get("truncation_deficit", 0.0)),
            pure=spec.get("pure"),
            notes=tuple(spec.get("notes", ())),
        )
    raise InvalidArgument(f"unknown state kind {kind!r}")


def to_spec(state: PhotonicState) -> dict:
    """Lossless JSON description of any state, using the ``blocks`` kind."""
    return {
        "kind": "blocks",
        "m": state.modes,
        "pure": state.pure,
        "truncation_deficit": state.truncation_deficit,
        "notes": list(state.notes),
        "blocks": [
            {
                "n": n,
                "re": np.asarray(b.matrix).real.tolist(),
                "im": np.asarray(b.matrix).imag.tolist(),
            }
            for n, b in state.blocks.items()
        ],
    }
