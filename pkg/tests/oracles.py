"""Slow, independent reference implementations used only by the tests.

Nothing here imports the package's operator builders: ladder operators come
from Kronecker products on a truncated Fock space, photonic unitaries from
a permutation-sum permanent, and every invariant from a literal loop over
index tuples.
"""

from __future__ import annotations

from itertools import permutations, product
from math import factorial, prod

import numpy as np
from scipy.linalg import expm, logm


def sector_basis(m, n):
    return sorted((o for o in product(range(n + 1), repeat=m) if sum(o) == n), reverse=True)


def algebra_basis(m):
    def unit(j, k):
        e = np.zeros((m, m), dtype=complex)
        e[j, k] = 1
        return e

    xs, ys, zs = [], [], []
    for j in range(m):
        for k in range(j + 1, m):
            xs.append((unit(j, k) + unit(k, j)) / np.sqrt(2))
            ys.append(1j * (unit(j, k) - unit(k, j)) / np.sqrt(2))
        zs.append(unit(j, j))
    return xs + ys + zs


def full_annihilators(m, levels):
    """``a_j`` on the truncated space ``(C^levels)^{(x) m}``."""
    a = np.diag(np.sqrt(np.arange(1, levels)), 1)
    eye = np.eye(levels)
    out = []
    for j in range(m):
        factors = [a if i == j else eye for i in range(m)]
        op = factors[0]
        for f in factors[1:]:
            op = np.kron(op, f)
        out.append(op)
    return out


def _flat_index(occ, levels):
    idx = 0
    for c in occ:
        idx = idx * levels + c
    return idx


def sector_hopping(m, n):
    """``E[j][k]`` = ``a_j^dag a_k`` restricted to the sector, via the full space."""
    levels = n + 2
    a = full_annihilators(m, levels)
    rows = [_flat_index(o, levels) for o in sector_basis(m, n)]
    sel = np.ix_(rows, rows)
    return [[(a[j].conj().T @ a[k])[sel] for k in range(m)] for j in range(m)]


def dphi(h, n):
    m = h.shape[0]
    e = sector_hopping(m, n)
    return sum(h[j, k] * e[j][k] for j in range(m) for k in range(m))


def image_basis(m, n):
    return [dphi(b, n) for b in algebra_basis(m)]


def permanent(a):
    size = a.shape[0]
    if size == 0:
        return 1.0 + 0j
    return sum(prod(a[i, s[i]] for i in range(size)) for s in permutations(range(size)))


def photonic_unitary(S, n):
    """``<out|U|in> = perm(S[out rows, in cols]) / sqrt(prod out! prod in!)``."""
    m = S.shape[0]
    basis = sector_basis(m, n)
    U = np.zeros((len(basis), len(basis)), dtype=complex)
    for c, inp in enumerate(basis):
        cols = [k for k in range(m) for _ in range(inp[k])]
        for r, out in enumerate(basis):
            rows = [j for j in range(m) for _ in range(out[j])]
            norm = np.sqrt(prod(factorial(x) for x in inp) * prod(factorial(x) for x in out))
            U[r, c] = permanent(S[np.ix_(rows, cols)]) / norm
    return U


def photonic_unitary_expm(S, n):
    h = logm(S) / 1j
    h = (h + h.conj().T) / 2
    return expm(1j * dphi(h, n))


def tr(a):
    return np.trace(a)


def mat_prod(mats):
    out = mats[0]
    for x in mats[1:]:
        out = out @ x
    return out


def coefficients(blocks, m):
    """``r_i = sum_n tr(O_i rho_n)`` for ``blocks = {n: rho_n}``."""
    r = np.zeros(m * m)
    for n, rho in blocks.items():
        for i, o in enumerate(image_basis(m, n)):
            r[i] += tr(o @ rho).real
    return r


def h_rho(blocks, m):
    r = coefficients(blocks, m)
    return sum(ri * b for ri, b in zip(r, algebra_basis(m)))


def trace_invariant(blocks, m, k):
    r = coefficients(blocks, m)
    b = algebra_basis(m)
    total = 0.0
    for idx in product(range(m * m), repeat=k):
        total += tr(mat_prod([b[i] for i in idx])).real * prod(r[i] for i in idx)
    return total


def higher_preimage(blocks, m, k):
    b = algebra_basis(m)
    out = np.zeros((m, m), dtype=complex)
    for n, rho in blocks.items():
        ops = image_basis(m, n)
        for idx in product(range(m * m), repeat=k):
            out += tr(mat_prod([ops[i] for i in idx]) @ rho) * mat_prod([b[i] for i in idx])
    return out


def higher_traces(blocks, m, k):
    return np.trace(higher_preimage(blocks, m, k)).real


def higher_projection(rho, m, n, k):
    ops = image_basis(m, n)
    out = np.zeros_like(rho, dtype=complex)
    for idx in product(range(m * m), repeat=k):
        chain = mat_prod([ops[i] for i in idx])
        out += tr(chain @ rho) * chain
    return out


def nested_commutator(rho, m, n, k):
    b = algebra_basis(m)
    ops = image_basis(m, n)
    out = np.zeros_like(rho, dtype=complex)
    for idx in product(range(m * m), repeat=k):
        weight = tr(mat_prod([b[i] for i in idx]))
        if abs(weight) < 1e-15:
            continue
        x = rho
        for i in idx:
            x = ops[i] @ x - x @ ops[i]
        out += weight * x
    return (-1) ** k * out


def covariance(blocks, m):
    d = m * m
    mean = np.zeros(d)
    second = np.zeros((d, d))
    for n, rho in blocks.items():
        ops = image_basis(m, n)
        for i in range(d):
            mean[i] += tr(ops[i] @ rho).real
            for j in range(d):
                second[i, j] += tr((ops[i] @ ops[j] + ops[j] @ ops[i]) @ rho).real / 2
    return np.outer(mean, mean) - second


def orthogonal_tangent(rho, m, n):
    """Least-squares projection of ``rho`` onto span{O_i} in the trace inner product."""
    ops = image_basis(m, n)
    A = np.stack([o.reshape(-1) for o in ops], axis=1)
    coef, *_ = np.linalg.lstsq(A, rho.reshape(-1), rcond=None)
    t = (A @ coef).reshape(rho.shape)
    return t, rho - t


def full_space_moments(psi, m, levels):
    """Mean vector and covariance of the ``O_i`` for a full-space ket ``psi``."""
    a = full_annihilators(m, levels)
    ops = []
    for b in algebra_basis(m):
        ops.append(sum(b[j, k] * a[j].conj().T @ a[k] for j in range(m) for k in range(m)))
    d = m * m
    mean = np.array([np.vdot(psi, o @ psi).real for o in ops])
    second = np.array(
        [[np.vdot(psi, (ops[i] @ ops[j] + ops[j] @ ops[i]) @ psi).real / 2 for j in range(d)] for i in range(d)]
    )
    return mean, np.outer(mean, mean) - second


def photon_added_ket(beta, k2, levels):
    """``a_1^dag |beta> |k2>`` normalized, on two truncated modes."""
    ns = np.arange(levels)
    log_fact = np.array([sum(np.log(np.arange(1, j + 1))) for j in ns])
    coh = np.exp(-abs(beta) ** 2 / 2 - log_fact / 2) * np.power(complex(beta), ns)
    a = np.diag(np.sqrt(np.arange(1, levels)), 1)
    first = a.conj().T @ coh
    second = np.zeros(levels)
    second[k2] = 1
    psi = np.kron(first, second)
    return psi / np.linalg.norm(psi)


def random_density(dim, rng, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(dim, rng):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_hermitian(dim, rng):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2
