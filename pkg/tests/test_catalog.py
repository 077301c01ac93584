import json

import numpy as np
import pytest
from scipy.stats import poisson

import oracles
from photonic_invariants import catalog
from photonic_invariants.errors import InvalidArgument
from photonic_invariants.invariants import coefficient_vector, covariance, h_rho


def test_fock_states():
    s = catalog.fock([1, 1])
    assert s.pure and s.sectors == [2]
    s = catalog.fock([3, 0, 0])
    assert s.modes == 3 and s.block(3).matrix[0, 0] == pytest.approx(1)
    vac = catalog.fock([0, 0, 0])
    assert vac.sectors == [0] and np.allclose(vac.block(0).matrix, [[1]])


def test_noon():
    one = catalog.noon(1).block(1).matrix
    assert np.allclose(one, 0.5 * np.ones((2, 2)))
    two = catalog.noon(2).block(2).matrix
    assert np.allclose(two, 0.5 * np.array([[1, 0, 1], [0, 0, 0], [1, 0, 1]]))
    for N in (1, 2, 5):
        assert np.trace(catalog.noon(N).block(N).matrix).real == pytest.approx(1, abs=1e-12)
    with pytest.raises(InvalidArgument):
        catalog.noon(0)


def test_coherent_vacuum():
    s = catalog.coherent([0, 0], cutoff=5)
    assert s.sectors == [0] and s.truncation_deficit == 0


def test_coherent_invariants():
    s = catalog.coherent([1, 1], cutoff=20)
    I = h_rho(s).trace_invariants
    assert I[0] == pytest.approx(2, abs=1e-8)
    assert I[1] == pytest.approx(4, abs=1e-7)
    assert s.truncation_deficit == pytest.approx(poisson.sf(20, 2.0), rel=1e-12)
    total = sum(b.weight for b in s.blocks.values()) + s.truncation_deficit
    assert total == pytest.approx(1, abs=1e-12)


def test_coherent_block_amplitudes():
    a, b = 0.8, 0.3j
    s = catalog.coherent([a, b], cutoff=4)
    block = s.block(2).matrix
    vec = np.array([a**2 / np.sqrt(2), a * b, b**2 / np.sqrt(2)])
    vec /= np.linalg.norm(vec)
    assert np.allclose(block / np.trace(block), np.outer(vec, vec.conj()))
    assert np.trace(block).real == pytest.approx(poisson.pmf(2, abs(a) ** 2 + abs(b) ** 2), rel=1e-12)


def test_coherent_warns_on_large_deficit():
    with pytest.warns(UserWarning, match="truncation deficit"):
        s = catalog.coherent([2.0], cutoff=2)
    assert s.truncation_deficit > 0.1
    assert s.warnings()


def test_coherent_cutoff_errors():
    with pytest.raises(InvalidArgument):
        catalog.coherent([1.0], cutoff=0)
    with pytest.raises(InvalidArgument):
        catalog.coherent([])


@pytest.mark.filterwarnings("ignore:truncation deficit")
def test_coherent_convergence_is_monotone():
    for a, b in [(1.0, 0.5), (1.5, 1.5), (0.3, 1.2)]:
        errs = [abs(h_rho(catalog.coherent([a, b], cutoff=c)).trace_invariants[0] - (a * a + b * b))
                for c in range(1, 16)]
        assert all(x >= y - 1e-15 for x, y in zip(errs, errs[1:]))


def test_default_cutoff():
    c = catalog.default_cutoff(1.25)
    assert poisson.sf(c, 1.25) < 1e-10 <= poisson.sf(c - 1, 1.25)
    assert catalog.default_cutoff(1000.0) == catalog.MAX_CUTOFF


def test_gamma():
    assert catalog.gamma(0) == 1
    assert catalog.gamma(1) == pytest.approx(2.5)
    assert catalog.gamma(1j) == pytest.approx(2.5)


@pytest.mark.parametrize("k2", [0, 1, 3])
def test_photon_added_at_zero_is_fock(k2):
    s = catalog.photon_added_coherent(0, k2)
    ref = catalog.fock([1, k2])
    assert s.sectors == ref.sectors
    assert np.array_equal(s.block(1 + k2).matrix, ref.block(1 + k2).matrix)
    assert s.truncation_deficit == 0


@pytest.mark.parametrize("beta", [0.5, 1.0, 1.5, 0.6 - 0.8j])
def test_photon_added_mean_is_gamma(beta):
    s = catalog.photon_added_coherent(beta, 0, cutoff=30)
    assert coefficient_vector(s).values[2] == pytest.approx(catalog.gamma(beta), abs=1e-8)


@pytest.mark.parametrize("beta,k2", [(0.5, 0), (1.0, 1), (1.5, 0), (0.7j, 2)])
def test_photon_added_covariance(beta, k2):
    s = catalog.photon_added_coherent(beta, k2, cutoff=30)
    cov = covariance(s)
    levels = 24
    _, ref = oracles.full_space_moments(oracles.photon_added_ket(beta, k2, levels), 2, levels)
    assert np.allclose(cov, ref, atol=1e-8)
    x = abs(beta) ** 2
    g = catalog.gamma(beta)
    var_n1 = x * (x * x + 2 * x + 2) / (1 + x) ** 2
    expected = np.diag([-(g + k2 * (2 * g + 1)) / 2] * 2 + [-var_n1, 0.0])
    assert np.allclose(cov, expected, atol=1e-8)


def test_photon_added_cutoff_error():
    with pytest.raises(InvalidArgument):
        catalog.photon_added_coherent(1.0, 2, cutoff=2)


def test_product_of_fock_states():
    s = catalog.product(catalog.fock([1]), catalog.fock([0, 2]))
    ref = catalog.fock([1, 0, 2])
    assert s.pure and np.allclose(s.block(3).matrix, ref.block(3).matrix)


def test_product_with_coherent_factor():
    s = catalog.product(catalog.coherent([1.0], cutoff=20), catalog.fock([1]))
    assert coefficient_vector(s).values[2:] == pytest.approx([1.0, 1.0], abs=1e-8)
    assert not s.pure


def test_mixed():
    s = catalog.mixed([(0.5, catalog.fock([2, 0])), (0.5, catalog.fock([0, 2]))])
    assert np.allclose(s.block(2).matrix, np.diag([0.5, 0, 0.5]))


JSON_EXAMPLES = [
    '{"kind":"fock","occupations":[1,1]}',
    '{"kind":"superposition","m":2,"terms":[{"re":0.7071,"im":0,"occupations":[2,0]},'
    '{"re":-0.7071,"im":0,"occupations":[0,2]}]}',
    '{"kind":"noon","N":3}',
    '{"kind":"coherent","alphas":[{"re":1,"im":0},{"re":0.5,"im":0}],"cutoff":20}',
    '{"kind":"photon_added_coherent","beta":{"re":1,"im":0},"k2":0,"cutoff":25}',
    '{"kind":"mixed","components":[{"weight":0.5,"state":{"kind":"fock","occupations":[2,0]}},'
    '{"weight":0.5,"state":{"kind":"fock","occupations":[0,2]}}]}',
    '{"kind":"product","factors":[{"kind":"fock","occupations":[1]},{"kind":"noon","N":1}]}',
]


@pytest.mark.parametrize("text", JSON_EXAMPLES)
def test_json_round_trip(text):
    state = catalog.from_spec(json.loads(text))
    again = catalog.from_spec(json.loads(json.dumps(catalog.to_spec(state))))
    assert again.modes == state.modes and again.sectors == state.sectors
    assert again.pure == state.pure
    assert again.truncation_deficit == state.truncation_deficit
    for n in state.sectors:
        assert np.array_equal(again.block(n).matrix, state.block(n).matrix)


def test_json_values():
    hom = catalog.from_spec(json.loads(JSON_EXAMPLES[1]))
    assert np.allclose(hom.block(2).matrix, 0.5 * np.array([[1, 0, -1], [0, 0, 0], [-1, 0, 1]]), atol=1e-12)
    coh = catalog.from_spec(json.loads(JSON_EXAMPLES[3]))
    assert h_rho(coh).trace_invariants[0] == pytest.approx(1.25, abs=1e-8)


@pytest.mark.parametrize(
    "spec",
    [{}, {"kind": "squeezed"}, {"kind": "fock"}, {"kind": "coherent", "alphas": ["x"]}, []],
)
def test_json_errors(spec):
    with pytest.raises(InvalidArgument):
        catalog.from_spec(spec)
