import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gcnsir.errors import ConvergenceError
from gcnsir.ingest import RegionSet
from gcnsir.mobility import InteractionMatrix, MobilityConfig, interaction_matrix, mobility_matrix
from gcnsir.reproduction import r0_at, r0_track, read_r0_csv, spectral_radius, write_r0_csv
from gcnsir.sir import ParamTrack, RateSet
from gcnsir.synthetic import random_regions

from conftest import single_region


def dense_oracle(A):
    return float(np.max(np.abs(np.linalg.eigvals(A))))


def test_identity_and_swap():
    assert spectral_radius(np.eye(4)) == pytest.approx(1.0, rel=1e-12)
    assert spectral_radius(np.array([[0.0, 1.0], [1.0, 0.0]])) == pytest.approx(1.0, rel=1e-12)


def test_zero_matrix_gives_zero():
    assert spectral_radius(np.zeros((3, 3))) == 0.0


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        spectral_radius(np.array([[np.inf]]))
    with pytest.raises(ValueError):
        spectral_radius(np.array([[-1.0]]))


def test_non_convergence_carries_estimate():
    A = np.random.default_rng(0).uniform(size=(5, 5))
    with pytest.raises(ConvergenceError) as err:
        spectral_radius(A, rtol=0.0, max_iter=1)
    assert np.isfinite(err.value.estimate)


@pytest.mark.parametrize("seed", range(5))
def test_matches_eigensolver(seed):
    A = np.random.default_rng(seed).uniform(size=(5, 5))
    assert spectral_radius(A) == pytest.approx(dense_oracle(A), rel=1e-8)


@pytest.mark.parametrize("seed", range(5))
def test_clustered_spectrum(seed):
    # near-diagonal, often reducible, with a tiny spectral gap
    rng = np.random.default_rng(seed)
    n = 30
    mask = rng.uniform(size=(n, n)) < 0.1
    A = np.diag(rng.uniform(size=n)) + 0.01 * rng.uniform(size=(n, n)) * mask
    assert spectral_radius(A) == pytest.approx(dense_oracle(A), rel=1e-8)


def test_reducible_block_triangular():
    A = np.array([[0.0, 0.0], [0.0, 1.0]])
    assert spectral_radius(A) == pytest.approx(1.0, rel=1e-12)
    B = np.array([[2.0, 5.0], [0.0, 2.0 - 1e-6]])
    assert spectral_radius(B) == pytest.approx(2.0, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0.0, 10.0), min_size=4, max_size=4))
def test_two_by_two_characteristic_root(v):
    a, b, c, d = v
    A = np.array([[a, b], [c, d]])
    root = 0.5 * (a + d + np.sqrt((a - d) ** 2 + 4 * b * c))
    assert spectral_radius(A) == pytest.approx(root, rel=1e-12, abs=1e-12)


def single_inter(P):
    r = single_region(P)
    return r, interaction_matrix(mobility_matrix(r, MobilityConfig()), r)


def test_single_region_is_beta_over_gamma():
    r, inter = single_inter(3.28e8)
    assert r0_at(RateSet(np.array([0.3]), np.array([0.1])), inter, r) == pytest.approx(3.0, rel=1e-12)


def test_linear_in_beta(six_regions):
    inter = interaction_matrix(mobility_matrix(six_regions, MobilityConfig()), six_regions)
    b = np.linspace(0.2, 0.7, 6)
    g = np.linspace(0.1, 0.3, 6)
    base = r0_at(RateSet(b, g), inter, six_regions)
    assert r0_at(RateSet(2.5 * b, g), inter, six_regions) == pytest.approx(2.5 * base, rel=1e-10)


def test_two_symmetric_regions_hand_eigenvalue():
    # alpha_nm = 1/(2p) everywhere, so each row sums to 1/p; D A = (beta/gamma)/2 * ones
    p = 1000.0
    r = RegionSet(("A", "B"), np.array([p, p]), np.array([[0.0, 1.0], [1.0, 0.0]]))
    inter = InteractionMatrix(np.full((2, 2), 1 / (2 * p)), np.zeros((2, 2)))
    assert r0_at(RateSet(np.array([0.3, 0.3]), np.array([0.1, 0.1])), inter, r) == pytest.approx(3.0)


def test_zero_gamma_rejected():
    r, inter = single_inter(100.0)
    with pytest.raises(ValueError):
        r0_at(RateSet(np.array([0.3]), np.array([0.0])), inter, r)


def test_track_constant_and_fully_susceptible(six_regions):
    inter = interaction_matrix(mobility_matrix(six_regions, MobilityConfig()), six_regions)
    track = ParamTrack.constant(np.full(6, 0.6), np.full(6, 0.1), 5)
    out = r0_track(track, inter, six_regions)
    assert np.all(out.r0 == out.r0[0])
    np.testing.assert_array_equal(out.rt, out.r0)


def test_rt_non_increasing_when_susceptibles_deplete(six_regions):
    inter = interaction_matrix(mobility_matrix(six_regions, MobilityConfig()), six_regions)
    rng = np.random.default_rng(3)
    b, g = rng.uniform(0.3, 1.0, 6), rng.uniform(0.05, 0.2, 6)
    frac = np.cumprod(rng.uniform(0.9, 1.0, (30, 6)), axis=0)
    S = frac * six_regions.populations
    out = r0_track(ParamTrack.constant(b, g, 30), inter, six_regions, susceptible=S)
    assert np.all(np.diff(out.rt) <= 1e-12 * out.rt[:-1])
    for t in range(30):
        oracle = dense_oracle((S[t] * b / g)[:, None] * inter.alpha_mn)
        assert out.rt[t] == pytest.approx(oracle, rel=1e-8)
    assert np.all(out.rt <= out.r0 * (1 + 1e-12))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10_000))
def test_monotone_in_entries(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 7))
    A = rng.uniform(size=(n, n))
    i, j = rng.integers(0, n, 2)
    B = A.copy()
    B[i, j] += rng.uniform(0, 2)
    assert spectral_radius(B) >= spectral_radius(A) * (1 - 1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    regions = random_regions(5, seed=seed)
    inter = interaction_matrix(mobility_matrix(regions, MobilityConfig()), regions)
    b, g = rng.uniform(0.2, 2.0, 5), rng.uniform(0.05, 0.5, 5)
    perm = rng.permutation(5)
    permuted = regions.subset([regions.names[k] for k in perm])
    inter_p = InteractionMatrix(inter.alpha_mn[np.ix_(perm, perm)], inter.h[np.ix_(perm, perm)])
    assert r0_at(RateSet(b[perm], g[perm]), inter_p, permuted) == pytest.approx(
        r0_at(RateSet(b, g), inter, regions), rel=1e-9)


def test_smoothing_reduces_day_to_day_variance(tmp_path):
    r, inter = single_inter(1e5)
    beta = np.where(np.arange(40) % 2 == 0, 0.4, 0.2)[:, None]
    track = ParamTrack(beta, np.full((40, 1), 0.1))
    raw = r0_track(track, inter, r)
    smooth = r0_track(track, inter, r, smooth=True)
    assert np.var(np.diff(smooth.r0)) <= 0.5 * np.var(np.diff(raw.r0))
    write_r0_csv(tmp_path / "r0.csv", raw)
    back = read_r0_csv(tmp_path / "r0.csv")
    np.testing.assert_allclose(back.r0, raw.r0, rtol=1e-14)
