import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circular_hrr import hrr
from circular_hrr.errors import DimensionError, SingularSpectrumError

from oracles import circular_convolution, naive_dft


def test_sample_gaussian_is_deterministic():
    a = hrr.sample_gaussian(4, np.random.default_rng(7))
    b = hrr.sample_gaussian(4, np.random.default_rng(7))
    assert np.array_equal(a, b)


def test_sample_gaussian_moments():
    v = hrr.sample_gaussian(10000, np.random.default_rng(0))
    assert abs(v.mean()) < 0.05
    assert abs(v.var() - 1e-4) < 0.2 * 1e-4


def test_sample_gaussian_d1_has_unit_variance():
    rng = np.random.default_rng(1)
    draws = np.array([hrr.sample_gaussian(1, rng)[0] for _ in range(4000)])
    assert abs(draws.var() - 1.0) < 0.1


def test_sample_gaussian_rejects_zero_dimension(rng):
    with pytest.raises(DimensionError):
        hrr.sample_gaussian(0, rng)


def test_batched_sampling_matches_sequential_draws():
    rng = np.random.default_rng(3)
    stacked = hrr.sample_gaussian(5, rng, size=3)
    rng = np.random.default_rng(3)
    rows = [hrr.sample_gaussian(5, rng) for _ in range(3)]
    assert np.array_equal(stacked, np.array(rows))


@pytest.mark.parametrize("d", [1, 2, 3, 7, 8, 13, 64])
def test_dft_matches_naive_transform(d, rng):
    x = rng.normal(size=d)
    assert np.allclose(hrr.dft(x), naive_dft(x), atol=1e-9)


@pytest.mark.parametrize("d", range(1, 65))
def test_dft_round_trip(d, rng):
    x = rng.normal(size=d)
    back = hrr.idft(hrr.dft(x))
    assert np.linalg.norm(back - x) <= 1e-9 * max(np.linalg.norm(x), 1e-300)


def test_project_unit_norm_d8():
    x = hrr.project(hrr.sample_gaussian(8, np.random.default_rng(3)))
    assert abs(np.linalg.norm(x) - 1.0) < 1e-6


def test_project_gives_unit_spectrum():
    x = hrr.project(hrr.sample_gaussian(512, np.random.default_rng(5)))
    assert np.allclose(np.abs(hrr.dft(x)), 1.0, atol=1e-9)


def test_project_is_idempotent(rng):
    x = hrr.project(rng.normal(size=100))
    assert np.allclose(hrr.project(x), x, atol=1e-9)


def test_project_preserves_phases(rng):
    x = rng.normal(size=33)
    fx, fp = hrr.dft(x), hrr.dft(hrr.project(x))
    keep = np.abs(fx) >= 1e-12
    dphi = np.angle(fp[keep] / fx[keep])
    assert np.all(np.abs(dphi) < 1e-9)


def test_project_replaces_zero_bins():
    # constant vector: only the DC bin is nonzero
    x = hrr.project(np.ones(4))
    assert np.allclose(np.abs(hrr.dft(x)), 1.0)
    assert np.all(np.isfinite(x))


def test_bind_shifted_deltas():
    got = hrr.bind([0, 1, 0, 0], [0, 1, 0, 0])
    assert np.allclose(got, circular_convolution([0, 1, 0, 0], [0, 1, 0, 0]), atol=1e-9)
    assert np.allclose(got, [0, 0, 1, 0], atol=1e-9)


def test_bind_identity_and_commutativity(rng):
    a, b = rng.normal(size=(2, 20))
    assert np.allclose(hrr.bind(a, hrr.identity(20)), a, atol=1e-9)
    assert np.allclose(hrr.bind(a, b), hrr.bind(b, a), atol=1e-9)


def test_bind_distributes_over_superposition(rng):
    a, b, c = rng.normal(size=(3, 17))
    left = hrr.bind(a, hrr.superpose(b, c))
    right = hrr.superpose(hrr.bind(a, b), hrr.bind(a, c))
    assert np.allclose(left, right, atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(d=st.integers(1, 64), seed=st.integers(0, 2**32 - 1))
def test_bind_matches_direct_convolution(d, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(2, d))
    assert np.allclose(hrr.bind(a, b), circular_convolution(a, b), atol=1e-9, rtol=0)


def test_bind_dimension_mismatch():
    with pytest.raises(DimensionError):
        hrr.bind(np.ones(3), np.ones(4))


def test_exact_unbinding_for_projected_cue(rng):
    a = hrr.project(hrr.sample_gaussian(128, rng))
    b = hrr.sample_gaussian(128, rng)
    assert np.allclose(hrr.bind(hrr.bind(a, b), hrr.invert(a)), b, atol=1e-6)
    assert np.allclose(hrr.bind(a, hrr.invert(a)), hrr.identity(128), atol=1e-6)


def test_inverse_of_projected_is_spectral_conjugate(rng):
    a = hrr.project(rng.normal(size=32))
    assert np.allclose(hrr.dft(hrr.invert(a)), np.conj(hrr.dft(a)), atol=1e-9)


def test_invert_delta_is_delta():
    assert np.allclose(hrr.invert(hrr.identity(9)), hrr.identity(9), atol=1e-12)


def test_unprojected_unbinding_recovers_operand():
    # exact inversion: recovery is limited only by spectral conditioning
    sims = []
    for seed in range(100):
        rng = np.random.default_rng(seed)
        a, b = hrr.sample_gaussian(256, rng), hrr.sample_gaussian(256, rng)
        sims.append(hrr.similarity(hrr.bind(hrr.bind(a, b), hrr.invert(a)), b))
    assert min(sims) > 0.9
    assert np.mean(sims) > 1 - 1e-9


def test_invert_rejects_singular_spectrum():
    x = np.array([1.0, 1.0, 1.0, 1.0])  # bins 1 and 2 are zero
    with pytest.raises(SingularSpectrumError) as info:
        hrr.invert(x)
    assert info.value.index == 1
    assert "bin 1" in str(info.value)


def test_similarity_basics(rng):
    a = rng.normal(size=10)
    assert hrr.similarity(a, a) == pytest.approx(1.0, abs=1e-9)
    assert hrr.similarity(a, -a) == pytest.approx(-1.0, abs=1e-9)
    with pytest.raises(ValueError):
        hrr.similarity(a, np.zeros(10))


def test_dot_is_raw_inner_product(rng):
    a, b = rng.normal(size=(2, 6))
    assert hrr.dot(a, b) == pytest.approx(float(a @ b))


def test_independent_projected_vectors_are_nearly_orthogonal():
    rng = np.random.default_rng(0)
    hits = 0
    for _ in range(1000):
        a = hrr.project(hrr.sample_gaussian(1024, rng))
        b = hrr.project(hrr.sample_gaussian(1024, rng))
        hits += abs(hrr.similarity(a, b)) < 0.15
    assert hits / 1000 >= 0.99


def test_superpose_properties(rng):
    a, b, c = rng.normal(size=(3, 12))
    assert np.array_equal(hrr.superpose(a, np.zeros(12)), a)
    assert np.array_equal(hrr.superpose(a, b), hrr.superpose(b, a))
    ints = rng.integers(-50, 50, size=(3, 12)).astype(float)
    x, y, z = ints
    assert np.array_equal(hrr.superpose(hrr.superpose(x, y), z), hrr.superpose(x, hrr.superpose(y, z)))
    assert hrr.dot(hrr.superpose(a, b), c) == pytest.approx(hrr.dot(a, c) + hrr.dot(b, c), abs=1e-9)


def test_superposition_of_projected_vectors_is_not_unitary():
    rng = np.random.default_rng(0)
    a = hrr.project(hrr.sample_gaussian(8, rng))
    b = hrr.project(hrr.sample_gaussian(8, rng))
    mags = np.abs(hrr.dft(hrr.superpose(a, b)))
    assert np.max(np.abs(mags - 1.0)) > 0.1


def test_approx_invert_is_involution():
    assert np.array_equal(hrr.approx_invert([1.0, 2.0, 3.0, 4.0]), [1.0, 4.0, 3.0, 2.0])
    x = np.arange(7.0)
    assert np.array_equal(hrr.approx_invert(hrr.approx_invert(x)), x)


def test_approx_invert_conjugates_the_spectrum(rng):
    a = rng.normal(size=21)
    assert np.allclose(hrr.dft(hrr.approx_invert(a)), np.conj(hrr.dft(a)), atol=1e-9)


def test_approx_invert_matches_exact_inverse_for_projected(rng):
    a = hrr.project(rng.normal(size=40))
    assert np.allclose(hrr.approx_invert(a), hrr.invert(a), atol=1e-12)


def test_approx_invert_tolerates_singular_spectrum():
    assert np.array_equal(hrr.approx_invert(np.ones(4)), np.ones(4))
