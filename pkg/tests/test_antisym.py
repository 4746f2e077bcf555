import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antisym_ec import ValidationError
from antisym_ec.antisym import (
    AmplitudeTensor,
    antisymmetric_isometry,
    coefficient_matrix,
    decode_multi_index,
    encode_multi_index,
    levi_civita,
    product_amplitude,
    random_amplitude_tensor,
    read_state,
    state_from_dict,
    state_vector,
    subspace_residual,
    swap_copy,
    write_state,
)

R2 = 1 / np.sqrt(2)


def eps_closed_form(i, j, k):
    return (j - i) * (k - i) * (k - j) // 2


def alpha_by_loops(a):
    """Entry-by-entry evaluation of the Levi-Civita contraction."""
    n = a.n
    d = 3**n
    digits = list(itertools.product(range(3), repeat=n))
    out = np.zeros((d, d), dtype=complex)
    for J, jd in enumerate(digits):
        for K, kd in enumerate(digits):
            acc = 0
            for I, idg in enumerate(digits):
                prod = 1
                for m in range(n):
                    prod *= eps_closed_form(idg[m], jd[m], kd[m])
                acc += a.entries[I] * prod
            out[J, K] = acc * 2 ** (-n / 2)
    return out


@pytest.mark.parametrize("ijk,expected", [((0, 1, 2), 1), ((0, 2, 1), -1), ((0, 0, 1), 0),
                                          ((1, 2, 0), 1), ((2, 0, 1), 1), ((2, 1, 0), -1),
                                          ((1, 1, 1), 0)])
def test_levi_civita_values(ijk, expected):
    assert levi_civita(*ijk) == expected


def test_levi_civita_matches_closed_form():
    for i, j, k in itertools.product(range(3), repeat=3):
        assert levi_civita(i, j, k) == eps_closed_form(i, j, k)


def test_levi_civita_rejects_out_of_range():
    with pytest.raises(ValueError):
        levi_civita(0, 1, 3)
    with pytest.raises(ValueError):
        levi_civita(-1, 1, 2)


def test_multi_index_examples():
    assert encode_multi_index((0, 0)) == 0
    assert encode_multi_index((1, 2)) == 5
    assert encode_multi_index((2, 2)) == 8
    assert decode_multi_index(5, 2) == (1, 2)


def test_multi_index_errors():
    with pytest.raises(ValueError):
        encode_multi_index((0, 3))
    with pytest.raises(ValueError):
        decode_multi_index(9, 2)


@given(st.integers(1, 6), st.data())
def test_multi_index_roundtrip(n, data):
    x = data.draw(st.integers(0, 3**n - 1))
    assert encode_multi_index(decode_multi_index(x, n)) == x


def test_amplitude_tensor_requires_unit_norm():
    with pytest.raises(ValidationError):
        AmplitudeTensor(1, [1.0, 1.0, 0.0])
    with pytest.raises(ValidationError):
        AmplitudeTensor(2, [1.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        AmplitudeTensor(0, [1.0])


def test_coefficient_matrix_n1_first_basis():
    alpha = coefficient_matrix(AmplitudeTensor.basis(1, 0))
    expected = np.zeros((3, 3))
    expected[1, 2], expected[2, 1] = R2, -R2
    np.testing.assert_allclose(alpha, expected, atol=1e-15)


def test_coefficient_matrix_n1_last_basis():
    alpha = coefficient_matrix(AmplitudeTensor.basis(1, 2))
    expected = np.zeros((3, 3))
    expected[0, 1], expected[1, 0] = R2, -R2
    np.testing.assert_allclose(alpha, expected, atol=1e-15)


def test_coefficient_matrix_product_basis_factorizes():
    single = coefficient_matrix(AmplitudeTensor.basis(1, 0))
    np.testing.assert_allclose(coefficient_matrix(AmplitudeTensor.basis(2, (0, 0))),
                               np.kron(single, single), atol=1e-15)


@pytest.mark.parametrize("n,seed", [(1, 0), (1, 5), (2, 1), (2, 9)])
def test_coefficient_matrix_matches_loops(n, seed):
    a = random_amplitude_tensor(n, seed)
    np.testing.assert_allclose(coefficient_matrix(a), alpha_by_loops(a), atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_coefficient_matrix_antisymmetry(n):
    a = random_amplitude_tensor(n, 11)
    alpha = coefficient_matrix(a)
    t = alpha.reshape((3,) * (2 * n))
    for m in range(n):
        np.testing.assert_allclose(np.swapaxes(t, m, n + m), -t, atol=1e-15)
    # entries with a repeated digit in some slot vanish
    digits = np.indices((3,) * n).reshape(n, -1).T
    for J, jd in enumerate(digits):
        for K, kd in enumerate(digits):
            if np.any(jd == kd):
                assert alpha[J, K] == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_norm_preservation(n, seed):
    a = random_amplitude_tensor(n, seed)
    assert abs(np.linalg.norm(coefficient_matrix(a)) - 1.0) < 1e-12


def test_linearity():
    rng = np.random.default_rng(3)
    w = antisymmetric_isometry(2)
    x = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    y = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    c1, c2 = 0.3 - 0.2j, 1.1 + 0.5j
    np.testing.assert_allclose(w @ (c1 * x + c2 * y), c1 * (w @ x) + c2 * (w @ y), atol=1e-13)
    # the isometry columns reproduce coefficient_matrix for normalized inputs
    xn = x / np.linalg.norm(x)
    np.testing.assert_allclose(w @ xn, state_vector(AmplitudeTensor(2, xn)), atol=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_isometry_has_orthonormal_columns(n):
    w = antisymmetric_isometry(n)
    np.testing.assert_allclose(w.conj().T @ w, np.eye(3**n), atol=1e-14)


def test_product_amplitude_examples():
    e0, e1 = AmplitudeTensor.basis(1, 0), AmplitudeTensor.basis(1, 1)
    p = product_amplitude(e0, e0)
    assert p.n == 2 and p.entries[0] == 1
    q = product_amplitude(e0, e1)
    assert q.entries[encode_multi_index((0, 1))] == 1


@pytest.mark.parametrize("na,nb", [(1, 1), (1, 2), (2, 1)])
def test_product_amplitude_compatibility(na, nb):
    a = random_amplitude_tensor(na, 1)
    b = random_amplitude_tensor(nb, 2)
    p = product_amplitude(a, b)
    assert abs(np.linalg.norm(p.entries) - 1) < 1e-14
    np.testing.assert_allclose(coefficient_matrix(p),
                               np.kron(coefficient_matrix(a), coefficient_matrix(b)),
                               atol=1e-14)


def test_random_amplitude_determinism_and_norm():
    a = random_amplitude_tensor(2, 42)
    b = random_amplitude_tensor(2, 42)
    assert a == b
    assert abs(np.linalg.norm(a.entries) - 1) < 1e-12
    assert a != random_amplitude_tensor(2, 43)


def test_random_amplitude_sphere_symmetry():
    rng = np.random.default_rng(2024)
    samples = np.array([np.abs(random_amplitude_tensor(1, rng).entries) ** 2
                        for _ in range(10_000)])
    np.testing.assert_allclose(samples.mean(axis=0), 1 / 3, atol=0.02)


def test_state_vector_examples():
    v = state_vector(AmplitudeTensor.basis(1, 0))
    expected = np.zeros(9)
    expected[5], expected[7] = R2, -R2
    np.testing.assert_allclose(v, expected, atol=1e-15)
    v = state_vector(AmplitudeTensor.basis(1, 1))
    support = set(np.flatnonzero(np.abs(v) > 0))
    assert support == {3 * 2 + 0, 3 * 0 + 2}


def test_membership_n1():
    spanning = np.zeros((9, 3))
    for col, (x, y) in enumerate([(0, 1), (1, 2), (2, 0)]):
        spanning[3 * x + y, col] = 1
        spanning[3 * y + x, col] = -1
    q, _ = np.linalg.qr(spanning)
    for seed in range(20):
        v = state_vector(random_amplitude_tensor(1, seed))
        assert np.linalg.norm(v - q @ (q.T @ v)) < 1e-12
        assert abs(np.linalg.norm(v) - 1) < 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_membership_swap_negates(n):
    v = state_vector(random_amplitude_tensor(n, 4))
    for m in range(n):
        np.testing.assert_allclose(swap_copy(v, n, m), -v, atol=1e-15)
    assert subspace_residual(v, n) < 1e-12


def test_state_file_roundtrip(tmp_path):
    a = random_amplitude_tensor(2, 7)
    path = tmp_path / "s.json"
    write_state(a, path)
    data = json.loads(path.read_text())
    assert data["n"] == 2 and len(data["amplitudes"]) == 9
    b = read_state(path)
    np.testing.assert_allclose(b.entries, a.entries, atol=1e-16)


def test_state_file_rejects_bad_input():
    with pytest.raises(ValidationError):
        state_from_dict({"n": 1, "amplitudes": [[1, 0], [0, 0]]})
    with pytest.raises(ValidationError):
        state_from_dict({"n": 1, "amplitudes": [[1, 0], [1e-4, 0], [0, 0]]})
    with pytest.raises(ValidationError):
        state_from_dict({"amplitudes": []})
    # deviations below the file tolerance are accepted and renormalized
    a = state_from_dict({"n": 1, "amplitudes": [[1 + 1e-11, 0], [0, 0], [0, 0]]})
    assert abs(np.linalg.norm(a.entries) - 1) < 1e-15
