import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antisym_ec.antisym import AmplitudeTensor, coefficient_matrix, random_amplitude_tensor
from antisym_ec.bounds import (
    antisym_entropy_check,
    entropy_purity_bound,
    furuta_rhs,
    furuta_rhs_natural,
    furuta_spectrum_bound,
    i2_defect,
    purity_bound_check,
    shimono_lower_bound,
)
from antisym_ec.spectra import eigenvalues, power_sum, reduced_density

R2 = 1 / np.sqrt(2)


def entangled_pair():
    x = np.zeros(9)
    x[0] = x[4] = R2
    return AmplitudeTensor(2, x)


def full_product(n, seed):
    rng = np.random.default_rng(seed)
    x = np.ones(1, dtype=complex)
    for _ in range(n):
        f = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        x = np.kron(x, f / np.linalg.norm(f))
    return AmplitudeTensor(n, x)


def defect_by_delta_expansion(a):
    """Quadruple sum over (P, P', Q, Q') weighted by prod_m (d_pq d_p'q' + d_p'q d_pq')."""
    n = a.n
    idx = list(itertools.product(range(3), repeat=n))
    amp = {I: a.entries[k] for k, I in enumerate(idx)}
    total = 0.0
    for P, Pp, Q, Qp in itertools.product(idx, repeat=4):
        w = 1
        for m in range(n):
            w *= (P[m] == Q[m]) * (Pp[m] == Qp[m]) + (Pp[m] == Q[m]) * (P[m] == Qp[m])
            if w == 0:
                break
        if w:
            total += w * abs(amp[P] * amp[Pp] - amp[Q] * amp[Qp]) ** 2
    return total / 2 ** (2 * n + 1)


def test_furuta_rhs_examples():
    assert furuta_rhs(0.5, 0.5) == pytest.approx(0.5, abs=1e-15)
    assert furuta_rhs(0.5, 1.0) == pytest.approx(0.25, abs=1e-15)
    assert furuta_rhs(1.0, 1.0) == pytest.approx(0.0, abs=1e-15)


def test_furuta_rhs_errors():
    with pytest.raises(ValueError):
        furuta_rhs(0.0, 1.0)
    with pytest.raises(ValueError):
        furuta_rhs(0.5, -1.0)
    with pytest.raises(ValueError):
        furuta_rhs_natural(-0.1, 1.0)


def test_stated_form_peaks_away_from_lambda():
    # the base-2 right-hand side is maximized at x = lambda ln 2, where it
    # exceeds -lambda log2 lambda by lambda (1 - log2 ln2 - 1/ln2)
    lam = 0.5
    x_star = lam * math.log(2)
    excess = furuta_rhs(lam, x_star) - (-lam * math.log2(lam))
    assert excess == pytest.approx(lam * (1 - math.log2(math.log(2)) - 1 / math.log(2)), abs=1e-14)
    assert excess > 0.04


def test_natural_form_on_grid():
    lams = np.arange(1, 101) / 100
    xs = np.arange(1, 1001) / 100
    for lam in lams:
        lhs = -lam * math.log2(lam)
        slack = [lhs - furuta_rhs_natural(lam, x) for x in xs]
        assert min(slack) >= -1e-12
        assert abs(lhs - furuta_rhs_natural(lam, lam)) <= 1e-12
        assert abs(lhs - furuta_rhs(lam, lam)) <= 1e-12


@settings(max_examples=200)
@given(st.floats(1e-6, 1.0), st.floats(1e-6, 1e3))
def test_natural_form_property(lam, x):
    assert -lam * math.log2(lam) - furuta_rhs_natural(lam, x) >= -1e-12


@pytest.mark.parametrize("seed", range(5))
def test_optimal_x_recovery(seed):
    rho = reduced_density(coefficient_matrix(random_amplitude_tensor(2, seed)))
    lam = eigenvalues(rho)
    i2 = float(np.sum(lam**2))
    xs = np.linspace(0.5 * i2, 2 * i2, 3001)
    vals = [furuta_spectrum_bound(lam, x) for x in xs]
    best = int(np.argmax(vals))
    assert xs[best] == pytest.approx(i2, rel=2e-3)
    assert vals[best] == pytest.approx(-math.log2(i2), abs=1e-6)
    assert furuta_spectrum_bound(lam, i2) == pytest.approx(-math.log2(i2), abs=1e-12)
    # the stated form also evaluates to -log2 I2 at x = I2
    assert furuta_spectrum_bound(lam, i2, natural=False) == pytest.approx(-math.log2(i2), abs=1e-12)


def test_entropy_purity_examples():
    r = entropy_purity_bound(np.diag([0.5, 0.5]))
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(1.0) and r.satisfied
    v = np.array([1, 1j]) / math.sqrt(2)
    r = entropy_purity_bound(np.outer(v, v.conj()))
    assert r.lhs == pytest.approx(0.0, abs=1e-12) and r.rhs == pytest.approx(0.0, abs=1e-12)
    assert r.satisfied
    r = entropy_purity_bound(np.diag([0.75, 0.25]))
    assert r.lhs == pytest.approx(0.811278, abs=1e-6)
    assert r.rhs == pytest.approx(0.678072, abs=1e-6)
    assert r.slack == pytest.approx(0.133, abs=1e-3)
    assert r.satisfied


def test_purity_bound_examples():
    for seed in range(5):
        r = purity_bound_check(random_amplitude_tensor(1, seed))
        assert r.rhs == pytest.approx(0.5, abs=1e-12) and r.satisfied
    r = purity_bound_check(full_product(2, 1))
    assert r.rhs == pytest.approx(0.25, abs=1e-12) and r.satisfied
    r = purity_bound_check(entangled_pair())
    assert r.rhs == pytest.approx(3 / 16, abs=1e-14)
    assert r.slack == pytest.approx(1 / 16, abs=1e-14)


def test_defect_examples():
    for n in (1, 2, 3):
        assert abs(i2_defect(full_product(n, n))) < 1e-12
    assert i2_defect(entangled_pair()) == pytest.approx(1 / 16, abs=1e-14)
    for seed in range(5):
        assert abs(i2_defect(random_amplitude_tensor(1, seed))) < 1e-12


@pytest.mark.parametrize("n,seed", [(1, 0), (1, 3), (2, 0), (2, 7)])
def test_defect_matches_delta_expansion(n, seed):
    a = random_amplitude_tensor(n, seed)
    assert i2_defect(a) == pytest.approx(defect_by_delta_expansion(a), abs=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_defect_identity(n, seed):
    a = random_amplitude_tensor(n, seed)
    i2 = power_sum(reduced_density(coefficient_matrix(a)), 2)
    d = i2_defect(a)
    assert d >= -1e-12
    assert abs(i2 + d - 2.0**-n) < 1e-9


def test_defect_guard():
    with pytest.raises(ValueError):
        i2_defect(random_amplitude_tensor(4, 0))


def test_antisym_entropy_examples():
    r = antisym_entropy_check(random_amplitude_tensor(1, 2))
    assert r.lhs == pytest.approx(1.0, abs=1e-10) and r.satisfied
    r = antisym_entropy_check(full_product(2, 5))
    assert r.lhs == pytest.approx(2.0, abs=1e-10)
    assert r.details["entropy_over_renyi_slack"] == pytest.approx(0, abs=1e-10)
    assert r.details["renyi_over_n_slack"] == pytest.approx(0, abs=1e-10)
    r = antisym_entropy_check(entangled_pair())
    assert r.details["minus_log2_I2"] == pytest.approx(-math.log2(3 / 16), abs=1e-12)
    assert r.lhs >= r.details["minus_log2_I2"] > 2.415


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(0, 2**32 - 1))
def test_chain_property(n, seed):
    r = antisym_entropy_check(random_amplitude_tensor(n, seed))
    assert r.details["chain_satisfied"]
    assert r.satisfied


def test_report_serialization():
    d = purity_bound_check(random_amplitude_tensor(2, 0)).to_dict()
    assert set(d) >= {"bound_name", "lhs", "rhs", "slack", "satisfied", "input_digest", "tolerance"}
    assert d["satisfied"] is True


def test_shimono_lower_bound():
    assert shimono_lower_bound(2) == 1.0
    assert shimono_lower_bound(3) == pytest.approx(0.584963, abs=5e-7)
    assert shimono_lower_bound(10) == pytest.approx(0.152003, abs=5e-7)
    with pytest.raises(ValueError):
        shimono_lower_bound(1)
