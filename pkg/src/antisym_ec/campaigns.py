"""Monte-Carlo falsification campaigns for the bounds.

Sample ``i`` of a campaign with seed ``s`` draws its state from
``numpy.random.default_rng([s, i])``, so records do not depend on how samples
are scheduled across workers.
"""

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .antisym import coefficient_matrix, random_amplitude_tensor
from .bounds import (
    INEQUALITY_TOL,
    PURITY_TOL,
    antisym_entropy_check,
    entropy_purity_bound,
    furuta_rhs,
    furuta_rhs_natural,
    i2_defect,
    purity_bound_check,
)
from .spectra import (
    elementary_symmetric,
    power_sum,
    reduced_density,
    s2_minor_oracle,
)

BOUNDS = ("purity", "entropy", "furuta", "oracle")
ORACLE_TOL = 1e-9
DEFECT_IDENTITY_TOL = 1e-9
FURUTA_TOL = 1e-12
MAX_ORACLE_N = 3


def sample_rng(seed, index):
    return np.random.default_rng([seed, index])


def _purity_record(n, seed, i, tol):
    a = random_amplitude_tensor(n, sample_rng(seed, i))
    rep = purity_bound_check(a, tol)
    rec = {"sample": i, "seed": seed, "n": n, "I2": rep.rhs, "bound": rep.lhs,
           "slack": rep.slack, "satisfied": rep.satisfied, "input_digest": rep.input_digest}
    if n <= 3:
        defect = i2_defect(a)
        rec["defect"] = defect
        rec["identity_residual"] = rep.rhs + defect - rep.lhs
    return rec


def _entropy_record(n, seed, i, tol):
    a = random_amplitude_tensor(n, sample_rng(seed, i))
    rep = antisym_entropy_check(a, tol)
    d = rep.details
    # a sample counts as satisfied only if both links of the chain hold
    link_slack = min(d["entropy_over_renyi_slack"], d["renyi_over_n_slack"])
    return {"sample": i, "seed": seed, "n": n, "entropy": rep.lhs,
            "minus_log2_I2": d["minus_log2_I2"],
            "entropy_over_renyi_slack": d["entropy_over_renyi_slack"],
            "renyi_over_n_slack": d["renyi_over_n_slack"],
            "slack": min(rep.slack, link_slack),
            "satisfied": rep.satisfied and d["chain_satisfied"],
            "input_digest": rep.input_digest}


def _oracle_record(n, seed, i, tol):
    a = random_amplitude_tensor(n, sample_rng(seed, i))
    alpha = coefficient_matrix(a)
    rho = reduced_density(alpha)
    oracle = s2_minor_oracle(alpha)
    newton = elementary_symmetric(rho, 2)
    from_purity = (1.0 - power_sum(rho, 2)) / 2.0
    err = max(abs(oracle - newton), abs(oracle - from_purity))
    return {"sample": i, "seed": seed, "n": n, "s2_oracle": oracle, "s2_newton": newton,
            "s2_from_purity": from_purity, "abs_error": err, "slack": tol - err,
            "satisfied": err <= tol}


_SAMPLERS = {"purity": _purity_record, "entropy": _entropy_record, "oracle": _oracle_record}
_DEFAULT_TOL = {"purity": PURITY_TOL, "entropy": INEQUALITY_TOL, "oracle": ORACLE_TOL,
                "furuta": FURUTA_TOL}


def default_tolerance(bound):
    return _DEFAULT_TOL[bound]


def _run_chunk(args):
    bound, n, seed, indices, tol = args
    return [_SAMPLERS[bound](n, seed, i, tol) for i in indices]


def run_sampling_campaign(bound, n, samples, seed, tol=None, workers=1):
    """Draw ``samples`` random states and check one bound on each.

    Returns ``(records, summary)`` with records sorted by sample index.
    """
    if bound not in _SAMPLERS:
        raise ValueError(f"unknown sampled bound {bound!r}")
    if bound == "oracle" and n > MAX_ORACLE_N:
        raise ValueError(f"oracle campaigns are limited to n <= {MAX_ORACLE_N}")
    tol = default_tolerance(bound) if tol is None else tol
    indices = list(range(samples))
    if workers > 1:
        chunks = [indices[w::workers] for w in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            parts = pool.map(_run_chunk, [(bound, n, seed, c, tol) for c in chunks])
            records = [r for part in parts for r in part]
    else:
        records = _run_chunk((bound, n, seed, indices, tol))
    records.sort(key=lambda r: r["sample"])
    return records, summarize_records(bound, records, tol, n=n, seed=seed)


def summarize_records(bound, records, tol, **extra):
    slacks = [r["slack"] for r in records]
    worst = int(np.argmin(slacks)) if slacks else None
    summary = {"summary": True, "bound": bound, **extra, "samples": len(records),
               "tolerance": tol,
               "violations": sum(1 for r in records if not r["satisfied"]),
               "min_slack": float(slacks[worst]) if records else None,
               "argmin_sample": records[worst]["sample"] if records else None}
    if bound == "oracle" and records:
        summary["max_abs_error"] = max(r["abs_error"] for r in records)
    if bound == "purity" and records and "identity_residual" in records[0]:
        summary["max_identity_residual"] = max(abs(r["identity_residual"]) for r in records)
    return summary


def furuta_grid(form="stated", tol=FURUTA_TOL, lam_step=0.01, x_step=0.01, x_max=10.0):
    """Check the scalar Furuta inequality on a regular ``(lambda, x)`` grid.

    One record per ``lambda`` holds the worst slack over ``x`` and the slack at
    ``x == lambda``, where the two sides coincide.  ``form`` selects
    :func:`furuta_rhs` (``"stated"``) or :func:`furuta_rhs_natural`.
    """
    rhs = {"stated": furuta_rhs, "natural": furuta_rhs_natural}[form]
    lams = [round((k + 1) * lam_step, 12) for k in range(int(round(1.0 / lam_step)))]
    xs = [round((k + 1) * x_step, 12) for k in range(int(round(x_max / x_step)))]
    records = []
    for i, lam in enumerate(lams):
        lhs = -lam * math.log2(lam)
        slacks = [lhs - rhs(lam, x) for x in xs]
        worst = int(np.argmin(slacks))
        at_equal = lhs - rhs(lam, lam)
        records.append({"sample": i, "lambda": lam, "min_slack": slacks[worst],
                        "argmin_x": xs[worst], "equality_residual": at_equal,
                        "slack": min(slacks[worst], tol - abs(at_equal)),
                        "satisfied": slacks[worst] >= -tol and abs(at_equal) <= tol})
    summary = summarize_records("furuta", records, tol, form=form, grid_points=len(lams) * len(xs))
    summary["equality_cases"] = [r["lambda"] for r in records if abs(r["equality_residual"]) <= tol]
    return records, summary


def random_density(dim, rng):
    """Random full-rank density matrix from a complex Ginibre matrix."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return 0.5 * (rho + rho.conj().T)


def entropy_purity_campaign(samples, seed, max_dim=81, tol=INEQUALITY_TOL):
    """``S >= -log2 I2`` on random density matrices of random dimension <= ``max_dim``."""
    records = []
    for i in range(samples):
        rng = sample_rng(seed, i)
        dim = int(rng.integers(1, max_dim + 1))
        rep = entropy_purity_bound(random_density(dim, rng), tol)
        records.append({"sample": i, "dim": dim, "entropy": rep.lhs, "minus_log2_I2": rep.rhs,
                        "slack": rep.slack, "satisfied": rep.satisfied})
    return records, summarize_records("entropy_purity", records, tol, seed=seed)
