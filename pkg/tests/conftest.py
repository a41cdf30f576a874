"""Shared helpers for building randomized explicit distributions."""

import numpy as np

from restartfp import AT_INFINITY, TRUNCATION, ExplicitProcess, ExplicitRestart, TruncatedPMF


def random_pmf(rng, *, min_support=1, max_support=12, defective=False, min_residual=0.05):
    """A random PMF supported on [min_support, max_support], optionally with
    a chunk of mass at infinity."""
    size = int(rng.integers(min_support, max_support + 1))
    weights = rng.random(size - min_support + 1) + 1e-3
    residual = float(rng.uniform(min_residual, 0.5)) if defective else 0.0
    weights *= (1.0 - residual) / weights.sum()
    coeffs = np.zeros(size + 1)
    coeffs[min_support:] = weights
    kind = AT_INFINITY if defective else TRUNCATION
    return TruncatedPMF(coeffs, residual=residual, residual_kind=kind)


def random_explicit_pair(rng, *, u_proper, r_proper, preemptive=False):
    """An (ExplicitProcess, ExplicitRestart) pair with the requested hit
    probabilities.  Preemptive pairs put all restart mass strictly below the
    process support (only possible with a proper restart clock)."""
    if preemptive:
        assert r_proper, "a defective restart clock can never be preemptive"
        u_dist = random_pmf(rng, min_support=3, max_support=10, defective=not u_proper)
        r_dist = random_pmf(rng, min_support=1, max_support=2, defective=False)
    else:
        u_dist = random_pmf(rng, min_support=1, max_support=10, defective=not u_proper)
        r_dist = random_pmf(rng, min_support=2, max_support=12, defective=not r_proper)
    return ExplicitProcess(u_dist), ExplicitRestart(r_dist)
