"""Acceptance gate: every criterion at full trial counts and stated tolerances.

Each test prints one pass/fail line; run with -s to see them inline.
"""

from awkit.selftest import (
    check_blockwise_reduction,
    check_closure_agreement,
    check_gap_inequality,
    check_measure_regularity,
    check_order_calculus,
    check_polar_reconstruction,
    check_polar_uniqueness,
    check_regularization_rate,
    check_spectral_cut,
    check_spectral_measure,
)

SEED = 0


def report(result):
    print(result.line())
    assert result.passed, result.line()


def test_polar_reconstruction_200_trials():
    report(check_polar_reconstruction(trials=200, seed=SEED, dims=(1, 8)))


def test_regularization_rate_200_trials():
    report(check_regularization_rate(trials=200, seed=SEED, dims=(1, 8)))


def test_polar_uniqueness_100_trials_three_families():
    report(check_polar_uniqueness(trials=100, seed=SEED, dims=(2, 8)))


def test_spectral_measure_200_trials():
    report(check_spectral_measure(trials=200, seed=SEED, dims=(1, 8)))


def test_measure_regularity_enumeration():
    report(check_measure_regularity(trials=200, seed=SEED, dims=(1, 8)))


def test_spectral_cut_100_trials_all_branches():
    report(check_spectral_cut(trials=100, seed=SEED, dims=(2, 8)))


def test_closure_agreement_50_triples():
    report(check_closure_agreement(trials=50, seed=SEED, dims=(2, 5)))


def test_order_calculus_100_roundtrips_20_violations():
    report(check_order_calculus(trials=100, violations=20, seed=SEED))


def test_gap_inequality_100_trials():
    report(check_gap_inequality(trials=100, seed=SEED, dims=(1, 8)))


def test_blockwise_reduction_50_trials():
    report(check_blockwise_reduction(trials=50, seed=SEED, dims=(1, 6)))
