import math

import numpy as np
import pytest

from unilab.core.workers import Workers
from unilab.exceptions import EnumerationCapError, InvalidParameterError
from unilab.schemas.alphabet_model import Alphabet
from unilab.services import (
    channel_service,
    cipher_service,
    unicity_service,
)

TOLERANCE = 1e-9
TRIPLES = 1000


def _instance(symbols, kind, N, R, seed=0):
    alphabet = Alphabet.from_profile(symbols)
    language = unicity_service.build_toy_language(alphabet, N, R, seed)
    space = cipher_service.build_key_space(kind, alphabet)
    return channel_service.build_joint_distribution(language, space)


def test_clamping_over_a_grid():
    for H_K in np.linspace(0.5, 50, 100):
        for N in np.linspace(0, 40, 100):
            theory = channel_service.theoretical_mutual_information(
                N, 2.0, H_K
            )
            if theory.at_boundary:
                assert theory.bits == 0
            elif N < H_K / 2.0:
                assert theory.clamped
                assert theory.bits == 0
            else:
                assert not theory.clamped
                assert theory.bits == N * 2.0 - H_K


def test_theoretical_mi_rejects_bad_input():
    with pytest.raises(InvalidParameterError):
        channel_service.theoretical_mutual_information(-1, 2.0, 1.0)


def test_reliability_threshold_is_unicity_distance():
    rng = np.random.default_rng(2024)
    for _ in range(TRIPLES):
        R0 = rng.uniform(0.5, 8)
        R = rng.uniform(0.01, 0.99) * R0
        H_K = rng.uniform(0.1, 200)
        reliability = channel_service.reliability_check(10.0, R, R0, H_K)
        expected = unicity_service.unicity_distance(H_K, R0 - R)
        assert reliability.N_min == pytest.approx(expected, abs=TOLERANCE)


def test_reliable_iff_past_the_threshold():
    H_K, R, R0 = 12.0, 1.0, 4.0
    assert not channel_service.reliability_check(3.9, R, R0, H_K).reliable
    assert channel_service.reliability_check(4.0, R, R0, H_K).reliable
    assert channel_service.reliability_check(10, R, R0, H_K).reliable


def test_reliability_flips_once_along_a_sweep():
    H_K, R, R0 = 12.0, 1.0, 4.0
    lengths = np.arange(0, 20.25, 0.25)
    flags = [
        channel_service.reliability_check(N, R, R0, H_K).reliable
        for N in lengths
    ]
    flips = [i for i in range(1, len(flags)) if flags[i] != flags[i - 1]]
    assert len(flips) == 1
    assert not flags[0]
    assert lengths[flips[0]] == H_K / (R0 - R)


def test_reliability_without_key():
    reliability = channel_service.reliability_check(0, 1.0, 2.0, 0.0)
    assert reliability.N_min == 0
    assert reliability.reliable


def test_rate_above_absolute_rate():
    with pytest.raises(InvalidParameterError):
        channel_service.reliability_check(5, 3.0, 2.0, 1.0)


@pytest.mark.parametrize('kind', ['substitution', 'shift', 'identity'])
@pytest.mark.parametrize('symbols', ['AB', 'ABC', 'ABCD'])
@pytest.mark.parametrize('N', [1, 2, 3])
def test_decompositions_agree(kind, symbols, N):
    instance = _instance(symbols, kind, N, R=1.0, seed=N)
    first, second = channel_service.empirical_mutual_information(instance)
    assert first == pytest.approx(second, abs=TOLERANCE)
    assert instance.probability.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize(
    ('symbols', 'kind'),
    [('AB', 'substitution'), ('ABCD', 'shift'), ('ABCD', 'substitution')],
)
def test_perfect_secrecy(symbols, kind):
    instance = _instance(symbols, kind, N=1, R=1.0)
    first, second = channel_service.empirical_mutual_information(instance)
    assert abs(first) < TOLERANCE
    assert abs(second) < TOLERANCE


def test_noiseless_channel_leaks_the_plaintext():
    instance = _instance('ABCD', 'identity', N=2, R=1.0)
    first, _ = channel_service.empirical_mutual_information(instance)
    assert first == pytest.approx(math.log2(instance.language.size))


def test_key_equivocation():
    instance = _instance('ABCD', 'substitution', N=1, R=1.0)
    equivocation = channel_service.equivocation(instance)
    assert equivocation.key == pytest.approx(math.log2(12))
    assert equivocation.plaintext == pytest.approx(1.0)


def test_report_marks_the_clamped_region(abcd):
    language = unicity_service.build_toy_language(abcd, 1, 1.0, 0)
    space = cipher_service.build_key_space('substitution', abcd)
    report = channel_service.channel_report(language, space)

    assert report.clamped
    assert report.I_theoretical == 0
    assert report.I_empirical_decompA == pytest.approx(
        report.I_empirical_decompB, abs=TOLERANCE
    )
    assert report.N_min == pytest.approx(space.key_entropy_bits)
    assert not report.reliable


def test_joint_ignores_worker_count(abcd):
    language = unicity_service.build_toy_language(abcd, 3, 1.0, 6)
    space = cipher_service.build_key_space('substitution', abcd)
    serial = channel_service.build_joint_distribution(language, space)
    with Workers(3) as pool:
        parallel = channel_service.build_joint_distribution(
            language, space, pool
        )
    assert np.array_equal(serial.pair_plain, parallel.pair_plain)
    assert np.array_equal(serial.probability, parallel.probability)


def test_joint_above_cap(latin):
    language = unicity_service.build_toy_language(latin, 1, 1.0, 0)
    space = cipher_service.build_key_space('substitution', latin)
    with pytest.raises(EnumerationCapError):
        channel_service.build_joint_distribution(language, space)


def test_sweep_is_seeded(abcd):
    first = channel_service.channel_sweep(abcd, 'shift', [1, 2], 1.0, 7)
    again = channel_service.channel_sweep(abcd, 'shift', [1, 2], 1.0, 7)
    assert first == again


@pytest.mark.parametrize('kind', ['substitution', 'shift', 'identity'])
def test_mi_bounded_by_marginal_entropies(abcd, kind):
    space = cipher_service.build_key_space(kind, abcd)
    for N in [1, 2, 3]:
        language = unicity_service.build_toy_language(abcd, N, 1.0, N)
        report = channel_service.channel_report(language, space)
        assert report.I_empirical_decompA <= (
            min(report.H_P, report.H_C) + TOLERANCE
        )
