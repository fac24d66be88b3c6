import logging
import math

import numpy as np

from unilab.config import Settings
from unilab.core.seeding import derive_seed
from unilab.core.workers import Workers, split_range
from unilab.exceptions import (
    EnumerationCapError,
    InvalidParameterError,
    MessageSpaceError,
)
from unilab.schemas import (
    alphabet_model,
    channel_model,
    cipher_model,
    unicity_model,
)
from unilab.services import cipher_service, lang_service, unicity_service

logger = logging.getLogger(__name__)


def theoretical_mutual_information(
    N: float, R0: float, H_K: float
) -> channel_model.TheoreticalMI:
    if N < 0 or R0 <= 0 or H_K < 0:
        raise InvalidParameterError('need N >= 0, R0 > 0 and H(K) >= 0')
    capacity = N * R0
    if math.isclose(capacity, H_K, rel_tol=1e-12, abs_tol=1e-12):
        return channel_model.TheoreticalMI(
            bits=0.0, clamped=False, at_boundary=True
        )
    if capacity < H_K:
        return channel_model.TheoreticalMI(
            bits=0.0, clamped=True, at_boundary=False
        )
    return channel_model.TheoreticalMI(
        bits=capacity - H_K, clamped=False, at_boundary=False
    )


def reliability_check(
    N: float, R: float, R0: float, H_K: float
) -> channel_model.Reliability:
    if R > R0:
        raise InvalidParameterError('entropy rate cannot exceed R0')
    reliable = N * R <= N * R0 - H_K
    if H_K == 0:
        return channel_model.Reliability(reliable=reliable, N_min=0.0)
    return channel_model.Reliability(
        reliable=reliable,
        N_min=unicity_service.unicity_distance(H_K, R0 - R),
    )


def _joint_range(
    space: cipher_model.KeySpace, messages: np.ndarray, start: int, stop: int
) -> tuple[np.ndarray, np.ndarray]:
    S, N = messages.shape
    G = space.alphabet.G
    powers = G ** np.arange(N - 1, -1, -1, dtype=np.int64)
    plain = np.arange(S, dtype=np.int64) * G**N
    ids = []
    for block in cipher_service.iter_key_blocks(space, start, stop):
        ciphertexts = cipher_service.encrypt_block(block, messages) @ powers
        ids.append((plain[None, :] + ciphertexts).ravel())
    if not ids:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    return np.unique(np.concatenate(ids), return_counts=True)


def build_joint_distribution(
    language: unicity_model.ToyLanguage,
    space: cipher_model.KeySpace,
    workers: Workers | None = None,
) -> channel_model.EncryptionChannelInstance:
    S, K = language.size, space.key_count
    cap = Settings().JOINT_CAP
    if S * K > cap:
        raise EnumerationCapError(
            f'{S} messages x {K} keys exceed the joint cap of {cap}; use the '
            'Monte Carlo spurious-key path for larger instances'
        )
    M = language.message_space
    if S * M >= 2**63:
        raise MessageSpaceError('message space too large for pair codes')

    workers = workers or Workers()
    messages = language.digits()
    ranges = split_range(K, workers.max_workers)
    parts = workers.map(
        _joint_range,
        [space] * len(ranges),
        [messages] * len(ranges),
        [start for start, _ in ranges],
        [stop for _, stop in ranges],
    )
    ids, inverse = np.unique(
        np.concatenate([part_ids for part_ids, _ in parts]),
        return_inverse=True,
    )
    counts = np.bincount(
        inverse, weights=np.concatenate([c for _, c in parts])
    )
    ciphertext_codes, pair_cipher = np.unique(ids % M, return_inverse=True)
    logger.debug(
        'Joint over %d messages x %d keys: %d ciphertexts',
        S,
        K,
        ciphertext_codes.size,
    )
    return channel_model.EncryptionChannelInstance(
        language=language,
        key_space=space,
        ciphertext_codes=ciphertext_codes,
        pair_plain=ids // M,
        pair_cipher=pair_cipher.astype(np.int64),
        probability=counts / (S * K),
    )


def _entropy(probabilities: np.ndarray) -> float:
    p = probabilities[probabilities > 0]
    return float(-(p * np.log2(p)).sum())


def _marginals(instance: channel_model.EncryptionChannelInstance):
    p_plain = np.bincount(
        instance.pair_plain,
        weights=instance.probability,
        minlength=instance.language.size,
    )
    p_cipher = np.bincount(
        instance.pair_cipher,
        weights=instance.probability,
        minlength=instance.ciphertext_codes.size,
    )
    return p_plain, p_cipher


def empirical_mutual_information(
    instance: channel_model.EncryptionChannelInstance,
) -> tuple[float, float]:
    """I via H(P) - H(P|C) and via H(C) - H(C|P)."""
    joint = instance.probability
    p_plain, p_cipher = _marginals(instance)

    plain_given_cipher = joint / p_cipher[instance.pair_cipher]
    cipher_given_plain = joint / p_plain[instance.pair_plain]
    H_P_given_C = float(-(joint * np.log2(plain_given_cipher)).sum())
    H_C_given_P = float(-(joint * np.log2(cipher_given_plain)).sum())

    decomp_a = _entropy(p_plain) - H_P_given_C
    decomp_b = _entropy(p_cipher) - H_C_given_P
    return decomp_a, decomp_b


def equivocation(
    instance: channel_model.EncryptionChannelInstance,
) -> channel_model.Equivocation:
    joint = instance.probability
    _, p_cipher = _marginals(instance)
    H_C = _entropy(p_cipher)
    pairs = math.log2(instance.language.size * instance.key_space.key_count)

    plain_given_cipher = joint / p_cipher[instance.pair_cipher]
    H_P_given_C = float(-(joint * np.log2(plain_given_cipher)).sum())

    candidates = np.bincount(instance.pair_cipher)
    idealized = float(p_cipher @ np.log2(candidates))
    return channel_model.Equivocation(
        key=pairs - H_C,
        plaintext=H_P_given_C,
        idealized_plaintext=idealized,
    )


def channel_report(
    language: unicity_model.ToyLanguage,
    space: cipher_model.KeySpace,
    workers: Workers | None = None,
) -> channel_model.ChannelReport:
    N = language.N
    R0 = lang_service.absolute_rate(language.alphabet)
    R = min(language.R, R0)
    H_K = cipher_service.key_entropy(space)

    instance = build_joint_distribution(language, space, workers)
    decomp_a, decomp_b = empirical_mutual_information(instance)
    theory = theoretical_mutual_information(N, R0, H_K)
    if theory.clamped:
        logger.info('N=%d below H(K)/R0: theoretical I clamped to 0', N)
    reliability = reliability_check(N, R, R0, H_K)
    p_plain, p_cipher = _marginals(instance)
    equivocations = equivocation(instance)

    return channel_model.ChannelReport(
        N=N,
        R0=R0,
        R=R,
        H_K=H_K,
        I_theoretical=theory.bits,
        clamped=theory.clamped,
        I_empirical_decompA=decomp_a,
        I_empirical_decompB=decomp_b,
        mi_gap=decomp_a - theory.bits,
        H_P=_entropy(p_plain),
        H_C=_entropy(p_cipher),
        H_C_ideal=N * R0,
        key_equivocation=equivocations.key,
        plaintext_equivocation=equivocations.plaintext,
        idealized_plaintext_equivocation=equivocations.idealized_plaintext,
        reliable=reliability.reliable,
        N_min=reliability.N_min,
        messages=language.size,
        keys=space.key_count,
    )


def channel_sweep(
    alphabet: alphabet_model.Alphabet,
    kind: cipher_model.CipherKind,
    lengths: list[int],
    R: float,
    seed: int,
    workers: Workers | None = None,
) -> list[channel_model.ChannelReport]:
    space = cipher_service.build_key_space(kind, alphabet)
    reports = []
    for N in lengths:
        language = unicity_service.build_toy_language(
            alphabet, N, R, derive_seed(seed, N)
        )
        reports.append(channel_report(language, space, workers))
    return reports
