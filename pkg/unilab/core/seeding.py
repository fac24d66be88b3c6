import numpy as np


def derive_seed(master: int, *path: int) -> int:
    sequence = np.random.SeedSequence([master, *path])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(master: int, *path: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master, *path]))


def fresh_seed() -> int:
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
