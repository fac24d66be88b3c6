import factory
import numpy as np

from unilab.schemas.cipher_model import SubstitutionKey


def _permutation(G: int, n: int) -> tuple[int, ...]:
    return tuple(np.random.default_rng(n).permutation(G).tolist())


class SubstitutionKeyFactory(factory.Factory):
    class Meta:
        model = SubstitutionKey

    class Params:
        G = 26

    permutation = factory.LazyAttributeSequence(
        lambda obj, n: _permutation(obj.G, n)
    )
