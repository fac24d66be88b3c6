import factory


class ToyLanguageFactory(factory.DictFactory):
    symbols = 'ABCD'
    N = 3
    R = 1.0
    seed = factory.Sequence(lambda n: n)
