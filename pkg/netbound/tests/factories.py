"""factory_boy factories for networks and random rational instances."""
from fractions import Fraction

import factory
from factory import fuzzy

from netbound import corpus
from netbound.netcore import Link, Message, Node, Role


class RationalFuzz(fuzzy.BaseFuzzyAttribute):
    """A random positive rational p/q with 1 <= p <= max_numerator, 1 <= q <= max_denominator."""

    def __init__(self, max_numerator=20, max_denominator=10, **kwargs):
        super().__init__(**kwargs)
        self.numerator = fuzzy.FuzzyInteger(1, max_numerator)
        self.denominator = fuzzy.FuzzyInteger(1, max_denominator)

    def fuzz(self):
        return Fraction(self.numerator.fuzz(), self.denominator.fuzz())


class NodeFactory(factory.Factory):
    class Meta:
        model = Node

    id = factory.Sequence(lambda n: f"v{n}")
    role = Role.RELAY


class LinkFactory(factory.Factory):
    class Meta:
        model = Link

    id = factory.Sequence(lambda n: f"e{n}")
    tail = "x1"
    head = "y"
    capacity = Fraction(1)


class MessageFactory(factory.Factory):
    class Meta:
        model = Message

    id = factory.Sequence(lambda n: f"M{n}")
    source = "x1"
    rate = Fraction(1)


class YNetworkFactory(factory.Factory):
    class Meta:
        model = corpus.y_network

    a = 1
    b = 1
    c = 1


class TwoRelayFactory(factory.Factory):
    """Two-relay components; the random variant draws every capacity."""

    class Meta:
        model = corpus.two_relay

    a = 1
    b = 1
    b_prime = 1
    c = 1
    d = 1

    class Params:
        random = factory.Trait(
            a=RationalFuzz(),
            b=RationalFuzz(),
            b_prime=RationalFuzz(),
            c=RationalFuzz(),
            d=RationalFuzz(),
        )


class ParallelYFactory(factory.Factory):
    class Meta:
        model = corpus.parallel_y

    a = 1
    b = 1
    c = 1
    a_tilde = 1
    b_tilde = 1
    c_tilde = 1
