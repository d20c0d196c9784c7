"""Small number-theoretic helpers on top of sympy."""

from sympy import divisors, isprime, n_order, primitive_root, totient

from loopcount.errors import NotOddPrime


def check_odd_prime(q) -> int:
    if isinstance(q, bool) or not isinstance(q, int) or q < 3 or not isprime(q):
        raise NotOddPrime(f"q must be an odd prime, got {q!r}")
    return q


def order_of_two(q: int) -> int:
    return int(n_order(2, q))


def unit_order(u: int, q: int) -> int:
    return int(n_order(u, q))


def smallest_primitive_root(q: int) -> int:
    return int(primitive_root(q))


def euler_phi(k: int) -> int:
    return int(totient(k))


def divisors_of(k: int) -> list[int]:
    return [int(d) for d in divisors(k)]
