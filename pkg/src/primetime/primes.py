"""Prime generation, the agent-to-prime registry, and the integer message codec.

A message is a single unbounded non-negative integer: the product of each
known identifier prime raised to its datum.  ``encode``/``decode`` are exact
inverses on valid pair sets; 1 encodes the empty set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Collection, Iterable

from .errors import CodecError, PrimeCapError, ProtocolError

# Primes are searched through the ordered sequence p_1 = 2, p_2 = 3, ...
# The cap is an index into that sequence and bounds every search so that a
# corrupted message cannot send the factorizer off to infinity.
DEFAULT_PRIME_CAP = 10_000

_primes: list[int] = [2, 3, 5, 7, 11, 13]


def _extend_primes(count: int) -> None:
    """Grow the cached prime list to at least `count` entries (trial division)."""
    candidate = _primes[-1]
    while len(_primes) < count:
        candidate += 2
        for p in _primes:
            if p * p > candidate:
                _primes.append(candidate)
                break
            if candidate % p == 0:
                break


def nth_prime(n: int, cap: int = DEFAULT_PRIME_CAP) -> int:
    """Return the n-th prime (1-indexed: nth_prime(1) == 2).

    Raises PrimeCapError for n beyond `cap`, the largest index the package
    is configured to search.
    """
    if n < 1:
        raise ValueError(f"prime index must be >= 1, got {n}")
    if n > cap:
        raise PrimeCapError(f"prime cap exceeded: index {n} > cap {cap}")
    if n > len(_primes):
        _extend_primes(n)
    return _primes[n - 1]


def first_primes(n: int) -> list[int]:
    """The first n primes in increasing order."""
    if n > len(_primes):
        _extend_primes(n)
    return _primes[:n]


def smallest_unused_prime(used: Collection[int], cap: int = DEFAULT_PRIME_CAP) -> int:
    """Smallest prime not contained in `used`, searched in increasing order."""
    taken = set(used)
    for i in range(1, cap + 1):
        p = nth_prime(i, cap)
        if p not in taken:
            return p
    raise PrimeCapError(f"prime cap exceeded: all primes up to index {cap} in use")


def encode(pairs: Iterable[tuple[int, int]], max_exponent: int) -> int:
    """Encode (prime, value) pairs as the product of prime**value.

    `max_exponent` is the largest admissible value; protocol callers pass
    M + 1 so the leave sentinel survives the codec.  The empty set encodes
    to 1.

    Raises CodecError on a repeated prime or a value outside [1, max_exponent].
    """
    message = 1
    seen: set[int] = set()
    for prime, value in pairs:
        if prime in seen:
            raise CodecError(f"duplicate prime {prime} in pair set")
        seen.add(prime)
        if not 1 <= value <= max_exponent:
            raise CodecError(
                f"value out of range: {value} for prime {prime}, allowed [1, {max_exponent}]"
            )
        message *= prime**value
    return message


@lru_cache(maxsize=4096)
def _factorize(message: int, prime_cap: int) -> tuple[tuple[int, int], ...]:
    factors = []
    residue = message
    index = 1
    while residue > 1:
        if index > prime_cap:
            raise CodecError(
                f"unfactorable residue {residue}: no prime factor within cap index {prime_cap}"
            )
        p = nth_prime(index, prime_cap)
        if residue % p == 0:
            exponent = 0
            while residue % p == 0:
                residue //= p
                exponent += 1
            factors.append((p, exponent))
        index += 1
    return tuple(factors)


def decode(message: int, max_exponent: int, prime_cap: int = DEFAULT_PRIME_CAP) -> dict[int, int]:
    """Recover the (prime, exponent) pairs of `message` by trial division.

    Primes are tried in increasing order up to the cap index, so corrupted
    input terminates with a CodecError instead of hanging.  decode(1) == {}.

    Raises CodecError if a residue > 1 survives all primes within the cap,
    or if any exponent exceeds `max_exponent`.
    """
    if message < 1:
        raise CodecError(f"message must be >= 1, got {message}")
    pairs = _factorize(message, prime_cap)
    for p, exponent in pairs:
        if exponent > max_exponent:
            raise CodecError(
                f"exponent out of range: {p}**{exponent} exceeds bound {max_exponent}"
            )
    return dict(pairs)


def bit_length(message: int) -> int:
    """Number of bits in the binary representation of `message`; bit_length(1) == 1."""
    if message < 1:
        raise ValueError(f"message must be >= 1, got {message}")
    return message.bit_length()


@dataclass
class PrimeRegistry:
    """Central agent-to-prime assignment table.

    Initialization is centralized: agent i receives the i-th prime, in call
    order.  Primes released by departed agents may be reassigned to joiners;
    the injective-map invariant holds over active assignments.
    """

    cap: int = DEFAULT_PRIME_CAP
    assignments: dict[int, int] = field(default_factory=dict)
    _next_index: int = 1

    def assign_next(self, agent_id: int) -> int:
        """Assign the next prime in sequence (centralized initialization)."""
        if agent_id in self.assignments:
            raise ProtocolError(f"agent {agent_id} already holds a prime")
        prime = nth_prime(self._next_index, self.cap)
        self._next_index += 1
        self.assignments[agent_id] = prime
        return prime

    def assign(self, agent_id: int, prime: int) -> None:
        """Record an externally chosen prime (join flow)."""
        if agent_id in self.assignments:
            raise ProtocolError(f"agent {agent_id} already holds a prime")
        if prime in self.assignments.values():
            raise ProtocolError(f"prime {prime} already assigned")
        self.assignments[agent_id] = prime

    def release(self, agent_id: int) -> None:
        self.assignments.pop(agent_id, None)

    def prime_of(self, agent_id: int) -> int:
        return self.assignments[agent_id]
