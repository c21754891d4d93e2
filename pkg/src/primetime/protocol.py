"""Per-agent state machines for both protocol variants and open-graph churn.

Every agent owns a table mapping identifier primes to data values.  Each
round it broadcasts one integer:

* full variant ("primetime"): the product over its whole table,
* incremental variant: the product over pairs learned since its previous
  transmission, which collapses to 1 once nothing new arrives.

Departure is signalled by raising the leaver's own prime to the sentinel
exponent M + 1, one past the data range [1, M].  Receivers drop the pair and
relay the sentinel exactly once, so the goodbye floods outward while late
copies of the departed pair are discarded.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import ProtocolError
from .primes import PrimeRegistry, decode, encode, smallest_unused_prime


class Variant(str, enum.Enum):
    PRIMETIME = "primetime"
    INCREMENTAL = "incremental"


@dataclass
class AgentState:
    """One agent's protocol state.

    `table` maps prime -> value and never stores the sentinel; `prev_table`
    is the snapshot taken at the last transmission, from which the
    incremental variant forms its diff.  `goodbye_relay` holds primes whose
    sentinel goes out with the next message, exactly once; `departed` keeps
    every prime ever removed so late data and duplicate goodbyes are ignored.
    """

    agent_id: int
    own_prime: int
    own_value: int
    variant: Variant
    max_value: int
    table: dict[int, int] = field(default_factory=dict)
    prev_table: dict[int, int] = field(default_factory=dict)
    goodbye_relay: set[int] = field(default_factory=set)
    departed: set[int] = field(default_factory=set)
    active: bool = True

    def __post_init__(self):
        if not 1 <= self.own_value <= self.max_value:
            raise ProtocolError(
                f"agent {self.agent_id}: value {self.own_value} outside [1, {self.max_value}]"
            )
        self.table.setdefault(self.own_prime, self.own_value)

    @property
    def sentinel(self) -> int:
        return self.max_value + 1


def make_agent(agent_id: int, prime: int, value: int, variant: Variant,
               max_value: int) -> AgentState:
    """Fresh agent as at its first round: table holds only its own pair."""
    return AgentState(agent_id=agent_id, own_prime=prime, own_value=value,
                      variant=variant, max_value=max_value)


def form_message(state: AgentState) -> int:
    """Build this round's outgoing message and roll the transmission state.

    The full variant sends the whole table; the incremental variant sends
    only pairs absent from the previous snapshot.  Pending goodbye sentinels
    ride along as (prime, M + 1) pairs.  Afterwards the snapshot catches up
    to the table and the relay set empties, so each sentinel and each
    incremental pair goes out exactly once.  Returns 1 when there is
    nothing to send.
    """
    if not state.active:
        raise ProtocolError(f"agent {state.agent_id} already departed")
    if state.variant is Variant.PRIMETIME:
        base = dict(state.table)
    else:
        base = {p: x for p, x in state.table.items() if p not in state.prev_table}
    pairs = list(base.items()) + [(p, state.sentinel) for p in sorted(state.goodbye_relay)]
    message = encode(pairs, max_exponent=state.sentinel)
    state.prev_table = dict(state.table)
    state.goodbye_relay = set()
    return message


def receive_message(state: AgentState, message: int) -> list[str]:
    """Merge one incoming message into the agent's table.

    Exponents in [1, M] are data: inserted if the prime is new, ignored if
    the stored value matches, rejected with ProtocolError if it conflicts.
    Exponents in [M+1, 2M+1] carry the departure sentinel (a leaver's final
    message stacks its own datum on top of the sentinel, so the combined
    exponent can exceed M+1): the pair is dropped and the sentinel queued
    for exactly one relay.  Data for already-departed primes is discarded.

    Returns human-readable anomaly notes for the conditions the protocol
    tolerates but cannot explain (goodbye for a prime never stored, goodbye
    naming the receiver itself).
    """
    if not state.active:
        return []
    # A datum x <= M stacked on a sentinel M+1 yields at most 2M+1.
    pairs = decode(message, max_exponent=2 * state.max_value + 1)
    anomalies: list[str] = []
    for prime in sorted(pairs):
        exponent = pairs[prime]
        if exponent <= state.max_value:
            if prime in state.departed:
                continue
            stored = state.table.get(prime)
            if stored is None:
                state.table[prime] = exponent
            elif stored != exponent:
                raise ProtocolError(
                    f"conflicting value for prime {prime}: stored {stored}, received {exponent}"
                )
        else:
            if prime == state.own_prime:
                anomalies.append(f"goodbye for own prime {prime} ignored")
                continue
            if prime in state.departed:
                continue
            if prime in state.table:
                del state.table[prime]
                state.prev_table.pop(prime, None)
            else:
                anomalies.append(f"goodbye for unknown prime {prime}")
            state.departed.add(prime)
            state.goodbye_relay.add(prime)
    return anomalies


def join(new_id: int, neighbor_table: dict[int, int], registry: PrimeRegistry,
         value: int, variant: Variant, max_value: int) -> AgentState:
    """Admit a new agent by querying one neighbor's (steady-state) table.

    The joiner takes the smallest prime absent from that table, records it
    in the registry, and starts from scratch: its own pair is the only
    entry, so the regular dissemination machinery announces it.
    """
    prime = smallest_unused_prime(neighbor_table.keys(), cap=registry.cap)
    registry.assign(new_id, prime)
    return make_agent(new_id, prime, value, variant, max_value)


def leave(state: AgentState) -> int:
    """Form the final goodbye message and deactivate the agent.

    The normal message for this round is multiplied by own_prime**(M+1);
    under the full variant the own pair is part of that product, so the
    receiver sees a combined exponent own_value + M + 1.
    """
    if not state.active:
        raise ProtocolError(f"agent {state.agent_id} already departed")
    message = form_message(state) * state.own_prime**state.sentinel
    state.active = False
    return message
