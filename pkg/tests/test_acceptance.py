"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s or -rA to see them).

The sweep shared by the completion and message-oracle criteria covers 100
random connected graphs (n in [3, 30], p in {0.15, 0.3, 0.6}) plus the
path/cycle/complete/star families, under both variants, loss-free.
"""
import math
import random
from contextlib import contextmanager

import pytest

from primetime.analysis import (check_hop_equations, check_diameter_completion,
                                compare_encodings, steady_state_growth)
from primetime.cli import main
from primetime.graph import eccentricity, generate
from primetime.primes import decode, encode, first_primes
from primetime.protocol import Variant
from primetime.sim import JoinEvent, LeaveEvent, SimConfig, TopologySpec, run


@contextmanager
def criterion(number, name):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number} {name}: FAIL")
        raise
    print(f"ACCEPTANCE {number} {name}: PASS")


FAMILY_SIZES = {
    "path": (2, 3, 8, 15, 30),
    "cycle": (3, 5, 9, 20, 30),
    "complete": (2, 4, 10, 30),
    "star": (3, 6, 12, 30),
}


@pytest.fixture(scope="module")
def oracle_sweep():
    results = []
    for i in range(100):
        spec = TopologySpec(family="random_connected", n=3 + i % 28,
                            p=(0.15, 0.3, 0.6)[i % 3])
        for variant in Variant:
            results.append(run(SimConfig(topology=spec, variant=variant,
                                         max_value=4, seed=i)))
    for family, sizes in FAMILY_SIZES.items():
        for n in sizes:
            spec = TopologySpec(family=family, n=n)
            for variant in Variant:
                results.append(run(SimConfig(topology=spec, variant=variant,
                                             max_value=4, seed=n)))
    return results


def test_criterion_1_diameter_exact_completion(oracle_sweep):
    with criterion(1, "diameter-exact completion"):
        assert len(oracle_sweep) == 236  # 100 random graphs + 18 family graphs, x2 variants
        for result in oracle_sweep:
            verdict = check_diameter_completion(result)
            assert verdict.passed, (result.config, verdict.detail)


def test_criterion_2_hop_set_message_oracle(oracle_sweep):
    with criterion(2, "hop-set message oracle"):
        for result in oracle_sweep:
            d = result.diameter
            assert result.traces[-1].round_index == d + 2  # rounds recorded through d+2
            verdict = check_hop_equations(result)
            assert verdict.passed, (result.config, verdict.detail)
            full_product = encode(
                ((result.agent_primes[i], result.agent_values[i])
                 for i in result.initial_topology.nodes),
                max_exponent=result.config.max_value + 1)
            for trace in result.traces:
                if result.config.variant is Variant.INCREMENTAL:
                    if trace.round_index >= d + 1:
                        assert all(m == 1 for m in trace.messages.values())
                elif trace.round_index >= d:
                    assert all(m == full_product for m in trace.messages.values())


def test_criterion_3_codec_soundness():
    with criterion(3, "codec round-trip and multiplicativity"):
        rng = random.Random(0x5EED)
        pool = first_primes(64)
        assert decode(1, max_exponent=33) == {}
        for _ in range(10_000):
            m = rng.randint(1, 32)
            size = rng.randint(0, 20)
            pairs = {p: rng.randint(1, m + 1) for p in rng.sample(pool, size)}
            message = encode(pairs.items(), max_exponent=m + 1)
            assert decode(message, max_exponent=m + 1) == pairs
            items = sorted(pairs.items())
            split = rng.randint(0, size)
            left, right = dict(items[:split]), dict(items[split:])
            assert (encode(left.items(), max_exponent=m + 1)
                    * encode(right.items(), max_exponent=m + 1)) == message


def _churn_run(variant):
    join_round, leave_round = 8, 18
    cfg = SimConfig(
        topology=TopologySpec(family="cycle", n=10),
        variant=variant,
        max_value=4,
        data_values=(1, 2, 3, 4, 1, 2, 3, 4, 1, 2),
        events=(JoinEvent(join_round, 11, (3,), 2), LeaveEvent(leave_round, 8)),
        max_rounds=40,
        seed=0,
    )
    return run(cfg), join_round, leave_round


def test_criterion_4_open_graph_churn():
    with criterion(4, "open-graph join and leave"):
        for variant in Variant:
            result, join_round, leave_round = _churn_run(variant)
            sentinel_floor = result.config.max_value + 1

            # the joiner got the smallest unused prime: 10 agents hold the
            # first 10 primes, so the 11th is next
            joiner_prime = result.agent_primes[11]
            assert joiner_prime == 31
            new_pair = (31, 2)

            # every pre-existing agent holds the new pair within
            # eccentricity-of-attach-point rounds after the join
            ecc = eccentricity(generate("cycle", 10), 3)
            settle = next(t for t in result.traces
                          if t.round_index == join_round + ecc + 1)
            for agent in range(1, 11):
                assert new_pair in settle.tables[agent].items(), (variant, agent)

            # the departed pair vanishes from every active table
            departed_prime = result.agent_primes[8]
            final = result.traces[-1]
            assert 8 not in final.tables
            for agent, table in final.tables.items():
                assert departed_prime not in table, (variant, agent)

            # sentinel relayed exactly once per agent that had stored the pair
            holders = {a for t in result.traces
                       for a, table in t.tables.items() if departed_prime in table}
            relay_counts = {a: 0 for a in result.agent_primes}
            for trace in result.traces:
                for agent, message in trace.messages.items():
                    exponent = decode(message, max_exponent=2 * result.config.max_value + 1
                                      ).get(departed_prime, 0)
                    if exponent >= sentinel_floor:
                        relay_counts[agent] += 1
            for agent in holders:
                assert relay_counts[agent] == 1, (variant, agent)
            assert all(count <= 1 for count in relay_counts.values())


def test_criterion_5_loss_robustness_asymmetry():
    with criterion(5, "loss robustness asymmetry"):
        rates = {}
        for variant in Variant:
            completed = 0
            for seed in range(200):
                cfg = SimConfig(topology=TopologySpec(family="path", n=8),
                                variant=variant, max_value=4, loss_q=0.3,
                                max_rounds=50, seed=seed)
                if run(cfg).completion_round is not None:
                    completed += 1
            rates[variant] = completed / 200
        assert rates[Variant.PRIMETIME] - rates[Variant.INCREMENTAL] >= 0.20, rates

        # deterministic single drop: one lost relay starves the incremental
        # variant forever, while the full variant recovers a round later
        base = dict(topology=TopologySpec(family="path", n=3), max_value=4,
                    data_values=(1, 2, 3), drop_schedule=((1, 2, 3),),
                    max_rounds=30, seed=0)
        starved = run(SimConfig(variant=Variant.INCREMENTAL, **base))
        assert starved.completion_round is None
        missing = starved.agent_primes[1]
        assert all(missing not in t.tables[3] for t in starved.traces)
        assert all(m == 1 for m in starved.traces[-1].messages.values())
        recovered = run(SimConfig(variant=Variant.PRIMETIME, **base))
        assert recovered.completion_round == 3


def test_criterion_6_size_claims():
    with criterion(6, "message size claims"):
        small = [(p, 1) for p in first_primes(4)]
        product_bits, table_bits = compare_encodings(small, n_max=4, max_value=1)
        assert product_bits < table_bits, (product_bits, table_bits)

        large = [(p, 8) for p in first_primes(20)]
        product_bits, table_bits = compare_encodings(large, n_max=20, max_value=8)
        assert product_bits > table_bits, (product_bits, table_bits)

        rows = steady_state_growth(range(7, 101), max_value=1)
        assert all(row.exceeds_factorial for row in rows)
        # spot check the value-level claim directly
        primorial = 1
        for p in first_primes(10):
            primorial *= p
        assert primorial == 6469693230 > math.factorial(10)


def test_criterion_7_byte_identical_outputs(tmp_path):
    with criterion(7, "byte-identical reruns"):
        cfg = tmp_path / "cfg.ini"
        cfg.write_text("""
[topology]
family = random_connected
n = 10
p = 0.3

[protocol]
variant = incremental
max_value = 6

[loss]
mode = bernoulli
q = 0.2

[sim]
seed = 17
max_rounds = 60
""")
        for name in ("first", "second"):
            code = main(["run", "--config", str(cfg), "--out", str(tmp_path / name)])
            assert code == 0
        for fname in ("trace.csv", "summary.txt"):
            first = (tmp_path / "first" / fname).read_bytes()
            second = (tmp_path / "second" / fname).read_bytes()
            assert first == second, fname
