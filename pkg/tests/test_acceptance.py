"""
Acceptance suite.  Each test is one criterion; a PASS/FAIL line per criterion
is printed in the terminal summary (see conftest.py).

Run on its own with ``pytest tests/test_acceptance.py`` or
``python tests/test_acceptance.py``.
"""

import sys
import time
from pathlib import Path

import numpy as np
import pytest

from helpers import random_code
from snfc import gf
from snfc.bounds import closed_form, source_bound, target_bound
from snfc.cli import run
from snfc.code import (check_computability, check_source_security, check_target_security,
                       evaluate)
from snfc.construct import (SelectionState, assemble_transform, construct_base,
                            construct_source_generalized, construct_source_legacy,
                            construct_target, required_field_size, source_conditions_hold,
                            target_conditions_hold, transform_code)
from snfc.errors import TooLarge
from snfc.fixtures import (BUTTERFLY_B_COLUMNS, BUTTERFLY_COMPLETION, BUTTERFLY_SECURE_GLOBALS,
                           butterfly_base_code, reverse_butterfly, two_direct_code,
                           two_direct_doubled)
from snfc.network import c_min, c_min_S, random_network, wiretap_collection
from snfc.oracle import (default_cap, enumerate_transform_sets, oracle_secure,
                         oracle_secure_all)

DATA = Path(__file__).resolve().parent.parent / "data"
SUITE = [random_network(7000 + k) for k in range(50)]


@pytest.mark.criterion(1, "butterfly reference code reproduced exactly from the base code")
def test_criterion_1_example_reproduction(request):
    t0 = time.perf_counter()
    base = butterfly_base_code()
    net = base.net
    W1 = wiretap_collection(net, 1)
    sel = SelectionState(base.F, 2, 1, 2, BUTTERFLY_B_COLUMNS.copy(),
                         tuple(wiretap_collection(net, 1, reduce=True).sets))
    kit = assemble_transform(sel, base, completion=BUTTERFLY_COMPLETION)
    # second selected column implied by the completion
    b2 = np.concatenate([BUTTERFLY_COMPLETION[0].ravel(), BUTTERFLY_COMPLETION[1].ravel()])
    assert b2.tolist() == [0, 1, 1, 0]
    code = transform_code(net, base, kit)
    for e, g in BUTTERFLY_SECURE_GLOBALS.items():
        assert code.globals[e].tolist() == g, e
    assert check_computability(code).ravel().tolist() == [1, 2]
    assert check_target_security(code, W1).secure
    assert all(oracle_secure_all(code, W1.sets, "target"))
    rep = check_source_security(code, W1)
    assert not rep.secure and rep.witness == ("e1",)
    assert not oracle_secure(code, ["e1"], "source")
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    request.node.detail = f"9/9 globals, D=[1,2], {elapsed:.2f}s"


@pytest.mark.criterion(2, "bound command on the butterfly fixture")
def test_criterion_2_bound_reproduction(request):
    times = []
    for r, expect in ((1, 1), (0, 2)):
        t0 = time.perf_counter()
        report, status = run(["bound", str(DATA / "rbfly.json"), "--r", str(r)])
        times.append(time.perf_counter() - t0)
        assert status == 0
        assert report["results"]["target_bound"] == expect
        assert times[-1] < 1.0
    assert c_min(reverse_butterfly()) == 2
    request.node.detail = f"r=1 -> 1, r=0 -> 2, max {max(times):.2f}s"


@pytest.mark.criterion(3, "subspace verdicts equal the exact oracle on random codes")
def test_criterion_3_equivalence(request):
    t0 = time.perf_counter()
    tally = {}
    for kind, check, seeds in (("target", check_target_security, range(0, 100)),
                               ("source", check_source_security, range(100, 200))):
        secure = agree = 0
        for seed in seeds:
            code, W = random_code(seed)
            sub = check(code, [W]).secure
            orc = oracle_secure(code, W, kind)
            assert sub == orc, (kind, seed, W)
            agree += 1
            secure += sub
        tally[kind] = (agree, secure)
    elapsed = time.perf_counter() - t0
    assert elapsed < 60
    request.node.detail = (f"target {tally['target'][0]}/100 agree ({tally['target'][1]} secure), "
                           f"source {tally['source'][0]}/100 agree ({tally['source'][1]} secure), "
                           f"{elapsed:.1f}s")


@pytest.mark.criterion(4, "closed-form sandwich and source/target ordering on random DAGs")
def test_criterion_4_sandwich(request):
    t0 = time.perf_counter()
    checked = 0
    for net in SUITE:
        assert len(net.edges) <= 10 and net.s <= 3
        cm, cs = c_min(net), c_min_S(net)
        for r in range(0, cs + 1):
            t = target_bound(net, r, prune=False)
            lo, hi = closed_form(net, r)
            assert (lo, hi) == (max(0, cm - r), min(cm, cs - r))
            assert lo <= t <= hi
            assert source_bound(net, r) <= t
            checked += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 120
    request.node.detail = f"{len(SUITE)} DAGs, {checked} (net, r) pairs, {elapsed:.1f}s"


@pytest.mark.criterion(5, "target construction above the field threshold is sound")
def test_criterion_5_construction(request):
    t0 = time.perf_counter()
    cap = default_cap()
    built = oracle_done = positive = 0
    over_cap = []
    for k, net in enumerate(SUITE):
        for R in range(0, c_min(net) + 1):
            for r in range(0, R + 1):
                q = gf.smallest_prime_power_above(required_field_size(net, r))
                code = construct_target(net, R, r, gf.field(q), seed=k)
                built += 1
                assert code.ell == R - r
                assert check_computability(code) is not None
                full = wiretap_collection(net, r)
                assert check_target_security(code, full).secure
                if R - r == 0:
                    continue
                positive += 1
                try:
                    assert all(oracle_secure_all(code, full.sets, "target", cap))
                    oracle_done += 1
                except TooLarge:
                    over_cap.append((k, R, r, q))
    elapsed = time.perf_counter() - t0
    assert elapsed < 300
    request.node.detail = (f"{built} constructions, 0 failures; oracle-verified {oracle_done}/{positive} "
                           f"positive-rate codes, {len(over_cap)} above the {cap:.0e} enumeration cap "
                           f"checked by subspace only; {elapsed:.1f}s")


@pytest.mark.criterion(6, "rate C_min - r attains the target bound when C_min = C_min^S")
def test_criterion_6_tightness(request):
    nets = [(k, n) for k, n in enumerate(SUITE) if c_min(n) == c_min_S(n)]
    assert nets
    pairs = 0
    for k, net in nets:
        R = c_min(net)
        for r in range(0, R + 1):
            q = gf.smallest_prime_power_above(required_field_size(net, r))
            code = construct_target(net, R, r, gf.field(q), seed=k)
            assert check_target_security(code, wiretap_collection(net, r)).secure
            assert code.ell == target_bound(net, r, prune=False) == c_min_S(net) - r
            pairs += 1
    request.node.detail = f"{len(nets)} DAGs with C_min = C_min^S, {pairs} levels"


@pytest.mark.criterion(7, "shared-block constructions satisfy both condition sets; transform counts")
def test_criterion_7_containment_and_counting(request):
    t0 = time.perf_counter()
    outputs = 0
    for k, net in enumerate(SUITE):
        R = c_min(net)
        for r in range(0, R + 1):
            q = gf.smallest_prime_power_above(required_field_size(net, r, reduced=False))
            full = wiretap_collection(net, r)
            for build in (construct_source_generalized, construct_source_legacy):
                code = build(net, R, r, gf.field(q), seed=k)
                base, M = code.provenance.base, code.provenance.kit.matrix
                assert source_conditions_hold(base, M, r, full)
                assert target_conditions_hold(base, M, r, full)
                assert check_target_security(code, full).secure
                outputs += 1

    counts = []
    for base in (construct_base(two_direct_doubled(), 2, gf.field(3), seed=0),
                 butterfly_base_code()):
        c = enumerate_transform_sets(base, 2, 1, method="exhaustive")
        assert c.count_Ahat <= c.count_Bhat
        assert c.membership_ok and c.containment_ok
        if c.lower_bound_Bhat > 0:
            assert c.count_Bhat >= c.lower_bound_Bhat
        counts.append(c)
    # fields where the closed-form lower bound is positive
    bounded = 0
    for q in (8, 9, 11):
        c = enumerate_transform_sets(construct_base(two_direct_doubled(), 2, gf.field(q), seed=0),
                                     2, 1, method="bijection")
        assert c.lower_bound_Bhat > 0 and c.count_Bhat >= c.lower_bound_Bhat
        assert c.count_Ahat <= c.count_Bhat
        bounded += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 300
    request.node.detail = (f"{outputs} shared-block outputs; q=3 counts (B, A) = "
                           f"{[(c.count_Bhat, c.count_Ahat) for c in counts]}, "
                           f"lower bound checked at q=8,9,11; {elapsed:.1f}s")


@pytest.mark.criterion(8, "keyless two-source code is secure at r = 1 and computes the sum")
def test_criterion_8_keyless(request):
    t0 = time.perf_counter()
    code = two_direct_code(2)
    assert code.F.q == 2 and code.z == (0, 0)
    W1 = wiretap_collection(code.net, 1)
    assert all(oracle_secure_all(code, W1.sets, "target"))
    assert check_target_security(code, W1).secure
    for m1 in range(2):
        for m2 in range(2):
            assert evaluate(code, [[m1], [m2]])["decoded"] == [m1 ^ m2]
    assert code.ell == 1 > max(0, c_min(code.net) - 1)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0
    request.node.detail = f"rate 1 with no keys vs guaranteed C_min - r = 0, {elapsed:.2f}s"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
