import numpy as np
import pytest

from snfc import gf
from snfc.code import check_computability, check_source_security, check_target_security
from snfc.construct import (SelectionState, assemble_transform, base_decoder, construct_base,
                            construct_source_generalized, construct_source_legacy,
                            construct_target, count_invertible, extension_lift,
                            required_field_size, select_b_vectors, selection_constraints_hold,
                            source_conditions_hold, target_conditions_hold, transform_code)
from snfc.errors import ConstructionFailed, SelectionFailed
from snfc.fixtures import (BUTTERFLY_B, BUTTERFLY_B_COLUMNS, BUTTERFLY_COMPLETION,
                           BUTTERFLY_SECURE_GLOBALS, butterfly_base_code, reverse_butterfly,
                           two_direct, two_direct_doubled)
from snfc.network import c_min, random_network, wiretap_collection
from snfc.oracle import oracle_secure_all

F3 = gf.field(3)


def _fixture_selection():
    wt = wiretap_collection(reverse_butterfly(), 1, reduce=True)
    return SelectionState(F3, 2, 1, 2, BUTTERFLY_B_COLUMNS.copy(), tuple(wt.sets))


def test_fixture_first_column_is_admissible():
    base = butterfly_base_code()
    W1 = wiretap_collection(base.net, 1)
    assert selection_constraints_hold(base, [[1], [2], [1], [2]], W1)
    # [1,0,1,0] is the sink-edge vector of e8 itself
    assert not selection_constraints_hold(base, [[1], [0], [1], [0]], W1)
    # outside the sink span is rejected too
    assert not selection_constraints_hold(base, [[1], [0], [0], [0]], [])


def test_fixture_blocks_and_code_are_reproduced():
    base = butterfly_base_code()
    kit = assemble_transform(_fixture_selection(), base, completion=BUTTERFLY_COMPLETION)
    for got, want in zip(kit.blocks, BUTTERFLY_B):
        assert got.tolist() == want.tolist()
    code = transform_code(base.net, base, kit)
    for e, g in BUTTERFLY_SECURE_GLOBALS.items():
        assert code.globals[e].tolist() == g
    assert code.source_columns["e1"].tolist() == [1, 0]
    assert check_computability(code).ravel().tolist() == [1, 2]


def test_default_completion_gives_another_valid_transform():
    base = butterfly_base_code()
    kit = assemble_transform(_fixture_selection(), base)
    code = transform_code(base.net, base, kit)
    assert check_target_security(code, wiretap_collection(base.net, 1)).secure
    assert check_computability(code) is not None


def test_base_construction_decodes_with_stacked_identity():
    net = reverse_butterfly()
    for seed in range(5):
        base = construct_base(net, 2, F3, seed)
        D = base_decoder(base)
        assert D is not None
        assert np.array_equal(gf.field(3).matmul(base.G_sink, D), np.vstack([np.eye(2)] * 2))
    with pytest.raises(ConstructionFailed):
        construct_base(net, 3, F3)


def test_base_construction_is_deterministic():
    a = construct_base(reverse_butterfly(), 2, F3, seed=11)
    b = construct_base(reverse_butterfly(), 2, F3, seed=11)
    assert a.to_dict() == b.to_dict()


def test_selection_from_fixture_base_satisfies_constraints():
    base = butterfly_base_code()
    wt = wiretap_collection(base.net, 1, reduce=True)
    sel = select_b_vectors(base.net, base, 2, 1, wt, seed=3)
    assert selection_constraints_hold(base, sel.vectors, wt)
    assert selection_constraints_hold(base, sel.vectors, wiretap_collection(base.net, 1))


def test_selection_fails_cleanly_when_impossible():
    # a wiretap set holding every sink edge sees the whole sink span
    net = two_direct_doubled()
    base = construct_base(net, 2, gf.field(3), seed=0)
    with pytest.raises(SelectionFailed):
        select_b_vectors(net, base, 2, 1, [("e1", "e2", "e3", "e4")], seed=0, samples=8)


def test_target_construction_on_butterfly():
    net = reverse_butterfly()
    code = construct_target(net, 2, 1, F3, seed=7)
    assert code.ell == 1 and code.z == (1, 1)
    W1 = wiretap_collection(net, 1)
    assert check_target_security(code, W1).secure
    assert all(oracle_secure_all(code, W1.sets, "target"))
    assert code.provenance.mode == "target" and code.provenance.reduced


@pytest.mark.parametrize("r", [0, 1, 2])
def test_target_construction_all_levels(r):
    net = reverse_butterfly()
    code = construct_target(net, 2, r, gf.field(5), seed=r)
    assert code.ell == 2 - r
    assert check_computability(code) is not None
    assert check_target_security(code, wiretap_collection(net, r)).secure


def test_rate_zero_construction_is_vacuous():
    code = construct_target(two_direct(), 1, 1, gf.field(2))
    assert code.ell == 0 and code.z == (1, 1)


def test_source_constructions_on_butterfly():
    net = reverse_butterfly()
    W1 = wiretap_collection(net, 1)
    for build in (construct_source_generalized, construct_source_legacy):
        code = build(net, 2, 1, gf.field(5), seed=2)
        assert check_source_security(code, W1).secure
        assert check_target_security(code, W1).secure
        assert all(oracle_secure_all(code, W1.sets, "source"))
        base = code.provenance.base
        M = code.provenance.kit.matrix
        assert source_conditions_hold(base, M, 1, W1)
        assert target_conditions_hold(base, M, 1, W1)


def test_legacy_r_equals_R_is_any_invertible_block():
    code = construct_source_legacy(reverse_butterfly(), 2, 2, F3, seed=0)
    assert code.ell == 0
    assert gf.rank(F3, code.provenance.kit.blocks[0]) == 2


@pytest.mark.parametrize("seed", range(20))
def test_construction_above_threshold_never_fails(seed):
    net = random_network(500 + seed)
    R = c_min(net)
    for r in range(0, R + 1):
        q = gf.smallest_prime_power_above(required_field_size(net, r))
        code = construct_target(net, R, r, gf.field(q), seed=seed)
        assert check_target_security(code, wiretap_collection(net, r)).secure
        assert check_computability(code) is not None


def test_required_field_size_examples():
    net = reverse_butterfly()
    assert required_field_size(net, 1) == 9
    assert required_field_size(net, 1, reduced=False) == 11
    assert required_field_size(net, 0) == 2


def test_extension_lift():
    assert extension_lift(2, 9, 2, 1) == {"base_field": 2, "L": 4, "field": 16, "rate": [4, 4]}
    assert extension_lift(11, 9, 2, 1)["L"] == 1


def test_count_invertible():
    assert count_invertible(3, 2) == 48
    assert count_invertible(2, 3) == 168
    assert count_invertible(5, 1) == 4


def test_mismatched_base_is_rejected():
    with pytest.raises(ValueError):
        construct_target(reverse_butterfly(), 2, 1, gf.field(5), base=butterfly_base_code())
    with pytest.raises(ValueError):
        construct_target(reverse_butterfly(), 1, 2, F3)
