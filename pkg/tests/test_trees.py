"""Decidable trees: codecs, the Kleene tree, censuses, branch deciders."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fanlab.machine import (
    BLOCK_ALL,
    Converged,
    encode_program,
    pair,
    run,
)
from fanlab.trees import (
    BranchDecider,
    DecidableTree,
    IncoherentBranch,
    at_most_ones_tree,
    bits_to_code,
    branch_to_decider,
    check_prefix_closed,
    code_to_bits,
    format_bits,
    full_scan_count,
    full_tree,
    is_canonical_bits_code,
    kleene_tree,
    kleene_witness,
    leftmost_path,
    level_census,
    level_count,
    levels,
    measure_upper,
    parse_bits,
    wwkl_witness,
    zeros_tree,
)

from helpers import branch_program, pattern_bits, pattern_prefix_codes

bit_lists = st.lists(st.integers(min_value=0, max_value=1), max_size=24)


# ---------------------------------------------------------------------------
# Sequence codec

def test_bits_code_examples():
    assert bits_to_code(()) == 0
    assert bits_to_code((1, 0, 1)) == pair(3, 5)  # LSB-first value 5


@given(bit_lists)
def test_bits_roundtrip(bits):
    bits = tuple(bits)
    assert code_to_bits(bits_to_code(bits)) == bits


def test_canonical_code_check():
    assert is_canonical_bits_code(bits_to_code((0, 1, 1)))
    assert not is_canonical_bits_code(pair(1, 5))  # value 5 needs 3 bits, length says 1


def test_bits_text_roundtrip():
    assert format_bits(()) == "-"
    assert parse_bits("-") == ()
    assert parse_bits("0110") == (0, 1, 1, 0)
    assert format_bits((0, 1, 1, 0)) == "0110"
    with pytest.raises(ValueError):
        parse_bits("012")


# ---------------------------------------------------------------------------
# Kleene tree

def test_kleene_contains_root():
    assert kleene_tree().contains(())


def test_kleene_levels_nonempty_to_12():
    widths = [len(frontier) for _, frontier in levels(kleene_tree(), 12)]
    assert all(widths)
    # Regression: the plain tree is a single path this deep.
    assert widths == [1] * 13


def test_kleene_witness_is_member_and_frozen():
    witness = kleene_witness(BLOCK_ALL, 12)
    assert kleene_tree().contains(witness)
    assert format_bits(witness) == "111000001011"


def test_kleene_prefix_closed_to_depth_10():
    assert check_prefix_closed(kleene_tree(), 10) == []


def test_kleene_deep_pin_at_halt_index():
    # encode([HALT]) = 76 is an explicit total machine: {76}(76) = 76 in 1 step.
    res = run(76, 76, BLOCK_ALL, 10)
    assert res.outcome == Converged(76) and res.steps == 1
    # Past level max(76, 1), members must dodge its parity: bit 76 must be 1.
    frontier = None
    for _, frontier in levels(kleene_tree(), 77):
        pass
    assert frontier and all(b[76] == 1 for b in frontier)
    assert len(frontier) == 64  # regression value


def test_kleene_witness_prefixes_nest():
    longer = kleene_witness(BLOCK_ALL, 10)
    shorter = kleene_witness(BLOCK_ALL, 6)
    assert longer[:6] == shorter


# ---------------------------------------------------------------------------
# Censuses and measures

def test_level_counts_for_reference_trees():
    assert level_count(full_tree(), 5) == 32
    assert level_count(zeros_tree(), 7) == 1
    assert level_count(kleene_tree(), 8) == 1  # regression value
    assert [level_count(at_most_ones_tree(1), n) for n in range(7)] == [1, 2, 3, 4, 5, 6, 7]


def test_frontier_matches_full_scan():
    for tree in [full_tree(), zeros_tree(), at_most_ones_tree(1), kleene_tree()]:
        for n in range(9):
            assert level_count(tree, n, method="frontier") == full_scan_count(tree, n)


def test_census_counts_shape():
    census = level_census(at_most_ones_tree(2), 6)
    assert census.counts[0] == 1
    for n in range(6):
        assert census.counts[n + 1] <= 2 * census.counts[n]


def _random_pruned_tree(seed: int) -> DecidableTree:
    import hashlib

    def alive(bits) -> bool:
        digest = hashlib.sha256(f"{seed}:{bits}".encode()).digest()
        return digest[0] >= 24  # keep ~91% of children

    def member(bits) -> bool:
        return all(alive(bits[:k]) for k in range(1, len(bits) + 1))

    return DecidableTree.from_predicate(member, label=f"pruned{seed}")


def test_measure_upper_examples_and_monotonicity():
    assert measure_upper(full_tree(), 7) == 1
    assert measure_upper(zeros_tree(), 6) == Fraction(1, 64)
    for seed in range(10):
        tree = _random_pruned_tree(seed)
        measures = [measure_upper(tree, n) for n in range(8)]
        assert all(b <= a for a, b in zip(measures, measures[1:]))


def test_prefix_closure_checker_catches_violation():
    broken = DecidableTree.from_predicate(lambda b: b != (0,), label="gap")
    bad = check_prefix_closed(broken, 3)
    assert (0, 0) in bad


# ---------------------------------------------------------------------------
# WWKL witness search

def _brute_force_witness(tree: DecidableTree, n_max: int) -> int | None:
    # Independent route: full scans only, no frontier reuse.
    for n in range(n_max + 1):
        if 2 * full_scan_count(tree, n) <= (1 << n):
            return n
    return None


def test_wwkl_full_tree_has_no_witness():
    assert wwkl_witness(full_tree(), 10) is None
    assert _brute_force_witness(full_tree(), 10) is None


def test_wwkl_zeros_tree():
    assert wwkl_witness(zeros_tree(), 10) == 1
    assert _brute_force_witness(zeros_tree(), 10) == 1


def test_wwkl_at_most_one_one():
    # Level counts are n+1; half of 2^n first catches up at n = 3 (4 <= 4).
    tree = at_most_ones_tree(1)
    assert wwkl_witness(tree, 10) == 3
    assert _brute_force_witness(tree, 10) == 3


def test_wwkl_minimality():
    for tree in [zeros_tree(), at_most_ones_tree(1), at_most_ones_tree(2)]:
        n = wwkl_witness(tree, 10)
        assert n is not None
        for m in range(n):
            assert 2 * level_count(tree, m) > (1 << m)


def test_wwkl_respects_n_max():
    assert wwkl_witness(at_most_ones_tree(1), 2) is None


# ---------------------------------------------------------------------------
# Leftmost paths

def test_leftmost_path_reference_trees():
    assert leftmost_path(full_tree(), 4) == (0, 0, 0, 0)
    assert leftmost_path(zeros_tree(), 6) == (0,) * 6


def test_leftmost_path_skips_pruned_left_subtree():
    pruned = DecidableTree.from_predicate(
        lambda b: not (len(b) >= 3 and b[0] == 0), label="no-left-past-2"
    )
    path = leftmost_path(pruned, 5)
    assert path is not None and path[0] == 1


def test_leftmost_path_none_when_tree_dies():
    stub = DecidableTree.from_predicate(lambda b: len(b) <= 2, label="stub")
    assert leftmost_path(stub, 3) is None


# ---------------------------------------------------------------------------
# Branch programs to deciders

def test_zeros_branch_accepts_exactly_zeros():
    rb = encode_program(branch_program(pattern_prefix_codes((0,), 10)))
    decider = branch_to_decider(rb)
    assert decider.contains((0, 0, 0, 0))
    assert not decider.contains((0, 1, 0))
    assert not decider.contains((1,))


@pytest.mark.parametrize("pattern", [(1, 0), (1, 1, 0), (0, 1, 1, 0)])
def test_pattern_branch_matches_direct_lookup(pattern):
    rb = encode_program(branch_program(pattern_prefix_codes(pattern, 10)))
    decider = branch_to_decider(rb, fuel=10**7)
    for m in range(11):
        expected = pattern_bits(pattern, m)
        assert decider.contains(expected)
        if m >= 1:
            flipped = expected[:-1] + (1 - expected[-1],)
            assert not decider.contains(flipped)


def test_branch_decider_one_call_per_fresh_length():
    rb = encode_program(branch_program(pattern_prefix_codes((1, 0), 10)))
    decider = BranchDecider(rb)
    decider.contains((1, 0, 1, 0, 1))
    assert decider.calls == 1
    decider.contains((0, 0, 0, 0, 0))  # same length: cached output, no new run
    assert decider.calls == 1
    decider.contains((1, 0))
    assert decider.calls == 2


def test_branch_wrong_length_raises():
    # Output at m has length m+1.
    codes = pattern_prefix_codes((1, 0), 11)[1:]
    rb = encode_program(branch_program(codes))
    with pytest.raises(IncoherentBranch):
        branch_to_decider(rb, fuel=10**7).contains((1, 0, 1))


def test_branch_chain_break_raises():
    # Length-3 output contradicts the length-2 one.
    codes = pattern_prefix_codes((0,), 10)
    codes[3] = bits_to_code((0, 1, 0))
    rb = encode_program(branch_program(codes))
    decider = branch_to_decider(rb)
    decider.contains((0, 0))
    with pytest.raises(IncoherentBranch):
        decider.contains((0, 1, 0))


def test_branch_non_canonical_output_raises():
    loop = encode_program(branch_program([pair(1, 5)]))  # not a sequence code
    with pytest.raises(IncoherentBranch):
        branch_to_decider(loop).contains(())
