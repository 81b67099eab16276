"""Tests for the beta_count module."""
import itertools
from fractions import Fraction

import pytest

from arithdyn.beta_core import Beta
from arithdyn.beta_count import (
    Block,
    block_matrix_count,
    blockwise_multiplicativity_check,
    branching_explore,
    brute_force_classes,
    brute_force_count,
    convergent,
    count_block,
    count_equivalent_words,
    first_choice_depth,
    g_decode,
    g_product,
    goldenshift,
    split_blocks,
)
from arithdyn.digits import DigitSeq
from arithdyn.errors import (
    BlockResidualError,
    InadmissibleError,
    OutOfRangeError,
    SpecParseError,
    UndecidableAtDepthError,
)


class TestEquivalentWords:
    """Tests for counting words with the same golden-ratio value."""

    @pytest.mark.parametrize(
        "word,expected",
        [("100", 2), ("10000", 3), ("10100", 3), ("100100", 4), ("10000100", 6)],
    )
    def test_counts(self, word, expected):
        """Class sizes from the carry automaton."""
        assert count_equivalent_words(word) == expected

    def test_agrees_with_brute_force(self):
        """The automaton and enumeration agree on a longer word."""
        word = "1001010000100"
        assert count_equivalent_words(word) == brute_force_count(word)

    def test_all_classes_partition_words(self):
        """Class sizes of length-6 words sum to 2^6."""
        assert sum(brute_force_classes(6).values()) == 64

    def test_strict_rejects_adjacent_ones(self):
        """Strict mode refuses 11."""
        with pytest.raises(SpecParseError) as exc_info:
            count_equivalent_words("0110", strict=True)
        assert exc_info.value.position == 1

    def test_non_binary(self):
        """Only 0 and 1 are symbols."""
        with pytest.raises(SpecParseError) as exc_info:
            count_equivalent_words("102")
        assert exc_info.value.position == 2

    def test_brute_force_limit(self):
        """Enumeration stops at length 24."""
        with pytest.raises(OutOfRangeError):
            brute_force_count("0" * 25)


class TestPrefixCode:
    """Tests for the 00, 010, 10 code."""

    def test_decode(self):
        """00 010 10 reads abc."""
        assert g_decode("0001010") == "abc"

    def test_decode_failure(self):
        """011 starts no codeword."""
        with pytest.raises(SpecParseError) as exc_info:
            g_decode("011")
        assert exc_info.value.position == 0

    def test_product(self):
        """A single b contributes 1/2."""
        assert g_product("010") == Fraction(1, 2)
        assert g_product("00") == 1


class TestBlocks:
    """Tests for golden-ratio blocks."""

    @pytest.mark.parametrize(
        "params,expected",
        [((1,), 2), ((2,), 3), ((1, 1), 3), ((1, 1, 1), 5), ((2, 1), 4), ((1, 2), 5)],
    )
    def test_count(self, params, expected):
        """The class size of B(a_1..a_r) is p_r + q_r."""
        block = Block(params)
        assert count_block(block) == expected
        assert block_matrix_count(block) == expected
        assert count_equivalent_words(block.render()) == expected

    def test_render_and_parse(self):
        """B(2, 1) is 1 0101 00."""
        block = Block((2, 1))
        assert block.render() == "1010100"
        assert block.variant == "01-first"
        assert len(block) == 7
        assert Block.parse("1010100") == block

    def test_parse_rejects_non_block(self):
        """A block ends in 00."""
        with pytest.raises(SpecParseError):
            Block.parse("101")

    def test_positive_parameters(self):
        """Parameters start at 1."""
        with pytest.raises(OutOfRangeError):
            Block((0,))

    def test_convergent(self):
        """[0; 1, 2] = 2/3."""
        assert convergent((1, 2)) == (2, 3)

    def test_split(self):
        """Leading zeros, one block, then a residual."""
        split = split_blocks("00100101")
        assert split.leading_zeros == 2
        assert split.blocks == [Block((1,))]
        assert split.residual == "101"

    def test_multiplicative(self):
        """Class sizes multiply across blocks."""
        assert blockwise_multiplicativity_check("10000100")

    def test_residual_reported(self):
        """A trailing non-block is an error."""
        with pytest.raises(BlockResidualError) as exc_info:
            blockwise_multiplicativity_check("00100101")
        assert exc_info.value.residual == "101"


class TestGoldenshift:
    """Tests for shifting past the first block."""

    def test_shift(self):
        """100|100 becomes 100."""
        eps = DigitSeq.finite((1, 0, 0, 1, 0, 0))
        assert goldenshift(eps).preperiod == (1, 0, 0)

    def test_shift_past_01_pairs(self):
        """10100|100 becomes 100: the block ends at the next leading 1."""
        eps = DigitSeq.finite((1, 0, 1, 0, 0, 1, 0, 0))
        assert goldenshift(eps).preperiod == (1, 0, 0)

    def test_unfinished_block(self):
        """A block never followed by 1 is undecided at the depth limit."""
        with pytest.raises(UndecidableAtDepthError):
            goldenshift(DigitSeq.finite((1, 0, 1)), depth=20)

    def test_must_start_with_one(self):
        """A leading 0 is not a block start."""
        with pytest.raises(InadmissibleError):
            goldenshift(DigitSeq.finite((0, 1, 0, 0)))

    def test_adjacent_ones(self):
        """11 is not golden-admissible."""
        with pytest.raises(InadmissibleError):
            goldenshift(DigitSeq.finite((1, 0, 1, 1, 0, 0)))


class TestBranchingExplore:
    """Tests for exploring every representation."""

    def test_half_doubles_every_three_levels(self, golden_beta):
        """1/2 in the golden base has 2^k representations at depth 3k."""
        summary = branching_explore(Fraction(1, 2), golden_beta, depth=6)
        assert summary.distinct_prefixes == [1, 1, 2, 2, 2, 4, 4]
        assert summary.paths == 4
        assert summary.choice_nodes == 3
        assert not summary.capped

    def test_prefixes(self, golden_beta):
        """Prefixes are kept on request."""
        summary = branching_explore(Fraction(1, 2), golden_beta, depth=3, keep_prefixes=True)
        assert summary.prefixes == [(0, 0, 1), (0, 1, 0)]

    def test_linear_growth(self, golden_beta):
        """G - 1 has depth + 1 representations."""
        summary = branching_explore(golden_beta.value - 1, golden_beta, depth=8)
        assert summary.paths == 9

    def test_first_choice(self, golden_beta):
        """The first choice for 1/2 comes at the second digit."""
        assert first_choice_depth(Fraction(1, 2), golden_beta) == 2

    def test_depth_limit(self, golden_beta):
        """Depth is bounded by 40."""
        with pytest.raises(OutOfRangeError):
            branching_explore(Fraction(1, 2), golden_beta, depth=41)

    def test_base_range(self):
        """Exploration needs 1 < beta < 2."""
        with pytest.raises(OutOfRangeError):
            branching_explore(Fraction(1, 2), Beta.rational(3), depth=5)


def compositions(total: int):
    """Every tuple of positive integers summing to total."""
    for cuts in itertools.product((False, True), repeat=total - 1):
        parts, run = [], 1
        for cut in cuts:
            if cut:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        yield tuple(parts)


class TestBlocksExhaustive:
    """Block counts over every parameter tuple up to a fixed total."""

    @pytest.mark.parametrize("total", range(1, 9))
    def test_brute_force(self, total):
        """p_r + q_r equals enumeration while blocks fit the brute-force limit."""
        for params in compositions(total):
            block = Block(params)
            assert count_block(block) == brute_force_count(block.render()), params

    @pytest.mark.parametrize("total", range(1, 13))
    def test_automaton_and_matrices(self, total):
        """p_r + q_r equals the carry automaton and the matrix product."""
        for params in compositions(total):
            block = Block(params)
            expected = count_block(block)
            assert count_equivalent_words(block.render()) == expected, params
            assert block_matrix_count(block) == expected, params

    def test_composition_counts(self):
        """There are 2^(s-1) tuples with total s."""
        assert [len(list(compositions(s))) for s in range(1, 6)] == [1, 2, 4, 8, 16]

    @pytest.mark.parametrize("total", range(2, 8))
    def test_two_blocks_multiply(self, total):
        """Two-block words up to length 16 have the product of the block counts."""
        for first in range(1, total):
            for left in compositions(first):
                for right in compositions(total - first):
                    a, b = Block(left), Block(right)
                    word = a.render() + b.render()
                    assert len(word) <= 16
                    assert brute_force_count(word) == count_block(a) * count_block(b), word
                    assert blockwise_multiplicativity_check(word), word
