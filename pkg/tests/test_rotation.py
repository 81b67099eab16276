"""Tests for the rotation module."""
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from arithdyn.adic import AdicPath, Extremal, predecessor, successor
from arithdyn.errors import (
    InadmissibleError,
    OutOfRangeError,
    RationalInputError,
    UndecidableAtDepthError,
)
from arithdyn.rotation import (
    Cardinality,
    ContinuedFraction,
    cf_expand,
    digit_statistics,
    integer_encode1,
    integer_encode2,
    limit_theorem_conditions,
    markov_measure,
    model1_compactum,
    model2_compactum,
    ostrowski_encode,
    ostrowski_encode1,
    partial_sum,
    psi1,
    psi2,
    replaceable_positions,
    sample_digits,
    unique_rotational_analysis,
    unique_rotational_witness,
)


class TestContinuedFraction:
    """Tests for continued fraction expansions."""

    def test_quadratic_is_periodic(self, silver_cf):
        """sqrt 2 - 1 = [0; (2)]."""
        assert silver_cf.exact
        assert silver_cf.preperiod == ()
        assert silver_cf.period == (2,)
        assert silver_cf.render() == "[0; (2)]"

    def test_convergents(self, silver_cf):
        """0, 1/2, 2/5, 5/12."""
        assert silver_cf.convergents(4) == [
            Fraction(0),
            Fraction(1, 2),
            Fraction(2, 5),
            Fraction(5, 12),
        ]

    def test_from_quotients_matches_expansion(self, silver_cf):
        """A period pins down the same quadratic irrational."""
        built = ContinuedFraction.from_quotients((), (2,))
        assert built.alpha == silver_cf.alpha

    def test_from_quotients_shortens_period(self, silver_cf):
        """(2, 2) and 2, (2) are the same expansion as (2)."""
        for pre, per in [((), (2, 2)), ((2,), (2,)), ((2, 2), (2, 2, 2))]:
            built = ContinuedFraction.from_quotients(pre, per)
            assert built.preperiod == ()
            assert built.period == (2,)
            assert built.alpha == silver_cf.alpha

    def test_from_quotients_absorbs_preperiod(self):
        """3, (1, 3) rotates into (3, 1)."""
        built = ContinuedFraction.from_quotients((3,), (1, 3))
        assert built.preperiod == ()
        assert built.period == (3, 1)
        assert built.quotients(5) == [3, 1, 3, 1, 3]

    def test_fibonacci_denominators(self, zeckendorf_cf):
        """[0; 2, 1, 1, ...] has q_n = 1, 2, 3, 5, 8."""
        assert [zeckendorf_cf.q(n) for n in range(1, 6)] == [1, 2, 3, 5, 8]
        sqrt5 = zeckendorf_cf.alpha.field.generator
        assert zeckendorf_cf.alpha == Fraction(3, 2) - sqrt5 / 2

    def test_residues(self, silver_cf):
        """alpha_0 = 1, alpha_1 = alpha, alpha_2 = alpha^2."""
        alpha = silver_cf.alpha
        assert silver_cf.residue(0) == 1
        assert silver_cf.residue(1) == alpha
        assert silver_cf.residue(2) == alpha * alpha

    def test_identities(self, silver_cf, golden_cf):
        """q_k alpha_(k-1) + q_(k-1) alpha_k = 1 holds exactly."""
        assert silver_cf.identity_check(12)
        assert golden_cf.identity_check(12)

    def test_numeric_identities(self):
        """The identities also hold for a numeric alpha."""
        cf = cf_expand(mpmath.pi - 3)
        assert cf.quotients(4) == [7, 15, 1, 292]
        assert cf.identity_check(8)

    def test_tail_ratio(self, silver_cf):
        """alpha_n / alpha_(n-1) = [0; 2, 2, ...]."""
        assert abs(silver_cf.tail_ratio(3) - (mpmath.sqrt(2) - 1)) < mpmath.mpf(10) ** -25

    def test_complement(self, silver_cf):
        """1 - (sqrt 2 - 1) = [0; 1, 1, 2, 2, ...]."""
        complement = silver_cf.complement()
        assert complement.quotients(5) == [1, 1, 2, 2, 2]
        assert complement.alpha == 1 - silver_cf.alpha

    def test_finite_quotient_list(self):
        """Quotients beyond a finite list are unknown."""
        cf = ContinuedFraction.from_quotients((1, 2, 3))
        assert cf.known_depth == 3
        with pytest.raises(UndecidableAtDepthError):
            cf.quotient(4)

    def test_rational_rejected(self):
        """A rational alpha has a periodic rotation."""
        with pytest.raises(RationalInputError):
            cf_expand(Fraction(1, 2))

    def test_out_of_range(self):
        """alpha lies in (0, 1)."""
        with pytest.raises(OutOfRangeError):
            cf_expand(mpmath.mpf("1.5"))

    def test_quotients_positive(self):
        """Quotients are positive integers."""
        with pytest.raises(OutOfRangeError):
            ContinuedFraction.from_quotients((0, 1))


class TestCompacta:
    """Tests for the two rotational compacta."""

    def test_model1_needs_small_alpha(self, golden_cf):
        """Model 1 needs a_1 >= 2."""
        with pytest.raises(OutOfRangeError):
            model1_compactum(golden_cf)

    def test_model1_levels(self, silver_cf):
        """r_1 = a_1 and r_n = a_n + 1."""
        compactum = model1_compactum(silver_cf)
        assert compactum.level(1).size == 2
        assert compactum.level(2).size == 3

    def test_model2_orders_alternate(self, silver_cf):
        """Odd levels ascend, even levels descend."""
        compactum = model2_compactum(silver_cf)
        assert compactum.level(1).order == (0, 1, 2)
        assert compactum.level(2).order == (2, 1, 0)

    def test_model2_successor_is_rotation(self, silver_cf):
        """The successor of (2, 0, 0) is (0, 1, 1) and psi' moves by alpha mod 1."""
        compactum = model2_compactum(silver_cf)
        nxt = successor(AdicPath((2, 0, 0)), compactum)
        assert nxt == AdicPath((0, 1, 1))
        shift = partial_sum(nxt.digits, silver_cf) - partial_sum((2, 0, 0), silver_cf)
        assert (shift - silver_cf.alpha).is_integer

    def test_golden_extremes(self, golden_cf):
        """Alternating paths are extremal in the golden compactum."""
        compactum = model2_compactum(golden_cf)
        assert successor(AdicPath((1, 0, 1, 0)), compactum) == Extremal.MAXIMAL
        assert predecessor(AdicPath((0, 1, 0, 1)), compactum) == Extremal.MINIMAL


class TestEncodings:
    """Tests for rotational expansions of points and integers."""

    def test_ostrowski_half(self, silver_cf):
        """1/2 has digits 1, 0, 1, 0, ... for sqrt 2 - 1."""
        seq = ostrowski_encode(Fraction(1, 2), silver_cf, 20)
        assert seq.truncated
        assert seq.prefix(6) == (1, 0, 1, 0, 1, 0)
        assert psi2(seq, silver_cf, 20).contains(Fraction(1, 2))

    def test_ostrowski_finite(self, silver_cf):
        """alpha itself has the single digit 1."""
        seq = ostrowski_encode(silver_cf.alpha, silver_cf, 20)
        assert seq.preperiod == (1,)
        assert not seq.truncated

    def test_ostrowski_domain(self, silver_cf):
        """x lies in [0, 1)."""
        with pytest.raises(OutOfRangeError):
            ostrowski_encode(1, silver_cf, 10)

    def test_psi2_rejects_inadmissible(self, golden_cf):
        """A maximal digit must be followed by 0."""
        with pytest.raises(InadmissibleError):
            psi2((1, 1), golden_cf)

    def test_model1_round_trip(self, silver_cf):
        """psi1 of the model-1 digits of y is close to y."""
        y = Fraction(1, 3)
        seq = ostrowski_encode1(y, silver_cf, 30)
        assert psi1(seq, silver_cf, 30).contains(y)

    def test_model1_alpha_is_empty(self, silver_cf):
        """psi1 of the zero sequence is alpha."""
        seq = ostrowski_encode1(silver_cf.alpha, silver_cf, 10)
        assert seq.preperiod == ()
        assert psi1(seq, silver_cf).contains(silver_cf.alpha)

    def test_integers_model1_are_zeckendorf(self, zeckendorf_cf):
        """N - 1 is written greedily in Fibonacci numbers, with no adjacent ones."""
        assert integer_encode1(4, zeckendorf_cf).preperiod == (0, 0, 1)
        assert integer_encode1(1, zeckendorf_cf).preperiod == ()
        for n in range(1, 40):
            digits = integer_encode1(n, zeckendorf_cf).preperiod
            assert 1 + sum(d * zeckendorf_cf.q(k) for k, d in enumerate(digits, start=1)) == n
            assert "11" not in "".join(map(str, digits))

    def test_integers_model1_positive(self, zeckendorf_cf):
        """Model 1 numbers positive integers."""
        with pytest.raises(OutOfRangeError):
            integer_encode1(0, zeckendorf_cf)

    def test_integers_model2(self, golden_cf):
        """N = sum x_n (-1)^n q_n for the golden alpha."""
        assert integer_encode2(0, golden_cf).preperiod == ()
        assert integer_encode2(1, golden_cf).preperiod == (0, 1)
        assert integer_encode2(-1, golden_cf).preperiod == (1,)

    def test_integers_model2_identity(self, silver_cf):
        """Every integer in a range is represented."""
        for n in range(-15, 16):
            digits = integer_encode2(n, silver_cf).preperiod
            assert sum(d * (-1) ** k * silver_cf.q(k) for k, d in enumerate(digits, start=1)) == n


class TestMeasure:
    """Tests for the Markov measures on rotational paths."""

    def test_initial_law_sums_to_one(self, silver_cf):
        """The initial law is a probability vector."""
        measure = markov_measure(silver_cf)
        assert sum(measure.initial(i) for i in range(3)) == 1

    def test_marginals(self, silver_cf):
        """The closed-form marginal matches propagation through the kernels."""
        measure = markov_measure(silver_cf)
        assert list(measure.propagated_marginal(2)) == list(measure.marginal_vector(2))
        assert sum(measure.marginal_vector(4)) == 1

    def test_kernel_rows(self, silver_cf):
        """Every kernel row sums to one."""
        kernel = markov_measure(silver_cf).kernel(3)
        for row in kernel:
            assert sum(row) == 1

    def test_samples_are_admissible(self, silver_cf):
        """A maximal digit is always followed by 0."""
        samples = sample_digits(markov_measure(silver_cf), 30, 50, seed=3)
        assert samples.shape == (50, 30)
        assert samples.max() <= 2
        assert not np.any((samples[:, :-1] == 2) & (samples[:, 1:] != 0))

    def test_statistics(self, silver_cf):
        """Moments are reported for the digit sums."""
        samples = sample_digits(markov_measure(silver_cf), 40, 200, seed=5)
        result = digit_statistics(samples)
        assert result.count == 200
        assert result.length == 40
        assert result.mean > 0
        assert 0 <= result.normality_score <= 1

    def test_model1_initial_law(self, silver_cf):
        """x_1 = 0 weighs alpha + alpha_2 and x_1 = 1 weighs alpha."""
        measure = markov_measure(silver_cf, model=1)
        assert measure.model == 1
        assert measure.size(1) == 2
        assert measure.initial(0) == silver_cf.residue(1) + silver_cf.residue(2)
        assert measure.initial(1) == silver_cf.alpha
        assert measure.initial(2) == 0
        assert sum(measure.initial(i) for i in range(2)) == 1

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_model1_kernel_rows(self, silver_cf, n):
        """Rows sum to one and a nonzero digit never precedes a_n."""
        kernel = markov_measure(silver_cf, model=1).kernel(n)
        assert kernel.shape == ((2 if n == 2 else 3), 3)
        for row in kernel:
            assert sum(row) == 1
        assert kernel[1, 2] == 0

    def test_model1_marginals(self, silver_cf):
        """Closed-form marginals sum to one and match propagation."""
        measure = markov_measure(silver_cf, model=1)
        for n in (1, 2, 3, 4):
            assert sum(measure.marginal_vector(n)) == 1
            assert list(measure.propagated_marginal(n)) == list(measure.marginal_vector(n))
        assert measure.marginal(2, 2) == silver_cf.q(1) * silver_cf.residue(2)

    def test_model1_marginals_with_ones(self, zeckendorf_cf):
        """Quotients 2, 1, 1, ... leave two digits per level."""
        measure = markov_measure(zeckendorf_cf, model=1)
        for n in (1, 2, 3, 6):
            assert len(measure.marginal_vector(n)) == 2
            assert sum(measure.marginal_vector(n)) == 1
            assert list(measure.propagated_marginal(n)) == list(measure.marginal_vector(n))

    def test_model1_samples_are_admissible(self, silver_cf):
        """Samples stay in X_alpha."""
        samples = sample_digits(markov_measure(silver_cf, model=1), 30, 400, seed=7)
        assert samples[:, 0].max() <= 1
        assert samples.max() <= 2
        assert not np.any((samples[:, :-1] > 0) & (samples[:, 1:] == 2))

    def test_model1_sample_frequencies(self, silver_cf):
        """Empirical frequencies of x_2 approach the marginal law."""
        measure = markov_measure(silver_cf, model=1)
        samples = sample_digits(measure, 3, 4000, seed=11)
        for i in range(3):
            assert abs(np.mean(samples[:, 1] == i) - float(measure.marginal(2, i))) < 0.03

    def test_model1_measure_needs_small_alpha(self, golden_cf):
        """a_1 = 1 has no model-1 compactum."""
        with pytest.raises(OutOfRangeError):
            markov_measure(golden_cf, model=1)

    def test_unknown_model(self, silver_cf):
        """Only models 1 and 2 exist."""
        with pytest.raises(OutOfRangeError):
            markov_measure(silver_cf, model=3)

    def test_limit_conditions(self, silver_cf):
        """Bounded quotients satisfy every condition."""
        result = limit_theorem_conditions(silver_cf, 100)
        assert result.lln and result.slln and result.clt
        assert result.max_quotient == 2

    def test_limit_conditions_unknown(self):
        """A finite quotient list decides nothing."""
        result = limit_theorem_conditions(ContinuedFraction.from_quotients((1, 2, 3)))
        assert result.lln is None
        assert result.max_quotient == 3


class TestUniqueRepresentations:
    """Tests for points with a unique rotational representation."""

    def test_replaceable_positions(self, silver_cf):
        """(1, 0, 0) can be rewritten at level 2."""
        assert replaceable_positions((1, 0, 0), silver_cf) == [2]

    def test_golden_has_none(self, golden_cf):
        """Infinitely many a_n = 1 leave no unique point."""
        report = unique_rotational_analysis(golden_cf)
        assert report.empty
        assert report.cardinality == Cardinality.FINITE
        assert unique_rotational_witness(golden_cf) is None

    def test_twos(self, silver_cf):
        """All quotients 2: a finite, null set of zero dimension."""
        report = unique_rotational_analysis(silver_cf)
        assert report.empty is False
        assert report.measure_zero
        assert report.cardinality == Cardinality.FINITE
        assert report.dim_positive is False
        assert str(unique_rotational_witness(silver_cf)) == "(1)"

    @pytest.mark.parametrize(
        "pre,per,n0", [((), (2, 2), 0), ((1,), (2, 2), 1), ((3, 1), (2, 2, 2), 2)]
    )
    def test_repeated_twos(self, pre, per, n0):
        """A period of 2s written more than once still gives a finite set."""
        report = unique_rotational_analysis(ContinuedFraction.from_quotients(pre, per), 50)
        assert report.cardinality == Cardinality.FINITE
        assert report.dim_positive is False
        assert report.n0 == n0

    def test_threes(self):
        """Quotients 3 give a continuum of positive dimension."""
        report = unique_rotational_analysis(ContinuedFraction.from_quotients((), (3,)))
        assert report.cardinality == Cardinality.CONTINUUM
        assert report.dim_positive
        assert report.to_json()["cardinality"] == "Continuum"

    def test_non_periodic_is_unknown(self):
        """Verdicts need the whole quotient tail."""
        report = unique_rotational_analysis(cf_expand(mpmath.pi - 3))
        assert report.cardinality == Cardinality.UNKNOWN
        assert report.empty is None
