import itertools

import pytest

from seifill.core.cf import chain_value, dual_chain
from seifill.errors import DomainError, UniverseMismatchError
from seifill.models import INNER, BPattern, Hole, HoleKind, Leg, OpenBook, SignedTwist
from seifill.services.abmap import ab_class, positive_feasible
from seifill.services.factorization import (
    daisy_rewrite,
    extract_bpattern,
    synthesize_chains,
    verify_certificate,
)
from seifill.services.openbook import reroot, translate, translate_legs


def _one_sided(chain, sign):
    stabs = [-a - 1 if j == 0 else -a - 2 for j, a in enumerate(chain)]
    return Leg(coefficients=tuple(chain), rotations=tuple(sign * s for s in stabs))


def _sublink_book(positive, negative):
    return translate_legs({1: _one_sided(positive, 1), 2: _one_sided(negative, -1)})


def _dual_pairs(max_length):
    """Every (chain, dual) pair whose combined length is at most ``max_length``."""
    pairs = []
    for total in range(1, max_length):
        for k in range(1, total + 1):
            for cuts in itertools.combinations(range(1, total), k - 1):
                bounds = (0, *cuts, total)
                chain = tuple(-(bounds[i + 1] - bounds[i]) - 1 for i in range(k))
                dual = dual_chain(chain)
                if len(chain) + len(dual) <= max_length:
                    pairs.append((chain, dual))
    return pairs


class TestBPattern:
    @pytest.mark.parametrize(
        ("positive", "negative", "runs"),
        [
            ((-3, -3), (-2, -3, -2), (1, 0, 0, 0)),
            ((-2,), (-2,), (0, 0)),
            ((-4,), (-2, -2, -2), (2, 0)),
            ((-2, -2), (-3,), (0, 1)),
        ],
    )
    def test_extract(self, positive, negative, runs):
        assert extract_bpattern(positive, negative).runs == runs

    def test_synthesis_inverts_extraction(self):
        for positive, negative in _dual_pairs(8):
            pattern = extract_bpattern(positive, negative)
            assert synthesize_chains(pattern) == (positive, negative)

    def test_synthesized_chains_are_dual(self):
        for runs in itertools.product(range(3), repeat=4):
            positive, negative = synthesize_chains(BPattern(runs=runs))
            assert chain_value(positive) + chain_value(negative) == 1

    def test_duality_violation(self):
        with pytest.raises(DomainError, match="duality violation"):
            extract_bpattern((-3,), (-3,))

    @pytest.mark.parametrize(
        ("runs", "closed"),
        [((1, 0, 0, 0), (1, 0, 1)), ((1, 0, 2, 1), (1, 0, 2, 1)), ((2, 0), (2, 0))],
    )
    def test_closed_runs(self, runs, closed):
        assert BPattern(runs=runs).closed_runs == closed

class TestDaisyRewrite:
    def test_sample_factorization(self, sample_sublink_book):
        result = daisy_rewrite(sample_sublink_book)
        assert all(t.sign == 1 for t in result.twists)
        assert sorted(t.names for t in result.twists) == sorted(
            [
                ("in", "L3.1.1", "R1.2.1"),
                ("in", "L3.1.2", "R1.2.1"),
                ("in", "L3.1.1", "L3.1.2", "R1.1.1"),
                ("L3.1.1", "L3.1.2", "L3.2.1", "R1.1.1", "R1.2.1"),
                ("in", "L3.2.1"),
            ]
        )
        assert verify_certificate(sample_sublink_book, result.twists)
        assert result.pattern.runs == (1, 0, 0, 0)
        assert result.pattern.closed_runs == (1, 0, 1)

    def test_sample_schedule(self, sample_sublink_book):
        result = daisy_rewrite(sample_sublink_book)
        assert result.pivot == Hole.parse("L3.1.2")
        assert [step.side for step in result.steps] == ["inside", "outside", "inside"]
        assert [step.level for step in result.steps] == [1, 2, 3]
        assert [step.negatives for step in result.steps] == [1, 2, 0]

        first, second, last = result.steps
        assert first.d.names == ("L3.1.1", "R1.1.1")
        assert first.n.names == ("in", "L3.1.1", "R1.1.1", "R1.2.1")
        assert first.n_prime is None

        assert second.added == (Hole.parse("R1.2.1"),)
        assert second.d.names == ("L3.1.1", "R1.1.1", "R1.2.1")
        assert second.n == first.n
        assert second.n_prime.names == ("out", "L3.1.1", "L3.2.1", "R1.1.1", "R1.2.1")
        assert second.n_prime in second.produced

        assert last.closing == Hole.parse("out")
        assert last.d.holes == second.n_prime.holes
        assert second.n in last.consumed and second.n_prime in last.consumed
        assert last.n is None and last.n_prime is None

    def test_trace_replays_to_the_input_class(self, sample_sublink_book):
        for book in (sample_sublink_book, _sublink_book((-2, -2), (-3,))):
            result = daisy_rewrite(book)
            running = list(reroot(book, result.pivot).twists)
            for step in result.steps:
                for twist in step.consumed:
                    running.remove(
                        next(
                            t
                            for t in running
                            if (t.sign, t.holes) == (twist.sign, twist.holes)
                        )
                    )
                running.extend(step.produced)
                assert sum(1 for t in running if t.sign < 0) == step.negatives
                seen = OpenBook(
                    boundaries=book.boundaries, outer=result.pivot, twists=tuple(running)
                )
                assert ab_class(reroot(seen, book.outer)) == ab_class(book)
            assert sorted(t.sort_key() for t in result.twists) == sorted(
                t.sort_key() for t in reroot(seen, book.outer).twists
            )

    def test_leg_starting_with_minus_two_may_be_the_positive_one(self):
        book = _sublink_book((-2, -2), (-3,))
        result = daisy_rewrite(book)
        assert result.pivot == Hole.parse("R2.1.2")
        assert result.pattern.runs == (1, 0)
        assert [step.closing for step in result.steps] == [INNER]
        assert verify_certificate(book, result.twists)

    def test_deterministic(self, sample_sublink_book):
        assert daisy_rewrite(sample_sublink_book) == daisy_rewrite(sample_sublink_book)

    @pytest.mark.parametrize(
        ("positive", "negative"),
        [((-2,), (-2,)), ((-4,), (-2, -2, -2))],
    )
    def test_small_pairs_agree_with_oracle(self, positive, negative):
        book = _sublink_book(positive, negative)
        result = daisy_rewrite(book)
        assert verify_certificate(book, result.twists)
        assert positive_feasible(ab_class(book)).feasible

    def test_sweep_of_dual_pairs(self):
        pairs = _dual_pairs(8)
        assert len(pairs) > 50
        for positive, negative in pairs:
            book = _sublink_book(positive, negative)
            result = daisy_rewrite(book)
            assert all(t.sign == 1 for t in result.twists)
            assert all(step.negatives <= 2 for step in result.steps)
            assert result.steps[-1].negatives == 0
            assert result.steps[-1].closing is not None
            assert verify_certificate(book, result.twists)
            assert positive_feasible(ab_class(book)).feasible

    def test_rejects_full_presentation(self, sample_presentation):
        with pytest.raises(DomainError):
            daisy_rewrite(translate(sample_presentation))

    def test_rejects_rerooted_book(self, sample_sublink_book):
        with pytest.raises(DomainError):
            daisy_rewrite(reroot(sample_sublink_book, INNER))

    def test_rejects_mixed_legs(self):
        book = translate_legs(
            {
                1: Leg(coefficients=(-3,), rotations=(0,)),
                2: Leg(coefficients=(-3,), rotations=(-2,)),
            }
        )
        with pytest.raises(DomainError):
            daisy_rewrite(book)

    def test_rejects_non_dual_legs(self):
        with pytest.raises(DomainError, match="duality violation"):
            daisy_rewrite(_sublink_book((-3,), (-3,)))


class TestVerifyCertificate:
    def test_empty_candidate_fails(self, sample_sublink_book):
        assert verify_certificate(sample_sublink_book, []) is False

    def test_oracle_witness_passes(self, sample_sublink_book):
        result = positive_feasible(ab_class(sample_sublink_book))
        assert verify_certificate(sample_sublink_book, result.witness_twists())

    def test_negative_twist_rejected(self, sample_sublink_book):
        with pytest.raises(DomainError):
            verify_certificate(sample_sublink_book, [SignedTwist(sign=-1, holes=[INNER])])

    def test_universe_mismatch(self, sample_sublink_book):
        with pytest.raises(UniverseMismatchError):
            verify_certificate(sample_sublink_book, [SignedTwist(sign=1, holes=[Hole.parse("L2.1.1")])])
