import random
from fractions import Fraction

import pytest

from thermo_ops import (DomainError, SynthesisError, apply_edp, beta_order,
                        compose_edps_same_pair, gibbs_context_from_weights,
                        is_detailed_balanced, make_edp_step, synthesize,
                        thermo_majorizes, thermo_transposition,
                        validate_stochastic, verify_sequence)

from conftest import rand_ctx, rand_edp_image, rand_pop

F = Fraction


class TestApplyEdp:
    def test_zero_is_identity(self, two_thirds_ctx):
        step = make_edp_step(two_thirds_ctx, 0, 1, F(0))
        assert apply_edp(step, (F(2, 5), F(3, 5)), two_thirds_ctx) == \
            (F(2, 5), F(3, 5))

    def test_transposition_on_pure(self, two_thirds_ctx):
        step = thermo_transposition(two_thirds_ctx, 0, 1)
        assert apply_edp(step, (F(1), F(0)), two_thirds_ctx) == \
            (F(1, 2), F(1, 2))

    def test_thermal_fixed_point(self, two_thirds_ctx):
        rng = random.Random(2)
        for _ in range(20):
            step = make_edp_step(two_thirds_ctx, 0, 1, F(rng.randint(0, 8), 8))
            scaled = tuple(3 * g for g in two_thirds_ctx.g)
            assert apply_edp(step, scaled, two_thirds_ctx) == scaled

    def test_norm_preserved(self, seven_ctx):
        rng = random.Random(4)
        for _ in range(50):
            p = rand_pop(rng, 3)
            step = make_edp_step(seven_ctx, 0, 2, F(rng.randint(0, 8), 8))
            assert sum(apply_edp(step, p, seven_ctx)) == sum(p)


class TestCompose:
    def test_identity_neutral(self, two_thirds_ctx):
        a = make_edp_step(two_thirds_ctx, 0, 1, F(0))
        b = make_edp_step(two_thirds_ctx, 0, 1, F(5, 8))
        assert compose_edps_same_pair(a, b, two_thirds_ctx).p_down == F(5, 8)

    def test_two_transpositions(self, two_thirds_ctx):
        t = thermo_transposition(two_thirds_ctx, 0, 1)
        # exciting factor 1/2, so the double swap leaves p_down 1/2
        assert compose_edps_same_pair(t, t, two_thirds_ctx).p_down == F(1, 2)

    def test_full_thermalisation_absorbs(self, two_thirds_ctx):
        z = 1 + F(1, 2)
        a = make_edp_step(two_thirds_ctx, 0, 1, 1 / z)
        for pb in (F(0), F(1, 4), F(1)):
            b = make_edp_step(two_thirds_ctx, 0, 1, pb)
            assert compose_edps_same_pair(a, b, two_thirds_ctx).p_down == 1 / z

    def test_matches_matrix_product(self, seven_ctx):
        rng = random.Random(12)
        for _ in range(30):
            pa, pb = F(rng.randint(0, 16), 16), F(rng.randint(0, 16), 16)
            a = make_edp_step(seven_ctx, 1, 2, pa)
            b = make_edp_step(seven_ctx, 1, 2, pb)
            c = compose_edps_same_pair(a, b, seven_ctx)
            prod = b.as_matrix(seven_ctx).compose(a.as_matrix(seven_ctx))
            assert c.as_matrix(seven_ctx).cols == prod.cols

    def test_pair_mismatch(self, seven_ctx):
        a = make_edp_step(seven_ctx, 0, 1, F(1, 2))
        b = make_edp_step(seven_ctx, 0, 2, F(1, 2))
        with pytest.raises(DomainError):
            compose_edps_same_pair(a, b, seven_ctx)


class TestSynthesize:
    def test_identity_target(self, seven_ctx):
        p = (F(1, 2), F(1, 4), F(1, 4))
        seq = synthesize(p, p, seven_ctx)
        assert seq.steps == ()

    def test_single_transposition(self, two_thirds_ctx):
        seq = synthesize((F(1), F(0)), (F(1, 2), F(1, 2)), two_thirds_ctx)
        assert len(seq.steps) == 1
        step = seq.steps[0]
        assert (step.lo, step.hi, step.p_down) == (0, 1, F(1))

    def test_pure_to_thermal(self, seven_ctx):
        p = (F(1), F(0), F(0))
        seq = synthesize(p, seven_ctx.g, seven_ctx)
        assert 0 < len(seq.steps) <= 3
        report = verify_sequence(seq, p, seven_ctx.g, seven_ctx)
        assert report.ok

    def test_rejects_non_majorized(self, two_thirds_ctx):
        with pytest.raises(SynthesisError) as err:
            synthesize((F(1, 2), F(1, 2)), (F(1), F(0)), two_thirds_ctx)
        assert err.value.witness is not None
        x, yp, yq = err.value.witness
        assert yp < yq

    def test_rejects_float_inputs(self, two_thirds_ctx):
        with pytest.raises(DomainError):
            synthesize((0.5, 0.5), (0.75, 0.25), two_thirds_ctx)

    def test_requires_rational_ctx(self):
        from thermo_ops import make_gibbs_context
        ctx = make_gibbs_context([0.0, 1.0], max_denominator=None)
        with pytest.raises(DomainError):
            synthesize((F(1), F(0)), (F(1, 2), F(1, 2)), ctx)

    def test_known_unreachable_pair_raises(self):
        # equal Lorenz curves with mismatched level assignment: the pair is
        # thermo-majorized both ways yet no two-level detailed-balanced
        # sequence connects it (any nontrivial step strictly lowers the
        # curve and breaks dominance).
        ctx = gibbs_context_from_weights([F(1, 6), F(1, 3), F(1, 2)])
        p = (F(1, 10), F(2, 10), F(7, 10))
        q = (F(7, 30), F(14, 30), F(3, 10))
        assert thermo_majorizes(p, q, ctx) and thermo_majorizes(q, p, ctx)
        with pytest.raises(SynthesisError):
            synthesize(p, q, ctx)

    def test_unreachable_regression_tight_budget(self):
        # strict majorization is not sufficient: the bottom-window budget of
        # this instance cannot pay for any level to descend to the target
        # floor, so no elementary sequence exists.
        ctx = gibbs_context_from_weights(
            [F(37, 46), F(6, 46), F(2, 46), F(1, 46)])
        p = (F(23, 89), F(172, 979), F(431, 979), F(123, 979))
        q = (F(1184949, 1448920), F(695987, 4346760), F(32783, 2173380),
             F(23, 3293))
        assert thermo_majorizes(p, q, ctx)
        with pytest.raises(SynthesisError):
            synthesize(p, q, ctx)

    def test_two_level_always_reachable(self):
        # for two levels the reachable set from p is exactly the segment
        # traced by the one-parameter step family, so any majorized target
        # must synthesize (and in a single step after grouping)
        rng = random.Random(63)
        found = 0
        while found < 300:
            d1 = rng.randint(1, 40)
            d2 = rng.randint(1, 40)
            if d1 == d2:
                continue
            ctx = gibbs_context_from_weights([F(d1, d1 + d2), F(d2, d1 + d2)])
            p = (F(rng.randint(0, 50), 50),)
            p = (p[0], 1 - p[0])
            q = (F(rng.randint(0, 50), 50),)
            q = (q[0], 1 - q[0])
            if not thermo_majorizes(p, q, ctx):
                continue
            found += 1
            seq = synthesize(p, q, ctx)
            assert len(seq.steps) <= 1
            assert verify_sequence(seq, p, q, ctx).ok

    def test_random_reachable_corpus(self):
        rng = random.Random(314)
        for _ in range(300):
            ctx = rand_ctx(rng, nmax=5, dmax_total=60)
            p = rand_pop(rng, ctx.n)
            q = rand_edp_image(rng, p, ctx, rng.randint(1, 10))
            seq = synthesize(p, q, ctx, group=False)
            assert len(seq.steps) <= ctx.D
            x = p
            for step in seq.steps:
                m = step.as_matrix(ctx)
                assert validate_stochastic(m, 0)
                assert is_detailed_balanced(m, ctx, 0)
                x = apply_edp(step, x, ctx)
                # never overshoot: intermediates still majorize the target
                assert thermo_majorizes(x, q, ctx)
            assert x == q

    def test_grouping_merges_consecutive(self, two_thirds_ctx):
        p, q = (F(1), F(0)), (F(5, 8), F(3, 8))
        grouped = synthesize(p, q, two_thirds_ctx, group=True)
        ungrouped = synthesize(p, q, two_thirds_ctx, group=False)
        assert len(grouped.steps) <= len(ungrouped.steps)
        report = verify_sequence(grouped, p, q, two_thirds_ctx)
        assert report.ok

    def test_relabel_records(self, seven_ctx):
        p = (F(1, 5), F(1, 5), F(3, 5))
        q = rand_edp_image(random.Random(8), p, seven_ctx, 4)
        seq = synthesize(p, q, seven_ctx)
        assert seq.relabel_in == beta_order(p, seven_ctx).perm
        assert seq.relabel_out == beta_order(q, seven_ctx).perm


class TestVerifySequence:
    def test_valid_output_passes(self, seven_ctx):
        p = (F(9, 10), F(1, 10), F(0))
        q = rand_edp_image(random.Random(5), p, seven_ctx, 5)
        seq = synthesize(p, q, seven_ctx)
        assert verify_sequence(seq, p, q, seven_ctx).ok

    def test_perturbed_step_detected(self, seven_ctx):
        from thermo_ops.synthesis import EdpSequence
        p = (F(1), F(0), F(0))
        q = seven_ctx.g
        seq = synthesize(p, q, seven_ctx)
        step = seq.steps[0]
        bad_p = step.p_down - F(1, 1000)
        bad = EdpSequence(
            (make_edp_step(seven_ctx, step.lo, step.hi, bad_p),)
            + seq.steps[1:],
            seq.provenance, seq.relabel_in, seq.relabel_out)
        report = verify_sequence(bad, p, q, seven_ctx)
        assert not report.ok
        assert report.reason == "terminal state differs from target"

    def test_empty_sequence_wrong_target(self, two_thirds_ctx):
        from thermo_ops.synthesis import EdpSequence
        empty = EdpSequence((), (), (0, 1), (0, 1))
        report = verify_sequence(empty, (F(1), F(0)), (F(1, 2), F(1, 2)),
                                 two_thirds_ctx)
        assert not report.ok
