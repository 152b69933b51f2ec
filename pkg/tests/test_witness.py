import json
import math
from fractions import Fraction as F

import mpmath
import pytest

from qaspace import (
    DomainError,
    IllegalSpec,
    NotInvertible,
    WitnessFunction,
    WitnessSpec,
    alpha_beta,
    build_witness,
    constant_one,
    identity,
    l1_norm_exact,
    lower_bound_value,
    lorentz_norm,
    qa_phi,
    qa_psi,
    qa_upper,
    witness_lorentz_norm,
    witness_qa_upper,
)

PSI1 = constant_one("psi")


def sqrt_phi():
    return alpha_beta(0.5, 0.0)


def sqrt_witness(n=2):
    # gamma(t) = t^(-1/2) inverts in closed form, so every stored
    # quantity has a hand-checkable value
    return build_witness(WitnessSpec(sqrt_phi(), PSI1, N=n, c=0.5, p=1.0))


def qa_witness(n):
    return build_witness(WitnessSpec(qa_phi(), qa_psi(), N=n, c=0.5, p=1.0))


class TestSpecValidation:
    def test_parameter_ranges(self):
        with pytest.raises(IllegalSpec):
            WitnessSpec(qa_phi(), qa_psi(), N=1, c=0.5)
        with pytest.raises(IllegalSpec):
            WitnessSpec(qa_phi(), qa_psi(), N=2.5, c=0.5)
        with pytest.raises(IllegalSpec):
            WitnessSpec(qa_phi(), qa_psi(), N=2, c=1.0)
        with pytest.raises(IllegalSpec):
            WitnessSpec(qa_phi(), qa_psi(), N=2, c=0.5, p=0.0)
        with pytest.raises(IllegalSpec):
            WitnessSpec(qa_phi(), qa_psi(), N=2, c=0.5, mu1=0.6)

    def test_flat_ratio_is_rejected_at_build(self):
        with pytest.raises(NotInvertible):
            build_witness(WitnessSpec(identity(), qa_psi(), N=2, c=0.5))

    def test_layer_count_enforced(self):
        w = sqrt_witness()
        with pytest.raises(IllegalSpec):
            WitnessFunction(w.log_mu[:-1], w.log_a, w.log_gamma, 2, 0.5, 1.0)


class TestClosedFormFamily:
    def test_measures(self):
        # growth e^(6 log 2) per step and gamma(t) = t^(-1/2) give
        # mu_j = 2^(-(1+12j))
        w = sqrt_witness()
        for j, lm in enumerate(w.log_mu):
            assert lm == pytest.approx(-(1 + 12 * j) * math.log(2.0), abs=1e-9)
        assert math.exp(w.log_mu[1]) == pytest.approx(2.0**-13, rel=1e-9)

    def test_heights(self):
        # a_j = 1 / (2 N sqrt(mu_j))
        w = sqrt_witness()
        assert w.log_a[0] == pytest.approx(-1.5 * math.log(2.0), abs=1e-12)
        for lm, la in zip(w.log_mu, w.log_a):
            assert la == pytest.approx(-math.log(4.0) - 0.5 * lm, abs=1e-9)

    def test_stored_ratio_targets_form_an_arithmetic_ladder(self):
        w = sqrt_witness()
        spec = WitnessSpec(sqrt_phi(), PSI1, N=2, c=0.5, p=1.0)
        step = spec.log_growth()
        for j, lg in enumerate(w.log_gamma):
            assert lg == w.log_gamma[0] + j * step

    def test_materializes(self):
        w = sqrt_witness()
        g = w.to_step_function()
        assert g.pieces == 5
        assert g.values[-1] == 0.0
        want_mass = sum(
            F(math.exp(la)) * F(math.exp(lm))
            for la, lm in zip(w.log_a, w.log_mu)
        )
        assert l1_norm_exact(g) == want_mass

    def test_matches_float_domain_search(self):
        w = sqrt_witness()
        g = w.to_step_function()
        got_up = witness_qa_upper(w, sqrt_phi(), PSI1)
        want_up = qa_upper(g, sqrt_phi(), PSI1, strategy="exhaustive").upper
        assert got_up == pytest.approx(want_up, rel=1e-12)
        got_lz = witness_lorentz_norm(w, sqrt_phi())
        assert got_lz == pytest.approx(
            lorentz_norm(g, sqrt_phi()).value, rel=1e-12
        )

    def test_lorentz_against_extended_precision(self):
        w = sqrt_witness()
        with mpmath.workdps(60):
            mus = [mpmath.mpf(2) ** -(1 + 12 * j) for j in range(4)]
            heights = [1 / (4 * mpmath.sqrt(m)) for m in mus]
            vals = list(reversed(heights))
            # cumulative measures of the rearrangement, deepest layer first
            cums = []
            acc = mpmath.mpf(0)
            for m in reversed(mus):
                acc += m
                cums.append(acc)
            lam = mpmath.mpf(0)
            for k, v in enumerate(vals):
                nxt = vals[k + 1] if k + 1 < len(vals) else mpmath.mpf(0)
                lam += (v - nxt) * mpmath.sqrt(cums[k])
            want = float(lam)
        assert witness_lorentz_norm(w, sqrt_phi()) == pytest.approx(want, rel=1e-9)


class TestDeepFamily:
    def test_anchors(self):
        uppers = {
            2: 1.7945134575869832,
            3: 2.096541868668349,
            8: 2.9169912566299976,
        }
        for n, want in uppers.items():
            w = qa_witness(n)
            assert witness_qa_upper(w, qa_phi(), qa_psi()) == pytest.approx(
                want, rel=1e-9
            )
            assert witness_lorentz_norm(w, qa_phi()) == pytest.approx(1.0, rel=1e-12)

    def test_lorentz_against_extended_precision(self):
        # replay the construction exactly in 80-digit arithmetic:
        # ratio targets are an arithmetic ladder, measures come from
        # inverting 1 - log t, heights from 1/(2 N phi(mu))
        w = qa_witness(2)
        with mpmath.workdps(80):
            n2 = 4
            growth = (3 * mpmath.log(2) + mpmath.log(1 + mpmath.log(2))) / mpmath.mpf("0.5")
            lg1 = mpmath.log(1 - mpmath.log(mpmath.mpf(1) / 2))
            mus = [mpmath.exp(1 - mpmath.exp(lg1 + j * growth)) for j in range(n2)]
            phis = [m * (1 - mpmath.log(m)) for m in mus]
            heights = [1 / (4 * p) for p in phis]
            vals = list(reversed(heights))
            cums = []
            acc = mpmath.mpf(0)
            for m in reversed(mus):
                acc += m
                cums.append(acc)
            lam = mpmath.mpf(0)
            for k, v in enumerate(vals):
                nxt = vals[k + 1] if k + 1 < len(vals) else mpmath.mpf(0)
                lam += (v - nxt) * cums[k] * (1 - mpmath.log(cums[k]))
            want = float(lam)
        assert witness_lorentz_norm(w, qa_phi()) == pytest.approx(want, rel=1e-9)

    def test_too_deep_to_materialize(self):
        with pytest.raises(DomainError):
            qa_witness(2).to_step_function()

    def test_invariants_across_sizes(self):
        for n in (2, 5, 8):
            spec = WitnessSpec(qa_phi(), qa_psi(), N=n, c=0.5, p=1.0)
            w = build_witness(spec)
            step = spec.log_growth()
            halving = math.log(2.0) - 1e-9
            for a, b in zip(w.log_mu, w.log_mu[1:]):
                assert b <= a - halving
            assert all(b > a for a, b in zip(w.log_a, w.log_a[1:]))
            for j, lm in enumerate(w.log_mu):
                target = w.log_gamma[0] + j * step
                err = abs(qa_phi().log_gamma_eval(lm) - target)
                assert err <= 1e-8 * max(1.0, abs(target))

    def test_flat_psi_upper_equals_lorentz_bitwise(self):
        for n in (2, 5, 8):
            w = build_witness(WitnessSpec(qa_phi(), PSI1, N=n, c=0.5, p=1.0))
            up = witness_qa_upper(w, qa_phi(), PSI1)
            assert up == witness_lorentz_norm(w, qa_phi())

    def test_upper_clears_the_guaranteed_floor(self):
        for n in range(2, 9):
            spec = WitnessSpec(qa_phi(), qa_psi(), N=n, c=0.5, p=1.0)
            w = build_witness(spec)
            assert witness_qa_upper(w, qa_phi(), qa_psi()) >= lower_bound_value(spec)

    def test_strategies_agree_on_small_builds(self):
        w = qa_witness(2)
        auto = witness_qa_upper(w, qa_phi(), qa_psi(), strategy="auto")
        ex = witness_qa_upper(w, qa_phi(), qa_psi(), strategy="exhaustive")
        loc = witness_qa_upper(w, qa_phi(), qa_psi(), strategy="local_search")
        assert auto == ex
        assert loc >= ex


class TestSerialization:
    def test_floor_value(self):
        spec = WitnessSpec(qa_phi(), qa_psi(), N=2, c=0.5, p=1.0)
        want = (2.0**0.5 - 1.0) / 8.0 * qa_psi().eval(2.0)
        assert lower_bound_value(spec) == want

    def test_json_roundtrip(self):
        w = qa_witness(2)
        blob = json.loads(json.dumps(w.to_json()))
        again = WitnessFunction(
            tuple(blob["log_mu"]),
            tuple(blob["log_a"]),
            tuple(blob["log_gamma"]),
            blob["N"],
            blob["c"],
            blob["p"],
        )
        assert again == w

    def test_explicit_mu1(self):
        w = build_witness(WitnessSpec(qa_phi(), qa_psi(), N=2, c=0.5, mu1=0.25))
        assert w.log_mu[0] == math.log(0.25)
