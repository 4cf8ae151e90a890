"""Smoke tests for the python bindings: thin checks that the main operations
round-trip through the module; the heavy verification lives in the C++ suites."""

import math

import pytest

import pwlopt


def threshold(at=0.5, below=0.0, above=1.0):
    return pwlopt.make_piecewise(
        0.0,
        1.0,
        [at],
        [
            {"lo": 0.0, "hi": at, "value": below},
            {"lo": at, "hi": 1.0, "value": above},
        ],
    )


def test_piecewise_basics():
    f = threshold()
    assert f(0.25) == 0.0
    assert f(0.5) == 1.0  # right-continuous at the breakpoint
    rho, value = pwlopt.argmax_fn(f)
    assert value == 1.0 and rho == pytest.approx(0.75)
    z = pwlopt.exp_integral(f, 1.0, 0.0, 1.0)
    assert z == pytest.approx(0.5 + 0.5 * math.e)
    back = pwlopt.fn_from_json(f.to_json())
    assert back.breakpoints == [0.5]


def test_sampler_follows_mass_ratio():
    f = threshold()
    rng = pwlopt.Rng(7)
    draws = [pwlopt.sample_exp(f, math.log(9.0), rng) for _ in range(4000)]
    right = sum(1 for x in draws if x >= 0.5) / len(draws)
    assert abs(right - 0.9) < 0.03


def test_errors_surface_as_python_exceptions():
    with pytest.raises(pwlopt.PwloptError):
        pwlopt.make_piecewise(0.0, 1.0, [0.7, 0.3], [])


def test_knapsack_family():
    inst = pwlopt.KnapsackInstance([0.9, 0.8, 0.7], [2.0, 1.0, 1.0], 3.0)
    picked, value = pwlopt.knapsack_greedy(inst, 1.0)
    assert value == pytest.approx(1.7) and picked == [0, 1]
    assert pwlopt.brute_force_knapsack(inst) == pytest.approx(1.7)
    curve = pwlopt.knapsack_curve(inst, 10.0)
    assert curve.fn(1.0) == pytest.approx(1.7)


def test_mwis_family():
    inst = pwlopt.make_mwis([0.6, 0.9, 0.6], [(0, 1), (1, 2)])
    _, at_zero = pwlopt.mwis_greedy(inst, 0.0)
    _, at_one = pwlopt.mwis_greedy(inst, 1.0)
    assert at_zero == pytest.approx(0.9)
    assert at_one == pytest.approx(1.2)
    assert pwlopt.brute_force_mwis(inst) == pytest.approx(1.2)


def test_online_learner_and_regret():
    lam = pwlopt.lambda_full_info(1, math.e, 1.0, 1, 1.0)
    assert lam == pytest.approx(1.0)
    learner = pwlopt.EwfLearner(0.0, 1.0, 0.5, 1.0, seed=3)
    curves, h, lo, hi = pwlopt.adversary_smoothed("knapsack", 30, 11, 6, 2.0, 5.0, 4.0)
    assert h == 6.0 and (lo, hi) == (0.0, 5.0)
    plays = []
    scaled = pwlopt.EwfLearner(lo, hi, 0.05, h, seed=3)
    for c in curves:
        plays.append(scaled.play())
        scaled.update(c)
    ledger = pwlopt.compute_regret(curves, plays)
    assert ledger["regret"] >= -1e-9
    assert ledger["opt"] >= max(ledger["realized"])


def test_private_mechanism_and_ratio():
    curves, h, lo, hi = pwlopt.adversary_smoothed("knapsack", 12, 5, 6, 2.0, 5.0, 4.0)
    rng = pwlopt.Rng(1)
    rho = pwlopt.exp_mech_1d(curves, 1.0, h, rng)
    assert lo <= rho <= hi
    other = list(curves)
    repl, _, _, _ = pwlopt.adversary_smoothed("knapsack", 1, 6, 6, 2.0, 5.0, 4.0)
    other[-1] = repl[0]
    ratio = pwlopt.privacy_ratio_check(curves, other, 0.5)
    assert ratio <= 0.5 + 1e-9


def test_market_runs():
    rng = pwlopt.Rng(2)
    profile = pwlopt.gen_valuations("additive", 2, 2, 2.0, 1.0, rng)
    posted = pwlopt.posted_price_run(profile, [0.2, 0.2])
    second = pwlopt.second_price_run(profile, [0.2, 0.2])
    assert posted["revenue"] <= posted["welfare"] + 1e-12
    assert second["revenue"] <= second["welfare"] + 1e-12


def test_net_and_bandit():
    net = pwlopt.build_net([(0.0, 1.0)], 0.25)
    assert [p[0] for p in net] == pytest.approx([0.25, 0.75])
    bandit = pwlopt.Exp3Bandit([0.0, 1.0], 500, 1.0, seed=4)
    wins = 0
    for _ in range(500):
        arm_index, _, _ = bandit.play_round(lambda a: a)
        wins += arm_index == 1
    assert wins > 250


def test_rademacher_and_dispersion():
    curves, h, lo, hi = pwlopt.adversary_smoothed("knapsack", 25, 9, 6, 2.0, 5.0, 4.0)
    ws, ks = pwlopt.empirical_profile(curves, [0.05, 0.1, 0.5])
    assert ks == sorted(ks)
    rng = pwlopt.Rng(3)
    mean, se = pwlopt.empirical_rademacher(curves, 20, rng)
    assert 0.0 <= mean <= h
    bound = pwlopt.rademacher_bound(1, 5.0, 0.1, 0.0, ks[1], 25)
    assert bound > 0.0
