"""The ten acceptance criteria, each at its stated tolerance and time limit."""

import itertools
import random
import time
from collections import Counter

from deepnorm.corpus import random_context
from deepnorm.derivation import ASKS, Rule, check_derivation
from deepnorm.flow import (
    check_confluence,
    components,
    count_polarities_exhaustive,
    polarity_assignments,
    random_flow,
    validate,
)
from deepnorm.formula import F, T, canonical, evaluate, parse, render, size, substitute
from deepnorm.normalise import cubic_constant, fit_quasipolynomial, push_out
from deepnorm.threshold import GAMMA_RULES, H, gamma, theta, theta_size, theta_size_profile

FIG4 = {
    ("a", "b"): ["t", "[a.b]", "(a.b)"],
    ("a", "b", "c"): ["t", "[a.b.c]", "[(a.[b.c]).(b.c)]", "(a.b.c)"],
    ("a", "b", "c", "d", "e"): [
        "t",
        "[a.b.c.d.e]",
        "[(a.b).([a.b].[c.d.e]).(c.[d.e]).(d.e)]",
        "[(a.b.[c.d.e]).([a.b].[(c.[d.e]).(d.e)]).(c.d.e)]",
        "[(a.b.[(c.[d.e]).(d.e)]).([a.b].c.d.e)]",
        "(a.b.c.d.e)",
        "f",
    ],
}


def test_criterion_1_threshold_golden(verdict):
    t0 = time.perf_counter()
    wrong = []
    for atoms, row in FIG4.items():
        for k, text in enumerate(row):
            got = theta(k, atoms)
            if render(canonical(got)) != render(canonical(parse(text))):
                wrong.append((len(atoms), k, render(got)))
    dt = time.perf_counter() - t0
    ok = not wrong and dt < 1
    verdict(1, ok, f"{sum(map(len, FIG4.values()))} entries, {len(wrong)} mismatches, {dt:.3f}s")
    assert ok, wrong


def test_criterion_2_gamma_endpoints(verdict):
    t0 = time.perf_counter()
    atoms = ("a1", "a2", "a3", "a4", "a5")
    bad = []
    for l, k in itertools.product((1, 3, 5), range(6)):
        d = gamma(k, l, atoms)
        low = canonical(substitute(theta(k, atoms), {atoms[l - 1]: F}))
        high = canonical(substitute(theta(k + 1, atoms), {atoms[l - 1]: T}))
        rep = check_derivation(d)
        if d.premiss != low or d.conclusion != high or not rep.valid or not set(rep.rule_multiset) <= GAMMA_RULES:
            bad.append((k, l))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 5
    verdict(2, ok, f"18 derivations, {len(bad)} bad, {dt:.3f}s")
    assert ok, bad


def test_criterion_3_threshold_semantics(verdict):
    t0 = time.perf_counter()
    checked = 0
    bad = []
    for n in range(1, 9):
        names = [f"a{i}" for i in range(1, n + 1)]
        for k in range(n + 2):
            th = theta(k, names)
            for bits in itertools.product((False, True), repeat=n):
                checked += 1
                if evaluate(th, dict(zip(names, bits))) != (sum(bits) >= k):
                    bad.append((n, k, bits))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30
    verdict(3, ok, f"{checked} evaluations, {len(bad)} wrong, {dt:.2f}s")
    assert ok, bad[:5]


def test_criterion_4_size_bound(verdict):
    t0 = time.perf_counter()
    rows = theta_size_profile(64)
    over = [r for r in rows if not r["within_bound"]]
    non_monotone = [r for r in rows if not r["monotone"]]
    # the recursive count agrees with the built formula where building is cheap
    mismatch = [(n, k) for n in range(1, 17) for k in range(n + 2) if size(theta(k, [f"x{i}" for i in range(n)])) != theta_size(k, n)]
    dt = time.perf_counter() - t0
    ok = not over and not non_monotone and not mismatch and dt < 60
    peak = max(r["peak"] / r["bound"] for r in rows)
    verdict(4, ok, f"n<=64, h={H:.4f}, max peak/bound {peak:.3g}, {len(non_monotone)} monotonicity failures, {dt:.2f}s")
    assert ok


def test_criterion_5_polarity_count(verdict):
    t0 = time.perf_counter()
    rng = random.Random(5)
    bad = 0
    tried = 0
    while tried < 200:
        fl = random_flow(rng, max_vertices=20, max_edges=20, atoms=("a", "b", "c"))
        if validate(fl) is not None or not fl.edges:
            continue
        tried += 1
        count = polarity_assignments(fl).count
        if count != 2 ** len(components(fl)) or count != count_polarities_exhaustive(fl):
            bad += 1
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 30
    verdict(5, ok, f"{tried} flows, {bad} disagreements with brute force, {dt:.2f}s")
    assert ok


def test_criterion_6_confluence(verdict):
    t0 = time.perf_counter()
    rng = random.Random(6)
    results = []
    while len(results) < 500:
        fl = random_flow(rng, max_vertices=12, atoms=("a", "b"))
        if validate(fl) is not None:
            continue
        results.append(check_confluence(fl, max_states=1000))
    dt = time.perf_counter() - t0
    split = sum(not r.confluent for r in results)
    partial = sum(not r.exhaustive for r in results)
    ok = split == 0 and dt < 120
    verdict(6, ok, f"500 flows, {split} with several normal forms, {partial} searches capped, "
                   f"max {max(r.states for r in results)} states, {dt:.2f}s")
    assert ok


def test_criterion_7_end_to_end(corpus_runs, verdict):
    runs, dt = corpus_runs
    bad = []
    for i, (p, out, report) in enumerate(runs):
        rep = check_derivation(out, ASKS)
        counts = rep.rule_multiset
        cuts = p.rule_counts().get(Rule.AIU, 0)
        if not (report.valid and rep.valid and cuts and counts.get(Rule.AIU, 0) == 0 and counts.get(Rule.AWU, 0) == 0):
            bad.append(i)
        if max(size(x) for x in p.lines) > 60:
            bad.append(i)
    ok = len(runs) >= 100 and not bad and dt < 300
    atoms = sorted({r.stage("simple").atoms for _, _, r in runs})
    verdict(7, ok, f"{len(runs)} proofs (cut atoms per proof {atoms}), {len(bad)} failures, {dt:.1f}s")
    assert ok, bad


def test_criterion_8_quasipolynomial_trend(corpus_runs, verdict):
    runs, _ = corpus_runs
    fit = fit_quasipolynomial(
        [r.stage("input").size for _, _, r in runs], [r.stage("analytic").size for _, _, r in runs]
    )
    ok = not fit.trending_up
    verdict(8, ok, str(fit))
    assert ok


def test_criterion_9_switch_bound(verdict):
    t0 = time.perf_counter()
    rng = random.Random(9)
    over = []
    forced = 0
    for _ in range(1000):
        ctx, alpha = random_context(rng, 40, ["a", "b", "c"])
        d = push_out(ctx, alpha)
        s = size(ctx.plug(alpha))
        assert check_derivation(d).valid
        assert set(d.rule_counts()) <= {Rule.S, Rule.EQ}
        if not d.size < s * s:
            over.append((s, d.size))
            # premiss and conclusion differ, so at least two lines of sizes s and s+1
            forced += 2 * s + 1 >= s * s
    dt = time.perf_counter() - t0
    ok = not over and dt < 10
    by_size = dict(sorted(Counter(s for s, _ in over).items()))
    verdict(9, ok, f"1000 pairs, {len(over)} at or above size^2, by size {by_size}; "
                   f"{forced} need size^2 in any derivation; {dt:.2f}s")
    assert ok, over[:10]


def test_criterion_10_simple_form_shape(corpus_runs, verdict):
    runs, _ = corpus_runs
    broken = []
    for i, (p, _, report) in enumerate(runs):
        problems = report.simple_form.violations()
        if problems:
            broken.append((i, problems))
    c_fixed = 1.0
    c_seen = cubic_constant([r.stage("input").size for _, _, r in runs], [r.stage("simple").size for _, _, r in runs])
    ok = not broken and c_seen <= c_fixed
    verdict(10, ok, f"{len(runs)} simple forms, {len(broken)} with violations; size_out <= C*size_in^3 "
                    f"with C={c_fixed} (largest observed ratio {c_seen:.3g})")
    assert ok, broken[:3]
