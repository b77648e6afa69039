"""Acceptance suite: one criterion per test, one printed pass/fail line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the lines; every
assertion uses the exact values or stated tolerances, and each criterion
also checks its runtime budget.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from bellbox.behavior import Scenario
from bellbox.functionals import make_c1, make_c2, make_chsh, make_inn22, make_mnn22
from bellbox.machines import (
    WiringTable,
    machine_behavior,
    make_prn_wiring,
    parity_matrix,
    pr_box,
    pr_machine,
    recipe,
    wire_pr_boxes,
)
from bellbox.polytope import (
    check_lemma1,
    deterministic_saturators_mnn22,
    doubled_values,
    enumerate_nonlocal_vertices,
    enumerate_ns_vertices_n3,
    local_half_matrix,
    one_machine_half_matrix,
    verify_facet,
    violation_census,
)
from bellbox.quantum import TwoQubitState, seesaw_maximize, theta_sweep
from bellbox.strategies import enumerate_local

HALF = Fraction(1, 2)


class Criterion:
    def __init__(self, number, budget_seconds):
        self.number = number
        self.budget = budget_seconds
        self.start = time.perf_counter()

    def finish(self, ok, detail):
        elapsed = time.perf_counter() - self.start
        status = "PASS" if ok else "FAIL"
        print(f"ACCEPTANCE {self.number}: {status} ({elapsed:.2f}s) - {detail}")
        assert ok, f"criterion {self.number}: {detail}"
        assert elapsed < self.budget, (
            f"criterion {self.number} took {elapsed:.1f}s, budget {self.budget}s"
        )


def test_criterion_1_two_setting_counts(chsh2_orbit):
    crit = Criterion(1, 1.0)
    locals2 = enumerate_local(Scenario(2))
    nonlocal2 = enumerate_nonlocal_vertices(2, pr_box(), chsh2_orbit)
    ok = (
        len(locals2) == 16
        and len(chsh2_orbit) == 8
        and len(nonlocal2) == 8
        and len(locals2) + len(nonlocal2) == 24
    )
    crit.finish(
        ok,
        f"16 local, {len(chsh2_orbit)} CHSH orbit members, "
        f"{len(locals2) + len(nonlocal2)} no-signaling vertices",
    )


def test_criterion_2_three_setting_facets(chsh3_orbit, i3322_orbit):
    crit = Criterion(2, 10.0)
    locals3 = local_half_matrix(3)
    facets = list(chsh3_orbit) + list(i3322_orbit)
    values = doubled_values(locals3, facets)
    maxima = values.max(axis=0)
    ok = (
        locals3.shape[0] == 64
        and len(chsh3_orbit) == 72
        and len(i3322_orbit) == 576
        and len(facets) == 648
        and (maxima == 0).all()
    )
    crit.finish(
        ok,
        f"64 local vertices, 72+576=648 facets, all tight at 0 "
        f"(max of maxima {int(maxima.max())}, min {int(maxima.min())})",
    )


def test_criterion_3_vertex_census(chsh3_orbit, i3322_orbit):
    crit = Criterion(3, 60.0)
    pairs = one_machine_half_matrix(3, pr_machine(3))
    labeled = enumerate_ns_vertices_n3(list(chsh3_orbit) + list(i3322_orbit))
    census = violation_census(labeled, chsh3_orbit, i3322_orbit)
    table = {
        label: (st.count, st.chsh_violations, st.i3322_violations)
        for label, st in census.classes.items()
    }
    expected = {
        "S1": (192, 6, 18),
        "S2": (288, 1, 8),
        "S3": (576, 2, 12),
        "S4": (288, 4, 24),
    }
    ok = pairs.shape[0] == 262144 and census.total == 1344 and table == expected
    crit.finish(ok, f"262144 strategy pairs -> 1344 vertices, census {table}")


def test_criterion_4_machine_values():
    crit = Criterion(4, 1.0)
    chsh_value = make_chsh(2).evaluate(machine_behavior(pr_box()))
    i3_value = make_inn22(3).evaluate(machine_behavior(pr_machine(3)))
    family = [
        make_inn22(n).evaluate(machine_behavior(pr_machine(n))) for n in range(2, 7)
    ]
    ok = (
        chsh_value == HALF
        and i3_value == 1
        and family == [Fraction(n - 1, 2) for n in range(2, 7)]
    )
    crit.finish(ok, f"CHSH/box {chsh_value}, three-setting {i3_value}, family {family}")


def test_criterion_5_wirings():
    crit = Criterion(5, 1.0)
    displayed = WiringTable(((0, 0), (0, 1), (1, 0)), ((0, 0), (1, 0), (0, 1)))
    parity = parity_matrix(displayed)
    ok = parity == ((0, 0, 0), (0, 0, 1), (0, 1, 0))
    ok = ok and wire_pr_boxes(displayed) == recipe(make_inn22(3))
    boxes = []
    for n in range(2, 7):
        w = make_prn_wiring(n)
        boxes.append(w.n_boxes)
        ok = ok and w.n_boxes == n - 1 and wire_pr_boxes(w) == pr_machine(n)
    crit.finish(ok, f"displayed parity {parity}, box counts {boxes}")


def test_criterion_6_machine_resistant_facets():
    crit = Criterion(6, 300.0)
    cert3 = verify_facet(make_mnn22(3), pr_box())
    one_box_sat = cert3.n_saturating - cert3.n_deterministic
    ok = (
        cert3.max_value == 0
        and cert3.n_deterministic >= 8
        and one_box_sat >= 57
        and cert3.affine_rank == 14
    )
    details = [
        f"n=3: max {cert3.max_value}, {cert3.n_deterministic} det + "
        f"{one_box_sat} one-box saturators, rank {cert3.affine_rank}"
    ]
    for n in (4, 5):
        cert = verify_facet(make_mnn22(n), pr_machine(n - 1))
        ok = ok and cert.max_value == 0 and cert.affine_rank == n * (n + 2) - 1
        details.append(f"n={n}: max {cert.max_value}, rank {cert.affine_rank}")
    counts = [len(deterministic_saturators_mnn22(n)) for n in range(3, 7)]
    ok = ok and counts == [2**n for n in range(3, 7)]
    details.append(f"deterministic saturators {counts}")
    crit.finish(ok, "; ".join(details))


def test_criterion_7_lemma_property_suite():
    crit = Criterion(7, 30.0)
    details = []
    ok = True
    for n in (3, 4):
        report = check_lemma1(n, samples=10_000, seed=0, raise_on_counterexample=False)
        ok = ok and report.checked == 10_000 and not report.counterexamples
        details.append(f"n={n}: {report.checked} samples, "
                       f"{len(report.counterexamples)} counterexamples")
    crit.finish(ok, "; ".join(details))


def test_criterion_8_relaxation_exclusivity():
    crit = Criterion(8, 60.0)
    behaviors = one_machine_half_matrix(3, pr_box())
    values = doubled_values(behaviors, [make_c1(3), make_c2(3)])
    both = (values > 0).all(axis=1)
    count = int(both.sum())
    witness = ""
    if count:
        idx = int(np.flatnonzero(both)[0])
        witness = (
            f"; first witness behavior (half-units) {tuple(int(v) for v in behaviors[idx])} "
            f"with doubled values {tuple(int(v) for v in values[idx])}"
        )
    crit.finish(
        count == 0,
        f"{count} of {behaviors.shape[0]} one-box strategies violate both "
        f"relaxations{witness}",
    )


def test_criterion_9_quantum_claims():
    crit = Criterion(9, 600.0)
    state = TwoQubitState.schmidt(math.pi / 4)
    chsh = seesaw_maximize(make_chsh(2), state, restarts=20, seed=0)
    target = 1 / math.sqrt(2) - 0.5
    ok = abs(chsh.value - target) < 1e-6
    details = [f"CHSH {chsh.value:.8f}"]
    m3_max_ent = seesaw_maximize(make_mnn22(3), state, restarts=50, seed=0)
    ok = ok and m3_max_ent.value <= 1e-9
    details.append(f"m3322@pi/4 {m3_max_ent.value:.2e}")
    sweep3 = theta_sweep(make_mnn22(3), grid=60, restarts=12, seed=0)
    ok = ok and sweep3.best_value > 0 and sweep3.best_theta < math.pi / 4
    details.append(
        f"m3322 sweep best {sweep3.best_value:.2e} at theta {sweep3.best_theta:.3f}"
    )
    for n in (4, 5):
        sweep = theta_sweep(make_mnn22(n), grid=100, restarts=20, seed=0)
        ok = ok and max(sweep.values) <= 1e-7
        details.append(f"m{n}{n}22 sweep max {max(sweep.values):.2e}")
    crit.finish(ok, "; ".join(details))


def test_criterion_10_documented_exclusions(chsh3_orbit, i3322_orbit):
    crit = Criterion(10, 10.0)
    ok = len(set(chsh3_orbit) | set(i3322_orbit)) == 648
    crit.finish(
        ok,
        "completeness of the 648-facet classification and of facet lists for "
        "four or more settings is taken from the published classifications, "
        "not re-derived; tightness and rank property tests (criteria 2 and 6) "
        "stand in",
    )
