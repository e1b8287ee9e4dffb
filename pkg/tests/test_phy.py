import math

import numpy as np
import pytest

from riscomp.channel import realize_batch
from riscomp.pbf import Mode, PhasePlan, assign_modes, build_phase_plan
from riscomp.phy import (
    edge_channels, effective_channel, evaluate_trial, evaluate_trial_oma, oma_sinr, rate,
    sinr_bundle, sinr_center, sinr_center_sic, sinr_edge,
)
from riscomp.topology import Thresholds, build_topology

import oracle
from conftest import fixed_realization, random_instance

SIGMA2 = 10 ** ((-174 + 70 - 30) / 10)  # -104 dBm in watts


def single_cell(**extra):
    return build_topology({"cells": 1, "coop": 1, "ris_elements": 0, "pt_dbm": 30.0, **extra})


def one(center_gain, edge_gain):
    return fixed_realization([[math.sqrt(center_gain)]], [math.sqrt(edge_gain)])


# ---- effective channel -------------------------------------------------------

def test_effective_channel_examples():
    assert effective_channel(0.3 - 1j, [], [], []) == 0.3 - 1j
    h = effective_channel(1.0, [np.exp(-1j * np.pi / 3)], [np.pi / 3], [1.0])
    assert h == pytest.approx(2.0, abs=1e-15)
    assert abs(effective_channel(1.0, [1.0], [-np.pi], [1.0])) < 1e-15
    with pytest.raises(ValueError):
        effective_channel(1.0, [1.0, 1.0], [0.0], [1.0])


# ---- SINR examples -----------------------------------------------------------

def test_sinr_edge_hand_value():
    t = single_cell()
    assert t.noise_watts == pytest.approx(SIGMA2, rel=1e-12)
    g = sinr_edge(one(1e-9, 1e-9), None, t)
    assert g == pytest.approx(0.7e-9 / (0.3e-9 + SIGMA2), rel=1e-12)
    assert g == pytest.approx(2.3330, abs=1e-4)


def test_sinr_edge_interference_free_limit():
    t = single_cell()
    assert sinr_edge(one(1.0, 1.0), None, t) == pytest.approx(0.7 / 0.3, rel=1e-9)


def test_single_cell_center_reductions():
    t = single_cell()
    r = one(2e-10, 1e-9)
    P = 1.0
    assert sinr_center_sic(r, t, 0) == pytest.approx(0.7 * P * 2e-10 / (0.3 * P * 2e-10 + SIGMA2), rel=1e-12)
    assert sinr_center(r, t, 0) == pytest.approx(0.3 * P * 2e-10 / SIGMA2, rel=1e-12)
    hi = single_cell(zeta=0.9)
    assert sinr_center_sic(r, hi, 0) > sinr_center_sic(r, t, 0)


def test_center_scale_invariance_without_noise():
    g = np.random.default_rng(0)
    center, edge, _, _ = random_instance(g, 3, 0)
    r = fixed_realization(center, edge)
    big = 1e6  # makes noise negligible against every term
    a = build_topology({"cells": 3, "coop": 2, "ris_elements": 0, "pt_dbm": 30.0 + 10 * math.log10(big)})
    b = build_topology({"cells": 3, "coop": 2, "ris_elements": 0, "pt_dbm": 30.0 + 10 * math.log10(2 * big)})
    np.testing.assert_allclose(sinr_center(r, a), sinr_center(r, b), rtol=1e-6)


@pytest.mark.parametrize("gamma, expected", [(1.0, 1.0), (3.0, 2.0), (2.3330, 1.7369)])
def test_rate(gamma, expected):
    assert rate(gamma) == pytest.approx(expected, abs=1e-4)


# ---- outage ------------------------------------------------------------------

def test_edge_outage_at_equality():
    from riscomp.phy import outcome_from_sinr
    th = Thresholds(1.0, 0.5)
    out = outcome_from_sinr(th.gamma_hat_f, 10.0, 10.0, th)
    assert bool(out.outage_edge)
    assert not bool(outcome_from_sinr(np.nextafter(th.gamma_hat_f, 1), 10.0, 10.0, th).outage_edge)


def test_center_outage_joint_event():
    from riscomp.phy import outcome_from_sinr
    th = Thresholds(1.0, 0.5)
    assert bool(outcome_from_sinr(10.0, 1e9, 0.0, th).outage_center)
    assert bool(outcome_from_sinr(10.0, 0.1, 1e9, th).outage_center)
    assert not bool(outcome_from_sinr(10.0, 1.0, 1.5, th).outage_center)


@pytest.mark.parametrize("gc, ge, outage_center, outage_edge", [
    (1e-9, 1e-9, False, False),     # strong links: gamma_c = 7535, gamma_sic, gamma_e = 2.333
    (1e-13, 1e-9, True, False),     # gamma_c = 0.754 < 1 although gamma_sic = 1.003 > 0.414
    (1e-9, 1e-14, False, True),     # gamma_e = 0.10 < 0.414
    (1e-15, 1e-15, True, True),     # both drowned in noise
])
def test_truth_table(gc, ge, outage_center, outage_edge):
    t = single_cell()
    out = evaluate_trial(one(gc, ge), None, t, Thresholds(1.0, 0.5))
    assert bool(out.outage_center[0]) is outage_center
    assert bool(out.outage_edge) is outage_edge


# ---- oracle ------------------------------------------------------------------

def _random_plan(g, I, K):
    modes = g.integers(0, 4, size=(I, K)).astype(np.int8)
    phases = -np.pi + 2 * np.pi * g.random((I, K))
    phases = np.where(modes == Mode.OFF, 0.0, phases)
    return PhasePlan(phases, modes, np.zeros((I, K), bool))


def test_oracle_equivalence_100_instances():
    g = np.random.default_rng(2024)
    for _ in range(100):
        I = int(g.integers(1, 7))
        J = int(g.integers(1, I + 1))
        K = int(g.integers(0, 6))
        pt = g.uniform(-10, 20, I)
        zeta = g.uniform(0.55, 0.95, I)
        rth = (float(g.uniform(0.1, 2)), float(g.uniform(0.1, 2)))
        t = build_topology({"cells": I, "coop": J, "ris_elements": K, "pt_dbm": list(pt),
                            "zeta": list(zeta), "rate_center": rth[0], "rate_edge": rth[1]})
        center, edge, bs_ris, ris_edge = random_instance(g, I, K)
        r = fixed_realization(center, edge, bs_ris, ris_edge)
        plan = _random_plan(g, I, K)
        b = sinr_bundle(r, plan, t)
        out = evaluate_trial(r, plan, t)
        ref = oracle.evaluate(center.tolist(), edge.tolist(), bs_ris.tolist(), ris_edge.tolist(),
                              plan.phases.tolist(), plan.active.tolist(), list(t.power.pt_watts),
                              list(zeta), J, t.noise_watts, rth[0], rth[1])
        np.testing.assert_allclose(b.gamma_edge, ref["gamma_edge"], rtol=1e-12)
        np.testing.assert_allclose(b.gamma_center_sic, ref["gamma_sic"], rtol=1e-12)
        np.testing.assert_allclose(b.gamma_center, ref["gamma_center"], rtol=1e-12)
        np.testing.assert_allclose(b.y_edge, ref["y_edge"], rtol=1e-12, atol=0)
        np.testing.assert_allclose(b.y_center, ref["y_center"], rtol=1e-12, atol=0)
        np.testing.assert_allclose(out.rate_edge, ref["rate_edge"], rtol=1e-12)
        np.testing.assert_allclose(out.rate_center, ref["rate_center"], rtol=1e-12)
        assert bool(out.outage_edge) == ref["outage_edge"]
        assert out.outage_center.tolist() == ref["outage_center"]


# ---- structural properties ---------------------------------------------------

@pytest.fixture(scope="module")
def batch():
    t = build_topology({"ris_elements": 8})
    return t, realize_batch(t, 3, 0, 500)


def test_no_ris_equivalence():
    t0 = build_topology({"ris_elements": 0})
    r = realize_batch(t0, 3, 0, 200)
    none = sinr_bundle(r, build_phase_plan(r, assign_modes(t0, "none")), t0)
    ec = sinr_bundle(r, build_phase_plan(r, assign_modes(t0, "ec")), t0)
    for a, b in zip(vars(none).values(), vars(ec).values()):
        np.testing.assert_array_equal(a, b)


def test_eo_never_hurts_edge(batch):
    t, r = batch
    full = t.with_(coop=6)
    eo = sinr_edge(r, build_phase_plan(r, assign_modes(full, "eo")), full)
    off = sinr_edge(r, build_phase_plan(r, assign_modes(full, "none")), full)
    assert np.all(eo >= off * (1 - 1e-12))


def test_co_below_zero_phase(batch):
    t, r = batch
    co = np.abs(edge_channels(r, build_phase_plan(r, assign_modes(t, "ec"))))[:, 4:]
    zero = PhasePlan(np.zeros_like(r.bs_ris.real), np.full((6, 8), Mode.EO, np.int8), np.zeros((6, 8), bool))
    flat = np.abs(edge_channels(r, zero))[:, 4:]
    assert np.all(co <= flat * (1 + 1e-12))


def test_full_cooperation_removes_edge_interference(batch):
    t, r = batch
    full = t.with_(coop=6)
    eo = sinr_bundle(r, build_phase_plan(r, assign_modes(full, "eo")), full)
    ec = sinr_bundle(r, build_phase_plan(r, assign_modes(full, "ec")), full)
    assert np.all(eo.y_edge == 0)
    for a, b in zip(vars(eo).values(), vars(ec).values()):
        np.testing.assert_array_equal(a, b)


def test_noma_edge_rate_ceiling(batch):
    t, r = batch
    re = rate(sinr_edge(r, build_phase_plan(r, assign_modes(t, "ec")), t))
    assert np.all(re < math.log2(1 + 0.7 / 0.3))


# ---- orthogonal baseline -----------------------------------------------------

def test_oma_single_cell_hand_values():
    t = single_cell()
    r = one(1e-10, 1e-9)
    ge, gc = oma_sinr(r, t)
    assert ge == pytest.approx(1e-9 / SIGMA2, rel=1e-12)
    assert gc[0] == pytest.approx(1e-10 / SIGMA2, rel=1e-12)
    out = evaluate_trial_oma(r, t)
    assert out.rate_edge == pytest.approx(0.5 * math.log2(1 + 1e-9 / SIGMA2), rel=1e-12)
    assert out.rate_edge > rate(sinr_edge(r, None, t))
    again = evaluate_trial_oma(r, t)
    assert again.rate_edge == out.rate_edge and again.outage_center.tolist() == out.outage_center.tolist()


def test_oma_thresholds_are_doubled():
    t = single_cell()
    # 0.5 log2(1 + g) vs 0.5 bps/Hz: outage iff g < 2^1 - 1 = 1
    g_edge = 0.99 * SIGMA2
    assert bool(evaluate_trial_oma(one(1e-9, g_edge), t).outage_edge)
    assert not bool(evaluate_trial_oma(one(1e-9, 1.01 * SIGMA2), t).outage_edge)


def test_oma_three_cell_interference():
    g = np.random.default_rng(7)
    center, edge, _, _ = random_instance(g, 3, 0)
    t = build_topology({"cells": 3, "coop": 2, "ris_elements": 0})
    ge, gc = oma_sinr(fixed_realization(center, edge), t)
    P = t.power.pt_watts[0]
    e2 = np.abs(edge) ** 2
    assert ge == pytest.approx(P * (e2[0] + e2[1]) / (P * e2[2] + t.noise_watts), rel=1e-12)
    c2 = np.abs(center) ** 2
    for i in range(3):
        others = sum(P * c2[m, i] for m in range(3) if m != i)
        assert gc[i] == pytest.approx(P * c2[i, i] / (others + t.noise_watts), rel=1e-12)
