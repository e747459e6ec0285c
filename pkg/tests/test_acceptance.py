"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the summary lines.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest

from iotauth.baseline import run_keygen_session
from iotauth.channel import ReciprocityParams, probe_sequence, stack
from iotauth.cli import main
from iotauth.config import load_config
from iotauth.prbs import SHIPPED_SPECS
from iotauth.sim import (
    compare_costs,
    demotion_step,
    policy,
    quantize_demo,
    run_holistic_scenario,
    run_lightweight_scenario,
    trust_trajectory,
)
from iotauth.svm import (
    KernelSpec,
    QuantizerConfig,
    bits_at,
    decision_values,
    default_kernel,
    disagreement,
    kkt_residuals,
    label_two_partitions,
    quantize,
    rss_baseline_quantize,
    solve_dual,
    train_boundary,
)
from iotauth.transcript import assert_no_secret_leak
from oracles import brute_force_svm_dual, lfsr_cycle

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def verdict(n: int, title: str, ok: bool, detail: str) -> None:
    print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} :: {detail}")
    assert ok, detail


class Clock:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_c01_trust_ordering_under_on_off_attack():
    with Clock() as c:
        cfg = load_config({"channel": {"rho": 0.95}, "adversaries": [{"kind": "misdetected"}]})
        r = run_holistic_scenario(cfg)
    steps = {s: r.demotion_step[s] for s in (1, 2, 3)}
    starts = {s: r.initial_trust for s in steps}
    below = {s: any(t < 0.5 for _, t, _ in r.trajectories[s]) for s in steps}
    ok = (
        all(v is not None for v in steps.values())
        and steps[3] <= steps[2] <= steps[1]
        and all(v == 0.9 for v in starts.values())
        and all(below.values())
        and all(r.trajectories[s][steps[s] - 1][1] < 0.5 for s in steps)
        and c.elapsed < 5
    )
    verdict(1, "demotion non-increasing in evidence sources", ok, f"demotion={steps} start=0.9 t={c.elapsed:.2f}s")


def test_c02_closed_form_trust():
    cfg = load_config(
        {
            "channel": {"rho": 0.95},
            "n_steps": 6,
            "adversaries": [{"kind": "misdetected", "duty_cycle": 1.0, "rssi_offset": 1e6, "cfo_offset": 1e6}],
            "detector": {"p_detect": 1.0},
        }
    )
    rec = trust_trajectory(cfg, 3, cfg.adversaries[0])
    trust = [t for _, t, _ in rec.history][:4]
    first_below = next(s for s, t, _ in rec.history if t < 0.5)
    ok = trust == [0.9, 0.75, 0.6, 0.45] and first_below == 3 and demotion_step(rec, policy(cfg)) == 3
    verdict(2, "always-on attack demotes at step 3", ok, f"trust={trust} first_below={first_below}")


def test_c03_transcript_privacy():
    lw_total = lw_clean = 0
    for seed in range(6):
        for path in ("noiseless.yaml", "lightweight.yaml"):
            cfg = load_config(CONFIGS / path, {"rng_seed": seed, "n_steps": 80})
            r = run_lightweight_scenario(cfg)
            for _, _, t in r.transcripts:
                lw_total += 1
                lw_clean += assert_no_secret_leak(t)
    bl_total = bl_leak = 0
    for seed in range(20):
        s = run_keygen_session(ReciprocityParams(0.99), 128, np.random.default_rng(seed))
        bl_total += 1
        bl_leak += not assert_no_secret_leak(s.transcript)
    ok = lw_total > 0 and lw_clean == lw_total and bl_leak == bl_total
    verdict(3, "lightweight never leaks, baseline always leaks", ok,
            f"lightweight clean {lw_clean}/{lw_total}, baseline leaking {bl_leak}/{bl_total}")


def test_c04_continuity_cost():
    grid = [1, 10, 100, 1000]
    with Clock() as c:
        cfg = load_config(CONFIGS / "noiseless.yaml")
        t = compare_costs(cfg, [0] + grid)
    by = {(r["n"], r["scheme"]): r["messages"] for r in t.rows}
    lw_inc = {(by[(n, "lightweight")] - by[(0, "lightweight")]) / n for n in grid}
    bl_inc = {(by[(n, "baseline")] - by[(0, "baseline")]) / n for n in grid}
    n0 = t.crossover_n0
    beyond = [n for n in grid if n > n0]
    gaps = [by[(n, "baseline")] - by[(n, "lightweight")] for n in beyond]
    ok = (
        t.lightweight_established
        and lw_inc == {0.0}
        and bl_inc == {2.0}
        and n0 is not None
        and len(beyond) >= 2
        and all(b > a for a, b in zip(gaps, gaps[1:]))
        and all(g > 0 for g in gaps)
        and c.elapsed < 10
    )
    verdict(4, "zero-message lightweight auth, crossover exists", ok,
            f"per-auth lightweight={lw_inc} baseline={bl_inc} n0={n0} gaps={gaps} t={c.elapsed:.2f}s")


def test_c05_spoofing_bound():
    details = []
    ok = True
    with Clock() as c:
        for S, L in ((4, 4), (8, 4), (16, 2)):
            trials = 100_000
            cfg = load_config(
                {
                    "channel": {"rho": 1.0},
                    "n_sensors": 1,
                    "n_steps": trials * L,
                    "rng_seed": S * 10 + L,
                    "access": {"slots_per_frame": S, "window": L},
                    "adversaries": [{"kind": "spoofer"}],
                }
            )
            r = run_lightweight_scenario(cfg)
            p = (1 / S) ** L
            tol = 3 * math.sqrt(p * (1 - p) / r.spoof_windows)
            good = r.spoof_windows >= trials and abs(r.spoof_acceptance_rate - p) <= tol
            ok &= good
            details.append(f"(S={S},L={L}) {r.spoof_acceptance_rate:.3e} vs {p:.3e}±{tol:.1e}")
    ok &= c.elapsed < 30
    verdict(5, "spoofer acceptance matches (1/S)^L", ok, "; ".join(details) + f" t={c.elapsed:.2f}s")


def test_c06_prbs_invariants():
    bad = []
    with Clock() as c:
        for k in range(2, 17):
            period, ones = lfsr_cycle(1, k, SHIPPED_SPECS[k].taps)
            if period != 2**k - 1 or ones != 2 ** (k - 1):
                bad.append(k)
    ok = not bad and c.elapsed < 5
    verdict(6, "shipped LFSRs maximal and balanced for k<=16", ok, f"bad={bad} t={c.elapsed:.2f}s")


def test_c07_svm_oracle_equivalence():
    rng = np.random.default_rng(2024)
    worst_obj = worst_kkt = 0.0
    with Clock() as c:
        for i in range(50):
            n = int(rng.integers(2, 9))
            d = int(rng.integers(1, 4))
            x = rng.standard_normal((n, d))
            y = rng.choice([-1.0, 1.0], n)
            y[0], y[1] = 1.0, -1.0
            kernel = KernelSpec("rbf", float(rng.uniform(0.2, 2.0))) if i % 2 else KernelSpec("linear")
            C = float(rng.choice([0.5, 1.0, 10.0]))
            K = kernel.matrix(x, x)
            sol = solve_dual(K, y, C)
            best, _ = brute_force_svm_dual(K, y, C)
            worst_obj = max(worst_obj, abs(sol.objective - best))
            decision = K @ (sol.alpha * y) + sol.bias
            worst_kkt = max(worst_kkt, float(np.max(kkt_residuals(sol.alpha, y, decision, C))))
    ok = worst_obj <= 1e-4 and worst_kkt <= 1e-3 and c.elapsed < 60
    verdict(7, "SMO dual matches brute-force QP", ok,
            f"max|dobj|={worst_obj:.2e} max KKT={worst_kkt:.2e} t={c.elapsed:.2f}s")


def test_c08_guard_band_benefit():
    with Clock() as c:
        rounds = probe_sequence(ReciprocityParams(0.95), 10_000, np.random.default_rng(808))
        gw = [r.gateway_obs for r in rounds]
        sn = [r.sensor_obs for r in rounds]
        train = stack(gw[:200])
        b = train_boundary(train, label_two_partitions(train), default_kernel(2), 10.0)
        rates = {}
        for eps in (0.0, 0.25, 0.5, 1.0):
            q = quantize(gw, b, QuantizerConfig(eps, 10.0, 1))
            rates[eps] = disagreement(q.bits, bits_at(sn, b, q.kept_indices))
        rg = rss_baseline_quantize(gw, float(np.median([p.rssi for p in gw])))
        rs = rss_baseline_quantize(sn, float(np.median([p.rssi for p in sn])))
        rss = disagreement(rg.bits, rs.bits)
    vals = [rates[e] for e in (0.0, 0.25, 0.5, 1.0)]
    ok = rates[0.5] < rss and all(y <= x for x, y in zip(vals, vals[1:])) and c.elapsed < 30
    verdict(8, "guard band reduces bit disagreement", ok,
            f"svm={ {e: round(v, 4) for e, v in rates.items()} } rss={rss:.4f} t={c.elapsed:.2f}s")


def test_c09_reciprocity_and_eve():
    rho = 0.95
    rounds = probe_sequence(ReciprocityParams(rho), 10_000, np.random.default_rng(909))
    g = np.array([r.gateway_obs.gains for r in rounds])
    s = np.array([r.sensor_obs.gains for r in rounds])
    corrs = [float(np.corrcoef(g[:, k], s[:, k])[0, 1]) for k in range(g.shape[1])]
    corrs.append(float(np.corrcoef([r.gateway_obs.rssi for r in rounds], [r.sensor_obs.rssi for r in rounds])[0, 1]))
    gw = [r.gateway_obs for r in rounds]
    ev = [r.eve_obs for r in rounds]
    train = stack(gw[:200])
    b = train_boundary(train, label_two_partitions(train), default_kernel(2), 10.0)
    q = quantize(gw, b, QuantizerConfig(0.5, 10.0, 1))
    eve = bits_at(ev, b, q.kept_indices)
    agree = 1.0 - disagreement(q.bits, eve)
    ok = all(abs(c - rho) <= 0.01 for c in corrs) and 0.45 <= agree <= 0.55
    verdict(9, "reciprocity calibrated, eavesdropper uncorrelated", ok,
            f"corr={[round(c, 4) for c in corrs]} eve_agreement={agree:.4f} over {len(q)} bits")


def test_c10_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    same = {}
    lw = load_config(CONFIGS / "lightweight.yaml", {"n_steps": 160})
    hol = load_config(CONFIGS / "holistic.yaml")
    same["lightweight"] = run_lightweight_scenario(lw).to_json() == run_lightweight_scenario(lw).to_json()
    same["holistic"] = run_holistic_scenario(hol).to_json() == run_holistic_scenario(hol).to_json()
    same["holistic_parallel"] = run_holistic_scenario(hol, parallel=True).to_json() == run_holistic_scenario(hol).to_json()
    same["compare"] = compare_costs(lw, [1, 10]).to_csv() == compare_costs(lw, [1, 10]).to_csv()
    same["quantize_demo"] = json.dumps(quantize_demo(lw), sort_keys=True) == json.dumps(quantize_demo(lw), sort_keys=True)
    argvs = {
        "cli_lightweight": ["simulate", "lightweight", str(CONFIGS / "lightweight.yaml"), "--set", "n_steps=160"],
        "cli_holistic": ["simulate", "holistic", str(CONFIGS / "holistic.yaml")],
        "cli_compare": ["compare", str(CONFIGS / "noiseless.yaml")],
    }
    for name, argv in argvs.items():
        out = tmp_path / name
        snaps = []
        for _ in range(2):
            assert main(argv + ["--seed", "7", "--out", str(out)]) == 0
            snaps.append({f.name: f.read_bytes() for f in sorted(out.iterdir())})
        same[name] = snaps[0] == snaps[1]
    capsys.readouterr()
    verdict(10, "same seed gives byte-identical reports", all(same.values()), f"{same}")
