"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
report lines and timings.
"""

import math
import time

import numpy as np
import pytest

import xylab as xl
from xylab import ModelParams, Sector, thermal
from xylab.cli import compute_point, main
from xylab.geometric_measure import GroundSupport, geometric_measure

from conftest import ETA_GRID, H_GRID, T_GRID


def _report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    line = f"[acceptance] criterion {num:02d} {name}: {status}"
    if detail:
        line += f"  ({detail})"
    print(line, flush=True)
    assert ok, line


def test_criterion_01_sector_energy_oracle_equivalence(parity_spectra):
    start = time.time()
    worst = 0.0
    for n in (4, 6, 8, 10, 12):
        for h in H_GRID:
            for eta in ETA_GRID:
                params = ModelParams(h=h, eta=eta, n=n)
                blocks = parity_spectra(n, h, eta)
                for sector, label in ((Sector.PLUS, 1), (Sector.MINUS, -1)):
                    got = xl.sector_spectrum(params, sector).ground_energy
                    want = float(blocks[label][0])
                    worst = max(worst, abs(got - want) / max(1.0, abs(want)))
    _report(1, "sector energies vs parity-resolved dense ED",
            worst < 1e-10, f"worst rel err {worst:.2e}, {time.time()-start:.0f}s")


def test_criterion_02_partition_function_gate(parity_spectra):
    start = time.time()
    worst = 0.0
    for n in (4, 6, 8, 10, 12):
        for h in H_GRID:
            for eta in ETA_GRID:
                params = ModelParams(h=h, eta=eta, n=n)
                blocks = parity_spectra(n, h, eta)
                energies = np.sort(np.concatenate([blocks[1], blocks[-1]]))
                free = thermal.PopulationModel.build(params)
                for temperature in T_GRID:
                    shifted = -(energies - energies[0]) / temperature
                    log_z_dense = float(-energies[0] / temperature
                                        + np.log(np.sum(np.exp(shifted))))
                    log_z_free = thermal.log_partition_function(free, temperature)
                    worst = max(worst, abs(math.expm1(log_z_free - log_z_dense)))
    _report(2, "partition function, dense ED vs parity-projected modes",
            worst < 1e-10, f"worst rel err {worst:.2e}, {time.time()-start:.0f}s")


def test_criterion_03_wstate_exactness():
    start = time.time()
    worst_gm = 0.0
    for m in (2, 3, 4, 5, 6):
        vec = np.zeros(1 << m)
        for j in range(m):
            vec[1 << j] = 1.0 / math.sqrt(m)
        res = geometric_measure(GroundSupport(vectors=vec), restarts=8, seed=m)
        worst_gm = max(worst_gm, abs(res.g_bits - thermal.wstate_gm(m)))
    # strict increase is checked where increments are float-resolvable
    # (beyond kappa ~ 25 they fall below 1 ulp of the saturated value)
    kappas = np.geomspace(0.05, 20.0, 20)
    values = [thermal.wstate_gapped_threshold_tdl(k) for k in kappas]
    monotone = all(a < b for a, b in zip(values, values[1:]))
    limit = 1.0 / math.log(math.e / (math.e - 1.0))
    saturation = all(
        abs(thermal.wstate_gapped_threshold_tdl(k) - 2.1802) < 0.01 * 2.1802
        for k in (50.0, 80.0, 200.0))
    ok = worst_gm < 1e-6 and monotone and saturation
    _report(3, "W-state measure and gapped-threshold curve", ok,
            f"worst gm err {worst_gm:.2e}, limit {limit:.5f}, "
            f"{time.time()-start:.0f}s")


def test_criterion_04_separability_endpoints():
    start = time.time()
    failures = []
    for n in (8, 16):
        for h in (1.0, 1.5, 5.0):
            record, th, _ = compute_point(h, 0.0, n, restarts=8, seed=4)
            if not record.g_bits < 1e-8:
                failures.append(f"g={record.g_bits:.3g} at (h={h}, n={n})")
            if not record.t_th == 0.0:
                failures.append(f"t_th={record.t_th:.3g} at (h={h}, n={n})")
    detail = "; ".join(failures) if failures else "all points separable"
    _report(4, "separability endpoints on eta=0, h in {1, 1.5, 5}",
            not failures, f"{detail}, {time.time()-start:.0f}s")


def test_criterion_05_c_line_signature():
    start = time.time()
    eta = 0.8
    tths = {}
    for h in (0.55, 0.60, 0.65):
        record, _, _ = compute_point(h, eta, 12, restarts=8, seed=5)
        tths[h] = record.t_th
    local_min = tths[0.60] < tths[0.55] and tths[0.60] < tths[0.65]

    params = ModelParams(h=0.6, eta=eta, n=12)
    info = xl.gap_info(params)
    spec = xl.ground_space(params, k=info.d0, seed=0)
    cs = xl.correlations(spec.eigenvectors.T[:info.d0], params)
    target = 2.0 * eta / (1.0 + eta)
    flat = cs.cx.max() - cs.cx.min() < 0.02
    close = np.max(np.abs(cs.cx - target)) < 0.03
    ok = local_min and flat and close
    _report(5, "C-line: threshold dip and constant correlations", ok,
            f"t_th {tths[0.55]:.3f}/{tths[0.60]:.3f}/{tths[0.65]:.3f}, "
            f"C^X spread {cs.cx.max()-cs.cx.min():.2e}, {time.time()-start:.0f}s")


def test_criterion_06_v_line_sharpening():
    start = time.time()
    slopes = []
    for n in (8, 12, 16):
        lo, _, _ = compute_point(0.98, 1.0, n, restarts=8, seed=6)
        hi, _, _ = compute_point(1.02, 1.0, n, restarts=8, seed=6)
        slopes.append(abs(hi.g_bits - lo.g_bits) / 0.04)
    ok = slopes[0] < slopes[1] < slopes[2]
    _report(6, "V-line derivative growth with n", ok,
            f"slopes {slopes[0]:.3f} -> {slopes[1]:.3f} -> {slopes[2]:.3f}, "
            f"{time.time()-start:.0f}s")


def test_criterion_07_h_line_tradeoff():
    start = time.time()
    hs = [round(0.05 + 0.1 * j, 2) for j in range(9)]  # 0.05 .. 0.85
    peaks_g = {}
    peaks_t = {}
    for eta in (0.0, 0.4, 0.9):
        gs, ts = [], []
        for h in hs:
            record, _, _ = compute_point(h, eta, 12, restarts=8, seed=7)
            gs.append(record.g_bits)
            ts.append(record.t_th)
        peaks_g[eta] = max(gs)
        peaks_t[eta] = max(ts)
    max_on_h_line = peaks_g[0.0] > peaks_g[0.4] and peaks_g[0.0] > peaks_g[0.9]
    g_ratio = peaks_g[0.0] / peaks_g[0.4]
    t_ratio = peaks_t[0.0] / peaks_t[0.4]
    ok = max_on_h_line and t_ratio < g_ratio
    _report(7, "H-line: measure peak vs muted threshold peak", ok,
            f"g ratio {g_ratio:.2f}, t ratio {t_ratio:.2f}, "
            f"{time.time()-start:.0f}s")


def test_criterion_08_high_field_robustness():
    start = time.time()
    gs, ts = [], []
    for h in (5.0, 10.0, 20.0, 50.0):
        record, _, _ = compute_point(h, 0.4, 12, restarts=8, seed=8)
        gs.append(record.g_bits)
        ts.append(record.t_th)
    ok = all(a < b for a, b in zip(ts, ts[1:])) and \
        all(a > b for a, b in zip(gs, gs[1:]))
    _report(8, "strong field: threshold grows while measure shrinks", ok,
            f"t_th {ts[0]:.2f}..{ts[-1]:.2f}, g {gs[0]:.2e}..{gs[-1]:.2e}, "
            f"{time.time()-start:.0f}s")


def test_criterion_09_threshold_size_independence():
    start = time.time()
    values = []
    for n in (12, 16, 20):
        record, _, _ = compute_point(2.0, 0.5, n, restarts=8, seed=9)
        values.append(record.t_th)
    spread = (max(values) - min(values)) / min(values)
    _report(9, "threshold temperature independent of n", spread < 0.02,
            f"t_th {values[0]:.6f}/{values[1]:.6f}/{values[2]:.6f}, "
            f"spread {spread:.2e}, {time.time()-start:.0f}s")


def test_criterion_10_critical_overlap_decay():
    start = time.time()
    values = [xl.vline_overlap(0.5, 0.1, n, Sector.PLUS) for n in (10, 100, 1000)]
    golden = 4.239789146116854e-20  # frozen at first run
    ok = (values[0] > values[1] > values[2] and values[2] < 0.01
          and values[2] == pytest.approx(golden, rel=1e-10))
    _report(10, "ground-state overlap decay across the critical field", ok,
            f"{values[0]:.3f} -> {values[1]:.3e} -> {values[2]:.3e}, "
            f"{time.time()-start:.0f}s")


def test_criterion_11_population_exponent_bounds():
    start = time.time()
    ok = True
    for n in (100, 1000):
        for h in H_GRID:
            for eta in ETA_GRID:
                model = thermal.PopulationModel.build(ModelParams(h=h, eta=eta, n=n))
                previous = -math.inf
                for temperature in T_GRID:
                    mu = thermal.population_exponent(model, temperature)
                    lo, hi = thermal.population_exponent_bounds(
                        h, eta, temperature, n=n)
                    ok = ok and lo <= mu <= hi and mu > previous
                    previous = mu
    _report(11, "population exponent bounds and monotonicity", ok,
            f"{time.time()-start:.0f}s")


def test_criterion_12_sweep_determinism(tmp_path, monkeypatch):
    start = time.time()
    args = ["sweep", "--h-range", "0.3:1.7:3", "--eta-range", "0.2:1.0:3",
            "--n", "8", "--seed", "12", "--restarts", "6"]
    outputs = []
    for workers in ("1", "2", "8"):
        out = tmp_path / f"sweep_w{workers}.csv"
        monkeypatch.setenv("XYLAB_THREADS", workers)
        assert main(args + ["--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    ok = outputs[0] == outputs[1] == outputs[2]
    _report(12, "sweep CSV byte-identical across worker counts", ok,
            f"{len(outputs[0])} bytes, {time.time()-start:.0f}s")
