"""Desk-scale calibration run: acceptance-criteria measurements for freezing."""
import json
import time

import numpy as np

import zsf

t_all = time.time()
table = zsf.bundled_zeros()
out = {}

# --- smooth stage (criterion 6 config) ---
t0 = time.time()
E_max = 1.5 * zsf.smooth_zero(30)
prof = zsf.march_potential(E_max, 0.05)
g = zsf.make_grid(12.0, 4001)
V0_raw = zsf.sample_symmetric(prof, g)
sm_targets = zsf.build_targets(0, table, 30)
V0, rep0 = zsf.refine(V0_raw, sm_targets)
e20 = zsf.spectrum_of(V0, 20)
smz = np.array([zsf.smooth_zero(n) for n in range(1, 21)])
out["smooth"] = {
    "wall_s": time.time() - t0,
    "iterations": rep0.iterations,
    "F_init": rep0.initial_objective,
    "F_final": rep0.final_objective,
    "stalled": rep0.stalled,
    "max_dev_20": float(np.abs(e20 - smz).max()),
    "preview_max_dev_20": float(np.abs(zsf.spectrum_of(V0_raw, 20) - smz).max()),
}
print("smooth:", json.dumps(out["smooth"], indent=1), flush=True)

# --- match stage (criterion 7 config) ---
t0 = time.time()
seq = zsf.match_sequence(V0, 20, table, zsf.MatchConfig(buffer=10))
out["match"] = {
    "wall_s": time.time() - t0,
    "stage_resid": [r.max_matched_residual for r in seq.reports],
    "stage_wall": [r.wall_time_s for r in seq.reports],
    "stage_iters": [sum(rr.iterations for rr in r.refine_reports) for r in seq.reports],
}
print("match total:", out["match"]["wall_s"], flush=True)
print("worst stage resid:", max(out["match"]["stage_resid"]), flush=True)

# --- analysis: summaries, amplitude law, periods ---
summaries = []
for n in range(1, 21):
    summaries.append(zsf.summarize_oscillation(seq.correction(n)))
res = zsf.amplitude_law_residuals(summaries, table)
out["analysis"] = {
    "periods": [s.period_count for s in summaries],
    "amplitudes": [s.amplitude for s in summaries],
    "two_err": [2 * zsf.approximation_error(n, table) for n in range(1, 21)],
    "amp_rel_dev": [float(abs(r)) for r in res],
    "median_amp_dev": float(np.median(np.abs(res))),
    "sign_pattern_ok": all(s.amplitude > 0 for s in summaries),
    "extrema_std_over_mean": [
        float(np.std([abs(v) for _, v in s.interior_extrema()])
              / np.mean([abs(v) for _, v in s.interior_extrema()]))
        if s.interior_extrema() else 0.0
        for s in summaries],
}
print("analysis:", json.dumps(out["analysis"], indent=1), flush=True)

# --- wavelengths on C20 (criterion 8) ---
C20 = seq.correction(20)
s20 = summaries[19]
wl = zsf.wavelength_zero_crossing(C20)
V20 = seq.potential(20)
Z20 = table.zero(20)
rows = []
for x, lam in wl:
    if abs(x) <= 0.8 * s20.region[1]:
        lam_wkb = zsf.wkb_wavelength(V20, Z20, x)
        rows.append((x, lam, lam_wkb, abs(lam - lam_wkb) / lam_wkb))
out["wavelength_C20"] = {
    "count": len(rows),
    "max_rel_dev_inner80": float(max(r[3] for r in rows)),
    "median_rel_dev": float(np.median([r[3] for r in rows])),
}
print("wavelength:", json.dumps(out["wavelength_C20"], indent=1), flush=True)

# --- tails (criterion 9) ---
tails = []
for n in range(1, 21):
    for side in ("left", "right"):
        tails.append(zsf.extract_tail(seq.correction(n), side,
                                      summaries[n - 1].amplitude,
                                      summary=summaries[n - 1]))
tpl = zsf.average_tails(tails)
stack = np.array([np.interp(tpl.offsets, t.offsets, t.values) for t in tails])
out["tail"] = {
    "mean": float(tpl.values.mean()),
    "support": tpl.support,
    "len": int(len(tpl.values)),
    "first_values": [float(t.values[0]) for t in tails[:6]],
    "pointwise_std_max": float(stack.std(axis=0).max()),
    "pointwise_std_median": float(np.median(stack.std(axis=0))),
}
print("tail:", json.dumps(out["tail"], indent=1), flush=True)

# --- reconstruction quality per n, fitted shifts ---
model = zsf.build_model(tpl, table, "model")
rms_rows, fit_rows, junction_rows = [], [], []
for n in range(2, 21):
    A = zsf.model_amplitude(n, table)
    base = seq.potential(n - 1)
    C_dir = seq.correction(n)
    smn = summaries[n - 1]
    mask = (g.x >= smn.region[0]) & (g.x <= smn.region[1])
    for s_n, tag in ((zsf.model_shift(A), "model"), (0.0, "zero")):
        osc = zsf.reconstruct_oscillation(n, base, table.zero(n), A, s_n)
        Cm = zsf.attach_tails(osc, tpl, A)
        rms = float(np.sqrt(np.mean((Cm.values[mask] - C_dir.values[mask]) ** 2)) / abs(A))
        if tag == "model":
            rms_model = rms
            # one-sided junction mismatch at the attachment point
            mid = g.center_index
            vr = base.values[mid:]
            wn = 2.0 * np.sqrt(np.maximum(table.zero(n) - vr - s_n, 0.0))
            ph = np.concatenate([[0.0], np.cumsum(0.5 * (wn[:-1] + wn[1:]) * g.spacing)])
            phi_att = float(np.interp(osc.trough_x, g.x[mid:], ph))
            junction_rows.append(abs(A * (-1.0) ** n * np.cos(phi_att) - (-A)) / abs(A))
        else:
            rms_zero = rms
    fitted = zsf.fit_shift(C_dir, base, table.zero(n), A)
    fit_rows.append((n, A, fitted, zsf.model_shift(A)))
    rms_rows.append((n, rms_model, rms_zero))
out["reconstruct"] = {
    "rms_model": [[r[0], round(r[1], 4)] for r in rms_rows],
    "rms_zero": [[r[0], round(r[2], 4)] for r in rms_rows],
    "max_rms_model": max(r[1] for r in rms_rows),
    "max_rms_zero": max(r[2] for r in rms_rows),
    "junction_max": max(junction_rows),
    "fits": [[r[0], round(r[1], 3), round(r[2], 3), round(r[3], 3)] for r in fit_rows],
}
print("reconstruct:", json.dumps(out["reconstruct"], indent=1), flush=True)

# slope comparison: fitted vs model shifts across n
A_arr = np.array([r[1] for r in fit_rows])
f_arr = np.array([r[2] for r in fit_rows])
slope_fit = float(np.polyfit(A_arr, f_arr, 1)[0])
out["shift_slope"] = {"fitted_slope": slope_fit, "model_slope": 1.0 / 3.0}
print("shift slope:", out["shift_slope"], flush=True)

# --- assembly at N=20 (desk-scale analogue of criterion 10) ---
t0 = time.time()
V20r, repv = zsf.assemble_and_verify(V0, model, table, 20, direct=seq.potential(20))
out["assemble"] = {
    "wall_s": time.time() - t0,
    "residuals": [round(float(r), 4) for r in repv.residuals],
    "max_abs_residual": repv.max_abs_residual,
    "sup_vs_direct": repv.sup_vs_direct,
    "two_max_amp": 2 * max(abs(a) for a in repv.amplitudes),
}
print("assemble:", json.dumps(out["assemble"], indent=1), flush=True)

# total variation check (fine-structure invariant)
dv = np.abs(np.diff(V20r.values - V0.values)).sum()
smooth_dv = np.abs(np.diff(np.convolve(V20r.values - V0.values,
                                       np.ones(201) / 201, mode="same"))).sum()
out["fine_structure"] = {"tv": float(dv), "tv_smoothed": float(smooth_dv),
                         "ratio": float(dv / smooth_dv)}
print("fine structure:", out["fine_structure"], flush=True)

out["total_wall_s"] = time.time() - t_all
with open("calib_desk_results.json", "w") as fh:
    json.dump(out, fh, indent=1)
print("DONE in", out["total_wall_s"], "s", flush=True)
