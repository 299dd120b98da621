"""Dev-only: full-scale validation of Monte-Carlo-bound criteria (100 reps)."""
import time

import numpy as np

import itspca as sp
from itspca.bench import ExperimentSpec, run_experiment

t_start = time.time()

# criterion 1 cells
cells = [("peak", 100., 0.0019), ("peak", 25., 0.0071), ("step", 100., 0.0061), ("sing", 25., 0.0068)]
for name, lam2, ref in cells:
    spec = ExperimentSpec(p=2048, n=1024, spikes=(lam2,), eigvec_sources=(name,), replicates=100, m_values=(1,))
    rep = run_experiment(spec)
    c = rep.cell("itspca", 1)
    lo, hi = 0.5 * ref, 1.5 * ref
    ok = "OK" if lo <= c.mean_loss <= hi else "FAIL"
    print(f"C1 {name}@{lam2:.0f}: loss={c.mean_loss:.5f} se={c.se_loss:.5f} band=({lo:.5f},{hi:.5f}) {ok} "
          f"size={c.mean_size:.1f} [{time.time()-t_start:.0f}s]", flush=True)

# criterion 2 + 3: multi-spike
spec_a = ExperimentSpec(p=2048, n=1024, spikes=(100., 75., 50., 25.),
                        eigvec_sources=("step", "poly", "peak", "sing"), replicates=100, m_values=(4,))
rep_a = run_experiment(spec_a)
ca = rep_a.cell("itspca", 4)
lo, hi = 0.5 * 0.0087, 1.5 * 0.0087
print(f"C2a (100,75,50,25) m=4: loss={ca.mean_loss:.5f} band=({lo:.5f},{hi:.5f}) "
      f"{'OK' if lo <= ca.mean_loss <= hi else 'FAIL'} [{time.time()-t_start:.0f}s]", flush=True)
print(f"C3a nspike_counts={rep_a.nspike_counts} m_counts={rep_a.m_counts}", flush=True)

spec_b = ExperimentSpec(p=2048, n=1024, spikes=(60., 55., 50., 45.),
                        eigvec_sources=("step", "poly", "peak", "sing"), replicates=100, m_values=(1, 4))
rep_b = run_experiment(spec_b)
l1 = rep_b.cell("itspca", 1).mean_loss
l4 = rep_b.cell("itspca", 4).mean_loss
print(f"C2b (60,55,50,45): m=1 loss={l1:.4f}  m=4 loss={l4:.4f}  ordering {'OK' if l4 < l1 else 'FAIL'}", flush=True)
print(f"C3b nspike_counts={rep_b.nspike_counts} m_counts={rep_b.m_counts} [{time.time()-t_start:.0f}s]", flush=True)

# criterion 4: correct exclusion at gamma = 3.5, peak, lam2 = 25
p, n = 2048, 1024
wspec = sp.WaveletSpec(sp.default_levels(p))
q1 = sp.dwt(sp.test_signal("peak", p).values, wspec)
model_w = sp.SpikedModel(p, np.array([25.0]), q1[:, None], 1.0)
oq = sp.oracle_quantities(model_w, n, gamma=3.5, m=1)
h_set = set(int(i) for i in oq.h_set)
print(f"C4 beta={oq.beta:.5f} card(H)={len(h_set)}", flush=True)
model_o = sp.SpikedModel(p, np.array([25.0]), sp.test_signal("peak", p).values[:, None], 1.0)
good = 0
for r in range(100):
    data = sp.generate(model_o, n, seed=sp.bench.DEFAULT_BASE_SEED + r)
    rows = sp.dwt(data.rows, wspec)
    ds = sp.DataSet(rows=rows, rng_seed=data.rng_seed)
    s2 = sp.estimate_noise_var(ds)
    ds = sp.DataSet(rows=rows / np.sqrt(s2), rng_seed=data.rng_seed)
    cov = sp.sample_cov(ds)
    init = sp.dtspca(cov, p, 3.0, 1.0)
    fit = sp.itspca(cov, init, sp.FitConfig(m=1, gamma=3.5))
    if set(int(i) for i in fit.support) <= h_set:
        good += 1
print(f"C4 exclusion: {good}/100 supports inside H {'OK' if good >= 95 else 'FAIL'} [{time.time()-t_start:.0f}s]", flush=True)
