import numpy as np
from itspca.bench import ExperimentSpec, MethodSpec, run_experiment
from itspca.thresholding import HARD

spec_a = ExperimentSpec(p=2048, n=1024, spikes=(100., 75., 50., 25.),
                        eigvec_sources=("step", "poly", "peak", "sing"), replicates=100,
                        methods=(MethodSpec("itspca", threshold=HARD), MethodSpec("dtspca")),
                        m_values=(4,))
rep = run_experiment(spec_a)
c = rep.cell("itspca", 4)
lo, hi = 0.5*0.0087, 1.5*0.0087
print(f"C2a-hard (100,75,50,25) m=4: loss={c.mean_loss:.5f} se={c.se_loss:.5f} band=({lo:.5f},{hi:.5f}) "
      f"{'OK' if lo <= c.mean_loss <= hi else 'FAIL'} size={c.mean_size:.1f}", flush=True)

spec_b = ExperimentSpec(p=2048, n=1024, spikes=(60., 55., 50., 45.),
                        eigvec_sources=("step", "poly", "peak", "sing"), replicates=100,
                        methods=(MethodSpec("itspca", threshold=HARD),),
                        m_values=(1, 4))
rep_b = run_experiment(spec_b)
l1 = rep_b.cell("itspca", 1).mean_loss
l4 = rep_b.cell("itspca", 4).mean_loss
print(f"C2b-hard (60,55,50,45): m=1 {l1:.4f} m=4 {l4:.4f} ordering {'OK' if l4 < l1 else 'FAIL'}", flush=True)
print(f"rank counts a={rep.nspike_counts}/{rep.m_counts} b={rep_b.nspike_counts}/{rep_b.m_counts}", flush=True)
