# %%
"""
Error versus number of Diracs
=============================

Small Monte Carlo run of the noise-free experiment. The CSV it prints is
what the ``sphfri experiment`` command writes; feed it to any plotter.
"""
import numpy as np

from sphfri import ExperimentConfig, records_to_csv, run_experiment

cfg = ExperimentConfig(K_values=[2, 4, 8, 12, 16, 20], trials=50, seed=0, workers=2)
records = run_experiment(cfg)
print(records_to_csv(records))

# %% log10 of the worst mean squared error per K
for rec in records:
    worst = max(rec.E_theta, rec.E_phi, rec.E_alpha)
    print(rec.K, rec.L, f"{np.log10(worst):6.1f}", rec.trials_failed)
