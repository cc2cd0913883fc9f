import os

DEFAULT_CONFIG = {
    "project_dir": os.path.abspath(os.path.join(os.path.dirname(__file__), ".")),
    "results_dir": os.getenv("MIXEDTRACES_RESULTS_DIR", "./results"),
    "fixtures_dir": os.path.join(
        os.path.abspath(os.path.join(os.path.dirname(__file__), ".")),
        "fixtures",
    ),
    # Thread count only, never results
    "max_workers": int(os.getenv("MIXEDTRACES_THREADS", "4")),
    # Whitney settings
    "max_level": 12,
    "whitney_A": 1.0,
    "whitney_B": 16.0,
    "size_band": 8.0,
    "replay_samples": 256,
    "chain_bound": None,  # chain-length bound m; None reports lengths only
    "exterior_layer_budget": 256.0,
    # Grid settings
    "grid_margin": 0.25,
    "h_list": [1 / 64, 1 / 128],
    "pu_probe": 9,
    # Budgets
    "d_set_budget": 4.0,
    "equivalence_budget": 400.0,
    "stability_tolerance": 0.3,
    "critical_sp_band": 0.05,
    # Norm settings
    "kernel_exponent_sign": 1,  # +1: n + sp, -1: n - sp
    "wing_radius": 1.0e4,
    "wing_cells": 64,
    "block_size": 1024,
    # Interpolation settings
    "k_depth": 12,
    "solver_tol": 1e-6,
    "solver_max_iter": 2000,
    "smoothing": 1e-8,
    # Elliptic settings
    "dense_eig_limit": 8192,
    "coefficient_field": "identity",
    "heat_times": [0.01, 0.1, 1.0],
    "mr_horizon": 1.0,
    "mr_steps": 64,
    # Family settings
    "family_size": 50,
    "seed": 0,
}
