"""pamfbo: physics-aware multifidelity Bayesian optimization.

A recursive autoregressive multifidelity Gaussian process surrogate, a
composite multifidelity expected-improvement acquisition with a pluggable
physics-aware bias, and a budget-tracked optimization loop, benchmarked
against single-fidelity and plain multifidelity baselines.

Example study configuration (forrester.json):
    {
        "problem": {"name": "forrester"},
        "algorithm": "PA-MFBO",
        "bias": {"name": "identity"},
        "init": {"counts": [10, 3]},
        "budget": 15,
        "replications": 10,
        "checkpoints": [5, 10, 15]
    }

Run it with ``pamfbo run forrester.json``.
"""

from pamfbo.warnings import ProvisionalIncumbentWarning

__all__ = ["ProvisionalIncumbentWarning"]
