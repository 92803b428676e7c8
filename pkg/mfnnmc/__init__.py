"""Multi-fidelity neural-network surrogate Monte Carlo (MFNNMC).

Estimates E[Q(y)] for parametric ODE/PDE models by training a two-level
neural-network surrogate from mixed low/high-fidelity solver data and
sampling it, with tolerance-driven choice of h_HF and N, a cost ledger and
the classical high-fidelity Monte Carlo baseline.

Subpackages:
- nnet: dense networks, Adam, training, checkpoints
- models: decay ODE and 2D wave equation with manufactured solutions
- pipeline: the MFNNMC stages, estimators and campaign runs
- analysis: tolerance budget, cost ledger, compliance, reference moments
"""

__version__ = "0.1.0"
