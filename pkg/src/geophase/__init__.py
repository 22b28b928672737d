"""Weak-measurement-induced geometric phases on a qubit.

Core layers:

- ``qmat``: exact 2x2 complex linear algebra and phase unwrapping
- ``measurement``: the null-type weak-measurement POVM and its rotations
- ``analytic``: closed-form quasicontinuous phase, critical strengths
- ``trajectory``: finite-N amplitude products and stochastic readout records
- ``landscape``: N-c grid sweeps, noise ensembles, and stability statistics

A FastAPI service (``geophase.service``) wraps the computations behind typed
request/response models, and ``geophase.cli`` is a thin client over the same
handlers that writes CSV/JSON/SVG files.
"""

__version__ = "0.1.0"
