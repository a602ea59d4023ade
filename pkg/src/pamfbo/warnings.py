"""Warning types emitted by pamfbo.

Kept in a leaf module so the package ``__init__`` can re-export the
user-facing names without importing numpy/scipy machinery.
"""


class ProvisionalIncumbentWarning(UserWarning):
    """No high-fidelity observation exists yet, so the expected improvement
    is measured against the best value at the highest level present."""
