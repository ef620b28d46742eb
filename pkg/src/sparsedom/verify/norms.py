"""Re-export of the weighted norms used by the verifiers."""
from ..norms import dual_exponent, lp_norm, weak_norm

__all__ = ["lp_norm", "weak_norm", "dual_exponent"]
