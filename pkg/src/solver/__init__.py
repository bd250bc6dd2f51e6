from .euler import SdePath, euler_additive, euler_multiplicative, pairwise_sum, reference_solution

__all__ = ['SdePath', 'euler_additive', 'euler_multiplicative', 'pairwise_sum', 'reference_solution']
