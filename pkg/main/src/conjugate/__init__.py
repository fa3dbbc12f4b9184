"""
Conjugate Module
Legendre-Fenchel machinery: LLT, brute-force oracle, slope ranges and error bounds
"""
from .llt import ConjugateResult, llt_1d, llt_nd, brute_conjugate, slope_range, approx_conjugate
from .bounds import ConjBoundInputs, bound_e_tilde_2, bound_lerp_conj

__all__ = [
    'ConjugateResult', 'llt_1d', 'llt_nd', 'brute_conjugate', 'slope_range', 'approx_conjugate',
    'ConjBoundInputs', 'bound_e_tilde_2', 'bound_lerp_conj',
]
