"""
CDP Module
Discrete conjugate dynamic programming: dual grids, operators, error budgets and value iteration
"""
from .dual_grids import (
    DualGridY, DualGridZ, DualGridV, construct_Y, construct_Z, construct_V,
    numeric_conj_stage_cost, stage_cost_range,
)
from .operators import (
    AnalyticStageConjugate, NumericStageConjugate, build_stage_conjugate,
    cdp1_step, cdp2_step, expectation_filter,
)
from .budget import ErrorBudget, error_budget_alg1, error_budget_alg2, error_budget_ddp, lipschitz_estimate
from .driver import ALGORITHMS, terminal_costs, value_iteration

__all__ = [
    'DualGridY', 'DualGridZ', 'DualGridV', 'construct_Y', 'construct_Z', 'construct_V',
    'numeric_conj_stage_cost', 'stage_cost_range',
    'AnalyticStageConjugate', 'NumericStageConjugate', 'build_stage_conjugate',
    'cdp1_step', 'cdp2_step', 'expectation_filter',
    'ErrorBudget', 'error_budget_alg1', 'error_budget_alg2', 'error_budget_ddp', 'lipschitz_estimate',
    'ALGORITHMS', 'terminal_costs', 'value_iteration',
]
