"""
Problem Module
Control problem definitions, the d-DP benchmark operator and analytic conjugates
"""
from .models import (
    ControlProblem, Disturbance, DiscretizationPlan, JointStageCost, SeparableStageCost,
    ValueIterationResult, make_plan,
)
from .costs import (
    QuadraticCost, L1Cost, ExpL1Cost, LinearCost, ZeroCost, build_cost,
    conj_quad_ball, conj_quad_box, conj_l1_box, conj_expl1_box,
)
from .ddp import FeasibilityReport, InfeasibleProblemError, ddp_step, ddp_step_stochastic, feasibility_check
from .presets import presets, get_preset
from .loader import load_problem_file

__all__ = [
    'ControlProblem', 'Disturbance', 'DiscretizationPlan', 'JointStageCost', 'SeparableStageCost',
    'ValueIterationResult', 'make_plan',
    'QuadraticCost', 'L1Cost', 'ExpL1Cost', 'LinearCost', 'ZeroCost', 'build_cost',
    'conj_quad_ball', 'conj_quad_box', 'conj_l1_box', 'conj_expl1_box',
    'FeasibilityReport', 'InfeasibleProblemError', 'ddp_step', 'ddp_step_stochastic', 'feasibility_check',
    'presets', 'get_preset', 'load_problem_file',
]
