"""
Control Module
Greedy and policy rollouts and trajectory cost evaluation
"""
from .rollout import TrajectoryResult, evaluate_trajectory, rollout_greedy, rollout_policy

__all__ = ['TrajectoryResult', 'evaluate_trajectory', 'rollout_greedy', 'rollout_policy']
