"""Queue-length regret minimization over arbitrarily varying channels."""
from qregret.audit import (IntervalRegretReport, ScheduleTrace, max_interval_regret,
                           theorem1_bound, theorem2_bound)
from qregret.bandit import WeaklyAdaptiveMAB, exploration_probability
from qregret.baselines import Exp3, best_fixed_arm, make_policy
from qregret.ogd import OgdState, recommended_step_size
from qregret.queueing import QueueTrace, queue_length_regret, queue_trajectory
from qregret.simplex import ProbabilityVector, project_to_simplex

__version__ = "0.1.0"

__all__ = [
    "Exp3", "IntervalRegretReport", "OgdState", "ProbabilityVector", "QueueTrace",
    "ScheduleTrace", "WeaklyAdaptiveMAB", "best_fixed_arm", "exploration_probability",
    "make_policy", "max_interval_regret", "project_to_simplex", "queue_length_regret",
    "queue_trajectory", "recommended_step_size", "theorem1_bound", "theorem2_bound",
]
