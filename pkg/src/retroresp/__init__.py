"""Retrospective human responsibility measures for decisions made with an intelligent alert system."""

from .errors import (
    DegenerateOutcomeError,
    EventLogError,
    InvalidDistributionError,
    QuadratureError,
    ResponsibilityError,
    ScenarioError,
)
from .info_core import JointTable, ProbDist, conditional_entropy, entropy, js_distance, jsd, kld
from .responsibility import (
    ActionSet,
    AnalysisReport,
    analyze_event,
    expected_values,
    reasonability,
    resp_average,
    resp_information,
    softmax_probs,
)
from .sdt_model import PayoffMatrix, Scenario, reference_scenario

__version__ = "0.1.0"

__all__ = [
    "ActionSet", "AnalysisReport", "DegenerateOutcomeError", "EventLogError",
    "InvalidDistributionError", "JointTable", "PayoffMatrix", "ProbDist", "QuadratureError",
    "ResponsibilityError", "Scenario", "ScenarioError", "analyze_event", "conditional_entropy",
    "entropy", "expected_values", "js_distance", "jsd", "kld", "reasonability", "reference_scenario",
    "resp_average", "resp_information", "softmax_probs",
]
