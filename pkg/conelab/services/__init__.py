"""
Suite runners, experiments and report writers behind the CLI.
"""

from conelab.services.experiments import explore_open_question, run_lift, run_minimality
from conelab.services.suites import run_geometry, run_identities

__all__ = [
    "run_identities",
    "run_geometry",
    "run_minimality",
    "run_lift",
    "explore_open_question",
]
