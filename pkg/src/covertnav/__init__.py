"""Cover-seeking terrain navigation: simulator, planner, learner, harness."""

__version__ = "0.1.0"
