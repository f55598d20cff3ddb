"""Python interface to the departure surface MDP library."""

from ._core import (
    AirportConfig,
    CalibrationError,
    ConfigError,
    Decision,
    Fairness,
    InvalidState,
    ParseError,
    Policy,
    RampSpec,
    SurfaceState,
    TransitionModel,
    ZeroLikelihood,
    __version__,
    calibrate,
    compare,
    decode,
    encode,
    enumerate_states,
    evaluate_policy,
    evaluate_threshold,
    observation_index,
    pareto_sweep,
    run_experiment,
    simulate,
    solve,
    solve_bernoulli_pair,
    threshold_policy,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
