"""Windowed Bayesian optimization + recurrent prediction for epidemic control."""

from rnnbo._core import (  # noqa: F401
    AdamResult,
    BoResult,
    EpidemicParams,
    GpModel,
    RnnModel,
    adam_descend,
    control_cost,
    eval_benchmark,
    lcb,
    matern52,
    optimize,
    predict_rollout,
    seir_step,
    simulate_seir,
    simulate_sis,
    sis_step,
    train_rnn,
    window_objective_seir,
    window_objective_sis,
)

__all__ = [
    "AdamResult",
    "BoResult",
    "EpidemicParams",
    "GpModel",
    "RnnModel",
    "adam_descend",
    "control_cost",
    "eval_benchmark",
    "lcb",
    "matern52",
    "optimize",
    "predict_rollout",
    "seir_step",
    "simulate_seir",
    "simulate_sis",
    "sis_step",
    "train_rnn",
    "window_objective_seir",
    "window_objective_sis",
]
