"""Cold-start recommender lab.

A data-free trainer (:class:`ZeroMat`) that fits factor vectors from matrix
dimensions and the rating ceiling alone, compared against a classic PMF
baseline and random guesses on MovieLens-format, CSV, or synthetic
Zipf-distributed data, with an evaluation harness reporting MAE, the
Matthew-effect degree (Gini of per-item rating mass), and Zipf slope fits.
"""

from .baselines import (
    PMF,
    PmfConfig,
    PmfRun,
    RandomBaseline,
    pmf_loss,
    pmf_loss_grad,
    predict_pmf,
    random_predictor,
    train_pmf,
)
from .datasets import (
    RatingsDataset,
    RatingTriple,
    SplitSpec,
    ZipfSpec,
    generate_zipf_dataset,
    item_weights,
    load_ratings,
    parse_movielens,
    parse_ratings_csv,
    perturb_distribution,
    save_ratings_csv,
    train_test_split,
)
from .exceptions import (
    DegenerateModelError,
    DegeneratePairError,
    DivergenceError,
    ParseError,
)
from .experiments import (
    ExperimentConfig,
    LockstateCurve,
    compare_on_split,
    derive_seeds,
    emit_report,
    render_curve,
    render_report,
    run_comparison,
    run_lockstate_experiment,
)
from .factors import (
    FactorModel,
    LoadedFactors,
    global_max_dot,
    load_factors,
    predict_rating,
    save_factors,
)
from .metrics import EvalReport, fit_zipf_exponent, mae, matthew_degree
from .training import (
    TrainConfig,
    ZeroMat,
    ZeroMatRun,
    default_iterations,
    init_factors,
    log_likelihood,
    log_likelihood_grad,
    sgd_step,
    train_zeromat,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateModelError",
    "DegeneratePairError",
    "DivergenceError",
    "EvalReport",
    "ExperimentConfig",
    "FactorModel",
    "LoadedFactors",
    "LockstateCurve",
    "PMF",
    "ParseError",
    "PmfConfig",
    "PmfRun",
    "RandomBaseline",
    "RatingTriple",
    "RatingsDataset",
    "SplitSpec",
    "TrainConfig",
    "ZeroMat",
    "ZeroMatRun",
    "ZipfSpec",
    "compare_on_split",
    "default_iterations",
    "derive_seeds",
    "emit_report",
    "fit_zipf_exponent",
    "generate_zipf_dataset",
    "global_max_dot",
    "init_factors",
    "item_weights",
    "load_factors",
    "load_ratings",
    "log_likelihood",
    "log_likelihood_grad",
    "mae",
    "matthew_degree",
    "parse_movielens",
    "parse_ratings_csv",
    "perturb_distribution",
    "pmf_loss",
    "pmf_loss_grad",
    "predict_pmf",
    "predict_rating",
    "random_predictor",
    "render_curve",
    "render_report",
    "run_comparison",
    "run_lockstate_experiment",
    "save_factors",
    "save_ratings_csv",
    "sgd_step",
    "train_pmf",
    "train_test_split",
    "train_zeromat",
]
