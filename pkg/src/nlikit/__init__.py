"""Multi-kernel native-language identification toolkit.

Character p-gram string kernels over essays and transcripts, an RBF kernel
over acoustic feature vectors, kernel fusion by summation, and kernel ridge
regression / kernel discriminant analysis classifiers, with a manifest-driven
corpus layer and a declarative experiment runner.
"""

__version__ = "0.1.0"

from .classifiers import (TrainedModel, kda_train, krr_train, load_model,
                          predict, save_model)
from .config import (ExperimentConfig, load_config, parse_kernel_expression,
                     parse_kernel_term, render_kernel_expression,
                     render_kernel_term)
from .corpus import (Corpus, Document, FeatureVector, SampleRef,
                     generate_synthetic_corpus, load_corpus,
                     normalize_whitespace, write_corpus)
from .errors import ConfigError, DataError, NlikitError, NumericError
from .experiment import (ExperimentResult, SweepResult, TuneResult,
                         run_experiment, sweep, tune_sigma)
from .kernelops import (GramMatrix, KernelSpec, ivector_gram, load_gram,
                        psd_check, rbf_transform, save_gram, squared_kernel,
                        sum_kernels)
from .metrics import (EvalReport, McNemarResult, evaluate, export_confusion,
                      mcnemar, read_confusion, render_report, write_report)
from .stringkernel import blended_gram

__all__ = [
    "__version__",
    "ConfigError", "DataError", "NlikitError", "NumericError",
    "Corpus", "Document", "FeatureVector", "SampleRef",
    "load_corpus", "write_corpus", "generate_synthetic_corpus",
    "normalize_whitespace",
    "KernelSpec", "GramMatrix", "blended_gram", "ivector_gram",
    "rbf_transform", "squared_kernel", "sum_kernels", "psd_check",
    "save_gram", "load_gram",
    "TrainedModel", "krr_train", "kda_train", "predict",
    "save_model", "load_model",
    "EvalReport", "McNemarResult", "evaluate", "mcnemar",
    "export_confusion", "read_confusion", "render_report", "write_report",
    "ExperimentConfig", "load_config", "parse_kernel_term",
    "parse_kernel_expression", "render_kernel_term",
    "render_kernel_expression",
    "ExperimentResult", "SweepResult", "TuneResult",
    "run_experiment", "sweep", "tune_sigma",
]
