"""Pegg-Barnett and Susskind-Glogower phase statistics for number-basis states."""

from .errors import (
    ConsistencyError,
    ConvergenceError,
    DimensionTooLargeError,
    DoubleAdjustError,
    ExperimentParseError,
    ExperimentValidationError,
    OverlayMismatchError,
    PBPhaseError,
    TruncationError,
    UnsupportedFigureError,
)
from .experiment_io import ExperimentTable, FigureTable, gbl_adjust, load_experiment
from .figures import emit_figure
from .fluctuations import (
    check_uncertainty,
    commutator_expectation,
    exp_phase_expectation,
    psi_pb,
    trig_fluct_pb,
    trig_fluct_sg,
    variance_phase,
)
from .nfm import (
    NfmInputs,
    c12_squared_sg,
    cos2_vacuum_port,
    cos4_vacuum_port,
    mean_cos_ratio,
    normalization_n,
)
from .phase_core import (
    CoherentSpec,
    NumberBasisState,
    PhaseDistribution,
    build_distribution,
    eval_density,
    finite_s_operator_check,
    mean_relative_phase,
    moment,
)
from .relative_phase import TwoBeamSpec, fluct_pb_doubled, fluct_pbpd, fluct_sgpd
from .series import SeriesValue, TruncationPolicy

__version__ = "0.1.0"
