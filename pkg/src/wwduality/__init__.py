"""Visibility and which-way distinguishability in a two-way interferometer,
for both readout orders of quanton and which-way detector."""

from .errors import IncompleteBasisError, InvalidArgumentError, UndefinedOutcomeError, ZeroProbabilityError
from .hilbert import (
    DensityOperator,
    Ket,
    MeasurementBasis,
    Operator,
    eig_hermitian,
    haar_random_basis,
    haar_unitaries,
    inner,
    partial_trace_quanton,
    trace_norm_half,
)
from .interferometer import (
    PhaseShift,
    QuantonOutcome,
    WwdPair,
    detector_state_quanton_first,
    detector_state_wwd_first,
    final_joint_state,
    quanton_probability,
    symmetric_wwd,
)
from .optimizer import (
    ScanConfig,
    ScanRecord,
    brute_force_reference,
    evaluate_cell,
    optimize_distinguishability,
    run_scan,
)
from .whichway import (
    LikelihoodReport,
    duality_residual,
    englert_basis,
    englert_distinguishability,
    estimate_visibility_from_pattern,
    likelihood,
    outcome_likelihood,
    visibility,
)

__version__ = "0.1.0"
