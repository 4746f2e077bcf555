"""Entanglement of n-copy antisymmetric qutrit states.

Construction of the states from amplitude tensors, spectra of their reduced
states, numerical checks of the purity and entropy bounds, and upper bounds on
the entanglement of formation from optimized decomposition ensembles.
"""

from ._validation import ValidationError
from .antisym import (
    AmplitudeTensor,
    coefficient_matrix,
    decode_multi_index,
    encode_multi_index,
    levi_civita,
    product_amplitude,
    random_amplitude_tensor,
    read_state,
    state_vector,
    write_state,
)
from .bounds import (
    BoundReport,
    antisym_entropy_check,
    entropy_purity_bound,
    furuta_rhs,
    furuta_rhs_natural,
    i2_defect,
    purity_bound_check,
    shimono_lower_bound,
)
from .eof import (
    DecompositionEnsemble,
    MixedState,
    OptimizerConfig,
    decomposition_from_isometry,
    ec_estimate,
    ensemble_average_entropy,
    eof_sandwich,
    eof_upper_bound,
    product_ensemble,
    random_antisymmetric_mixed,
    tensor_mixed,
)
from .estimators import EntanglementOfFormation, SpectrumFeatures
from .spectra import (
    SpectrumSummary,
    eigenvalues,
    elementary_symmetric,
    entropy_of_entanglement,
    generalized_concurrence,
    power_sum,
    reduced_density,
    s2_minor_oracle,
    von_neumann_entropy,
)

__version__ = "0.1.0"
