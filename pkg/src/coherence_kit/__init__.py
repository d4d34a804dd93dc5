"""Incoherent-operation classes, coherence monotones, and transformation deciders."""

from .channels import (
    ChoiMatrix,
    GCovariantParams,
    KrausChannel,
    NoIncoherentRepresentationError,
    apply,
    channel_from_choi,
    choi,
    choi_distance,
    compose,
    dual_map,
    fit_g_covariant,
    g_covariant_channel,
    incoherent_unitary_channel,
    is_covariant_under_dephasing,
    is_dio,
    is_io_rep,
    is_mio,
    is_pio_rep,
    is_sio_rep,
    is_sio_special_rep,
    qubit_mio_to_io,
    qubit_to_qutrit_mio_example,
    random_channel,
    random_incoherent_unitary,
    random_io_channel,
    random_pio_channel,
    random_sio_channel,
    random_sio_special_channel,
    sample_mio_qubit_channel,
)
from .covariance import (
    NCovariantSpec,
    NQMatrix,
    channel_from_n_spec,
    commutes_with_diagonal_unitaries,
    is_n_covariant,
    is_phi_t_cp,
    n_construct,
    n_covariant_spec,
    n_feasible,
    n_q_matrix,
    phi_t,
    phi_t_threshold,
    random_n_covariant_channel,
)
from .harness import run_suite
from .monotones import (
    MonotoneReport,
    c_alpha,
    c_delta_alpha,
    c_delta_r,
    c_l1,
    c_q_alpha_pure,
    c_r,
    c_rel,
    dilution_ratio,
    distillation_rate_pure,
    log_robustness_dephasing,
    monotone_from_divergence,
    renyi,
    trace_norm_coherence,
)
from .numerics import (
    BirkhoffDecomposition,
    EigenDecomposition,
    InfeasibleError,
    LinearProgram,
    UnboundedError,
    birkhoff_decompose,
    eig_hermitian,
    is_psd,
    mat_power_psd,
    solve_lp,
    trace_norm,
)
from .states import (
    DensityMatrix,
    PureStateVector,
    QubitStandardForm,
    SchmidtVector,
    dephase,
    is_incoherent,
    mc_embed,
    partial_dephase,
    qubit_standard_form,
    random_density,
    random_pure,
    schmidt_vector,
    state_from_json_dict,
)
from .transforms import (
    MajorizationCheck,
    TransformDecision,
    majorizes,
    max_conversion_probability,
    mio_qubit_pure_construct,
    mio_qubit_pure_decide,
    multi_outcome_decide,
    pio_pure_decide,
    qubit_construct,
    qubit_decide,
    sio_pure_construct,
    sio_pure_decide,
)

__version__ = "0.1.0"
