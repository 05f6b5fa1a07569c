"""Topological index computation for disordered 2D lattice insulators.

Dense finite-volume evaluators for the integer (charge transport) and
parity (time-reversal) indices of tight-binding insulators in the
mobility-gap regime, together with locality diagnostics, localized-basis
extraction, and a reporting CLI.
"""

from .lattice import (
    LatticeGeometry,
    OperatorMatrix,
    bulk_geometry,
    cone_flux_function,
    edge_geometry,
    flux_center,
    flux_phase,
    half_space_projector,
    nc_derivative,
    plateau_window,
)
from .models import (
    BhzParams,
    TimeReversal,
    apply_flux_twist,
    build_bhz,
    build_qwz,
    build_tr,
    check_tri,
    chern_oracle_clean,
    disorder_field,
    truncate_to_edge,
)
from .spectral import (
    SpectralData,
    SwitchFunction,
    apply_switch,
    eig_hermitian,
    fermi_projection,
    make_switch,
    spectral_projection,
)
from .locality import (
    DecayEnvelope,
    decay_profile,
    quasi_projection_defect,
    schatten_norm,
    singular_value_profile,
)
from .indices import (
    GapPolicy,
    IndexReport,
    PolyFN,
    bulk_index,
    check_theta_odd,
    edge_index,
    edge_z2_spectral_flow,
    fn_poly,
    fredholm_certificate,
    homotopy_path_check,
    kernel_parity,
    kitaev_index,
    minimal_fn_degree,
    windowed_winding,
    z_index_trace_cube,
)
from .sule import (
    SuleBasis,
    build_v,
    compactness_probe,
    export_basis,
    load_basis,
    resolvent_probe,
    sule_extract,
    sule_summability,
)

__version__ = "0.1.0"
