"""Spectral-gap certificates for edge-decorated hexagonal AKLT models."""

__version__ = "0.1.0"

from .spin import (  # noqa: E402
    SparseHermitianOperator,
    SpinOperators,
    embed_two_site,
    spin_matrices,
    total_spin_projector,
)
from .lattice import (  # noqa: E402
    DecoratedGraph,
    Vertex,
    build_decorated_torus,
    build_g_graph,
    build_y_graph,
    hamiltonian,
    local_hamiltonian,
)
from .mps import (  # noqa: E402
    SiteTensor,
    TransferOperator,
    a_of_n,
    aklt_boundary_tensors,
    aklt_site_tensor,
    bound_suite,
    compose_and_power,
    epsilon_bound,
    fixed_point,
    gamma_state,
    norm_sandwich_check,
    q_matrices,
    transfer_operator,
    transpose,
)
from .ed import (  # noqa: E402
    epsilon_exact,
    fnw_check,
    gap_above_kernel,
    kernel_basis,
    lowest_eigenvalues,
    y_graph_gap,
)
from .certificate import GapCertificate, certify, render_report  # noqa: E402
