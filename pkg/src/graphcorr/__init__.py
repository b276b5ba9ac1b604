"""Finite directed-graph correspondences in concrete linear algebra.

Fock spaces and creation operators, intertwiner spaces of the dual
correspondence, equivalence bimodules, Morita certificates between graph
correspondences and the linking correspondence built from a certificate.
"""

from .algebra import AlgebraElement, alg_mul, alg_norm
from .correspondence import (
    CorrElement,
    TensorElement,
    bimodule_action,
    corr_inner_product,
    corr_norm,
    expand_elementary_tensor,
    path_basis,
    tensor_inner_product,
)
from .duality import (
    CommutantElement,
    Intertwiner,
    Representation,
    balanced_inner,
    ball_membership,
    center_basis,
    commutant_commutator_check,
    dual_inner,
    dual_left_action,
    dual_pairing,
    dual_right_action,
    induced_space_decomposition,
    intertwiner_basis,
    is_intertwiner,
    parse_mult,
    u_map,
)
from .errors import GraphCorrError, MalformedInputError, MismatchError, VerificationError
from .fock import FockOperator, creation_operator, fock_basis, phi_infinity, poly_operator, tensor_creation
from .graph import (
    DirectedGraph,
    GraphIsoCertificate,
    VertexPermutation,
    count_paths,
    graph_isomorphism,
    permutation_graph,
    validate_graph,
)
from .linking import build_z, linking_report, z_fock_decomposition, z_left_action
from .morita import (
    EquivalenceBimodule,
    MoritaCertificate,
    a_sigma,
    a_sigma_collapse_iso,
    bimodule_tensor,
    build_certificate,
    conjugation_iso,
    dual_morita_iso,
    morita_decide,
    pairing_mA,
    pairing_mB,
)

__version__ = "0.1.0"
