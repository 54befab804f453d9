"""Almost contact metric structures, the Kenmotsu condition and builders for
concrete Kenmotsu manifolds"""

from kenmo.contact.structures import (
    AlmostContactStructure,
    EtaEinsteinDecomposition,
    HolomorphicSectionalReport,
    StructureSettings,
    check_almost_contact,
    check_almost_kenmotsu,
    check_kenmotsu,
    check_phi_holomorphic_curvature,
    check_phi_rank,
    eta_einstein_decompose,
    fundamental_form,
    holomorphic_curvature_residual,
    holomorphic_ricci_residual,
    horizontal_vector,
    kenmotsu_consequences,
    kenmotsu_residual,
    nijenhuis_normality,
    nijenhuis_tensor,
    phi_squared,
    structure_from_frame,
)
from kenmo.contact.builders import (
    M5_COORDINATES,
    M5_CURVATURE_TABLE,
    build_warped_kenmotsu,
    builtin_example_m5,
    check_kahler,
    flat_factor,
    m5_frame,
    product_kahler_factor,
    rotation_complex_structure,
)
