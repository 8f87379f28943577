"""Reference constituent values for the PU-PCM foam composite."""
from .fem import Material, MaterialTable
from .rve import equivalent_inclusion_conductivity

K_MATRIX = 0.036  # W/(m K), PU foam
K_INCLUSION = 0.56  # W/(m K), PCM capsule
INTERFACE_CONDUCTANCE = 3.5e7  # W/(m^2 K)
VOLUME_FRACTION = 0.20
SPHERE_RADIUS_UM = 10.0
# reported macro value; exceeds the parallel bound of the two phases above
REPORTED_EFFECTIVE_K = 0.24

MATRIX, INCLUSION = 0, 1


def pu_pcm_materials(k_matrix=K_MATRIX, k_inclusion=K_INCLUSION,
                     interface_conductance=INTERFACE_CONDUCTANCE,
                     radius_um=SPHERE_RADIUS_UM):
    """Two-phase table with the interface conductance folded into the inclusion.

    Pass ``interface_conductance=None`` for a perfect interface.
    """
    k_inc = k_inclusion
    if interface_conductance is not None:
        k_inc = equivalent_inclusion_conductivity(k_inclusion, interface_conductance,
                                                  radius_um * 1e-6)
    return MaterialTable({MATRIX: Material(k_matrix), INCLUSION: Material(k_inc)})
