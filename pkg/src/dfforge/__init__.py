"""Two-integral distribution functions for axisymmetric stellar systems.

Densities are written as potential-radius expansions; each term is inverted
to a DF component ``|L_z|**s h(energy)`` through an Abel integral, and every
DF can be checked by integrating it back over velocity space.
"""

from dfforge.coefficients import Atom, CoefficientFunction, TabulatedCoefficient, derivative, exponential, power
from dfforge.config import QuadratureConfig, configure, get_config
from dfforge.errors import (
    AdmissibilityError,
    ConfigurationError,
    DerivativeAccuracyError,
    DFForgeError,
    DivergenceError,
    DomainError,
    ModelSpecError,
    QuadratureError,
    SynthesisError,
    UndefinedMomentError,
    UnsupportedParameterError,
)
from dfforge.model import (
    BOUNDED,
    UNBOUNDED,
    ConventionKind,
    DensityExpansion,
    DensityTerm,
    Family,
    ModelDefinition,
    PhasePoint,
    PotentialConvention,
    eval_density,
    parse_model_spec,
    relative_energy,
    serialize_model_spec,
)
from dfforge.models import (
    BinneyParams,
    FrickeParams,
    LyndenBellParams,
    ModelBundle,
    binney_bundle,
    fricke_powerlaw_bundle,
    load_bundle,
    lyndenbell_bundle,
    lyndenbell_coefficients,
    lyndenbell_printed_coefficients,
    mean_vphi_law,
)
from dfforge.contour import ContourSet, ContourSpec, contour_data, mirror_mismatch
from dfforge.moments import MomentField, dispersion_closed_form, dispersion_from_df, moment_grid
from dfforge.quadrature import abel_lower, abel_upper
from dfforge.special import H, double_factorial, gamma, hyp2f1
from dfforge.synthesis import (
    ArgumentKind,
    DFComponent,
    EvenDF,
    OddDF,
    Parity,
    SynthesisRequest,
    Variant,
    binney_odd_components,
    binney_odd_df,
    dejonghe_powerlaw_df,
    exp_pair,
    synthesize,
    synthesize_even_bounded,
    synthesize_even_general,
    synthesize_even_q,
    synthesize_even_unbounded,
)
from dfforge.verify import PhysicalDomain, ScanSpec, positivity_scan, recover_density, recover_rotation

__version__ = "0.1.0"
