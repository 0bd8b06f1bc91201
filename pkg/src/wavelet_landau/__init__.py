"""Wavelet multi-resolution analyses and orthonormal lowest-Landau-level orbitals.

Filter banks map to reduced functions on the line, which map through the Zak
transform to kq functions on the unit cell ``[0, a)**2`` with ``a**2 = 2 pi``.
Sublattice orthonormality of the magnetically translated orbitals is the same
statement as the filter identities of the bank, and the inverse map extracts
the taps back.
"""

from .erf import EnvelopeError, cerf, cerfc, faddeeva
from .filters import (
    BUILTIN_FILTERS,
    CascadeError,
    FilterBank,
    QMFReport,
    SampledFunction,
    lowpass_response,
    make_filter,
    mother_wavelet,
    read_filter,
    scaling_function,
    verify_qmf,
    write_filter,
)
from .haar import (
    haar_asymptotic,
    haar_closed,
    localization_compare,
    wavelet_asymptotic,
    wavelet_closed,
)
from .inverse import ExtractedFilter, extract_coefficient, filter_roundtrip, mra_condition_sum
from .landau import (
    LandauOrbital,
    LatticeSpec,
    OverlapReport,
    filter_kq,
    filter_line_function,
    gram_slater,
    level_one_equivalence,
    magnetic_translate,
    overlap_kq,
    overlap_line,
    sublattice_criterion,
    synthesize,
)
from .quadrature import QuadratureError
from .zak import CELL, KqFunction, LineFunction, check_boundary, inverse_zak, zak_transform

# short aliases
m_o = lowpass_response
build_T = filter_line_function
t_kq = filter_kq
J_criterion = sublattice_criterion
synth = synthesize
overlap_S = overlap_line
overlap_S_kq = overlap_kq
ill_overlap_equivalence = level_one_equivalence
extract_hn = extract_coefficient
verify_mra_condition = mra_condition_sum
roundtrip = filter_roundtrip
T2_closed = haar_closed
T2_asym = haar_asymptotic
H00_closed = wavelet_closed
H00_asym = wavelet_asymptotic

__version__ = "0.1.0"
