"""Programmable NMR voter built on the binary equality matrix."""

from nmrvoter.core import (EqualityMatrix, FrequencyProfile, InputStateDescriptor, ReducedMatrix,
                           ValueClass, VoterInputSet, build_matrix, compute_isd,
                           frequency_profile, reduce_matrix, row_scan_isd)
from nmrvoter.errors import (AllPairsOffError, NoEligibleClassError, NotReducibleError,
                             NotTransitiveError, UndefinedError, VoterError, ZeroActiveError)
from nmrvoter.poly import IntPolynomial
from nmrvoter.selfcheck import (DetectionReport, Violation, full_check, inject_violation,
                                transitivity_scan)
from nmrvoter.spectral import (Eigenpair, Spectrum, block_permutation, char_poly_erroneous,
                               char_poly_proper, det_D, det_F, det_Q, eigenpairs_proper,
                               exact_spectrum, isd_from_spectrum, numeric_eigenvalues,
                               spectral_selfcheck)
from nmrvoter.voter import Voter

__version__ = "0.1.0"

__all__ = [
    "AllPairsOffError", "block_permutation", "build_matrix", "char_poly_erroneous",
    "char_poly_proper", "compute_isd", "det_D", "det_F", "det_Q", "DetectionReport",
    "Eigenpair", "eigenpairs_proper", "EqualityMatrix", "exact_spectrum", "frequency_profile",
    "FrequencyProfile", "full_check", "inject_violation", "InputStateDescriptor",
    "IntPolynomial", "isd_from_spectrum", "NoEligibleClassError", "NotReducibleError",
    "NotTransitiveError", "numeric_eigenvalues", "reduce_matrix", "ReducedMatrix",
    "row_scan_isd", "spectral_selfcheck", "Spectrum", "transitivity_scan", "UndefinedError",
    "ValueClass", "Violation", "Voter", "VoterError", "VoterInputSet", "ZeroActiveError",
]
