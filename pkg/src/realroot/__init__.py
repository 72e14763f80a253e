"""Real-rootedness of univariate polynomials via the m-adic forms Phi_m, with certificates."""

from .errors import RealRootError
from .forms import (
    LinearFormList,
    MAdicForm,
    build_form_exact,
    build_form_from_roots,
    evaluate,
    evaluate_via_powers,
    form_from_json,
    form_to_json,
)
from .harness import CorpusSpec, generate_corpus, run_consistency
from .poly import Polynomial, PowerSums, RootSpectrum, numeric_roots, parse_polynomial, power_sums, sturm_real_root_count
from .psd import HermiteMatrix, classify_real_rooted, estimate_min_on_sphere, hermite_matrix, is_psd_exact
from .witness import (
    NegativeWitness,
    PsdCertificate,
    interpolate_witness_poly,
    negative_witness,
    psd_certificate,
    verify_certificate,
)

__version__ = "0.1.0"
