"""Verification library for three hypergeometric local systems.

Exact trace-function evaluation over small finite fields, Kubert
V-function finite-monodromy criteria, exhaustive base-p digit-sum lemma
checks, and combinatorial classification of the parameter sets, with a
batch CLI for the full reproduction suite.
"""

from .cyclotomic import CycNumber, cyclotomic_polynomial, galois_act
from .errors import (
    CapExceededError,
    DegreeOutOfRangeError,
    NotASubfieldError,
    UnsupportedCharacteristicError,
)
from .finite_field import (
    FieldTable,
    build_field,
    load_cache,
    save_cache,
    subfield_embedding,
    subfield_norm_map,
)
from .characters import (
    AddChar,
    MultChar,
    chars_of_exact_order,
    chars_of_order_dividing,
    eval_add,
    eval_mult,
    gauss_sum,
    hasse_davenport_lift_check,
)
from .kubert import (
    QmodZ,
    bracket,
    check_criterion_Atimes,
    check_criterion_AxB,
    digit_sum,
    kubert_v,
    repunit_scaling_check,
    sequence_AB,
    verify_bracket_corollaries,
    verify_lemma_28,
    verify_lemma_3x13,
    verify_lemma_4x5,
    verify_sharp_inequality,
)
from .exp_sums import (
    EXTENSION_AT_ZERO,
    FAMILIES,
    TraceTable,
    kloosterman,
    kloosterman_power_sum,
    moments,
    pullback_table,
    pullback_trace,
    trace_axb,
    trace_quartic,
    trace_table_all,
)
from .hyp_params import (
    HypSpec,
    InertiaModel,
    belyi_induction_match,
    build_Atimes,
    build_AxB,
    det_product_check,
    inertia_model,
    kummer_induction_candidates,
    primitivity_verdict,
    selfdual_test,
)

__version__ = "0.1.0"
