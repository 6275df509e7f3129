"""Finite-field toolkit for private retrieval of linear combinations.

A client demands L mixed combinations of D out of K stored messages and
must hide every individual message index: the server's posterior that any
given index is demanded stays exactly D/K.  The package provides the exact
prime-field linear algebra, the query builder and recovery routines, the
privacy and feasibility audits, capacity bounds, a binary store format, and
a TCP query/answer protocol.
"""

from .errors import (
    AlignmentSingular,
    BadGrsParameters,
    BadMagic,
    BadShape,
    CompletionFailed,
    DegenerateCauchy,
    EntryOutOfRange,
    FieldTooSmall,
    FrameTooLarge,
    InconsistentSystem,
    InversionOfZero,
    IpltError,
    MalformedPayload,
    NotMds,
    NotPrime,
    RankError,
    RecoveryInconsistent,
    RemoteError,
    ShapeError,
    TooLarge,
    TruncatedFile,
    VersionUnsupported,
)
from .field import PrimeField, is_prime
from .matrix import (
    FqMatrix,
    cauchy,
    generator_from_parity,
    grs_generator,
    hstack,
    is_mds,
    mds_complete,
    puncture,
    random_grs,
    rank,
    rref,
    right_null_space,
    solve,
    vstack,
)
from .protocol import (
    ALIGN_S,
    PARITY_EMBED,
    Answer,
    ClientSecret,
    Demand,
    ProtocolParams,
    Query,
    achieved_rate,
    alignment_coefficients,
    answer,
    build_query,
    composed_generator,
    demand_positions,
    derive_params,
    recover,
    select_block,
    shuffle_demand,
    solve_alignment,
)
from .bounds import (
    RateBounds,
    SweepRow,
    SweepSkip,
    capacity_exact,
    capacity_lower,
    capacity_upper,
    decimal6,
    ilp_bruteforce,
    jplt_rate,
    rate_bounds,
    render_csv,
    sweep,
)
from .audit import (
    FeasibilityReport,
    PrivacyReport,
    SupportCandidate,
    alignment_feasibility_sweep,
    audit_individual_privacy,
    candidate_supports,
    kl_feasible,
    posterior,
    shortening_feasibility_sweep,
)
from .store import MessageStore, store_load, store_save
from .wire import (
    AnswerServer,
    decode_answer,
    decode_query,
    encode_answer,
    encode_query,
    fetch,
    parse_endpoint,
    recv_frame,
    send_frame,
    serve,
    to_debug_json,
)
from .fixtures import ExampleFixture, example_fixture

__version__ = "0.1.0"

__all__ = [
    "ALIGN_S",
    "AlignmentSingular",
    "Answer",
    "AnswerServer",
    "BadGrsParameters",
    "BadMagic",
    "BadShape",
    "ClientSecret",
    "CompletionFailed",
    "DegenerateCauchy",
    "Demand",
    "EntryOutOfRange",
    "ExampleFixture",
    "FeasibilityReport",
    "FieldTooSmall",
    "FqMatrix",
    "FrameTooLarge",
    "InconsistentSystem",
    "InversionOfZero",
    "IpltError",
    "MalformedPayload",
    "MessageStore",
    "NotMds",
    "NotPrime",
    "PARITY_EMBED",
    "PrimeField",
    "PrivacyReport",
    "ProtocolParams",
    "Query",
    "RankError",
    "RateBounds",
    "RecoveryInconsistent",
    "RemoteError",
    "ShapeError",
    "SupportCandidate",
    "SweepRow",
    "SweepSkip",
    "TooLarge",
    "TruncatedFile",
    "VersionUnsupported",
    "achieved_rate",
    "alignment_coefficients",
    "alignment_feasibility_sweep",
    "answer",
    "audit_individual_privacy",
    "build_query",
    "candidate_supports",
    "capacity_exact",
    "capacity_lower",
    "capacity_upper",
    "cauchy",
    "composed_generator",
    "decimal6",
    "decode_answer",
    "decode_query",
    "demand_positions",
    "derive_params",
    "encode_answer",
    "encode_query",
    "example_fixture",
    "fetch",
    "generator_from_parity",
    "grs_generator",
    "hstack",
    "ilp_bruteforce",
    "is_mds",
    "is_prime",
    "jplt_rate",
    "kl_feasible",
    "mds_complete",
    "parse_endpoint",
    "posterior",
    "puncture",
    "random_grs",
    "rank",
    "rate_bounds",
    "recover",
    "recv_frame",
    "render_csv",
    "rref",
    "right_null_space",
    "select_block",
    "send_frame",
    "serve",
    "shortening_feasibility_sweep",
    "shuffle_demand",
    "solve",
    "solve_alignment",
    "store_load",
    "store_save",
    "sweep",
    "to_debug_json",
    "vstack",
]
