"""branchforge: finite-depth branch-group construction and verification toolkit.

Builds groups acting on spherically homogeneous rooted trees whose levels are
coset spaces of alternating groups, with rooted generators from the level
groups and directed generators steered by a spine of designated letters.
Everything the construction promises is checked mechanically at finite depth:
generation by conjugates of Alt(5), the section calculus, B-length
bookkeeping, bad-pair counting, shrinking-prefix search, the wreath-recursion
identities, and per-element finite-order certificates.
"""

from .errors import (
    BranchforgeError,
    ConfigurationError,
    DomainError,
    PreconditionError,
    ResourceCapError,
    VerificationError,
)
from .perms import (
    DEFAULT_DEGREE_CAP,
    PermGroup,
    Permutation,
    alternating_gens,
    exponent_alternating,
    format_cycles,
    generates_alternating,
    max_order_alternating,
    parse_cycles,
)
from .embeddings import (
    CosetSpace,
    FiniteGroupTable,
    GroupChainSpec,
    LevelData,
    QuotientSpec,
    build_level_data,
    embed_finite_group,
    verify_altalt,
)
from .treeauto import (
    Portrait,
    SpinePair,
    TreeAut,
    TreeCalculus,
    TreeShape,
    action_order,
    equal_up_to_depth,
    is_identity_up_to_depth,
    portrait_json,
    portrait_text,
    truncate,
)
from .words import (
    ALetter,
    BLetter,
    FPWord,
    LenPair,
    SHORT,
    WordContext,
    evaluate,
    inverse_word,
    multiply,
    normal_form,
    parse_word,
    render_word,
    section_word,
    stabilized_section_word,
    word_power,
)
from .shrinking import (
    PairCoverageError,
    ShrinkCertificate,
    ZSet,
    greedy_shrinking_prefix,
    hypothesis_ratio,
    landau,
    landau_bound_check,
    landau_bruteforce,
    verify_certificate,
    z_set,
)
from .scenarios import (
    OrderCertificate,
    Scenario,
    builtin_scenario,
    certify_finite_order,
    load_scenario,
    perfectness_witness,
    verify_order_certificate,
    verify_wreath_identities,
)

__version__ = "0.1.0"
