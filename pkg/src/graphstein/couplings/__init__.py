from .bounds import (
    BoundTerms,
    ConditionalMoments,
    EnumerationConditioner,
    LocalDependenceConditioner,
    bound_evaluate,
    bound_terms,
    exact_bound_terms,
    inverse_root_norms,
)
from .core import (
    EQUAL_MARGINAL,
    STEIN,
    CapabilityError,
    CouplingModel,
    CouplingSample,
    Enumeration,
    IdentityReport,
    TestFunction,
    check_equal_marginal,
    default_family,
    from_equal_marginal_lambda,
    from_exchangeable_pair,
    from_local_dependence,
    from_size_bias,
    moment_relations,
    verify_identity,
)
from .graph import GraphConditioner, graph_coupling
from .permutation import PermutationConditioner, descent_inversion_matrices, permutation_coupling
from .toys import (
    bernoulli_size_bias,
    coin_sum,
    overlapping_bernoulli_size_bias,
    sign_flip,
    swap_pair,
    zero_coupling,
)

BUILTINS = ("graph", "permutation", "coins", "swap", "flip", "bernoulli", "overlap", "zero")
