"""aritylab: arity of first-order theories of finite structures."""

__version__ = "0.1.0"

from .arity import (
    Analyzer,
    ArityReport,
    SubtypeSignature,
    Verdict,
    almost_arity_check,
    check_arit_hypotheses,
    delta_based_check,
    is_n_ary_relation,
    relation_arity,
    signature_of,
    theory_arity,
)
from .automorph import AutGroup, automorphisms, is_automorphism
from .config import RunConfig
from .errors import (
    AritylabError,
    BudgetExceeded,
    InvariantViolation,
    NotInvariantError,
    StructureError,
    StructureSyntaxError,
)
from .expansions import Expansion, expand_finite_range, expand_general_algebra, expand_singletons
from .orbits import OrbitPartition, orbit_of, orbit_partition, tuple_rank, tuple_unrank
from .relations import Relation, graph_of, relation_of
from .structures import (
    ClassReport,
    FiniteStructure,
    Signature,
    Symbol,
    classify,
    gen_family,
    parse_structure,
    serialize_structure,
)
