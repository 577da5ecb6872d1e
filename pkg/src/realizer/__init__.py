"""Program extraction from classical arithmetic proofs, with learning.

The package has three layers: a simply typed term calculus with state and
exception primitives (terms, monads), natural deduction for arithmetic with
the excluded middle over simply universal formulas (arith, deduction) and
two ways to run proofs — extraction to monadic realizers executed under a
learning loop (extraction, learning) and direct normalization to a witness
(normalizer).  The reals module instantiates the learning loop on exact
real arithmetic; sexpr and cli expose everything on files.
"""

from .arith import FUNCTIONS, RELATIONS, Formula, Relation
from .deduction import Derivation, Sequent, check_derivation
from .extraction import computation_type, decorate, em_realizer, extract, realizer_type
from .learning import State, learn, run_realizer, spot_check_realizes
from .monads import EXCEPTION, IDENTITY, INTERACTIVE, check_laws
from .normalizer import check_open_normal, extract_witness, normalize_derivation
from .reals import convex_angle, least_element, op_at, orientation
from .sexpr import ParseError, ProofFile, parse_file, print_file
from .terms import DEFAULT_FUEL, Term, normalize, typecheck

__version__ = "0.1.0"
