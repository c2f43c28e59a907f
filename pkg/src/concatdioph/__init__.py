"""Lucas numbers written as base-b concatenations of a Lucas or Fibonacci
number with a Fibonacci or Lucas number.

Exact search for small indices, certified interval arithmetic, continued
fractions, explicit linear-form bounds and the reductions that close the gap.
"""

from .errors import (
    AmbiguityError,
    EscalationError,
    ExpansionTooShort,
    HypothesisViolation,
    InvalidBaseError,
    ResourceError,
)
from .seqcore import digit_len, fib, lucas, lucas_index_of
from .search import SolutionTuple, search_solutions, verify_tables, verify_tuple

__version__ = "0.1.0"
