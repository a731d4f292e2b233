"""lreckit: counting-logic model checking, a resource-bounded recursion
operator, its compilation to logarithmic-depth counting formulas, and the
supporting graph machinery (DAG statistics, balanced decomposition,
Weisfeiler-Leman refinement, interval graphs)."""

__version__ = "0.1.0"
