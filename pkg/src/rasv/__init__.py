"""Symbolic safety verifier for relational artifact systems.

Working memory (artifact variables plus array-like artifact relations)
evolves over a read-only relational database; safety is checked for every
database instance at once by backward reachability with quantifier
elimination over the basic sorts.
"""

__version__ = "0.1.0"
