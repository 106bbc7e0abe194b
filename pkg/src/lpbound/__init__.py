"""Join-size upper bounds from lp-norms of degree sequences.

Core surfaces:
  relalg    - relations, degree sequences, lp-norms, empirical entropy
  query     - full conjunctive queries, statistics, guards, girth
  entropy   - set functions and cone constraint systems
  simplex   - exact rational LP solver with dual multipliers
  bounds    - bound programs, presets, dual certificates, validity checks
  seqnorm   - degree sequence <-> power-sum conversion
  worstcase - normal relations and worst-case database construction
  evaluator - join engines: oracle, generic, lp-partitioned
  cli       - command-line entry points
"""

__version__ = "0.1.0"
