"""Exact verification of abelian pseudomeasure congruences over Q.

Subpackages follow the computational layers:

* :mod:`pmcheck.arith`      exact scalars (rationals, cyclotomic numbers, intervals)
* :mod:`pmcheck.grouplat`   finite groups, subgroup lattices, Moebius tables, group rings
* :mod:`pmcheck.abfield`    totally real abelian fields given by Gaussian periods
* :mod:`pmcheck.lvalues`    Bernoulli numbers, Dirichlet L-values, partial zeta values
* :mod:`pmcheck.pmeasure`   finite-level pseudomeasure elements and transfer maps
* :mod:`pmcheck.congruence` the congruence checks and their reports
* :mod:`pmcheck.cli`        command line runner
"""

__version__ = "0.1.0"
