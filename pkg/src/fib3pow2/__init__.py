"""All solutions of |F(n) + F(m) + F(l) - 2**a| < 2**(a/2), with a machine-checked
bound argument.

The search lives in :mod:`fib3pow2.search`; the bound argument (Matveev
bounds, two reductions, degenerate pairs) in :mod:`fib3pow2.linforms` and
:mod:`fib3pow2.reduction`; :mod:`fib3pow2.checker` re-validates a
certificate without using the rest of the package.
"""

__version__ = "0.1.0"
