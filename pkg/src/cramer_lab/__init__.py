"""Core package for cramer-lab, a laboratory for the Cramer-Granville random
model of the primes.

This package contains modular components for:
- Prime sieving, factorisation and Mertens-type products
- Integer polynomials and root counts modulo primes
- Truncated singular series (C_f, C_2, Goldbach local factors)
- Seeded sampling of the random set
- Observed-versus-predicted experiments with concentration certificates
- Run history storage, sweeps and the command-line front end
"""

__version__ = "0.1.0"
