"""Semiholomorphic polynomials with weakly isolated singularities realizing braid closures."""
