"""Khovanov-type complexes for annular 1-tangles over GF(2)."""
