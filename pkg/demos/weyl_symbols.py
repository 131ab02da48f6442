"""Weyl symbols of short operator words, and a commutator check.

Run: python3 demos/weyl_symbols.py
"""
from weyleth.weylcalc import OperatorWord, PhasePolynomial, classical_limit, star_product, weyl_symbol

for text in ["q p", "p q", "q p q p", "q^2 p^2", "p q^3"]:
    sym = weyl_symbol(OperatorWord.parse(text))
    cl, order = classical_limit(sym)
    print(f"{text:>8}  ->  {str(sym):<40}  leading: {cl}")

# [q, p]_star = i hbar, exactly
q, p = PhasePolynomial.q(1, 1), PhasePolynomial.p(1, 1)
comm = star_product(q, p) - star_product(p, q)
print("\nq*p - p*q =", comm)
