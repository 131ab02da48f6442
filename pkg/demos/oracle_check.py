"""Check the Wigner-function identity for matrix elements on harmonic-oscillator states.

For each word O and pair (i, j) the matrix element <i|O|j> is compared with the
phase-space integral of the Wigner cross function against the Weyl symbol.

Run: python3 demos/oracle_check.py
"""
from weyleth.oracle1d import verify_batch

checks = verify_batch(("q", "p", "q^2", "q p"), n_max=4, hbars=(1.0,), n=256)
print(f"{'word':>5} {'i':>2} {'j':>2} {'direct':>12} {'phase space':>12} {'rel err':>9}")
for c in checks:
    if abs(c.lhs) > 1e-9:
        print(f"{c.word:>5} {c.i:>2} {c.j:>2} {c.lhs:12.6f} {c.rhs:12.6f} {c.rel_error:9.1e}")
print(f"\n{len(checks)} pairs, worst relative error {max(c.rel_error for c in checks):.1e}")
