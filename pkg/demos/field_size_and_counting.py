"""
How big must the field be, and how many transforms work?

Prints the wiretap reduction and field thresholds for the reverse butterfly,
then counts admissible per-source and shared transforms for a few fields.

    python demos/field_size_and_counting.py
"""

from __future__ import annotations

from snfc import gf
from snfc.construct import construct_base, construct_target, extension_lift, required_field_size
from snfc.fixtures import reverse_butterfly
from snfc.network import primary_min_cut, wiretap_collection
from snfc.oracle import enumerate_transform_sets

net = reverse_butterfly()

for W in wiretap_collection(net, 1).nonempty():
    P = primary_min_cut(net, W)
    tag = "kept" if P == W else f"covered by {list(P)}"
    print(f"  {list(W)}: {tag}")

thr = required_field_size(net, 1)
print("guaranteed above q =", thr, "(reduced)", required_field_size(net, 1, reduced=False), "(full)")
print("binary alternative:", extension_lift(2, thr, 2, 1))

# small fields often work anyway
for q in (2, 3, 4):
    try:
        construct_target(net, 2, 1, gf.field(q), seed=0)
        print(f"GF({q}): construction succeeded")
    except Exception as exc:
        print(f"GF({q}): {type(exc).__name__}")

print("\n q   per-source      shared   ratio")
for q in (3, 5, 7, 11):
    base = construct_base(net, 2, gf.field(q), seed=0)
    c = enumerate_transform_sets(base, 2, 1, method="bijection")
    print(f"{q:>2} {c.count_Bhat:>12} {c.count_Ahat:>10}   {c.ratio:.4f}")
