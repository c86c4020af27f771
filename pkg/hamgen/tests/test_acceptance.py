"""Acceptance checks for the generator's reference outputs.

The H3 term-count check fails by design: the reference table lists 96 terms
for H3, but its own pool-derived gradient counts (which this project
reproduces exactly for the qubit, qubit-excitation, and CEO pools) are only
consistent with the 62 physically nonzero terms of the symmetric chain.  The
table row is internally inconsistent; the deviation is reported rather than
hidden.  See the project decisions ledger for the full fingerprint analysis.
"""

import pytest

from hamgen import PRESETS, generate, verify


@pytest.fixture(scope="module")
def docs():
    return {name: generate(PRESETS[name]).document
            for name in ("h2", "h3", "h4", "lih_reduced")}


def _print(name, passed, detail=""):
    print(f"[{'PASS' if passed else 'FAIL'}] {name}" + (f" — {detail}" if detail else ""))


def test_h2_terms_and_self_consistency(docs):
    doc = docs["h2"]
    report = verify(doc)
    ok = len(doc["terms"]) == 15 and report.ok
    _print("H2: 15 terms, hf/fci self-consistent to 1e-8", ok,
           f"{len(doc['terms'])} terms")
    assert ok, str(report)


def test_h4_term_count(docs):
    ok = len(docs["h4"]["terms"]) == 185
    _print("H4: 185 terms", ok, f"{len(docs['h4']['terms'])} terms")
    assert ok


def test_h3_term_count_reference_table(docs):
    """Reference table says 96; the table is inconsistent with its own pool
    counts, which pin the 62-term symmetric-chain Hamiltonian (ledger)."""
    n = len(docs["h3"]["terms"])
    ok = n == 96
    _print("H3: 96 terms per the reference table", ok,
           f"{n} terms generated; table row internally inconsistent, see ledger")
    assert ok, (
        f"generated {n} terms; the reference table's 96 cannot be reproduced by "
        "any clean construction whose pool counts match the same table"
    )


def test_lih_reduced_nine_cliques(docs):
    doc = docs["lih_reduced"]
    items = sorted(
        ((e["pauli"], complex(e["re"], e["im"])) for e in doc["terms"]
         if set(e["pauli"]) != {"I"}),
        key=lambda tc: (-abs(tc[1]), tc[0]),
    )
    cliques = []
    for term, _ in items:
        for clique in cliques:
            if all(a == b or a == "I" or b == "I"
                   for member in clique for a, b in zip(term, member)):
                clique.append(term)
                break
        else:
            cliques.append([term])
    ok = len(cliques) == 9 and verify(doc).ok
    _print("LiH-reduced: 9 QWC cliques and self-consistent", ok,
           f"{len(cliques)} cliques")
    assert ok
