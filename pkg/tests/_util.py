"""Shorthand for writing patterns in tests: pat("b:Low d:High", "e:Middle")."""

from fumine.model import fsequence, reference_membership

MF = reference_membership()
LOW, MIDDLE, HIGH = 0, 1, 2


def pat(*itemsets):
    return fsequence(*[[tuple(tok.split(":")) for tok in x.split()] for x in itemsets], mf=MF)


# one "PASS/FAIL criterion N: ..." line per acceptance check, echoed in the terminal summary
VERDICTS: list[str] = []
