"""Phoneme Error Rate: segment-level edit distance with error-type counts.

Edits operate on whole phoneme segments, so replacing t͡ʃ with k is one
substitution, never two character edits. The backtrace resolves ties with
a fixed preference (deletion, then insertion, then the diagonal) so the
S/I/D split is reproducible; the total distance is unaffected by the
choice.
"""

from dataclasses import dataclass

from .errors import DataError


@dataclass(frozen=True)
class PERReport:
    substitutions: int
    insertions: int
    deletions: int
    reference_length: int
    per_percent: float

    @property
    def total_errors(self):
        return self.substitutions + self.insertions + self.deletions


def edit_counts(reference, hypothesis):
    """(S, I, D) from one minimal alignment of the two segment lists."""
    n = len(reference)
    m = len(hypothesis)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row = dist[i]
        prev = dist[i - 1]
        ref_seg = reference[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ref_seg == hypothesis[j - 1] else 1
            row[j] = min(prev[j] + 1, row[j - 1] + 1, prev[j - 1] + cost)

    subs = ins = dels = 0
    i, j = n, m
    while i > 0 or j > 0:
        if i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            dels += 1
            i -= 1
        elif j > 0 and dist[i][j] == dist[i][j - 1] + 1:
            ins += 1
            j -= 1
        else:
            if reference[i - 1] != hypothesis[j - 1]:
                subs += 1
            i -= 1
            j -= 1
    return subs, ins, dels


def per(reference, hypothesis) -> PERReport:
    """PER of one utterance: 100 * (S + I + D) / |reference|."""
    if not reference:
        raise DataError("PER undefined for an empty reference")
    s, i, d = edit_counts(reference, hypothesis)
    return PERReport(s, i, d, len(reference), 100.0 * (s + i + d) / len(reference))


def corpus_per(pairs, macro=False) -> PERReport:
    """Aggregate PER over (reference, hypothesis) pairs.

    Default is the micro average: error counts and reference lengths are
    pooled before dividing. macro=True averages per-utterance percentages
    instead (counts are still reported pooled).
    """
    pairs = list(pairs)
    if not pairs:
        raise DataError("corpus PER needs at least one utterance pair")
    subs = ins = dels = ref_len = 0
    percents = []
    for idx, (reference, hypothesis) in enumerate(pairs, 1):
        if not reference:
            raise DataError(f"empty reference in utterance pair {idx}")
        report = per(reference, hypothesis)
        subs += report.substitutions
        ins += report.insertions
        dels += report.deletions
        ref_len += report.reference_length
        percents.append(report.per_percent)
    if macro:
        percent = sum(percents) / len(percents)
    else:
        percent = 100.0 * (subs + ins + dels) / ref_len
    return PERReport(subs, ins, dels, ref_len, percent)
