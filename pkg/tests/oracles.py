"""Independent brute-force reference implementations for the test suite.

Everything here is deliberately written with plain Python loops and no
package imports, so the main implementations are checked against a
separate code path.
"""

import itertools
import math


def bf_rfd1(matrix):
    n = len(matrix)
    total = sum((matrix[i][j] - 1.0) ** 2 for i in range(n) for j in range(n))
    return math.sqrt(total) / n


def bf_fro(matrix):
    n = len(matrix)
    return math.sqrt(sum(matrix[i][j] ** 2 for i in range(n) for j in range(n)))


def bf_asym_rel(matrix):
    n = len(matrix)
    num = math.sqrt(
        sum((matrix[i][j] - matrix[j][i]) ** 2 for i in range(n) for j in range(n))
    )
    return num / bf_fro(matrix)


def bf_rms(matrix):
    return bf_fro(matrix) / len(matrix)


def bf_avg_row_cosine(matrix):
    n = len(matrix)
    total = 0.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            dot = sum(matrix[i][t] * matrix[j][t] for t in range(n))
            ni = math.sqrt(sum(v * v for v in matrix[i]))
            nj = math.sqrt(sum(v * v for v in matrix[j]))
            total += dot / (ni * nj)
    return total / (n * (n - 1))


def bf_prop_pos(matrix):
    n = len(matrix)
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    return sum(1 for i, j in off if matrix[i][j] > 0) / len(off)


def bf_reciprocity_pos(matrix):
    n = len(matrix)
    positives = [(i, j) for i in range(n) for j in range(n)
                 if i != j and matrix[i][j] > 0]
    if not positives:
        return None
    return sum(1 for i, j in positives if matrix[j][i] > 0) / len(positives)


def bf_reciprocity_all_pairs(matrix):
    n = len(matrix)
    off = [(i, j) for i in range(n) for j in range(n) if i != j]
    both = sum(1 for i, j in off if matrix[i][j] > 0 and matrix[j][i] > 0)
    return both / len(off)


def bf_intra_family_pos(matrix, families):
    n = len(matrix)
    positives = [(i, j) for i in range(n) for j in range(n)
                 if i != j and matrix[i][j] > 0]
    if not positives:
        return None
    same = sum(
        1 for i, j in positives
        if families[i] is not None and families[i] == families[j]
    )
    return same / len(positives)


def bf_macro_f1(truths, preds, labels):
    total = 0.0
    for cls in labels:
        tp = sum(1 for t, p in zip(truths, preds) if t == cls and p == cls)
        fp = sum(1 for t, p in zip(truths, preds) if t != cls and p == cls)
        fn = sum(1 for t, p in zip(truths, preds) if t == cls and p != cls)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        if precision + recall:
            total += 2 * precision * recall / (precision + recall)
    return total / len(labels)


def bf_auc(pos_scores, neg_scores):
    credit = 0.0
    for p in pos_scores:
        for q in neg_scores:
            if p > q:
                credit += 1.0
            elif p == q:
                credit += 0.5
    return credit / (len(pos_scores) * len(neg_scores))


def bf_trial_counts(utterances):
    """(positives, negatives) by exhaustive pair enumeration.

    ``utterances`` is a list of (id, speaker_id, gender) tuples.
    """
    positives = negatives = 0
    for a, b in itertools.combinations(utterances, 2):
        if a[1] == b[1]:
            positives += 1
        elif a[2] == b[2]:
            negatives += 1
    return positives, negatives
