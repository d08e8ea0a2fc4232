"""Independent brute-force SARI oracle used by the tests.

Materializes every n-gram multiset as an explicit mapping and computes each
operation score directly from the declared definitions, with exact Fraction
arithmetic. Written against the metric definition, not against the library
implementation; the only shared convention is the documented one (both-empty
component sets score 1, a single empty side scores 0).
"""

from fractions import Fraction


def gram_list(tokens, n):
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def to_counts(gram_seq):
    counts = {}
    for g in gram_seq:
        counts[g] = counts.get(g, 0) + 1
    return counts


def _harmonic(p, r):
    if p + r == 0:
        return 0
    return 2 * p * r / (p + r)


def oracle_components(source, candidate, references, n, div=Fraction):
    """div(a, b) supplies the division used throughout; Fraction for exact
    arithmetic, a float lambda for the large exhaustive sweeps."""
    src = to_counts(gram_list(source, n))
    cand = to_counts(gram_list(candidate, n))
    refs = [to_counts(gram_list(ref, n)) for ref in references]
    m = len(refs)

    # addition: set-based, F1 of candidate additions vs reference additions
    cand_added = [g for g in cand if g not in src]
    ref_added_set = set()
    for ref in refs:
        for g in ref:
            if g not in src:
                ref_added_set.add(g)
    true_added = [g for g in cand_added if g in ref_added_set]
    if not cand_added and not ref_added_set:
        f_add = 1
    else:
        p = div(len(true_added), len(cand_added)) if cand_added else 0
        r = div(len(true_added), len(ref_added_set)) if ref_added_set else 0
        f_add = _harmonic(p, r)

    # keep: fractional reference counts averaged over references
    kept_cand = {}
    for g in cand:
        if g in src:
            kept_cand[g] = min(cand[g], src[g])
    kept_ref = {}
    for g in src:
        avg = div(sum(ref.get(g, 0) for ref in refs), m)
        if min(src[g], avg) > 0:
            kept_ref[g] = min(src[g], avg)
    cand_total = sum(kept_cand.values())
    ref_total = sum(kept_ref.values())
    true_kept = sum(
        min(kept_cand[g], kept_ref.get(g, 0)) for g in kept_cand
    )
    if cand_total == 0 and ref_total == 0:
        f_keep = 1
    else:
        p = div(true_kept, cand_total) if cand_total else 0
        r = true_kept / ref_total if ref_total else 0
        f_keep = _harmonic(p, r)

    # deletion: precision only
    deleted_cand = {}
    for g in src:
        if src[g] > cand.get(g, 0):
            deleted_cand[g] = src[g] - cand.get(g, 0)
    deleted_ref = {}
    for g in src:
        avg = div(sum(ref.get(g, 0) for ref in refs), m)
        if src[g] > avg:
            deleted_ref[g] = src[g] - avg
    cand_total = sum(deleted_cand.values())
    if cand_total == 0:
        p_del = 1 if not deleted_ref else 0
    else:
        true_deleted = sum(
            min(deleted_cand[g], deleted_ref.get(g, 0))
            for g in deleted_cand
        )
        p_del = true_deleted / cand_total

    return f_add, f_keep, p_del


def oracle_sari(source, candidate, references):
    per_n = {}
    total = 0
    for n in (1, 2, 3, 4):
        f_add, f_keep, p_del = oracle_components(source, candidate, references, n)
        per_n[n] = (f_add, f_keep, p_del)
        total += (f_add + f_keep + p_del) / 3
    return total / 4, per_n
