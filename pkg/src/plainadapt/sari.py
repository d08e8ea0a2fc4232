"""SARI simplification metric over (source, candidate, references).

Per n-gram order n = 1..4 three operation scores are computed:

  add   -- F1 over the *set* of candidate n-grams absent from the source,
           against reference n-grams absent from the source;
  keep  -- F1 over n-grams present in both candidate and source, with
           fractional reference counts (averaged over references);
  del   -- precision of source n-grams dropped by the candidate against
           source n-grams dropped by the references (fractional).

Convention: a component whose candidate-side and reference-side sets are
both empty scores 1.0 (perfect agreement on "nothing to do"); a component
with exactly one empty side scores 0.0. Scores live on [0,1]; report
layers rescale to 0-100 for display.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError

NGRAM_ORDERS = (1, 2, 3, 4)


@dataclass(frozen=True)
class SariScore:
    overall: float
    # n -> (f_add, f_keep, p_del)
    per_n: dict[int, tuple[float, float, float]]


def ngrams(tokens: Sequence[str], n: int) -> list[tuple[str, ...]]:
    return [tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1)]


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _add_score(src: Counter, cand: Counter, refs: list[Counter]) -> float:
    cand_add = set(cand) - set(src)
    ref_add = set().union(*(set(r) for r in refs)) - set(src)
    if not cand_add and not ref_add:
        return 1.0
    tp = len(cand_add & ref_add)
    p = tp / len(cand_add) if cand_add else 0.0
    r = tp / len(ref_add) if ref_add else 0.0
    return _f1(p, r)


def _keep_score(src: Counter, cand: Counter, refs: list[Counter]) -> float:
    m = len(refs)
    keep_cand = {g: min(cand[g], src[g]) for g in cand.keys() & src.keys()}
    keep_ref = {}
    for g in src:
        avg = sum(r[g] for r in refs) / m
        kept = min(src[g], avg)
        if kept > 0:
            keep_ref[g] = kept
    total_cand = sum(keep_cand.values())
    total_ref = sum(keep_ref.values())
    if total_cand == 0 and total_ref == 0:
        return 1.0
    tp = sum(min(keep_cand.get(g, 0), keep_ref.get(g, 0.0)) for g in keep_cand)
    p = tp / total_cand if total_cand else 0.0
    r = tp / total_ref if total_ref else 0.0
    return _f1(p, r)


def _del_score(src: Counter, cand: Counter, refs: list[Counter]) -> float:
    m = len(refs)
    del_cand = {g: src[g] - cand[g] for g in src if src[g] > cand[g]}
    del_ref = {}
    for g in src:
        avg = sum(r[g] for r in refs) / m
        dropped = src[g] - avg
        if dropped > 0:
            del_ref[g] = dropped
    total_cand = sum(del_cand.values())
    if total_cand == 0:
        return 1.0 if not del_ref else 0.0
    tp = sum(min(c, del_ref.get(g, 0.0)) for g, c in del_cand.items())
    return tp / total_cand


def sari(
    source: Sequence[str],
    candidate: Sequence[str],
    references: Sequence[Sequence[str]],
    normalize: bool = False,
) -> SariScore:
    """Score a candidate simplification; tokens are compared verbatim unless
    normalize=True lowercases everything first."""
    if not references:
        raise ValidationError("SARI needs at least one reference")
    if normalize:
        source = [t.lower() for t in source]
        candidate = [t.lower() for t in candidate]
        references = [[t.lower() for t in ref] for ref in references]
    per_n = {}
    for n in NGRAM_ORDERS:
        src = Counter(ngrams(source, n))
        cand = Counter(ngrams(candidate, n))
        refs = [Counter(ngrams(ref, n)) for ref in references]
        per_n[n] = (
            _add_score(src, cand, refs),
            _keep_score(src, cand, refs),
            _del_score(src, cand, refs),
        )
    overall = sum((a + k + d) / 3 for a, k, d in per_n.values()) / len(NGRAM_ORDERS)
    return SariScore(overall=overall, per_n=per_n)
