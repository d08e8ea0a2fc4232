"""Flesch-Kincaid grade level and SMOG index with their text statistics.

Both formulas consume word / sentence / syllable aggregates computed by the
heuristics in this module. Syllabification is the classic vowel-group rule
(dictionary-free, deterministic); sentence splitting guards common
abbreviations and decimal points, both rife in biomedical abstracts.
"""

import math
import re
from dataclasses import dataclass

from .errors import ValidationError

# Versioned guard list: a period after one of these never ends a sentence.
ABBREVIATIONS = frozenset(
    {
        "dr", "mr", "mrs", "ms", "prof", "sr", "jr", "st",
        "e.g", "i.e", "vs", "etc", "cf", "al", "fig", "no",
        "approx", "dept", "est", "vol",
    }
)

# Hand-maintained syllable-count exceptions; empty until a miscount that
# matters shows up.
SYLLABLE_EXCEPTIONS: dict[str, int] = {}

_WORD_RE = re.compile(r"[A-Za-z0-9]+(?:['\-][A-Za-z0-9]+)*")
_VOWEL_GROUP_RE = re.compile(r"[aeiouy]+")


@dataclass(frozen=True)
class TextStats:
    sentence_count: int
    word_count: int
    syllable_count: int
    polysyllable_count: int


@dataclass(frozen=True)
class ReadabilityScores:
    fk_grade: float
    smog: float
    smog_valid: bool


def tokenize_words(text: str) -> list[str]:
    """Words = maximal alphanumeric runs with internal apostrophes/hyphens."""
    return _WORD_RE.findall(text)


def split_sentences(text: str) -> list[str]:
    """Split on . ! ? with abbreviation and decimal guards."""
    sentences = []
    start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in ".!?":
            if ch == "." and _is_guarded_period(text, i):
                i += 1
                continue
            # swallow trailing closers like quotes/parens
            end = i + 1
            while end < n and text[end] in "\"')]":
                end += 1
            sentence = text[start:end].strip()
            if sentence:
                sentences.append(sentence)
            start = end
            i = end
        else:
            i += 1
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _is_guarded_period(text: str, i: int) -> bool:
    # decimal like 3.14
    if 0 < i < len(text) - 1 and text[i - 1].isdigit() and text[i + 1].isdigit():
        return True
    # abbreviation: token immediately before the period
    j = i
    while j > 0 and (text[j - 1].isalpha() or text[j - 1] == "."):
        j -= 1
    token = text[j:i].lower().rstrip(".")
    if token in ABBREVIATIONS:
        return True
    # internal period of a dotted abbreviation ("e.g.", "i.e.")
    k = i
    while k < len(text) and (text[k].isalpha() or text[k] == "."):
        k += 1
    return text[j:k].lower().strip(".") in ABBREVIATIONS


def count_syllables(word: str) -> int:
    """Vowel-group heuristic: maximal aeiouy groups, silent trailing e, floor 1.

    Hyphenated compounds count syllables summed across their parts.
    """
    if not any(c.isalpha() for c in word):
        raise ValidationError(f"not a word: {word!r}")
    if "-" in word:
        return sum(
            count_syllables(part) for part in word.split("-") if any(c.isalpha() for c in part)
        )
    w = word.lower().strip("'")
    if w in SYLLABLE_EXCEPTIONS:
        return SYLLABLE_EXCEPTIONS[w]
    groups = _VOWEL_GROUP_RE.findall(w)
    count = len(groups)
    if count > 1 and w.endswith("e"):
        count -= 1
    return max(count, 1)


def text_stats(text: str) -> TextStats:
    sentences = split_sentences(text)
    words = tokenize_words(text)
    syllables = 0
    poly = 0
    for w in words:
        if not any(c.isalpha() for c in w):
            continue  # pure numbers carry no syllables
        s = count_syllables(w)
        syllables += s
        if s >= 3:
            poly += 1
    return TextStats(
        sentence_count=len(sentences),
        word_count=len(words),
        syllable_count=syllables,
        polysyllable_count=poly,
    )


def fk_grade_from_stats(stats: TextStats) -> float:
    if stats.sentence_count == 0 or stats.word_count == 0:
        raise ValidationError("FK grade undefined for empty text")
    return (
        0.39 * stats.word_count / stats.sentence_count
        + 11.8 * stats.syllable_count / stats.word_count
        - 15.59
    )


def fk_grade(text: str) -> float:
    """Flesch-Kincaid grade level; may be negative for very simple text."""
    return fk_grade_from_stats(text_stats(text))


def smog_from_stats(stats: TextStats) -> tuple[float, bool]:
    if stats.sentence_count == 0:
        raise ValidationError("SMOG undefined for empty text")
    score = 1.0430 * math.sqrt(stats.polysyllable_count * 30 / stats.sentence_count) + 3.1291
    return score, stats.sentence_count >= 30


def smog_index(text: str) -> tuple[float, bool]:
    """SMOG grade and a validity flag (False below the 30-sentence norm)."""
    return smog_from_stats(text_stats(text))


def readability_scores(text: str) -> ReadabilityScores:
    stats = text_stats(text)
    smog, valid = smog_from_stats(stats)
    return ReadabilityScores(fk_grade=fk_grade_from_stats(stats), smog=smog, smog_valid=valid)
