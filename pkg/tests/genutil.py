"""Seeded random generators shared by property and acceptance tests.

Everything here builds *valid* toolkit inputs (tokenizable IPA strings,
policies passing construction checks, well-formed rulesets) from plain
random.Random streams so test counts and runtimes stay fixed.
"""

import random

from phonosim.errors import DataError
from phonosim.g2p import G2PRule, Ruleset
from phonosim.ipa import NormalizationPolicy

BASE_LETTERS = "ptkbdgmnszfvlrjwaeiouɑæɛɔʃʒθχ"
MODIFIER_MARKS = ["ʲ", "ʰ", "ʷ", "ː"]   # ʲ ʰ ʷ ː
COMBINING_MARKS = ["̃", "̥"]                       # nasal tilde, voiceless ring
PREFIX_MARKS = ["ˈ", "ˌ", "."]
VOQS_SAMPLES = ["ʬ", "ʭ"]                          # ʬ ʭ
TIE = "͡"


def random_segment(rng, allow_prefix=True, allow_voqs=False):
    parts = []
    if allow_prefix and rng.random() < 0.2:
        parts.append(rng.choice(PREFIX_MARKS))
    if allow_voqs and rng.random() < 0.1:
        parts.append(rng.choice(VOQS_SAMPLES))
    else:
        parts.append(rng.choice(BASE_LETTERS))
        if rng.random() < 0.15:
            parts.append(TIE)
            parts.append(rng.choice(BASE_LETTERS))
    for _ in range(rng.randrange(3)):
        pool = MODIFIER_MARKS if rng.random() < 0.7 else COMBINING_MARKS
        parts.append(rng.choice(pool))
    return "".join(parts)


def random_ipa_string(rng, max_segments=8, allow_voqs=True):
    n = rng.randrange(max_segments + 1)
    chunks = []
    for _ in range(n):
        chunks.append(random_segment(rng, allow_voqs=allow_voqs))
        if rng.random() < 0.15:
            chunks.append(" ")
    return "".join(chunks)


def random_policy(rng, max_tries=50):
    """A NormalizationPolicy that passes construction validation."""
    for _ in range(max_tries):
        strip = set()
        for mark in MODIFIER_MARKS + COMBINING_MARKS + ["."]:
            if rng.random() < 0.3:
                strip.add(mark)
        merge = {}
        for _ in range(rng.randrange(4)):
            src = random_segment(rng, allow_prefix=False)
            tgt = random_segment(rng, allow_prefix=False)
            merge.setdefault(src, tgt)
        try:
            return NormalizationPolicy(
                strip_stress=rng.random() < 0.8,
                strip_voqs=rng.random() < 0.8,
                strip_diacritics=frozenset(strip),
                merge_pairs=merge,
            )
        except DataError:
            continue
    raise AssertionError("could not build a valid random policy")


GRAPHEME_ALPHABET = "abcdefgh"
OUTPUT_LETTERS = "ptkbdgmnszaeiou"


def random_ruleset(rng, language="toy"):
    """A ruleset whose outputs are distinct single letters, so the applied
    rule is identifiable from the transliteration output."""
    graphemes = set()
    while len(graphemes) < rng.randint(3, 8):
        length = rng.choice((1, 1, 1, 2, 2, 3))
        graphemes.add("".join(rng.choice(GRAPHEME_ALPHABET) for _ in range(length)))
    outputs = rng.sample(OUTPUT_LETTERS, len(graphemes))
    rules = [
        G2PRule(g, out, priority=rng.randrange(3))
        for g, out in zip(sorted(graphemes), outputs)
    ]
    rng.shuffle(rules)
    return Ruleset(language, rules, case_fold=True, punctuation_strip=True)


def random_text_for(rs, rng, max_tokens=6):
    graphemes = [r.grapheme for r in rs.rules]
    return "".join(rng.choice(graphemes) for _ in range(rng.randrange(max_tokens + 1)))
