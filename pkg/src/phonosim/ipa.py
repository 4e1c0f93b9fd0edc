"""IPA segmentation and post-G2P normalization.

A segment is one base IPA letter together with every mark attached to it,
or a tie-bar group such as t͡ʃ treated as a single unit. Combining marks
and modifier letters (ʲ, ʰ, ː, ...) attach to the preceding base; stress
marks and syllable breaks attach to the *following* base, so that a
normalization policy can strip them later without losing their position.

Normalization removes stress marks, voice quality symbols and a
configurable set of diacritics, then maps whole segments through a merge
table (e.g. sʲ → ʃ). All strings are kept in Unicode canonical
composition (NFC) so equal sounds compare equal.
"""

import unicodedata
from dataclasses import dataclass, field

from .errors import DataError, ParseError, TokenizeError

Phoneme = str
PhonemeSequence = list[str]

TIE_BARS = frozenset({"͡", "͜"})          # ͡  ͜
STRESS_MARKS = frozenset({"ˈ", "ˌ"})      # ˈ  ˌ
SYLLABLE_BREAK = "."
PREFIX_MARKS = STRESS_MARKS | {SYLLABLE_BREAK}
WORD_SEPARATORS = frozenset({"‿"})             # undertie; whitespace too

# Voice quality symbols handled by strip_voqs. Standalone VoQS letters
# (extIPA percussives and fricative digraphs) are dropped as whole
# segments; phonation diacritics (breathy ̤, creaky ̰) are removed in
# place. Modifiers not listed here are never silently dropped.
VOQS_LETTERS = frozenset({"ʩ", "ʪ", "ʫ", "ʬ", "ʭ"})
VOQS_MARKS = frozenset({"̤", "̰"})

DEFAULT_STRIP_DIACRITICS = frozenset({SYLLABLE_BREAK})
# The two pairs not significantly distinguished phonologically; canonical
# form is the postalveolar. Length marks are deliberately NOT stripped by
# default (length is phonemic in several Turkic languages).
DEFAULT_MERGE_PAIRS = {"sʲ": "ʃ", "zʲ": "ʒ"}  # sʲ→ʃ, zʲ→ʒ


def _is_combining(ch):
    return unicodedata.category(ch).startswith("M")


def _is_modifier(ch):
    return unicodedata.category(ch) in ("Lm", "Sk")


def _is_base(ch):
    return not (_is_combining(ch) or _is_modifier(ch) or ch in PREFIX_MARKS)


def tokenize_ipa(s: str) -> PhonemeSequence:
    """Split an IPA string into phoneme segments.

    Whitespace and underties separate segments and are dropped; the
    concatenated segments reproduce everything else. Raises TokenizeError
    when a mark has nothing to attach to (leading combining mark, dangling
    tie bar, trailing stress mark).
    """
    text = unicodedata.normalize("NFC", s)
    segments: PhonemeSequence = []
    current: list[str] = []
    has_base = False
    pending_tie = False

    def flush(offset):
        nonlocal current, has_base
        if not current:
            return
        if not has_base:
            raise TokenizeError(
                f"dangling prefix mark {''.join(current)!r}", offset)
        segments.append(unicodedata.normalize("NFC", "".join(current)))
        current = []
        has_base = False

    for offset, ch in enumerate(text):
        if ch.isspace() or ch in WORD_SEPARATORS:
            if pending_tie:
                raise TokenizeError("tie bar not followed by a base symbol", offset)
            flush(offset)
        elif ch in TIE_BARS:
            if not has_base or pending_tie:
                raise TokenizeError("tie bar with no preceding base symbol", offset)
            current.append(ch)
            pending_tie = True
        elif ch in PREFIX_MARKS:
            if pending_tie:
                raise TokenizeError("tie bar not followed by a base symbol", offset)
            if has_base:
                flush(offset)
            current.append(ch)
        elif _is_combining(ch):
            if not has_base or pending_tie:
                name = unicodedata.name(ch, repr(ch))
                raise TokenizeError(f"combining mark {name} with no base symbol", offset)
            current.append(ch)
        elif _is_modifier(ch):
            if not has_base or pending_tie:
                raise TokenizeError(f"modifier {ch!r} with no base symbol", offset)
            current.append(ch)
        else:
            # base character; anything that is not a mark starts (or, after
            # a tie bar, continues) a segment
            if pending_tie:
                current.append(ch)
                pending_tie = False
            else:
                if has_base:
                    flush(offset)
                current.append(ch)
                has_base = True

    if pending_tie:
        raise TokenizeError("tie bar not followed by a base symbol", len(text))
    flush(len(text))
    return segments


def _clean_segment(seg, removal, strip_voqs):
    """One segment with stripped marks removed; '' when dropped entirely."""
    kept = [c for c in seg if c not in removal]
    if strip_voqs and kept:
        bases = [c for c in kept if _is_base(c)]
        if bases and all(c in VOQS_LETTERS for c in bases):
            return ""
    return unicodedata.normalize("NFC", "".join(kept))


@dataclass(frozen=True)
class NormalizationPolicy:
    """What normalize() strips and merges.

    merge_pairs maps a whole segment to its canonical replacement. Targets
    must not themselves be merge sources, including after stripping, which
    makes normalization idempotent; violations raise DataError at
    construction.
    """

    strip_stress: bool = True
    strip_voqs: bool = True
    strip_diacritics: frozenset = DEFAULT_STRIP_DIACRITICS
    merge_pairs: dict = field(default_factory=lambda: dict(DEFAULT_MERGE_PAIRS))

    def __post_init__(self):
        object.__setattr__(self, "strip_diacritics", frozenset(self.strip_diacritics))
        for c in self.strip_diacritics:
            if len(c) != 1:
                raise DataError(f"strip_diacritics entries are single codepoints, got {c!r}")
            if _is_base(c):
                raise DataError(
                    f"strip_diacritics accepts modifier/combining codepoints, "
                    f"not base letters like {c!r}")
        merges = {
            unicodedata.normalize("NFC", src): unicodedata.normalize("NFC", tgt)
            for src, tgt in self.merge_pairs.items()
        }
        object.__setattr__(self, "merge_pairs", merges)
        removal = self.removal_set()
        for src, tgt in merges.items():
            if not src:
                raise DataError("merge source must be nonempty")
            cleaned = _clean_segment(tgt, removal, self.strip_voqs)
            if cleaned in merges:
                raise DataError(
                    f"merge target {tgt!r} reduces to merge source {cleaned!r}")

    def removal_set(self):
        removal = set(self.strip_diacritics)
        if self.strip_stress:
            removal |= STRESS_MARKS
        if self.strip_voqs:
            removal |= VOQS_MARKS
        return frozenset(removal)


def default_policy() -> NormalizationPolicy:
    return NormalizationPolicy()


def normalize(seq: PhonemeSequence, policy: NormalizationPolicy) -> PhonemeSequence:
    """Strip marks per policy, then merge segments once through the table.

    Segments that become empty disappear; unknown segments pass through
    unchanged. Output length never exceeds input length, and the function
    is idempotent for any policy that passes construction checks.
    """
    removal = policy.removal_set()
    out: PhonemeSequence = []
    for seg in seq:
        t = _clean_segment(seg, removal, policy.strip_voqs)
        if not t:
            continue
        merged = policy.merge_pairs.get(t)
        if merged is not None:
            # the target is cleaned too, otherwise a target carrying a
            # stripped mark would change again on a second pass
            t = _clean_segment(merged, removal, policy.strip_voqs)
            if not t:
                continue
        out.append(t)
    return out


_BOOLEANS = {
    "true": True, "false": False, "yes": True, "no": False,
    "on": True, "off": False, "1": True, "0": False,
}


def _parse_bool(value, path, line_no):
    try:
        return _BOOLEANS[value.strip().lower()]
    except KeyError:
        raise ParseError(f"expected a boolean, got {value!r}", path, line_no) from None


def _parse_codepoint(token, path, line_no):
    if token.upper().startswith("U+"):
        try:
            return chr(int(token[2:], 16))
        except ValueError:
            raise ParseError(f"bad codepoint escape {token!r}", path, line_no) from None
    if len(token) != 1:
        raise ParseError(
            f"expected a single codepoint or U+XXXX escape, got {token!r}",
            path, line_no)
    return token


def load_policy(path) -> NormalizationPolicy:
    """Read a normalization policy file.

    Format: `key = value` lines (strip_stress, strip_voqs,
    strip_diacritics as space-separated codepoints or U+XXXX escapes),
    then an optional `[merge]` section of `source<TAB>target` lines.
    A `[merge]` section replaces the default merge table entirely.
    """
    strip_stress = True
    strip_voqs = True
    strip_diacritics = set(DEFAULT_STRIP_DIACRITICS)
    merge_pairs: dict = {}
    merge_given = False
    in_merge = False

    with open(path, encoding="utf-8") as f:
        for line_no, raw in enumerate(f, 1):
            line = raw.rstrip("\n").rstrip("\r")
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if stripped == "[merge]":
                in_merge = True
                merge_given = True
                continue
            if in_merge:
                parts = line.split("\t")
                if len(parts) != 2 or not parts[0].strip():
                    raise ParseError(
                        "merge lines must be 'source<TAB>target'", path, line_no)
                merge_pairs[parts[0].strip()] = parts[1].strip()
                continue
            if "=" not in line:
                raise ParseError("expected 'key = value'", path, line_no)
            key, _, value = line.partition("=")
            key = key.strip().lower()
            value = value.strip()
            if key == "strip_stress":
                strip_stress = _parse_bool(value, path, line_no)
            elif key == "strip_voqs":
                strip_voqs = _parse_bool(value, path, line_no)
            elif key == "strip_diacritics":
                strip_diacritics = {
                    _parse_codepoint(tok, path, line_no) for tok in value.split()
                }
            else:
                raise ParseError(f"unknown policy key {key!r}", path, line_no)

    if not merge_given:
        merge_pairs = dict(DEFAULT_MERGE_PAIRS)
    try:
        return NormalizationPolicy(
            strip_stress=strip_stress,
            strip_voqs=strip_voqs,
            strip_diacritics=frozenset(strip_diacritics),
            merge_pairs=merge_pairs,
        )
    except DataError as e:
        raise ParseError(str(e), path) from e
