"""Source-language selection strategies and training manifest assembly.

Strategies: monolingual (no sources), family (same-family languages),
all (every other language), corpus_sim (the k languages with the highest
cosine similarity to the target; k defaults to 3). The manifest always
trains on the target alongside its sources, and its phoneme inventory is
the union over target plus sources so every target utterance stays
representable.
"""

import warnings
from dataclasses import dataclass
from enum import Enum

from .errors import DataError
from .formats import fmt_float
from .registry import Registry
from .stats import SimilarityMatrix


class Strategy(str, Enum):
    MONOLINGUAL = "monolingual"
    FAMILY = "family"
    ALL = "all"
    CORPUS_SIM = "corpus_sim"


@dataclass(frozen=True)
class SelectionResult:
    target: str
    strategy: Strategy
    sources: tuple   # (code, similarity score or None) pairs, selection order
    k: int

    def source_codes(self):
        return tuple(code for code, _ in self.sources)


@dataclass(frozen=True)
class PhonemeInventory:
    language_scope: tuple
    phonemes: tuple  # sorted union over the scope


@dataclass
class TrainingManifest:
    target: str
    strategy: Strategy
    languages: tuple                 # target first, then sources in order
    sources: tuple                   # (code, score or None), selection order
    utterances: list                 # (language code, audio path, phoneme list)
    inventory: PhonemeInventory
    total_hours: float


def select_top_k(target, matrix: SimilarityMatrix, k=3, hours=None) -> SelectionResult:
    """The k most similar languages to the target, scores recorded.

    Ties break by greater recording hours (when a code -> hours mapping is
    supplied), then lexicographic code. k beyond N-1 truncates with a
    warning.
    """
    if k < 1:
        raise DataError("k must be at least 1")
    t = matrix.index(target)
    hours = hours or {}
    candidates = []
    for j, code in enumerate(matrix.codes):
        if code == target:
            continue
        candidates.append((code, float(matrix.values[t, j])))
    candidates.sort(key=lambda cs: (-cs[1], -float(hours.get(cs[0], 0.0)), cs[0]))
    if k > len(candidates):
        warnings.warn(
            f"k={k} exceeds the {len(candidates)} available languages; truncated")
        k = len(candidates)
    return SelectionResult(target, Strategy.CORPUS_SIM, tuple(candidates[:k]), k)


def select_strategy(target, strategy, reg: Registry, matrix=None, k=3) -> SelectionResult:
    """Dispatch to one of the selection strategies."""
    try:
        strategy = Strategy(strategy)
    except ValueError:
        raise DataError(f"unknown selection strategy {strategy!r}") from None
    record = reg.get(target)
    if strategy is Strategy.MONOLINGUAL:
        return SelectionResult(target, strategy, (), 0)
    if strategy is Strategy.FAMILY:
        members = reg.family_members(record.family, exclude=target)
        return SelectionResult(
            target, strategy, tuple((r.code, None) for r in members), len(members))
    if strategy is Strategy.ALL:
        others = [r.code for r in reg if r.code != target]
        return SelectionResult(
            target, strategy, tuple((c, None) for c in others), len(others))
    if matrix is None:
        raise DataError("strategy corpus_sim requires a similarity matrix")
    hours = {r.code: r.recording_hours for r in reg}
    return select_top_k(target, matrix, k=k, hours=hours)


def build_inventory(scope, per_language_sets) -> PhonemeInventory:
    """Sorted union of the per-language phoneme sets over the scope."""
    union = set()
    for code in scope:
        try:
            union.update(per_language_sets[code])
        except KeyError:
            raise DataError(f"no phoneme set for language {code!r}") from None
    return PhonemeInventory(tuple(scope), tuple(sorted(union)))


def emit_manifest(selection: SelectionResult, corpora, reg: Registry,
                  inventory=None) -> TrainingManifest:
    """Assemble the training manifest for a selection.

    corpora maps language code -> list of (audio_path, phoneme list).
    Utterances are grouped by language, target first then sources in
    selection order. Every transcription is validated against the
    inventory (built from the corpora unless one is supplied).
    """
    languages = (selection.target,) + selection.source_codes()
    for code in languages:
        if code not in corpora:
            raise DataError(f"no corpus available for language {code!r}")
    if inventory is None:
        sets = {
            code: {ph for _, seq in corpora[code] for ph in seq}
            for code in languages
        }
        inventory = build_inventory(languages, sets)
    known = set(inventory.phonemes)

    utterances = []
    for code in languages:
        for audio_path, seq in corpora[code]:
            for ph in seq:
                if ph not in known:
                    raise DataError(
                        f"utterance {audio_path!r} ({code}) contains phoneme "
                        f"{ph!r} outside the inventory")
            utterances.append((code, audio_path, list(seq)))

    total_hours = sum(reg.get(code).recording_hours for code in languages)
    return TrainingManifest(
        selection.target, selection.strategy, languages, selection.sources,
        utterances, inventory, float(total_hours))


def selection_report(selection: SelectionResult) -> str:
    lines = [
        f"target\t{selection.target}",
        f"strategy\t{selection.strategy.value}",
        f"k\t{selection.k}",
    ]
    for code, score in selection.sources:
        if score is None:
            lines.append(f"source\t{code}")
        else:
            lines.append(f"source\t{code}\t{fmt_float(score)}")
    return "\n".join(lines) + "\n"


def write_selection_report(selection: SelectionResult, path):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(selection_report(selection))


def write_manifest_tsv(manifest: TrainingManifest, path):
    """Structured header block, then `lang<TAB>audio_path<TAB>ipa` rows."""
    sources = " ".join(
        code if score is None else f"{code}:{fmt_float(score)}"
        for code, score in manifest.sources)
    lines = [
        f"#target\t{manifest.target}",
        f"#strategy\t{manifest.strategy.value}",
        f"#sources\t{sources}",
        "#inventory\t" + " ".join(manifest.inventory.phonemes),
        f"#total_hours\t{fmt_float(manifest.total_hours)}",
        "lang\taudio_path\tipa",
    ]
    for code, audio_path, seq in manifest.utterances:
        lines.append(f"{code}\t{audio_path}\t{' '.join(seq)}")
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(lines) + "\n")
