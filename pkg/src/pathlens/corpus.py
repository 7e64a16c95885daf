"""Event-log ingestion: CSV parsing, per-student token sequences, and vocabulary.

The raw inputs are four CSV files (events, forum posts, pass/fail outcomes,
screen metadata). Everything downstream trains on per-student token sequences,
so this module owns the one-row-per-student text format and the deterministic
token vocabulary used by the embedding trainer.
"""

from __future__ import annotations

import csv
import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO, Tuple

from .errors import (
    DuplicateInteraction,
    EmptyVocabulary,
    InteractionCollision,
    MalformedRow,
    MissingOutcome,
)

SCREEN_KINDS = ("training", "application", "project", "forum", "unknown")

PASS_PREFIX = "p-"
FAIL_PREFIX = "n-"
FORUM_TOKEN_PREFIX = "forum:"

EVENTS_HEADER = ("user_id", "screen_id", "interaction_id")
FORUM_HEADER = ("user_id", "interaction_id", "topic")
OUTCOMES_HEADER = ("user_id", "passed")
METADATA_HEADER = ("screen_id", "lesson", "kind", "title")


@dataclass(frozen=True)
class EventRecord:
    """One logged interaction: a student visiting a screen.

    interaction_id is the chronological axis; ordering never uses wall-clock
    time even if the source export carries a timestamp column.
    """

    user_id: str
    screen_id: str
    interaction_id: int


@dataclass(frozen=True)
class ForumEventRecord:
    """A forum post on the same interaction_id axis as screen events."""

    user_id: str
    interaction_id: int
    topic: Optional[str] = None


@dataclass(frozen=True)
class Sequence:
    """A student's chronologically ordered token stream."""

    user_id: str
    tokens: Tuple[str, ...]


@dataclass(frozen=True)
class ScreenInfo:
    lesson: str
    kind: str
    title: str


# user_id -> passed
OutcomeMap = Dict[str, bool]
# screen_id -> ScreenInfo
ScreenMetadata = Dict[str, ScreenInfo]


class TokenVocab:
    """Dense token index ordered by descending count, then lexicographically.

    The ordering tie-break makes index assignment a pure function of the
    corpus, so two ingest runs over the same data agree bit for bit.
    """

    def __init__(self, tokens: List[str], counts: Dict[str, int]):
        self.tokens = list(tokens)
        self.counts = dict(counts)
        self.index = {tok: i for i, tok in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise ValueError("vocabulary tokens must be unique")

    @classmethod
    def from_tokens(cls, tokens: List[str], counts: Optional[Dict[str, int]] = None) -> "TokenVocab":
        """Rebuild a vocab from a serialized token list.

        Model files persist tokens but not counts; absent counts default to 1.
        """
        if counts is None:
            counts = {tok: 1 for tok in tokens}
        return cls(tokens, counts)

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def encode(self, tokens: Iterable[str]) -> List[int]:
        """Map tokens to indices, dropping out-of-vocabulary tokens.

        Windows close over the dropped positions, per the trainer's contract.
        """
        idx = self.index
        return [idx[t] for t in tokens if t in idx]


def _open_reader(stream, expected_header: Tuple[str, ...]) -> csv.DictReader:
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        raise MalformedRow(1, "empty input, expected a header row")
    missing = [col for col in expected_header if col not in reader.fieldnames]
    if missing:
        raise MalformedRow(1, f"header is missing column(s): {', '.join(missing)}")
    return reader


def _require(row: dict, col: str, line: int) -> str:
    value = row.get(col)
    if value is None or value == "":
        raise MalformedRow(line, f"empty or missing {col}")
    return value


def _require_int(row: dict, col: str, line: int) -> int:
    raw = _require(row, col, line)
    try:
        return int(raw)
    except ValueError:
        raise MalformedRow(line, f"{col} must be an integer, got {raw!r}") from None


def parse_events(stream: TextIO) -> List[EventRecord]:
    """Parse the events CSV (user_id,screen_id,interaction_id) in file order.

    Chronological sorting is build_sequences' job, not this one's.
    """
    reader = _open_reader(stream, EVENTS_HEADER)
    records: List[EventRecord] = []
    seen: set = set()
    for row in reader:
        line = reader.line_num
        user = _require(row, "user_id", line)
        screen = _require(row, "screen_id", line)
        interaction = _require_int(row, "interaction_id", line)
        key = (user, interaction)
        if key in seen:
            raise DuplicateInteraction(user, interaction)
        seen.add(key)
        records.append(EventRecord(user, screen, interaction))
    return records


def parse_forum_events(stream: TextIO) -> List[ForumEventRecord]:
    """Parse the forum CSV (user_id,interaction_id,topic); topic may be empty."""
    reader = _open_reader(stream, FORUM_HEADER)
    records: List[ForumEventRecord] = []
    seen: set = set()
    for row in reader:
        line = reader.line_num
        user = _require(row, "user_id", line)
        interaction = _require_int(row, "interaction_id", line)
        topic = row.get("topic") or None
        key = (user, interaction)
        if key in seen:
            raise DuplicateInteraction(user, interaction)
        seen.add(key)
        records.append(ForumEventRecord(user, interaction, topic))
    return records


def parse_outcomes(stream: TextIO) -> OutcomeMap:
    """Parse the outcomes CSV (user_id,passed) with passed in {true,false,1,0}."""
    reader = _open_reader(stream, OUTCOMES_HEADER)
    outcomes: OutcomeMap = {}
    truthy = {"true": True, "1": True, "false": False, "0": False}
    for row in reader:
        line = reader.line_num
        user = _require(row, "user_id", line)
        raw = _require(row, "passed", line).strip().lower()
        if raw not in truthy:
            raise MalformedRow(line, f"passed must be one of true,false,1,0, got {raw!r}")
        outcomes[user] = truthy[raw]
    return outcomes


def parse_metadata(stream: TextIO) -> ScreenMetadata:
    """Parse the screen metadata CSV (screen_id,lesson,kind,title)."""
    reader = _open_reader(stream, METADATA_HEADER)
    meta: ScreenMetadata = {}
    for row in reader:
        line = reader.line_num
        screen = _require(row, "screen_id", line)
        kind = _require(row, "kind", line)
        if kind not in SCREEN_KINDS:
            raise MalformedRow(line, f"kind must be one of {'/'.join(SCREEN_KINDS)}, got {kind!r}")
        meta[screen] = ScreenInfo(
            lesson=row.get("lesson") or "unknown",
            kind=kind,
            title=row.get("title") or "",
        )
    return meta


def build_sequences(events: List[EventRecord]) -> List[Sequence]:
    """Group events into one Sequence per user, tokens sorted by interaction_id.

    Output is sorted by user_id, so shuffled input yields the same result as
    sorted input. Repeated adjacent screens are kept verbatim.
    """
    by_user: Dict[str, List[EventRecord]] = {}
    for ev in events:
        by_user.setdefault(ev.user_id, []).append(ev)
    sequences = []
    for user in sorted(by_user):
        ordered = sorted(by_user[user], key=lambda ev: ev.interaction_id)
        sequences.append(Sequence(user, tuple(ev.screen_id for ev in ordered)))
    return sequences


def decorate_outcome(
    sequences: List[Sequence],
    outcomes: OutcomeMap,
    on_missing: str = "error",
) -> List[Sequence]:
    """Prefix every token with "p-" (passed) or "n-" (failed) per the user's outcome.

    A sequence never mixes prefixes, which is what keeps the two groups out of
    each other's context windows during training. on_missing is "error" or
    "skip"; skip drops sequences for users absent from the outcome map.
    """
    if on_missing not in ("error", "skip"):
        raise ValueError(f"on_missing must be 'error' or 'skip', got {on_missing!r}")
    decorated = []
    for seq in sequences:
        if seq.user_id not in outcomes:
            if on_missing == "error":
                raise MissingOutcome(seq.user_id)
            continue
        prefix = PASS_PREFIX if outcomes[seq.user_id] else FAIL_PREFIX
        decorated.append(Sequence(seq.user_id, tuple(prefix + t for t in seq.tokens)))
    return decorated


def split_outcome_prefix(token: str) -> Tuple[str, str]:
    """Return (group, bare_token); group is pass/fail/all."""
    if token.startswith(PASS_PREFIX):
        return "pass", token[len(PASS_PREFIX):]
    if token.startswith(FAIL_PREFIX):
        return "fail", token[len(FAIL_PREFIX):]
    return "all", token


def interleave_forum(
    events: List[EventRecord],
    forum: List[ForumEventRecord],
    scheme: str = "per_topic",
) -> List[EventRecord]:
    """Merge forum posts into the screen event stream as forum:* tokens.

    per_topic emits "forum:<topic>" (fallback topic "general"); single_token
    collapses every post to "forum:post". The merge is stable: restricted to
    screen events, the per-user stream is unchanged. Output is grouped by
    user_id ascending, interaction_id ascending within each user.
    """
    if scheme not in ("per_topic", "single_token"):
        raise ValueError(f"scheme must be 'per_topic' or 'single_token', got {scheme!r}")

    screen_ids = {(ev.user_id, ev.interaction_id) for ev in events}
    merged: Dict[str, List[EventRecord]] = {}
    for ev in events:
        merged.setdefault(ev.user_id, []).append(ev)
    for post in forum:
        if (post.user_id, post.interaction_id) in screen_ids:
            raise InteractionCollision(post.user_id, post.interaction_id)
        if scheme == "single_token":
            token = FORUM_TOKEN_PREFIX + "post"
        else:
            token = FORUM_TOKEN_PREFIX + (post.topic or "general")
        merged.setdefault(post.user_id, []).append(
            EventRecord(post.user_id, token, post.interaction_id)
        )

    out: List[EventRecord] = []
    for user in sorted(merged):
        out.extend(sorted(merged[user], key=lambda ev: ev.interaction_id))
    return out


def build_vocab(sequences: List[Sequence], min_count: int = 1) -> TokenVocab:
    """Count tokens across all sequences and index those with count >= min_count."""
    if min_count < 1:
        raise ValueError(f"min_count must be a positive integer, got {min_count}")
    tally: Counter = Counter()
    for seq in sequences:
        tally.update(seq.tokens)
    kept = [(tok, n) for tok, n in tally.items() if n >= min_count]
    if not kept:
        raise EmptyVocabulary(min_count)
    kept.sort(key=lambda item: (-item[1], item[0]))
    tokens = [tok for tok, _ in kept]
    return TokenVocab(tokens, dict(kept))


# --- serialization -----------------------------------------------------------

def format_sequences(sequences: List[Sequence]) -> str:
    """Render the one-line-per-student text form: user_id<TAB>token token ..."""
    lines = [f"{seq.user_id}\t{' '.join(seq.tokens)}" for seq in sequences]
    return "\n".join(lines) + ("\n" if lines else "")


def parse_sequences(text: str) -> List[Sequence]:
    sequences = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise MalformedRow(lineno, "expected user_id<TAB>tokens")
        user, _, rest = line.partition("\t")
        if not user:
            raise MalformedRow(lineno, "empty user_id")
        sequences.append(Sequence(user, tuple(rest.split())))
    return sequences


def write_sequences(path: Path, sequences: List[Sequence]) -> None:
    Path(path).write_text(format_sequences(sequences), encoding="utf-8")


def read_sequences(path: Path) -> List[Sequence]:
    return parse_sequences(Path(path).read_text(encoding="utf-8"))


def corpus_fingerprint(sequences: List[Sequence]) -> str:
    """Content hash of the canonical text serialization of the corpus."""
    return hashlib.sha256(format_sequences(sequences).encode("utf-8")).hexdigest()


VOCAB_FORMAT = "pathlens-vocab/1"


def save_vocab(path: Path, vocab: TokenVocab) -> None:
    doc = {
        "format": VOCAB_FORMAT,
        "tokens": vocab.tokens,
        "counts": [vocab.counts[t] for t in vocab.tokens],
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_vocab(path: Path) -> TokenVocab:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != VOCAB_FORMAT:
        raise ValueError(f"unsupported vocab format: {doc.get('format')!r}")
    return TokenVocab(doc["tokens"], dict(zip(doc["tokens"], doc["counts"])))


def write_events_csv(path: Path, events: List[EventRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVENTS_HEADER)
        for ev in events:
            writer.writerow([ev.user_id, ev.screen_id, ev.interaction_id])


def write_forum_csv(path: Path, posts: List[ForumEventRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(FORUM_HEADER)
        for post in posts:
            writer.writerow([post.user_id, post.interaction_id, post.topic or ""])


def write_outcomes_csv(path: Path, outcomes: OutcomeMap) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(OUTCOMES_HEADER)
        for user in sorted(outcomes):
            writer.writerow([user, "true" if outcomes[user] else "false"])


def write_metadata_csv(path: Path, metadata: ScreenMetadata) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(METADATA_HEADER)
        for screen in metadata:
            info = metadata[screen]
            writer.writerow([screen, info.lesson, info.kind, info.title])


def read_events(path: Path) -> List[EventRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_events(fh)


def read_forum_events(path: Path) -> List[ForumEventRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_forum_events(fh)


def read_outcomes(path: Path) -> OutcomeMap:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_outcomes(fh)


def read_metadata(path: Path) -> ScreenMetadata:
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_metadata(fh)
