"""Seeded synthetic learner corpora with planted navigational structure.

Real course logs are private, so the pipeline is validated against generated
cohorts whose behavior is known by construction: linear students walk the
course in order, hub-and-spoke students hit each unit's graded application
screens first and bounce out to that unit's training screens, and by_outcome
cohorts assign linear behavior to passing students and hub-and-spoke to
failing ones. The caricatures are intentionally pure; they exist to make the
pipeline's discriminative claims checkable, not to simulate real students.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Tuple

import numpy as np

from .corpus import (
    EventRecord,
    ForumEventRecord,
    OutcomeMap,
    ScreenInfo,
    ScreenMetadata,
)
from .errors import DegenerateGroup, UnknownToken

BEHAVIORS = ("linear", "hub_spoke", "by_outcome")


@dataclass(frozen=True)
class SynthSpec:
    n_students: int = 100
    n_lessons: int = 6
    screens_per_lesson: int = 20
    behavior: str = "linear"
    noise: float = 0.0
    seed: int = 1
    pass_fraction: float = 0.5
    forum_rate: float = 0.0

    def __post_init__(self):
        if min(self.n_students, self.n_lessons, self.screens_per_lesson) < 1:
            raise ValueError("student, lesson, and screen counts must be positive")
        if self.behavior not in BEHAVIORS:
            raise ValueError(f"behavior must be one of {BEHAVIORS}")
        for name in ("noise", "pass_fraction", "forum_rate"):
            p = getattr(self, name)
            if not (0.0 <= p <= 1.0):
                raise ValueError(f"{name} must be a probability in [0, 1]")


def lesson_name(i: int) -> str:
    return f"L{i + 1}"


def course_screens(spec: SynthSpec) -> List[str]:
    """All screen ids in the designed course order."""
    total = spec.n_lessons * spec.screens_per_lesson
    return [f"s:{i + 1}" for i in range(total)]


def lesson_layout(spec: SynthSpec) -> List[Tuple[str, List[str], List[str]]]:
    """Per lesson: (name, training screen ids, application screen ids).

    The last quarter of each lesson's screens (at least one) are graded
    applications; the rest are ungraded training screens.
    """
    screens = course_screens(spec)
    k = spec.screens_per_lesson
    n_app = max(1, k // 4)
    layout = []
    for li in range(spec.n_lessons):
        chunk = screens[li * k:(li + 1) * k]
        layout.append((lesson_name(li), chunk[: k - n_app], chunk[k - n_app:]))
    return layout


def build_metadata(spec: SynthSpec) -> ScreenMetadata:
    """One row per screen: lesson, kind, and a human-readable title."""
    meta: ScreenMetadata = {}
    for name, training, apps in lesson_layout(spec):
        for pos, sid in enumerate(training, start=1):
            meta[sid] = ScreenInfo(lesson=name, kind="training", title=f"{name} training {pos}")
        for pos, sid in enumerate(apps, start=1):
            meta[sid] = ScreenInfo(lesson=name, kind="application", title=f"{name} quiz {pos}")
    return meta


def _walk_linear(spec: SynthSpec, rng: np.random.Generator, screens: List[str]) -> List[str]:
    """Course order, with each step replaced by a uniform random screen at `noise`."""
    out = []
    for sid in screens:
        if spec.noise > 0 and rng.random() < spec.noise:
            out.append(screens[int(rng.integers(len(screens)))])
        else:
            out.append(sid)
    return out


def _walk_hub_spoke(
    spec: SynthSpec,
    rng: np.random.Generator,
    layout: List[Tuple[str, List[str], List[str]]],
    screens: List[str],
) -> List[str]:
    """Per unit: the application block first, then excursions out to training.

    Each excursion wanders a short consecutive run of the unit's training
    screens before returning to a random application. Runs keep each training
    screen's context local to its chain neighbors (training material is linear
    in the modeled course), while the applications keep co-occurring with each
    other; that contrast is the planted hub-and-spoke geometry.
    """
    out = []
    for _, training, apps in layout:
        out.extend(apps)
        remaining = len(training)
        while remaining > 0:
            run = int(rng.integers(3, 7))
            start = int(rng.integers(max(1, len(training) - run + 1)))
            chunk = training[start:start + run]
            out.extend(chunk)
            out.append(apps[int(rng.integers(len(apps)))])
            remaining -= len(chunk)
    if spec.noise > 0:
        out = [
            screens[int(rng.integers(len(screens)))]
            if rng.random() < spec.noise else sid
            for sid in out
        ]
    return out


def gen_corpus(
    spec: SynthSpec,
) -> Tuple[List[EventRecord], List[ForumEventRecord], OutcomeMap, ScreenMetadata]:
    """Generate (events, forum posts, outcomes, metadata), fully seeded.

    Students are processed in id order from one generator, so identical specs
    give identical corpora. The first round(pass_fraction * n) students pass;
    in by_outcome mode passing students walk linearly and failing students
    follow the hub-and-spoke pattern. Forum posts fire after application
    visits with probability forum_rate, on the same interaction axis as the
    screen events, with the lesson name as the topic.
    """
    rng = np.random.default_rng(spec.seed)
    screens = course_screens(spec)
    layout = lesson_layout(spec)
    metadata = build_metadata(spec)
    app_lessons = {sid: name for name, _, apps in layout for sid in apps}

    n_pass = int(round(spec.pass_fraction * spec.n_students))
    events: List[EventRecord] = []
    forum: List[ForumEventRecord] = []
    outcomes: OutcomeMap = {}

    width = max(4, len(str(spec.n_students)))
    for i in range(spec.n_students):
        user = f"u{i + 1:0{width}d}"
        passed = i < n_pass
        outcomes[user] = passed
        if spec.behavior == "linear":
            walk = _walk_linear(spec, rng, screens)
        elif spec.behavior == "hub_spoke":
            walk = _walk_hub_spoke(spec, rng, layout, screens)
        else:
            walk = (
                _walk_linear(spec, rng, screens)
                if passed
                else _walk_hub_spoke(spec, rng, layout, screens)
            )
        interaction = 0
        for sid in walk:
            interaction += 1
            events.append(EventRecord(user, sid, interaction))
            if sid in app_lessons and spec.forum_rate > 0 and rng.random() < spec.forum_rate:
                interaction += 1
                forum.append(ForumEventRecord(user, interaction, app_lessons[sid]))
    return events, forum, outcomes, metadata


def cohesion(
    vectors: Mapping[str, np.ndarray],
    groups: Mapping[str, Iterable[str]],
    space: str = "embedding",
) -> Dict[str, float]:
    """Mean intra-group pairwise similarity over unordered pairs.

    In embedding space the similarity is cosine; in projection space it is
    the negative Euclidean distance (so larger still means tighter).
    """
    if space not in ("embedding", "projection"):
        raise ValueError(f"space must be 'embedding' or 'projection', got {space!r}")
    out: Dict[str, float] = {}
    for name, members in groups.items():
        tokens = list(members)
        for tok in tokens:
            if tok not in vectors:
                raise UnknownToken(tok)
        if len(tokens) < 2:
            raise DegenerateGroup(name, len(tokens))
        vecs = np.array([vectors[t] for t in tokens], dtype=float)
        total = 0.0
        pairs = 0
        for a in range(len(tokens)):
            for b in range(a + 1, len(tokens)):
                if space == "embedding":
                    na = np.linalg.norm(vecs[a])
                    nb = np.linalg.norm(vecs[b])
                    sim = float(vecs[a] @ vecs[b] / (na * nb)) if na > 0 and nb > 0 else 0.0
                else:
                    sim = -float(np.linalg.norm(vecs[a] - vecs[b]))
                total += sim
                pairs += 1
        out[name] = total / pairs
    return out


def vectors_from_model(model) -> Dict[str, np.ndarray]:
    """Token to embedding-row mapping for cohesion in embedding space."""
    return {tok: model.W[i] for i, tok in enumerate(model.vocab.tokens)}


def vectors_from_projection(tokens: List[str], xy: np.ndarray) -> Dict[str, np.ndarray]:
    """Token to 2D-coordinate mapping for cohesion in projection space."""
    return {tok: xy[i] for i, tok in enumerate(tokens)}
