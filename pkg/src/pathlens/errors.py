"""Exception types shared across the pathlens pipeline stages."""


class PathlensError(Exception):
    """Base class for all pathlens errors."""


class MalformedRow(PathlensError):
    def __init__(self, line: int, reason: str = ""):
        self.line = line
        self.reason = reason
        msg = f"malformed row at line {line}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class DuplicateInteraction(PathlensError):
    def __init__(self, user_id: str, interaction_id: int):
        self.user_id = user_id
        self.interaction_id = interaction_id
        super().__init__(f"duplicate interaction_id {interaction_id} for user {user_id!r}")


class MissingOutcome(PathlensError):
    def __init__(self, user_id: str):
        self.user_id = user_id
        super().__init__(f"no pass/fail outcome recorded for user {user_id!r}")


class InteractionCollision(PathlensError):
    def __init__(self, user_id: str, interaction_id: int):
        self.user_id = user_id
        self.interaction_id = interaction_id
        super().__init__(
            f"interaction_id {interaction_id} for user {user_id!r} appears in both screen and forum logs"
        )


class EmptyVocabulary(PathlensError):
    def __init__(self, min_count: int = 1):
        self.min_count = min_count
        super().__init__(f"no token survives min_count={min_count}")


class EmptyCorpus(PathlensError):
    def __init__(self):
        super().__init__("no in-vocabulary tokens remain in any sequence")


class VocabularyTooSmall(PathlensError):
    def __init__(self, size: int):
        self.size = size
        super().__init__(f"vocabulary has {size} tokens; at least 2 are required")


class UnknownToken(PathlensError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(f"token {token!r} is not in the vocabulary")


class NonFiniteLoss(PathlensError):
    def __init__(self, detail: str = ""):
        super().__init__(f"training diverged to a non-finite value{': ' + detail if detail else ''}")


class NonFiniteInput(PathlensError):
    def __init__(self, what: str = "input matrix"):
        super().__init__(f"{what} contains non-finite entries")


class PerplexityTooLarge(PathlensError):
    def __init__(self, perplexity: float, n: int):
        self.perplexity = perplexity
        self.n = n
        super().__init__(
            f"perplexity {perplexity} is not < (N-1)/3 = {(n - 1) / 3:.3f} for N={n} points"
        )


class NonFiniteIterate(PathlensError):
    def __init__(self, iteration: int):
        self.iteration = iteration
        super().__init__(f"embedding coordinates became non-finite at iteration {iteration}")


class UnknownPlot(PathlensError):
    def __init__(self, plot_id: str):
        self.plot_id = plot_id
        super().__init__(f"no gallery entry with plot_id {plot_id!r}")


class RatingOutOfRange(PathlensError):
    def __init__(self, rating):
        self.rating = rating
        super().__init__(f"rating must be an integer in 1..5, got {rating!r}")


class DegenerateGroup(PathlensError):
    def __init__(self, name: str, size: int):
        self.name = name
        self.size = size
        super().__init__(f"group {name!r} has {size} member(s); cohesion needs at least 2")


class FingerprintMismatch(PathlensError):
    def __init__(self, expected: str, actual: str):
        self.expected = expected
        self.actual = actual
        super().__init__(
            "gallery was built from a different corpus "
            f"(manifest fingerprint {expected[:12]}..., supplied corpus {actual[:12]}...)"
        )
