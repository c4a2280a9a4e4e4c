"""Pre/post survey ingestion and per-item paired comparisons."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from .stats import TestResult, paired_t_test
from .trace_io import ParseError

SURVEY_HEADER = "participant,phase,topic,item,score"

TOPICS = ("cost", "carbon")
PHASES = ("pre", "post")


class UtilityItem(str, Enum):
    INSTRUMENTAL = "instrumental"
    HEDONIC = "hedonic"
    COGNITIVE = "cognitive"
    WANT_NOT_KNOW = "want_not_know"


@dataclass(frozen=True)
class SurveyResponse:
    participant_id: str
    phase: str  # "pre" | "post"
    topic: str  # "cost" | "carbon"
    item: UtilityItem
    score: int  # Likert, -3..3

    def __post_init__(self) -> None:
        if self.phase not in PHASES:
            raise ValueError(f"unknown phase {self.phase!r}")
        if self.topic not in TOPICS:
            raise ValueError(f"unknown topic {self.topic!r}")
        if not isinstance(self.score, int) or not -3 <= self.score <= 3:
            raise ValueError(f"score outside Likert range [-3, 3]: {self.score!r}")


def parse_survey_csv(text: str) -> tuple[list[SurveyResponse], int]:
    """Long-format survey CSV; malformed lines are skipped and counted."""
    lines = [ln.rstrip("\r") for ln in text.split("\n")]
    body, header_seen = [], False
    for line in lines:
        if line == "" or line.startswith("#"):
            continue
        if not header_seen:
            if line.strip() != SURVEY_HEADER:
                raise ParseError(f"missing survey header {SURVEY_HEADER!r}")
            header_seen = True
            continue
        body.append(line)
    if not header_seen:
        raise ParseError(f"missing survey header {SURVEY_HEADER!r}")

    responses, skipped = [], 0
    for line in body:
        fields = line.split(",")
        try:
            if len(fields) != 5:
                raise ValueError("wrong column count")
            responses.append(
                SurveyResponse(
                    participant_id=fields[0],
                    phase=fields[1],
                    topic=fields[2],
                    item=UtilityItem(fields[3]),
                    score=int(fields[4]),
                )
            )
        except ValueError:
            skipped += 1
    return responses, skipped


def paired_scores(
    responses: Iterable[SurveyResponse], topic: str, item: UtilityItem
) -> tuple[list[int], list[int], list[str]]:
    """Match participants with both a pre and a post score for (topic, item).

    Returns (pre, post, participant_ids) ordered by participant id; a
    duplicate response for the same cell keeps the last one seen.
    """
    pre: dict[str, int] = {}
    post: dict[str, int] = {}
    for r in responses:
        if r.topic != topic or r.item != item:
            continue
        (pre if r.phase == "pre" else post)[r.participant_id] = r.score
    participants = sorted(set(pre) & set(post))
    return (
        [pre[p] for p in participants],
        [post[p] for p in participants],
        participants,
    )


def survey_shift_tests(
    responses: Iterable[SurveyResponse],
) -> dict[tuple[str, str], TestResult]:
    """Paired t-test of post - pre per (topic, item) cell with enough data.

    Cells with fewer than two complete pairs, or with zero variance in the
    differences, are omitted rather than reported as errors.
    """
    responses = list(responses)
    results: dict[tuple[str, str], TestResult] = {}
    for topic in TOPICS:
        for item in UtilityItem:
            pre, post, _ = paired_scores(responses, topic, item)
            if len(pre) < 2:
                continue
            try:
                results[(topic, item.value)] = paired_t_test(pre, post)
            except ValueError:
                continue
    return results
