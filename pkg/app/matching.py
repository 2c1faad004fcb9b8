"""Correspondence between mock-up leaves and implementation leaves.

Each candidate pair is scored by a weighted sum of spatial overlap (IoU), type
agreement and text similarity. Pairs are then accepted greedily by descending score,
or by maximum-weight assignment when the optimal strategy is configured.
"""
import logging
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator
from scipy.optimize import linear_sum_assignment

from app.model import BoundingBox, GuiComponent
from app.utils.config import Config, MatchWeights
from app.utils.numeric import round_sig

logger = logging.getLogger(__name__)


class ComponentMatch(BaseModel):
    model_config = ConfigDict(frozen=True)

    mockup_id: str
    impl_id: str
    score: float = Field(ge=0.0, le=1.0)

    @field_validator("score")
    @classmethod
    def _round_score(cls, value: float) -> float:
        return round_sig(value)


class MatchResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    matches: Tuple[ComponentMatch, ...] = ()
    unmatched_mockup: Tuple[str, ...] = ()
    unmatched_impl: Tuple[str, ...] = ()


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two rectangles."""
    inter = a.intersection_area(b)
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)


def edit_distance(s1: str, s2: str) -> int:
    """Levenshtein distance using two rows of the DP table."""
    if len(s1) > len(s2):
        s1, s2 = s2, s1
    current = list(range(len(s1) + 1))
    for i in range(1, len(s2) + 1):
        previous, current = current, [i] + [0] * len(s1)
        for j in range(1, len(s1) + 1):
            substitution = previous[j - 1] + (s1[j - 1] != s2[i - 1])
            current[j] = min(previous[j] + 1, current[j - 1] + 1, substitution)
    return current[len(s1)]


def text_similarity(s1: Optional[str], s2: Optional[str]) -> float:
    """1 - normalized edit distance. Absent text on both sides counts as identical."""
    if s1 is None and s2 is None:
        return 1.0
    if s1 is None or s2 is None:
        return 0.0
    longest = max(len(s1), len(s2))
    if longest == 0:
        return 1.0
    return 1.0 - edit_distance(s1, s2) / longest


def similarity(a: GuiComponent, b: GuiComponent, weights: Optional[MatchWeights] = None) -> float:
    weights = weights or MatchWeights()
    score = (
        weights.spatial * iou(a.bounds, b.bounds)
        + weights.ctype * (1.0 if a.ctype == b.ctype else 0.0)
        + weights.text * text_similarity(a.text, b.text)
    )
    return min(1.0, max(0.0, score))


def score_matrix(
    mock: Sequence[GuiComponent], impl: Sequence[GuiComponent], weights: MatchWeights
) -> np.ndarray:
    scores = np.zeros((len(mock), len(impl)))
    for i, m in enumerate(mock):
        for j, c in enumerate(impl):
            scores[i, j] = similarity(m, c, weights)
    return scores


def greedy_assignment(
    scores: np.ndarray,
    threshold: float,
    rows: Optional[Sequence[int]] = None,
    cols: Optional[Sequence[int]] = None,
) -> List[Tuple[int, int]]:
    """Accept pairs by descending score while both sides are unused."""
    rows = range(scores.shape[0]) if rows is None else rows
    cols = range(scores.shape[1]) if cols is None else cols
    candidates = [
        (scores[i, j], i, j) for i in rows for j in cols if scores[i, j] >= threshold
    ]
    # score descending, then mock-up pre-order index, then implementation pre-order index
    candidates.sort(key=lambda c: (-c[0], c[1], c[2]))
    used_rows: Set[int] = set()
    used_cols: Set[int] = set()
    accepted = []
    for _, i, j in candidates:
        if i in used_rows or j in used_cols:
            continue
        used_rows.add(i)
        used_cols.add(j)
        accepted.append((i, j))
    return accepted


def optimal_assignment(
    scores: np.ndarray,
    threshold: float,
    rows: Optional[Sequence[int]] = None,
    cols: Optional[Sequence[int]] = None,
) -> List[Tuple[int, int]]:
    """Maximum-weight assignment, then drop pairs below the threshold."""
    rows = list(range(scores.shape[0])) if rows is None else list(rows)
    cols = list(range(scores.shape[1])) if cols is None else list(cols)
    if not rows or not cols:
        return []
    sub = scores[np.ix_(rows, cols)]
    row_ind, col_ind = linear_sum_assignment(sub, maximize=True)
    return [
        (rows[r], cols[c]) for r, c in zip(row_ind, col_ind) if sub[r, c] >= threshold
    ]


def match_components(
    mock: Sequence[GuiComponent], impl: Sequence[GuiComponent], cfg: Optional[Config] = None
) -> MatchResult:
    """Pair mock-up leaves with implementation leaves.

    Every leaf ends up either in exactly one match or in its side's unmatched list.
    """
    cfg = cfg or Config()
    scores = score_matrix(mock, impl, cfg.weights)
    accepted: List[Tuple[int, int]] = []

    if cfg.match_by_id:
        impl_index: Dict[str, int] = {c.id: j for j, c in enumerate(impl)}
        for i, m in enumerate(mock):
            j = impl_index.get(m.id)
            if j is not None and scores[i, j] >= cfg.match_threshold:
                accepted.append((i, j))

    taken_rows = {i for i, _ in accepted}
    taken_cols = {j for _, j in accepted}
    rows = [i for i in range(len(mock)) if i not in taken_rows]
    cols = [j for j in range(len(impl)) if j not in taken_cols]
    if cfg.match_strategy == "optimal":
        accepted.extend(optimal_assignment(scores, cfg.match_threshold, rows, cols))
    else:
        accepted.extend(greedy_assignment(scores, cfg.match_threshold, rows, cols))

    accepted.sort()
    matched_rows = {i for i, _ in accepted}
    matched_cols = {j for _, j in accepted}
    result = MatchResult(
        matches=tuple(
            ComponentMatch(mockup_id=mock[i].id, impl_id=impl[j].id, score=float(scores[i, j]))
            for i, j in accepted
        ),
        unmatched_mockup=tuple(m.id for i, m in enumerate(mock) if i not in matched_rows),
        unmatched_impl=tuple(c.id for j, c in enumerate(impl) if j not in matched_cols),
    )
    logger.debug(
        f"Matched {len(result.matches)} of {len(mock)} mock-up and {len(impl)} implementation leaves"
    )
    return result
