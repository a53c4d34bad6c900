"""Anytime shortest-plan learning on top of a blind universal plan.

The robot only has two binary detectors: "at the initial state" and "in the
goal set".  Each time the initial state is seen, recording restarts; when a
goal is seen while recording, the recorded actions are a complete plan and
replace the best one if strictly shorter.  The learner never knows whether
the plan it holds is optimal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import kernels
from .digits import ActionMap, DigitStream
from .errors import InvalidArgument
from .gridworld import Cell, GridEnv, apply_actions, bfs_path


@dataclass
class LearnerState:
    best_plan: list | None = None
    steps_consumed: int = 0
    # Recording is active iff buffer_length >= 0.
    buffer_length: int = -1
    # Stage at which the current best plan was completed.
    found_at: int | None = None
    cap: int = 0
    cap_hits: int = 0
    history: list = field(default_factory=list)

    @property
    def best_length(self) -> int | None:
        return None if self.best_plan is None else len(self.best_plan)


def bfs_shortest(env: GridEnv, source: Cell, goals) -> list[tuple[int, int]]:
    """Minimum-length action sequence from ``source`` into ``goals``."""
    return bfs_path(env, source, goals)


def learn_optimal(env: GridEnv, stream: DigitStream, amap: ActionMap | None = None,
                  offset: int = 1, budget: int = 10**6, cap: int | None = None,
                  chunk: int = 1 << 22) -> LearnerState:
    """Run the plan from ``env.start`` for ``budget`` steps, keeping the
    shortest recorded start-to-goal segment.

    ``cap`` bounds the recording buffer (default 4 * |X|); recordings that
    outgrow it are dropped and counted in ``cap_hits``.  Each stored plan
    is replayed from the start and must end in the goal set.
    """
    if budget < 0:
        raise InvalidArgument("budget must be >= 0")
    amap = amap or ActionMap.default()
    if cap is None:
        cap = 4 * len(env)
    result = LearnerState(cap=cap)
    if env.start in env.goals:
        result.best_plan = []
        result.found_at = 0
        result.history.append((0, 0))
        return result

    aidx = amap.index_array(stream.base)
    start = env.index[env.start]
    state = start
    buf_len, buf_start = 0, offset
    best_len, best_start = -1, -1
    cap_hits = 0
    done = 0
    while done < budget:
        n = min(chunk, budget - done, stream.available(offset + done, chunk))
        if n <= 0:
            break
        digits = stream.block(offset + done, n)
        prev_best = best_len
        state, buf_len, buf_start, best_len, best_start, cap_hits = kernels.learn_chunk(
            env.table, aidx, digits, state, start, env.goal_mask,
            buf_len, buf_start, best_len, best_start, cap, cap_hits, offset + done)
        done += n
        if best_len != prev_best:
            _store(result, env, stream, amap, best_start, best_len, offset)
        if best_len == 0:
            break
    result.steps_consumed = done
    result.buffer_length = buf_len
    result.cap_hits = cap_hits
    return result


def _store(result: LearnerState, env: GridEnv, stream: DigitStream, amap: ActionMap,
           start_index: int, length: int, offset: int) -> None:
    plan = [amap(int(d)) for d in stream.block(start_index, length)]
    end = apply_actions(env, env.start, plan)
    if end not in env.goals:
        raise AssertionError(f"recorded plan of length {length} does not reach the goal")
    if result.best_plan is not None and len(plan) >= len(result.best_plan):
        raise AssertionError("best plan length increased")
    result.best_plan = plan
    result.found_at = start_index + length - offset
    result.history.append((result.found_at, length))
