"""SVG rendering of grid and continuous traces."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from pathlib import Path

from ..gridworld import GridEnv, PlanTrace, execute
from ..scalefree.env import ContinuousEnv
from ..scalefree.execute import ContinuousTrace, execute_adaptive, execute_scalefree

CELL = 20
CANVAS = 480
OBSTACLE = "#9e9e9e"
FREE = "#ffffff"
START = "#d32f2f"
GOAL = "#2e7d32"
# step-size exponent m -> colour (cycled for large m)
PALETTE = ("#1f77b4", "#ff7f0e", "#9467bd", "#17becf", "#8c564b", "#e377c2",
           "#bcbd22", "#7f7f7f")


def _dedupe(points: list) -> list:
    out = []
    for p in points:
        if not out or out[-1] != p:
            out.append(p)
    return out


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _svg(width: float, height: float) -> ET.Element:
    return ET.Element("svg", xmlns="http://www.w3.org/2000/svg", version="1.1",
                      width=_fmt(width), height=_fmt(height),
                      viewBox=f"0 0 {_fmt(width)} {_fmt(height)}")


def _grid_svg(env: GridEnv, trace: PlanTrace) -> ET.Element:
    w, h = env.width * CELL, env.height * CELL
    root = _svg(w, h)

    def corner(c):
        return c[0] * CELL, (env.height - 1 - c[1]) * CELL

    def centre(c):
        x, y = corner(c)
        return x + CELL / 2, y + CELL / 2

    ET.SubElement(root, "rect", {"class": "obstacle", "x": "0", "y": "0",
                                 "width": str(w), "height": str(h), "fill": OBSTACLE})
    for c in env.cells:
        x, y = corner(c)
        ET.SubElement(root, "rect", {"class": "free", "x": str(x), "y": str(y),
                                     "width": str(CELL), "height": str(CELL),
                                     "fill": FREE, "stroke": "#dddddd"})
    states = trace.states or [env.start]
    for c in sorted(set(states)):
        x, y = corner(c)
        ET.SubElement(root, "rect", {"class": "visited", "x": str(x + 2), "y": str(y + 2),
                                     "width": str(CELL - 4), "height": str(CELL - 4),
                                     "fill": "#bbdefb"})
    path = _dedupe([centre(c) for c in states])
    if len(path) > 1:
        ET.SubElement(root, "polyline", {
            "class": "trace", "fill": "none", "stroke": "#1565c0", "stroke-width": "2",
            "points": " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in path)})
    for g in sorted(env.goals):
        x, y = centre(g)
        ET.SubElement(root, "circle", {"class": "goal", "cx": _fmt(x), "cy": _fmt(y),
                                       "r": str(CELL * 0.35), "fill": GOAL})
    x, y = centre(states[0])
    ET.SubElement(root, "circle", {"class": "start", "cx": _fmt(x), "cy": _fmt(y),
                                   "r": str(CELL * 0.25), "fill": START})
    return root


def _continuous_svg(env: ContinuousEnv, trace: ContinuousTrace) -> ET.Element:
    scale = CANVAS / float(max(env.width, env.height))
    w, h = float(env.width) * scale, float(env.height) * scale

    def px(p):
        return float(p[0]) * scale, h - float(p[1]) * scale

    root = _svg(w, h)
    ET.SubElement(root, "rect", {"class": "free", "x": "0", "y": "0", "width": _fmt(w),
                                 "height": _fmt(h), "fill": FREE, "stroke": OBSTACLE})
    for d in env.discs:
        x, y = px((d.cx, d.cy))
        ET.SubElement(root, "circle", {"class": "obstacle", "cx": _fmt(x), "cy": _fmt(y),
                                       "r": _fmt(float(d.r) * scale), "fill": OBSTACLE})
    x, y = px(env.goal)
    ET.SubElement(root, "circle", {"class": "goal", "cx": _fmt(x), "cy": _fmt(y),
                                   "r": _fmt(float(env.goal_radius) * scale),
                                   "fill": GOAL, "fill-opacity": "0.5"})
    points = trace.points() if trace.positions else [trace.origin]
    # one polyline per run of equal exponents, sharing its first point with the previous run
    runs: list[tuple[int, list]] = []
    for i, m in enumerate(trace.exponents):
        a, b = points[i], points[i + 1]
        if runs and runs[-1][0] == m:
            runs[-1][1].append(b)
        else:
            runs.append((m, [a, b]))
    for m, pts in runs:
        pts = _dedupe(pts)
        if len(pts) < 2:
            continue
        ET.SubElement(root, "polyline", {
            "class": "trace", "data-exponent": str(m), "fill": "none",
            "stroke": PALETTE[m % len(PALETTE)], "stroke-width": "1.5",
            "points": " ".join("{},{}".format(*map(_fmt, px(p))) for p in pts)})
    x, y = px(points[0])
    ET.SubElement(root, "circle", {"class": "start", "cx": _fmt(x), "cy": _fmt(y),
                                   "r": "4", "fill": START})
    return root


def render_trace_svg(env, trace, path: str | Path) -> Path:
    """Write an SVG of ``trace`` over ``env`` and return the path."""
    if isinstance(env, GridEnv):
        root = _grid_svg(env, trace)
    elif isinstance(env, ContinuousEnv):
        root = _continuous_svg(env, trace)
    else:
        raise TypeError(f"cannot render environment of type {type(env).__name__}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)
    return path


def trace_for_config(cfg, i: int = 1):
    """Recorded trace of trial i, for rendering."""
    from .runner import load_environment

    env = load_environment(cfg)
    stream, amap, offset = cfg.stream(), cfg.action_map(), cfg.trial_offset(i)
    if cfg.kind in ("grid", "maze", "learn"):
        return env, execute(env, stream, amap, offset, cfg.budget)
    start = cfg.start or env.starts[0]
    if cfg.kind == "continuous-adaptive":
        return env, execute_adaptive(env, start, stream, amap, offset, cfg.budget)
    return env, execute_scalefree(env, start, stream, amap, cfg.w, offset, cfg.budget)


def render_config_trial(cfg, i: int, path: str | Path) -> Path:
    env, trace = trace_for_config(cfg, i)
    return render_trace_svg(env, trace, path)
