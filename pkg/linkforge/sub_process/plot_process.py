"""This module is responsible for rendering braids and root trajectories as SVG."""

from pathlib import Path

from htpy import Element, circle, g, line, polyline, svg, text  # pylint: disable=no-name-in-module

from linkforge import config
from linkforge.braid import BraidWord, SingularBraidWord, parse_braid_word
from linkforge.trigpoly import TAU

COLUMN_WIDTH = 48
LANE_HEIGHT = 32
MARGIN = 24
UNDER_GAP = 6
PLOT_WIDTH = 720
PLOT_HEIGHT = 320
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")


def _number(value: float) -> str:
    return f"{value:.3f}"


def _canvas(width: float, height: float, *children) -> str:
    """Wrap elements in an svg root with a fixed viewport."""
    root = svg(
        xmlns="http://www.w3.org/2000/svg",
        width=_number(width),
        height=_number(height),
        viewBox=f"0 0 {_number(width)} {_number(height)}",
    )[children]
    return str(root)


def _segment(x1: float, y1: float, x2: float, y2: float, color: str) -> Element:
    return line(
        x1=_number(x1), y1=_number(y1), x2=_number(x2), y2=_number(y2),
        stroke=color, stroke_width="2", stroke_linecap="round",
    )


def _broken_segment(x1: float, y1: float, x2: float, y2: float, color: str) -> list[Element]:
    """A segment with a gap around its middle for an undercrossing strand."""
    mid_x, mid_y = (x1 + x2) / 2, (y1 + y2) / 2
    length = ((x2 - x1) ** 2 + (y2 - y1) ** 2) ** 0.5
    dx, dy = (x2 - x1) / length * UNDER_GAP, (y2 - y1) / length * UNDER_GAP
    return [_segment(x1, y1, mid_x - dx, mid_y - dy, color), _segment(mid_x + dx, mid_y + dy, x2, y2, color)]


def _lane_y(lane: int) -> float:
    return MARGIN + (lane - 1) * LANE_HEIGHT


def braid_diagram(word: BraidWord) -> str:
    """Draw a braid word from left to right, lane 1 on top.
    In a positive letter the strand leaving the upper lane passes over.

    Args:
        word: The braid word.

    Returns:
        The SVG document.
    """
    width = 2 * MARGIN + COLUMN_WIDTH * max(word.length, 1)
    height = 2 * MARGIN + LANE_HEIGHT * (word.strands - 1)

    strand_at = list(range(word.strands))
    elements = []
    for column, (index, sign) in enumerate(word.letters):
        x1 = MARGIN + column * COLUMN_WIDTH
        x2 = x1 + COLUMN_WIDTH
        for lane in range(1, word.strands + 1):
            if lane not in (index, index + 1):
                color = PALETTE[strand_at[lane - 1] % len(PALETTE)]
                elements.append(_segment(x1, _lane_y(lane), x2, _lane_y(lane), color))
        down = (_lane_y(index), _lane_y(index + 1), PALETTE[strand_at[index - 1] % len(PALETTE)])
        up = (_lane_y(index + 1), _lane_y(index), PALETTE[strand_at[index] % len(PALETTE)])
        over, under = (down, up) if sign > 0 else (up, down)
        elements.extend(_broken_segment(x1, under[0], x2, under[1], under[2]))
        elements.append(_segment(x1, over[0], x2, over[1], over[2]))
        strand_at[index - 1], strand_at[index] = strand_at[index], strand_at[index - 1]

    if not word.letters:
        for lane in range(1, word.strands + 1):
            elements.append(_segment(MARGIN, _lane_y(lane), width - MARGIN, _lane_y(lane), PALETTE[(lane - 1) % len(PALETTE)]))
    return _canvas(width, height, g[elements])


def singular_diagram(b_sing: SingularBraidWord) -> str:
    """Draw a singular braid with its crossings at their times in [0, 2 pi].

    Args:
        b_sing: The singular braid word.

    Returns:
        The SVG document.
    """
    width = PLOT_WIDTH
    height = 2 * MARGIN + LANE_HEIGHT * (b_sing.strands - 1) + MARGIN
    span = width - 2 * MARGIN

    def x_of(t: float) -> float:
        return MARGIN + span * t / TAU

    half = min(COLUMN_WIDTH / 2, span / (2 * max(b_sing.length, 1)))
    elements = []
    edges = [MARGIN]
    for t in b_sing.crossing_times:
        edges.extend([x_of(t) - half, x_of(t) + half])
    edges.append(width - MARGIN)

    crossing_lanes = [{index, index + 1} for index in b_sing.letters]
    for lane in range(1, b_sing.strands + 1):
        for n in range(0, len(edges), 2):
            elements.append(_segment(edges[n], _lane_y(lane), edges[n + 1], _lane_y(lane), "#444444"))
        for lanes, t in zip(crossing_lanes, b_sing.crossing_times):
            if lane not in lanes:
                elements.append(_segment(x_of(t) - half, _lane_y(lane), x_of(t) + half, _lane_y(lane), "#444444"))

    for index, t in zip(b_sing.letters, b_sing.crossing_times):
        x1, x2 = x_of(t) - half, x_of(t) + half
        elements.append(_segment(x1, _lane_y(index), x2, _lane_y(index + 1), "#444444"))
        elements.append(_segment(x1, _lane_y(index + 1), x2, _lane_y(index), "#444444"))
        centre = (_lane_y(index) + _lane_y(index + 1)) / 2
        elements.append(circle(cx=_number(x_of(t)), cy=_number(centre), r="3", fill="#d62728"))
        elements.append(text(x=_number(x_of(t)), y=_number(height - MARGIN / 2), font_size="10", text_anchor="middle")[f"{t:.3f}"])
    return _canvas(width, height, g[elements])


def trajectory_plot(trajectory: dict | None) -> str:
    """Plot Re(u) against t for every tracked strand, breaking the undercrossing strand at each crossing.

    Args:
        trajectory: The down-sampled trajectory of a trace, or None.

    Returns:
        The SVG document.
    """
    if not trajectory:
        return _canvas(PLOT_WIDTH, PLOT_HEIGHT, text(x=_number(MARGIN), y=_number(PLOT_HEIGHT / 2))["No certified trajectory."])

    times = trajectory["times"]
    series = trajectory["re"]
    low = min(min(values) for values in series)
    high = max(max(values) for values in series)
    extent = (high - low) or 1.0

    def point(t: float, value: float) -> tuple[float, float]:
        x = MARGIN + (PLOT_WIDTH - 2 * MARGIN) * t / TAU
        y = PLOT_HEIGHT - MARGIN - (PLOT_HEIGHT - 2 * MARGIN) * (value - low) / extent
        return x, y

    gap = TAU * UNDER_GAP / (PLOT_WIDTH - 2 * MARGIN)
    elements = []
    for column, values in enumerate(series):
        under_times = [
            crossing["t"] for crossing in trajectory["crossings"]
            if column in crossing["pair"] and crossing["over"] != column
        ]
        pieces, current = [], []
        for t, value in zip(times, values):
            if any(abs(t - crossing_t) < gap for crossing_t in under_times):
                if current:
                    pieces.append(current)
                current = []
                continue
            current.append(point(t, value))
        if current:
            pieces.append(current)
        color = PALETTE[column % len(PALETTE)]
        for piece in pieces:
            coordinates = " ".join(f"{_number(x)},{_number(y)}" for x, y in piece)
            elements.append(polyline(points=coordinates, fill="none", stroke=color, stroke_width="1.5"))

    caption = f"Re(u) / r^2k at r = {trajectory['radius']:.6g}"
    elements.append(text(x=_number(MARGIN), y=_number(MARGIN / 2 + 4), font_size="11")[caption])
    return _canvas(PLOT_WIDTH, PLOT_HEIGHT, g[elements])


def write_plots(trace: dict, out: Path) -> list[Path]:
    """Render the three diagrams of a trace.

    Args:
        trace: A trace as read by artifact_process.read_trace.
        out: The output directory.

    Returns:
        The paths written, in a fixed order.
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)

    word = parse_braid_word(trace["input"]["braid"], int(trace["input"]["strands"]))
    b_sing_data = trace["step2"].get("b_sing") or {"strands": trace["word"]["strands"], "letters": [], "crossing_times": []}
    b_sing = SingularBraidWord(int(b_sing_data["strands"]), tuple(b_sing_data["letters"]), tuple(b_sing_data["crossing_times"]))

    documents = [
        (config.INPUT_DIAGRAM_FILE, braid_diagram(word)),
        (config.SINGULAR_DIAGRAM_FILE, singular_diagram(b_sing)),
        (config.TRAJECTORY_FILE, trajectory_plot(trace.get("trajectory"))),
    ]
    paths = []
    for name, document in documents:
        path = out / name
        path.write_text(document + "\n", encoding="utf-8")
        paths.append(path)
    return paths
