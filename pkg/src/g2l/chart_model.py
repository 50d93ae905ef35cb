"""The chart intermediate representation shared by the corpus generator,
semantic analyzer, and code emitter, organized after the layered
grammar-of-graphics view of a plot."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class ChartClass(str, Enum):
    BAR = "bar"
    STACKED_BAR = "stacked_bar"
    GROUPED_BAR = "grouped_bar"
    SCATTER = "scatter"
    GROUPED_SCATTER = "grouped_scatter"
    PIE = "pie"
    HEATMAP = "heatmap"


# canonical ordering used for classifier outputs, manifests, and reports
CLASS_ORDER: tuple[ChartClass, ...] = (
    ChartClass.BAR,
    ChartClass.STACKED_BAR,
    ChartClass.GROUPED_BAR,
    ChartClass.SCATTER,
    ChartClass.GROUPED_SCATTER,
    ChartClass.PIE,
    ChartClass.HEATMAP,
)

AXIS_CLASSES = frozenset(
    c for c in CLASS_ORDER if c not in (ChartClass.PIE, ChartClass.HEATMAP)
)

MULTI_SERIES_CLASSES = frozenset(
    (ChartClass.STACKED_BAR, ChartClass.GROUPED_BAR, ChartClass.GROUPED_SCATTER)
)


@dataclass
class Series:
    name: str
    values: list[float]

    def to_dict(self) -> dict:
        return {"name": self.name, "values": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "Series":
        return cls(name=d["name"], values=list(d["values"]))


@dataclass
class HeatGrid:
    rows: int
    cols: int
    cell_values: list[float]

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "cell_values": list(self.cell_values)}

    @classmethod
    def from_dict(cls, d: dict) -> "HeatGrid":
        return cls(rows=d["rows"], cols=d["cols"], cell_values=list(d["cell_values"]))


@dataclass
class ChartSpec:
    """Structured chart description; treat instances as immutable values."""

    chart_class: ChartClass
    title: str
    x_label: str | None = None
    y_label: str | None = None
    categories: list = field(default_factory=list)
    series: list[Series] = field(default_factory=list)
    legend: bool = False
    grid: HeatGrid | None = None
    overlay_cell_values: bool = False
    palette_id: int = 0
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "class": self.chart_class.value,
            "title": self.title,
            "x_label": self.x_label,
            "y_label": self.y_label,
            "categories": list(self.categories),
            "series": [s.to_dict() for s in self.series],
            "legend": self.legend,
            "grid": self.grid.to_dict() if self.grid else None,
            "overlay_cell_values": self.overlay_cell_values,
            "palette_id": self.palette_id,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChartSpec":
        return cls(
            chart_class=ChartClass(d["class"]),
            title=d["title"],
            x_label=d.get("x_label"),
            y_label=d.get("y_label"),
            categories=list(d.get("categories", [])),
            series=[Series.from_dict(s) for s in d.get("series", [])],
            legend=bool(d.get("legend", False)),
            grid=HeatGrid.from_dict(d["grid"]) if d.get("grid") else None,
            overlay_cell_values=bool(d.get("overlay_cell_values", False)),
            palette_id=int(d.get("palette_id", 0)),
            seed=int(d.get("seed", 0)),
        )


@dataclass
class GrammarLayers:
    """The seven layered components describing a single plot."""

    data: str
    aesthetics: str
    scale: str
    geometric_object: str
    statistics: str
    facets: str
    coordinate_system: str


class InvalidSpecError(ValueError):
    def __init__(self, violations: list[str]):
        super().__init__("invalid chart spec: " + "; ".join(violations))
        self.violations = violations


def _drawable(text: str) -> bool:
    return all(32 <= ord(ch) <= 126 for ch in text)


def validate(spec: ChartSpec) -> list[str]:
    """Return the list of invariant violations; empty means the spec is valid."""
    v: list[str] = []
    if not isinstance(spec.chart_class, ChartClass):
        v.append(f"class: unknown chart class {spec.chart_class!r}")
        return v
    cls = spec.chart_class

    for label, value in (("title", spec.title), ("x_label", spec.x_label), ("y_label", spec.y_label)):
        if value is not None and not _drawable(value):
            v.append(f"{label}: contains characters outside ASCII 32-126")
    if not spec.title:
        v.append("title: must be non-empty")

    if cls is ChartClass.HEATMAP:
        if spec.grid is None:
            v.append("grid: heatmap requires a grid")
        else:
            g = spec.grid
            if g.rows < 1 or g.cols < 1:
                v.append("grid: rows and cols must be >= 1")
            if len(g.cell_values) != g.rows * g.cols:
                v.append(
                    f"grid: cell_values has {len(g.cell_values)} entries, expected {g.rows * g.cols}"
                )
        if spec.series or spec.categories:
            v.append("heatmap: series and categories must be empty")
    else:
        if spec.grid is not None:
            v.append("grid: only heatmap specs carry a grid")
        if not spec.series:
            v.append("series: at least one series required")
        for s in spec.series:
            if len(s.values) != len(spec.categories):
                v.append(
                    f"series {s.name!r}: series length mismatch "
                    f"({len(s.values)} values for {len(spec.categories)} categories)"
                )
            if any(val < 0 for val in s.values):
                v.append(f"series {s.name!r}: values must be non-negative")
            if not _drawable(s.name):
                v.append(f"series {s.name!r}: name contains non-ASCII characters")

    if cls is ChartClass.PIE:
        if len(spec.series) != 1:
            v.append("pie: exactly one series required")
        elif any(val <= 0 for val in spec.series[0].values):
            v.append("pie: pie values must be positive")
        if spec.x_label is not None or spec.y_label is not None:
            v.append("pie: axis labels must be null")

    for c in spec.categories:
        if isinstance(c, str) and not _drawable(c):
            v.append(f"categories: {c!r} contains non-ASCII characters")

    if spec.legend and not any(s.name for s in spec.series):
        v.append("legend: requires at least one named series")
    return v


def require_valid(spec: ChartSpec) -> ChartSpec:
    violations = validate(spec)
    if violations:
        raise InvalidSpecError(violations)
    return spec


_GEOMETRY = {
    ChartClass.BAR: "bar",
    ChartClass.STACKED_BAR: "bar",
    ChartClass.GROUPED_BAR: "bar",
    ChartClass.SCATTER: "point",
    ChartClass.GROUPED_SCATTER: "point",
    ChartClass.PIE: "wedge",
    ChartClass.HEATMAP: "tile",
}


def layer_view(spec: ChartSpec) -> GrammarLayers:
    """Deterministic seven-layer description of a valid spec."""
    require_valid(spec)
    cls = spec.chart_class
    if cls is ChartClass.HEATMAP:
        data = f"{spec.grid.rows}x{spec.grid.cols} grid of cell values"
        aesthetics = "x: column, y: row, fill: value"
    elif cls is ChartClass.PIE:
        data = f"1 series over {len(spec.categories)} slices"
        aesthetics = "angle: value, label: slice"
    else:
        data = f"{len(spec.series)} series over {len(spec.categories)} categories"
        aesthetics = "x: category, y: value"
    return GrammarLayers(
        data=data,
        aesthetics=aesthetics,
        scale="linear",
        geometric_object=_GEOMETRY[cls],
        statistics="identity",
        facets="none",
        coordinate_system="polar" if cls is ChartClass.PIE else "cartesian",
    )
