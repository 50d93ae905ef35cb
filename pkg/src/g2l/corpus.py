"""Synthetic labeled chart corpus: seeded spec sampling, deterministic
rendering with per-text ground-truth bounding boxes, and corpus generation
with a manifest.

All randomness flows from 64-bit FNV-1a item seeds, so a (config, master
seed) pair always reproduces a byte-identical corpus tree.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from pathlib import Path

from . import raster
from .chart_model import (
    AXIS_CLASSES,
    CLASS_ORDER,
    MULTI_SERIES_CLASSES,
    ChartClass,
    ChartSpec,
    HeatGrid,
    Series,
    require_valid,
)
from .jsonio import read_json, write_json
from .raster import Box, HORIZONTAL, VERTICAL, RasterImage

GENERATOR_VERSION = 1

# canvas geometry (pixels); the semantic heuristics assume these proportions
CANVAS_W, CANVAS_H = 640, 480
PLOT_X0, PLOT_X1 = 80, 560
PLOT_Y0, PLOT_Y1 = 60, 420
TITLE_Y, TITLE_SCALE = 12, 2
YLABEL_X = 16
XLABEL_Y = 448
TICK_Y = 428
LEGEND_X, LEGEND_Y0, LEGEND_PITCH = 445, 80, 14
PIE_CX, PIE_CY, PIE_R, PIE_LABEL_R = 320, 240, 100, 112

BLACK = 0
WHITE = 255

PALETTE = (
    (204, 0, 0),
    (0, 102, 204),
    (0, 153, 0),
    (230, 138, 0),
    (102, 0, 204),
    (0, 153, 153),
    (153, 102, 51),
    (204, 0, 153),
)

# corpus text is uppercase/digits only: those glyphs fill their 5x7 box, so
# recorded ink boxes equal the nominal font metric the tests recompute
TITLE_WORDS = (
    "AVERAGE", "MONTHLY", "RAINFALL", "TOTAL", "SALES", "REVENUE", "GROWTH",
    "ANNUAL", "DAILY", "SCORE", "HEIGHT", "WEIGHT", "SPEED", "ENERGY",
    "VOLUME", "MARKET", "SHARE", "PROFIT", "INDEX", "RATE", "COUNT", "LEVEL",
    "TREND", "OUTPUT", "USAGE", "TRAFFIC", "DEMAND", "SUPPLY", "BUDGET",
    "REGION", "YIELD", "SURVEY", "RESULT", "REPORT", "SUMMARY", "WEEKLY",
)
CATEGORY_WORDS = (
    "JAN", "FEB", "MAR", "APR", "MAY", "JUN", "JUL", "AUG", "SEP", "OCT",
    "NOV", "DEC", "NORTH", "SOUTH", "EAST", "WEST", "Q1", "Q2", "Q3", "Q4",
    "RED", "BLUE", "GOLD", "GRAY",
)
SERIES_NAMES = (
    "ALPHA", "BRAVO", "DELTA", "ECHO", "KILO", "LIMA", "OSCAR", "TANGO",
    "VICTOR", "ZULU",
)
X_LABEL_WORDS = ("MONTH", "REGION", "GROUP", "CLASS", "YEAR", "QUARTER", "CATEGORY")
Y_LABEL_WORDS = ("COUNT", "VALUE", "SCORE", "TOTAL", "RATE", "FREQUENCY", "AMOUNT")

DEFAULT_COUNTS = {
    ChartClass.BAR: 300,
    ChartClass.SCATTER: 300,
    ChartClass.PIE: 200,
    ChartClass.HEATMAP: 200,
    ChartClass.STACKED_BAR: 200,
    ChartClass.GROUPED_BAR: 200,
    ChartClass.GROUPED_SCATTER: 200,
}

ROLE_TITLE = "title"
ROLE_X_LABEL = "x_label"
ROLE_Y_LABEL = "y_label"
ROLE_TICK = "tick_label"
ROLE_LEGEND = "legend_entry"
ROLE_SLICE = "slice_label"
ROLE_CELL = "cell_value"


class CorpusError(RuntimeError):
    pass


def fnv1a64(data: bytes) -> int:
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return h


def item_seed(master_seed: int, chart_class: ChartClass, index: int) -> int:
    return fnv1a64(f"{master_seed}|{chart_class.value}|{index}".encode())


@dataclass
class TextItem:
    text: str
    bbox: Box
    orientation: str
    role: str

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "bbox": self.bbox.to_dict(),
            "orientation": self.orientation,
            "role": self.role,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TextItem":
        return cls(d["text"], Box.from_dict(d["bbox"]), d["orientation"], d["role"])


@dataclass
class GroundTruth:
    chart_class: ChartClass
    title: str
    x_label: str | None
    y_label: str | None
    legend: bool
    legend_entries: list[str]
    categories: list
    series: list[Series]
    text_items: list[TextItem]
    seed: int
    grid: HeatGrid | None = None
    overlay_cell_values: bool = False
    palette_id: int = 0

    def to_dict(self) -> dict:
        return {
            "class": self.chart_class.value,
            "title": self.title,
            "x_label": self.x_label,
            "y_label": self.y_label,
            "legend": self.legend,
            "legend_entries": list(self.legend_entries),
            "categories": list(self.categories),
            "series": [s.to_dict() for s in self.series],
            "text_items": [t.to_dict() for t in self.text_items],
            "seed": self.seed,
            "grid": self.grid.to_dict() if self.grid else None,
            "overlay_cell_values": self.overlay_cell_values,
            "palette_id": self.palette_id,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GroundTruth":
        return cls(
            chart_class=ChartClass(d["class"]),
            title=d["title"],
            x_label=d.get("x_label"),
            y_label=d.get("y_label"),
            legend=bool(d["legend"]),
            legend_entries=list(d.get("legend_entries", [])),
            categories=list(d.get("categories", [])),
            series=[Series.from_dict(s) for s in d.get("series", [])],
            text_items=[TextItem.from_dict(t) for t in d.get("text_items", [])],
            seed=int(d["seed"]),
            grid=HeatGrid.from_dict(d["grid"]) if d.get("grid") else None,
            overlay_cell_values=bool(d.get("overlay_cell_values", False)),
            palette_id=int(d.get("palette_id", 0)),
        )

    def to_spec(self) -> ChartSpec:
        """Reconstruct the ChartSpec this truth was rendered from."""
        return ChartSpec(
            chart_class=self.chart_class,
            title=self.title,
            x_label=self.x_label,
            y_label=self.y_label,
            categories=list(self.categories),
            series=[Series(s.name, list(s.values)) for s in self.series],
            legend=self.legend,
            grid=HeatGrid(self.grid.rows, self.grid.cols, list(self.grid.cell_values))
            if self.grid
            else None,
            overlay_cell_values=self.overlay_cell_values,
            palette_id=self.palette_id,
            seed=self.seed,
        )


# ---------------------------------------------------------------------------
# spec sampling


def sample_spec(chart_class: ChartClass, seed: int) -> ChartSpec:
    """Deterministically sample a valid randomized spec for one chart class."""
    rng = random.Random(seed)
    cls = chart_class

    n_title = rng.randint(2, 4)
    title = " ".join(rng.sample(TITLE_WORDS, n_title))
    if cls is ChartClass.SCATTER and rng.random() < 0.10:
        a, b = rng.sample(TITLE_WORDS, 2)
        title = f"{a} VS {b}"

    x_label = y_label = None
    if cls is not ChartClass.PIE:
        if rng.random() < 0.85:
            x_label = rng.choice(X_LABEL_WORDS)
        if rng.random() < 0.85:
            y_label = rng.choice(Y_LABEL_WORDS)

    categories: list = []
    series: list[Series] = []
    grid = None
    overlay = False

    if cls in (ChartClass.BAR, ChartClass.STACKED_BAR, ChartClass.GROUPED_BAR, ChartClass.PIE):
        k = rng.randint(3, 8)
        categories = rng.sample(CATEGORY_WORDS, k)
    elif cls in (ChartClass.SCATTER, ChartClass.GROUPED_SCATTER):
        k = rng.randint(3, 8)
        stratum = 96.0 / k
        # offsets confined to the middle of each stratum keep tick labels
        # far enough apart that OCR never merges neighbouring ticks
        categories = [int(2 + stratum * (i + 0.3 + 0.4 * rng.random())) for i in range(k)]

    if cls is ChartClass.HEATMAP:
        rows, cols = rng.randint(4, 8), rng.randint(4, 8)
        cells = [round(rng.uniform(1, 100), 1) for _ in range(rows * cols)]
        grid = HeatGrid(rows, cols, cells)
        overlay = rng.random() < 0.5
    else:
        n_series = rng.randint(2, 4) if cls in MULTI_SERIES_CLASSES else 1
        names = rng.sample(SERIES_NAMES, n_series)
        for name in names:
            series.append(
                Series(name, [round(rng.uniform(1, 100), 1) for _ in categories])
            )

    spec = ChartSpec(
        chart_class=cls,
        title=title,
        x_label=x_label,
        y_label=y_label,
        categories=categories,
        series=series,
        legend=cls in MULTI_SERIES_CLASSES,
        grid=grid,
        overlay_cell_values=overlay,
        palette_id=rng.randrange(len(PALETTE)),
        seed=seed,
    )
    return require_valid(spec)


# ---------------------------------------------------------------------------
# rendering


def _series_color(palette_id: int, j: int) -> tuple:
    return PALETTE[(palette_id + j) % len(PALETTE)]


def _ramp_color(palette_id: int, value: float) -> tuple:
    """8-step tint ramp of the palette base color, light enough that black
    cell text stays above the OCR binarization threshold."""
    idx = min(7, max(0, int((value - 1.0) / 99.0 * 8.0)))
    t = 0.08 + idx * (0.47 / 7.0)
    base = PALETTE[palette_id % len(PALETTE)]
    return tuple(int(round(255 - t * (255 - c))) for c in base)


class _Recorder:
    def __init__(self, img: RasterImage):
        self.img = img
        self.items: list[TextItem] = []

    def text(self, x, y, s, scale, orientation, role, color=BLACK):
        box = raster.draw_text(self.img, int(x), int(y), s, scale, orientation, color)
        self.items.append(TextItem(s, box, orientation, role))
        return box


def render(spec: ChartSpec) -> tuple[RasterImage, GroundTruth]:
    """Render a valid spec to a 640x480 RGB image plus its ground truth."""
    require_valid(spec)
    img = raster.create_image(CANVAS_W, CANVAS_H, 3, WHITE)
    rec = _Recorder(img)
    cls = spec.chart_class

    if cls in AXIS_CLASSES:
        raster.draw_line(img, PLOT_X0, PLOT_Y1, PLOT_X1, PLOT_Y1, BLACK)
        raster.draw_line(img, PLOT_X0, PLOT_Y0, PLOT_X0, PLOT_Y1, BLACK)

    if cls in (ChartClass.BAR, ChartClass.STACKED_BAR, ChartClass.GROUPED_BAR):
        _render_bars(img, spec)
    elif cls in (ChartClass.SCATTER, ChartClass.GROUPED_SCATTER):
        _render_scatter(img, spec)
    elif cls is ChartClass.PIE:
        _render_pie(img, rec, spec)
    else:
        _render_heatmap(img, rec, spec)

    if spec.legend:
        _render_legend(img, rec, spec)

    if cls in AXIS_CLASSES:
        _render_ticks(rec, spec)

    # text layers last so nothing paints over recorded ink
    tw, _ = raster.text_extent(spec.title, TITLE_SCALE)
    rec.text((CANVAS_W - tw) // 2, TITLE_Y, spec.title, TITLE_SCALE, HORIZONTAL, ROLE_TITLE)
    if spec.x_label:
        w, _ = raster.text_extent(spec.x_label, 1)
        rec.text((CANVAS_W - w) // 2, XLABEL_Y, spec.x_label, 1, HORIZONTAL, ROLE_X_LABEL)
    if spec.y_label:
        _, h = raster.text_extent(spec.y_label, 1, VERTICAL)
        rec.text(YLABEL_X, PLOT_Y0 + (PLOT_Y1 - PLOT_Y0 - h) // 2, spec.y_label, 1, VERTICAL, ROLE_Y_LABEL)

    gt = GroundTruth(
        chart_class=cls,
        title=spec.title,
        x_label=spec.x_label,
        y_label=spec.y_label,
        legend=spec.legend,
        legend_entries=[s.name for s in spec.series] if spec.legend else [],
        categories=list(spec.categories),
        series=[Series(s.name, list(s.values)) for s in spec.series],
        text_items=rec.items,
        seed=spec.seed,
        grid=spec.grid,
        overlay_cell_values=spec.overlay_cell_values,
        palette_id=spec.palette_id,
    )
    return img, gt


def _category_center(spec: ChartSpec, i: int) -> float:
    if spec.chart_class in (ChartClass.SCATTER, ChartClass.GROUPED_SCATTER):
        return PLOT_X0 + float(spec.categories[i]) / 100.0 * (PLOT_X1 - PLOT_X0)
    slot = (PLOT_X1 - PLOT_X0) / len(spec.categories)
    return PLOT_X0 + (i + 0.5) * slot


def _render_ticks(rec: _Recorder, spec: ChartSpec):
    for i, cat in enumerate(spec.categories):
        label = str(cat)
        w, _ = raster.text_extent(label, 1)
        cx = _category_center(spec, i)
        rec.text(int(round(cx - w / 2)), TICK_Y, label, 1, HORIZONTAL, ROLE_TICK)


def _render_bars(img: RasterImage, spec: ChartSpec):
    k = len(spec.categories)
    slot = (PLOT_X1 - PLOT_X0) / k
    if spec.chart_class is ChartClass.STACKED_BAR:
        vmax = max(sum(s.values[i] for s in spec.series) for i in range(k))
    else:
        vmax = max(max(s.values) for s in spec.series)
    px_per_unit = 350.0 / vmax

    for i in range(k):
        x_lo = PLOT_X0 + i * slot
        if spec.chart_class is ChartClass.GROUPED_BAR:
            m = len(spec.series)
            sub = slot * 0.8 / m
            for j, s in enumerate(spec.series):
                x0 = int(round(x_lo + slot * 0.1 + j * sub))
                x1 = int(round(x_lo + slot * 0.1 + (j + 1) * sub)) - 2
                top = int(round(PLOT_Y1 - s.values[i] * px_per_unit))
                raster.draw_rect(img, x0, top, max(x0, x1), PLOT_Y1 - 1, _series_color(spec.palette_id, j))
        elif spec.chart_class is ChartClass.STACKED_BAR:
            x0 = int(round(x_lo + slot * 0.2))
            x1 = int(round(x_lo + slot * 0.8)) - 1
            cum = 0.0
            for j, s in enumerate(spec.series):
                y1 = int(round(PLOT_Y1 - cum * px_per_unit)) - 1
                cum += s.values[i]
                y0 = int(round(PLOT_Y1 - cum * px_per_unit))
                raster.draw_rect(img, x0, y0, x1, y1, _series_color(spec.palette_id, j))
        else:
            x0 = int(round(x_lo + slot * 0.2))
            x1 = int(round(x_lo + slot * 0.8)) - 1
            top = int(round(PLOT_Y1 - spec.series[0].values[i] * px_per_unit))
            raster.draw_rect(img, x0, top, x1, PLOT_Y1 - 1, _series_color(spec.palette_id, 0))


def _render_scatter(img: RasterImage, spec: ChartSpec):
    vmax = max(max(s.values) for s in spec.series)
    px_per_unit = 350.0 / vmax
    for j, s in enumerate(spec.series):
        color = _series_color(spec.palette_id, j)
        for i, v in enumerate(s.values):
            cx = int(round(_category_center(spec, i)))
            cy = int(round(PLOT_Y1 - v * px_per_unit))
            raster.draw_disc(img, cx, cy, 3, color)


def _render_pie(img: RasterImage, rec: _Recorder, spec: ChartSpec):
    values = spec.series[0].values
    total = sum(values)
    bounds = [0.0]
    for v in values:
        bounds.append(bounds[-1] + v / total)

    labels = []
    for i, cat in enumerate(spec.categories):
        f0, f1 = bounds[i], bounds[i + 1]
        a0 = 90.0 - f1 * 360.0
        a1 = 90.0 - f0 * 360.0
        raster.draw_wedge(img, PIE_CX, PIE_CY, PIE_R, a0, a1, _series_color(spec.palette_id, i))
        mid = math.radians(90.0 - (f0 + f1) / 2.0 * 360.0)
        c, s = math.cos(mid), math.sin(mid)
        lx = PIE_CX + PIE_LABEL_R * c
        ly = PIE_CY - PIE_LABEL_R * s
        w, h = raster.text_extent(str(cat), 1)
        ax = lx if c > 0.3 else lx - w if c < -0.3 else lx - w / 2
        ay = ly - h if s > 0.3 else ly if s < -0.3 else ly - h / 2
        labels.append([int(round(ax)), int(round(ay)), str(cat), c >= 0])

    # nudge same-side labels apart so thin neighbouring slices stay legible
    for side in (True, False):
        group = sorted((l for l in labels if l[3] == side), key=lambda l: (l[1], l[0]))
        for prev, cur in zip(group, group[1:]):
            if cur[1] < prev[1] + 8:
                cur[1] = prev[1] + 8
    for ax, ay, text, _ in labels:
        rec.text(ax, ay, text, 1, HORIZONTAL, ROLE_SLICE)


def _render_heatmap(img: RasterImage, rec: _Recorder, spec: ChartSpec):
    g = spec.grid
    tile_w = (PLOT_X1 - PLOT_X0) / g.cols
    tile_h = (PLOT_Y1 - PLOT_Y0) / g.rows
    for r in range(g.rows):
        for c in range(g.cols):
            v = g.cell_values[r * g.cols + c]
            x0 = PLOT_X0 + int(round(c * tile_w))
            x1 = PLOT_X0 + int(round((c + 1) * tile_w)) - 1
            y0 = PLOT_Y0 + int(round(r * tile_h))
            y1 = PLOT_Y0 + int(round((r + 1) * tile_h)) - 1
            raster.draw_rect(img, x0, y0, x1, y1, _ramp_color(spec.palette_id, v))
            if spec.overlay_cell_values:
                text = str(int(round(v)))
                w, h = raster.text_extent(text, 1)
                rec.text(
                    (x0 + x1 + 1 - w) // 2,
                    (y0 + y1 + 1 - h) // 2,
                    text,
                    1,
                    HORIZONTAL,
                    ROLE_CELL,
                )


def _render_legend(img: RasterImage, rec: _Recorder, spec: ChartSpec):
    names = [s.name for s in spec.series]
    widths = [raster.text_extent(n, 1)[0] for n in names]
    card_x1 = LEGEND_X + 13 + max(widths) + 6
    card_y1 = LEGEND_Y0 + (len(names) - 1) * LEGEND_PITCH + 7 + 5
    raster.draw_rect(img, LEGEND_X - 6, LEGEND_Y0 - 6, card_x1, card_y1, WHITE)
    for i, name in enumerate(names):
        y = LEGEND_Y0 + i * LEGEND_PITCH
        raster.draw_rect(img, LEGEND_X, y - 1, LEGEND_X + 8, y + 7, _series_color(spec.palette_id, i))
        rec.text(LEGEND_X + 13, y, name, 1, HORIZONTAL, ROLE_LEGEND)


# ---------------------------------------------------------------------------
# corpus generation


@dataclass
class CorpusItem:
    image: str
    truth: str
    chart_class: ChartClass
    seed: int

    def to_dict(self) -> dict:
        return {
            "image": self.image,
            "truth": self.truth,
            "class": self.chart_class.value,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CorpusItem":
        return cls(d["image"], d["truth"], ChartClass(d["class"]), int(d["seed"]))


@dataclass
class CorpusManifest:
    items: list[CorpusItem]
    counts: dict[str, int]
    master_seed: int
    version: int = GENERATOR_VERSION
    root: Path = field(default_factory=Path, compare=False)

    def to_dict(self) -> dict:
        return {
            "format": "g2l-corpus",
            "version": self.version,
            "master_seed": self.master_seed,
            "counts": dict(sorted(self.counts.items())),
            "items": [item.to_dict() for item in self.items],
        }

    def image_path(self, item: CorpusItem) -> Path:
        return self.root / item.image

    def truth_path(self, item: CorpusItem) -> Path:
        return self.root / item.truth

    def save(self, path) -> None:
        write_json(path, self.to_dict())

    @classmethod
    def load(cls, path) -> "CorpusManifest":
        path = Path(path)
        d = read_json(path)
        if d.get("format") != "g2l-corpus":
            raise CorpusError(f"{path} is not a corpus manifest")
        m = cls(
            items=[CorpusItem.from_dict(i) for i in d["items"]],
            counts={k: int(v) for k, v in d["counts"].items()},
            master_seed=int(d["master_seed"]),
            version=int(d["version"]),
            root=path.parent,
        )
        hist: dict[str, int] = {}
        for item in m.items:
            hist[item.chart_class.value] = hist.get(item.chart_class.value, 0) + 1
        if hist != {k: v for k, v in m.counts.items() if v}:
            raise CorpusError("manifest counts do not match its item histogram")
        return m


def generate_corpus(counts: dict[ChartClass, int], master_seed: int, out_dir) -> CorpusManifest:
    """Render one labeled (image, truth) pair per requested item.

    Images land in out_dir/images, sidecars in out_dir/truth, and the
    manifest in out_dir/manifest.json. Aborts with a partial-output report
    if any write fails.
    """
    out = Path(out_dir)
    items: list[CorpusItem] = []
    total = sum(counts.get(c, 0) for c in CLASS_ORDER)
    if total:
        (out / "images").mkdir(parents=True, exist_ok=True)
        (out / "truth").mkdir(parents=True, exist_ok=True)
    else:
        out.mkdir(parents=True, exist_ok=True)

    written = 0
    try:
        for cls in CLASS_ORDER:
            for i in range(counts.get(cls, 0)):
                seed = item_seed(master_seed, cls, i)
                spec = sample_spec(cls, seed)
                img, gt = render(spec)
                image_rel = f"images/{cls.value}_{i:04d}.png"
                truth_rel = f"truth/{cls.value}_{i:04d}.json"
                raster.write_image(img, out / image_rel)
                write_json(out / truth_rel, gt.to_dict())
                items.append(CorpusItem(image_rel, truth_rel, cls, seed))
                written += 1
    except OSError as e:
        raise CorpusError(
            f"corpus generation aborted after {written} of {total} items: {e}"
        ) from e

    manifest = CorpusManifest(
        items=items,
        counts={cls.value: counts.get(cls, 0) for cls in CLASS_ORDER if counts.get(cls, 0)},
        master_seed=master_seed,
        root=out,
    )
    manifest.save(out / "manifest.json")
    return manifest


def load_truth(path) -> GroundTruth:
    return GroundTruth.from_dict(read_json(path))
