#!/usr/bin/env python3
"""Regenerates the example projects under fixtures/.

demo/        six explanatory variables, forest -> pasture planted so that soil
             class 1 has W+ = ln 4 exactly, plus a small forest -> agriculture
             transition.
trajectory/  three calibration periods on one landscape; the soil class 1
             weight grows from period to period.
validation/  an observed/simulated pair whose tiled similarity crosses 0.5
             exactly halfway between windows 2 and 3.

Output is deterministic: rerunning rewrites byte-identical files.
"""

import json
import random
from fractions import Fraction
from pathlib import Path

FOREST, PASTURE, AGRICULTURE = 1, 2, 3
LEGEND = [
    {"id": FOREST, "label": "forest"},
    {"id": PASTURE, "label": "pasture"},
    {"id": AGRICULTURE, "label": "agriculture"},
]


def write_grid(path, rows, cellsize=250.0, nodata=-9999):
    nrows, ncols = len(rows), len(rows[0])
    lines = [
        f"ncols {ncols}",
        f"nrows {nrows}",
        "xllcorner 0",
        "yllcorner 0",
        f"cellsize {cellsize:g}",
        f"NODATA_value {nodata}",
    ]
    for row in rows:
        lines.append(" ".join(nodata_or(v, nodata) for v in row))
    path.write_text("\n".join(lines) + "\n")


def nodata_or(v, nodata):
    if v is None:
        return str(nodata)
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def smooth_field(rng, nrows, ncols, lo, hi, passes=3):
    f = [[rng.random() for _ in range(ncols)] for _ in range(nrows)]
    for _ in range(passes):
        g = [[0.0] * ncols for _ in range(nrows)]
        for r in range(nrows):
            for c in range(ncols):
                acc, n = 0.0, 0
                for dr in (-1, 0, 1):
                    for dc in (-1, 0, 1):
                        rr, cc = r + dr, c + dc
                        if 0 <= rr < nrows and 0 <= cc < ncols:
                            acc += f[rr][cc]
                            n += 1
                g[r][c] = acc / n
        f = g
    flat = [v for row in f for v in row]
    mn, mx = min(flat), max(flat)
    return [[round(lo + (v - mn) / (mx - mn) * (hi - lo), 3) for v in row] for row in f]


def dump(path, obj):
    path.write_text(json.dumps(obj, indent=2) + "\n")


def planted_landscape(rng, ncols, forest_rows, pasture_rows, soil1_cells, events_in, events_out, to_agri):
    """t0: pasture strip on top, forest below. Soil class 1 covers the first
    soil1_cells forest cells in row-major order. events_in of those and
    events_out of the others become pasture; to_agri other forest cells become
    agriculture."""
    nrows = pasture_rows + forest_rows
    t0 = [[PASTURE if r < pasture_rows else FOREST for _ in range(ncols)] for r in range(nrows)]
    soil = [[2 + (c // 7 + r // 5) % 3 for c in range(ncols)] for r in range(nrows)]
    forest = [(r, c) for r in range(pasture_rows, nrows) for c in range(ncols)]
    inside, outside = forest[:soil1_cells], forest[soil1_cells:]
    for r, c in inside:
        soil[r][c] = 1
    t1 = [row[:] for row in t0]
    for r, c in rng.sample(inside, events_in):
        t1[r][c] = PASTURE
    rest = rng.sample(outside, events_out + to_agri)
    for r, c in rest[:events_out]:
        t1[r][c] = PASTURE
    for r, c in rest[events_out:]:
        t1[r][c] = AGRICULTURE
    return t0, t1, soil


def demo(root):
    rng = random.Random(2004)
    d = root / "demo"
    d.mkdir(parents=True, exist_ok=True)
    ncols, forest_rows, pasture_rows = 40, 40, 4
    nrows = forest_rows + pasture_rows
    # 1600 forest cells; soil 1 holds 480. Pasture events: 240 inside, 80
    # outside, so n(D) = 320, n(~D) = 1280 and W+ = ln[(240/320)/(240/1280)] = ln 4.
    t0, t1, soil = planted_landscape(rng, ncols, forest_rows, pasture_rows, 480, 240, 80, 40)
    write_grid(d / "landuse_2004.asc", t0)
    write_grid(d / "landuse_2013.asc", t1)
    write_grid(d / "soil_texture.asc", soil)

    roads = [[1 if c == 30 or r == 20 else 0 for c in range(ncols)] for r in range(nrows)]
    rivers = [[1 if c == (r * 3) // 5 + 3 else 0 for c in range(ncols)] for r in range(nrows)]
    write_grid(d / "roads.asc", roads)
    write_grid(d / "rivers.asc", rivers)
    write_grid(d / "slope.asc", smooth_field(rng, nrows, ncols, 0.0, 25.0))
    write_grid(d / "wetness_index.asc", smooth_field(rng, nrows, ncols, 2.0, 18.0))
    write_grid(d / "property_size.asc", smooth_field(rng, nrows, ncols, 5.0, 3000.0, passes=1))
    write_grid(d / "zone.asc", [[1] * ncols for _ in range(nrows)])

    config = {
        "out": "out",
        "legend": LEGEND,
        "periods": [{"name": "2004-2013", "t0": "landuse_2004.asc", "t1": "landuse_2013.asc", "years": 9}],
        "zone": {"path": "zone.asc", "keep": 1},
        "variables": [
            {"name": "dist_roads", "kind": "distance", "path": "roads.asc", "class": 1, "breaks": [500, 1500, 3000]},
            {"name": "property_size", "kind": "continuous", "path": "property_size.asc", "breaks": [100, 500, 1500]},
            {"name": "slope", "kind": "continuous", "path": "slope.asc", "breaks": [5, 10, 20]},
            {"name": "wetness_index", "kind": "continuous", "path": "wetness_index.asc", "breaks": [6, 10, 14]},
            {"name": "soil_texture", "kind": "categorical", "path": "soil_texture.asc"},
            {"name": "dist_rivers", "kind": "distance", "path": "rivers.asc", "class": 1, "breaks": [250, 750, 2000]},
        ],
        "transitions": [
            {
                "from": FOREST,
                "to": PASTURE,
                "expander_fraction": 0.6,
                "expander": {"mean_patch_size": 4, "patch_size_variance": 4, "isometry": 1.5},
                "patcher": {"mean_patch_size": 6, "patch_size_variance": 9, "isometry": 1.5},
            },
            {"from": FOREST, "to": AGRICULTURE, "expander_fraction": 0.3},
        ],
        "prior_mode": "prior-logit",
        "simulation": {"period": "2004-2013", "steps": 1, "seed": 2013},
        "validation": {"windows": [1, 2, 3, 5, 7, 9, 11], "threshold": 0.5, "mode": "sliding"},
    }
    dump(d / "project.json", config)


def trajectory(root):
    rng = random.Random(2007)
    d = root / "trajectory"
    d.mkdir(parents=True, exist_ok=True)
    # 10 x 10 forest under 2 pasture rows; soil 1 covers 30 forest cells and
    # soils 2, 3, 4 hold 6, 35 and 29. Outside soil 1 the pasture events are
    # fixed at 1, 6 and 5 per soil class; inside they grow 3 -> 9 -> 18, so
    # soil 1 has the largest weight amplitude across the periods.
    outside_events = {2: 1, 3: 6, 4: 5}
    plan = {"2004-2007": 3, "2007-2010": 9, "2010-2013": 18}
    periods = []
    for name, inside_events in plan.items():
        t0, _, soil = planted_landscape(rng, 10, 10, 2, 30, 0, 0, 0)
        t1 = [row[:] for row in t0]
        for cls in (1, 2, 3, 4):
            cells = [(r, c) for r in range(2, 12) for c in range(10) if soil[r][c] == cls]
            n = inside_events if cls == 1 else outside_events[cls]
            for r, c in rng.sample(cells, n):
                t1[r][c] = PASTURE
        tag = name.replace("-", "_")
        write_grid(d / f"landuse_{tag}_t0.asc", t0)
        write_grid(d / f"landuse_{tag}_t1.asc", t1)
        periods.append({"name": name, "t0": f"landuse_{tag}_t0.asc", "t1": f"landuse_{tag}_t1.asc", "years": 3})
    write_grid(d / "soil_texture.asc", soil)
    config = {
        "out": "out",
        "legend": LEGEND,
        "periods": periods,
        "variables": [{"name": "soil_texture", "kind": "categorical", "path": "soil_texture.asc"}],
        "transitions": [{"from": FOREST, "to": PASTURE}],
    }
    dump(d / "project.json", config)


def tiled_similarity(obs, sim, w):
    n = len(obs)
    concord = capacity = 0
    for r0 in range(0, n, w):
        for c0 in range(0, n, w):
            ho, hs = {}, {}
            for r in range(r0, min(n, r0 + w)):
                for c in range(c0, min(n, c0 + w)):
                    ho[obs[r][c]] = ho.get(obs[r][c], 0) + 1
                    hs[sim[r][c]] = hs.get(sim[r][c], 0) + 1
                    capacity += 1
            concord += sum(min(v, hs.get(k, 0)) for k, v in ho.items())
    return Fraction(concord, capacity)


def validation(root):
    d = root / "validation"
    d.mkdir(parents=True, exist_ok=True)
    rng = random.Random(1)
    half = Fraction(1, 2)
    # Search for a 6 x 6 pair with s(1) < s(2) < 1/2 <= s(3) and s(2) + s(3) = 1,
    # so linear interpolation puts the crossing at exactly 2.5 windows.
    for _ in range(200000):
        obs = [[rng.choice((1, 2, 3)) for _ in range(6)] for _ in range(6)]
        sim = [[rng.choice((1, 2, 3)) for _ in range(6)] for _ in range(6)]
        s1, s2, s3 = (tiled_similarity(obs, sim, w) for w in (1, 2, 3))
        if s1 < s2 < half <= s3 and s2 + s3 == 1:
            break
    else:
        raise SystemExit("no validation pair found")
    write_grid(d / "observed.asc", obs)
    write_grid(d / "simulated.asc", sim)
    write_grid(d / "t0.asc", obs)
    config = {
        "out": "out",
        "legend": LEGEND,
        "periods": [{"name": "pair", "t0": "t0.asc", "t1": "observed.asc", "years": 1}],
        "transitions": [],
        "validation": {
            "observed": "observed.asc",
            "simulated": "simulated.asc",
            "windows": [1, 2, 3],
            "threshold": 0.5,
            "mode": "tiled",
        },
    }
    dump(d / "project.json", config)
    print(f"validation pair: s(1)={s1} s(2)={s2} s(3)={s3}")


def main():
    root = Path(__file__).resolve().parent.parent / "fixtures"
    demo(root)
    trajectory(root)
    validation(root)


if __name__ == "__main__":
    main()
