#!/usr/bin/env python3
"""Regenerates the example maps and scenarios under scenarios/.

Maps are binary PGM at 0.05 m per cell; 0 = wall, 255 = free.
Run from anywhere: python3 tools/make_scenarios.py
"""

import json
import math
import pathlib

RES = 0.05
ROOT = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


class Map:
    def __init__(self, width_m, height_m):
        self.w = round(width_m / RES)
        self.h = round(height_m / RES)
        self.wall = [[False] * self.w for _ in range(self.h)]  # [y][x], y north

    def rect(self, x0, y0, x1, y1):
        """Fills the cells whose centers lie in [x0, x1] x [y0, y1] (metres)."""
        for cy in range(self.h):
            for cx in range(self.w):
                px, py = (cx + 0.5) * RES, (cy + 0.5) * RES
                if x0 <= px <= x1 and y0 <= py <= y1:
                    self.wall[cy][cx] = True

    def border(self, thickness=0.1):
        wm, hm = self.w * RES, self.h * RES
        self.rect(0, 0, wm, thickness)
        self.rect(0, hm - thickness, wm, hm)
        self.rect(0, 0, thickness, hm)
        self.rect(wm - thickness, 0, wm, hm)

    def ring(self, cx, cy, r_in, r_out):
        for y in range(self.h):
            for x in range(self.w):
                d = math.hypot((x + 0.5) * RES - cx, (y + 0.5) * RES - cy)
                if r_in <= d <= r_out:
                    self.wall[y][x] = True

    def save(self, name):
        rows = []
        for y in reversed(range(self.h)):  # image row 0 is the northern edge
            rows.append(bytes(0 if self.wall[y][x] else 255 for x in range(self.w)))
        header = f"P5\n{self.w} {self.h}\n255\n".encode()
        (ROOT / "maps" / name).write_bytes(header + b"".join(rows))


def scenario(name, doc):
    (ROOT / name).write_text(json.dumps(doc, indent=2) + "\n")


def main():
    (ROOT / "maps").mkdir(parents=True, exist_ok=True)

    # Open floor, no walls.
    Map(6, 4).save("open.pgm")
    scenario("straight.json", {
        "name": "straight",
        "ground_truth_map": "maps/open.pgm",
        "provided_map": "maps/open.pgm",
        "start": {"x": 1.0, "y": 2.0, "theta": 0.0},
        "goal": {"x": 4.0, "y": 2.0},
        "seed": 1,
    })

    # A long wall with a 0.75 m gap near its left end; the only other way
    # round is past the far right end.
    gap = Map(10, 6)
    gap.rect(0, 2.9, 2.0, 3.1)
    gap.rect(2.75, 2.9, 8.0, 3.1)
    gap.save("gap.pgm")
    scenario("gap.json", {
        "name": "gap",
        "ground_truth_map": "maps/gap.pgm",
        "provided_map": "maps/gap.pgm",
        "start": {"x": 2.375, "y": 1.5, "theta": 1.5707963267948966},
        "goal": {"x": 2.375, "y": 4.5},
        "config": {"safety_distance": 0.05},
        "seed": 1,
    })

    # Two staggered wall segments across the direct line; the robot only
    # gets an empty map and must discover them.
    explore = Map(8, 6)
    explore.border()
    explore.rect(2.9, 1.8, 3.1, 4.2)
    explore.rect(4.9, 2.0, 5.1, 6.0)
    explore.save("exploration.pgm")
    scenario("exploration.json", {
        "name": "exploration",
        "ground_truth_map": "maps/exploration.pgm",
        "provided_map": "empty",
        "start": {"x": 1.0, "y": 3.0, "theta": 0.0},
        "goal": {"x": 7.0, "y": 3.0},
        "seed": 1,
    })

    # Plain room crossed diagonally while two walkers wander about.
    room = Map(10, 8)
    room.border()
    room.save("room.pgm")
    scenario("dynamic.json", {
        "name": "dynamic",
        "ground_truth_map": "maps/room.pgm",
        "provided_map": "maps/room.pgm",
        "start": {"x": 8.5, "y": 6.5, "theta": -2.5},
        "goal": {"x": 1.5, "y": 1.5},
        "entities": [
            {"x": 4.0, "y": 5.0, "theta": 0.0, "radius": 0.25, "speed": 0.2},
            {"x": 6.0, "y": 3.0, "theta": 3.14, "radius": 0.25, "speed": 0.2},
        ],
        "seed": 1,
    })

    # Goal sealed inside a ring the robot does not know about.
    ring = Map(10, 8)
    ring.border()
    ring.ring(7.0, 4.0, 1.2, 1.3)
    ring.save("ring.pgm")
    scenario("ring.json", {
        "name": "ring",
        "ground_truth_map": "maps/ring.pgm",
        "provided_map": "empty",
        "start": {"x": 1.5, "y": 4.0, "theta": 0.0},
        "goal": {"x": 7.0, "y": 4.0},
        "config": {"timeout": 120.0},
        "seed": 1,
    })


if __name__ == "__main__":
    main()
