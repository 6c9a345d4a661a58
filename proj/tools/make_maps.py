#!/usr/bin/env python3
"""Regenerate the bundled terrain maps under data/maps (MovingAI octile format).

Every map is a pure function of its seed, so rerunning this script reproduces
the committed files byte for byte.
"""
import argparse
import pathlib
import random

GROUND, TREE, SWAMP, WATER, OBST = ".", "T", "S", "W", "@"


def blank(w, h, fill=GROUND):
    return [[fill] * w for _ in range(h)]


def write(path, grid):
    h, w = len(grid), len(grid[0])
    with open(path, "w", newline="\n") as f:
        f.write(f"type octile\nheight {h}\nwidth {w}\nmap\n")
        for row in grid:
            f.write("".join(row) + "\n")


def blob(grid, rng, cx, cy, radius, terrain, roughness=0.35):
    h, w = len(grid), len(grid[0])
    r2 = radius * radius
    for y in range(max(0, cy - radius - 2), min(h, cy + radius + 3)):
        for x in range(max(0, cx - radius - 2), min(w, cx + radius + 3)):
            d2 = (x - cx) ** 2 + (y - cy) ** 2
            if d2 <= r2 * (1.0 + roughness * (rng.random() - 0.5)):
                grid[y][x] = terrain


def smooth(grid, terrain, passes=2):
    h, w = len(grid), len(grid[0])
    for _ in range(passes):
        out = [row[:] for row in grid]
        for y in range(h):
            for x in range(w):
                n = 0
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        yy, xx = y + dy, x + dx
                        if 0 <= yy < h and 0 <= xx < w and grid[yy][xx] == terrain:
                            n += 1
                if n >= 6:
                    out[y][x] = terrain
                elif n <= 2 and grid[y][x] == terrain:
                    out[y][x] = GROUND
        grid[:] = out


def rim(grid, inner, outer, width=1):
    h, w = len(grid), len(grid[0])
    out = [row[:] for row in grid]
    for y in range(h):
        for x in range(w):
            if grid[y][x] != GROUND:
                continue
            for dy in range(-width, width + 1):
                for dx in range(-width, width + 1):
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and grid[yy][xx] == inner:
                        out[y][x] = outer
    grid[:] = out


def lakeland(seed=7, size=128):
    """Open field with lakes ringed by swamp, forests and rock walls."""
    rng = random.Random(seed)
    g = blank(size, size)
    for _ in range(9):
        blob(g, rng, rng.randrange(10, size - 10), rng.randrange(10, size - 10),
             rng.randrange(5, 12), WATER)
    smooth(g, WATER)
    rim(g, WATER, SWAMP, 2)
    for _ in range(14):
        blob(g, rng, rng.randrange(size), rng.randrange(size), rng.randrange(2, 6), TREE, 0.8)
    for _ in range(10):
        x, y = rng.randrange(size), rng.randrange(size)
        horizontal = rng.random() < 0.5
        length = rng.randrange(8, 30)
        for k in range(length):
            xx, yy = (x + k, y) if horizontal else (x, y + k)
            if 0 <= xx < size and 0 <= yy < size:
                g[yy][xx] = OBST
    for x in range(size):
        g[0][x] = g[size - 1][x] = OBST
    for y in range(size):
        g[y][0] = g[y][size - 1] = OBST
    return g


def village(seed=11, w=60, h=60):
    """Blocks of houses separated by streets, with ponds and marsh patches."""
    rng = random.Random(seed)
    g = blank(w, h)
    for by in range(4, h - 6, 12):
        for bx in range(4, w - 6, 12):
            if rng.random() < 0.45:
                continue
            bw, bh = rng.randrange(3, 6), rng.randrange(3, 6)
            for y in range(by, min(h - 1, by + bh)):
                for x in range(bx, min(w - 1, bx + bw)):
                    g[y][x] = OBST
    for _ in range(5):
        blob(g, rng, rng.randrange(8, w - 8), rng.randrange(8, h - 8), rng.randrange(4, 8), WATER)
    for _ in range(4):
        blob(g, rng, rng.randrange(6, w - 6), rng.randrange(6, h - 6), rng.randrange(3, 6), SWAMP)
    for _ in range(6):
        blob(g, rng, rng.randrange(w), rng.randrange(h), rng.randrange(1, 3), TREE, 0.6)
    for x in range(w):
        g[0][x] = g[h - 1][x] = OBST
    for y in range(h):
        g[y][0] = g[y][w - 1] = OBST
    return g


def walled(w, h):
    g = blank(w, h)
    for x in range(w):
        g[0][x] = g[h - 1][x] = OBST
    for y in range(h):
        g[y][0] = g[y][w - 1] = OBST
    return g


def crafted_maps():
    maps = {}
    maps["open20"] = walled(20, 20)

    g = walled(24, 24)  # ground pocket enclosed by a water moat
    for y in range(6, 18):
        for x in range(6, 18):
            g[y][x] = WATER
    for y in range(9, 15):
        for x in range(9, 15):
            g[y][x] = GROUND
    maps["pocket"] = g

    g = walled(30, 20)  # two rooms joined by a swamp corridor
    for y in range(1, 19):
        g[y][14] = OBST
        g[y][15] = OBST
    for y in range(8, 12):
        g[y][14] = SWAMP
        g[y][15] = SWAMP
    maps["swamp_door"] = g

    g = walled(25, 25)  # forest rows occluding sight
    for y in range(3, 22, 4):
        for x in range(2, 23):
            if x % 6 != 0:
                g[y][x] = TREE
    maps["orchard"] = g

    g = walled(30, 30)  # lake in the middle, shore all around
    rng = random.Random(3)
    blob(g, rng, 15, 15, 9, WATER, 0.2)
    maps["lake"] = g

    g = walled(26, 18)  # maze of walls with gaps
    for x in range(4, 24, 5):
        gap = 2 if (x // 5) % 2 == 0 else 15
        for y in range(1, 17):
            if abs(y - gap) > 1:
                g[y][x] = OBST
    maps["corridors"] = g

    g = walled(22, 22)  # islands of ground in water
    for y in range(1, 21):
        for x in range(1, 21):
            g[y][x] = WATER
    for cx, cy in ((5, 5), (16, 5), (5, 16), (16, 16), (11, 11)):
        for y in range(cy - 2, cy + 3):
            for x in range(cx - 2, cx + 3):
                g[y][x] = GROUND
    maps["islands"] = g

    g = walled(28, 28)  # sealed room that nobody can enter
    for y in range(10, 18):
        for x in range(10, 18):
            g[y][x] = OBST if (x in (10, 17) or y in (10, 17)) else GROUND
    maps["sealed"] = g

    g = walled(32, 20)  # marsh band splitting two ground halves
    for y in range(1, 19):
        for x in range(13, 19):
            g[y][x] = SWAMP if (x + y) % 5 else WATER
    maps["marsh_band"] = g

    g = walled(30, 30)  # mixed terrain
    rng = random.Random(5)
    for _ in range(4):
        blob(g, rng, rng.randrange(5, 25), rng.randrange(5, 25), rng.randrange(2, 5), WATER)
    for _ in range(3):
        blob(g, rng, rng.randrange(5, 25), rng.randrange(5, 25), rng.randrange(2, 4), TREE)
    for _ in range(3):
        blob(g, rng, rng.randrange(5, 25), rng.randrange(5, 25), rng.randrange(2, 4), SWAMP)
    maps["mixed"] = g
    return maps


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data" / "maps"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write(out / "lakeland.map", lakeland())
    write(out / "village60.map", village())
    crafted = out / "crafted"
    crafted.mkdir(exist_ok=True)
    for name, g in crafted_maps().items():
        write(crafted / f"{name}.map", g)


if __name__ == "__main__":
    main()
