"""Slow, obviously-correct reference implementations shared by the tests."""
import heapq
import math

import numpy as np


def dijkstra_chamfer(mask):
    """Weighted shortest path (3 orthogonal, 4 diagonal) from any background
    pixel, with the ring outside the frame counted as background."""
    h, w = mask.shape
    inf = math.inf
    dist = [[inf] * (w + 2) for _ in range(h + 2)]
    heap = []
    for y in range(h + 2):
        for x in range(w + 2):
            if y in (0, h + 1) or x in (0, w + 1) or not mask[y - 1, x - 1]:
                dist[y][x] = 0
                heap.append((0, y, x))
    heapq.heapify(heap)
    steps = [(dy, dx, 3 if dy == 0 or dx == 0 else 4)
             for dy in (-1, 0, 1) for dx in (-1, 0, 1) if dy or dx]
    while heap:
        d, y, x = heapq.heappop(heap)
        if d > dist[y][x]:
            continue
        for dy, dx, c in steps:
            ny, nx = y + dy, x + dx
            if 0 <= ny < h + 2 and 0 <= nx < w + 2 and d + c < dist[ny][nx]:
                dist[ny][nx] = d + c
                heapq.heappush(heap, (d + c, ny, nx))
    return np.array(dist, dtype=np.int64)[1:-1, 1:-1]


_TRACKS = {}


def tracked_corpus(n_variants=10):
    """(kind, archetype, seed, records, true path) for every dynamic corpus sequence.

    Tracking the whole corpus takes minutes, so the result is shared between
    the gate criterion and the tracking-accuracy property.
    """
    from gesturebot import optical_flow, synth
    if n_variants not in _TRACKS:
        out = []
        for kind in ("small", "large"):
            for a in range(len(synth.KIND_NAMES[kind])):
                for seed in range(n_variants):
                    frames, _, path = synth.gen_sequence(synth.SynthSpec(kind, a, seed=seed))
                    out.append((kind, a, seed, optical_flow.track(frames), path))
        _TRACKS[n_variants] = out
    return _TRACKS[n_variants]
