import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from gesturebot.errors import (ContourError, NoHandFoundError, OrientationError, PreconditionError,
                               SizeError)
from gesturebot.hand import (FeaturePixel, HandParams, centroid, chamfer_dt, cut_point,
                             extract_hand, feature_mask, feature_pixels, recenter, round_half_away,
                             select_hand, smooth_contour, trace_contour, wrist_cut)
from gesturebot.imaging import boundary_pixels
from oracles import dijkstra_chamfer


def disk(h, w, cx, cy, r):
    yy, xx = np.mgrid[:h, :w]
    return (xx - cx) ** 2 + (yy - cy) ** 2 <= r * r


# --- distance transform

def test_dt_single_pixel_and_full_frame():
    m = np.zeros((5, 5), bool)
    m[2, 2] = True
    assert chamfer_dt(m)[2, 2] == 3
    full = chamfer_dt(np.ones((7, 9), bool))
    assert full[0].tolist() == [3] * 9
    assert full[3, 4] == 12  # four orthogonal steps to the nearest frame edge
    assert np.array_equal(full, full[::-1, ::-1])


@given(arrays(bool, st.tuples(st.integers(1, 14), st.integers(1, 14))))
def test_dt_equals_shortest_path(mask):
    assert np.array_equal(chamfer_dt(mask), dijkstra_chamfer(mask))


def test_round_half_away_from_zero():
    assert [round_half_away(v) for v in (0.5, 1.5, 2.5, -0.5, -2.5, 2.4)] == [1, 2, 3, -1, -3, 2]


# --- feature pixels

def scan_features(dt):
    h, w = dt.shape
    out = np.zeros(dt.shape, bool)
    for y in range(h):
        for x in range(w):
            if dt[y, x] <= 0:
                continue
            out[y, x] = all(dt[y, x] >= dt[y + dy, x + dx]
                            for dy in (-1, 0, 1) for dx in (-1, 0, 1)
                            if (dy or dx) and 0 <= y + dy < h and 0 <= x + dx < w)
    return out


def test_cone_has_single_apex():
    yy, xx = np.mgrid[:11, :11]
    cone = 20 - np.abs(yy - 5) - np.abs(xx - 5)
    feats = feature_pixels(cone)
    assert [(f.x, f.y) for f in feats] == [(5, 5)]
    assert feats[0].value == round_half_away(20 / 3)


def test_plateau_all_qualify():
    dt = np.zeros((5, 5), int)
    dt[1:4, 1:4] = 6
    assert feature_mask(dt).sum() == 9


def test_wide_rectangle_medial_axis_matches_scan():
    m = np.zeros((41, 60), bool)
    m[10:31, 5:55] = True  # 21 pixels tall
    dt = chamfer_dt(m)
    fm = feature_mask(dt)
    assert np.array_equal(fm, scan_features(dt))
    assert fm[20, 15:45].all()  # the centre row is a ridge


@given(arrays(bool, st.tuples(st.integers(2, 16), st.integers(2, 16))))
def test_feature_mask_matches_scan(mask):
    dt = chamfer_dt(mask)
    assert np.array_equal(feature_mask(dt), scan_features(dt))


def test_larger_neighbour_removes_feature():
    dt = np.zeros((5, 5), int)
    dt[2, 2] = 5
    assert feature_mask(dt)[2, 2]
    dt[2, 3] = 6
    assert not feature_mask(dt)[2, 2]


# --- hand selection

def finger_hand(h=120, w=160, cx=50, cy=70):
    m = disk(h, w, cx, cy, 16)
    for dx in (-10, 0, 10):
        m[cy - 45:cy, cx + dx - 4:cx + dx + 4] = True
    return m


def test_single_component_selected():
    m = finger_hand()
    assert np.array_equal(select_hand(m, feature_pixels(chamfer_dt(m))), m)


def test_hand_beats_head_disk():
    hand = finger_hand()
    head = disk(120, 160, 125, 40, 22)
    m = hand | head
    feats = feature_pixels(chamfer_dt(m))
    p = HandParams()
    per_comp = {}
    for f in feats:
        if p.feat_lo <= f.value <= p.feat_hi:
            key = "hand" if hand[f.y, f.x] else "head"
            per_comp[key] = per_comp.get(key, 0) + 1
    assert per_comp["hand"] > per_comp.get("head", 0)
    assert np.array_equal(select_hand(m, feats), hand)


def test_identical_blobs_tie_to_raster_first():
    a = disk(60, 100, 25, 35, 12)
    b = disk(60, 100, 75, 30, 12)
    m = a | b
    assert np.array_equal(select_hand(m, feature_pixels(chamfer_dt(m))), b)  # b starts higher


def test_no_hand_errors():
    with pytest.raises(NoHandFoundError):
        select_hand(np.zeros((10, 10), bool), [])
    thin = np.zeros((10, 10), bool)
    thin[5, 1:9] = True
    with pytest.raises(NoHandFoundError):
        select_hand(thin, feature_pixels(chamfer_dt(thin)))


def test_erosion_separates_touching_blobs():
    a = finger_hand(cx=50)
    b = disk(120, 160, 95, 70, 18)
    bridge = np.zeros_like(a)
    bridge[69:71, 60:80] = True
    m = a | b | bridge
    p = HandParams(erosion_radius=2)
    hand = select_hand(m, feature_pixels(chamfer_dt(m)), p)
    assert hand[70, 50] and not hand[70, 100]
    assert np.all(hand <= m)


# --- centroid, cut, recenter

def test_centroid_examples():
    m = np.zeros((20, 20), bool)
    m[7, 5] = True
    assert centroid(m) == (5.0, 7.0)
    m = np.zeros((20, 20), bool)
    m[9:12, 9:12] = True
    assert centroid(m) == (10.0, 10.0)
    rnd = np.random.default_rng(0).random((15, 17)) < 0.3
    ys, xs = np.nonzero(rnd)
    assert centroid(rnd) == pytest.approx((sum(xs.tolist()) / len(xs), sum(ys.tolist()) / len(ys)))


def test_cut_point_vertical_hand():
    assert cut_point((50, 60), (50, 20), 0.75) == (50, 90)
    bar = np.zeros((130, 100), bool)
    bar[0:121, 45:56] = True
    assert centroid(bar) == (50.0, 60.0)
    out = wrist_cut(bar, HandParams(), [FeaturePixel(50, 20, 5)])
    assert out[:91].sum() == bar[:91].sum() and not out[91:].any()


def test_cut_needs_finger_side_features():
    bar = np.zeros((130, 100), bool)
    bar[0:121, 45:56] = True
    with pytest.raises(OrientationError):
        wrist_cut(bar, HandParams(), [FeaturePixel(50, 60, 5)])
    with pytest.raises(OrientationError):
        wrist_cut(bar, HandParams(), [FeaturePixel(50, 100, 5)])


def test_cut_removes_arm_and_keeps_hand():
    m = finger_hand(h=144, w=176, cx=88, cy=60)
    arm = np.zeros_like(m)
    arm[60:, 80:97] = True
    full = m | arm
    feats = feature_pixels(chamfer_dt(full))
    out = wrist_cut(full, HandParams(), feats)
    cx, cy = centroid(full)
    pts = [(f.x, f.y) for f in feats if 4 <= f.value <= 12 and f.y < cy]
    mx, my = np.mean(pts, axis=0)
    px, py = cut_point((cx, cy), (mx, my), 0.75)
    yy, xx = np.mgrid[:144, :176]
    keep = (xx - px) * (mx - cx) + (yy - py) * (my - cy) >= 0
    assert np.array_equal(out, full & keep)
    assert out[:60].sum() == full[:60].sum()     # fingers and upper palm untouched
    assert not out[140:].any()                   # forearm end gone
    ox, oy = centroid(out)
    assert (ox - px) * (mx - cx) + (oy - py) * (my - cy) > 0


def test_recenter_examples():
    m = np.zeros((176, 176), bool)
    m[80:97, 80:97] = True
    assert np.array_equal(recenter(m, 176), m)
    corner = np.zeros((50, 60), bool)
    corner[0:7, 0:5] = True
    out = recenter(corner, 176)
    cx, cy = centroid(out)
    assert abs(cx - 88) <= 0.5 and abs(cy - 88) <= 0.5
    with pytest.raises(SizeError):
        recenter(np.ones((10, 200), bool), 176)


@given(arrays(bool, st.tuples(st.integers(1, 40), st.integers(1, 40))).filter(lambda m: m.any()))
def test_recenter_is_a_translation(mask):
    out = recenter(mask, 64)
    ys, xs = np.nonzero(mask)
    oys, oxs = np.nonzero(out)
    shift = (oxs.min() - xs.min(), oys.min() - ys.min())
    assert sorted(zip((xs + shift[0]).tolist(), (ys + shift[1]).tolist())) == sorted(zip(oxs.tolist(), oys.tolist()))


# --- contour

def test_trace_rectangle_clockwise():
    m = np.zeros((6, 7), bool)
    m[1:4, 2:6] = True
    pts = trace_contour(m).tolist()
    assert pts[0] == [2, 1]
    assert pts == [[2, 1], [3, 1], [4, 1], [5, 1], [5, 2], [5, 3], [4, 3], [3, 3], [2, 3], [2, 2]]


def test_trace_disk_visits_the_whole_boundary():
    m = disk(40, 40, 20, 19, 11)
    pts = trace_contour(m)
    assert set(map(tuple, pts.tolist())) == {(x, y) for y, x in zip(*np.nonzero(boundary_pixels(m)))}
    steps = np.abs(np.diff(np.vstack([pts, pts[:1]]), axis=0)).max(axis=1)
    assert np.all(steps == 1)


def test_trace_single_pixel_and_empty():
    m = np.zeros((3, 3), bool)
    m[1, 1] = True
    assert trace_contour(m).tolist() == [[1, 1]]
    with pytest.raises(ContourError):
        trace_contour(np.zeros((3, 3), bool))


def test_smooth_short_contour_collapses_to_mean():
    pts = np.array([[0, 0], [2, 0], [2, 2], [0, 2]])
    assert np.array_equal(smooth_contour(pts, 5), np.full((4, 2), 1.0))


@pytest.mark.parametrize("n,w", [(40, 5), (64, 7), (100, 3)])
def test_smooth_circle_shrinks_by_moving_average_factor(n, w):
    r = 25.0
    t = 2 * np.pi * np.arange(n) / n
    pts = np.c_[10 + r * np.cos(t), 20 + r * np.sin(t)]
    out = smooth_contour(pts, w)
    factor = np.sin(w * np.pi / n) / (w * np.sin(np.pi / n))
    assert np.allclose(np.hypot(out[:, 0] - 10, out[:, 1] - 20), r * factor, atol=1e-9)


def test_smooth_square_rounds_corners():
    side = [[x, 0] for x in range(10)] + [[9, y] for y in range(1, 10)] + \
           [[x, 9] for x in range(8, -1, -1)] + [[0, y] for y in range(8, 0, -1)]
    pts = np.array(side, float)
    out = smooth_contour(pts, 5)

    def length(p):
        return np.linalg.norm(np.diff(np.vstack([p, p[:1]]), axis=0), axis=1).sum()

    assert length(out) < length(pts)
    assert not np.allclose(out[9], pts[9])  # the corner moved inward


def test_smooth_rejects_open_and_crossing_contours():
    line = np.array([[x, 0] for x in range(20)], float)
    with pytest.raises(ContourError):
        smooth_contour(line, 5)
    t = 2 * np.pi * (np.arange(40) + 0.5) / 40
    eight = np.c_[20 * np.sin(t), 10 * np.sin(2 * t)]
    with pytest.raises(ContourError):
        smooth_contour(eight, 3)
    with pytest.raises(PreconditionError):
        smooth_contour(line, 4)


def test_extract_hand_end_to_end():
    m = finger_hand(h=144, w=176, cx=88, cy=60)
    m[60:, 80:97] = True
    out, info = extract_hand(m)
    assert out.shape == (176, 176)
    assert out.sum() == info["cut"].sum()
    cx, cy = centroid(out)
    assert abs(cx - 88) <= 0.5 and abs(cy - 88) <= 0.5
