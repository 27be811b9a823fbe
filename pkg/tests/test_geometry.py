from hypothesis import given
from hypothesis import strategies as st

from tracelayout.geometry import DIRECTION_VECTORS, Rect, Slice, boxes_disjoint, round_coord

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)
sizes = st.floats(min_value=0.0, max_value=1e4, allow_nan=False, allow_infinity=False)


def test_direction_vectors_are_unit_axes():
    assert DIRECTION_VECTORS["N"] == (0.0, -1.0)
    assert DIRECTION_VECTORS["S"] == (0.0, 1.0)
    assert DIRECTION_VECTORS["E"] == (1.0, 0.0)
    assert DIRECTION_VECTORS["W"] == (-1.0, 0.0)


def test_rect_accessors():
    r = Rect(10, 20, 30, 40)
    assert r.x2 == 40
    assert r.y2 == 60
    assert r.center == (25, 40)
    assert r.contains(10, 20)
    assert r.contains(40, 60)
    assert not r.contains(41, 20)


def test_rect_inset_clamps_to_zero():
    r = Rect(0, 0, 10, 10).inset(2)
    assert (r.x, r.y, r.width, r.height) == (2, 2, 6, 6)
    collapsed = Rect(0, 0, 10, 10).inset(50)
    assert collapsed.width == 0.0
    assert collapsed.height == 0.0


def test_slice_contains_clockwise_from_noon():
    top_right = Slice(0, 0, 10, 0, 90)
    assert top_right.contains(0, -5)  # 12 o'clock
    assert top_right.contains(5, 0)  # 3 o'clock
    assert not top_right.contains(0, 5)  # 6 o'clock
    assert not top_right.contains(-5, 0)  # 9 o'clock
    assert not top_right.contains(0, -11)  # beyond the radius


def test_slice_contains_wraps_past_noon():
    around = Slice(0, 0, 10, 315, 405)
    assert around.contains(0, -5)
    assert around.contains(3, -3)
    assert around.contains(-3, -3)
    assert not around.contains(5, 0)


def test_boxes_disjoint_examples():
    assert boxes_disjoint(0, 0, 10, 10, 20, 0, 10, 10)
    assert not boxes_disjoint(0, 0, 10, 10, 9, 0, 10, 10)
    assert boxes_disjoint(0, 0, 10, 10, 10, 0, 10, 10)  # touching counts as disjoint
    assert not boxes_disjoint(0, 0, 10, 10, 12, 0, 10, 10, gap=4)


@given(ax=finite, ay=finite, bx=finite, by=finite, aw=sizes, ah=sizes, bw=sizes, bh=sizes)
def test_boxes_disjoint_symmetric(ax, ay, bx, by, aw, ah, bw, bh):
    assert boxes_disjoint(ax, ay, aw, ah, bx, by, bw, bh) == boxes_disjoint(
        bx, by, bw, bh, ax, ay, aw, ah
    )


def test_round_coord():
    assert round_coord(1.004) == 1.0
    assert round_coord(1.006) == 1.01
    assert round_coord(-0.0001) == 0.0
    assert str(round_coord(-0.0001)) == "0.0"  # negative zero is normalized
    assert round_coord(597.3333333) == 597.33
