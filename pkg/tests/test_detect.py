import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from geofilter.core import PixelPoint
from geofilter.detect import CIRCLE16, detect_fast9


def _segment_test(img, x, y, t):
    """Independent oracle: at least 9 contiguous circle pixels all brighter
    than center+t or all darker than center-t."""
    c = int(img[y, x])
    ring = [int(img[y + dy, x + dx]) for dx, dy in CIRCLE16]
    for mask in ([v > c + t for v in ring], [v < c - t for v in ring]):
        doubled = mask + mask
        run = 0
        for m in doubled:
            run = run + 1 if m else 0
            if run >= 9:
                return True
    return False


class TestDetectFast9:
    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            detect_fast9(np.zeros((5, 5)))
        with pytest.raises(ValueError):
            detect_fast9(np.zeros(10))

    def test_flat_image_has_no_corners(self):
        assert detect_fast9(np.full((32, 32), 128), 20.0) == []

    def test_bright_dot_detected(self):
        img = np.zeros((16, 16), dtype=np.uint8)
        img[8, 8] = 255
        # the center of a dot is darker than nothing; its neighbors see a dark
        # segment — the dot pixel itself sees all 16 ring pixels darker
        pts = detect_fast9(img, 20.0)
        assert PixelPoint(8.0, 8.0) in pts

    def test_corner_of_bright_square(self):
        img = np.zeros((24, 24), dtype=np.uint8)
        img[10:, 10:] = 200
        pts = detect_fast9(img, 20.0)
        assert any(p.dist(PixelPoint(10.0, 10.0)) <= 2.0 for p in pts)
        # no detections deep inside the flat regions
        assert all(not (14 <= p.x <= 20 and 14 <= p.y <= 20) for p in pts)

    def test_border_excluded(self):
        rng = np.random.default_rng(0)
        img = rng.integers(0, 256, size=(20, 20), dtype=np.uint8)
        for p in detect_fast9(img, 10.0):
            assert 3 <= p.x <= 16 and 3 <= p.y <= 16

    def test_sorted_deterministic_output(self):
        rng = np.random.default_rng(1)
        img = rng.integers(0, 256, size=(24, 24), dtype=np.uint8)
        a = detect_fast9(img, 10.0)
        b = detect_fast9(img, 10.0)
        assert a == b
        assert a == sorted(a, key=lambda p: (p.y, p.x))

    @given(arrays(np.uint8, (18, 18),
                  elements=st.integers(min_value=0, max_value=255)))
    @settings(max_examples=40, deadline=None)
    def test_every_detection_passes_the_segment_oracle(self, img):
        t = 15.0
        for p in detect_fast9(img, t):
            assert _segment_test(img.astype(int), int(p.x), int(p.y), t)

    @given(arrays(np.uint8, (18, 18),
                  elements=st.integers(min_value=0, max_value=255)))
    @settings(max_examples=40, deadline=None)
    def test_suppression_never_empties_a_cornered_image(self, img):
        # non-maximal suppression drops weaker neighbors, but the strongest
        # corner always survives: if the oracle finds any corner, so do we
        t = 15.0
        arr = img.astype(int)
        oracle_any = any(_segment_test(arr, x, y, t)
                         for y in range(3, 15) for x in range(3, 15))
        assert bool(detect_fast9(img, t)) == oracle_any
