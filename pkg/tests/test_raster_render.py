import csv
import io
import math

import numpy as np
import pytest

from conftest import PUBLISHED_RAYS
from tgs.errors import BadBox, InputError, IoFailure
from tgs.gersgorin import Disk, DiskSet, bounding_box, gersgorin, point_anchored_set
from tgs.minimal import RayHit, ray_boundary
from tgs.raster import (
    BAND,
    INSIDE,
    INTERSECTION,
    OUTSIDE,
    UNION,
    RasterGrid,
    default_threads,
    extract_contours,
    raster_disk_sets,
    raster_membership,
)
from tgs.render import Layer, PlotSpec, emit_csv, emit_svg

UNIT = DiskSet((Disk(0, 1),))


@pytest.fixture(scope="module")
def hits(fixture_tensor):
    return [ray_boundary(fixture_tensor, *r) for r, _ in PUBLISHED_RAYS]


@pytest.fixture(scope="module")
def coarse(fixture_tensor):
    return raster_membership(fixture_tensor, bounding_box(gersgorin(fixture_tensor), 0.1), 64, 64)


class TestRasterMembership:
    def test_center_inside_corner_outside(self, coarse):
        zs = coarse.nodes()
        p, q = np.unravel_index(np.argmin(np.abs(zs - 2)), zs.shape)
        assert abs(zs[p, q] - 2) < 0.1 and coarse.cells[p, q] == INSIDE
        assert abs(coarse.node(63, 63) - (4.6 + 3.6j)) < 1e-12
        assert coarse.cells[63, 63] == OUTSIDE

    def test_node_layout(self):
        g = raster_disk_sets([UNIT], UNION, (-1, 3, 0, 2), 5, 3)
        assert g.node(0, 0) == complex(-1, 0)
        assert g.node(4, 2) == complex(3, 2)
        assert g.node(1, 1) == complex(0, 1)
        assert g.cells.shape == (5, 3)

    def test_diagonal_tensor(self, diag21):
        g = raster_membership(diag21, (0, 3, -1, 1), 4, 3)
        for p in range(4):
            for q in range(3):
                z = g.node(p, q)
                if z in (1, 2):
                    assert g.cells[p, q] in (INSIDE, BAND)
                else:
                    assert g.cells[p, q] == OUTSIDE

    def test_box_outside_gamma(self, fixture_tensor):
        g = raster_membership(fixture_tensor, (10, 11, 10, 11), 2, 2)
        assert g.counts() == {"inside": 0, "outside": 4, "band": 0}

    @pytest.mark.parametrize("box", [(1, 1, 0, 1), (0, 1, 2, -2), (0, 1, 0), (0, math.inf, 0, 1)])
    def test_bad_box(self, fixture_tensor, box):
        with pytest.raises(BadBox):
            raster_membership(fixture_tensor, box, 4, 4)

    def test_too_few_nodes(self, fixture_tensor):
        with pytest.raises(InputError):
            raster_membership(fixture_tensor, (0, 1, 0, 1), 1, 4)

    def test_thread_count_does_not_change_cells(self, fixture_tensor):
        box = (-2, 4, -3, 3)
        a = raster_membership(fixture_tensor, box, 96, 96, threads=1)
        b = raster_membership(fixture_tensor, box, 96, 96, threads=4)
        np.testing.assert_array_equal(a.cells, b.cells)
        np.testing.assert_array_equal(a.v_lower, b.v_lower)

    def test_env_threads(self, monkeypatch):
        monkeypatch.setenv("TGS_THREADS", "3")
        assert default_threads() == 3
        monkeypatch.setenv("TGS_THREADS", "many")
        with pytest.raises(InputError):
            default_threads()

    def test_inside_implies_gamma(self, fixture_tensor, coarse):
        G = raster_disk_sets([gersgorin(fixture_tensor)], UNION, coarse.box, 64, 64)
        assert np.all(G.cells[coarse.cells == INSIDE] == INSIDE)


class TestRasterDiskSets:
    def test_intersection_at_two(self, fixture_tensor, hits):
        sets = [point_anchored_set(fixture_tensor, h.w) for h in hits]
        g = raster_disk_sets(sets, INTERSECTION, (1, 3, -1, 1), 3, 3)
        assert g.node(1, 1) == 2 and g.cells[1, 1] == INSIDE

    def test_unit_disk_closed(self):
        g = raster_disk_sets([UNIT], UNION, (0, 2, 0, 1), 3, 2)
        assert g.cells[2, 0] == OUTSIDE
        assert g.cells[1, 0] == INSIDE

    def test_union_vs_intersection(self):
        other = DiskSet((Disk(1.5, 1),))
        box = (-1, 2.5, 0, 1)
        u = raster_disk_sets([UNIT, other], UNION, box, 8, 3)
        i = raster_disk_sets([UNIT, other], INTERSECTION, box, 8, 3)
        assert np.all(i.cells <= u.cells)
        assert np.sum(i.cells) < np.sum(u.cells)

    def test_rejects(self):
        with pytest.raises(InputError):
            raster_disk_sets([], UNION, (0, 1, 0, 1), 2, 2)
        with pytest.raises(InputError):
            raster_disk_sets([UNIT], "xor", (0, 1, 0, 1), 2, 2)
        with pytest.raises(BadBox):
            raster_disk_sets([UNIT], UNION, (0, 0, 0, 1), 2, 2)

    def test_intersection_monotone(self, fixture_tensor, hits):
        box = bounding_box(gersgorin(fixture_tensor), 0.1)
        sets = [gersgorin(fixture_tensor)]
        prev = raster_disk_sets(sets, INTERSECTION, box, 80, 80).cells
        for h in hits:
            sets.append(point_anchored_set(fixture_tensor, h.w))
            cur = raster_disk_sets(sets, INTERSECTION, box, 80, 80).cells
            assert not np.any((prev == OUTSIDE) & (cur == INSIDE))
            prev = cur


class TestContours:
    def test_all_inside(self):
        g = RasterGrid((0, 1, 0, 1), 4, 4, np.full((4, 4), INSIDE, dtype=np.int8))
        assert extract_contours(g) == []

    def test_band_counts_as_inside(self):
        g = RasterGrid((0, 1, 0, 1), 4, 4, np.full((4, 4), BAND, dtype=np.int8))
        assert extract_contours(g) == []

    @pytest.mark.parametrize("n", [40, 101])
    def test_disk_fidelity(self, n):
        box = (-2, 2, -2, 2)
        g = raster_disk_sets([UNIT], UNION, box, n, n)
        polys = extract_contours(g)
        assert len(polys) == 1
        poly = polys[0]
        assert poly[0] == poly[-1]
        diag = math.hypot(4 / (n - 1), 4 / (n - 1))
        assert np.max(np.abs(np.abs(poly) - 1)) <= 2 * diag

    def test_half_plane(self):
        cells = np.zeros((10, 6), dtype=np.int8)
        cells[:5] = INSIDE
        g = RasterGrid((0, 9, 0, 5), 10, 6, cells)
        polys = extract_contours(g)
        assert len(polys) == 1
        p = polys[0]
        assert p[0] != p[-1]
        assert {p[0].imag, p[-1].imag} == {0.0, 5.0}
        np.testing.assert_allclose(p.real, 4.5)


def fixture_spec(fixture_tensor, hits, grid):
    return PlotSpec([
        Layer(gersgorin(fixture_tensor), stroke="#1f3b99", label="Gamma"),
        Layer(grid, stroke="#b00020", label="intersection"),
        Layer([h.w for h in hits], stroke="#000000", label="anchors"),
    ], title="test")


class TestSvg:
    def test_one_disk(self):
        svg = emit_svg(PlotSpec([Layer(UNIT)]))
        assert svg.count("<circle") == 1
        assert svg.startswith("<?xml") and svg.rstrip().endswith("</svg>")

    def test_full_composition(self, fixture_tensor, hits):
        box = bounding_box(gersgorin(fixture_tensor), 0.1)
        sets = [point_anchored_set(fixture_tensor, h.w) for h in hits]
        grid = raster_disk_sets(sets, INTERSECTION, box, 128, 128)
        svg = emit_svg(fixture_spec(fixture_tensor, hits, grid))
        assert svg.count("<circle") == 3
        assert svg.count('class="contour"') >= 1
        assert svg.count('class="marker"') == 6
        assert 'class="tick' in svg or "<text" in svg

    def test_band_cells_drawn(self):
        cells = np.full((3, 3), OUTSIDE, dtype=np.int8)
        cells[1, 1] = BAND
        svg = emit_svg(PlotSpec([Layer(RasterGrid((0, 2, 0, 2), 3, 3, cells))], band_color="#abcdef"))
        assert 'fill="#abcdef"' in svg and svg.count("<rect") == 2

    def test_deterministic(self, fixture_tensor, hits, coarse, tmp_path):
        spec = fixture_spec(fixture_tensor, hits, coarse)
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        emit_svg(spec, a)
        emit_svg(fixture_spec(fixture_tensor, hits, coarse), b)
        assert a.read_bytes() == b.read_bytes()

    def test_empty_layers(self):
        with pytest.raises(InputError):
            PlotSpec([])

    def test_unwritable(self, tmp_path):
        with pytest.raises(IoFailure):
            emit_svg(PlotSpec([Layer(UNIT)]), tmp_path / "missing" / "x.svg")


class TestCsv:
    def test_header_only(self):
        assert emit_csv(["a", "b"], []) == "a,b\r\n"

    def test_one_row(self):
        text = emit_csv(["a", "b"], [(1, 0.5)])
        assert text.splitlines() == ["a,b", "1,0.5"]

    def test_nine_digits(self):
        assert emit_csv(["x"], [(math.pi,)]).splitlines()[1] == "3.14159265"

    def test_quoting(self):
        text = emit_csv(["s"], [('say "hi", ok',)])
        assert next(csv.reader(io.StringIO(text.splitlines()[1]))) == ['say "hi", ok']

    def test_ragged(self):
        with pytest.raises(InputError):
            emit_csv(["a", "b"], [(1,)])

    def test_ray_hits(self, hits, tmp_path):
        path = tmp_path / "rays.csv"
        emit_csv(RayHit.CSV_HEADER, [h.csv_row() for h in hits], path)
        rows = list(csv.DictReader(path.open(newline="")))
        assert len(rows) == 6
        assert list(rows[0]) == ["center_index", "theta", "gamma", "w_re", "w_im", "t_inner", "t_outer"]
        assert abs(float(rows[0]["w_re"]) - 3.62019802) <= 1e-6
        for row, (_, w) in zip(rows, PUBLISHED_RAYS):
            assert abs(complex(float(row["w_re"]), float(row["w_im"])) - w) <= 1e-6
