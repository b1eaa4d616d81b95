import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from soliton_lab import Mesh, PhasePoint, SolitonParams, embed, integrate, read_csv, read_obj, revolve, write_csv, write_events_json, write_obj
from soliton_lab.embed import arc_length_errors, ring_perimeters, ring_radii
from soliton_lab.errors import EmbeddingLost, InvalidParams
from soliton_lab.export import csv_text, mesh_metadata, obj_text


@pytest.fixture(scope="module")
def football_mesh():
    return embed(SolitonParams(-1, 1.0), PhasePoint(0, 0.3), 10.0, 2000, 256)


@pytest.fixture(scope="module")
def cigar_mesh():
    return embed(SolitonParams(0, 1.0), PhasePoint(0, -1.0), 10.0, 2000, 256)


class TestRevolve:
    def test_unit_ring(self):
        m = revolve([1.0, 1.0], [0.0, 1.0], 4)
        ring = m.ring(0)
        assert len(ring) == 4
        assert np.allclose(np.hypot(ring[:, 0], ring[:, 1]), 1.0)
        assert np.allclose(ring[:, 2], 0.0)

    def test_planar_disc(self):
        # u = 1: h = r and z' = 0
        r = np.linspace(0, 2, 11)
        m = revolve(r, np.zeros_like(r), 16, r)
        assert np.all(m.vertices[:, 2] == 0)
        assert m.n_apex == 1
        assert len(m.vertices) == 10 * 16 + 1

    @given(rings=st.integers(2, 30), sectors=st.integers(3, 40), apex0=st.booleans(), apex1=st.booleans())
    def test_counts_and_indices(self, rings, sectors, apex0, apex1):
        h = np.linspace(0.5, 1.5, rings)
        if apex0:
            h[0] = 0.0
        if apex1:
            h[-1] = 0.0
        m = revolve(h, np.linspace(0, 1, rings), sectors)
        n_apex = int(np.sum(h < 1e-9))
        assert len(m.vertices) == (rings - n_apex) * sectors + n_apex
        idx = np.array([i for f in m.faces for i in f])
        if len(idx):
            assert idx.min() >= 0 and idx.max() < len(m.vertices)
        assert np.all(np.isfinite(m.vertices))

    @given(sectors=st.integers(3, 64))
    def test_mirror_symmetry(self, sectors):
        h = np.array([0.0, 0.7, 1.2, 0.4])
        m = revolve(h, np.arange(4.0), sectors)
        flipped = m.vertices * np.array([1.0, -1.0, 1.0])
        key = lambda v: np.lexsort(np.round(v, 9).T)  # noqa: E731
        assert np.allclose(m.vertices[key(m.vertices)], flipped[key(flipped)], atol=1e-12)

    def test_validation(self):
        with pytest.raises(InvalidParams):
            revolve([1.0], [0.0], 8)
        with pytest.raises(InvalidParams):
            revolve([1.0, 1.0], [0.0, 1.0], 2)
        with pytest.raises(InvalidParams):
            revolve([1.0, math.nan], [0.0, 1.0], 8)


class TestEmbed:
    def test_football_is_closed(self, football_mesh):
        m = football_mesh
        assert m.n_apex == 2
        assert len(m.vertices) == (2000 - 2) * 256 + 2

    @pytest.mark.parametrize("name", ["football_mesh", "cigar_mesh"])
    def test_arc_length(self, name, request):
        m = request.getfixturevalue(name)
        assert np.max(arc_length_errors(m)) < 1e-5

    @pytest.mark.parametrize("name", ["football_mesh", "cigar_mesh"])
    def test_parallel_circumference(self, name, request):
        m = request.getfixturevalue(name)
        per, rad = ring_perimeters(m), ring_radii(m)
        ok = rad > 1e-9
        assert np.max(np.abs(per[ok] / (2 * math.pi * rad[ok]) - 1)) < 1e-3

    def test_cigar_profile(self, cigar_mesh):
        # h = sqrt2 tanh(r / sqrt2), asymptotic to the cylinder of radius sqrt 2
        rad = ring_radii(cigar_mesh)
        r = cigar_mesh.ring_r
        # rings are Hermite-interpolated between integrator samples
        assert np.max(np.abs(rad - math.sqrt(2) * np.tanh(r / math.sqrt(2)))) < 1e-7

    def test_embedding_lost(self):
        with pytest.raises(EmbeddingLost):
            embed(SolitonParams(1, 1.0), PhasePoint(0, -1.2), 10.0, 50, 16)

    def test_gaussian_plane_is_flat_disc(self):
        # a = 1/2 on the isocline: u = 1, h = r, z' = 0
        m = embed(SolitonParams(-1, 0.5), PhasePoint(0, 1.0), 1.0, 5, 8)
        assert np.all(m.vertices[:, 2] == 0.0)
        assert ring_radii(m)[-1] == pytest.approx(1.0)


class TestFiles:
    def test_empty_obj(self, tmp_path):
        p = tmp_path / "e.obj"
        write_obj(Mesh.empty(), p)
        text = p.read_text()
        assert text.startswith("#") and len(text.splitlines()) == 1
        assert len(read_obj(p).vertices) == 0

    def test_obj_round_trip(self, football_mesh, tmp_path):
        p = tmp_path / "f.obj"
        write_obj(football_mesh, p, comment="football a=1 b=0.3")
        back = read_obj(p)
        assert len(back.vertices) == len(football_mesh.vertices)
        assert back.faces == football_mesh.faces
        assert (back.rings, back.sectors) == (2000, 256)
        assert np.allclose(back.vertices, football_mesh.vertices, rtol=1e-8, atol=1e-9)

    def test_obj_is_deterministic(self):
        m = embed(SolitonParams(1, 1.0), PhasePoint(0, -1.0), 5.0, 20, 8)
        m2 = embed(SolitonParams(1, 1.0), PhasePoint(0, -1.0), 5.0, 20, 8)
        assert obj_text(m) == obj_text(m2)

    def test_obj_faces_one_based(self):
        text = obj_text(revolve([1.0, 1.0], [0.0, 1.0], 3))
        faces = [line for line in text.splitlines() if line.startswith("f ")]
        assert faces[0] == "f 1 4 5 2"

    def test_csv_round_trip(self, tmp_path):
        params = SolitonParams(-1, 1.0)
        t, _ = integrate(params, PhasePoint(0, 0.3))
        p = tmp_path / "t.csv"
        write_csv(t, p)
        back = read_csv(p, params)
        assert np.array_equal(back.r, t.r) and np.array_equal(back.h, t.h) and np.array_equal(back.u, t.u)
        assert csv_text(t).splitlines()[0] == "r,h,u"

    def test_events_json(self, tmp_path):
        t, _ = integrate(SolitonParams(-1, 1.0), PhasePoint(0, 0.3))
        p = tmp_path / "ev.json"
        write_events_json(t, p)
        events = json.loads(p.read_text())
        assert events[-1]["kind"] == "PinchEnd"
        assert events[-1]["r"] == pytest.approx(4.56, abs=0.02)
        assert [e["r"] for e in events] == sorted(e["r"] for e in events)

    def test_metadata(self):
        m = revolve([0.0, 1.0, 0.0], [0.0, 1.0, 2.0], 8)
        meta = mesh_metadata(SolitonParams(-1, 1.0), m, {"class": "Football", "alpha1_deg": 108.0})
        assert meta["class"] == "Football" and meta["angles"] == {"alpha1_deg": 108.0}
        assert meta["bbox"][0][2] == 0.0 and meta["bbox"][1][2] == 2.0
        assert meta["vertices"] == 8 + 2
