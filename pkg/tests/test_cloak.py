import math

import numpy as np
import pytest

from cloaksteer import cloak
from cloaksteer.cloak import CloakGeometry

GEOM = CloakGeometry(R=1.0, L=3.0, v=1.0, a=0.5)


def test_geometry_defaults_and_validation():
    assert CloakGeometry(R=2.0, L=4.0).a == 1.0
    for bad in (dict(R=1, L=2, a=1.5), dict(R=3, L=2), dict(R=1, L=2, v=0), dict(R=1, L=2, a=0)):
        with pytest.raises(ValueError):
            CloakGeometry(**bad)
    assert CloakGeometry.from_wave(R=1, L=2, k=2.0, omega=3.0).v == 1.5


def test_dwell_time_values():
    assert cloak.dwell_time(GEOM, 0.0) == 2.0
    assert cloak.dwell_time(GEOM, 0.5) == pytest.approx(math.sqrt(3), abs=1e-15)
    assert cloak.dwell_time(GEOM, 1.0) == 0.0
    assert cloak.dwell_time(GEOM, -2.5) == 0.0
    with pytest.raises(cloak.OutOfApertureError):
        cloak.dwell_time(GEOM, 3.5)


def test_dwell_time_shape():
    ys = np.linspace(0, 1, 201)[:-1]
    ts = [cloak.dwell_time(GEOM, y) for y in ys]
    assert all(a > b for a, b in zip(ts, ts[1:]))
    assert all(cloak.dwell_time(GEOM, y) == cloak.dwell_time(GEOM, -y) for y in ys)
    assert cloak.dwell_time(GEOM, 1 - 1e-12) < 1e-5


def test_total_time_is_constant():
    g = CloakGeometry(R=1.0, L=5.0, v=1.0)
    for y in np.linspace(-5, 5, 101):
        assert abs(cloak.total_traversal_time(g, y) - 10.0) <= 1e-12


def test_radial_map_values():
    np.testing.assert_allclose(cloak.radial_map(GEOM, (0, 1.0)), (0, 1.0), atol=1e-15)
    np.testing.assert_allclose(cloak.radial_map(GEOM, (0.5, 0)), (0.75, 0), atol=1e-15)
    assert math.hypot(*cloak.radial_map(GEOM, (1e-9, 0))) == pytest.approx(0.5, abs=1e-8)
    with pytest.raises(ValueError):
        cloak.radial_map(GEOM, (1.5, 0))


def test_radial_map_round_trip():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        r, th = rng.uniform(1e-6, 1.0), rng.uniform(0, 2 * math.pi)
        p = np.array([r * math.cos(th), r * math.sin(th)])
        q = cloak.radial_map(GEOM, p)
        assert 0.5 < math.hypot(*q) <= 1.0 + 1e-15
        np.testing.assert_allclose(cloak.inverse_radial_map(GEOM, q), p, atol=1e-12)


def test_trajectory_straight_outside():
    tr = cloak.trajectory(GEOM, 2.0, 20)
    assert np.all(tr.points[:, 1] == 2.0)
    assert tr.dwell_time == 0
    assert len(tr.points) == 22


def test_trajectory_crossing():
    tr = cloak.trajectory(GEOM, 0.5, 101)
    np.testing.assert_allclose(tr.points[0], (-3, 0.5))
    np.testing.assert_allclose(tr.points[-1], (3, 0.5))
    np.testing.assert_allclose(tr.points[1], (-math.sqrt(3) / 2, 0.5), atol=1e-15)
    np.testing.assert_allclose(cloak.radial_map(GEOM, tr.points[1]), tr.points[1], atol=1e-12)
    radii = np.hypot(*tr.points.T)
    assert radii.min() == pytest.approx(0.75, abs=1e-12)
    assert tr.dwell_time == pytest.approx(math.sqrt(3))


def test_trajectory_continuous_at_shell():
    for y in np.linspace(-0.99, 0.99, 40):
        if y == 0:
            continue
        pts = cloak.trajectory(GEOM, y, 200).points
        chord = math.sqrt(1 - y * y)
        # entry and exit lie on the straight incident line
        np.testing.assert_allclose(pts[1], (-chord, y), atol=1e-9)
        np.testing.assert_allclose(pts[-2], (chord, y), atol=1e-9)
        # first mapped sample sits next to the entry point
        assert np.linalg.norm(pts[2] - pts[1]) < 0.05


def test_trajectory_symmetry_and_hidden_region():
    for y in np.linspace(0.01, 1.5, 30):
        up = cloak.trajectory(GEOM, y, 75).points
        down = cloak.trajectory(GEOM, -y, 75).points
        np.testing.assert_array_equal(up[:, 0], down[:, 0])
        np.testing.assert_array_equal(up[:, 1], -down[:, 1])
        assert np.hypot(*up.T).min() >= GEOM.a - 1e-9


def test_trajectory_errors():
    with pytest.raises(cloak.SeparatrixError):
        cloak.trajectory(GEOM, 0.0)
    with pytest.raises(cloak.OutOfApertureError):
        cloak.trajectory(GEOM, 4.0)


def test_current_direction_free_space():
    np.testing.assert_array_equal(cloak.current_direction(GEOM, (0, 2.0)), (1, 0))
    np.testing.assert_allclose(cloak.current_direction(GEOM, (0, 1.0)), (1, 0), atol=1e-12)
    with pytest.raises(cloak.HiddenRegionError):
        cloak.current_direction(GEOM, (0.1, 0.2))


def test_current_direction_is_trajectory_tangent():
    tr = cloak.trajectory(GEOM, 0.4, 4001)
    pts = tr.points[1:-1]
    for j in range(100, 3900, 250):
        tangent = pts[j + 1] - pts[j - 1]
        tangent /= np.linalg.norm(tangent)
        np.testing.assert_allclose(cloak.current_direction(GEOM, pts[j]), tangent, atol=1e-5)


def test_free_space_divergence():
    h = 1e-4
    for x, y in [(-2.0, 1.5), (0.0, 2.0), (2.5, -1.2), (1.3, 1.3)]:
        dfx = (cloak.current_direction(GEOM, (x + h, y))[0] - cloak.current_direction(GEOM, (x - h, y))[0]) / (2 * h)
        dfy = (cloak.current_direction(GEOM, (x, y + h))[1] - cloak.current_direction(GEOM, (x, y - h))[1]) / (2 * h)
        assert abs(dfx + dfy) <= 1e-6
