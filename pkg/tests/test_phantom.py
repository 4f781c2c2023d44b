import math

import numpy as np
import pytest

from tomokit.geometry import FanGeometry, fan_to_parallel, make_parallel_geometry
from tomokit.phantom import (
    BUILTIN_NAMES,
    Ellipse,
    Phantom,
    analytic_fan_sinogram,
    analytic_sinogram,
    axis_scale,
    builtin_phantom,
    eval_phantom,
    load_phantom,
    parse_phantom_text,
    radon_ellipse,
    radon_phantom,
    scale_angle,
)


def chord_quadrature(e: Ellipse, t: float, theta: float, h: float = 1e-5) -> float:
    """Independent midpoint-rule integral of the ellipse indicator along the line."""
    reach = math.hypot(e.h, e.k) + max(e.a, e.b) + 0.1
    s = np.arange(-reach, reach, h) + h / 2
    x = t * math.cos(theta) - s * math.sin(theta)
    y = t * math.sin(theta) + s * math.cos(theta)
    cp, sp = math.cos(e.phi), math.sin(e.phi)
    u = (x - e.h) * cp + (y - e.k) * sp
    v = -(x - e.h) * sp + (y - e.k) * cp
    inside = (u / e.a) ** 2 + (v / e.b) ** 2 <= 1.0
    return e.rho * h * float(np.count_nonzero(inside))


def random_ellipse(rng) -> Ellipse:
    return Ellipse(
        a=rng.uniform(0.1, 2.0),
        b=rng.uniform(0.1, 2.0),
        h=rng.uniform(-1.0, 1.0),
        k=rng.uniform(-1.0, 1.0),
        phi=rng.uniform(-math.pi, math.pi),
        rho=rng.uniform(-2.0, 2.0),
    )


class TestEvalPhantom:
    def test_unit_ball_center(self, ball_phantom):
        assert eval_phantom(ball_phantom, 0.0, 0.0) == 1.0

    def test_unit_ball_outside(self, ball_phantom):
        assert eval_phantom(ball_phantom, 2.0, 0.0) == 0.0

    def test_boundary_counts_as_inside(self, ball_phantom):
        assert eval_phantom(ball_phantom, 1.0, 0.0) == 1.0

    def test_superposition(self):
        ph = Phantom(
            ellipses=(
                Ellipse(1.0, 1.0, 0.0, 0.0, 0.0, 1.0),
                Ellipse(0.5, 0.5, 0.0, 0.0, 0.0, -0.5),
            ),
            r=1.0,
        )
        assert eval_phantom(ph, 0.0, 0.0) == pytest.approx(0.5)


class TestRadonEllipse:
    def test_ball_center_chord(self):
        ball = Ellipse(1.0, 1.0, 0.0, 0.0, 0.0, 1.0)
        assert radon_ellipse(ball, 0.0, 0.3) == pytest.approx(2.0)

    def test_ball_off_center_chord(self):
        ball = Ellipse(1.0, 1.0, 0.0, 0.0, 0.0, 1.0)
        assert radon_ellipse(ball, 0.6, 1.1) == pytest.approx(1.6)

    def test_ellipse_vertical_chord(self):
        e = Ellipse(2.0, 1.0, 0.0, 0.0, 0.0, 1.0)
        assert radon_ellipse(e, 0.0, 0.0) == pytest.approx(2.0)
        assert radon_ellipse(e, 0.0, 0.0) == pytest.approx(
            chord_quadrature(e, 0.0, 0.0), abs=5e-4
        )

    def test_outside_support_is_zero(self):
        e = Ellipse(2.0, 1.0, 0.0, 0.0, 0.0, 1.0)
        assert radon_ellipse(e, 2.5, 0.0) == 0.0

    def test_matches_quadrature_at_random_draws(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            e = random_ellipse(rng)
            t = rng.uniform(-2.5, 2.5)
            theta = rng.uniform(0.0, math.pi)
            assert radon_ellipse(e, t, theta) == pytest.approx(
                chord_quadrature(e, t, theta), abs=5e-4 * max(1.0, abs(e.rho))
            )


class TestTransformProperties:
    """The closed-form transform obeys the exact symmetry identities."""

    N_DRAWS = 1000

    def test_evenness(self):
        rng = np.random.default_rng(10)
        for _ in range(self.N_DRAWS):
            e = random_ellipse(rng)
            t, theta = rng.uniform(-3, 3), rng.uniform(-6, 6)
            assert radon_ellipse(e, -t, theta + math.pi) == pytest.approx(
                radon_ellipse(e, t, theta), abs=1e-10
            )

    def test_radial_symmetry(self):
        rng = np.random.default_rng(11)
        for _ in range(self.N_DRAWS):
            radius = rng.uniform(0.1, 2.0)
            ball = Ellipse(radius, radius, 0.0, 0.0, 0.0, 1.0)
            t = rng.uniform(-2.5, 2.5)
            th1, th2 = rng.uniform(0, math.pi, 2)
            assert radon_ellipse(ball, t, th1) == pytest.approx(
                radon_ellipse(ball, abs(t), th2), abs=1e-10
            )

    def test_compact_support(self):
        rng = np.random.default_rng(12)
        for _ in range(self.N_DRAWS):
            e = random_ellipse(rng)
            theta = rng.uniform(0, math.pi)
            c = float(axis_scale(e.a, e.b, theta - e.phi))
            tau = rng.uniform(c, c + 3.0)
            t = tau + e.h * math.cos(theta) + e.k * math.sin(theta)
            assert radon_ellipse(e, t, theta) == 0.0

    def test_shift_property(self):
        rng = np.random.default_rng(13)
        for _ in range(self.N_DRAWS):
            e = random_ellipse(rng)
            centered = Ellipse(e.a, e.b, 0.0, 0.0, e.phi, e.rho)
            t, theta = rng.uniform(-3, 3), rng.uniform(0, math.pi)
            tau = t - e.h * math.cos(theta) - e.k * math.sin(theta)
            assert radon_ellipse(e, t, theta) == pytest.approx(
                radon_ellipse(centered, tau, theta), abs=1e-10
            )

    def test_rotation_property(self):
        rng = np.random.default_rng(14)
        for _ in range(self.N_DRAWS):
            e = random_ellipse(rng)
            base = Ellipse(e.a, e.b, 0.0, 0.0, 0.0, e.rho)
            rotated = Ellipse(e.a, e.b, 0.0, 0.0, e.phi, e.rho)
            t, theta = rng.uniform(-3, 3), rng.uniform(0, math.pi)
            assert radon_ellipse(rotated, t, theta) == pytest.approx(
                radon_ellipse(base, t, theta - e.phi), abs=1e-10
            )

    def test_scaling_property(self):
        # f_{a,b}(x, y) = f(x/a, y/b) applied to a base ellipse indicator;
        # the modified angle runs through the four-branch arctan
        rng = np.random.default_rng(15)
        for _ in range(self.N_DRAWS):
            a0, b0 = rng.uniform(0.2, 1.5, 2)
            a, b = rng.uniform(0.3, 2.5, 2)
            base = Ellipse(a0, b0, 0.0, 0.0, 0.0, 1.0)
            scaled = Ellipse(a * a0, b * b0, 0.0, 0.0, 0.0, 1.0)
            t, theta = rng.uniform(-3, 3), rng.uniform(0, math.pi)
            c = float(axis_scale(a, b, theta))
            expected = (a * b / c) * radon_ellipse(
                base, t / c, float(scale_angle(a, b, theta))
            )
            assert radon_ellipse(scaled, t, theta) == pytest.approx(expected, abs=1e-10)

    def test_scaling_property_against_quadrature(self):
        rng = np.random.default_rng(16)
        for _ in range(100):
            a0, b0 = rng.uniform(0.2, 1.0, 2)
            a, b = rng.uniform(0.3, 2.0, 2)
            base = Ellipse(a0, b0, 0.0, 0.0, 0.0, 1.0)
            scaled = Ellipse(a * a0, b * b0, 0.0, 0.0, 0.0, 1.0)
            t, theta = rng.uniform(-2, 2), rng.uniform(0, math.pi)
            c = float(axis_scale(a, b, theta))
            expected = (a * b / c) * radon_ellipse(
                base, t / c, float(scale_angle(a, b, theta))
            )
            assert chord_quadrature(scaled, t, theta, h=1e-4) == pytest.approx(
                expected, abs=2e-3
            )

    def test_scale_angle_branches(self):
        assert scale_angle(2.0, 1.0, 0.0) == 0.0
        assert scale_angle(2.0, 1.0, math.pi / 2) == pytest.approx(math.pi / 2)
        assert 0 < float(scale_angle(2.0, 1.0, 0.4)) < math.pi / 2
        obtuse = float(scale_angle(2.0, 1.0, 2.8))
        assert math.pi / 2 < obtuse < math.pi


class TestAnalyticSinogram:
    def test_empty_phantom(self, geometry_50pi):
        sino = analytic_sinogram(Phantom(ellipses=(), r=1.0), geometry_50pi)
        assert np.all(sino.values == 0.0)

    def test_radial_symmetry_columns(self, ball_sinogram):
        cols = ball_sinogram.values
        assert np.allclose(cols, cols[:, :1], atol=1e-12)

    def test_compact_support_rows(self, ball_phantom):
        g = make_parallel_geometry(10 * math.pi, 2)  # offsets reach 2 > support 1
        sino = analytic_sinogram(ball_phantom, g)
        outside = np.abs(g.offsets) > 1.0
        assert np.all(sino.values[outside, :] == 0.0)

    def test_rejects_uncovered_support(self, ball_phantom):
        g = make_parallel_geometry(10 * math.pi, 2)
        big = Phantom(ellipses=(Ellipse(2.5, 2.5, 0, 0, 0, 1.0),), r=2.5)
        with pytest.raises(ValueError):
            analytic_sinogram(big, g)

    def test_positivity(self, geometry_50pi):
        rng = np.random.default_rng(8)
        ells = []
        for _ in range(4):
            e = random_ellipse(rng)
            ells.append(Ellipse(min(e.a, 0.3), min(e.b, 0.3), e.h / 2, e.k / 2,
                                e.phi, abs(e.rho)))
        ph = Phantom(ellipses=tuple(ells), r=1.0)
        sino = analytic_sinogram(ph, geometry_50pi)
        assert np.all(sino.values >= 0.0)

    @pytest.mark.parametrize("name", ["unit-ball", "shepp-logan", "thorax"])
    def test_mass_bound(self, name, geometry_50pi):
        # discrete analogue of the L1 continuity bound; 1e-3 covers the
        # trapezoid error at the square-root edges of the profiles
        ph = builtin_phantom(name)
        sino = analytic_sinogram(ph, geometry_50pi)
        col_sums = geometry_50pi.d * np.sum(np.abs(sino.values), axis=0)
        assert np.all(col_sums <= ph.l1_mass + 1e-3)


class TestAnalyticFanSinogram:
    FAN = FanGeometry(D=3.0, phi=math.pi / 3, p=24, q=8, r=1.0)

    def test_empty_phantom(self):
        fan = analytic_fan_sinogram(Phantom(ellipses=(), r=1.0), self.FAN)
        assert np.all(fan.values == 0.0)

    def test_central_ray_column(self, ball_phantom):
        fan = analytic_fan_sinogram(ball_phantom, self.FAN)
        assert np.allclose(fan.values[self.FAN.q, :], 2.0, atol=1e-12)

    def test_consistent_with_converted_line_parameters(self, ball_phantom):
        ph = builtin_phantom("shepp-logan")
        fan = analytic_fan_sinogram(ph, self.FAN)
        for j in (0, 5, 16):
            for k in (0, 7, 23):
                line = fan_to_parallel(float(self.FAN.fan_angles[j]),
                                       float(self.FAN.source_angles[k]), self.FAN.D)
                expected = float(radon_phantom(ph, line.t, line.theta))
                assert fan.values[j, k] == pytest.approx(expected, abs=1e-12)

    def test_rejects_uncovered_support(self):
        # the fan with D = 3, phi = pi/3 reaches offsets up to 1.5
        big = Phantom(ellipses=(Ellipse(1.55, 1.55, 0, 0, 0, 1.0),), r=1.6)
        g = FanGeometry(D=3.0, phi=math.pi / 3, p=8, q=4, r=1.4)
        with pytest.raises(ValueError):
            analytic_fan_sinogram(big, g)


class TestBuiltinPhantoms:
    def test_shepp_logan_has_ten_ellipses(self):
        ph = builtin_phantom("shepp-logan")
        assert len(ph.ellipses) == 10
        assert ph.r == 1.0

    def test_thorax_has_seven_ellipses(self):
        ph = builtin_phantom("thorax")
        assert len(ph.ellipses) == 7
        assert ph.r == 1.0

    def test_unit_ball(self):
        ph = builtin_phantom("unit-ball")
        (e,) = ph.ellipses
        assert (e.a, e.b, e.rho) == (1.0, 1.0, 1.0)

    def test_unknown_name(self):
        with pytest.raises(ValueError, match="unknown phantom"):
            builtin_phantom("donut")

    @pytest.mark.parametrize("name", BUILTIN_NAMES)
    def test_support_invariant(self, name):
        ph = builtin_phantom(name)
        for e in ph.ellipses:
            assert e.cover_radius <= ph.r + 1e-12


class TestPhantomFiles:
    def test_parse_with_comments(self):
        text = "# header\n1.0 0.5 0 0 0 1.0  # trailing\n\n0.2 0.2 0.1 -0.1 0.3 -0.5\n"
        ells = parse_phantom_text(text)
        assert len(ells) == 2
        assert ells[1].rho == -0.5

    def test_parse_rejects_bad_field_count(self):
        with pytest.raises(ValueError, match="6 fields"):
            parse_phantom_text("1 2 3 4 5\n")

    def test_parse_rejects_non_numeric(self):
        with pytest.raises(ValueError, match="non-numeric"):
            parse_phantom_text("1 2 3 4 5 a\n")

    def test_load_infers_support(self, tmp_path):
        path = tmp_path / "ph.txt"
        path.write_text("0.5 0.5 1.0 0.0 0.0 1.0\n", encoding="utf-8")
        ph = load_phantom(path)
        assert ph.r == 2.0  # ceil(1.0 + 0.5)

    def test_phantom_rejects_uncontained_ellipse(self):
        with pytest.raises(ValueError, match="support radius"):
            Phantom(ellipses=(Ellipse(0.5, 0.5, 1.0, 0.0, 0.0, 1.0),), r=1.0)
