import numpy as np
import pytest

from openteach.errors import BadBounds, NonFinite
from openteach.retarget import (
    ThumbBounds,
    apply_homography,
    closest_point_on_quad,
    homography_from_quads,
    point_in_quad,
    thumb_ik,
    thumb_retarget,
)
from openteach.simrobot import Joint, KinematicModel, fk_position, models, transform

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
SKEWED = np.array([[0.1, 0.0], [1.3, 0.2], [1.0, 1.4], [-0.2, 0.9]])


def homography_oracle(src, dst):
    """Independent 4-point homography: null space of the 8x9 DLT system."""
    A = []
    for (x, y), (u, v) in zip(src, dst):
        A.append([-x, -y, -1, 0, 0, 0, u * x, u * y, u])
        A.append([0, 0, 0, -x, -y, -1, v * x, v * y, v])
    _, _, Vt = np.linalg.svd(np.array(A))
    H = Vt[-1].reshape(3, 3)
    return H / H[2, 2]


class TestHomography:
    def test_corners_map_exactly(self):
        H = homography_from_quads(UNIT_SQUARE, SKEWED)
        for src, dst in zip(UNIT_SQUARE, SKEWED):
            assert np.allclose(apply_homography(H, src), dst, atol=1e-9)

    def test_matches_independent_dlt_oracle(self):
        H = homography_from_quads(UNIT_SQUARE, SKEWED)
        H_oracle = homography_oracle(UNIT_SQUARE, SKEWED)
        assert np.allclose(H, H_oracle, atol=1e-9)
        centroid = UNIT_SQUARE.mean(axis=0)
        assert np.allclose(apply_homography(H, centroid),
                           apply_homography(H_oracle, centroid), atol=1e-10)

    def test_degenerate_quad_unsolvable(self):
        collinear = np.array([[0, 0], [1, 0], [2, 0], [3, 0]], dtype=float)
        with pytest.raises(BadBounds):
            ThumbBounds(human_quad=collinear, robot_quad=UNIT_SQUARE,
                        human_height=(0, 1), robot_height=(0, 1))

    def test_clockwise_quad_rejected(self):
        with pytest.raises(BadBounds):
            ThumbBounds(human_quad=UNIT_SQUARE[::-1], robot_quad=UNIT_SQUARE,
                        human_height=(0, 1), robot_height=(0, 1))


class TestBoundaryClamp:
    def test_outside_point_clamps_to_square_edge(self):
        assert np.allclose(closest_point_on_quad(UNIT_SQUARE, np.array([1.5, 0.5])),
                           [1.0, 0.5], atol=1e-12)

    def test_corner_region_clamps_to_corner(self):
        assert np.allclose(closest_point_on_quad(UNIT_SQUARE, np.array([2.0, 2.0])),
                           [1.0, 1.0], atol=1e-12)

    def test_inside_points_detected(self):
        assert point_in_quad(UNIT_SQUARE, np.array([0.5, 0.5]))
        assert not point_in_quad(UNIT_SQUARE, np.array([1.5, 0.5]))

    def test_clamped_points_lie_on_boundary(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            p = rng.uniform(-2, 3, 2)
            if point_in_quad(SKEWED, p):
                continue
            c = closest_point_on_quad(SKEWED, p)
            on_edge = False
            for i in range(4):
                a, b = SKEWED[i], SKEWED[(i + 1) % 4]
                t = np.dot(c - a, b - a) / np.dot(b - a, b - a)
                if -1e-9 <= t <= 1 + 1e-9 and \
                        np.linalg.norm(a + t * (b - a) - c) < 1e-9:
                    on_edge = True
            assert on_edge


class TestThumbRetarget:
    def bounds(self):
        return ThumbBounds(human_quad=UNIT_SQUARE * 0.1,
                           robot_quad=SKEWED * 0.05,
                           human_height=(-0.02, 0.08),
                           robot_height=(-0.04, 0.04))

    def frame_with_thumb_tip(self, tip):
        from openteach.hands import template_keypoints
        from openteach.wire import Hand, HandFrame, Timestamp
        kp = template_keypoints()
        kp[4] = tip  # thumb tip; palm plane is z=0, so palm coords == (x, y)
        return HandFrame(Timestamp(0, 1), Hand.RIGHT, kp)

    def test_corner_correspondence(self):
        b = self.bounds()
        for hc, rc in zip(b.human_quad, b.robot_quad):
            frame = self.frame_with_thumb_tip([*hc, 0.0])
            out = thumb_retarget(frame, b)
            # template palm frame is not exactly world axes; map through it
            from openteach.retarget import palm_frame
            q2d, h = palm_frame(frame).to_palm_2d(frame.tip("thumb"))
            H = homography_oracle(b.human_quad, b.robot_quad)
            expected = apply_homography(H, closest_point_on_quad(b.human_quad, q2d)
                                        if not point_in_quad(b.human_quad, q2d) else q2d)
            assert np.allclose(out[:2], expected, atol=1e-9)

    def test_height_maps_linearly_with_clamp(self):
        b = self.bounds()
        frame = self.frame_with_thumb_tip([0.05, 0.05, 0.03])
        from openteach.retarget import palm_frame
        _, h = palm_frame(frame).to_palm_2d(frame.tip("thumb"))
        out = thumb_retarget(frame, b)
        t = (np.clip(h, -0.02, 0.08) + 0.02) / 0.10
        assert np.isclose(out[2], -0.04 + t * 0.08, atol=1e-12)
        # far above the range clamps to the top
        hi = thumb_retarget(self.frame_with_thumb_tip([0.05, 0.05, 1.0]), b)
        assert np.isclose(hi[2], 0.04, atol=1e-12)


class TestThumbIk:
    def test_planar_two_link_full_extension(self):
        chain = KinematicModel(
            joints=(Joint(axis=np.array([0.0, 0.0, 1.0]), link=transform()),
                    Joint(axis=np.array([0.0, 0.0, 1.0]),
                          link=transform(translation=(1.0, 0.0, 0.0)))),
            tool=transform(translation=(1.0, 0.0, 0.0)))
        res = thumb_ik(np.array([2.0, 0.0, 0.0]), chain, seed=np.zeros(2))
        assert not res.clamped
        assert res.residual < 1e-6
        assert np.allclose(res.q, [0.0, 0.0], atol=1e-6)

    def test_fk_round_trip_against_independent_fk(self):
        # oracle: chain the joint transforms by hand, independent of
        # the kinematics module
        chain = models.thumb_chain()
        rng = np.random.default_rng(17)

        def fk_oracle(q):
            from openteach.transforms import rot_axis_angle
            T = np.eye(4)
            for joint, qi in zip(chain.joints, q):
                T = T @ joint.link
                R4 = np.eye(4)
                R4[:3, :3] = rot_axis_angle(joint.axis, qi)
                T = T @ R4
            return (T @ chain.tool)[:3, 3]

        for _ in range(50):
            q0 = rng.uniform(chain.lower, chain.upper)
            tip = fk_oracle(q0)
            res = thumb_ik(tip, chain)
            assert not res.clamped
            assert np.linalg.norm(fk_oracle(res.q) - tip) < 1e-6

    def test_beyond_reach_clamps_with_residual(self):
        chain = models.thumb_chain()
        res = thumb_ik(np.array([chain.reach() + 0.1, 0.0, 0.0]), chain)
        assert res.clamped
        assert abs(res.residual - 0.1) < 1e-3

    def test_warm_start_converges_fast(self):
        chain = models.thumb_chain()
        q_prev = np.array([0.2, -0.5, -0.4, -0.3])
        tip = fk_position(chain, q_prev + 0.02)
        res = thumb_ik(tip, chain, seed=q_prev)
        assert not res.clamped

    def test_non_finite_rejected(self):
        with pytest.raises(NonFinite):
            thumb_ik(np.array([np.nan, 0.0, 0.0]), models.thumb_chain())
