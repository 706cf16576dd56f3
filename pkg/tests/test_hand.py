"""Hand kinematics, underactuated closure, slider, baseline tip model."""

import math
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from grasp_sim.geometry import Transform2, ValidationError
from grasp_sim.hand import (
    DIP,
    MP,
    PIP,
    BaselineGripperModel,
    FingerLinkage,
    HandConfig,
    HandState,
    SliderState,
    aperture,
    aperture_to_motor,
    baseline_tip_pose,
    finger_closure_step,
    finger_forward_kinematics,
    finger_segments,
    fingertip,
    hand_config_from_dict,
    hand_config_to_dict,
    load_hand_config,
    make_hand_config,
    motor_for_aperture,
    motor_range,
    save_hand_config,
)

F1 = make_hand_config("f1")


def straight_state(q: float) -> HandState:
    return HandState(motor_angle=q, joint_angles=(q, 0.0, 0.0))


def _homogeneous(rot: float, x: float, z: float):
    c, s = math.cos(rot), math.sin(rot)
    return ((c, -s, x), (s, c, z), (0.0, 0.0, 1.0))


def _translation_along_link(L: float):
    # A link extends along the rotated "down" axis; in the chain's convention
    # a frame at angle a points its link along (sin a, -cos a), which is the
    # image of the local (0, -L) vector.
    return ((1.0, 0.0, 0.0), (0.0, 1.0, -L), (0.0, 0.0, 1.0))


def _mat_mul(a, b):
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(3)) for j in range(3))
        for i in range(3)
    )


class TestForwardKinematics:
    def test_zero_joints_collinear_chain(self):
        linkage = FingerLinkage()
        segs = finger_forward_kinematics(linkage, (0.0, 0.0, 0.0), Transform2())
        # Chain connected and straight down from the base.
        assert segs[0].ax == 0.0 and segs[0].az == 0.0
        for a, b in zip(segs, segs[1:]):
            assert math.isclose(a.bx, b.ax, abs_tol=1e-15)
            assert math.isclose(a.bz, b.az, abs_tol=1e-15)
        xs = [segs[0].ax] + [s.bx for s in segs]
        assert all(math.isclose(x, 0.0, abs_tol=1e-12) for x in xs)
        total = -segs[-1].bz
        assert math.isclose(total, linkage.reach, rel_tol=1e-12)

    def test_mp_rotates_chain_rigidly(self):
        linkage = FingerLinkage()
        segs = finger_forward_kinematics(linkage, (math.pi / 2, 0.0, 0.0), Transform2())
        # Rotated 90 degrees about the base pivot: chain lies horizontal.
        assert math.isclose(segs[-1].bz, 0.0, abs_tol=1e-12)
        assert math.isclose(abs(segs[-1].bx), linkage.reach, rel_tol=1e-12)

    def test_tip_matches_explicit_matrix_product(self):
        """Independent recomputation by composing three homogeneous transforms."""
        import random

        rng = random.Random(99)
        linkage = FingerLinkage()
        base = Transform2(0.3, 0.05, 0.11)
        for _ in range(50):
            joints = (rng.uniform(0, 1.3), rng.uniform(0, 2.0), rng.uniform(0, 2.0))
            segs = finger_forward_kinematics(linkage, joints, base)
            # Oracle: explicit product of three homogeneous transforms, each
            # a curl rotation followed by a translation down the link.
            m = _homogeneous(base.rotation, base.x, base.z)
            for L, j in zip(linkage.link_lengths, joints):
                m = _mat_mul(m, _homogeneous(-j, 0.0, 0.0))
                m = _mat_mul(m, _translation_along_link(L))
            assert math.isclose(segs[-1].bx, m[0][2], abs_tol=1e-12)
            assert math.isclose(segs[-1].bz, m[1][2], abs_tol=1e-12)

    def test_out_of_limit_joints_rejected(self):
        with pytest.raises(ValidationError):
            finger_forward_kinematics(FingerLinkage(), (-0.5, 0.0, 0.0), Transform2())


class TestAperture:
    def test_open_aperture_is_max(self):
        assert math.isclose(aperture(straight_state(0.0), F1), 0.1305, abs_tol=1e-12)

    def test_closed_aperture_below_millimetre(self):
        q_open, q_closed = motor_range(F1)
        assert aperture(straight_state(q_closed), F1) <= 1e-3

    def test_extended_variant_aperture(self):
        ext = make_hand_config("f1-extended")
        assert math.isclose(aperture(straight_state(0.0), ext), 0.215, abs_tol=1e-9)

    def test_aperture_matches_fk_tip_distance(self):
        for q in (0.2, 0.5, 0.9, 1.2):
            state = straight_state(q)
            tx, _ = fingertip(state, F1)
            assert math.isclose(aperture(state, F1), abs(tx), abs_tol=1e-12)

    def test_strictly_decreasing_and_invertible(self):
        q_open, q_closed = motor_range(F1)
        qs = [q_open + i * (q_closed - q_open) / 40 for i in range(41)]
        aps = [aperture(straight_state(q), F1) for q in qs]
        assert all(a > b for a, b in zip(aps, aps[1:]))
        for a in aps:
            q = aperture_to_motor(F1, a)
            assert math.isclose(aperture(straight_state(q), F1), a, abs_tol=1e-6)

    def test_precurl_inverse_round_trips(self):
        for c in (0.2, 0.6, 1.0):
            for target in (0.05, 0.08, 0.03):
                try:
                    mp = motor_for_aperture(F1, target, c, c)
                except ValidationError:
                    continue
                state = HandState(motor_angle=mp, joint_angles=(mp, c, c))
                assert math.isclose(aperture(state, F1), target, abs_tol=1e-6)

    def test_out_of_range_aperture_rejected(self):
        with pytest.raises(ValidationError):
            aperture_to_motor(F1, 0.2)


class TestClosureTransmission:
    def test_free_closure_sweeps_mp_only(self):
        state = HandState()
        out = finger_closure_step(state, 0.1, frozenset())
        assert out.joint_angles == (0.1, 0.0, 0.0)
        assert out.motor_angle == 0.1
        assert not out.stalled

    def test_proximal_contact_routes_to_pip(self):
        state = HandState(joint_angles=(0.4, 0.0, 0.0), motor_angle=0.4)
        out = finger_closure_step(state, 0.1, {MP})
        assert out.joint_angles == (0.4, 0.1, 0.0)
        assert math.isclose(out.motor_angle, 0.5)

    def test_middle_contact_freezes_pip_only(self):
        state = HandState(joint_angles=(0.4, 0.2, 0.0), motor_angle=0.6)
        out = finger_closure_step(state, 0.1, {PIP})
        assert out.joint_angles == (0.5, 0.2, 0.0)

    def test_all_contacts_stall(self):
        state = HandState(joint_angles=(0.4, 0.2, 0.1), motor_angle=0.7)
        out = finger_closure_step(state, 0.1, {MP, PIP, DIP})
        assert out.stalled
        assert out.joint_angles == state.joint_angles
        assert out.motor_angle == state.motor_angle

    def test_frozen_joint_never_moves_while_contact_persists(self):
        state = HandState(joint_angles=(0.3, 0.0, 0.0), motor_angle=0.3)
        for _ in range(20):
            state = finger_closure_step(state, 0.02, {MP})
            assert state.joint_angles[MP] == 0.3

    def test_free_closure_keeps_finger_extended(self):
        state = HandState()
        for _ in range(40):
            state = finger_closure_step(state, 0.02, frozenset())
        assert state.joint_angles[PIP] == 0.0
        assert state.joint_angles[DIP] == 0.0

    def test_negative_dq_rejected(self):
        with pytest.raises(ValidationError):
            finger_closure_step(HandState(), -0.1, frozenset())


class TestSlider:
    def test_unloaded_stays_extended(self):
        from grasp_sim.hand import slider_react

        out = slider_react(SliderState(), 0.0)
        assert out.compression == 0.0

    def test_linear_spring_law(self):
        from grasp_sim.hand import slider_react

        slider = SliderState(spring_constant=500.0, preload=2.0, max_stroke=0.015)
        out = slider_react(slider, 7.0)
        assert math.isclose(out.compression, 0.01, abs_tol=1e-12)
        assert math.isclose(out.reaction, 7.0, abs_tol=1e-12)

    def test_saturation_bottoms_out(self):
        from grasp_sim.hand import slider_react, slider_reaction_force

        slider = SliderState()
        out = slider_react(slider, 1e6)
        assert out.compression == slider.max_stroke
        assert out.bottomed
        assert slider_reaction_force(slider, 1e6) == slider.preload + \
            slider.spring_constant * slider.max_stroke

    @given(st.floats(0, 100))
    @settings(max_examples=60, deadline=None)
    def test_compression_bounds_and_monotonicity(self, load):
        from grasp_sim.hand import slider_react

        slider = SliderState()
        out = slider_react(slider, load)
        assert 0.0 <= out.compression <= slider.max_stroke
        assert out.reaction >= slider.preload


class TestBaselineGripper:
    def test_open_state(self):
        m = BaselineGripperModel()
        assert m.tip_drop(0.0) == 0.0
        assert math.isclose(m.aperture(0.0), m.max_aperture)

    def test_tip_drop_formula(self):
        # drop = R * (1 - cos(phi)) at phi = 60 degrees with R = 60 mm
        m = BaselineGripperModel(tip_arc_radius=0.06)
        assert math.isclose(m.tip_drop(math.pi / 3), 0.03, abs_tol=1e-12)

    def test_drop_monotone_as_aperture_shrinks(self):
        m = BaselineGripperModel()
        qs = [i * m.sweep_max / 30 for i in range(31)]
        drops = [m.tip_drop(q) for q in qs]
        aps = [m.aperture(q) for q in qs]
        assert all(d2 > d1 for d1, d2 in zip(drops, drops[1:]))
        assert all(a2 < a1 for a1, a2 in zip(aps, aps[1:]))

    def test_tip_pose_symmetric(self):
        m = BaselineGripperModel()
        left, right = baseline_tip_pose(m, 0.5)
        assert math.isclose(left[0], -right[0], abs_tol=1e-12)
        assert left[1] == right[1] <= 0.0

    def test_fixed_finger_height_constant_in_q(self):
        """The asymmetric hand's fixed tip does not move with the motor."""
        from grasp_sim.hand import fixed_tip_position

        z_values = {round(fixed_tip_position(straight_state(q), F1)[1], 15)
                    for q in (0.0, 0.4, 0.8, 1.2)}
        assert len(z_values) == 1


class TestHandConfigFiles:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "hand.json"
        save_hand_config(F1, path)
        loaded = load_hand_config(path)
        assert loaded.variant == F1.variant
        assert math.isclose(loaded.max_aperture, F1.max_aperture, abs_tol=1e-12)
        assert loaded.linkage.link_lengths == F1.linkage.link_lengths
        assert loaded.slider.preload == F1.slider.preload

    def test_format_field_checked(self):
        data = hand_config_to_dict(F1)
        data["format"] = 99
        with pytest.raises(ValidationError):
            hand_config_from_dict(data)

    def test_missing_field_reported(self):
        data = hand_config_to_dict(F1)
        del data["link_lengths_mm"]
        with pytest.raises(ValidationError):
            hand_config_from_dict(data)

    def test_unknown_variant_rejected(self):
        with pytest.raises(ValidationError):
            make_hand_config("f2")
