"""Motor simulation, bus faults, transmission, and plant ground truth."""
import math

import pytest

from lapflex.actuation import (
    MOTOR_ADDRESS,
    DriverId,
    InstrumentPlant,
    MotorBus,
    MotorBusCommand,
    MotorId,
    MotorParams,
    MotorSim,
    SPEED_LIMIT,
    Transmission,
    estimate_state,
    motor_speed_commands,
    rest_state,
)
from lapflex.errors import BusError, BusTimeoutError, RangeError
from lapflex.flexure import DEFAULT_FLEXURE, tendon_from_bend
from lapflex.gripper import TABLE_I_GEOMETRY
from lapflex.pipeline import JointVelocityCommand


def make_bus(probe_ok: bool = True) -> MotorBus:
    params = MotorParams()
    return MotorBus({mid: MotorSim(params) for mid in MotorId}, probe_ok=probe_ok)


# ---- motor integrator ------------------------------------------------


def test_motor_first_order_response():
    params = MotorParams(omega_max=360.0, tau=0.030)
    sim = MotorSim(params)
    sim.set_target(360.0)
    sim.step(0.030)  # one time constant
    assert sim.omega == pytest.approx(360.0 * (1.0 - math.exp(-1.0)), rel=1e-12)
    # closed form: angle = w_t*t + (w0-w_t)*tau*(1-e^(-t/tau)) with w0=0
    expect = 360.0 * 0.030 - 360.0 * 0.030 * (1.0 - math.exp(-1.0))
    assert sim.angle == pytest.approx(expect, rel=1e-12)


def test_motor_substeps_match_single_step():
    a = MotorSim(MotorParams())
    b = MotorSim(MotorParams())
    a.set_target(200.0)
    b.set_target(200.0)
    a.step(0.1)
    for _ in range(10):
        b.step(0.01)
    assert b.angle == pytest.approx(a.angle, abs=1e-12)
    assert b.omega == pytest.approx(a.omega, abs=1e-12)


def test_motor_speed_snaps_to_rest():
    sim = MotorSim(MotorParams())
    sim.set_target(100.0)
    sim.step(0.5)
    sim.set_target(0.0)
    for _ in range(40):
        sim.step(0.05)
    assert sim.omega == 0.0  # exactly zero once decayed below the rest band


def test_motor_target_saturates_at_omega_max():
    sim = MotorSim(MotorParams(omega_max=360.0))
    sim.set_target(1e6)
    assert sim.target == 360.0
    sim.set_target(-1e6)
    assert sim.target == -360.0


def test_motor_rejects_nonpositive_dt():
    sim = MotorSim(MotorParams())
    with pytest.raises(ValueError):
        sim.step(0.0)


def test_encoder_floor_quantization():
    sim = MotorSim(MotorParams(ticks_per_rev=1200))
    sim.angle = 0.2999  # just under one tick (0.3 deg at 1200 cpr)
    assert sim.ticks == 0
    sim.angle = 0.3001
    assert sim.ticks == 1
    sim.angle = -0.0001  # floor, not truncation: negative angles round down
    assert sim.ticks == -1


# ---- bus ------------------------------------------------------------


def test_bus_requires_probe_before_commands():
    bus = make_bus()
    with pytest.raises(BusError):
        bus.send_speed(MotorBusCommand(DriverId.DRIVER_A, 0, 100.0))
    bus.probe()
    assert bus.initialized
    assert bus.send_speed(MotorBusCommand(DriverId.DRIVER_A, 0, 100.0))


def test_bus_probe_failure():
    bus = make_bus(probe_ok=False)
    with pytest.raises(BusError):
        bus.probe()
    assert not bus.initialized


def test_bus_speed_saturates_at_full_scale():
    bus = make_bus()
    bus.probe()
    sim = bus._motors[MotorId.FLEXION]
    bus.send_speed(MotorBusCommand(DriverId.DRIVER_A, 0, 5000.0))
    assert sim.target == sim.params.omega_max
    bus.send_speed(MotorBusCommand(DriverId.DRIVER_A, 0, -SPEED_LIMIT / 2))
    assert sim.target == -sim.params.omega_max / 2.0


def test_bus_rejects_unknown_address_and_bad_speed():
    bus = make_bus()
    bus.probe()
    with pytest.raises(BusError):
        bus.send_speed(MotorBusCommand(DriverId.DRIVER_C, 1, 10.0))  # no motor there
    with pytest.raises(BusError):
        bus.send_speed(MotorBusCommand(DriverId.DRIVER_A, 0, math.nan))
    with pytest.raises(ValueError):
        MotorBusCommand(DriverId.DRIVER_A, 2, 10.0)  # drivers have channels 0 and 1


def test_bus_timeout_injection_consumes_count():
    bus = make_bus()
    bus.probe()
    bus.inject_timeout(2)
    for _ in range(2):
        with pytest.raises(BusTimeoutError):
            bus.send_speed(MotorBusCommand(DriverId.DRIVER_B, 0, 10.0))
    assert bus.send_speed(MotorBusCommand(DriverId.DRIVER_B, 0, 10.0))


def test_bus_encoder_fault_injection():
    bus = make_bus()
    bus.probe()
    sim = bus._motors[MotorId.GRIPPER]
    sim.angle = 720.0
    assert bus.read_ticks(MotorId.GRIPPER) == 2400
    bus.inject_encoder_stuck(MotorId.GRIPPER)
    sim.angle = 1080.0
    assert bus.read_ticks(MotorId.GRIPPER) == 2400  # frozen
    bus.clear_faults()
    assert bus.read_ticks(MotorId.GRIPPER) == 3600
    bus.inject_encoder_jump(MotorId.GRIPPER, 500)
    assert bus.read_ticks(MotorId.GRIPPER) == 4100


def test_motor_address_map_is_complete_and_unique():
    assert set(MOTOR_ADDRESS) == set(MotorId)
    assert len(set(MOTOR_ADDRESS.values())) == len(MotorId)
    for driver, channel in MOTOR_ADDRESS.values():
        assert channel in (0, 1)
        assert isinstance(driver, DriverId)


# ---- transmission ----------------------------------------------------


def test_transmission_declared_defaults():
    trans = Transmission()
    assert trans.capstan_mm_per_rev == 2.4
    assert trans.mm_per_tick(1200) == pytest.approx(0.002, abs=1e-15)
    assert trans.wire_travel(360.0) == pytest.approx(2.4, abs=1e-12)
    assert trans.motor_rate_for_wire(2.4) == pytest.approx(360.0, abs=1e-9)
    assert trans.motor_angle_for_travel(1.2) == pytest.approx(180.0, abs=1e-9)


def test_transmission_round_trip():
    trans = Transmission(capstan_mm_per_rev=3.1)
    for angle in (0.0, 12.5, 700.0, -90.0):
        assert trans.motor_angle_for_travel(trans.wire_travel(angle)) == \
            pytest.approx(angle, abs=1e-9)


# ---- joint-space to motor-space -------------------------------------


def test_motor_speed_commands_gripper_channel():
    trans = Transmission()
    params = MotorParams()
    cmd = JointVelocityCommand(q3dot=2.0)  # mm/s
    speeds = motor_speed_commands(cmd, 0.0, DEFAULT_FLEXURE, trans, params)
    # 2 mm/s through a 2.4 mm/rev capstan is 300 deg/s = 5/6 full scale
    assert speeds[MotorId.GRIPPER] == pytest.approx(300.0 / 360.0 * SPEED_LIMIT, rel=1e-12)
    assert speeds[MotorId.FLEXION] == 0.0
    assert speeds[MotorId.EXTENSION] == 0.0


def test_motor_speed_commands_antagonistic_pair():
    trans = Transmission()
    params = MotorParams()
    cmd = JointVelocityCommand(q1dot=30.0)  # deg/s bend
    speeds = motor_speed_commands(cmd, 0.0, DEFAULT_FLEXURE, trans, params, tension_gain=1.0)
    assert speeds[MotorId.FLEXION] == pytest.approx(-speeds[MotorId.EXTENSION], rel=1e-12)
    assert speeds[MotorId.FLEXION] > 0.0
    # with tension margin the take-up side leads
    speeds = motor_speed_commands(cmd, 0.0, DEFAULT_FLEXURE, trans, params, tension_gain=1.25)
    assert speeds[MotorId.FLEXION] == pytest.approx(-1.25 * speeds[MotorId.EXTENSION], rel=1e-12)


def test_motor_speed_commands_head_and_shaft():
    trans = Transmission(head_deg_per_motor_deg=0.5)
    params = MotorParams()
    speeds = motor_speed_commands(
        JointVelocityCommand(q2dot=90.0, q4dot=-90.0), 0.0, DEFAULT_FLEXURE, trans, params)
    # 0.5 output deg per motor deg means the motor runs twice as fast
    assert speeds[MotorId.HEAD] == pytest.approx(180.0 / 360.0 * SPEED_LIMIT, rel=1e-12)
    assert speeds[MotorId.SHAFT] == pytest.approx(-90.0 / 360.0 * SPEED_LIMIT, rel=1e-12)


# ---- state estimation ------------------------------------------------


def zero_ticks() -> dict[MotorId, int]:
    return {mid: 0 for mid in MotorId}


def test_estimate_state_at_rest(geom):
    state = estimate_state(zero_ticks(), geom, DEFAULT_FLEXURE, Transmission(), MotorParams())
    assert state == rest_state(geom)
    assert state.q3 == 0.0 and state.q1 == 0.0


def test_estimate_state_round_numbers(geom):
    trans = Transmission()
    params = MotorParams()
    ticks = zero_ticks()
    ticks[MotorId.GRIPPER] = 1000   # 2.0 mm at 0.002 mm/tick
    ticks[MotorId.HEAD] = 300       # 90 deg at 0.3 deg/tick
    ticks[MotorId.SHAFT] = -300     # wraps to 270 deg
    state = estimate_state(ticks, geom, DEFAULT_FLEXURE, trans, params)
    assert state.q3 == pytest.approx(2.0, abs=1e-12)
    assert state.q2 == pytest.approx(90.0, abs=1e-9)
    assert state.q4 == pytest.approx(270.0, abs=1e-9)
    assert state.jaw.total_angle == pytest.approx(37.912133096, abs=1e-6)


def test_estimate_state_flexion_tendon(geom):
    trans = Transmission()
    params = MotorParams()
    take_up = tendon_from_bend(DEFAULT_FLEXURE, 45.0).flex_tendon
    ticks = zero_ticks()
    ticks[MotorId.FLEXION] = round(take_up / trans.mm_per_tick(params.ticks_per_rev))
    state = estimate_state(ticks, geom, DEFAULT_FLEXURE, trans, params)
    # quantized to the nearest tick, so within one tick's worth of bend
    assert state.q1 == pytest.approx(45.0, abs=0.1)


def test_estimate_state_rejects_implausible_counts(geom):
    trans = Transmission()
    params = MotorParams()
    bad = zero_ticks()
    bad[MotorId.GRIPPER] = 10**6  # far beyond the slider's reachable travel
    with pytest.raises(RangeError):
        estimate_state(bad, geom, DEFAULT_FLEXURE, trans, params)
    bad = zero_ticks()
    bad[MotorId.FLEXION] = -5000  # negative tendon take-up
    with pytest.raises(RangeError):
        estimate_state(bad, geom, DEFAULT_FLEXURE, trans, params)


# ---- plant -----------------------------------------------------------


def make_plant(**kw) -> InstrumentPlant:
    return InstrumentPlant(TABLE_I_GEOMETRY, DEFAULT_FLEXURE, MotorParams(),
                           Transmission(), **kw)


def test_plant_truth_tracks_motors():
    plant = make_plant()
    plant.bus.probe()
    driver, channel = MOTOR_ADDRESS[MotorId.GRIPPER]
    plant.bus.send_speed(MotorBusCommand(driver, channel, 400.0))  # 180 deg/s
    for _ in range(100):
        plant.step(0.01)
    truth = plant.true_state()
    est = plant.estimated_state()
    # 1 s at 180 deg/s through 2.4 mm/rev: 1.2 mm minus the lag transient
    assert 1.0 < truth.q3 < 1.2
    # estimate differs from truth only by encoder quantization
    assert abs(est.q3 - truth.q3) <= Transmission().mm_per_tick(1200) + 1e-12


def test_plant_hard_stop_stalls_gripper():
    plant = make_plant()
    plant.bus.probe()
    driver, channel = MOTOR_ADDRESS[MotorId.GRIPPER]
    plant.bus.send_speed(MotorBusCommand(driver, channel, -800.0))  # drive closed
    for _ in range(200):
        plant.step(0.01)
    assert plant.true_state().q3 == 0.0  # stalled at the closed stop
    plant.bus.send_speed(MotorBusCommand(driver, channel, 800.0))  # drive open hard
    for _ in range(600):
        plant.step(0.01)
    lo, hi = plant.q3_range
    assert plant.true_state().q3 == pytest.approx(hi, abs=1e-9)


def test_plant_flexion_stalls_at_straight_and_full_bend():
    plant = make_plant()
    plant.bus.probe()
    driver, channel = MOTOR_ADDRESS[MotorId.FLEXION]
    plant.bus.send_speed(MotorBusCommand(driver, channel, -800.0))
    for _ in range(100):
        plant.step(0.01)
    assert plant.true_state().q1 == 0.0
    plant.bus.send_speed(MotorBusCommand(driver, channel, 800.0))
    for _ in range(800):
        plant.step(0.01)
    assert plant.true_state().q1 == pytest.approx(DEFAULT_FLEXURE.max_bend, abs=1e-6)


def test_plant_head_angle_wraps():
    plant = make_plant()
    plant.bus.probe()
    driver, channel = MOTOR_ADDRESS[MotorId.HEAD]
    plant.bus.send_speed(MotorBusCommand(driver, channel, 800.0))  # 360 deg/s
    for _ in range(150):
        plant.step(0.01)
    q2 = plant.true_state().q2
    assert 0.0 <= q2 < 360.0
