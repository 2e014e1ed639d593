import math

import numpy as np
import pytest

from cqedgates import (
    GateInput,
    HilbertSpace,
    Protocol,
    PropagationError,
    PulseStep,
    SystemParams,
    average_fidelity,
    basis_index,
    ideal_cphase,
    ideal_output,
    ideal_protocol_two_output,
    inner_product,
    input_state,
    maximally_entangled_input,
    protocol_one,
    protocol_two,
    pulse_duration,
    run_protocol,
    run_protocol_with_log,
    state_fidelity,
    sweep_params,
)

SPACE = HilbertSpace(4)


def _random_inputs(count, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        b = rng.normal(size=4) + 1j * rng.normal(size=4)
        out.append(GateInput(*(b / np.linalg.norm(b))))
    return out


# schedules -------------------------------------------------------------------


def test_protocol_one_schedule():
    p = protocol_one()
    assert p.id == "I"
    got = [(s.transition, s.coupling_kind, s.pulse_area) for s in p.steps]
    assert got == [
        ("g2e2", "quantized", math.pi / 2),
        ("e1a1", "quantized", math.pi),
        ("g2e2", "quantized", 3 * math.pi / 2),
    ]


def test_protocol_two_schedule():
    p = protocol_two()
    assert p.id == "II"
    got = [(s.transition, s.coupling_kind, s.pulse_area) for s in p.steps]
    assert got == [
        ("g2e2", "quantized", math.pi / 2),
        ("e1a1", "classical", math.pi / 2),
        ("g1e1", "quantized", math.pi),
        ("e1a1", "classical", math.pi / 2),
        ("g2e2", "quantized", math.pi / 2),
    ]
    assert p.quantized_transitions == ("g2e2", "g1e1")


def test_pulse_step_validation():
    with pytest.raises(ValueError):
        PulseStep("g2e2", "quantized", -1.0, "bad")
    with pytest.raises(ValueError):
        PulseStep("g2e2", "classical", 1.0, "drive only talks to e1a1")
    with pytest.raises(ValueError):
        PulseStep("g9e9", "quantized", 1.0, "bad")


def test_pulse_duration_arithmetic():
    step = PulseStep("g2e2", "quantized", math.pi / 2, "mapping")
    params = SystemParams(g_g2e2=0.1)
    assert pulse_duration(step, params) == pytest.approx(5 * math.pi)


def test_pulse_duration_classical_equal_rate():
    # with Omega = g the classical pulse takes exactly as long as a quantized one
    g = 0.07
    params = sweep_params(g)
    quantized = PulseStep("g2e2", "quantized", math.pi / 2, "mapping")
    classical = PulseStep("e1a1", "classical", math.pi / 2, "rotate")
    assert pulse_duration(quantized, params) == pytest.approx(pulse_duration(classical, params))


def test_pulse_duration_rejects_zero_rate():
    step = PulseStep("g2e2", "quantized", math.pi, "mapping")
    with pytest.raises(ValueError):
        pulse_duration(step, SystemParams())


# gate inputs and ideal outputs ----------------------------------------------


def test_maximally_entangled_input():
    inp = maximally_entangled_input()
    assert sum(abs(b) ** 2 for b in inp.coefficients) == pytest.approx(1.0)
    assert len(set(inp.coefficients)) == 1


def test_maximally_entangled_overlap_with_its_cphase_image():
    # <in|out> = 1/4 + 1/4 + 1/4 - 1/4 = 1/2, so the fidelity is 1/4
    inp = maximally_entangled_input()
    out = ideal_cphase(inp, math.pi, SPACE)
    f = abs(inner_product(input_state(inp, SPACE), out)) ** 2
    assert f == pytest.approx(0.25, abs=1e-12)


def test_gate_input_requires_normalization():
    with pytest.raises(ValueError):
        GateInput(1.0, 1.0, 0.0, 0.0)
    normalized = GateInput.normalized(1.0, 1.0, 0.0, 0.0)
    assert abs(normalized.b1) == pytest.approx(1 / math.sqrt(2))


def test_ideal_cphase_theta_zero_is_identity():
    inp = _random_inputs(1, seed=5)[0]
    assert np.allclose(
        ideal_cphase(inp, 0.0, SPACE).amplitudes, input_state(inp, SPACE).amplitudes
    )


def test_ideal_cphase_pi_flips_b4():
    inp = _random_inputs(1, seed=6)[0]
    out = ideal_cphase(inp, math.pi, SPACE)
    idx4 = basis_index(SPACE, "e", "e", 0)
    assert out.amplitudes[idx4] == pytest.approx(-inp.b4)
    idx1 = basis_index(SPACE, "g", "g", 0)
    assert out.amplitudes[idx1] == pytest.approx(inp.b1)


def test_ideal_cphase_pi_twice_is_identity():
    inp = _random_inputs(1, seed=7)[0]
    once = ideal_cphase(inp, math.pi, SPACE)
    b = [once.amplitudes[basis_index(SPACE, q1, q2, 0)] for q1, q2 in
         (("g", "g"), ("g", "e"), ("e", "g"), ("e", "e"))]
    twice = ideal_cphase(GateInput(*b), math.pi, SPACE)
    assert np.allclose(twice.amplitudes, input_state(inp, SPACE).amplitudes)


def test_ideal_protocol_two_output_flips_b3():
    inp = _random_inputs(1, seed=8)[0]
    out = ideal_protocol_two_output(inp, SPACE)
    assert out.amplitudes[basis_index(SPACE, "e", "g", 0)] == pytest.approx(-inp.b3)
    assert out.amplitudes[basis_index(SPACE, "e", "e", 0)] == pytest.approx(inp.b4)
    no_b3 = GateInput.normalized(0.3, 0.4, 0.0, 0.5)
    assert np.allclose(
        ideal_protocol_two_output(no_b3, SPACE).amplitudes,
        input_state(no_b3, SPACE).amplitudes,
    )


def test_protocol_two_phase_pattern_is_cphase_conjugated_by_qubit2_flip():
    # both ideal maps are diagonal on the computational coefficients; swapping
    # g2 <-> e2 (b1 <-> b2, b3 <-> b4) turns one phase pattern into the other
    cphase = np.diag([1.0, 1.0, 1.0, -1.0])
    swap2 = np.array(
        [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=float
    )
    ptwo = np.diag([1.0, 1.0, -1.0, 1.0])
    assert np.allclose(swap2 @ cphase @ swap2, ptwo)


# single-step dynamics: the schedule arrows -----------------------------------


def _single_step_protocol(step):
    return Protocol(id="I", steps=(step,))


def test_mapping_step_arrow():
    # pi/2 on g2 <-> e2: |e2, 0> -> -i |g2, 1>
    step = PulseStep("g2e2", "quantized", math.pi / 2, "mapping")
    out = run_protocol(
        _single_step_protocol(step), sweep_params(0.05), "rwa",
        GateInput(0.0, 1.0, 0.0, 0.0), SPACE,
    )
    idx = basis_index(SPACE, "g", "g", 1)
    assert out.amplitudes[idx] == pytest.approx(-1j, abs=1e-10)


def test_cphase_step_arrow():
    # pi on e1 <-> a1 rotates |e1, 1> full circle to -|e1, 1>; reach the
    # photon through a mapping pulse first
    proto = Protocol(
        id="I",
        steps=(
            PulseStep("g2e2", "quantized", math.pi / 2, "mapping"),
            PulseStep("e1a1", "quantized", math.pi, "cphase"),
        ),
    )
    out = run_protocol(proto, sweep_params(0.05), "rwa", GateInput(0, 0, 0, 1.0), SPACE)
    idx = basis_index(SPACE, "e", "g", 1)
    assert out.amplitudes[idx] == pytest.approx(+1j, abs=1e-10)  # (-i) * (-1)


def test_back_mapping_three_half_pi_arrow():
    # 3 pi/2 on g2 <-> e2 sends |g2, 1> to +i |e2, 0> under the -i sin
    # convention; this sign is what makes the three-step schedule reproduce
    # the ideal gate (checked end to end by the oracle tests below)
    proto = Protocol(
        id="I",
        steps=(
            PulseStep("g2e2", "quantized", math.pi / 2, "mapping"),
            PulseStep("g2e2", "quantized", 3 * math.pi / 2, "back mapping"),
        ),
    )
    out = run_protocol(proto, sweep_params(0.05), "rwa", GateInput(0.0, 1.0, 0.0, 0.0), SPACE)
    idx = basis_index(SPACE, "g", "e", 0)
    # -i from the first pulse, +i from the second
    assert out.amplitudes[idx] == pytest.approx(1.0, abs=1e-10)


def test_drive_step_arrow():
    # classical pi/2 pulse: |e1> -> -i |a1>
    step = PulseStep("e1a1", "classical", math.pi / 2, "rotate")
    out = run_protocol(
        _single_step_protocol(step), sweep_params(0.1), "rwa",
        GateInput(0.0, 0.0, 1.0, 0.0), SPACE,
        integrator_tol=1e-12,
    )
    idx = basis_index(SPACE, "a", "g", 0)
    assert out.amplitudes[idx] == pytest.approx(-1j, abs=1e-9)


# end-to-end oracles ----------------------------------------------------------


@pytest.mark.parametrize("protocol_id", ["I", "II"])
def test_rwa_run_matches_ideal_output(protocol_id):
    proto = protocol_one() if protocol_id == "I" else protocol_two()
    params = sweep_params(0.1)
    inputs = [maximally_entangled_input(), *_random_inputs(20, seed=42)]
    for inp in inputs:
        out = run_protocol(proto, params, "rwa", inp, SPACE, integrator_tol=1e-11,
                           norm_tol=1e-6)
        ref = ideal_output(proto, inp, SPACE)
        assert state_fidelity(ref, out) >= 1.0 - 1e-8


def test_full_model_approaches_rwa_at_weak_coupling():
    proto = protocol_one()
    inp = maximally_entangled_input()
    out = run_protocol(proto, sweep_params(0.001), "full", inp, SPACE)
    ref = ideal_output(proto, inp, SPACE)
    assert state_fidelity(ref, out) >= 0.9999


def test_rwa_protocol_one_never_reaches_two_photons():
    proto = protocol_one()
    inp = maximally_entangled_input()
    big = HilbertSpace(15)
    out = run_protocol(proto, sweep_params(0.05), "rwa", inp, big)
    grid = np.abs(np.asarray(out.amplitudes).reshape(3, 3, 15)) ** 2
    assert grid[:, :, 2:].sum() < 1e-24


def test_rwa_protocol_one_truncation_insensitive():
    proto = protocol_one()
    inp = maximally_entangled_input()
    small = run_protocol(proto, sweep_params(0.05), "rwa", inp, HilbertSpace(3))
    large = run_protocol(proto, sweep_params(0.05), "rwa", inp, HilbertSpace(12))
    for q1, q2 in (("g", "g"), ("g", "e"), ("e", "g"), ("e", "e")):
        a = small.amplitudes[basis_index(small.space, q1, q2, 0)]
        b = large.amplitudes[basis_index(large.space, q1, q2, 0)]
        assert abs(a - b) < 1e-12


def test_full_model_leakage_grows_with_coupling():
    from cqedgates import leakage

    proto = protocol_one()
    inp = maximally_entangled_input()
    space = HilbertSpace(10)
    weak = leakage(run_protocol(proto, sweep_params(0.02), "full", inp, space))
    strong = leakage(run_protocol(proto, sweep_params(0.2), "full", inp, space))
    assert strong > weak


def test_fidelity_is_global_phase_insensitive():
    proto = protocol_one()
    inp = maximally_entangled_input()
    out = run_protocol(proto, sweep_params(0.1), "full", inp, SPACE)
    ref = ideal_output(proto, inp, SPACE)
    from cqedgates import State

    rotated = State(SPACE, np.exp(1j * 0.7321) * out.amplitudes)
    assert state_fidelity(ref, rotated) == pytest.approx(state_fidelity(ref, out), abs=1e-12)


def test_propagation_failures_carry_the_step_label():
    proto = protocol_two()
    with pytest.raises(PropagationError, match="rotate qubit 1"):
        run_protocol(
            proto, sweep_params(0.1), "full", maximally_entangled_input(), SPACE,
            integrator_tol=1e-6, norm_tol=1e-14,
        )


def test_run_log_reports_step_diagnostics():
    proto = protocol_two()
    _, log = run_protocol_with_log(
        proto, sweep_params(0.1), "rwa", maximally_entangled_input(), SPACE,
        integrator_tol=1e-10, norm_tol=1e-6,
    )
    assert [s.label for s in log.steps] == [
        "mapping", "rotate qubit 1", "cphase", "rotate qubit 1 back", "back mapping",
    ]
    # quantized steps are exact single-shot exponentials
    assert log.steps[0].steps_taken == 1
    assert log.steps[1].steps_taken > 10
    assert log.total_norm_drift < 1e-6


def test_run_protocol_rejects_unknown_model():
    with pytest.raises(ValueError):
        run_protocol(
            protocol_one(), sweep_params(0.1), "exact", maximally_entangled_input(), SPACE
        )


def test_average_fidelity_is_one_under_rwa():
    f = average_fidelity(protocol_one(), sweep_params(0.08), "rwa", SPACE)
    assert f == pytest.approx(1.0, abs=1e-10)
