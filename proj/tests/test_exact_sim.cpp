#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "czpulse/compiler.hpp"
#include "czpulse/exact_sim.hpp"

using namespace czpulse;

namespace {

const PhysParams kP{};

cplx amp_of(const StateVector& psi, const std::vector<int>& levels, int n) {
    return psi.amps[psi.index(levels, n)];
}

StateVector random_state(int ions, int n_max, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    StateVector psi = StateVector::zero(ions, n_max);
    for (long i = 0; i < psi.dim(); ++i) psi.amps[i] = cplx(g(rng), g(rng));
    psi.amps.normalize();
    return psi;
}

}  // namespace

TEST_CASE("plain sideband pi actions on the protocol basis") {
    const cplx mi(0, -1), pi_(0, 1);
    SUBCASE("|0>|g> fixed") {
        StateVector psi = StateVector::basis(1, 2, {0}, 0);
        apply_pulse(psi, rsb(0, kPi), kP);
        CHECK(std::abs(amp_of(psi, {0}, 0) - cplx(1, 0)) < 1e-12);
    }
    SUBCASE("|0>|e> -> -i|1>|g> under +pi, +i under -pi") {
        StateVector psi = StateVector::basis(1, 2, {1}, 0);
        apply_pulse(psi, rsb(0, kPi), kP);
        CHECK(std::abs(amp_of(psi, {0}, 1) - mi) < 1e-12);
        psi = StateVector::basis(1, 2, {1}, 0);
        apply_pulse(psi, rsb(0, -kPi), kP);
        CHECK(std::abs(amp_of(psi, {0}, 1) - pi_) < 1e-12);
    }
    SUBCASE("|1>|g> -> -i|0>|e>") {
        StateVector psi = StateVector::basis(1, 2, {0}, 1);
        apply_pulse(psi, rsb(0, kPi), kP);
        CHECK(std::abs(amp_of(psi, {1}, 0) - mi) < 1e-12);
    }
}

TEST_CASE("auxiliary sideband pi actions on the protocol basis") {
    const cplx mi(0, -1);
    SUBCASE("|0>|g>, |0>|e>, |1>|e> all fixed") {
        for (auto [level, n] : {std::pair{0, 0}, std::pair{1, 0}, std::pair{1, 1}}) {
            StateVector psi = StateVector::basis(1, 2, {level}, n);
            apply_pulse(psi, rsb_aux(0, kPi), kP);
            CHECK(std::abs(amp_of(psi, {level}, n) - cplx(1, 0)) < 1e-12);
        }
    }
    SUBCASE("|0>|f> -> -i|1>|g> and |1>|g> -> -i|0>|f>") {
        StateVector psi = StateVector::basis(1, 2, {2}, 0);
        apply_pulse(psi, rsb_aux(0, kPi), kP);
        CHECK(std::abs(amp_of(psi, {0}, 1) - mi) < 1e-12);
        psi = StateVector::basis(1, 2, {0}, 1);
        apply_pulse(psi, rsb_aux(0, kPi), kP);
        CHECK(std::abs(amp_of(psi, {2}, 0) - mi) < 1e-12);
    }
}

TEST_CASE("carrier leaves f alone and rotates g,e at any fock index") {
    StateVector psi = StateVector::basis(1, 2, {2}, 1);
    apply_pulse(psi, carrier(0, 1.1, 0.3), kP);
    CHECK(std::abs(amp_of(psi, {2}, 1) - cplx(1, 0)) < 1e-12);

    psi = StateVector::basis(1, 2, {0}, 2);
    apply_pulse(psi, carrier(0, kPi, 0.0), kP);
    CHECK(std::abs(amp_of(psi, {1}, 2) - cplx(0, -1)) < 1e-12);
}

TEST_CASE("z gate flips the sign of e only") {
    StateVector psi = StateVector::zero(1, 1);
    psi.amps[psi.index({0}, 0)] = 0.5;
    psi.amps[psi.index({1}, 0)] = 0.5;
    psi.amps[psi.index({2}, 0)] = std::sqrt(0.5);
    apply_pulse(psi, z_gate(0), kP);
    CHECK(std::abs(amp_of(psi, {0}, 0) - cplx(0.5, 0)) < 1e-12);
    CHECK(std::abs(amp_of(psi, {1}, 0) - cplx(-0.5, 0)) < 1e-12);
    CHECK(std::abs(amp_of(psi, {2}, 0) - cplx(std::sqrt(0.5), 0)) < 1e-12);
}

TEST_CASE("target unitary fires only on the e level of its control ion") {
    Mat x = *builtin_matrix("X");
    LabelTable labels{{"U", x}};
    for (int level = 0; level < 3; ++level) {
        StateVector psi = StateVector::basis(2, 1, {level, 0}, 0);
        apply_pulse(psi, target_unitary(0, "U"), kP, &labels);
        const int expect_target = level == 1 ? 1 : 0;
        CHECK(std::abs(amp_of(psi, {level, expect_target}, 0) - cplx(1, 0)) < 1e-12);
    }
    StateVector psi = StateVector::basis(2, 1, {1, 0}, 0);
    CHECK_THROWS(apply_pulse(psi, target_unitary(0, "missing"), kP, &labels));
    CHECK_THROWS(apply_pulse(psi, target_unitary(0, "U"), kP, nullptr));
}

TEST_CASE("norm is preserved by every pulse kind and angle") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(-2 * kPi, 2 * kPi);
    LabelTable labels{{"U", *builtin_matrix("H")}};
    for (int trial = 0; trial < 120; ++trial) {
        StateVector psi = random_state(3, 3, 100 + trial);
        PulseOp op;
        switch (trial % 6) {
            case 0: op = rsb(trial % 3, angle(rng), angle(rng)); break;
            case 1: op = rsb_aux(trial % 3, angle(rng), angle(rng)); break;
            case 2: op = carrier(trial % 3, angle(rng), angle(rng)); break;
            case 3: op = x_gate(trial % 3); break;
            case 4: op = z_gate(trial % 3); break;
            case 5: op = target_unitary(0, "U"); break;
        }
        apply_pulse(psi, op, kP, &labels);
        CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("schedule unitary basics") {
    Schedule empty;
    empty.ion_count = 2;
    Mat u = schedule_unitary(empty, 2, 1, kP);
    CHECK((u - Mat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() < 1e-12);

    // a schedule followed by its reverse with negated angles is the identity
    Schedule s;
    s.ion_count = 2;
    s.pulses = {rsb(0, kPi), rsb_aux(1, -kPi), carrier(0, kPi / 3, 0.7), rsb(1, kPi)};
    Schedule inv = s;
    std::reverse(inv.pulses.begin(), inv.pulses.end());
    for (auto& op : inv.pulses) op.theta = -op.theta;
    Schedule both = s;
    both.pulses.insert(both.pulses.end(), inv.pulses.begin(), inv.pulses.end());
    Mat v = schedule_unitary(both, 2, 3, kP);
    CHECK((v - Mat::Identity(v.rows(), v.cols())).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("equivalence up to a global phase") {
    Mat toffoli = ideal_unitary(make_multi_controlled("11", *builtin_matrix("X")), 3);
    SUBCASE("identical") {
        auto r = equiv_up_to_global_phase(toffoli, toffoli);
        CHECK(r.equal);
        CHECK(std::abs(r.phase) < 1e-12);
    }
    SUBCASE("negated") {
        auto r = equiv_up_to_global_phase(Mat(-toffoli), toffoli);
        CHECK(r.equal);
        CHECK(std::abs(std::abs(r.phase) - kPi) < 1e-12);
    }
    SUBCASE("distinct operators differ") {
        GateSpec cnot_on_23 = make_multi_controlled("1", *builtin_matrix("X"));
        cnot_on_23.control_ions = {1};
        cnot_on_23.target_ions = {2};
        Mat other = ideal_unitary(cnot_on_23, 3);
        CHECK_FALSE(equiv_up_to_global_phase(other, toffoli).equal);
    }
}

TEST_CASE("compiled toffoli equals the ideal gate on the protocol subspace") {
    for (int n = 2; n <= 4; ++n) {
        for (auto v : {GaugeVariant::B, GaugeVariant::C, GaugeVariant::D, GaugeVariant::E}) {
            Schedule s = lower_toffoli(n, v);
            auto block = computational_block(s, n, 2, kP);
            CHECK(block.max_leakage < 1e-10);
            Mat ideal = ideal_unitary(make_multi_controlled(std::string(n - 1, '1'), *builtin_matrix("X")), n);
            auto r = equiv_up_to_global_phase(block.block, ideal, 1e-10);
            CHECK(r.equal);
        }
    }
}

TEST_CASE("compiled mc gate equals the ideal controlled unitary for every gauge") {
    Mat u = *builtin_matrix("H");
    LabelTable labels{{"U", u}};
    for (int n = 2; n <= 3; ++n) {
        GateSpec core = make_multi_controlled(std::string(n, '1'), u);
        Mat ideal = ideal_unitary(core, n + 1);
        for (int s1 : {0, 1})
            for (int s2 : {0, 1}) {
                Schedule s = lower_mc_gate(core, s1, s2);
                auto block = computational_block(s, n + 1, 2, kP, &labels);
                CHECK(block.max_leakage < 1e-10);
                auto r = equiv_up_to_global_phase(block.block, ideal, 1e-10);
                CHECK(r.equal);
            }
    }
}

namespace {

// expected trace amplitudes from the step-by-step phase bookkeeping
struct ExpectedStep {
    std::vector<int> levels;  // three controls; target handled separately
    int n = 0;
    cplx phase;
    bool u_applied = false;
};

std::vector<ExpectedStep> expected_steps(int case_id, int s1, int s2) {
    const double sgn1 = s1 == 0 ? 1.0 : -1.0;
    const cplx mi(0, -1);
    const double middle = ((s1 + s2 + 1) % 2 == 0) ? 1.0 : -1.0;  // (-1)^(s1+s2+1)
    switch (case_id) {
        case 1:
            return {{{0, 1, 0}, 0, 1.0, false},
                    {{0, 1, 0}, 0, 1.0, false},
                    {{0, 1, 0}, 0, 1.0, false},
                    {{0, 1, 0}, 0, 1.0, false}};
        case 2:
            return {{{0, 1, 1}, 0, 1.0, false},
                    {{0, 1, 1}, 0, middle, false},
                    {{0, 1, 1}, 0, middle, false},
                    {{0, 1, 1}, 0, 1.0, false}};
        case 3:
            return {{{0, 2, 0}, 0, -1.0, false},
                    {{0, 2, 0}, 0, -1.0, false},
                    {{1, 0, 0}, 0, 1.0, false},
                    {{1, 0, 0}, 0, 1.0, false}};
        case 4:
            return {{{0, 2, 1}, 0, -1.0, false},
                    {{0, 2, 1}, 0, -middle, false},  // (-1)^(s1+s2)
                    {{1, 0, 1}, 0, middle, false},
                    {{1, 0, 1}, 0, 1.0, false}};
        case 5:
            return {{{0, 1, 2}, 0, -1.0, false},
                    {{0, 1, 2}, 0, -1.0, false},
                    {{1, 1, 0}, 0, 1.0, false},
                    {{1, 1, 0}, 0, 1.0, false}};
        case 6:
            return {{{0, 1, 1}, 1, mi * sgn1, false},
                    {{0, 1, 1}, 1, mi * sgn1, true},
                    {{1, 1, 1}, 0, middle, true},
                    {{1, 1, 1}, 0, 1.0, true}};
        default:
            throw std::logic_error("bad case");
    }
}

}  // namespace

TEST_CASE("step-resolved traces reproduce the six-case phase ledger for all gauges") {
    Mat u = *builtin_matrix("H");
    for (int case_id = 1; case_id <= 6; ++case_id) {
        for (int s1 : {0, 1})
            for (int s2 : {0, 1}) {
                CAPTURE(case_id);
                CAPTURE(s1);
                CAPTURE(s2);
                auto records = trace_case(case_id, s1, s2, u, kP);
                auto expected = expected_steps(case_id, s1, s2);
                for (int step = 1; step <= 4; ++step) {
                    const auto& exp = expected[step - 1];
                    std::map<std::string, cplx> want;
                    if (exp.u_applied) {
                        for (int t = 0; t < 2; ++t) {
                            auto levels = exp.levels;
                            levels.push_back(t);
                            if (std::abs(u(t, 0)) > 1e-14)
                                want[basis_label(levels, exp.n)] = exp.phase * u(t, 0);
                        }
                    } else {
                        auto levels = exp.levels;
                        levels.push_back(0);
                        want[basis_label(levels, exp.n)] = exp.phase;
                    }
                    std::map<std::string, cplx> got;
                    for (const auto& rec : records)
                        if (rec.step == step) got[rec.basis_label] = rec.amplitude;
                    REQUIRE(got.size() == want.size());
                    for (const auto& [label, amp] : want) {
                        REQUIRE(got.count(label) == 1);
                        CHECK(std::abs(got[label] - amp) < 1e-10);
                    }
                }
            }
    }
}

TEST_CASE("controls shelved in f and the used fock level both return to zero") {
    // after a full compiled sequence every computational input leaves the
    // protocol subspace empty of f population and excited mode levels
    GateSequence seq = cswap_decomposition(2);
    Schedule s = compile(seq, true);
    auto block = computational_block(s, 4, 2, kP);
    CHECK(block.max_leakage < 1e-10);
}
