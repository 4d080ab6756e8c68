#include "czpulse/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace czpulse {

std::pair<int, int> gauge_of(GaugeVariant v) {
    switch (v) {
        case GaugeVariant::B: return {0, 0};
        case GaugeVariant::C: return {1, 1};
        case GaugeVariant::D: return {0, 1};
        case GaugeVariant::E: return {1, 0};
    }
    return {0, 0};
}

bool GaugeAssignment::alternates() const {
    for (size_t k = 0; k + 1 < gauges.size(); ++k)
        if (gauges[k].second == gauges[k + 1].first) return false;
    return true;
}

GaugeAssignment assign_gauges(const GateSequence& seq) {
    GaugeAssignment a;
    a.gauges.assign(seq.gates.size(), {0, 1});
    return a;
}

namespace {

double sign_angle(int s) { return s == 0 ? kPi : -kPi; }

void check_gauge_bit(int s) {
    if (s != 0 && s != 1) throw std::invalid_argument("gauge bits must be 0 or 1");
}

void emit_toffoli(std::vector<PulseOp>& out, const std::vector<int>& controls, int target,
                  int s1, int s2) {
    const double enc = sign_angle(s1);
    const double dec = sign_angle(s2);
    // Both target pulses keep the encode sign: an unequal pair would undo the
    // conditional phase instead of producing it.
    const double tgt = enc;
    const double phi_a = (s1 == s2) ? -kPi / 2.0 : kPi / 2.0;
    const double phi_b = -phi_a;

    out.push_back(rsb(controls.front(), enc));
    for (size_t i = 1; i < controls.size(); ++i) out.push_back(rsb_aux(controls[i], enc));
    out.push_back(carrier(target, kPi / 2.0, phi_a));
    out.push_back(rsb_aux(target, tgt));
    out.push_back(rsb_aux(target, tgt));
    out.push_back(carrier(target, kPi / 2.0, phi_b));
    for (size_t i = controls.size(); i-- > 1;) out.push_back(rsb_aux(controls[i], dec));
    out.push_back(rsb(controls.front(), dec));
}

void emit_mc_gate(std::vector<PulseOp>& out, const GateSpec& core, int s1, int s2) {
    const std::vector<int>& c = core.control_ions;
    const int n = core.n_controls();
    const int last = c.back();
    const double enc = sign_angle(s1);
    const double dec = sign_angle(s2);

    if (n == 1) {
        // The sideband dressing of the last control needs a distinct first
        // control to hold the phonon; with one control the gate is the
        // single-controlled primitive itself.
        out.push_back(target_unitary(last, core.target_label));
        return;
    }

    out.push_back(rsb(c.front(), enc));
    for (int i = 1; i < n; ++i) out.push_back(rsb_aux(c[i], enc));

    out.push_back(carrier(last, kPi, s1 * kPi));
    out.push_back(rsb(last, enc));
    out.push_back(target_unitary(last, core.target_label));
    out.push_back(rsb(last, dec));
    out.push_back(carrier(last, kPi, s2 * kPi));

    for (int i = n; i-- > 1;) out.push_back(rsb_aux(c[i], dec));
    out.push_back(rsb(c.front(), dec));

    if (s1 == s2) out.push_back(z_gate(last));
}

void emit_gate(std::vector<PulseOp>& out, const GateSpec& g, int s1, int s2) {
    auto ex = expand_zero_controls(g);
    for (int ion : ex.pre_x) out.push_back(x_gate(ion));
    if (g.style == GateSpec::Style::Toffoli) {
        if (ex.core.target_ions.size() != 1)
            throw std::invalid_argument("toffoli lowering needs a single target qubit");
        if (ex.core.control_ions.size() < 1)
            throw std::invalid_argument("toffoli lowering needs at least one control");
        emit_toffoli(out, ex.core.control_ions, ex.core.target_ions.front(), s1, s2);
    } else {
        emit_mc_gate(out, ex.core, s1, s2);
    }
    for (int ion : ex.post_x) out.push_back(x_gate(ion));
}

}  // namespace

Schedule lower_toffoli(int n_qubits, int s1, int s2) {
    if (n_qubits < 2) throw std::invalid_argument("toffoli needs at least two qubits");
    check_gauge_bit(s1);
    check_gauge_bit(s2);
    std::vector<int> controls(n_qubits - 1);
    for (int i = 0; i < n_qubits - 1; ++i) controls[i] = i;
    Schedule s;
    s.ion_count = n_qubits;
    emit_toffoli(s.pulses, controls, n_qubits - 1, s1, s2);
    return s;
}

Schedule lower_toffoli(int n_qubits, GaugeVariant v) {
    auto [s1, s2] = gauge_of(v);
    return lower_toffoli(n_qubits, s1, s2);
}

Schedule lower_mc_gate(const GateSpec& core, int s1, int s2) {
    if (!core.all_ones())
        throw std::invalid_argument("controls must be all ones; expand zero controls first");
    check_gauge_bit(s1);
    check_gauge_bit(s2);
    Schedule s;
    int max_ion = 0;
    for (int ion : core.control_ions) max_ion = std::max(max_ion, ion);
    for (int ion : core.target_ions) max_ion = std::max(max_ion, ion);
    s.ion_count = max_ion + 1;
    emit_mc_gate(s.pulses, core, s1, s2);
    return s;
}

int c_index(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) throw std::invalid_argument("control strings differ in length");
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return static_cast<int>(i) + 1;
    return static_cast<int>(a.size()) + 2;
}

CountReport predicted_pulse_count(const std::vector<std::string>& control_strings) {
    if (control_strings.empty()) throw std::invalid_argument("need at least one control string");
    const auto n = control_strings.front().size();
    for (const auto& s : control_strings)
        if (s.size() != n) throw std::invalid_argument("control strings differ in length");

    CountReport r;
    const std::int64_t m = static_cast<std::int64_t>(control_strings.size());
    r.baseline = 2 * m * (static_cast<std::int64_t>(n) + 1);
    for (size_t k = 0; k + 1 < control_strings.size(); ++k) {
        const int c = c_index(control_strings[k], control_strings[k + 1]);
        r.c_values.push_back(c);
        r.eliminated += 2 * (c - 1);
    }
    r.final_count = r.baseline - r.eliminated;
    return r;
}

namespace {

constexpr double kAngleTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) < kAngleTol; }

// |a - b| == pi modulo 2*pi
bool phases_opposite(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2.0 * kPi);
    return near(d, kPi);
}

bool inverse_pair(const PulseOp& p, const PulseOp& q) {
    if (p.kind != q.kind) return false;
    switch (p.kind) {
        case PulseKind::Rsb:
        case PulseKind::RsbAux:
            return near(q.theta, -p.theta) && near(q.phi, p.phi);
        case PulseKind::Carrier:
            return (near(q.theta, -p.theta) && near(q.phi, p.phi)) ||
                   (near(q.theta, p.theta) && phases_opposite(q.phi, p.phi));
        case PulseKind::XGate:
            // X.X is identity on {g,e} up to a -1 that is global on protocol states
            return true;
        default:
            return false;
    }
}

bool touches_ion(const PulseOp& op, int ion) {
    // A target primitive acts on its control ion and the target register; it
    // is treated as a barrier on every ion.
    if (op.kind == PulseKind::TargetUnitary) return true;
    return op.ion == ion;
}

// Whether `mid` (on another ion) commutes with a pulse on `ion`: single-ion
// operations without motional coupling always do; two sideband pulses share
// the mode and do not.
bool slides_past(const PulseOp& mid, const PulseOp& endpoint) {
    if (mid.kind == PulseKind::TargetUnitary) return false;
    if (mid.touches_mode() && endpoint.touches_mode()) return false;
    return true;
}

}  // namespace

Schedule cancel_pulses(const Schedule& s) {
    Schedule out = s;
    auto& ops = out.pulses;
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < ops.size(); ++i) {
            // find the next pulse touching the same ion
            size_t j = i + 1;
            while (j < ops.size() && !touches_ion(ops[j], ops[i].ion)) ++j;
            if (j >= ops.size()) continue;
            if (!inverse_pair(ops[i], ops[j])) continue;
            bool ok = true;
            for (size_t k = i + 1; k < j && ok; ++k) ok = slides_past(ops[k], ops[i]);
            if (!ok) continue;
            ops.erase(ops.begin() + j);
            ops.erase(ops.begin() + i);
            changed = true;
            break;  // restart the leftmost-first scan
        }
    }
    return out;
}

Schedule compile(const GateSequence& seq, bool optimize) {
    if (seq.gates.empty()) throw std::invalid_argument("empty gate sequence");
    GaugeAssignment gauges;
    if (optimize) {
        gauges = assign_gauges(seq);
    } else {
        gauges.gauges.assign(seq.gates.size(), {0, 0});
    }

    Schedule s;
    s.ion_count = seq.qubit_count;
    for (size_t k = 0; k < seq.gates.size(); ++k) {
        const auto [s1, s2] = seq.gates[k].gauge.value_or(gauges.gauges[k]);
        emit_gate(s.pulses, seq.gates[k], s1, s2);
    }
    for (const auto& op : s.pulses)
        if (op.ion >= s.ion_count) s.ion_count = op.ion + 1;

    if (optimize) s = cancel_pulses(s);
    return s;
}

LabelTable target_label_table(const GateSequence& seq) {
    LabelTable table;
    for (const auto& g : seq.gates) table[g.target_label] = g.target_matrix;
    return table;
}

}  // namespace czpulse
