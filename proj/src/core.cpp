#include "czpulse/core.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace czpulse {

std::string_view to_string(PulseKind kind) {
    switch (kind) {
        case PulseKind::Rsb: return "rsb";
        case PulseKind::RsbAux: return "rsb_aux";
        case PulseKind::Carrier: return "carrier";
        case PulseKind::XGate: return "x";
        case PulseKind::ZGate: return "z";
        case PulseKind::TargetUnitary: return "target";
    }
    return "?";
}

std::optional<PulseKind> pulse_kind_from(std::string_view name) {
    if (name == "rsb") return PulseKind::Rsb;
    if (name == "rsb_aux") return PulseKind::RsbAux;
    if (name == "carrier") return PulseKind::Carrier;
    if (name == "x") return PulseKind::XGate;
    if (name == "z") return PulseKind::ZGate;
    if (name == "target") return PulseKind::TargetUnitary;
    return std::nullopt;
}

PulseOp rsb(int ion, double theta, double phi) { return {PulseKind::Rsb, ion, theta, phi, {}}; }
PulseOp rsb_aux(int ion, double theta, double phi) { return {PulseKind::RsbAux, ion, theta, phi, {}}; }
PulseOp carrier(int ion, double theta, double phi) { return {PulseKind::Carrier, ion, theta, phi, {}}; }
PulseOp x_gate(int ion) { return {PulseKind::XGate, ion, kPi, 0.0, {}}; }
PulseOp z_gate(int ion) { return {PulseKind::ZGate, ion, 0.0, 0.0, {}}; }
PulseOp target_unitary(int control_ion, std::string label) {
    return {PulseKind::TargetUnitary, control_ion, 0.0, 0.0, std::move(label)};
}

void PhysParams::require_valid() const {
    if (!valid()) throw std::invalid_argument("invalid physical parameters");
}

int Schedule::count(PulseKind kind) const {
    int n = 0;
    for (const auto& op : pulses)
        if (op.kind == kind) ++n;
    return n;
}

double rsb_pulse_duration(double theta, const PhysParams& p) {
    p.require_valid();
    return std::abs(theta) / (p.rabi_frequency * p.lamb_dicke);
}

double carrier_pulse_duration(double theta, const PhysParams& p) {
    p.require_valid();
    return std::abs(theta) / p.rabi_frequency;
}

double pulse_duration(const PulseOp& op, const PhysParams& p, const TimingPolicy& policy) {
    switch (op.kind) {
        case PulseKind::Rsb:
        case PulseKind::RsbAux:
            return rsb_pulse_duration(op.theta, p);
        case PulseKind::Carrier:
            return carrier_pulse_duration(op.theta, p);
        case PulseKind::XGate:
            return policy.x_duration ? *policy.x_duration : carrier_pulse_duration(kPi, p);
        case PulseKind::ZGate:
            return policy.z_duration;
        case PulseKind::TargetUnitary: {
            auto it = policy.target_durations.find(op.label);
            if (it == policy.target_durations.end())
                throw std::runtime_error("no duration for target unitary label '" + op.label + "'");
            return it->second;
        }
    }
    return 0.0;
}

double schedule_duration(const Schedule& s, const PhysParams& p, const TimingPolicy& policy) {
    double total = 0.0;
    for (const auto& op : s.pulses) total += pulse_duration(op, p, policy);
    return total;
}

Mat2 carrier_matrix(double theta, double phi) {
    const cplx mi(0.0, -1.0);
    const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    Mat2 r;
    r << c, mi * std::exp(cplx(0.0, -phi)) * s,
         mi * std::exp(cplx(0.0, phi)) * s, c;
    return r;
}

Mat2 pulse_block_unitary(PulseKind kind, double theta, double phi, int n) {
    switch (kind) {
        case PulseKind::Rsb:
        case PulseKind::RsbAux: {
            if (n < 1) throw std::invalid_argument("sideband block requires n >= 1");
            // basis (|n>|g>, |n-1>|e or f>), angle enhanced by sqrt(n)
            return carrier_matrix(std::sqrt(double(n)) * theta, phi);
        }
        case PulseKind::Carrier:
            return carrier_matrix(theta, phi);
        case PulseKind::XGate:
            return carrier_matrix(kPi, 0.0);
        default:
            throw std::invalid_argument("pulse kind has no two-level block form");
    }
}

namespace {

// Render x as an exact rational "p/q" when one with a small denominator exists,
// otherwise as a plain decimal.
std::string format_angle_over_pi(double theta) {
    const double x = theta / kPi;
    for (int q = 1; q <= 96; ++q) {
        const double pq = x * q;
        const double p = std::round(pq);
        if (std::abs(pq - p) < 1e-12 * std::max(1.0, std::abs(pq)) + 1e-15) {
            std::ostringstream os;
            os << static_cast<long long>(p) << '/' << q;
            return os.str();
        }
    }
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

double parse_angle_over_pi(const std::string& tok) {
    auto slash = tok.find('/');
    if (slash != std::string::npos) {
        const long long p = std::stoll(tok.substr(0, slash));
        const long long q = std::stoll(tok.substr(slash + 1));
        if (q == 0) throw std::runtime_error("zero denominator in schedule angle");
        return (static_cast<double>(p) * kPi) / static_cast<double>(q);
    }
    return std::stod(tok) * kPi;
}

}  // namespace

void write_schedule(const Schedule& s, std::ostream& out) {
    out << "# czpulse schedule v1\n";
    out << "ions " << s.ion_count << "\n";
    for (const auto& [key, value] : s.metadata) out << "meta " << key << ' ' << value << "\n";
    int index = 0;
    for (const auto& op : s.pulses) {
        out << "pulse " << index++ << ' ' << to_string(op.kind) << ' ' << op.ion << ' '
            << format_angle_over_pi(op.theta) << ' ' << format_angle_over_pi(op.phi) << ' '
            << (op.label.empty() ? "-" : op.label) << "\n";
    }
}

Schedule read_schedule(std::istream& in) {
    Schedule s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "ions") {
            ls >> s.ion_count;
        } else if (tag == "meta") {
            std::string key, value;
            ls >> key;
            std::getline(ls, value);
            if (!value.empty() && value.front() == ' ') value.erase(0, 1);
            s.metadata[key] = value;
        } else if (tag == "pulse") {
            int index = 0, ion = 0;
            std::string kind_tok, theta_tok, phi_tok, label;
            ls >> index >> kind_tok >> ion >> theta_tok >> phi_tok >> label;
            if (ls.fail()) throw std::runtime_error("schedule parse error at line " + std::to_string(lineno));
            auto kind = pulse_kind_from(kind_tok);
            if (!kind) throw std::runtime_error("unknown pulse kind '" + kind_tok + "' at line " + std::to_string(lineno));
            PulseOp op;
            op.kind = *kind;
            op.ion = ion;
            op.theta = parse_angle_over_pi(theta_tok);
            op.phi = parse_angle_over_pi(phi_tok);
            if (label != "-") op.label = label;
            s.pulses.push_back(std::move(op));
        } else {
            throw std::runtime_error("unknown directive '" + tag + "' at line " + std::to_string(lineno));
        }
    }
    for (const auto& op : s.pulses)
        if (op.ion < 0 || op.ion >= s.ion_count)
            throw std::runtime_error("pulse ion index out of range");
    return s;
}

void write_schedule_file(const Schedule& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_schedule(s, out);
}

Schedule read_schedule_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_schedule(in);
}

}  // namespace czpulse
