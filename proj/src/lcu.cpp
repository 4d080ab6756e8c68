#include "czpulse/lcu.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace czpulse {

double LCUSpec::normalization() const {
    double s = 0.0;
    for (double a : coefficients) s += std::abs(a);
    return s;
}

int LCUSpec::ancilla_count() const {
    const int l = term_count();
    if (l <= 1) return 1;
    int n = 0;
    while ((1L << n) < l) ++n;
    return n;
}

void LCUSpec::validate() const {
    if (coefficients.empty()) throw std::invalid_argument("LCU needs at least one term");
    if (coefficients.size() != unitaries.size())
        throw std::invalid_argument("coefficient/unitary count mismatch");
    for (double a : coefficients)
        if (!(a > 0.0)) throw std::invalid_argument("coefficients must be positive");
    const auto dim = unitaries.front().rows();
    for (const auto& u : unitaries) {
        if (u.rows() != dim || u.cols() != dim)
            throw std::invalid_argument("unitaries must share one dimension");
        if (!is_unitary(u)) throw std::invalid_argument("LCU term is not unitary");
    }
}

std::string binary_control_string(long l, int bits) {
    std::string s(bits, '0');
    for (int j = 0; j < bits; ++j)
        if ((l >> (bits - 1 - j)) & 1L) s[j] = '1';
    return s;
}

GateSequence select_gate_sequence(const LCUSpec& spec) {
    spec.validate();
    const int l_count = spec.term_count();
    const int n = spec.ancilla_count();
    int target_qubits = 0;
    while ((1L << target_qubits) < spec.unitaries.front().rows()) ++target_qubits;

    GateSequence seq;
    seq.qubit_count = n + target_qubits;
    for (int l = 0; l < l_count; ++l) {
        seq.gates.push_back(make_multi_controlled(binary_control_string(l, n), spec.unitaries[l],
                                                  "U" + std::to_string(l)));
    }
    return seq;
}

std::vector<int> c_sequence(int n) {
    if (n < 1) throw std::invalid_argument("c sequence needs n >= 1");
    std::vector<int> c{1};
    for (int level = 1; level < n; ++level) {
        std::vector<int> next;
        next.reserve(2 * c.size() + 1);
        for (int v : c) next.push_back(v + 1);
        next.push_back(1);
        for (int v : c) next.push_back(v + 1);
        c = std::move(next);
    }
    return c;
}

std::int64_t s_closed_form(int n) {
    if (n < 1) throw std::invalid_argument("closed form needs n >= 1");
    return (static_cast<std::int64_t>(n) - 2) * (std::int64_t(1) << (n + 1)) + 4;
}

CountReport select_pulse_count(long term_count) {
    if (term_count < 2) throw std::invalid_argument("select needs at least two terms");
    int n = 0;
    while ((1L << n) < term_count) ++n;
    std::vector<std::string> strings;
    strings.reserve(term_count);
    for (long l = 0; l < term_count; ++l) strings.push_back(binary_control_string(l, n));
    return predicted_pulse_count(strings);
}

namespace {

// Any unitary whose first column is the amplitude vector: extend by Householder
// QR and fix the column phase.
Mat prep_from_amplitudes(const Vec& first_column) {
    const auto dim = first_column.size();
    Mat m = Mat::Identity(dim, dim);
    m.col(0) = first_column;
    Eigen::HouseholderQR<Mat> qr(m);
    Mat q = qr.householderQ();
    // align the first column exactly (QR may flip its phase)
    const cplx overlap = (q.col(0).adjoint() * first_column)(0, 0);
    if (std::abs(overlap) < 1e-12) throw std::runtime_error("degenerate amplitude vector");
    q.col(0) *= overlap / std::abs(overlap);
    // re-orthogonalize the remaining columns against the fixed first one
    for (Eigen::Index c = 1; c < dim; ++c) {
        for (Eigen::Index prev = 0; prev < c; ++prev) {
            const cplx proj = (q.col(prev).adjoint() * q.col(c))(0, 0);
            q.col(c) -= proj * q.col(prev);
        }
        q.col(c).normalize();
    }
    return q;
}

}  // namespace

double block_encoding_check(const LCUSpec& spec) {
    spec.validate();
    const int l_count = spec.term_count();
    const int n = spec.ancilla_count();
    const long adim = 1L << n;
    const long tdim = spec.unitaries.front().rows();
    const double s = spec.normalization();

    Vec amps = Vec::Zero(adim);
    for (int l = 0; l < l_count; ++l) amps[l] = std::sqrt(spec.coefficients[l] / s);
    const Mat prep = prep_from_amplitudes(amps);

    Mat sel = Mat::Identity(adim * tdim, adim * tdim);
    for (long l = 0; l < l_count; ++l)
        sel.block(l * tdim, l * tdim, tdim, tdim) = spec.unitaries[l];

    Mat prep_full = Mat::Zero(adim * tdim, adim * tdim);
    for (long r = 0; r < adim; ++r)
        for (long c = 0; c < adim; ++c)
            prep_full.block(r * tdim, c * tdim, tdim, tdim) = prep(r, c) * Mat::Identity(tdim, tdim);

    const Mat circuit = prep_full.adjoint() * sel * prep_full;
    // the <g^N| ... |g^N> block sits at ancilla index 0
    const Mat block = circuit.block(0, 0, tdim, tdim);

    Mat a_over_s = Mat::Zero(tdim, tdim);
    for (int l = 0; l < l_count; ++l) a_over_s += (spec.coefficients[l] / s) * spec.unitaries[l];

    return (block - a_over_s).cwiseAbs().maxCoeff();
}

namespace {

GateSequence shape_sequence(const SelectShape& shape) {
    const int l_count = shape.term_count();
    if (l_count < 2) throw std::invalid_argument("select shape needs at least two gates");
    int n = 0;
    while ((1L << n) < l_count) ++n;
    Mat id = Mat::Identity(2, 2);
    GateSequence seq;
    seq.qubit_count = n + 1;
    for (int l = 0; l < l_count; ++l)
        seq.gates.push_back(make_multi_controlled(binary_control_string(l, n), id,
                                                  "G" + std::to_string(l)));
    return seq;
}

TimingPolicy shape_policy(const SelectShape& shape, const PhysParams& p) {
    const double t_rsb = rsb_pulse_duration(kPi, p);
    TimingPolicy policy;
    for (int l = 0; l < shape.term_count(); ++l) {
        double t = 0.0;
        for (int m : shape.factor_counts[l]) {
            if (m < 0) throw std::invalid_argument("factor count must be >= 0");
            if (m > 0) t += (2.0 * m - 1.0) * 4.0 * t_rsb;
        }
        policy.target_durations["G" + std::to_string(l)] = t;
    }
    return policy;
}

}  // namespace

SelectTimeBreakdown select_time_breakdown(const SelectShape& shape, const PhysParams& p,
                                          bool optimize) {
    const GateSequence seq = shape_sequence(shape);
    const Schedule sched = compile(seq, optimize);
    SelectTimeBreakdown out;
    out.total = schedule_duration(sched, p, shape_policy(shape, p));
    out.rsb_pulses = sched.rsb_count();
    out.x_gates = sched.count(PulseKind::XGate);
    out.carriers = sched.carrier_count();
    return out;
}

double select_gate_time(const SelectShape& shape, const PhysParams& p, bool optimize) {
    return select_time_breakdown(shape, p, optimize).total;
}

SelectShape read_select_shape_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    SelectShape shape;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;  // "<label>:" or the first token of the list
        std::vector<int> counts;
        auto consume = [&](const std::string& tok) {
            if (tok.empty()) return;
            bool numeric = true;
            for (char ch : tok)
                if (!std::isdigit(static_cast<unsigned char>(ch))) numeric = false;
            if (numeric) {
                counts.push_back(std::stoi(tok));
                return;
            }
            int m = 0;
            for (char ch : tok) {
                if (ch == 'X' || ch == 'Y' || ch == 'Z') ++m;
                else if (ch != 'I')
                    throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                             ": bad pauli string '" + tok + "'");
            }
            counts.push_back(m);
        };
        if (!head.empty() && head.back() != ':') consume(head);
        std::string tok;
        while (ls >> tok) consume(tok);
        if (counts.empty())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty gate line");
        shape.factor_counts.push_back(std::move(counts));
    }
    if (shape.factor_counts.empty()) throw std::runtime_error(path + ": no gates");
    return shape;
}

LCUSpec read_lcu_spec_file(const std::string& path, const LabelTable& table) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    LCUSpec spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        double a = 0.0;
        std::string label;
        ls >> a >> label;
        if (ls.fail())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected '<coefficient> <label>'");
        Mat u;
        if (auto it = table.find(label); it != table.end()) u = it->second;
        else if (auto b = builtin_matrix(label)) u = *b;
        else
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown label '" +
                                     label + "'");
        spec.coefficients.push_back(a);
        spec.unitaries.push_back(std::move(u));
    }
    spec.validate();
    return spec;
}

}  // namespace czpulse
