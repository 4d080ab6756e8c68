#include "czpulse/circuit.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace czpulse {

bool is_unitary(const Mat& u, double tol) {
    if (u.rows() != u.cols() || u.rows() == 0) return false;
    Mat id = Mat::Identity(u.rows(), u.cols());
    return ((u.adjoint() * u) - id).cwiseAbs().maxCoeff() < tol;
}

GateSpec make_multi_controlled(const std::string& controls, const Mat& target,
                               const std::string& label) {
    if (controls.empty()) throw std::invalid_argument("control string must be nonempty");
    for (char c : controls)
        if (c != '0' && c != '1') throw std::invalid_argument("control string must be over {0,1}");
    if (!is_unitary(target)) throw std::invalid_argument("target matrix is not unitary");
    const int n = static_cast<int>(controls.size());
    int target_qubits = 0;
    while ((1 << target_qubits) < target.rows()) ++target_qubits;
    if ((1 << target_qubits) != target.rows())
        throw std::invalid_argument("target dimension must be a power of two");

    GateSpec g;
    g.controls = controls;
    g.control_ions.resize(n);
    for (int i = 0; i < n; ++i) g.control_ions[i] = i;
    g.target_ions.resize(target_qubits);
    for (int i = 0; i < target_qubits; ++i) g.target_ions[i] = n + i;
    g.target_label = label;
    g.target_matrix = target;
    return g;
}

ZeroControlExpansion expand_zero_controls(const GateSpec& g) {
    ZeroControlExpansion ex;
    ex.core = g;
    for (size_t i = 0; i < g.controls.size(); ++i) {
        if (g.controls[i] == '0') {
            ex.pre_x.push_back(g.control_ions[i]);
            ex.core.controls[i] = '1';
        }
    }
    ex.post_x = ex.pre_x;
    return ex;
}

GateSequence cswap_decomposition(int n_controls) {
    if (n_controls < 1) throw std::invalid_argument("cswap requires at least one control");
    const int a = n_controls;      // first swap qubit
    const int b = n_controls + 1;  // second swap qubit
    Mat x = *builtin_matrix("X");

    auto toffoli = [&](int control_swap, int target_swap) {
        GateSpec g;
        g.controls = std::string(n_controls + 1, '1');
        for (int i = 0; i < n_controls; ++i) g.control_ions.push_back(i);
        g.control_ions.push_back(control_swap);
        g.target_ions = {target_swap};
        g.target_label = "X";
        g.target_matrix = x;
        g.style = GateSpec::Style::Toffoli;
        return g;
    };

    GateSequence seq;
    seq.qubit_count = n_controls + 2;
    seq.gates.push_back(toffoli(a, b));
    seq.gates.push_back(toffoli(b, a));
    seq.gates.push_back(toffoli(a, b));
    return seq;
}

Mat ideal_unitary(const GateSpec& g, int total_qubits) {
    for (int ion : g.control_ions)
        if (ion < 0 || ion >= total_qubits) throw std::invalid_argument("control qubit out of range");
    for (int ion : g.target_ions)
        if (ion < 0 || ion >= total_qubits) throw std::invalid_argument("target qubit out of range");

    const long dim = 1L << total_qubits;
    const int tq = static_cast<int>(g.target_ions.size());
    const long tdim = 1L << tq;
    if (g.target_matrix.rows() != tdim) throw std::invalid_argument("target matrix dimension mismatch");

    auto bit_of = [&](long basis, int qubit) { return (basis >> (total_qubits - 1 - qubit)) & 1L; };

    Mat u = Mat::Zero(dim, dim);
    for (long col = 0; col < dim; ++col) {
        bool active = true;
        for (size_t i = 0; i < g.control_ions.size(); ++i) {
            if (bit_of(col, g.control_ions[i]) != (g.controls[i] == '1' ? 1 : 0)) {
                active = false;
                break;
            }
        }
        if (!active) {
            u(col, col) = 1.0;
            continue;
        }
        long tcol = 0;
        for (int i = 0; i < tq; ++i) tcol = (tcol << 1) | bit_of(col, g.target_ions[i]);
        for (long trow = 0; trow < tdim; ++trow) {
            const cplx amp = g.target_matrix(trow, tcol);
            if (amp == cplx(0.0, 0.0)) continue;
            long row = col;
            for (int i = 0; i < tq; ++i) {
                const long bit = (trow >> (tq - 1 - i)) & 1L;
                const long mask = 1L << (total_qubits - 1 - g.target_ions[i]);
                row = bit ? (row | mask) : (row & ~mask);
            }
            u(row, col) = amp;
        }
    }
    return u;
}

Mat ideal_unitary(const GateSequence& seq) {
    const long dim = 1L << seq.qubit_count;
    Mat u = Mat::Identity(dim, dim);
    for (const auto& g : seq.gates) u = ideal_unitary(g, seq.qubit_count) * u;
    return u;
}

std::optional<Mat> builtin_matrix(const std::string& label) {
    const cplx i(0.0, 1.0);
    Mat m(2, 2);
    if (label == "X") {
        m << 0, 1, 1, 0;
    } else if (label == "Y") {
        m << 0, -i, i, 0;
    } else if (label == "Z") {
        m << 1, 0, 0, -1;
    } else if (label == "H") {
        const double s = 1.0 / std::sqrt(2.0);
        m << s, s, s, -s;
    } else if (label == "I") {
        m << 1, 0, 0, 1;
    } else {
        return std::nullopt;
    }
    return m;
}

std::map<std::string, Mat> read_matrix_table_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::map<std::string, Mat> table;
    std::string line;
    int lineno = 0;
    std::string label;
    int qubits = 0;
    long dim = 0, row = 0;
    Mat m;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        if (label.empty()) {
            std::string tag;
            ls >> tag >> label >> qubits;
            if (ls.fail() || tag != "matrix" || qubits < 1)
                throw std::runtime_error("matrix table parse error at line " + std::to_string(lineno));
            dim = 1L << qubits;
            m = Mat::Zero(dim, dim);
            row = 0;
        } else {
            for (long col = 0; col < dim; ++col) {
                double re = 0, im = 0;
                ls >> re >> im;
                if (ls.fail())
                    throw std::runtime_error("matrix row parse error at line " + std::to_string(lineno));
                m(row, col) = cplx(re, im);
            }
            if (++row == dim) {
                if (!is_unitary(m)) throw std::runtime_error("matrix '" + label + "' is not unitary");
                table[label] = m;
                label.clear();
            }
        }
    }
    if (!label.empty()) throw std::runtime_error("truncated matrix '" + label + "' in table");
    return table;
}

GateSequence read_gate_sequence_file(const std::string& path,
                                     const std::map<std::string, Mat>& table) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    GateSequence seq;
    std::string line;
    int lineno = 0;
    int n = -1;
    int target_qubits = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string controls, label;
        ls >> controls >> label;
        if (ls.fail())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected '<controls> <label>'");
        Mat target;
        if (auto it = table.find(label); it != table.end()) {
            target = it->second;
        } else if (auto b = builtin_matrix(label)) {
            target = *b;
        } else {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown target label '" + label + "'");
        }
        GateSpec g;
        try {
            g = make_multi_controlled(controls, target, label);
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (n < 0) {
            n = g.n_controls();
            target_qubits = static_cast<int>(g.target_ions.size());
        } else if (g.n_controls() != n || static_cast<int>(g.target_ions.size()) != target_qubits) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": gate shape differs from the preceding gates");
        }
        seq.gates.push_back(std::move(g));
    }
    if (seq.gates.empty()) throw std::runtime_error(path + ": no gates");
    seq.qubit_count = n + target_qubits;
    return seq;
}

}  // namespace czpulse
