#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "czpulse/core.hpp"

// Logical-level gate representation: multi-controlled gates with pulse-ordered
// control strings, plus the dense ideal-unitary oracle used to verify compiled
// schedules.
//
// Conventions: qubit q of a total_qubits register maps to bit (total_qubits-1-q)
// of the basis index, i.e. qubit 0 is the most significant bit. Control strings
// are in pulse order: the first sideband pulse addresses the leftmost bit, with
// g <-> 0 and e <-> 1.

namespace czpulse {

// Resolves TargetUnitary labels to matrices in simulators and timing policies.
using LabelTable = std::map<std::string, Mat>;

struct GateSpec {
    enum class Style {
        McGate,   // generic controlled unitary via the single-controlled primitive
        Toffoli,  // sideband-only construction for an X target
    };

    std::string controls;             // pulse-ordered bit string
    std::vector<int> control_ions;    // qubit index per control, pulse order
    std::vector<int> target_ions;     // target register qubits
    std::string target_label;
    Mat target_matrix;                // unitary on the target register
    Style style = Style::McGate;
    std::optional<std::pair<int, int>> gauge;  // (s1, s2), unassigned by default

    int n_controls() const { return static_cast<int>(controls.size()); }
    bool all_ones() const { return controls.find('0') == std::string::npos; }
};

struct GateSequence {
    std::vector<GateSpec> gates;
    int qubit_count = 0;
};

// Builds a gate with default qubit layout: controls on qubits 0..N-1 in pulse
// order, target register on the following qubits. Gauge starts unassigned.
GateSpec make_multi_controlled(const std::string& controls, const Mat& target,
                               const std::string& label = "U");

struct ZeroControlExpansion {
    std::vector<int> pre_x;   // ions conjugated before the core
    GateSpec core;            // same gate with all-ones controls
    std::vector<int> post_x;  // equal to pre_x
};

ZeroControlExpansion expand_zero_controls(const GateSpec& g);

// The N-controlled SWAP as three (N+2)-Toffoli gates on N controls plus two
// swap qubits, the swap qubits alternating between control and target roles.
GateSequence cswap_decomposition(int n_controls);

// Dense controlled-unitary matrix: target applied iff every control matches.
Mat ideal_unitary(const GateSpec& g, int total_qubits);
Mat ideal_unitary(const GateSequence& seq);

// Gate-sequence input file: one line per gate, "<controls-bitstring> <target-label>".
// Labels resolve through the matrix table; X, Y, Z, H, I are built in.
GateSequence read_gate_sequence_file(const std::string& path,
                                     const std::map<std::string, Mat>& table = {});

// Label -> matrix table file:
//   matrix <label> <qubits>
//   <re> <im> ...   (one row per line, 2*dim numbers)
std::map<std::string, Mat> read_matrix_table_file(const std::string& path);

std::optional<Mat> builtin_matrix(const std::string& label);

bool is_unitary(const Mat& u, double tol = 1e-12);

}  // namespace czpulse
