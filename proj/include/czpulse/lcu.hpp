#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "czpulse/circuit.hpp"
#include "czpulse/compiler.hpp"
#include "czpulse/core.hpp"

// Select-operator planning for linear-combination-of-unitaries block encodings:
// the select sequence as successive multi-controlled gates over binary-counting
// ancilla strings, closed-form pulse budgets, gate-time modelling, and a dense
// check of the block-encoding identity.

namespace czpulse {

struct LCUSpec {
    std::vector<double> coefficients;  // positive reals a_l
    std::vector<Mat> unitaries;        // U_l, all of equal dimension

    int term_count() const { return static_cast<int>(coefficients.size()); }
    double normalization() const;          // s = sum a_l
    int ancilla_count() const;             // ceil(log2 L), 1 for the degenerate L=1
    void validate() const;
};

// Binary control string of l over `bits` ancillas, most significant bit first.
std::string binary_control_string(long l, int bits);

// L gates; gate l is controlled on the binary string of l with target U_l
// (label "U<l>"). L=1 compiles as one single-controlled gate on string "0".
GateSequence select_gate_sequence(const LCUSpec& spec);

// First-difference indices of the full binary counting sequence at N bits,
// built by the sequence recurrence {c^(N+1)} = ({c^(N)}+1, 1, {c^(N)}+1) from
// the base {c^(1)} = (1). Values lie in [1, N].
std::vector<int> c_sequence(int n);

// Closed form for the eliminated-pulse total over the full binary sequence:
// S_N = (N-2)*2^(N+1) + 4 = 2*sum(c_l - 1).
std::int64_t s_closed_form(int n);

// Pulse budget of the select operator on the first L binary strings. At
// L = 2^N the cancelled count equals 6L-4 exactly.
CountReport select_pulse_count(long term_count);

// Residual of the block-encoding identity: completes PREP from its first
// column sqrt(a_l/s), forms SEL block-diagonally, and returns the max-abs
// entry of (<g^N| (x) I) PREP^dag SEL PREP (|g^N> (x) I) - A/s.
double block_encoding_check(const LCUSpec& spec);

// Shape of a select instance for gate-time modelling: how many non-identity
// Pauli factors each controlled target carries. A gate may bundle several
// commuting strings; each string with m factors costs (2m-1) * 4 * t_RSB, the
// single-factor case being 4 * t_RSB.
struct SelectShape {
    std::vector<std::vector<int>> factor_counts;  // per gate, per bundled string

    int term_count() const { return static_cast<int>(factor_counts.size()); }
};

// Duration of the compiled select schedule for the given shape, with or
// without cancellation.
double select_gate_time(const SelectShape& shape, const PhysParams& p, bool optimize);

// The same with the sideband count split out, for exact-saving checks.
struct SelectTimeBreakdown {
    double total = 0.0;       // seconds
    std::int64_t rsb_pulses = 0;
    std::int64_t x_gates = 0;
    std::int64_t carriers = 0;
};
SelectTimeBreakdown select_time_breakdown(const SelectShape& shape, const PhysParams& p,
                                          bool optimize);

// Pauli-group configuration file: one gate per line,
//   <label>: <pauli-string> [<pauli-string> ...]
// where strings are over {I,X,Y,Z}; integer tokens are accepted as literal
// factor counts.
SelectShape read_select_shape_file(const std::string& path);

// LCU input file: lines "<coefficient> <label>", labels resolved through the
// matrix table (builtins allowed).
LCUSpec read_lcu_spec_file(const std::string& path, const LabelTable& table = {});

}  // namespace czpulse
