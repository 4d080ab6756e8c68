#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "czpulse/circuit.hpp"
#include "czpulse/core.hpp"

// Lowers multi-controlled gates to red-sideband pulse schedules in any of the
// four gauge variants, assigns gauges across successive gates so that adjacent
// encode/decode sequences are mutual inverses, cancels redundant pulses, and
// predicts pulse counts analytically.

namespace czpulse {

// The four sign choices for the encode/decode sideband sequences. Variant b is
// the standard all +pi circuit; c flips both sequences; d and e mix signs so
// that no trailing Z correction is needed.
enum class GaugeVariant { B, C, D, E };

// (s1, s2) with encode sign (-1)^s1 and decode sign (-1)^s2.
std::pair<int, int> gauge_of(GaugeVariant v);

struct GaugeAssignment {
    std::vector<std::pair<int, int>> gauges;  // per gate

    // Adjacent gates must use opposite signs at their shared boundary.
    bool alternates() const;
};

// Deterministic policy: every gate gets (s1,s2) = (0,1), which satisfies the
// boundary alternation constraint at every pair.
GaugeAssignment assign_gauges(const GateSequence& seq);

// N-qubit Toffoli (N-1 controls, qubit N-1 the target) from 2N sideband pulses
// and two carrier rotations on the target. Requires N >= 2.
Schedule lower_toffoli(int n_qubits, GaugeVariant v);
Schedule lower_toffoli(int n_qubits, int s1, int s2);

// General N-controlled gate with an all-ones control string: 2(N+1) sideband
// pulses around the single-controlled target primitive, plus two carrier pi
// rotations on the last control and a trailing Z when s1 == s2. Requires
// N >= 2; a single-control gate lowers to the bare primitive.
Schedule lower_mc_gate(const GateSpec& core, int s1, int s2);

// 1-based index of the first position at which the control strings differ in
// pulse order; N+2 when they are equal.
int c_index(std::string_view a, std::string_view b);

struct CountReport {
    std::int64_t baseline = 0;
    std::int64_t eliminated = 0;
    std::int64_t final_count = 0;
    std::vector<int> c_values;
};

// Analytic sideband-pulse budget for M successive N-controlled gates:
// baseline 2M(N+1), minus 2*sum(c_k - 1) over adjacent pairs.
CountReport predicted_pulse_count(const std::vector<std::string>& control_strings);

// Peephole pass: repeatedly removes same-ion mutually inverse pulse pairs
// whose enclosed pulses all commute past them, until a fixpoint. Preserves the
// schedule unitary up to a global phase on the computational (x) |0>_b subspace.
Schedule cancel_pulses(const Schedule& s);

// Full pipeline: expand zero controls, assign gauges (all (0,1) when
// optimizing, all (0,0) otherwise), lower each gate, concatenate, and run the
// cancellation pass when optimizing.
Schedule compile(const GateSequence& seq, bool optimize);

// Label -> matrix table for every target primitive appearing in a sequence.
LabelTable target_label_table(const GateSequence& seq);

}  // namespace czpulse
