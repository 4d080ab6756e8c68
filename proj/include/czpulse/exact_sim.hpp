#pragma once

#include <string>
#include <vector>

#include "czpulse/circuit.hpp"
#include "czpulse/core.hpp"

// Noise-free state-vector simulation over (qutrit)^ions (x) a truncated Fock
// space. Serves as the correctness oracle for compiled schedules.
//
// Basis layout: ion-major with the mode index fastest,
//   index = (sum_j level_j * 3^(ions-1-j)) * (n_max+1) + n,
// so a pulse application is a strided two-level rotation.

namespace czpulse {

struct StateVector {
    int ions = 0;
    int n_max = 0;
    Vec amps;

    static StateVector zero(int ions, int n_max);
    // |levels> (x) |n>_b
    static StateVector basis(int ions, int n_max, const std::vector<int>& levels, int n);
    // computational input: qubit q in e iff bit (ions-1-q) of `bits` is set,
    // mode in |0>_b. Matches the qubit-to-bit convention of ideal_unitary.
    static StateVector computational(int ions, int n_max, unsigned long bits);

    long dim() const { return amps.size(); }
    long index(const std::vector<int>& levels, int n) const;
    double norm() const { return amps.norm(); }
};

// Applies one pulse in place. Sideband pulses rotate the {|n,g>, |n-1,e/f>}
// blocks with the sqrt(n) enhanced angle; levels at the Fock cutoff that would
// couple upward are left untouched, so the operation stays exactly unitary.
// TargetUnitary applies its labelled matrix to the trailing target qubits,
// conditioned on the addressed ion being in e.
void apply_pulse(StateVector& psi, const PulseOp& op, const PhysParams& p,
                 const LabelTable* labels = nullptr);

void apply_schedule(StateVector& psi, const Schedule& s, const PhysParams& p,
                    const LabelTable* labels = nullptr);

// Full schedule unitary, built column by column. Desk scale only.
Mat schedule_unitary(const Schedule& s, int ions, int n_max, const PhysParams& p,
                     const LabelTable* labels = nullptr);

// Restriction of the schedule to the computational (x) |0>_b subspace: a
// 2^ions square block, plus the largest amplitude that leaked outside the
// subspace over all computational inputs.
struct ComputationalBlock {
    Mat block;
    double max_leakage = 0.0;
};
ComputationalBlock computational_block(const Schedule& s, int ions, int n_max,
                                       const PhysParams& p, const LabelTable* labels = nullptr);

struct PhaseEquiv {
    bool equal = false;
    double phase = 0.0;      // alpha with P U P = e^{i alpha} P V P
    double deviation = 0.0;  // max-entry deviation after phase alignment
};

// True iff P U P = e^{i alpha} P V P for some alpha. The reference entry for
// the phase is the largest-magnitude entry of P V P. Pass identity-sized
// matrices with an empty projector to compare unprojected.
PhaseEquiv equiv_up_to_global_phase(const Mat& u, const Mat& v, const Mat& projector,
                                    double tol = 1e-10);
PhaseEquiv equiv_up_to_global_phase(const Mat& u, const Mat& v, double tol = 1e-10);

// Step-resolved trace of the three-control gate construction on the six
// representative control inputs (1..6). Records every nonzero amplitude after
// each of the four step boundaries; basis labels read "<levels>:<n>" with
// levels over {g,e,f} for the three controls plus the single target qubit.
struct TraceRecord {
    int step = 0;  // 1..4
    std::string basis_label;
    cplx amplitude;
};
std::vector<TraceRecord> trace_case(int case_id, int s1, int s2,
                                    const Mat& target_unitary_2x2, const PhysParams& p);

// Representative three-control input for an Appendix-style case id.
std::vector<int> trace_case_levels(int case_id);

std::string basis_label(const std::vector<int>& levels, int n);

}  // namespace czpulse
