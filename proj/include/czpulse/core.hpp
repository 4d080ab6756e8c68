#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

// Physical primitives of the pulse model: the three ion levels g/e/f, a shared
// motional mode, timed pulse operations, and the analytic single-pulse unitaries.

namespace czpulse {

inline constexpr double kPi = 3.14159265358979323846;

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;

// Internal ion levels. {g,e} is the computational subspace, f is auxiliary.
enum class Level : int { g = 0, e = 1, f = 2 };

enum class PulseKind {
    Rsb,            // red sideband on the g<->e transition
    RsbAux,         // red sideband on the g<->f transition
    Carrier,        // R(theta,phi) on {g,e}, no motional coupling
    XGate,          // carrier pi pulse, used for zero-control conjugation
    ZGate,          // virtual phase flip on e
    TargetUnitary,  // opaque controlled unitary, conditioned on `ion` being in e
};

std::string_view to_string(PulseKind kind);
std::optional<PulseKind> pulse_kind_from(std::string_view name);

struct PulseOp {
    PulseKind kind = PulseKind::Rsb;
    int ion = 0;
    double theta = 0.0;
    double phi = 0.0;
    std::string label;  // names the applied unitary for TargetUnitary

    bool touches_mode() const { return kind == PulseKind::Rsb || kind == PulseKind::RsbAux; }
};

PulseOp rsb(int ion, double theta, double phi = 0.0);
PulseOp rsb_aux(int ion, double theta, double phi = 0.0);
PulseOp carrier(int ion, double theta, double phi);
PulseOp x_gate(int ion);
PulseOp z_gate(int ion);
PulseOp target_unitary(int control_ion, std::string label);

struct PhysParams {
    double rabi_frequency = 2.0 * kPi * 0.2e6;  // Omega, rad/s
    double lamb_dicke = 0.1;                    // eta
    int fock_cutoff = 10;                       // n_max

    bool valid() const { return rabi_frequency > 0 && lamb_dicke > 0 && lamb_dicke < 1 && fock_cutoff >= 1; }
    void require_valid() const;
};

// Durations of the timed primitives. Z gates are virtual (zero duration) by
// default; X gates default to a carrier pi pulse; target unitaries come from a
// per-label lookup table.
struct TimingPolicy {
    double z_duration = 0.0;                         // seconds
    std::optional<double> x_duration;                // seconds; unset = carrier pi
    std::map<std::string, double> target_durations;  // seconds, keyed by label
};

struct Schedule {
    std::vector<PulseOp> pulses;
    int ion_count = 0;
    std::map<std::string, std::string> metadata;

    int count(PulseKind kind) const;
    // plain + auxiliary sideband pulses together
    int rsb_count() const { return count(PulseKind::Rsb) + count(PulseKind::RsbAux); }
    int carrier_count() const { return count(PulseKind::Carrier); }
};

// t = |theta| / (Omega * eta)
double rsb_pulse_duration(double theta, const PhysParams& p);
// t = |theta| / Omega
double carrier_pulse_duration(double theta, const PhysParams& p);

double pulse_duration(const PulseOp& op, const PhysParams& p, const TimingPolicy& policy);

// Sum of pulse durations; pulses run back to back with no idle gaps.
double schedule_duration(const Schedule& s, const PhysParams& p, const TimingPolicy& policy = {});

// The carrier rotation matrix on {g,e}:
//   R(theta,phi) = [[cos(theta/2), -i e^{-i phi} sin(theta/2)],
//                   [-i e^{i phi} sin(theta/2), cos(theta/2)]]
Mat2 carrier_matrix(double theta, double phi);

// Exact pulse unitary restricted to the coupled two-dimensional block
// {|n>_b |g>, |n-1>_b |e or f>} (n >= 1): the sideband angle picks up the
// sqrt(n) matrix element of the mode operators. For Carrier/XGate the block is
// {|g>,|e>} at fixed n and the matrix is R(theta,phi).
Mat2 pulse_block_unitary(PulseKind kind, double theta, double phi, int n);

// Text serialization. One pulse per line with fields
//   pulse <index> <kind> <ion> <theta_over_pi> <phi_over_pi> <label|->
// where angles are written as exact rationals p/q of pi whenever possible, so
// the round trip is lossless for rational multiples of pi.
void write_schedule(const Schedule& s, std::ostream& out);
Schedule read_schedule(std::istream& in);
void write_schedule_file(const Schedule& s, const std::string& path);
Schedule read_schedule_file(const std::string& path);

}  // namespace czpulse
