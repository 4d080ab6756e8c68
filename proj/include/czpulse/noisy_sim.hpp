#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "czpulse/circuit.hpp"
#include "czpulse/core.hpp"

// Open-system simulation of compiled schedules by Monte Carlo wavefunction
// trajectories with three dissipation channels: motional heating sqrt(g_h) a^dag,
// motional dephasing sqrt(g_phi) a^dag a, and Zeeman dephasing sqrt(g_z)|f><f|
// on every ion. Piecewise-constant pulse Hamiltonians are integrated exactly
// per pulse; jump times are resolved to the substep dt.

namespace czpulse {

struct NoiseParams {
    double gamma_h = 1.3e-4;   // 1/us
    double gamma_phi = 5.0e-4; // 1/us
    double gamma_z = 2.0e-3;   // 1/us
    double n_bar = 0.05;       // thermal mean phonon number of the initial mode
    int n_max = 10;            // Fock cutoff
    int n_traj = 1000;
    std::uint64_t seed = 1;
    double dt = 0.1;           // substep, us

    void require_valid() const;
};

// Key-value text config with the conventional names:
// gamma_h gamma_phi gamma_z n_bar n_max n_traj seed dt (rates in 1/us, dt in us)
NoiseParams read_noise_config(const std::string& path);
NoiseParams read_noise_config_stream(std::istream& in);

// p_n proportional to n_bar^n / (1+n_bar)^(n+1), renormalized over 0..n_max.
std::vector<double> thermal_distribution(double n_bar, int n_max);

struct FidelityReport {
    int ions = 0;
    std::vector<unsigned long> inputs;   // computational input bit patterns
    std::vector<double> fidelity;        // per input, same order
    bool converged = true;
    double convergence_delta = 0.0;      // largest |dF| under dt/2, when checked
    double max_cutoff_population = 0.0;  // largest final population at n = n_max

    double overall_mean() const;
    // mean over inputs whose qubit `ion` is in the given level (0=g, 1=e)
    double group_mean(int ion, int level) const;
    double group_stddev(int ion, int level) const;
    // mean over inputs matching `mask`/`value` on the leading qubits
    double masked_mean(unsigned long mask, unsigned long value) const;
};

// Evolves every requested computational input (default: all 2^ions) through
// `iterations` repetitions of the schedule under the noise model, averaging
// the overlap with the ideal gate applied to the trajectory's initial state.
// Trajectories are independently seeded from (seed, input, trajectory index)
// and may run on multiple threads (CZPULSE_THREADS) with a deterministic
// reduction. With check_convergence set, the run is repeated at dt/2 and the
// report is flagged if any fidelity moves by more than 0.1 percentage points.
FidelityReport run_trajectories(const Schedule& s, const PhysParams& p, const NoiseParams& noise,
                                const Mat& ideal_qubit_gate, int iterations = 1,
                                const LabelTable* labels = nullptr,
                                bool check_convergence = false,
                                const std::vector<unsigned long>* input_subset = nullptr);

// F = <psi0| U^dag rho_out U |psi0>, clamped into [0, 1+1e-9] with a warning
// on significant negativity. All operands live on the same full space.
double state_fidelity(const Mat& ideal_full, const Vec& psi0_full, const Mat& rho_out);

}  // namespace czpulse
