#include "czpulse/noisy_sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <unsupported/Eigen/MatrixFunctions>

#include "czpulse/exact_sim.hpp"

namespace czpulse {

void NoiseParams::require_valid() const {
    if (gamma_h < 0 || gamma_phi < 0 || gamma_z < 0 || n_bar < 0 || n_max < 1 || n_traj < 1 ||
        dt <= 0)
        throw std::invalid_argument("invalid noise parameters");
}

NoiseParams read_noise_config_stream(std::istream& in) {
    NoiseParams np;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        auto bad = [&] {
            throw std::runtime_error("noise config parse error at line " + std::to_string(lineno));
        };
        if (key == "gamma_h") { if (!(ls >> np.gamma_h)) bad(); }
        else if (key == "gamma_phi") { if (!(ls >> np.gamma_phi)) bad(); }
        else if (key == "gamma_z") { if (!(ls >> np.gamma_z)) bad(); }
        else if (key == "n_bar") { if (!(ls >> np.n_bar)) bad(); }
        else if (key == "n_max") { if (!(ls >> np.n_max)) bad(); }
        else if (key == "n_traj") { if (!(ls >> np.n_traj)) bad(); }
        else if (key == "seed") { if (!(ls >> np.seed)) bad(); }
        else if (key == "dt") { if (!(ls >> np.dt)) bad(); }
        else throw std::runtime_error("unknown noise config key '" + key + "'");
    }
    np.require_valid();
    return np;
}

NoiseParams read_noise_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return read_noise_config_stream(in);
}

std::vector<double> thermal_distribution(double n_bar, int n_max) {
    if (n_bar < 0 || n_max < 0) throw std::invalid_argument("invalid thermal parameters");
    std::vector<double> p(n_max + 1, 0.0);
    if (n_bar == 0.0) {
        p[0] = 1.0;
        return p;
    }
    double total = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        p[n] = std::pow(n_bar, n) / std::pow(1.0 + n_bar, n + 1);
        total += p[n];
    }
    for (auto& v : p) v /= total;
    return p;
}

double FidelityReport::overall_mean() const {
    double s = 0.0;
    for (double f : fidelity) s += f;
    return fidelity.empty() ? 0.0 : s / fidelity.size();
}

double FidelityReport::group_mean(int ion, int level) const {
    double s = 0.0;
    int n = 0;
    for (size_t i = 0; i < inputs.size(); ++i) {
        const int bit = (inputs[i] >> (ions - 1 - ion)) & 1UL;
        if (bit == level) {
            s += fidelity[i];
            ++n;
        }
    }
    return n ? s / n : 0.0;
}

double FidelityReport::group_stddev(int ion, int level) const {
    const double mean = group_mean(ion, level);
    double s = 0.0;
    int n = 0;
    for (size_t i = 0; i < inputs.size(); ++i) {
        const int bit = (inputs[i] >> (ions - 1 - ion)) & 1UL;
        if (bit == level) {
            s += (fidelity[i] - mean) * (fidelity[i] - mean);
            ++n;
        }
    }
    return n ? std::sqrt(s / n) : 0.0;
}

double FidelityReport::masked_mean(unsigned long mask, unsigned long value) const {
    double s = 0.0;
    int n = 0;
    for (size_t i = 0; i < inputs.size(); ++i) {
        if ((inputs[i] & mask) == value) {
            s += fidelity[i];
            ++n;
        }
    }
    return n ? s / n : 0.0;
}

double state_fidelity(const Mat& ideal_full, const Vec& psi0_full, const Mat& rho_out) {
    if (ideal_full.rows() != rho_out.rows() || psi0_full.size() != rho_out.rows())
        throw std::invalid_argument("dimension mismatch");
    const Vec target = ideal_full * psi0_full;
    const double f = std::real((target.adjoint() * rho_out * target)(0, 0));
    if (f < -1e-9)
        std::cerr << "warning: fidelity clamped from " << f << "\n";
    return std::clamp(f, 0.0, 1.0 + 1e-9);
}

namespace {

// splitmix64-based counter stream: portable and deterministic
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t s) : state(s) {}

    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        return finalize(state);
    }

    double uniform() { return (next() >> 11) * 0x1.0p-53; }
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return Rng::finalize(a ^ (b + 0x9E3779B97F4A7C15ULL + (a << 6) + (a >> 2)));
}

long pow3(int k) {
    long r = 1;
    while (k-- > 0) r *= 3;
    return r;
}

struct PulseKey {
    PulseKind kind;
    int ion;
    double theta, phi;

    bool operator<(const PulseKey& o) const {
        return std::tie(kind, ion, theta, phi) < std::tie(o.kind, o.ion, o.theta, o.phi);
    }
};

struct PulseProp {
    bool instant = false;      // Z gates and target unitaries
    const PulseOp* op = nullptr;
    int ion = 0;
    double duration = 0.0;     // us
    int n_steps = 0;           // full dt substeps
    double t_rem = 0.0;        // remainder substep, us
    Mat u_full;                // block propagator over the whole pulse
    Mat u_step;                // block propagator over dt
    Mat u_rem;                 // block propagator over t_rem
    // per-duration damping factor applied to the f level of the other ions
    double damp_full = 1.0, damp_step = 1.0, damp_rem = 1.0;
};

class TrajectoryEngine {
  public:
    TrajectoryEngine(const Schedule& s, const PhysParams& phys, const NoiseParams& noise,
                     const LabelTable* labels)
        : sched_(s), phys_(phys), noise_(noise), labels_(labels) {
        ions_ = s.ion_count;
        if (ions_ < 1 || ions_ > 12) throw std::invalid_argument("trajectory engine supports 1..12 ions");
        thermal_ = thermal_distribution(noise.n_bar, noise.n_max);
        m_ = noise.n_max + 1;
        q3_ = pow3(ions_);
        dim_ = q3_ * m_;
        block_dim_ = 3 * m_;
        group_count_ = pow3(ions_ - 1);

        f_count_.resize(q3_);
        for (long q = 0; q < q3_; ++q) {
            int c = 0;
            long rest = q;
            for (int i = 0; i < ions_; ++i) {
                if (rest % 3 == 2) ++c;
                rest /= 3;
            }
            f_count_[q] = static_cast<std::uint8_t>(c);
        }

        props_.reserve(s.pulses.size());
        std::map<PulseKey, int> cache;
        for (const auto& op : s.pulses) {
            PulseProp prop;
            prop.op = &op;
            prop.ion = op.ion;
            if (op.kind == PulseKind::ZGate || op.kind == PulseKind::TargetUnitary) {
                prop.instant = true;
                props_.push_back(std::move(prop));
                continue;
            }
            const double t_us = pulse_duration(op, phys, TimingPolicy{}) * 1e6;
            if (t_us <= 0.0) {
                prop.instant = true;  // zero-angle pulse
                props_.push_back(std::move(prop));
                continue;
            }
            PulseKey key{op.kind, op.ion, op.theta, op.phi};
            auto it = cache.find(key);
            if (it != cache.end()) {
                props_.push_back(props_[it->second]);
                props_.back().op = &op;
                continue;
            }
            prop.duration = t_us;
            prop.n_steps = static_cast<int>(std::floor(t_us / noise.dt + 1e-9));
            prop.t_rem = t_us - prop.n_steps * noise.dt;
            if (prop.t_rem < 1e-12) prop.t_rem = 0.0;
            const Mat a = block_generator(op);
            prop.u_full = propagator(a, t_us);
            prop.u_step = propagator(a, noise.dt);
            prop.u_rem = prop.t_rem > 0 ? propagator(a, prop.t_rem) : Mat();
            prop.damp_full = std::exp(-0.5 * noise.gamma_z * t_us);
            prop.damp_step = std::exp(-0.5 * noise.gamma_z * noise.dt);
            prop.damp_rem = std::exp(-0.5 * noise.gamma_z * prop.t_rem);
            cache[key] = static_cast<int>(props_.size());
            props_.push_back(std::move(prop));
        }
    }

    int ions() const { return ions_; }
    long dim() const { return dim_; }

    // one full trajectory; returns |<ideal|psi_final>|^2
    double run(unsigned long input_bits, const Vec& ideal_qubit_out, Rng& rng,
               int iterations, double* cutoff_population) const {
        const double u0 = rng.uniform();
        int n0 = noise_.n_max;
        double acc = 0.0;
        for (int n = 0; n <= noise_.n_max; ++n) {
            acc += thermal_[n];
            if (u0 <= acc) {
                n0 = n;
                break;
            }
        }

        Vec psi = Vec::Zero(dim_);
        psi[input_index(input_bits, n0)] = 1.0;

        double r = rng.uniform();
        for (int it = 0; it < iterations; ++it)
            for (const auto& prop : props_) step_pulse(prop, psi, r, rng);

        psi.normalize();
        if (cutoff_population) {
            double pop = 0.0;
            for (long q = 0; q < q3_; ++q) pop += std::norm(psi[q * m_ + noise_.n_max]);
            *cutoff_population = pop;
        }

        // overlap with (ideal gate (x) identity) |input, n0>
        cplx overlap = 0.0;
        const long cdim = 1L << ions_;
        for (long out = 0; out < cdim; ++out) {
            const cplx a = ideal_qubit_out[out];
            if (a == cplx(0.0, 0.0)) continue;
            overlap += std::conj(a) * psi[computational_index(out, n0)];
        }
        return std::norm(overlap);
    }

    long computational_index(unsigned long bits, int n) const {
        long q = 0;
        for (int i = 0; i < ions_; ++i) q = q * 3 + ((bits >> (ions_ - 1 - i)) & 1UL);
        return q * m_ + n;
    }

  private:
    long input_index(unsigned long bits, int n) const { return computational_index(bits, n); }

    // non-Hermitian generator on the (mode, ion) block, units 1/us
    Mat block_generator(const PulseOp& op) const {
        Mat h = Mat::Zero(block_dim_, block_dim_);
        auto at = [&](int level, int n) { return level * m_ + n; };
        const double sgn = op.theta >= 0 ? 1.0 : -1.0;
        const cplx eip = std::exp(cplx(0.0, op.phi));
        const cplx eim = std::exp(cplx(0.0, -op.phi));

        if (op.kind == PulseKind::Rsb || op.kind == PulseKind::RsbAux) {
            const int partner = op.kind == PulseKind::Rsb ? 1 : 2;
            const double rate = 0.5 * phys_.rabi_frequency * phys_.lamb_dicke * 1e-6;  // rad/us
            for (int n = 1; n <= noise_.n_max; ++n) {
                const double g = sgn * rate * std::sqrt(double(n));
                h(at(0, n), at(partner, n - 1)) += g * eim;
                h(at(partner, n - 1), at(0, n)) += g * eip;
            }
        } else {  // Carrier / XGate
            const double rate = 0.5 * phys_.rabi_frequency * 1e-6;
            for (int n = 0; n <= noise_.n_max; ++n) {
                h(at(0, n), at(1, n)) += sgn * rate * eim;
                h(at(1, n), at(0, n)) += sgn * rate * eip;
            }
        }

        // decay part: heating (truncated raising), motional dephasing, and the
        // pulse ion's own Zeeman dephasing
        const cplx mihalf(0.0, -0.5);
        for (int level = 0; level < 3; ++level) {
            for (int n = 0; n <= noise_.n_max; ++n) {
                double rate = noise_.gamma_phi * double(n) * double(n);
                if (n < noise_.n_max) rate += noise_.gamma_h * (n + 1);
                if (level == 2) rate += noise_.gamma_z;
                h(at(level, n), at(level, n)) += mihalf * rate;
            }
        }
        return h;
    }

    Mat propagator(const Mat& generator, double t_us) const {
        Mat m = cplx(0.0, -1.0) * t_us * generator;
        return m.exp();
    }

    void apply_block(const Mat& u, int ion, Vec& psi) const {
        const long s_level = pow3(ions_ - 1 - ion) * m_;
        const long s_outer = 3 * s_level;
        const long n_hi = pow3(ion);
        const long rest_count = s_level / m_;

        Eigen::MatrixXcd x(block_dim_, group_count_);
        long col = 0;
        for (long hi = 0; hi < n_hi; ++hi) {
            const long base = hi * s_outer;
            for (long rest = 0; rest < rest_count; ++rest, ++col)
                for (int level = 0; level < 3; ++level)
                    x.col(col).segment(level * m_, m_) =
                        psi.segment(base + level * s_level + rest * m_, m_);
        }
        x = (u * x).eval();
        col = 0;
        for (long hi = 0; hi < n_hi; ++hi) {
            const long base = hi * s_outer;
            for (long rest = 0; rest < rest_count; ++rest, ++col)
                for (int level = 0; level < 3; ++level)
                    psi.segment(base + level * s_level + rest * m_, m_) =
                        x.col(col).segment(level * m_, m_);
        }
    }

    // damping of the f population of every ion except `ion` over a window with
    // per-f factor `factor`
    void apply_other_ion_damping(double factor, int ion, Vec& psi) const {
        if (noise_.gamma_z == 0.0 || factor == 1.0) return;
        const long s_level = pow3(ions_ - 1 - ion);
        double table[16];
        table[0] = 1.0;
        for (int k = 1; k < 16; ++k) table[k] = table[k - 1] * factor;
        for (long q = 0; q < q3_; ++q) {
            int other = f_count_[q];
            if ((q / s_level) % 3 == 2) --other;
            if (other == 0) continue;
            psi.segment(q * m_, m_) *= table[other];
        }
    }

    void apply_timed(const PulseProp& prop, const Mat& u, double damp, Vec& psi) const {
        apply_block(u, prop.ion, psi);
        apply_other_ion_damping(damp, prop.ion, psi);
    }

    void apply_instant(const PulseOp& op, Vec& psi) const {
        StateVector sv;
        sv.ions = ions_;
        sv.n_max = noise_.n_max;
        sv.amps = std::move(psi);
        apply_pulse(sv, op, phys_, labels_);
        psi = std::move(sv.amps);
    }

    void step_pulse(const PulseProp& prop, Vec& psi, double& r, Rng& rng) const {
        if (prop.instant) {
            apply_instant(*prop.op, psi);
            return;
        }
        Vec trial = psi;
        apply_timed(prop, prop.u_full, prop.damp_full, trial);
        if (trial.squaredNorm() >= r) {
            psi = std::move(trial);
            return;
        }
        // a jump fires inside this pulse: locate it at substep resolution
        int step = 0;
        while (step < prop.n_steps || prop.t_rem > 0.0) {
            const bool rem = step >= prop.n_steps;
            Vec next = psi;
            if (rem) apply_timed(prop, prop.u_rem, prop.damp_rem, next);
            else apply_timed(prop, prop.u_step, prop.damp_step, next);
            ++step;
            if (next.squaredNorm() < r) {
                apply_jump(next, rng);
                psi = std::move(next);
                r = rng.uniform();
            } else {
                psi = std::move(next);
            }
            if (rem) break;
        }
    }

    void apply_jump(Vec& psi, Rng& rng) const {
        // channel weights from the unnormalized state
        double w_h = 0.0, w_phi = 0.0;
        std::vector<double> w_z(ions_, 0.0);
        for (long q = 0; q < q3_; ++q) {
            long rest = q;
            int levels[16];
            for (int i = ions_ - 1; i >= 0; --i) {
                levels[i] = static_cast<int>(rest % 3);
                rest /= 3;
            }
            for (int n = 0; n <= noise_.n_max; ++n) {
                const double p = std::norm(psi[q * m_ + n]);
                if (p == 0.0) continue;
                if (n < noise_.n_max) w_h += noise_.gamma_h * (n + 1) * p;
                w_phi += noise_.gamma_phi * double(n) * double(n) * p;
                for (int i = 0; i < ions_; ++i)
                    if (levels[i] == 2) w_z[i] += noise_.gamma_z * p;
            }
        }
        double total = w_h + w_phi;
        for (double w : w_z) total += w;
        if (total <= 0.0) {
            psi.normalize();
            return;
        }
        double pick = rng.uniform() * total;
        if (pick < w_h) {
            jump_heating(psi);
        } else if (pick < w_h + w_phi) {
            jump_dephasing(psi);
        } else {
            pick -= w_h + w_phi;
            int ion = 0;
            for (; ion < ions_ - 1; ++ion) {
                if (pick < w_z[ion]) break;
                pick -= w_z[ion];
            }
            jump_zeeman(psi, ion);
        }
        psi.normalize();
    }

    void jump_heating(Vec& psi) const {
        for (long q = 0; q < q3_; ++q) {
            const long base = q * m_;
            for (int n = noise_.n_max; n >= 1; --n)
                psi[base + n] = std::sqrt(double(n)) * psi[base + n - 1];
            psi[base] = 0.0;
        }
    }

    void jump_dephasing(Vec& psi) const {
        for (long q = 0; q < q3_; ++q)
            for (int n = 0; n <= noise_.n_max; ++n) psi[q * m_ + n] *= double(n);
    }

    void jump_zeeman(Vec& psi, int ion) const {
        const long s_level = pow3(ions_ - 1 - ion);
        for (long q = 0; q < q3_; ++q)
            if ((q / s_level) % 3 != 2) psi.segment(q * m_, m_).setZero();
    }

    const Schedule& sched_;
    PhysParams phys_;
    NoiseParams noise_;
    const LabelTable* labels_;
    int ions_ = 0;
    long m_ = 0, q3_ = 0, dim_ = 0, block_dim_ = 0, group_count_ = 0;
    std::vector<std::uint8_t> f_count_;
    std::vector<double> thermal_;
    std::vector<PulseProp> props_;
};

int thread_count() {
    if (const char* env = std::getenv("CZPULSE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

FidelityReport run_once(const Schedule& s, const PhysParams& p, const NoiseParams& noise,
                        const Mat& ideal_qubit_gate, int iterations, const LabelTable* labels,
                        const std::vector<unsigned long>& inputs) {
    const TrajectoryEngine engine(s, p, noise, labels);
    const int ions = engine.ions();
    const long cdim = 1L << ions;
    if (ideal_qubit_gate.rows() != cdim)
        throw std::invalid_argument("ideal gate dimension does not match the ion count");

    Mat ideal_eff = Mat::Identity(cdim, cdim);
    for (int k = 0; k < iterations; ++k) ideal_eff = ideal_qubit_gate * ideal_eff;

    FidelityReport report;
    report.ions = ions;
    report.inputs = inputs;
    report.fidelity.assign(inputs.size(), 0.0);

    std::vector<std::vector<double>> per_traj(inputs.size(),
                                              std::vector<double>(noise.n_traj, 0.0));
    std::vector<double> cutoff(inputs.size() * noise.n_traj, 0.0);

    std::atomic<long> cursor{0};
    const long total = static_cast<long>(inputs.size()) * noise.n_traj;
    auto worker = [&] {
        for (;;) {
            const long job = cursor.fetch_add(1);
            if (job >= total) return;
            const long input_idx = job / noise.n_traj;
            const long traj = job % noise.n_traj;
            Rng rng(mix_seed(mix_seed(noise.seed, inputs[input_idx]), traj));
            const Vec ideal_out = ideal_eff.col(inputs[input_idx]);
            double pop = 0.0;
            per_traj[input_idx][traj] =
                engine.run(inputs[input_idx], ideal_out, rng, iterations, &pop);
            cutoff[job] = pop;
        }
    };

    const int threads = std::min<long>(thread_count(), total);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (size_t i = 0; i < inputs.size(); ++i) {
        double sum = 0.0;
        for (double f : per_traj[i]) sum += f;
        report.fidelity[i] = sum / noise.n_traj;
    }
    for (double popv : cutoff) report.max_cutoff_population = std::max(report.max_cutoff_population, popv);
    return report;
}

}  // namespace

FidelityReport run_trajectories(const Schedule& s, const PhysParams& p, const NoiseParams& noise,
                                const Mat& ideal_qubit_gate, int iterations,
                                const LabelTable* labels, bool check_convergence,
                                const std::vector<unsigned long>* input_subset) {
    p.require_valid();
    noise.require_valid();
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");

    std::vector<unsigned long> inputs;
    if (input_subset) {
        inputs = *input_subset;
    } else {
        inputs.resize(1UL << s.ion_count);
        for (unsigned long b = 0; b < inputs.size(); ++b) inputs[b] = b;
    }

    FidelityReport report = run_once(s, p, noise, ideal_qubit_gate, iterations, labels, inputs);
    if (check_convergence) {
        NoiseParams half = noise;
        half.dt = noise.dt / 2.0;
        const FidelityReport fine =
            run_once(s, p, half, ideal_qubit_gate, iterations, labels, inputs);
        for (size_t i = 0; i < inputs.size(); ++i)
            report.convergence_delta =
                std::max(report.convergence_delta, std::abs(fine.fidelity[i] - report.fidelity[i]));
        report.converged = report.convergence_delta <= 1e-3;
    }
    return report;
}

}  // namespace czpulse
