#include "czpulse/exact_sim.hpp"

#include <cmath>
#include <stdexcept>

#include "czpulse/compiler.hpp"

namespace czpulse {

namespace {

long pow3(int k) {
    long r = 1;
    while (k-- > 0) r *= 3;
    return r;
}

}  // namespace

StateVector StateVector::zero(int ions, int n_max) {
    StateVector s;
    s.ions = ions;
    s.n_max = n_max;
    s.amps = Vec::Zero(pow3(ions) * (n_max + 1));
    return s;
}

long StateVector::index(const std::vector<int>& levels, int n) const {
    if (static_cast<int>(levels.size()) != ions) throw std::invalid_argument("level count mismatch");
    if (n < 0 || n > n_max) throw std::invalid_argument("fock index out of range");
    long idx = 0;
    for (int lvl : levels) {
        if (lvl < 0 || lvl > 2) throw std::invalid_argument("level out of range");
        idx = idx * 3 + lvl;
    }
    return idx * (n_max + 1) + n;
}

StateVector StateVector::basis(int ions, int n_max, const std::vector<int>& levels, int n) {
    StateVector s = zero(ions, n_max);
    s.amps[s.index(levels, n)] = 1.0;
    return s;
}

StateVector StateVector::computational(int ions, int n_max, unsigned long bits) {
    std::vector<int> levels(ions);
    for (int q = 0; q < ions; ++q) levels[q] = (bits >> (ions - 1 - q)) & 1UL;
    return basis(ions, n_max, levels, 0);
}

namespace {

struct Strides {
    long level;  // stride of the addressed ion's level
    long outer;  // stride of the block of ions before it
    long n_hi;   // number of outer blocks
};

Strides strides_for(const StateVector& psi, int ion) {
    if (ion < 0 || ion >= psi.ions) throw std::invalid_argument("pulse ion out of range");
    const long m = psi.n_max + 1;
    Strides s;
    s.level = pow3(psi.ions - 1 - ion) * m;
    s.outer = s.level * 3;
    s.n_hi = pow3(ion);
    return s;
}

void rotate_pair(Vec& a, long i, long j, const Mat2& u) {
    const cplx x = a[i], y = a[j];
    a[i] = u(0, 0) * x + u(0, 1) * y;
    a[j] = u(1, 0) * x + u(1, 1) * y;
}

// sideband on the {|n,g>, |n-1,partner>} blocks; pairs that would couple above
// the cutoff are left alone, keeping the map unitary
void apply_sideband(StateVector& psi, const PulseOp& op, int partner_level) {
    const auto st = strides_for(psi, op.ion);
    const long m = psi.n_max + 1;
    std::vector<Mat2> block(psi.n_max + 1);
    for (int n = 1; n <= psi.n_max; ++n) block[n] = pulse_block_unitary(op.kind, op.theta, op.phi, n);
    for (long hi = 0; hi < st.n_hi; ++hi) {
        const long base = hi * st.outer;
        for (long lo = 0; lo < st.level; ++lo) {
            const long n = lo % m;
            if (n < 1) continue;
            rotate_pair(psi.amps, base + lo, base + partner_level * st.level + lo - 1, block[n]);
        }
    }
}

void apply_carrier(StateVector& psi, double theta, double phi, int ion) {
    const auto st = strides_for(psi, ion);
    const Mat2 u = carrier_matrix(theta, phi);
    for (long hi = 0; hi < st.n_hi; ++hi) {
        const long base = hi * st.outer;
        for (long lo = 0; lo < st.level; ++lo)
            rotate_pair(psi.amps, base + lo, base + st.level + lo, u);
    }
}

void apply_z(StateVector& psi, int ion) {
    const auto st = strides_for(psi, ion);
    for (long hi = 0; hi < st.n_hi; ++hi) {
        const long base = hi * st.outer + st.level;  // level e
        for (long lo = 0; lo < st.level; ++lo) psi.amps[base + lo] = -psi.amps[base + lo];
    }
}

void apply_target_unitary(StateVector& psi, const PulseOp& op, const LabelTable* labels) {
    if (!labels) throw std::runtime_error("target unitary '" + op.label + "' needs a label table");
    auto it = labels->find(op.label);
    if (it == labels->end()) throw std::runtime_error("unknown target unitary label '" + op.label + "'");
    const Mat& u = it->second;

    int k = 0;
    while ((1L << k) < u.rows()) ++k;
    if ((1L << k) != u.rows() || u.rows() != u.cols())
        throw std::runtime_error("target matrix dimension is not a power of two");
    if (k >= psi.ions || op.ion >= psi.ions - k)
        throw std::runtime_error("target register overlaps the control ion");

    const long m = psi.n_max + 1;
    const long tdim = 1L << k;
    std::vector<long> tstride(k);
    for (int j = 0; j < k; ++j) tstride[j] = pow3(psi.ions - 1 - (psi.ions - k + j)) * m;
    const long cstride = pow3(psi.ions - 1 - op.ion) * m;

    Vec buf(tdim);
    const long dim = psi.dim();
    for (long idx = 0; idx < dim; ++idx) {
        // process each group at its all-zero-target representative
        bool rep = true;
        for (int j = 0; j < k && rep; ++j) rep = ((idx / tstride[j]) % 3) == 0;
        if (!rep) continue;
        if ((idx / cstride) % 3 != 1) continue;  // control ion must be in e

        for (long t = 0; t < tdim; ++t) {
            long off = 0;
            for (int j = 0; j < k; ++j)
                if ((t >> (k - 1 - j)) & 1L) off += tstride[j];
            buf[t] = psi.amps[idx + off];
        }
        buf = (u * buf).eval();
        for (long t = 0; t < tdim; ++t) {
            long off = 0;
            for (int j = 0; j < k; ++j)
                if ((t >> (k - 1 - j)) & 1L) off += tstride[j];
            psi.amps[idx + off] = buf[t];
        }
    }
}

}  // namespace

void apply_pulse(StateVector& psi, const PulseOp& op, const PhysParams& p, const LabelTable* labels) {
    (void)p;
    switch (op.kind) {
        case PulseKind::Rsb:
            apply_sideband(psi, op, 1);
            break;
        case PulseKind::RsbAux:
            apply_sideband(psi, op, 2);
            break;
        case PulseKind::Carrier:
            apply_carrier(psi, op.theta, op.phi, op.ion);
            break;
        case PulseKind::XGate:
            apply_carrier(psi, kPi, 0.0, op.ion);
            break;
        case PulseKind::ZGate:
            apply_z(psi, op.ion);
            break;
        case PulseKind::TargetUnitary:
            apply_target_unitary(psi, op, labels);
            break;
    }
}

void apply_schedule(StateVector& psi, const Schedule& s, const PhysParams& p, const LabelTable* labels) {
    for (const auto& op : s.pulses) apply_pulse(psi, op, p, labels);
}

Mat schedule_unitary(const Schedule& s, int ions, int n_max, const PhysParams& p,
                     const LabelTable* labels) {
    const long dim = pow3(ions) * (n_max + 1);
    Mat u(dim, dim);
    for (long col = 0; col < dim; ++col) {
        StateVector psi = StateVector::zero(ions, n_max);
        psi.amps[col] = 1.0;
        apply_schedule(psi, s, p, labels);
        u.col(col) = psi.amps;
    }
    return u;
}

ComputationalBlock computational_block(const Schedule& s, int ions, int n_max,
                                       const PhysParams& p, const LabelTable* labels) {
    const long cdim = 1L << ions;
    ComputationalBlock out;
    out.block = Mat::Zero(cdim, cdim);
    std::vector<int> levels(ions);
    std::vector<long> comp_index(cdim);
    for (long row = 0; row < cdim; ++row) {
        for (int q = 0; q < ions; ++q) levels[q] = (row >> (ions - 1 - q)) & 1L;
        comp_index[row] = StateVector::zero(ions, n_max).index(levels, 0);
    }
    for (long col = 0; col < cdim; ++col) {
        StateVector psi = StateVector::computational(ions, n_max, col);
        apply_schedule(psi, s, p, labels);
        for (long row = 0; row < cdim; ++row) {
            out.block(row, col) = psi.amps[comp_index[row]];
            psi.amps[comp_index[row]] = 0.0;
        }
        out.max_leakage = std::max(out.max_leakage, psi.amps.norm());
    }
    return out;
}

PhaseEquiv equiv_up_to_global_phase(const Mat& u, const Mat& v, const Mat& projector, double tol) {
    Mat a = projector.size() ? Mat(projector * u * projector) : u;
    Mat b = projector.size() ? Mat(projector * v * projector) : v;
    return equiv_up_to_global_phase(a, b, tol);
}

PhaseEquiv equiv_up_to_global_phase(const Mat& u, const Mat& v, double tol) {
    if (u.rows() != v.rows() || u.cols() != v.cols())
        throw std::invalid_argument("dimension mismatch");
    PhaseEquiv r;
    Eigen::Index br = 0, bc = 0;
    v.cwiseAbs().maxCoeff(&br, &bc);
    if (std::abs(v(br, bc)) < tol) {
        r.deviation = u.cwiseAbs().maxCoeff();
        r.equal = r.deviation < tol;
        return r;
    }
    const cplx z = u(br, bc) / v(br, bc);
    r.phase = std::arg(z);
    const cplx phase = std::exp(cplx(0.0, r.phase));
    r.deviation = (u - phase * v).cwiseAbs().maxCoeff();
    r.equal = r.deviation < tol;
    return r;
}

std::string basis_label(const std::vector<int>& levels, int n) {
    static const char names[] = {'g', 'e', 'f'};
    std::string s;
    for (int lvl : levels) s += names[lvl];
    s += ':';
    s += std::to_string(n);
    return s;
}

std::vector<int> trace_case_levels(int case_id) {
    switch (case_id) {
        case 1: return {0, 1, 0};
        case 2: return {0, 1, 1};
        case 3: return {1, 0, 0};
        case 4: return {1, 0, 1};
        case 5: return {1, 1, 0};
        case 6: return {1, 1, 1};
        default: throw std::invalid_argument("case id must be in 1..6");
    }
}

std::vector<TraceRecord> trace_case(int case_id, int s1, int s2,
                                    const Mat& target_unitary_2x2, const PhysParams& p) {
    const int n_controls = 3;
    GateSpec core = make_multi_controlled(std::string(n_controls, '1'), target_unitary_2x2, "U");
    Schedule sched = lower_mc_gate(core, s1, s2);
    LabelTable labels{{"U", target_unitary_2x2}};

    // step boundaries of the construction: encode (N), conditional block (5),
    // decode (N), phase correction (rest)
    const size_t cuts[] = {size_t(n_controls), size_t(n_controls) + 5, 2 * size_t(n_controls) + 5,
                           sched.pulses.size()};

    std::vector<int> levels = trace_case_levels(case_id);
    levels.push_back(0);  // target starts in g
    const int ions = n_controls + 1;
    const int n_max = 2;
    StateVector psi = StateVector::basis(ions, n_max, levels, 0);

    std::vector<TraceRecord> log;
    size_t next = 0;
    for (int step = 1; step <= 4; ++step) {
        for (; next < cuts[step - 1]; ++next) apply_pulse(psi, sched.pulses[next], p, &labels);
        std::vector<int> lv(ions);
        for (long idx = 0; idx < psi.dim(); ++idx) {
            if (std::abs(psi.amps[idx]) < 1e-12) continue;
            long rest = idx / (n_max + 1);
            const int n = static_cast<int>(idx % (n_max + 1));
            for (int q = ions - 1; q >= 0; --q) {
                lv[q] = static_cast<int>(rest % 3);
                rest /= 3;
            }
            log.push_back({step, basis_label(lv, n), psi.amps[idx]});
        }
    }
    return log;
}

}  // namespace czpulse
