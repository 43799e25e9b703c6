// SPDX-License-Identifier: Apache-2.0
#include "statevector.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qsdc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_qubit_count(int n) {
    if (n < 1 || n > kMaxQubits) {
        throw std::invalid_argument("qubit count must be between 1 and 8, got " +
                                    std::to_string(n));
    }
}

std::size_t parse_bits(std::string_view bits, int num_qubits) {
    if (static_cast<int>(bits.size()) != num_qubits) {
        throw std::invalid_argument("basis string '" + std::string(bits) +
                                    "' does not have " + std::to_string(num_qubits) +
                                    " bits");
    }
    std::size_t idx = 0;
    for (char ch : bits) {
        if (ch != '0' && ch != '1') {
            throw std::invalid_argument("basis string '" + std::string(bits) +
                                        "' contains a character other than 0/1");
        }
        idx = (idx << 1) | static_cast<std::size_t>(ch - '0');
    }
    return idx;
}

} // namespace

bool Mat2::is_unitary(double tol) const {
    const Mat2 g = dagger() * (*this);
    return std::abs(g.a - Complex{1, 0}) <= tol && std::abs(g.b) <= tol &&
           std::abs(g.c) <= tol && std::abs(g.d - Complex{1, 0}) <= tol;
}

bool proportional(const Mat2& m, const Mat2& p, Complex* phase, double tol) {
    const Complex* me = &m.a;
    const Complex* pe = &p.a;
    Complex lambda{0, 0};
    for (int i = 0; i < 4; ++i) {
        if (std::abs(pe[i]) > tol) {
            lambda = me[i] / pe[i];
            break;
        }
    }
    if (std::abs(lambda) <= tol) return false;
    for (int i = 0; i < 4; ++i) {
        if (std::abs(me[i] - lambda * pe[i]) > tol) return false;
    }
    if (phase) *phase = lambda;
    return true;
}

Mat2 gate_matrix(Gate1 g) {
    switch (g) {
    case Gate1::Identity: return Mat2{{1, 0}, {0, 0}, {0, 0}, {1, 0}};
    case Gate1::PauliZ:   return Mat2{{1, 0}, {0, 0}, {0, 0}, {-1, 0}};
    case Gate1::PauliX:   return Mat2{{0, 0}, {1, 0}, {1, 0}, {0, 0}};
    // i*sigma_y: |0> -> -|1>, |1> -> |0>
    case Gate1::PauliIY:  return Mat2{{0, 0}, {1, 0}, {-1, 0}, {0, 0}};
    case Gate1::Hadamard:
        return Mat2{{kInvSqrt2, 0}, {kInvSqrt2, 0}, {kInvSqrt2, 0}, {-kInvSqrt2, 0}};
    }
    throw std::invalid_argument("unknown gate");
}

const char* gate_name(Gate1 g) {
    switch (g) {
    case Gate1::Identity: return "I";
    case Gate1::PauliZ:   return "Z";
    case Gate1::PauliX:   return "X";
    case Gate1::PauliIY:  return "iY";
    case Gate1::Hadamard: return "H";
    }
    return "?";
}

StateVector StateVector::from_terms(
    int num_qubits, std::span<const std::pair<std::string, Complex>> terms) {
    check_qubit_count(num_qubits);
    if (terms.empty()) {
        throw std::invalid_argument("state needs at least one basis term");
    }
    StateVector s;
    s.num_qubits_ = num_qubits;
    s.amps_.assign(std::size_t{1} << num_qubits, Complex{0, 0});
    std::set<std::size_t> seen;
    for (const auto& [bits, amp] : terms) {
        const std::size_t idx = parse_bits(bits, num_qubits);
        if (!seen.insert(idx).second) {
            throw std::invalid_argument("duplicate basis string '" + bits + "'");
        }
        s.amps_[idx] = amp;
    }
    const double n = s.norm();
    if (n <= kBasisTolerance) {
        throw std::invalid_argument("state amplitudes are all zero");
    }
    for (auto& a : s.amps_) a /= n;
    return s;
}

StateVector StateVector::basis(int num_qubits, std::string_view bits) {
    const std::pair<std::string, Complex> term{std::string(bits), Complex{1, 0}};
    return from_terms(num_qubits, std::span<const std::pair<std::string, Complex>>(&term, 1));
}

StateVector StateVector::from_amplitudes(int num_qubits, std::vector<Complex> amps) {
    check_qubit_count(num_qubits);
    if (amps.size() != (std::size_t{1} << num_qubits)) {
        throw std::invalid_argument("amplitude vector size does not match qubit count");
    }
    StateVector s;
    s.num_qubits_ = num_qubits;
    s.amps_ = std::move(amps);
    if (std::abs(s.norm() - 1.0) > kNormTolerance) {
        throw std::invalid_argument("amplitude vector is not normalized");
    }
    return s;
}

StateVector StateVector::tensor(const StateVector& a, const StateVector& b) {
    if (a.num_qubits_ == 0 || b.num_qubits_ == 0) {
        throw std::invalid_argument("tensor of an empty state");
    }
    if (a.num_qubits_ + b.num_qubits_ > kMaxQubits) {
        throw std::invalid_argument("tensor product would exceed 8 qubits");
    }
    StateVector out;
    out.num_qubits_ = a.num_qubits_ + b.num_qubits_;
    out.amps_.assign(std::size_t{1} << out.num_qubits_, Complex{0, 0});
    const std::size_t bd = b.amps_.size();
    for (std::size_t i = 0; i < a.amps_.size(); ++i) {
        if (a.amps_[i] == Complex{0, 0}) continue;
        for (std::size_t j = 0; j < bd; ++j) {
            out.amps_[(i << b.num_qubits_) | j] = a.amps_[i] * b.amps_[j];
        }
    }
    return out;
}

Complex StateVector::amplitude(std::string_view bits) const {
    return amps_[parse_bits(bits, num_qubits_)];
}

double StateVector::norm() const {
    double s = 0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

StateVector StateVector::apply(const Mat2& m, int qubit) const {
    if (qubit < 0 || qubit >= num_qubits_) {
        throw std::invalid_argument("qubit " + std::to_string(qubit) +
                                    " out of range for " + std::to_string(num_qubits_) +
                                    "-qubit state");
    }
    if (!m.is_unitary()) {
        throw std::invalid_argument("single-qubit operation is not unitary");
    }
    StateVector out = *this;
    // Qubit 0 is the most significant bit of the index.
    const std::size_t mask = std::size_t{1} << (num_qubits_ - 1 - qubit);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        if (i & mask) continue;
        const std::size_t j = i | mask;
        const Complex lo = amps_[i], hi = amps_[j];
        out.amps_[i] = m.a * lo + m.b * hi;
        out.amps_[j] = m.c * lo + m.d * hi;
    }
    if (std::abs(out.norm() - 1.0) > kNormTolerance) {
        throw std::logic_error("state norm drifted beyond tolerance after apply");
    }
    return out;
}

Complex StateVector::inner(const StateVector& other) const {
    if (num_qubits_ != other.num_qubits_) {
        throw std::invalid_argument("inner product of states with different sizes");
    }
    Complex s{0, 0};
    for (std::size_t i = 0; i < amps_.size(); ++i) {
        s += std::conj(amps_[i]) * other.amps_[i];
    }
    return s;
}

bool StateVector::equal_up_to_global_phase(const StateVector& other,
                                           double tol) const {
    return std::abs(inner(other)) >= 1.0 - tol;
}

// ---------------------------------------------------------------------------
// Measurement bases.
// ---------------------------------------------------------------------------

namespace {

const double kZ[2][2] = {{1, 0}, {0, 1}};

const double kX[2][2] = {{kInvSqrt2, kInvSqrt2}, {kInvSqrt2, -kInvSqrt2}};

// phi+ phi- psi+ psi- over |00> |01> |10> |11>.
const double kBell[4][4] = {
    {kInvSqrt2, 0, 0, kInvSqrt2},
    {kInvSqrt2, 0, 0, -kInvSqrt2},
    {0, kInvSqrt2, kInvSqrt2, 0},
    {0, kInvSqrt2, -kInvSqrt2, 0},
};

// The eight maximally entangled three-qubit basis states, indexed 1..8 in
// the order used everywhere in this project:
//   1: (|000>+|111>)/sqrt2   2: (|000>-|111>)/sqrt2
//   3: (|100>+|011>)/sqrt2   4: (|100>-|011>)/sqrt2
//   5: (|010>+|101>)/sqrt2   6: (|010>-|101>)/sqrt2
//   7: (|110>+|001>)/sqrt2   8: (|110>-|001>)/sqrt2
const double kGhz[8][8] = {
    {kInvSqrt2, 0, 0, 0, 0, 0, 0, kInvSqrt2},
    {kInvSqrt2, 0, 0, 0, 0, 0, 0, -kInvSqrt2},
    {0, 0, 0, kInvSqrt2, kInvSqrt2, 0, 0, 0},
    {0, 0, 0, -kInvSqrt2, kInvSqrt2, 0, 0, 0},
    {0, 0, kInvSqrt2, 0, 0, kInvSqrt2, 0, 0},
    {0, 0, kInvSqrt2, 0, 0, -kInvSqrt2, 0, 0},
    {0, kInvSqrt2, 0, 0, 0, 0, kInvSqrt2, 0},
    {0, -kInvSqrt2, 0, 0, 0, 0, kInvSqrt2, 0},
};

const char* const kBellNames[4] = {"phi+", "phi-", "psi+", "psi-"};

} // namespace

int basis_dim(BasisKind k) {
    switch (k) {
    case BasisKind::Z: case BasisKind::X: return 2;
    case BasisKind::Bell: return 4;
    case BasisKind::Ghz: return 8;
    }
    return 0;
}

int basis_qubits(BasisKind k) {
    switch (k) {
    case BasisKind::Z: case BasisKind::X: return 1;
    case BasisKind::Bell: return 2;
    case BasisKind::Ghz: return 3;
    }
    return 0;
}

std::string basis_label(BasisKind k, int v) {
    switch (k) {
    case BasisKind::Z: return v ? "1" : "0";
    case BasisKind::X: return v ? "-" : "+";
    case BasisKind::Bell: return kBellNames[v];
    case BasisKind::Ghz: return "ghz" + std::to_string(v + 1);
    }
    return "?";
}

std::span<const double> basis_vector(BasisKind k, int v) {
    if (v < 0 || v >= basis_dim(k)) {
        throw std::invalid_argument("basis vector index out of range");
    }
    switch (k) {
    case BasisKind::Z: return std::span<const double>(kZ[v], 2);
    case BasisKind::X: return std::span<const double>(kX[v], 2);
    case BasisKind::Bell: return std::span<const double>(kBell[v], 4);
    case BasisKind::Ghz: return std::span<const double>(kGhz[v], 8);
    }
    throw std::invalid_argument("unknown basis kind");
}

void MeasurementSpec::validate(int num_qubits) const {
    if (factors.empty()) {
        throw std::invalid_argument("measurement needs at least one factor");
    }
    std::set<int> used;
    for (const auto& f : factors) {
        if (static_cast<int>(f.qubits.size()) != basis_qubits(f.kind)) {
            throw std::invalid_argument("factor qubit count does not match basis size");
        }
        for (int q : f.qubits) {
            if (q < 0 || q >= num_qubits) {
                throw std::invalid_argument("measured qubit " + std::to_string(q) +
                                            " out of range");
            }
            if (!used.insert(q).second) {
                throw std::invalid_argument("qubit " + std::to_string(q) +
                                            " appears in two measurement factors");
            }
        }
    }
}

int MeasurementSpec::outcome_count() const {
    int n = 1;
    for (const auto& f : factors) n *= basis_dim(f.kind);
    return n;
}

std::string Outcome::to_string(const MeasurementSpec& spec) const {
    std::ostringstream os;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) os << ",";
        os << basis_label(spec.factors[i].kind, labels[i]);
    }
    return os.str();
}

namespace {

// Shared layout for one distribution/collapse computation.
struct MeasureLayout {
    std::vector<int> covered;     // measured qubits, factor order
    std::vector<int> uncovered;   // remaining qubits, ascending
    std::vector<int> dims;        // factor dimensions

    // Coefficient of joint basis vector `labels` at covered-assignment c
    // (bits of the covered qubits, factor order, most significant first).
    double joint_coeff(const MeasurementSpec& spec, const std::vector<int>& labels,
                       std::size_t c) const {
        double coeff = 1.0;
        int bit_off = static_cast<int>(covered.size());
        for (std::size_t f = 0; f < spec.factors.size(); ++f) {
            const int nq = basis_qubits(spec.factors[f].kind);
            bit_off -= nq;
            const std::size_t sub = (c >> bit_off) & ((std::size_t{1} << nq) - 1);
            coeff *= basis_vector(spec.factors[f].kind, labels[f])[sub];
            if (coeff == 0.0) return 0.0;
        }
        return coeff;
    }
};

MeasureLayout make_layout(const StateVector& state, const MeasurementSpec& spec) {
    MeasureLayout lay;
    for (const auto& f : spec.factors) {
        lay.covered.insert(lay.covered.end(), f.qubits.begin(), f.qubits.end());
        lay.dims.push_back(basis_dim(f.kind));
    }
    std::set<int> cov(lay.covered.begin(), lay.covered.end());
    for (int q = 0; q < state.num_qubits(); ++q) {
        if (!cov.count(q)) lay.uncovered.push_back(q);
    }
    return lay;
}

std::size_t full_index(const MeasureLayout& lay, int num_qubits,
                       std::size_t c, std::size_t r) {
    std::size_t idx = 0;
    const int m = static_cast<int>(lay.covered.size());
    for (int i = 0; i < m; ++i) {
        if ((c >> (m - 1 - i)) & 1) {
            idx |= std::size_t{1} << (num_qubits - 1 - lay.covered[i]);
        }
    }
    const int u = static_cast<int>(lay.uncovered.size());
    for (int i = 0; i < u; ++i) {
        if ((r >> (u - 1 - i)) & 1) {
            idx |= std::size_t{1} << (num_qubits - 1 - lay.uncovered[i]);
        }
    }
    return idx;
}

// Unnormalized residual amplitudes over the uncovered qubits after
// projecting onto the joint basis vector `labels`.
std::vector<Complex> project_residual(const StateVector& state,
                                      const MeasurementSpec& spec,
                                      const MeasureLayout& lay,
                                      const std::vector<int>& labels) {
    const std::size_t nc = std::size_t{1} << lay.covered.size();
    const std::size_t nr = std::size_t{1} << lay.uncovered.size();
    std::vector<Complex> residual(nr, Complex{0, 0});
    for (std::size_t c = 0; c < nc; ++c) {
        const double coeff = lay.joint_coeff(spec, labels, c);
        if (coeff == 0.0) continue;
        for (std::size_t r = 0; r < nr; ++r) {
            residual[r] += coeff * state.amplitudes()[full_index(lay, state.num_qubits(), c, r)];
        }
    }
    return residual;
}

std::vector<int> labels_for(const MeasureLayout& lay, int flat) {
    std::vector<int> labels(lay.dims.size());
    for (int f = static_cast<int>(lay.dims.size()) - 1; f >= 0; --f) {
        labels[f] = flat % lay.dims[f];
        flat /= lay.dims[f];
    }
    return labels;
}

} // namespace

std::vector<Outcome> outcome_distribution(const StateVector& state,
                                          const MeasurementSpec& spec) {
    spec.validate(state.num_qubits());
    const MeasureLayout lay = make_layout(state, spec);
    const int total = spec.outcome_count();
    std::vector<Outcome> out;
    out.reserve(total);
    double sum = 0;
    for (int flat = 0; flat < total; ++flat) {
        Outcome o;
        o.labels = labels_for(lay, flat);
        const auto residual = project_residual(state, spec, lay, o.labels);
        double p = 0;
        for (const auto& a : residual) p += std::norm(a);
        o.probability = p;
        sum += p;
        out.push_back(std::move(o));
    }
    if (std::abs(sum - 1.0) > kNormTolerance) {
        throw std::logic_error("outcome probabilities do not sum to 1");
    }
    return out;
}

std::pair<double, StateVector> project(const StateVector& state,
                                       const MeasurementSpec& spec,
                                       const std::vector<int>& labels) {
    spec.validate(state.num_qubits());
    if (labels.size() != spec.factors.size()) {
        throw std::invalid_argument("label count does not match measurement factors");
    }
    for (std::size_t f = 0; f < labels.size(); ++f) {
        if (labels[f] < 0 || labels[f] >= basis_dim(spec.factors[f].kind)) {
            throw std::invalid_argument("outcome label out of range for its factor");
        }
    }
    const MeasureLayout lay = make_layout(state, spec);
    const auto residual = project_residual(state, spec, lay, labels);
    double p = 0;
    for (const auto& a : residual) p += std::norm(a);
    if (p <= kZeroProbability) {
        throw std::invalid_argument("cannot collapse onto a zero-probability outcome");
    }
    const double scale = 1.0 / std::sqrt(p);

    std::vector<Complex> amps(state.dim(), Complex{0, 0});
    const std::size_t nc = std::size_t{1} << lay.covered.size();
    const std::size_t nr = std::size_t{1} << lay.uncovered.size();
    for (std::size_t c = 0; c < nc; ++c) {
        const double coeff = lay.joint_coeff(spec, labels, c);
        if (coeff == 0.0) continue;
        for (std::size_t r = 0; r < nr; ++r) {
            amps[full_index(lay, state.num_qubits(), c, r)] = coeff * residual[r] * scale;
        }
    }
    return {p, StateVector::from_amplitudes(state.num_qubits(), std::move(amps))};
}

std::pair<Outcome, StateVector> measure(const StateVector& state,
                                        const MeasurementSpec& spec,
                                        RandomStream& rng) {
    const auto dist = outcome_distribution(state, spec);
    const double u = rng.uniform01();
    double cum = 0;
    std::size_t pick = dist.size() - 1;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        cum += dist[i].probability;
        if (u < cum) {
            pick = i;
            break;
        }
    }
    // Degenerate rounding can leave `pick` on a zero-probability tail entry;
    // step back to the last outcome with real weight.
    while (pick > 0 && dist[pick].probability <= 0.0) --pick;

    auto [p, collapsed] = project(state, spec, dist[pick].labels);
    (void)p;
    return {dist[pick], std::move(collapsed)};
}

} // namespace qsdc
