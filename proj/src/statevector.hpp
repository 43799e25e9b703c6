// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace qsdc {

using Complex = std::complex<double>;

// Numerical contracts used throughout the library.
inline constexpr double kNormTolerance = 1e-10;   // state norm after any op
inline constexpr double kBasisTolerance = 1e-12;  // orthonormality / unitarity
inline constexpr double kZeroProbability = 1e-9;  // below this an outcome is "impossible"
inline constexpr int kMaxQubits = 8;

// Dense 2x2 complex matrix, row-major: [a b; c d].
struct Mat2 {
    Complex a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};

    Mat2 operator*(const Mat2& o) const {
        return Mat2{a * o.a + b * o.c, a * o.b + b * o.d,
                    c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 dagger() const {
        return Mat2{std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
    bool is_unitary(double tol = kBasisTolerance) const;
};

// Returns true and sets *phase when m == phase * p with |phase| == 1.
bool proportional(const Mat2& m, const Mat2& p, Complex* phase = nullptr,
                  double tol = 1e-9);

// The single-qubit operations the protocols use.  PauliIY is the standard
// i*sigma_y, i.e. |0> -> -|1>, |1> -> |0>.
enum class Gate1 { Identity, PauliZ, PauliX, PauliIY, Hadamard };

Mat2 gate_matrix(Gate1 g);
const char* gate_name(Gate1 g);

// Dense pure state of 1..8 qubits.  Qubit 0 is the most significant bit of
// the computational basis label: for a 3-qubit state, |011> has qubit 0 = 0,
// qubit 1 = 1, qubit 2 = 1 and amplitude index 3.
class StateVector {
public:
    StateVector() = default;

    // Normalized superposition of the given computational terms.
    // Throws std::invalid_argument on an empty/zero term list, duplicate
    // basis strings, malformed bit strings, or num_qubits outside 1..8.
    static StateVector from_terms(
        int num_qubits,
        std::span<const std::pair<std::string, Complex>> terms);

    static StateVector basis(int num_qubits, std::string_view bits);

    // Wraps a raw amplitude vector; it must already be normalized.
    static StateVector from_amplitudes(int num_qubits, std::vector<Complex> amps);

    // Tensor product; qubits of `a` precede qubits of `b`.
    // Throws if the combined size would exceed 8 qubits.
    static StateVector tensor(const StateVector& a, const StateVector& b);

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<Complex>& amplitudes() const { return amps_; }
    Complex amplitude(std::string_view bits) const;

    double norm() const;

    // Applies a single-qubit operation.  Unitarity of `m` is checked to
    // 1e-12 and the result's norm to 1e-10; qubit must be in range.
    StateVector apply(const Mat2& m, int qubit) const;
    StateVector apply(Gate1 g, int qubit) const { return apply(gate_matrix(g), qubit); }

    // <this|other>
    Complex inner(const StateVector& other) const;

    // |<a|b>| >= 1 - tol for normalized states; sizes must match.
    bool equal_up_to_global_phase(const StateVector& other,
                                  double tol = kNormTolerance) const;

private:
    int num_qubits_ = 0;
    std::vector<Complex> amps_;
};

// ---------------------------------------------------------------------------
// Measurements.
//
// A MeasurementSpec is an ordered list of basis factors over disjoint qubit
// subsets: Z or X on one qubit, Bell on an ordered pair, GHZ on an ordered
// triple.  Qubits not covered by any factor are left unmeasured and the
// post-measurement state keeps them (partial measurement).
// ---------------------------------------------------------------------------

enum class BasisKind { Z, X, Bell, Ghz };

int basis_dim(BasisKind k);       // 2, 2, 4, 8
int basis_qubits(BasisKind k);    // 1, 1, 2, 3

// Display label for outcome value v of a factor:
//   Z: "0" "1"; X: "+" "-"; Bell: "phi+" "phi-" "psi+" "psi-"; Ghz: "ghz1".."ghz8".
std::string basis_label(BasisKind k, int v);

// Real coefficients of basis vector v over the factor's own qubits, listed
// in the factor's qubit order (most significant first).
std::span<const double> basis_vector(BasisKind k, int v);

struct MeasureFactor {
    BasisKind kind;
    std::vector<int> qubits;
};

struct MeasurementSpec {
    std::vector<MeasureFactor> factors;

    // Throws std::invalid_argument on overlapping subsets, out-of-range
    // qubits, or a factor whose qubit count does not match its basis.
    void validate(int num_qubits) const;

    int outcome_count() const;
};

// One joint outcome: a label per factor, in factor order, plus its exact
// Born probability.
struct Outcome {
    std::vector<int> labels;
    double probability = 0.0;

    std::string to_string(const MeasurementSpec& spec) const;
};

// Exact Born probabilities for every joint outcome label (zero-probability
// outcomes included).  Probabilities sum to 1 within 1e-10.
std::vector<Outcome> outcome_distribution(const StateVector& state,
                                          const MeasurementSpec& spec);

// Probability of one specific joint outcome together with the collapsed,
// renormalized post-measurement state.  Throws std::invalid_argument when the
// outcome probability is below 1e-9 (no state to collapse to) or the labels
// do not match the spec.
std::pair<double, StateVector> project(const StateVector& state,
                                       const MeasurementSpec& spec,
                                       const std::vector<int>& labels);

// Samples one outcome (consumes exactly one uniform01 draw) and returns it
// with the collapsed, renormalized post-measurement state.
std::pair<Outcome, StateVector> measure(const StateVector& state,
                                        const MeasurementSpec& spec,
                                        RandomStream& rng);

} // namespace qsdc
