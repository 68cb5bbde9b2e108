// Copyright 2026 The h2qed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef H2QED_NOISE_H
#define H2QED_NOISE_H

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "h2qed/sim.h"

namespace h2qed {

/// Per-gate depolarizing rates. `p1` follows single-qubit gates and `p2` follows CNOTs.
struct NoiseConfig {
    double p1 = 0;
    double p2 = 0;

    /// The single-parameter model: p2 = p, p1 = p / 16.
    static NoiseConfig from_p(double p);
    void validate() const;
    bool is_noiseless() const {
        return p1 == 0 && p2 == 0;
    }
};

/// Readout flip probabilities of one qubit.
struct QubitReadout {
    double eps01 = 0;  // Pr(read 1 | true 0)
    double eps10 = 0;  // Pr(read 0 | true 1)
};

/// Independent, possibly asymmetric readout error per qubit.
struct ReadoutModel {
    std::vector<QubitReadout> qubits;

    static ReadoutModel uniform(int num_qubits, double eps01, double eps10);
    /// eps01 = 1 %, eps10 = 5 %: decay during readout makes 1 -> 0 the likelier flip.
    static ReadoutModel default_asymmetric(int num_qubits);

    int num_qubits() const {
        return static_cast<int>(qubits.size());
    }
    bool is_noiseless() const;
    void validate() const;
};

/// Column-stochastic confusion matrix, R(i, j) = Pr(measure i | truth j).
class ResponseMatrix {
   public:
    ResponseMatrix(int num_qubits, Eigen::MatrixXd matrix);

    int num_qubits() const {
        return num_qubits_;
    }
    std::size_t dim() const {
        return static_cast<std::size_t>(matrix_.rows());
    }
    const Eigen::MatrixXd &matrix() const {
        return matrix_;
    }
    double operator()(std::size_t measured, std::size_t truth) const {
        return matrix_(static_cast<Eigen::Index>(measured), static_cast<Eigen::Index>(truth));
    }
    /// Largest |column sum - 1|.
    double stochasticity_error() const;
    std::vector<double> apply(std::span<const double> truth) const;

   private:
    int num_qubits_;
    Eigen::MatrixXd matrix_;
};

/// rho -> (1 - p1) rho + (p1 / 4) sum_{E in {I,X,Y,Z}} E rho E^dagger on `qubit`.
void depolarize1(DensityState &state, int qubit, double p1);

/// Two-qubit analogue with the 16 products of single-qubit Paulis.
void depolarize2(DensityState &state, int qubit_i, int qubit_j, double p2);

/// Evolves |0...0> through the circuit, following every gate with the channel
/// matching its arity on the gate's own qubits.
DensityState run_noisy(const Circuit &circuit, const NoiseConfig &noise);

/// R * probs with R the tensor product of the per-qubit confusion matrices.
std::vector<double> apply_readout(std::span<const double> probs, const ReadoutModel &model);

/// Analytic response matrix of the model.
ResponseMatrix build_response(const ReadoutModel &model, int num_qubits);

/// Empirical response matrix from 2^n simulated calibration circuits, each
/// preparing one basis state with X gates and sampled `shots` times.
ResponseMatrix calibrate_response(const ReadoutModel &model, int num_qubits, std::uint64_t shots, std::uint64_t seed);

}  // namespace h2qed

#endif  // H2QED_NOISE_H
