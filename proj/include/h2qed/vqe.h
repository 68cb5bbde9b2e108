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

#ifndef H2QED_VQE_H
#define H2QED_VQE_H

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "h2qed/code422.h"
#include "h2qed/noise.h"
#include "h2qed/sim.h"
#include "h2qed/unfold.h"

namespace h2qed {

enum class Family { kPhysical, kEncoded };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);

/// Hamiltonian terms in output column order.
enum class Term { kZ1, kZ2, kZ1Z2, kX1X2 };
inline constexpr std::array<Term, 4> kTerms{Term::kZ1, Term::kZ2, Term::kZ1Z2, Term::kX1X2};

/// Chemical accuracy in Hartree.
inline constexpr double kChemicalAccuracy = 1.6e-3;

/// Ry(theta) on q1, CNOT(q1, q2), then H on both qubits in the X basis.
/// Before the basis change the state is cos(theta/2)|00> + sin(theta/2)|11>.
Circuit physical_ansatz_circuit(double theta, MeasBasis basis);

/// Flagged preparation, rotation gadget, free logical CNOT(1->2) and, in the X
/// basis, the transversal basis change. All six qubits are measured.
Circuit encoded_ansatz_circuit(double theta, MeasBasis basis);

/// Expectation of a term from a two-bit logical histogram (b1 in bit 0).
/// X1X2 is read from X-basis counts as a parity.
double expectation_from_counts(const Counts &logical, Term term);

/// Odd number of equally spaced angles covering [-pi, pi] with both endpoints.
/// The endpoints are the same physical angle, so the grid has points() - 1
/// distinct bins and a shift by pi is exactly shift() bins.
class ThetaGrid {
   public:
    explicit ThetaGrid(int points);

    int points() const {
        return points_;
    }
    int unique_bins() const {
        return points_ - 1;
    }
    int shift() const {
        return (points_ - 1) / 2;
    }
    double step() const;
    double theta(int index) const;
    /// Distinct bin of a grid index; the last index folds onto bin 0.
    int bin(int index) const {
        return index % unique_bins();
    }

   private:
    int points_;
};

struct SweepSettings {
    Family family = Family::kPhysical;
    int grid_points = 257;
    NoiseConfig noise;
    std::optional<ReadoutModel> readout;
    /// Correct readout by unfolding before decoding. Requires `readout`.
    bool unfold = false;
    UnfoldSettings unfold_settings;
    /// Shots per circuit; nullopt evaluates probabilities exactly.
    std::optional<std::uint64_t> shots;
    std::uint64_t seed = 0;
    /// Fold the encoded a2 = 1 branch onto theta + pi.
    bool merge_pi_branch = true;
    /// 0 picks the hardware concurrency.
    int threads = 0;
};

struct TermRow {
    double theta = 0;
    std::array<double, 4> value{};
    std::array<double, 4> sigma{};
    /// Every shot of one of the bin's postselected histograms was discarded.
    bool empty = false;
};

struct TermEstimates {
    std::vector<TermRow> rows;
};

/// Postselection tallies of one encoded circuit.
struct BranchTally {
    double shots_in = 0;
    double discarded_flag = 0;
    double discarded_parity = 0;
    double kept_theta = 0;
    double kept_theta_pi = 0;
};

struct DiscardStats {
    double theta = 0;
    BranchTally z_basis;
    BranchTally x_basis;
};

struct SweepResult {
    TermEstimates terms;
    /// One entry per grid point for encoded sweeps, empty otherwise.
    std::vector<DiscardStats> discards;
};

SweepResult run_sweep(const SweepSettings &settings);

struct CoefficientRow {
    double r = 0;  // Angstrom
    std::array<double, 5> g{};  // Hartree
};

class CoefficientTable {
   public:
    explicit CoefficientTable(std::vector<CoefficientRow> rows);

    const std::vector<CoefficientRow> &rows() const {
        return rows_;
    }
    /// Row with the closest separation.
    const CoefficientRow &nearest(double r) const;

   private:
    std::vector<CoefficientRow> rows_;
};

/// g1 + g2 <Z1> + g3 <Z2> + g4 <Z1 Z2> + g5 <X1 X2>.
double energy(const std::array<double, 4> &terms, const std::array<double, 5> &g);
/// Uncertainty propagated linearly from independent term uncertainties.
double energy_sigma(const std::array<double, 4> &sigmas, const std::array<double, 5> &g);

struct EnergyMinimum {
    double theta = 0;
    double energy = 0;
    int grid_index = -1;
};

/// Grid argmin (ties toward smaller |theta|) refined by the exact minimum of
/// c + a cos(theta) + b sin(theta) through the argmin and its two neighbours.
/// A grid spanning exactly [-pi, pi] is periodic: its duplicate endpoint is
/// merged and neighbours wrap. Excluded points never win and block refinement.
EnergyMinimum minimize_energy(std::span<const double> thetas, std::span<const double> energies,
                              std::span<const bool> excluded = {});

/// Lowest eigenvalue of the 4x4 Hamiltonian.
double exact_ground_energy(const std::array<double, 5> &g);

struct CurvePoint {
    double r = 0;
    double theta_star = 0;
    double energy = 0;
    double energy_exact = 0;
    double delta = 0;  // energy - energy_exact
    bool chemical_accuracy = false;
};

/// Minimizes one sweep against every row of the table.
std::vector<CurvePoint> potential_curve(const CoefficientTable &table, const TermEstimates &terms);

/// theta = -3pi/4 ... 3pi/4 in steps of pi/4.
std::array<double, 7> probe_angles();

/// Sum of |estimate - exact| over the seven probe angles.
double score_mapping(std::span<const double> estimates, std::span<const double> exact);

/// <X1 X2> at the probe angles under the given sweep configuration (grid and
/// shot settings are taken from `settings` except the grid, fixed to 9 points).
std::array<double, 7> probe_x1x2(SweepSettings settings);

struct NoiseScanRow {
    double p = 0;
    double error_physical = 0;
    double error_encoded = 0;
};

struct NoiseScan {
    CoefficientRow row;
    std::vector<NoiseScanRow> rows;
    /// First p where the encoded error exceeds the physical one, interpolated linearly.
    std::optional<double> crossover;
};

/// Exact-mode |Delta E| of both families at one separation for every p.
NoiseScan noise_scan(const CoefficientRow &row, std::span<const double> p_values, int grid_points, int threads = 0);

}  // namespace h2qed

#endif  // H2QED_VQE_H
