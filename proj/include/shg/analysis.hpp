// Stability of DBI stationary points, second-order (LSPE) checks and the
// random polynomial game study.
#pragma once

#include "shg/core.hpp"

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace shg {

using ComplexVector = Eigen::VectorXcd;

enum class Stability { Lasp, Unstable, Marginal };
enum class Definiteness { NegativeDefinite, NotNegativeDefinite, Indeterminate, Pinned };

std::string to_string(Stability s);
std::string to_string(Definiteness d);

struct LspeResult {
  bool is_lspe = false;
  std::vector<Definiteness> flags;                // per player
  std::vector<std::vector<double>> eigenvalues;  // per player, free coordinates only
};

struct StabilityReport {
  ComplexVector eigenvalues;
  Stability classification = Stability::Marginal;
  /// -2 Re(λ*) / |λ*|², only when the point is an LASP.
  std::optional<double> lr_bound;
  /// 1 - ρ(I + αJ) for the α given to the classifier.
  std::optional<double> contraction;
  std::optional<double> alpha;
  double field_norm = 0.0;
  std::optional<LspeResult> lspe;
};

/// LASP iff every real part < -tol, unstable iff some real part > tol.
Stability classify_eigenvalues(const ComplexVector& eigenvalues, double tol = 1e-6);
StabilityReport classify_jacobian(const Matrix& jacobian, double tol = 1e-6,
                                  std::optional<double> alpha = std::nullopt);

/// Jacobian of the DBI field by central differences, h = 1e-6 * max(1, |x_k|).
Matrix dbi_jacobian(const Game& game, const ActionProfile& x);

/// Throws NotStationary when the projected field norm is at least stationarity_tol.
StabilityReport classify_lasp(const Game& game, const ActionProfile& x, double tol = 1e-6,
                              double stationarity_tol = 1e-3, std::optional<double> alpha = std::nullopt);

/// min over eigenvalues of -2 Re(λ)/|λ|². Throws NotLasp if some Re(λ) >= 0.
double max_stable_lr(const ComplexVector& eigenvalues);

/// 1 - ρ(I + αJ).
double contraction_factor(const Matrix& jacobian, double alpha);

/// Every player's total Hessian (restricted to coordinates not pinned at a
/// bound) must have all eigenvalues below -tol. Throws NotStationary.
LspeResult check_lspe(const Game& game, const ActionProfile& x, double tol = 1e-6,
                      double stationarity_tol = 1e-3);

/// Eigen-analysis plus LSPE check; LSPE failures are recorded, not thrown.
StabilityReport analyze_point(const Game& game, const ActionProfile& x, double tol = 1e-6,
                              double stationarity_tol = 1e-3, std::optional<double> alpha = std::nullopt);

// ---------------------------------------------------------------------------
// Random polynomial games

struct GameClass {
  std::vector<int> shape{1, 1};
  /// Integer coefficients in [-C, C]; nullopt draws U[-1, 1].
  std::optional<int> coefficient_bound = 1;
  int max_degree = 4;
};

struct MeasureOptions {
  int starts = 32;
  double box = 5.0;
  double dedup_radius = 1e-4;
  int newton_iters = 200;
  double root_tol = 1e-9;
  double lasp_tol = 1e-6;
  /// 0 uses the hardware concurrency.
  unsigned threads = 0;
};

struct MeasureResult {
  int instances = 0;
  int with_critical_point = 0;
  int with_lasp = 0;
  int with_lspe = 0;
  double pct_lasp = 0.0;
  double pct_lspe = 0.0;  // among instances with an LASP
};

/// Every u_i is a random polynomial of total degree <= max_degree in the
/// actions it may depend on ({i, Pa(i)} ∪ leaves).
Game random_polynomial_game(const GameClass& cls, std::uint64_t seed);

/// Distinct zeros of the DBI field from damped Newton started at uniform
/// points in [-box, box]^d. Starts that hit a singular follower Hessian are dropped.
std::vector<Vector> find_critical_points(const Game& game, std::uint64_t seed, const MeasureOptions& options = {});

using GameGenerator = std::function<Game(std::uint64_t seed)>;

MeasureResult measure_properties(const GameGenerator& generator, int instances, std::uint64_t seed,
                                 const MeasureOptions& options = {});
MeasureResult measure_properties(const GameClass& cls, int instances, std::uint64_t seed,
                                 const MeasureOptions& options = {});

}  // namespace shg
