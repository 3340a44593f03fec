#include "codeevo/optim.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace codeevo {

namespace {

// Deterministic standard normal generator.  The standard library's
// normal_distribution is implementation-defined, which would break
// byte-reproducibility across toolchains, so the transform is spelled
// out here.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  // Uniform on (0, 1), never exactly zero, using the top 53 bits.
  double uniform01() {
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

void softmax_block(std::span<const double> parameters, std::size_t offset,
                   std::size_t width, double* out) {
  double max_value = parameters[offset];
  for (std::size_t i = 1; i < width; ++i) {
    max_value = std::max(max_value, parameters[offset + i]);
  }
  double total = 0.0;
  for (std::size_t i = 0; i < width; ++i) {
    const double e = std::exp(parameters[offset + i] - max_value);
    out[i] = e;
    total += e;
  }
  for (std::size_t i = 0; i < width; ++i) out[i] /= total;
}

}  // namespace

ParamCodec::ParamCodec(const PopulationModel& reference, bool includes_structure)
    : reference_(reference), includes_structure_(includes_structure) {
  validate(reference_);
  std::size_t dims = 0;
  for (const Agent& agent : reference_.agents) {
    dims += static_cast<std::size_t>(agent.code.sensor_states) *
            agent.code.output_states;
  }
  if (includes_structure_) {
    const std::size_t n = reference_.agents.size();
    dims += n * n;
  }
  dimension_ = static_cast<int>(dims);
}

ParamCodec ParamCodec::codes_only(const PopulationModel& reference) {
  return ParamCodec(reference, false);
}

ParamCodec ParamCodec::codes_and_structure(const PopulationModel& reference) {
  return ParamCodec(reference, true);
}

void ParamCodec::apply(std::span<const double> parameters,
                       PopulationModel& model) const {
  if (parameters.size() != static_cast<std::size_t>(dimension_)) {
    throw std::invalid_argument("parameter vector length does not match the codec");
  }
  if (model.agents.size() != reference_.agents.size()) {
    throw std::invalid_argument("model shape does not match the codec reference");
  }
  for (const double v : parameters) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("parameters must be finite");
    }
  }
  std::size_t offset = 0;
  for (std::size_t a = 0; a < model.agents.size(); ++a) {
    Code& code = model.agents[a].code;
    if (code.sensor_states != reference_.agents[a].code.sensor_states ||
        code.output_states != reference_.agents[a].code.output_states) {
      throw std::invalid_argument("model shape does not match the codec reference");
    }
    const std::size_t width = static_cast<std::size_t>(code.output_states);
    for (int y = 0; y < code.sensor_states; ++y) {
      softmax_block(parameters, offset, width,
                    code.table.data() + static_cast<std::size_t>(y) * width);
      offset += width;
    }
  }
  if (includes_structure_) {
    const std::size_t n = model.agents.size();
    softmax_block(parameters, offset, n * n, model.structure.pair_probabilities.data());
    offset += n * n;
  }
}

PopulationModel ParamCodec::decode(std::span<const double> parameters) const {
  PopulationModel model = reference_;
  apply(parameters, model);
  return model;
}

OptimizationTrace cma_es_maximize(const Objective& objective,
                                  const CmaEsConfig& config) {
  const int n = config.dimension;
  if (n < 1) {
    throw std::invalid_argument("optimizer dimension must be positive");
  }
  const int lambda = config.population_size > 0
                         ? config.population_size
                         : 4 + static_cast<int>(3.0 * std::log(static_cast<double>(n)));
  if (lambda < 2) {
    throw std::invalid_argument("population size must be at least two");
  }
  if (config.initial_step <= 0.0 || !std::isfinite(config.initial_step)) {
    throw std::invalid_argument("initial step size must be positive");
  }
  if (config.max_evaluations < lambda) {
    throw std::invalid_argument("evaluation budget is smaller than one generation");
  }
  if (config.stagnation_generations < 1) {
    throw std::invalid_argument("stagnation window must be positive");
  }

  const int mu = lambda / 2;
  Eigen::VectorXd weights(mu);
  for (int i = 0; i < mu; ++i) {
    weights[i] = std::log(lambda / 2.0 + 0.5) - std::log(static_cast<double>(i + 1));
  }
  weights /= weights.sum();
  const double mu_eff = 1.0 / weights.squaredNorm();

  const double c_sigma = (mu_eff + 2.0) / (n + mu_eff + 5.0);
  const double d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff - 1.0) / (n + 1.0)) - 1.0) + c_sigma;
  const double c_c = (4.0 + mu_eff / n) / (n + 4.0 + 2.0 * mu_eff / n);
  const double c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff);
  const double c_mu =
      std::min(1.0 - c_1, 2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                              ((n + 2.0) * (n + 2.0) + mu_eff));
  const double chi_n =
      std::sqrt(static_cast<double>(n)) *
      (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * static_cast<double>(n) * n));
  const long eigen_interval = std::max(
      1L, static_cast<long>(1.0 / ((c_1 + c_mu) * n * 10.0)));

  GaussianSampler gaussian(config.seed);

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  double sigma = config.initial_step;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd scales = Eigen::VectorXd::Ones(n);
  Eigen::MatrixXd inv_sqrt_cov = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd path_sigma = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd path_cov = Eigen::VectorXd::Zero(n);
  long last_eigen_generation = 0;

  OptimizationTrace trace;
  trace.best_value = -std::numeric_limits<double>::infinity();

  Eigen::MatrixXd z_samples(n, lambda);
  Eigen::MatrixXd y_samples(n, lambda);
  std::vector<double> fitness(lambda);
  std::vector<int> order(lambda);
  std::vector<double> candidate(n);
  std::vector<double> best_history;

  long generation = 0;
  while (true) {
    if (trace.evaluations + lambda > config.max_evaluations) {
      trace.stop_reason = "max_evaluations";
      break;
    }

    if (generation > 0 &&
        generation - last_eigen_generation >= eigen_interval) {
      cov = 0.5 * (cov + cov.transpose()).eval();
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
      if (solver.info() != Eigen::Success) {
        throw std::runtime_error("covariance eigendecomposition failed");
      }
      basis = solver.eigenvectors();
      scales = solver.eigenvalues().cwiseMax(1e-30).cwiseSqrt();
      inv_sqrt_cov =
          basis * scales.cwiseInverse().asDiagonal() * basis.transpose();
      last_eigen_generation = generation;
    }

    for (int k = 0; k < lambda; ++k) {
      for (int i = 0; i < n; ++i) z_samples(i, k) = gaussian();
    }
    y_samples = basis * (scales.asDiagonal() * z_samples);

    double fitness_sum = 0.0;
    for (int k = 0; k < lambda; ++k) {
      for (int i = 0; i < n; ++i) candidate[i] = mean[i] + sigma * y_samples(i, k);
      if (generation == 0 && k == 0) trace.initial_parameters = candidate;
      const double value = objective(candidate);
      if (!std::isfinite(value)) {
        throw std::runtime_error("objective returned a non-finite value at evaluation " +
                                 std::to_string(trace.evaluations + 1));
      }
      fitness[k] = value;
      fitness_sum += value;
      ++trace.evaluations;
      if (value > trace.best_value) {
        trace.best_value = value;
        trace.best_parameters = candidate;
      }
    }

    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return fitness[a] > fitness[b]; });

    Eigen::VectorXd y_weighted = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu; ++i) {
      y_weighted += weights[i] * y_samples.col(order[i]);
    }
    mean += sigma * y_weighted;

    path_sigma = (1.0 - c_sigma) * path_sigma +
                 std::sqrt(c_sigma * (2.0 - c_sigma) * mu_eff) *
                     (inv_sqrt_cov * y_weighted);
    const double expected_decay =
        std::sqrt(1.0 - std::pow(1.0 - c_sigma, 2.0 * (generation + 1)));
    const bool path_ok =
        path_sigma.norm() / expected_decay / chi_n < 1.4 + 2.0 / (n + 1.0);
    path_cov = (1.0 - c_c) * path_cov;
    if (path_ok) {
      path_cov += std::sqrt(c_c * (2.0 - c_c) * mu_eff) * y_weighted;
    }

    const double old_scale =
        (1.0 - c_1 - c_mu) + (path_ok ? 0.0 : c_1 * c_c * (2.0 - c_c));
    cov *= old_scale;
    cov.selfadjointView<Eigen::Lower>().rankUpdate(path_cov, c_1);
    for (int i = 0; i < mu; ++i) {
      cov.selfadjointView<Eigen::Lower>().rankUpdate(y_samples.col(order[i]),
                                                     c_mu * weights[i]);
    }
    cov = cov.selfadjointView<Eigen::Lower>();

    sigma *= std::exp((c_sigma / d_sigma) * (path_sigma.norm() / chi_n - 1.0));
    if (!std::isfinite(sigma) || sigma <= 0.0) {
      throw std::runtime_error("step size became degenerate");
    }

    trace.generations.push_back(GenerationRecord{
        generation, trace.best_value, fitness_sum / lambda, sigma});
    best_history.push_back(trace.best_value);
    ++generation;

    if (config.target_value &&
        trace.best_value >= *config.target_value - config.target_tolerance) {
      trace.stop_reason = "target_reached";
      break;
    }
    if (generation > config.stagnation_generations) {
      const double past =
          best_history[generation - 1 - config.stagnation_generations];
      if (trace.best_value - past < config.stagnation_tolerance) {
        trace.stop_reason = "stagnation";
        break;
      }
    }
  }

  return trace;
}

ScenarioResult optimize_scenario(const ParamCodec& codec, const CmaEsConfig& config) {
  CmaEsConfig effective = config;
  if (effective.dimension == 0) {
    effective.dimension = codec.dimension();
  } else if (effective.dimension != codec.dimension()) {
    throw std::invalid_argument("optimizer dimension does not match the codec");
  }

  PopulationModel scratch = codec.decode(std::vector<double>(codec.dimension(), 0.0));
  const Objective objective = [&codec, &scratch](std::span<const double> params) {
    codec.apply(params, scratch);
    return code_similarity(scratch);
  };

  ScenarioResult result;
  result.trace = cma_es_maximize(objective, effective);
  result.initial_model = codec.decode(result.trace.initial_parameters);
  result.final_model = codec.decode(result.trace.best_parameters);
  return result;
}

}  // namespace codeevo
