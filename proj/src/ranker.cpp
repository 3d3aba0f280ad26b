#include "apirank/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "apirank/rng.hpp"

namespace apirank {

TrainingSet build_triples(const std::vector<TrainingProject>& projects,
                          const FeatureExtractor& extractor, NegativeRate negative_rate,
                          std::uint64_t seed) {
  const ApiCatalog& apis = extractor.apis();
  const std::size_t n_apis = apis.size();
  const std::size_t d = static_cast<std::size_t>(extractor.dim());

  TrainingSet set;
  set.dim = extractor.dim();

  for (const TrainingProject& project : projects) {
    std::vector<std::int32_t> positives;
    std::vector<bool> is_positive(n_apis, false);
    for (const auto& api_id : project.used_apis) {
      auto it = apis.id_to_pos.find(api_id);
      if (it == apis.id_to_pos.end()) continue;
      if (!is_positive[static_cast<std::size_t>(it->second)]) {
        is_positive[static_cast<std::size_t>(it->second)] = true;
        positives.push_back(it->second);
      }
    }
    if (positives.empty()) continue;
    if (positives.size() == n_apis) {
      ++set.projects_skipped;  // no negative api to pair against
      continue;
    }
    std::sort(positives.begin(), positives.end());

    const std::int32_t project_idx = static_cast<std::int32_t>(set.project_ids.size());
    set.project_ids.push_back(project.id);

    if (!negative_rate.has_value()) {
      // Full enumeration: one row per api, triples = positives x negatives.
      const std::vector<double> all = extractor.extract_all(project.context);
      const std::int32_t base = static_cast<std::int32_t>(set.n_rows());
      set.rows.insert(set.rows.end(), all.begin(), all.end());
      for (std::size_t a = 0; a < n_apis; ++a) {
        set.row_info.push_back({project_idx, static_cast<std::int32_t>(a), is_positive[a]});
      }
      for (const std::int32_t pos : positives) {
        for (std::size_t a = 0; a < n_apis; ++a) {
          if (is_positive[a]) continue;
          set.triples.push_back({base + pos, base + static_cast<std::int32_t>(a)});
        }
      }
      continue;
    }

    // Sampled negatives: rows only for the pairs that triples reference.
    SplitMix64 rng(substream_seed(seed, "negatives/" + project.id));
    std::vector<std::int32_t> universe;
    universe.reserve(n_apis - positives.size());
    for (std::size_t a = 0; a < n_apis; ++a) {
      if (!is_positive[a]) universe.push_back(static_cast<std::int32_t>(a));
    }
    const int rate = std::max(1, *negative_rate);

    std::vector<std::int32_t> row_of(n_apis, -1);
    auto row_for = [&](std::int32_t api_pos) {
      std::int32_t& r = row_of[static_cast<std::size_t>(api_pos)];
      if (r < 0) {
        r = static_cast<std::int32_t>(set.n_rows());
        const std::vector<double> x = extractor.extract(project.context, api_pos);
        set.rows.insert(set.rows.end(), x.begin(), x.end());
        set.row_info.push_back(
            {project_idx, api_pos, is_positive[static_cast<std::size_t>(api_pos)]});
      }
      return r;
    };

    for (const std::int32_t pos : positives) {
      std::vector<std::int32_t> sample = universe;
      const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(rate), sample.size());
      for (std::size_t i = 0; i < take; ++i) {  // partial Fisher-Yates
        const std::size_t j = i + static_cast<std::size_t>(rng.below(sample.size() - i));
        std::swap(sample[i], sample[j]);
      }
      const std::int32_t pos_row = row_for(pos);
      for (std::size_t i = 0; i < take; ++i) {
        set.triples.push_back({pos_row, row_for(sample[i])});
      }
    }
  }

  (void)d;
  return set;
}

double score(std::span<const double> theta, std::span<const double> x) {
  if (theta.size() != x.size()) {
    throw std::invalid_argument("score: dimension mismatch (" + std::to_string(theta.size()) +
                                " vs " + std::to_string(x.size()) + ")");
  }
  double f = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) f += theta[j] * x[j];
  return f;
}

namespace {

std::vector<double> row_scores(std::span<const double> theta, const TrainingSet& data) {
  const std::size_t d = static_cast<std::size_t>(data.dim);
  std::vector<double> scores(data.n_rows());
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    const double* x = data.rows.data() + r * d;
    double f = 0.0;
    for (std::size_t j = 0; j < d; ++j) f += theta[j] * x[j];
    scores[r] = f;
  }
  return scores;
}

}  // namespace

LossGrad loss_and_gradient(std::span<const double> theta, const TrainingSet& data, double lambda) {
  if (data.triples.empty()) throw TrainingError("loss_and_gradient: empty triple set");
  const std::size_t d = static_cast<std::size_t>(data.dim);
  const double n = static_cast<double>(data.triples.size());

  const std::vector<double> scores = row_scores(theta, data);

  double hinge_sum = 0.0;
  std::vector<double> grad(d, 0.0);
  for (const auto& triple : data.triples) {
    const double margin =
        1.0 - (scores[static_cast<std::size_t>(triple.pos)] -
               scores[static_cast<std::size_t>(triple.neg)]);
    if (margin <= 0.0) continue;
    hinge_sum += margin * margin;
    const double* xp = data.rows.data() + static_cast<std::size_t>(triple.pos) * d;
    const double* xn = data.rows.data() + static_cast<std::size_t>(triple.neg) * d;
    for (std::size_t j = 0; j < d; ++j) grad[j] += margin * (xn[j] - xp[j]);
  }

  LossGrad out;
  out.value = hinge_sum / n;  // exact when every margin is exactly 1
  double reg = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    reg += theta[j] * theta[j];
    grad[j] = 2.0 * grad[j] / n + lambda * theta[j];
  }
  out.value += 0.5 * lambda * reg;
  out.grad = std::move(grad);

  if (!std::isfinite(out.value)) {
    throw TrainingError("loss_and_gradient: objective is not finite; feature data is corrupt");
  }
  return out;
}

std::vector<double> hessian_vector_product(std::span<const double> theta, const TrainingSet& data,
                                           double lambda, std::span<const double> v) {
  const std::size_t d = static_cast<std::size_t>(data.dim);
  const double n = static_cast<double>(data.triples.size());

  const std::vector<double> scores = row_scores(theta, data);

  std::vector<double> hv(d, 0.0);
  for (const auto& triple : data.triples) {
    const double* xp = data.rows.data() + static_cast<std::size_t>(triple.pos) * d;
    const double* xn = data.rows.data() + static_cast<std::size_t>(triple.neg) * d;
    const double margin =
        1.0 - (scores[static_cast<std::size_t>(triple.pos)] -
               scores[static_cast<std::size_t>(triple.neg)]);
    if (margin <= 0.0) continue;
    double dx_dot_v = 0.0;
    for (std::size_t j = 0; j < d; ++j) dx_dot_v += (xp[j] - xn[j]) * v[j];
    for (std::size_t j = 0; j < d; ++j) hv[j] += dx_dot_v * (xp[j] - xn[j]);
  }
  for (std::size_t j = 0; j < d; ++j) hv[j] = 2.0 * hv[j] / n + lambda * v[j];
  return hv;
}

namespace {

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (const double x : v) m = std::max(m, std::abs(x));
  return m;
}

double dot_vec(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// CG solve of H s = -g at fixed active set, stopping at |residual| <=
// tol_factor * |g| (Eisenstat-Walker style forcing term).
std::vector<double> cg_newton_direction(std::span<const double> theta, const TrainingSet& data,
                                        double lambda, const std::vector<double>& grad,
                                        double tol_factor, int max_iter) {
  const std::size_t d = grad.size();
  std::vector<double> s(d, 0.0);
  std::vector<double> residual(d);  // r = -g - H s
  for (std::size_t j = 0; j < d; ++j) residual[j] = -grad[j];
  std::vector<double> direction = residual;

  const double tol = tol_factor * std::sqrt(dot_vec(grad, grad));
  double rr = dot_vec(residual, residual);

  for (int iter = 0; iter < max_iter; ++iter) {
    if (std::sqrt(rr) <= tol) break;
    const std::vector<double> hd = hessian_vector_product(theta, data, lambda, direction);
    const double dhd = dot_vec(direction, hd);
    if (dhd <= 0.0) break;  // cannot happen for lambda > 0, numerical guard
    const double alpha = rr / dhd;
    for (std::size_t j = 0; j < d; ++j) {
      s[j] += alpha * direction[j];
      residual[j] -= alpha * hd[j];
    }
    const double rr_next = dot_vec(residual, residual);
    const double beta = rr_next / rr;
    for (std::size_t j = 0; j < d; ++j) direction[j] = residual[j] + beta * direction[j];
    rr = rr_next;
  }
  return s;
}

}  // namespace

TrainResult train(const TrainingSet& data, double lambda, const TrainOptions& options) {
  if (lambda <= 0.0) throw TrainingError("train: lambda must be positive");
  if (data.triples.empty()) throw TrainingError("train: empty triple set");
  const std::size_t d = static_cast<std::size_t>(data.dim);

  std::vector<double> theta = options.theta0;
  if (theta.empty()) theta.assign(d, 0.0);
  if (theta.size() != d) throw TrainingError("train: theta0 dimension mismatch");

  TrainResult result;
  LossGrad current = loss_and_gradient(theta, data, lambda);
  result.objective_trace.push_back(current.value);

  for (int outer = 0; outer < options.max_outer; ++outer) {
    result.grad_inf_norm = inf_norm(current.grad);
    if (result.grad_inf_norm < options.grad_tol) {
      result.converged = true;
      break;
    }

    const std::vector<double> step = cg_newton_direction(theta, data, lambda, current.grad,
                                                         options.cg_forcing, options.cg_max_iter);
    const double slope = dot_vec(current.grad, step);
    if (slope >= 0.0) break;  // not a descent direction; numerical dead end

    // Armijo backtracking from the full Newton step.
    double alpha = 1.0;
    bool accepted = false;
    std::vector<double> candidate(d);
    LossGrad next;
    for (int ls = 0; ls < options.max_line_search; ++ls) {
      for (std::size_t j = 0; j < d; ++j) candidate[j] = theta[j] + alpha * step[j];
      next = loss_and_gradient(candidate, data, lambda);
      if (next.value <= current.value + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // no further progress possible at this scale

    theta = std::move(candidate);
    current = std::move(next);
    result.objective_trace.push_back(current.value);
    result.outer_iterations = outer + 1;
  }

  result.grad_inf_norm = inf_norm(current.grad);
  if (result.grad_inf_norm < options.grad_tol) result.converged = true;
  result.theta = std::move(theta);
  return result;
}

std::vector<int> api_tie_permutation(std::uint64_t seed, std::size_t n_apis) {
  return seeded_permutation(n_apis, substream_seed(seed, "ties"));
}

RankedList sort_scored_apis(const std::vector<std::string>& ids, std::vector<double> scores,
                            const std::vector<int>& tie_rank) {
  std::vector<int> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[static_cast<std::size_t>(a)] != scores[static_cast<std::size_t>(b)])
      return scores[static_cast<std::size_t>(a)] > scores[static_cast<std::size_t>(b)];
    return tie_rank[static_cast<std::size_t>(a)] < tie_rank[static_cast<std::size_t>(b)];
  });
  RankedList ranked;
  ranked.reserve(ids.size());
  for (const int pos : order) {
    ranked.push_back({ids[static_cast<std::size_t>(pos)], scores[static_cast<std::size_t>(pos)]});
  }
  return ranked;
}

RankedList rank_apis(const RankingModel& model, const ProjectQuery& query) {
  const FeatureExtractor extractor(model.index, model.apis, model.config.k_grid);
  const auto ctx = extractor.make_context(query);
  const std::vector<double> features = extractor.extract_all(ctx);

  const std::size_t d = static_cast<std::size_t>(extractor.dim());
  std::vector<double> scores(model.apis.size());
  for (std::size_t a = 0; a < model.apis.size(); ++a) {
    scores[a] = score(model.theta, std::span<const double>(features).subspan(a * d, d));
  }
  return sort_scored_apis(model.apis.ids, std::move(scores),
                          api_tie_permutation(model.config.seed, model.apis.size()));
}

}  // namespace apirank
