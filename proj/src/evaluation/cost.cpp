#include <cmath>

#include "topic_bandit/evaluation.hpp"

namespace topic_bandit {

double TokenBreakdown::per_request() const {
  return tokens_in * price_in_per_m / 1e6 + tokens_out * price_out_per_m / 1e6 + grounded_fee_per_request;
}

void CostSheet::validate() const {
  const std::pair<const char*, const CostComponent*> parts[] = {
      {"search", &search}, {"translation", &translation}, {"qe", &qe}};
  for (const auto& [name, c] : parts) {
    if (!(c->per_request >= 0.0)) throw ConfigError(std::string(name) + " cost must be >= 0");
    if (!c->tokens) continue;
    const auto& t = *c->tokens;
    if (t.tokens_in < 0 || t.tokens_out < 0 || t.price_in_per_m < 0 || t.price_out_per_m < 0 ||
        t.grounded_fee_per_request < 0) {
      throw ConfigError(std::string(name) + " token breakdown has a negative entry");
    }
    if (std::abs(t.per_request() - c->per_request) > 1e-9) {
      throw ConfigError(std::string(name) + " per-request cost disagrees with its token breakdown");
    }
  }
}

CostSheet calibrated_cost_sheet() {
  CostSheet sheet;
  sheet.search.per_request = 87.0 / 20000.0;
  sheet.translation.per_request = 2.0 / 20000.0;
  sheet.qe.per_request = 15.0 / 20000.0;
  return sheet;
}

CostEstimate cost_estimate(std::int64_t n_requests, const CostSheet& sheet) {
  if (n_requests < 0) throw ConfigError("request count must be >= 0");
  const auto n = static_cast<double>(n_requests);
  CostEstimate e;
  e.search = n * sheet.search.per_request;
  e.translation = n * sheet.translation.per_request;
  e.qe = n * sheet.qe.per_request;
  e.total = e.search + e.translation + e.qe;
  return e;
}

double derive_search_request_cost(const SearchCostInputs& in) {
  if (in.samples_per_topic <= 0) throw ConfigError("samples_per_topic must be > 0");
  const double per_query = in.tokens_in * in.price_in / 1e6 + in.tokens_out * in.price_out / 1e6 + in.grounded_fee;
  return in.queries_per_topic * per_query / in.samples_per_topic;
}

}  // namespace topic_bandit
