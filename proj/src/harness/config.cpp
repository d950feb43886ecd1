#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <limits>
#include <regex>
#include <set>

#include <spdlog/spdlog.h>

#include "topic_bandit/harness.hpp"
#include "topic_bandit/serialize.hpp"

namespace topic_bandit::harness {

using nlohmann::json;

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error)) return kExitConfig;
  if (dynamic_cast<const ArtifactError*>(&error)) return kExitArtifact;
  if (dynamic_cast<const LoadError*>(&error) || dynamic_cast<const IntegrityError*>(&error) ||
      dynamic_cast<const AdapterError*>(&error) || dynamic_cast<const UnsupportedWorldError*>(&error) ||
      dynamic_cast<const EstimationError*>(&error)) {
    return kExitWorld;
  }
  return kExitFailure;
}

void configure_logging() {
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("TOPIC_BANDIT_LOG"); env != nullptr && *env != '\0') {
    level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; keep warnings in that case.
    if (level == spdlog::level::off && std::string_view(env) != "off") level = spdlog::level::warn;
  }
  spdlog::set_level(level);
}

// ------------------------------------------------------------- located parse

namespace {

/// Character iterator that tracks the line of the last non-blank character
/// it has stepped over.
struct LineCountingIterator {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  int* line = nullptr;
  int* token_line = nullptr;

  reference operator*() const { return *p; }
  LineCountingIterator& operator++() {
    if (*p == '\n') {
      ++*line;
    } else if (*p != ' ' && *p != '\t' && *p != '\r') {
      *token_line = *line;
    }
    ++p;
    return *this;
  }
  LineCountingIterator operator++(int) {
    auto copy = *this;
    ++*this;
    return copy;
  }
  bool operator==(const LineCountingIterator& other) const { return p == other.p; }
  bool operator!=(const LineCountingIterator& other) const { return p != other.p; }
};

std::string escape_pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

class LocatingSax {
 public:
  LocatingSax(json& root, std::map<std::string, int>& lines, const int& token_line)
      : dom_(root, true), lines_(lines), token_line_(token_line) {}

  bool null() { return scalar([&] { return dom_.null(); }); }
  bool boolean(bool v) { return scalar([&] { return dom_.boolean(v); }); }
  bool number_integer(json::number_integer_t v) { return scalar([&] { return dom_.number_integer(v); }); }
  bool number_unsigned(json::number_unsigned_t v) { return scalar([&] { return dom_.number_unsigned(v); }); }
  bool number_float(json::number_float_t v, const json::string_t& s) {
    return scalar([&] { return dom_.number_float(v, s); });
  }
  bool string(json::string_t& v) { return scalar([&] { return dom_.string(v); }); }
  bool binary(json::binary_t& v) { return scalar([&] { return dom_.binary(v); }); }

  bool start_object(std::size_t n) {
    element_start();
    frames_.push_back({false, 0, {}});
    return dom_.start_object(n);
  }
  bool key(json::string_t& k) {
    frames_.back().key = escape_pointer_token(k);
    lines_.emplace(pointer(), token_line_);
    return dom_.key(k);
  }
  bool end_object() {
    frames_.pop_back();
    const bool ok = dom_.end_object();
    element_end();
    return ok;
  }
  bool start_array(std::size_t n) {
    element_start();
    frames_.push_back({true, 0, {}});
    return dom_.start_array(n);
  }
  bool end_array() {
    frames_.pop_back();
    const bool ok = dom_.end_array();
    element_end();
    return ok;
  }

  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception& ex) {
    std::string what = ex.what();
    // Drop the library's "[json.exception.parse_error.101] parse error at line 3, column 5: " prefix.
    if (const auto colon = what.find(": "); colon != std::string::npos) what = what.substr(colon + 2);
    throw ConfigError("line " + std::to_string(token_line_) + ": invalid JSON: " + what);
  }

 private:
  struct Frame {
    bool array = false;
    std::size_t index = 0;
    std::string key;
  };

  std::string pointer() const {
    std::string out;
    for (const auto& f : frames_) out += "/" + (f.array ? std::to_string(f.index) : f.key);
    return out;
  }
  void element_start() { lines_.emplace(pointer(), token_line_); }
  void element_end() {
    if (!frames_.empty() && frames_.back().array) ++frames_.back().index;
  }
  template <class F>
  bool scalar(F&& forward) {
    element_start();
    const bool ok = forward();
    element_end();
    return ok;
  }

  nlohmann::detail::json_sax_dom_parser<json> dom_;
  std::map<std::string, int>& lines_;
  const int& token_line_;
  std::vector<Frame> frames_;
};

}  // namespace

int ConfigDocument::line_of(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    if (auto it = lines.find(p); it != lines.end()) return it->second;
    if (p.empty()) return 1;
    p.erase(p.rfind('/'));
  }
}

ConfigDocument parse_config_document(std::string_view text) {
  ConfigDocument doc;
  int line = 1;
  int token_line = 1;
  LineCountingIterator first{text.data(), &line, &token_line};
  LineCountingIterator last{text.data() + text.size(), &line, &token_line};
  LocatingSax sax(doc.root, doc.lines, token_line);
  json::sax_parse(first, last, &sax);
  return doc;
}

// ------------------------------------------------------------- typed reader

namespace {

class Node {
 public:
  Node(const ConfigDocument& doc, const json& value, std::string pointer)
      : doc_(&doc), value_(&value), pointer_(std::move(pointer)) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError("line " + std::to_string(doc_->line_of(pointer_)) + ": " +
                      (pointer_.empty() ? std::string("<root>") : pointer_) + ": " + message);
  }

  int line() const { return doc_->line_of(pointer_); }
  const json& raw() const { return *value_; }

  bool has(const std::string& key) const { return value_->contains(key) && !(*value_)[key].is_null(); }

  Node at(const std::string& key) const {
    if (!value_->contains(key)) fail("missing required key '" + key + "'");
    return child(key);
  }

  std::optional<Node> get(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return child(key);
  }

  Node operator[](std::size_t i) const {
    return {*doc_, (*value_)[i], pointer_ + "/" + std::to_string(i)};
  }

  void require_object(std::initializer_list<std::string_view> allowed) const {
    if (!value_->is_object()) fail("expected an object");
    for (const auto& [key, v] : value_->items()) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) child(key).fail("unknown key");
    }
  }

  std::size_t array_size() const {
    if (!value_->is_array()) fail("expected an array");
    return value_->size();
  }

  bool is_string() const { return value_->is_string(); }
  bool is_number() const { return value_->is_number(); }
  bool is_array() const { return value_->is_array(); }
  bool is_object() const { return value_->is_object(); }

  double real() const {
    if (!value_->is_number()) fail("expected a number");
    return value_->get<double>();
  }
  std::int64_t integer() const {
    if (value_->is_number_float()) {
      const double d = value_->get<double>();
      if (d == static_cast<double>(static_cast<std::int64_t>(d))) return static_cast<std::int64_t>(d);
    }
    if (!value_->is_number_integer()) fail("expected an integer");
    if (value_->is_number_unsigned() &&
        value_->get<std::uint64_t>() > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      fail("integer out of range");
    }
    return value_->get<std::int64_t>();
  }
  std::int64_t integer_at_least(std::int64_t lo) const {
    const auto v = integer();
    if (v < lo) fail("must be >= " + std::to_string(lo));
    return v;
  }
  std::uint64_t unsigned_integer() const {
    if (!value_->is_number_unsigned()) fail("expected a non-negative integer");
    return value_->get<std::uint64_t>();
  }
  std::string string() const {
    if (!value_->is_string()) fail("expected a string");
    return value_->get<std::string>();
  }
  bool boolean() const {
    if (!value_->is_boolean()) fail("expected true or false");
    return value_->get<bool>();
  }

  /// Runs `f`, re-raising ConfigError with this node's location.
  template <class F>
  void checked(F&& f) const {
    try {
      f();
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }

 private:
  Node child(const std::string& key) const {
    return {*doc_, (*value_)[key], pointer_ + "/" + escape_pointer_token(key)};
  }

  const ConfigDocument* doc_;
  const json* value_;
  std::string pointer_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

GmmParams parse_gmm(const Node& node) {
  GmmParams g;
  const auto n = node.array_size();
  if (n == 0) node.fail("mixture needs at least one component");
  for (std::size_t i = 0; i < n; ++i) {
    const Node c = node[i];
    c.require_object({"weight", "mean", "variance"});
    g.components.push_back({c.at("weight").real(), c.at("mean").real(), c.at("variance").real()});
  }
  node.checked([&] { g.validate(); });
  return g;
}

Cap parse_cap(const Node& node) {
  if (node.is_string()) {
    const auto s = node.string();
    if (s == "inf" || s == "unbounded") return Cap::unbounded();
    node.fail("cap must be a positive integer, \"inf\" or null");
  }
  return Cap{node.integer_at_least(1)};
}

StrategyConfig parse_strategy(const Node& node) {
  node.require_object({"name", "kind", "cap", "epsilon", "rho", "batch", "temperature"});
  StrategyConfig s;
  const Node kind = node.at("kind");
  kind.checked([&] { s.kind = parse_strategy_kind(kind.string()); });
  if (auto n = node.get("name")) {
    s.name = n->string();
    static const std::regex valid("[A-Za-z0-9_.-]+");
    if (!std::regex_match(s.name, valid)) n->fail("strategy names may use letters, digits, '_', '.' and '-'");
  }
  // An explicit null means no cap.
  if (node.raw().contains("cap")) s.cap = node.has("cap") ? parse_cap(node.at("cap")) : Cap::unbounded();
  if (auto v = node.get("epsilon")) s.epsilon = v->real();
  if (auto v = node.get("rho")) s.rho = v->real();
  if (auto v = node.get("batch")) s.batch = static_cast<std::size_t>(v->integer_at_least(1));
  if (auto v = node.get("temperature")) s.temperature = v->real();
  node.checked([&] { s.validate(std::numeric_limits<std::size_t>::max()); });
  return s;
}

std::vector<std::string> parse_string_list(const Node& node) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < node.array_size(); ++i) out.push_back(node[i].string());
  return out;
}

std::vector<std::size_t> parse_sizes(const Node& node) {
  std::vector<std::size_t> out;
  const auto n = node.array_size();
  if (n == 0) node.fail("expected at least one size");
  for (std::size_t i = 0; i < n; ++i) out.push_back(static_cast<std::size_t>(node[i].integer_at_least(1)));
  return out;
}

WorldSpec parse_world(const Node& node, const std::filesystem::path& base) {
  WorldSpec w;
  w.line = node.line();
  if (!node.is_object()) node.fail("expected an object");
  const Node kind = node.at("kind");
  const auto k = kind.string();
  if (k == "synthetic") {
    w.kind = WorldKind::synthetic;
    node.require_object({"kind", "n_topics", "gmm", "sigma2", "clamp", "clusters", "cluster_mu_spread",
                         "tokens_shared", "tokens_unique", "seed"});
    auto& s = w.synthetic;
    if (auto v = node.get("n_topics")) s.n_topics = static_cast<std::size_t>(v->integer_at_least(1));
    // One cluster per topic unless stated otherwise.
    s.clusters = s.n_topics;
    if (auto v = node.get("gmm")) s.gmm = parse_gmm(*v);
    if (auto v = node.get("sigma2")) s.sigma2 = v->real();
    if (auto v = node.get("clamp")) {
      if (v->array_size() != 2) v->fail("clamp must be [lo, hi]");
      s.clamp_lo = (*v)[0].real();
      s.clamp_hi = (*v)[1].real();
    }
    if (auto v = node.get("clusters")) s.clusters = static_cast<std::size_t>(v->integer_at_least(1));
    if (auto v = node.get("cluster_mu_spread")) s.cluster_mu_spread = v->real();
    if (auto v = node.get("tokens_shared")) s.tokens_shared = static_cast<std::size_t>(v->integer_at_least(0));
    if (auto v = node.get("tokens_unique")) s.tokens_unique = static_cast<std::size_t>(v->integer_at_least(0));
    if (auto v = node.get("seed")) w.seed = v->unsigned_integer();
    node.checked([&] { s.validate(); });
  } else if (k == "replay") {
    w.kind = WorldKind::replay;
    node.require_object({"kind", "path", "allow_cap_above_records"});
    w.path = resolve(base, node.at("path").string());
    if (auto v = node.get("allow_cap_above_records")) w.allow_cap_above_records = v->boolean();
  } else if (k == "external") {
    w.kind = WorldKind::external;
    node.require_object({"kind", "command", "topics", "topics_file", "timeout_ms"});
    w.adapter.command = node.at("command").string();
    if (w.adapter.command.empty()) node.at("command").fail("command must not be empty");
    if (auto v = node.get("timeout_ms")) w.adapter.timeout = std::chrono::milliseconds(v->integer_at_least(1));
    if (auto v = node.get("topics")) w.topic_names = parse_string_list(*v);
    if (auto v = node.get("topics_file")) {
      const auto path = resolve(base, v->string());
      std::ifstream in(path);
      if (!in) throw LoadError("cannot open topics file " + path.string());
      for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) w.topic_names.push_back(line);
      }
    }
    if (w.topic_names.empty()) node.fail("external world needs 'topics' or 'topics_file'");
  } else {
    kind.fail("unknown world kind '" + k + "'");
  }
  return w;
}

CostComponent parse_cost_component(const Node& node) {
  CostComponent c;
  if (node.is_number()) {
    c.per_request = node.real();
    return c;
  }
  node.require_object({"per_request", "tokens"});
  if (auto t = node.get("tokens")) {
    t->require_object({"tokens_in", "tokens_out", "price_in_per_m", "price_out_per_m", "grounded_fee_per_request"});
    TokenBreakdown b;
    if (auto v = t->get("tokens_in")) b.tokens_in = v->real();
    if (auto v = t->get("tokens_out")) b.tokens_out = v->real();
    if (auto v = t->get("price_in_per_m")) b.price_in_per_m = v->real();
    if (auto v = t->get("price_out_per_m")) b.price_out_per_m = v->real();
    if (auto v = t->get("grounded_fee_per_request")) b.grounded_fee_per_request = v->real();
    c.tokens = b;
  }
  if (auto v = node.get("per_request")) {
    c.per_request = v->real();
  } else if (c.tokens) {
    c.per_request = c.tokens->per_request();
  } else {
    node.fail("cost component needs 'per_request' or 'tokens'");
  }
  return c;
}

CostSpec parse_cost(const Node& node) {
  CostSpec c;
  if (node.is_string()) {
    if (node.string() != "calibrated") node.fail("unknown cost preset");
    return c;
  }
  node.require_object({"search", "translation", "qe", "requests"});
  if (auto v = node.get("search")) c.sheet.search = parse_cost_component(*v);
  if (auto v = node.get("translation")) c.sheet.translation = parse_cost_component(*v);
  if (auto v = node.get("qe")) c.sheet.qe = parse_cost_component(*v);
  if (auto v = node.get("requests")) {
    c.requests.clear();
    for (std::size_t i = 0; i < v->array_size(); ++i) c.requests.push_back((*v)[i].integer_at_least(0));
  }
  node.checked([&] { c.sheet.validate(); });
  return c;
}

ScalingConfig parse_scaling(const Node& node) {
  node.require_object({"gmm", "sizes", "k", "reps", "seed", "workers"});
  ScalingConfig c;
  if (auto v = node.get("gmm")) c.spec.gmm = parse_gmm(*v);
  c.spec.sizes = parse_sizes(node.at("sizes"));
  if (auto v = node.get("k")) c.spec.k = static_cast<int>(v->integer_at_least(1));
  if (auto v = node.get("reps")) c.spec.reps = static_cast<std::size_t>(v->integer_at_least(0));
  if (auto v = node.get("seed")) c.seed = v->unsigned_integer();
  if (auto v = node.get("workers")) c.spec.workers = static_cast<std::size_t>(v->integer_at_least(1));
  for (std::size_t i = 0; i < c.spec.sizes.size(); ++i) {
    if (c.spec.sizes[i] < static_cast<std::size_t>(c.spec.k)) node.at("sizes")[i].fail("size is smaller than k");
  }
  return c;
}

RankUtilityConfig parse_rank_utility(const Node& node, const std::filesystem::path& base) {
  node.require_object({"dataset", "strategies", "sizes", "reps", "permutations", "alpha", "search",
                       "search_budget", "seed"});
  RankUtilityConfig c;
  if (auto v = node.get("dataset")) c.dataset = resolve(base, v->string());
  if (auto v = node.get("strategies")) {
    c.strategies.clear();
    for (std::size_t i = 0; i < v->array_size(); ++i) {
      const Node s = (*v)[i];
      s.checked([&] { c.strategies.push_back(parse_subset_strategy(s.string())); });
    }
    if (c.strategies.empty()) v->fail("expected at least one subset strategy");
  }
  c.spec.sizes = parse_sizes(node.at("sizes"));
  if (auto v = node.get("reps")) c.spec.reps = static_cast<std::size_t>(v->integer_at_least(1));
  if (auto v = node.get("permutations")) c.spec.permutations = static_cast<std::size_t>(v->integer_at_least(1));
  if (auto v = node.get("alpha")) {
    c.spec.alpha = v->real();
    if (!(c.spec.alpha > 0.0 && c.spec.alpha < 1.0)) v->fail("alpha must lie in (0, 1)");
  }
  if (auto v = node.get("search")) c.spec.search = parse_strategy(*v);
  if (auto v = node.get("search_budget")) c.spec.search_budget = v->integer_at_least(0);
  if (auto v = node.get("seed")) c.seed = v->unsigned_integer();
  return c;
}

CrossRankConfig parse_cross_rank(const Node& node, const std::filesystem::path& base) {
  node.require_object({"dataset", "dimensions", "k"});
  CrossRankConfig c;
  if (auto v = node.get("dataset")) c.dataset = resolve(base, v->string());
  if (auto v = node.get("dimensions")) c.dimensions = parse_string_list(*v);
  if (auto v = node.get("k")) c.k = static_cast<int>(v->integer_at_least(1));
  return c;
}

GenWorldConfig parse_gen_world(const Node& node, const std::filesystem::path& base) {
  node.require_object({"path", "n_topics", "records_per_topic", "gmm", "sigma2", "clusters", "languages", "models",
                       "model_offsets", "score_noise", "seed"});
  GenWorldConfig c;
  if (auto v = node.get("path")) c.path = resolve(base, v->string());
  auto& g = c.gen;
  if (auto v = node.get("n_topics")) g.n_topics = static_cast<std::size_t>(v->integer_at_least(1));
  if (auto v = node.get("records_per_topic")) g.records_per_topic = static_cast<std::size_t>(v->integer_at_least(1));
  if (auto v = node.get("gmm")) g.gmm = parse_gmm(*v);
  if (auto v = node.get("sigma2")) g.sigma2 = v->real();
  if (auto v = node.get("clusters")) g.clusters = static_cast<std::size_t>(v->integer_at_least(1));
  if (auto v = node.get("languages")) g.languages = parse_string_list(*v);
  if (auto v = node.get("models")) g.models = parse_string_list(*v);
  if (auto v = node.get("model_offsets")) {
    if (!v->is_object()) v->fail("expected an object of model -> offset");
    for (const auto& item : v->raw().items()) g.model_offsets[item.key()] = v->at(item.key()).real();
  }
  if (auto v = node.get("score_noise")) g.score_noise = v->real();
  if (auto v = node.get("seed")) c.seed = v->unsigned_integer();
  node.checked([&] { g.validate(); });
  return c;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir) {
  const ConfigDocument doc = parse_config_document(text);
  const Node root(doc, doc.root, "");
  root.require_object({"world", "strategies", "budget", "checkpoint_every", "k", "seeds", "master_seed", "workers",
                       "output", "cost", "scaling", "rank_utility", "cross_rank", "gen_world"});
  ExperimentConfig c;
  if (auto v = root.get("world")) c.world = parse_world(*v, base_dir);
  if (auto v = root.get("strategies")) {
    std::set<std::string> labels;
    for (std::size_t i = 0; i < v->array_size(); ++i) {
      const Node s = (*v)[i];
      c.strategies.push_back(parse_strategy(s));
      c.strategy_lines.push_back(s.line());
      if (!labels.insert(c.strategies.back().label()).second) {
        s.fail("duplicate strategy label '" + c.strategies.back().label() + "'");
      }
    }
  }
  if (auto v = root.get("budget")) c.budget = v->integer_at_least(1);
  if (auto v = root.get("checkpoint_every")) c.checkpoint_every = v->integer_at_least(0);
  if (auto v = root.get("k")) {
    c.ks.clear();
    if (v->is_number()) {
      c.ks.push_back(static_cast<int>(v->integer_at_least(1)));
    } else {
      for (std::size_t i = 0; i < v->array_size(); ++i) c.ks.push_back(static_cast<int>((*v)[i].integer_at_least(1)));
    }
    if (c.ks.empty()) v->fail("expected at least one k");
    std::sort(c.ks.begin(), c.ks.end());
    if (std::adjacent_find(c.ks.begin(), c.ks.end()) != c.ks.end()) v->fail("duplicate k");
  }
  if (auto v = root.get("seeds")) {
    if (v->is_number()) {
      const auto n = v->integer_at_least(1);
      for (std::int64_t i = 0; i < n; ++i) c.seeds.push_back(static_cast<std::uint64_t>(i));
    } else {
      for (std::size_t i = 0; i < v->array_size(); ++i) c.seeds.push_back((*v)[i].unsigned_integer());
      auto sorted = c.seeds;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) v->fail("duplicate seed index");
    }
  }
  if (auto v = root.get("master_seed")) c.master_seed = v->unsigned_integer();
  if (auto v = root.get("workers")) c.workers = static_cast<std::size_t>(v->integer_at_least(1));
  if (auto v = root.get("output")) c.output = v->string();
  if (auto v = root.get("cost")) c.cost = parse_cost(*v);
  if (auto v = root.get("scaling")) c.scaling = parse_scaling(*v);
  if (auto v = root.get("rank_utility")) c.rank_utility = parse_rank_utility(*v, base_dir);
  if (auto v = root.get("cross_rank")) c.cross_rank = parse_cross_rank(*v, base_dir);
  if (auto v = root.get("gen_world")) c.gen_world = parse_gen_world(*v, base_dir);
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("line 0: cannot open config file " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  try {
    return parse_experiment_config(text, path.parent_path().empty() ? "." : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ":" + e.what());
  }
}

std::unique_ptr<World> build_world(const WorldSpec& spec, std::uint64_t master_seed) {
  switch (spec.kind) {
    case WorldKind::synthetic:
      return std::make_unique<SyntheticWorld>(spec.synthetic, spec.seed.value_or(derive_seed(master_seed, "world")));
    case WorldKind::replay:
      return replay_load(spec.path);
    case WorldKind::external:
      return std::make_unique<ExternalWorld>(spec.topic_names, spec.adapter);
  }
  throw ConfigError("unknown world kind");
}

}  // namespace topic_bandit::harness
