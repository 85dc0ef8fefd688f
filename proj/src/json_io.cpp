#include "ogs/json_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ogs {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

json load_to_json(double v) {
  if (v == kInf) return json("inf");
  return json(v);
}

double load_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw std::invalid_argument("bad load literal: " + j.get<std::string>());
  }
  return j.get<double>();
}

json norm_json(const NormSpec& spec);

json blocks_json(const NormSpec::Nested& n) {
  json blocks = json::array();
  for (std::size_t l = 0; l < n.blocks.size(); ++l) {
    blocks.push_back(
        {{"indices", n.blocks[l]}, {"inner", norm_json(*n.inners[l])}});
  }
  return blocks;
}

json norm_json(const NormSpec& spec) {
  json j;
  j["kind"] = spec.kind_name();
  if (const auto* s = spec.get_if<NormSpec::Lp>()) j["p"] = s->p;
  if (const auto* s = spec.get_if<NormSpec::TopK>()) j["k"] = s->k;
  if (const auto* s = spec.get_if<NormSpec::WeightedL1>())
    j["weights"] = s->weights;
  if (const auto* s = spec.get_if<NormSpec::OrderedSym>()) j["w"] = s->w;
  if (const auto* s = spec.get_if<NormSpec::ActivationPlus>()) {
    j["activation_cost"] = s->activation_cost;
    if (!s->weights.empty()) j["weights"] = s->weights;
  }
  if (const auto* s = spec.get_if<NormSpec::Nested>()) {
    j["outer"] = norm_json(*s->outer);
    j["blocks"] = blocks_json(*s);
  }
  return j;
}

NormSpec norm_parse(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "LInf") return NormSpec::linf();
  if (kind == "Lp") return NormSpec::lp(j.at("p").get<double>());
  if (kind == "TopK") return NormSpec::top_k(j.at("k").get<int>());
  if (kind == "WeightedL1")
    return NormSpec::weighted_l1(j.at("weights").get<std::vector<double>>());
  if (kind == "OrderedSym")
    return NormSpec::ordered_sym(j.at("w").get<std::vector<double>>());
  if (kind == "ActivationPlus") {
    std::vector<double> weights;
    if (j.contains("weights"))
      weights = j.at("weights").get<std::vector<double>>();
    return NormSpec::activation_plus(j.at("activation_cost").get<double>(),
                                     std::move(weights));
  }
  if (kind == "Nested") {
    std::vector<std::pair<std::vector<int>, NormSpec>> blocks;
    for (const auto& b : j.at("blocks")) {
      blocks.emplace_back(b.at("indices").get<std::vector<int>>(),
                          norm_parse(b.at("inner")));
    }
    return NormSpec::nested(norm_parse(j.at("outer")), std::move(blocks));
  }
  throw std::invalid_argument("unknown norm kind: " + kind);
}

json aggregate_json(const AggregateSpec& spec) {
  json j;
  j["kind"] = spec.kind_name();
  if (const auto* s = spec.get_if<AggregateSpec::NormAgg>())
    j["norm"] = norm_json(s->norm);
  if (const auto* s = spec.get_if<AggregateSpec::SumPowers>()) {
    j["p"] = s->p;
    j["weights"] = s->weights;
  }
  if (const auto* s = spec.get_if<AggregateSpec::PNormPower>()) j["p"] = s->p;
  return j;
}

AggregateSpec aggregate_parse(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "NormAgg")
    return AggregateSpec::norm_agg(norm_parse(j.at("norm")));
  if (kind == "SumPowers")
    return AggregateSpec::sum_powers(j.at("p").get<double>(),
                                     j.at("weights").get<std::vector<double>>());
  if (kind == "PNormPower")
    return AggregateSpec::pnorm_power(j.at("p").get<double>());
  throw std::invalid_argument("unknown aggregate kind: " + kind);
}

}  // namespace

std::string norm_to_json(const NormSpec& spec) { return norm_json(spec).dump(); }

NormSpec norm_from_json(const std::string& text) {
  return norm_parse(json::parse(text));
}

std::string aggregate_to_json(const AggregateSpec& spec) {
  return aggregate_json(spec).dump();
}

AggregateSpec aggregate_from_json(const std::string& text) {
  return aggregate_parse(json::parse(text));
}

std::string instance_to_json(const Instance& inst) {
  json j;
  j["m"] = inst.m;
  j["r"] = inst.r;
  json norms = json::array();
  for (const auto& norm : inst.inner_norms) norms.push_back(norm_json(norm));
  j["inner_norms"] = norms;
  j["aggregate"] = aggregate_json(inst.aggregate);
  j["budget"] = inst.budget;
  json jobs = json::array();
  for (const auto& job : inst.jobs) {
    json loads = json::array();
    for (double v : job.loads) loads.push_back(load_to_json(v));
    jobs.push_back(loads);
  }
  j["jobs"] = jobs;
  return j.dump(2);
}

Instance instance_from_json(const std::string& text) {
  const json j = json::parse(text);
  Instance inst;
  inst.m = j.at("m").get<int>();
  inst.r = j.at("r").get<int>();
  for (const auto& norm : j.at("inner_norms"))
    inst.inner_norms.push_back(norm_parse(norm));
  if (static_cast<int>(inst.inner_norms.size()) != inst.m)
    throw std::invalid_argument("inner norm count does not match m");
  inst.aggregate = aggregate_parse(j.at("aggregate"));
  inst.budget = j.at("budget").get<double>();
  for (const auto& loads : j.at("jobs")) {
    Job job;
    for (const auto& v : loads) job.loads.push_back(load_from_json(v));
    if (static_cast<int>(job.loads.size()) !=
        inst.m * inst.r)
      throw std::invalid_argument("job load vector is not m*r long");
    inst.jobs.push_back(std::move(job));
  }
  return inst;
}

std::string set_cover_to_json(const SetCoverInstance& sc) {
  json j;
  j["costs"] = sc.costs;
  j["elements"] = sc.elements;
  return j.dump(2);
}

SetCoverInstance set_cover_from_json(const std::string& text) {
  const json j = json::parse(text);
  SetCoverInstance sc;
  sc.costs = j.at("costs").get<std::vector<double>>();
  sc.elements = j.at("elements").get<std::vector<std::vector<int>>>();
  for (const auto& sets : sc.elements)
    for (int i : sets)
      if (i < 0 || i >= sc.m())
        throw std::invalid_argument("element references a set out of range");
  return sc;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ogs
