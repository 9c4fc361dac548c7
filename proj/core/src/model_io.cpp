#include "protoseg/model_io.hpp"

#include <fstream>
#include <string>

#include "protoseg/error.hpp"

namespace protoseg {

using nlohmann::json;

json model_to_json(const ClusterModel& model) {
  const DatasetSchema& schema = model.schema;

  json numeric = json::array();
  for (std::size_t j = 0; j < schema.numeric_count(); ++j) {
    json attr = {{"name", schema.numeric()[j].name}, {"unit", schema.numeric()[j].unit}};
    if (schema.standardized()) {
      const auto& s = (*schema.standardization())[j];
      attr["standardization"] = {{"mean", s.mean}, {"stddev", s.stddev}};
    } else {
      attr["standardization"] = nullptr;
    }
    numeric.push_back(std::move(attr));
  }
  json categorical = json::array();
  for (const auto& a : schema.categorical()) {
    categorical.push_back({{"name", a.name}, {"categories", a.dictionary.labels()}});
  }

  json prototypes = json::array();
  for (const auto& p : model.prototypes) {
    json center = json::array();
    for (std::size_t j = 0; j < p.numeric_center.size(); ++j) {
      center.push_back(schema.to_original(j, p.numeric_center[j]));
    }
    json modes = json::array();
    for (std::size_t j = 0; j < p.categorical_mode.size(); ++j) {
      const Code c = p.categorical_mode[j];
      modes.push_back({{"code", c}, {"label", schema.categorical()[j].dictionary.label(c)}});
    }
    prototypes.push_back({{"numeric_center", std::move(center)},
                          {"categorical_mode", std::move(modes)},
                          {"category_freq", p.category_freq},
                          {"unknown_count", p.unknown_count},
                          {"member_count", p.member_count}});
  }

  json breakdowns = json::array();
  for (const auto& b : model.breakdowns) {
    breakdowns.push_back(
        {{"numeric_cost", b.numeric_cost}, {"categorical_cost", b.categorical_cost}, {"total", b.total}});
  }

  const FitMeta& meta = model.fit_meta;
  std::vector<bool> converged(meta.restart_converged.begin(), meta.restart_converged.end());
  json fit_meta = {{"seed", meta.seed},
                   {"restarts", meta.restarts},
                   {"iterations", meta.iterations},
                   {"restart_converged", converged},
                   {"best_restart", meta.best_restart},
                   {"converged", meta.converged},
                   {"init", meta.init},
                   {"gamma_source", meta.gamma_source},
                   {"gamma_warning", meta.gamma_warning},
                   {"config_hash", meta.config_hash}};

  return {{"schema_version", kModelSchemaVersion},
          {"schema", {{"numeric", std::move(numeric)}, {"categorical", std::move(categorical)}}},
          {"k", model.k},
          {"gamma", model.gamma},
          {"prototypes", std::move(prototypes)},
          {"assignment", model.assignment},
          {"total_cost", model.total_cost},
          {"breakdowns", std::move(breakdowns)},
          {"fit_meta", std::move(fit_meta)}};
}

namespace {

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw SchemaError("model document: missing field '" + where + name + "'");
  }
  return obj.at(name);
}

void expect(bool ok, const std::string& what) {
  if (!ok) throw SchemaError("model document: " + what);
}

}  // namespace

void validate_model_document(const json& doc) {
  expect(doc.is_object(), "top level is not an object");
  const json& version = field(doc, "schema_version", "");
  expect(version.is_string() && version.get<std::string>() == kModelSchemaVersion,
         std::string("schema_version must be \"") + kModelSchemaVersion + "\"");

  const json& schema = field(doc, "schema", "");
  const json& numeric = field(schema, "numeric", "schema.");
  const json& categorical = field(schema, "categorical", "schema.");
  expect(numeric.is_array() && categorical.is_array(), "schema attribute lists must be arrays");
  std::size_t standardized = 0;
  for (const auto& a : numeric) {
    expect(field(a, "name", "schema.numeric[].").is_string(), "numeric attribute name must be a string");
    expect(field(a, "unit", "schema.numeric[].").is_string(), "numeric attribute unit must be a string");
    const json& s = field(a, "standardization", "schema.numeric[].");
    if (!s.is_null()) {
      expect(field(s, "mean", "standardization.").is_number() && field(s, "stddev", "standardization.").is_number(),
             "standardization mean/stddev must be numbers");
      ++standardized;
    }
  }
  expect(standardized == 0 || standardized == numeric.size(),
         "standardization must be present on all numeric attributes or none");
  for (const auto& a : categorical) {
    expect(field(a, "name", "schema.categorical[].").is_string(), "categorical attribute name must be a string");
    const json& cats = field(a, "categories", "schema.categorical[].");
    expect(cats.is_array() && !cats.empty(), "categories must be a non-empty array");
    for (const auto& c : cats) expect(c.is_string(), "category labels must be strings");
  }

  const json& k = field(doc, "k", "");
  expect(k.is_number_unsigned() && k.get<std::size_t>() >= 1, "k must be an integer >= 1");
  const json& gamma = field(doc, "gamma", "");
  expect(gamma.is_number() && gamma.get<double>() >= 0.0, "gamma must be a number >= 0");

  const json& prototypes = field(doc, "prototypes", "");
  expect(prototypes.is_array() && prototypes.size() == k.get<std::size_t>(), "prototypes must hold k entries");
  for (const auto& p : prototypes) {
    const json& center = field(p, "numeric_center", "prototypes[].");
    expect(center.is_array() && center.size() == numeric.size(), "numeric_center length mismatch");
    for (const auto& v : center) expect(v.is_number(), "numeric_center entries must be numbers");
    const json& modes = field(p, "categorical_mode", "prototypes[].");
    expect(modes.is_array() && modes.size() == categorical.size(), "categorical_mode length mismatch");
    for (const auto& m : modes) {
      expect(field(m, "code", "categorical_mode[].").is_number_integer(), "mode code must be an integer");
      expect(field(m, "label", "categorical_mode[].").is_string(), "mode label must be a string");
    }
    const json& freq = field(p, "category_freq", "prototypes[].");
    expect(freq.is_array() && freq.size() == categorical.size(), "category_freq length mismatch");
    for (std::size_t j = 0; j < freq.size(); ++j) {
      expect(freq[j].is_array() && freq[j].size() == categorical[j].at("categories").size(),
             "category_freq table size mismatch");
    }
    const json& unknown = field(p, "unknown_count", "prototypes[].");
    expect(unknown.is_array() && unknown.size() == categorical.size(), "unknown_count length mismatch");
    expect(field(p, "member_count", "prototypes[].").is_number_unsigned(), "member_count must be an integer");
  }

  const json& assignment = field(doc, "assignment", "");
  expect(assignment.is_array(), "assignment must be an array");
  for (const auto& a : assignment) {
    expect(a.is_number_unsigned() && a.get<std::size_t>() < k.get<std::size_t>(), "assignment values must be in 0..k-1");
  }
  expect(field(doc, "total_cost", "").is_number(), "total_cost must be a number");
  const json& breakdowns = field(doc, "breakdowns", "");
  expect(breakdowns.is_array() && breakdowns.size() == k.get<std::size_t>(), "breakdowns must hold k entries");
  for (const auto& b : breakdowns) {
    for (const char* name : {"numeric_cost", "categorical_cost", "total"}) {
      expect(field(b, name, "breakdowns[].").is_number(), std::string(name) + " must be a number");
    }
  }

  const json& meta = field(doc, "fit_meta", "");
  expect(field(meta, "seed", "fit_meta.").is_number_unsigned(), "fit_meta.seed must be an unsigned integer");
  expect(field(meta, "restarts", "fit_meta.").is_number_unsigned(), "fit_meta.restarts must be an integer");
  expect(field(meta, "iterations", "fit_meta.").is_array(), "fit_meta.iterations must be an array");
  expect(field(meta, "restart_converged", "fit_meta.").is_array(), "fit_meta.restart_converged must be an array");
  expect(field(meta, "best_restart", "fit_meta.").is_number_unsigned(), "fit_meta.best_restart must be an integer");
  expect(field(meta, "converged", "fit_meta.").is_boolean(), "fit_meta.converged must be a boolean");
  expect(field(meta, "init", "fit_meta.").is_string(), "fit_meta.init must be a string");
  expect(field(meta, "gamma_source", "fit_meta.").is_string(), "fit_meta.gamma_source must be a string");
  expect(field(meta, "gamma_warning", "fit_meta.").is_boolean(), "fit_meta.gamma_warning must be a boolean");
  expect(field(meta, "config_hash", "fit_meta.").is_string(), "fit_meta.config_hash must be a string");
}

ClusterModel model_from_json(const json& doc) {
  validate_model_document(doc);

  const json& js = doc.at("schema");
  std::vector<NumericAttribute> numeric;
  std::vector<Standardization> transform;
  for (const auto& a : js.at("numeric")) {
    numeric.push_back({a.at("name").get<std::string>(), a.at("unit").get<std::string>()});
    if (!a.at("standardization").is_null()) {
      transform.push_back({a.at("standardization").at("mean").get<double>(),
                           a.at("standardization").at("stddev").get<double>()});
    }
  }
  std::vector<CategoricalAttribute> categorical;
  for (const auto& a : js.at("categorical")) {
    categorical.push_back(
        {a.at("name").get<std::string>(), CategoryDictionary(a.at("categories").get<std::vector<std::string>>())});
  }
  std::optional<std::vector<Standardization>> standardization;
  if (!numeric.empty() && transform.size() == numeric.size()) standardization = std::move(transform);

  ClusterModel model;
  model.schema = DatasetSchema(std::move(numeric), std::move(categorical), std::move(standardization));
  model.k = doc.at("k").get<std::size_t>();
  model.gamma = doc.at("gamma").get<double>();

  for (const auto& p : doc.at("prototypes")) {
    Prototype proto;
    const auto center = p.at("numeric_center").get<std::vector<double>>();
    for (std::size_t j = 0; j < center.size(); ++j) proto.numeric_center.push_back(model.schema.to_model(j, center[j]));
    for (const auto& m : p.at("categorical_mode")) proto.categorical_mode.push_back(m.at("code").get<Code>());
    for (std::size_t j = 0; j < proto.categorical_mode.size(); ++j) {
      expect(model.schema.valid_code(j, proto.categorical_mode[j]), "mode code outside its dictionary");
    }
    proto.category_freq = p.at("category_freq").get<std::vector<std::vector<std::size_t>>>();
    proto.unknown_count = p.at("unknown_count").get<std::vector<std::size_t>>();
    proto.member_count = p.at("member_count").get<std::size_t>();
    model.prototypes.push_back(std::move(proto));
  }
  model.assignment = doc.at("assignment").get<Assignment>();
  model.total_cost = doc.at("total_cost").get<double>();
  for (const auto& b : doc.at("breakdowns")) {
    model.breakdowns.push_back(
        {b.at("numeric_cost").get<double>(), b.at("categorical_cost").get<double>(), b.at("total").get<double>()});
  }

  const json& meta = doc.at("fit_meta");
  model.fit_meta.seed = meta.at("seed").get<std::uint64_t>();
  model.fit_meta.restarts = meta.at("restarts").get<std::size_t>();
  model.fit_meta.iterations = meta.at("iterations").get<std::vector<std::size_t>>();
  model.fit_meta.restart_converged = meta.at("restart_converged").get<std::vector<bool>>();
  model.fit_meta.best_restart = meta.at("best_restart").get<std::size_t>();
  model.fit_meta.converged = meta.at("converged").get<bool>();
  model.fit_meta.init = meta.at("init").get<std::string>();
  model.fit_meta.gamma_source = meta.at("gamma_source").get<std::string>();
  model.fit_meta.gamma_warning = meta.at("gamma_warning").get<bool>();
  model.fit_meta.config_hash = meta.at("config_hash").get<std::string>();
  return model;
}

void save_model(const ClusterModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write model file " + path.string());
  out << model_to_json(model).dump(2) << '\n';
  if (!out) throw ConfigError("failed writing model file " + path.string());
}

ClusterModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("model file " + path.string() + " is not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace protoseg
