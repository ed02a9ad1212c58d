#include "pcbounds/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace pcbounds {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& message) {
  throw Error(ErrorCode::SchemaError, message);
}

int read_integer(const json& doc, const char* key) {
  if (!doc.contains(key)) schema_error(std::string("missing field \"") + key + "\"");
  const json& v = doc.at(key);
  if (!v.is_number_integer()) schema_error(std::string("field \"") + key + "\" must be an integer");
  return v.get<int>();
}

ConditionalTable read_table(const json& doc, const char* key, std::string row_var,
                            std::string col_var) {
  if (!doc.contains(key)) schema_error(std::string("missing field \"") + key + "\"");
  const json& rows = doc.at(key);
  if (!rows.is_array() || rows.empty()) {
    schema_error(std::string("field \"") + key + "\" must be a non-empty array of rows");
  }
  const std::size_t width = rows.front().is_array() ? rows.front().size() : 0;
  Table<double> entries(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const json& row = rows[r];
    if (!row.is_array()) schema_error(std::string("field \"") + key + "\" rows must be arrays");
    if (row.size() != width) {
      throw Error(ErrorCode::ArityMismatch, std::string("field \"") + key + "\" is ragged");
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (!row[c].is_number()) {
        schema_error(std::string("field \"") + key + "\" entries must be numbers");
      }
      entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return {std::move(row_var), std::move(col_var), std::move(entries)};
}

json table_json(const ConditionalTable& table) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < table.cols(); ++c) row.push_back(table(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed) {
  for (const auto& item : doc.items()) {
    if (!allowed.contains(item.key())) schema_error("unknown field \"" + item.key() + "\"");
  }
}

}  // namespace

Scenario parse_scenario_document(const json& doc) {
  if (!doc.is_object()) schema_error("scenario document must be a JSON object");
  if (!doc.contains("kind") || !doc.at("kind").is_string()) {
    schema_error("field \"kind\" must be \"simple\" or \"mediator\"");
  }
  const std::string kind = doc.at("kind").get<std::string>();
  if (kind == "simple") {
    reject_unknown_keys(doc, {"kind", "T", "t", "p_y_given_d"});
  } else if (kind == "mediator") {
    reject_unknown_keys(doc, {"kind", "T", "t", "p_m_given_d", "p_y_given_m"});
  } else {
    schema_error("field \"kind\" must be \"simple\" or \"mediator\", got \"" + kind + "\"");
  }
  const OutcomeScale scale = OutcomeScale::make(read_integer(doc, "T"), read_integer(doc, "t"));
  if (kind == "simple") {
    return validate_scenario(SimpleScenario{scale, read_table(doc, "p_y_given_d", "D", "Y")});
  }
  return validate_scenario(MediatorScenario{scale, read_table(doc, "p_m_given_d", "D", "M"),
                                            read_table(doc, "p_y_given_m", "M", "Y")});
}

Scenario parse_scenario_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    schema_error(std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario_document(doc);
}

Scenario load_scenario_document(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) schema_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_document(std::string_view(buffer.str()));
}

json to_document(const Scenario& scenario) {
  if (const auto* s = std::get_if<SimpleScenario>(&scenario)) {
    return {{"kind", "simple"},
            {"T", s->scale.levels()},
            {"t", s->scale.threshold()},
            {"p_y_given_d", table_json(s->y_given_d)}};
  }
  const auto& m = std::get<MediatorScenario>(scenario);
  return {{"kind", "mediator"},
          {"T", m.scale.levels()},
          {"t", m.scale.threshold()},
          {"p_m_given_d", table_json(m.m_given_d)},
          {"p_y_given_m", table_json(m.y_given_m)}};
}

json to_json(const BoundInterval& interval) {
  json out = {{"lower", interval.lower},
              {"upper", interval.upper},
              {"formula", std::string(to_string(interval.formula))}};
  if (interval.terms) {
    const auto& t = *interval.terms;
    out["terms"] = {{"mediator_switch_cap", t.mediator_switch_cap},
                    {"mediator_shift", t.mediator_shift},
                    {"outcome_switch_cap", t.outcome_switch_cap},
                    {"outcome_shift", t.outcome_shift},
                    {"improved_mass", t.improved_mass}};
  }
  return out;
}

json to_json(const DominanceReport& report) {
  return {{"simple_bounds", to_json(report.simple_bounds)},
          {"mediator_bounds", to_json(report.mediator_bounds)},
          {"lower_equal", report.lower_equal},
          {"upper_improvement", report.upper_improvement}};
}

json to_json(const CounterfactualJoint& joint) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < joint.entries.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < joint.entries.cols(); ++c) row.push_back(joint.entries(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const Envelope& envelope) {
  auto witness = [](const EnvelopeWitness& w) {
    json out = {{"outcome_pairs", to_json(w.outcome)}};
    if (w.mediator) out["mediator_pairs"] = to_json(*w.mediator);
    if (w.star) out["mediator_indexed_outcome_pairs"] = to_json(*w.star);
    return out;
  };
  json out = {{"min_pc", envelope.min_pc},
              {"max_pc", envelope.max_pc},
              {"method", std::string(to_string(envelope.method))},
              {"argmin", witness(envelope.argmin)},
              {"argmax", witness(envelope.argmax)},
              {"evaluations", envelope.evaluations}};
  if (envelope.method == EnvelopeMethod::GridSearch) {
    out["resolution"] = envelope.resolution;
    out["effective_resolution"] = envelope.effective_resolution;
  }
  return out;
}

json error_json(const Error& error) {
  return {{"error", std::string(to_string(error.code()))}, {"message", error.what()}};
}

}  // namespace pcbounds
