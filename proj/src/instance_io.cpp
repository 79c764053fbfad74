// Instance JSON schema:
//
//   {
//     "n": 3,
//     "spectrum": [{"value": -1.0, "mult": 1}, ...],
//     "constraints": [{"C": [[...], ...], "b": 0.0}, ...],
//     "label": "free text"
//   }
//
// C is dense row-major and must be exactly symmetric.

#include "iep/instance.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace iep {

using nlohmann::json;

namespace {

std::string line_of(const std::string& text, std::size_t byte) {
  const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
  return std::to_string(1 + std::count(text.begin(), end, '\n'));
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw Error(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(where + ": missing field \"" + key + "\"");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw Error(where + ": expected a number");
  return v.get<double>();
}

}  // namespace

std::string instance_to_json(const IEPInstance& inst, int indent) {
  json doc;
  doc["n"] = inst.n;
  doc["label"] = inst.label;
  json spec = json::array();
  for (const auto& p : inst.spectrum.pairs()) spec.push_back({{"value", p.value}, {"mult", p.mult}});
  doc["spectrum"] = std::move(spec);
  json cons = json::array();
  for (const auto& c : inst.constraints) {
    json rows = json::array();
    for (int s = 0; s < c.C.n(); ++s) {
      json row = json::array();
      for (int t = 0; t < c.C.n(); ++t) row.push_back(c.C(s, t));
      rows.push_back(std::move(row));
    }
    cons.push_back({{"C", std::move(rows)}, {"b", c.b}});
  }
  doc["constraints"] = std::move(cons);
  return doc.dump(indent);
}

IEPInstance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error("parse error at line " + line_of(text, e.byte) + ": " + e.what());
  }

  IEPInstance inst;
  const json& n = field(doc, "n", "instance");
  if (!n.is_number_integer() || n.get<int>() <= 0)
    throw Error("field \"n\": expected a positive integer");
  inst.n = n.get<int>();
  if (auto it = doc.find("label"); it != doc.end() && it->is_string()) inst.label = *it;

  const json& spec = field(doc, "spectrum", "instance");
  if (!spec.is_array() || spec.empty()) throw Error("field \"spectrum\": expected a non-empty array");
  std::vector<Eigenpair> pairs;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const std::string where = "spectrum[" + std::to_string(i) + "]";
    const double value = number(field(spec[i], "value", where), where + ".value");
    const json& m = field(spec[i], "mult", where);
    if (!m.is_number_integer()) throw Error(where + ".mult: expected an integer");
    pairs.push_back({value, m.get<int>()});
  }
  inst.spectrum = Spectrum(std::move(pairs));

  if (auto it = doc.find("constraints"); it != doc.end()) {
    if (!it->is_array()) throw Error("field \"constraints\": expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string where = "constraints[" + std::to_string(k) + "]";
      const json& C = field((*it)[k], "C", where);
      if (!C.is_array() || static_cast<int>(C.size()) != inst.n)
        throw Error(where + ".C: expected " + std::to_string(inst.n) + " rows");
      Eigen::MatrixXd m(inst.n, inst.n);
      for (int s = 0; s < inst.n; ++s) {
        const json& row = C[s];
        if (!row.is_array() || static_cast<int>(row.size()) != inst.n)
          throw Error(where + ".C[" + std::to_string(s) + "]: expected " + std::to_string(inst.n) +
                      " entries");
        for (int t = 0; t < inst.n; ++t)
          m(s, t) = number(row[t], where + ".C[" + std::to_string(s) + "][" + std::to_string(t) + "]");
      }
      SymMatrix sym;
      try {
        sym = SymMatrix::from_dense(m);
      } catch (const Error& e) {
        throw Error(where + ".C: " + e.what());
      }
      const double b = number(field((*it)[k], "b", where), where + ".b");
      inst.constraints.push_back({std::move(sym), b});
    }
  }
  inst.validate();
  return inst;
}

IEPInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return instance_from_json(ss.str());
}

void save_instance(const IEPInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << instance_to_json(inst) << '\n';
}

}  // namespace iep
