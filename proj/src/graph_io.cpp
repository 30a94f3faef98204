#include "gsi/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gsi/error.hpp"

namespace gsi {
namespace {

using nlohmann::json;

json parse_or_throw(std::string_view text, const char* what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw format_error(std::string(what) + ": invalid JSON: " + e.what());
  }
}

Montage montage_from(const json& doc) {
  if (!doc.is_object() || !doc.contains("electrodes") || !doc["electrodes"].is_array())
    throw format_error("montage: missing \"electrodes\" array");
  std::vector<Electrode> electrodes;
  for (const json& e : doc["electrodes"]) {
    if (!e.is_object() || !e.contains("name") || !e["name"].is_string() || !e.contains("pos") ||
        !e["pos"].is_array() || e["pos"].size() != 3)
      throw format_error("montage: each electrode needs \"name\" and a 3-element \"pos\"");
    Electrode el;
    el.name = e["name"].get<std::string>();
    for (int k = 0; k < 3; ++k) {
      if (!e["pos"][k].is_number()) throw format_error("montage: non-numeric position for '" + el.name + "'");
      el.position(k) = e["pos"][k].get<double>();
    }
    electrodes.push_back(std::move(el));
  }
  return Montage::normalized(std::move(electrodes));
}

json montage_json(const Montage& montage) {
  json arr = json::array();
  for (const Electrode& e : montage.electrodes()) {
    arr.push_back({{"name", e.name}, {"pos", {e.position.x(), e.position.y(), e.position.z()}}});
  }
  return json{{"electrodes", std::move(arr)}};
}

}  // namespace

Montage parse_montage_json(std::string_view text) { return montage_from(parse_or_throw(text, "montage")); }

std::string montage_to_json(const Montage& montage) { return montage_json(montage).dump(1) + "\n"; }

Graph parse_graph_json(std::string_view text) {
  const json doc = parse_or_throw(text, "graph");
  Montage montage = montage_from(doc);
  if (!doc.contains("weights") || !doc["weights"].is_array()) throw format_error("graph: missing \"weights\" matrix");
  const json& rows = doc["weights"];
  const std::size_t n = montage.size();
  if (rows.size() != n) throw format_error("graph: weights has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(n));
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!rows[i].is_array() || rows[i].size() != n) throw format_error("graph: weights row " + std::to_string(i) + " has the wrong length");
    for (std::size_t j = 0; j < n; ++j) {
      if (!rows[i][j].is_number()) throw format_error("graph: non-numeric weight");
      w(i, j) = rows[i][j].get<double>();
    }
  }
  try {
    return Graph(std::move(montage), std::move(w));
  } catch (const invalid_input& e) {
    throw format_error(e.what());
  }
}

std::string graph_to_json(const Graph& graph) {
  json doc = montage_json(graph.montage());
  json rows = json::array();
  const Matrix& w = graph.weights();
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < w.cols(); ++j) row.push_back(w(i, j));
    rows.push_back(std::move(row));
  }
  doc["weights"] = std::move(rows);
  return doc.dump() + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw format_error("cannot write '" + path.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw format_error("write failed for '" + path.string() + "'");
}

Montage load_montage(const std::filesystem::path& path) { return parse_montage_json(read_text_file(path)); }
Graph load_graph(const std::filesystem::path& path) { return parse_graph_json(read_text_file(path)); }
void save_montage(const std::filesystem::path& path, const Montage& m) { write_text_file(path, montage_to_json(m)); }
void save_graph(const std::filesystem::path& path, const Graph& g) { write_text_file(path, graph_to_json(g)); }

}  // namespace gsi
