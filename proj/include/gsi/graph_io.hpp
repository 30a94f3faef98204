#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gsi/graph_core.hpp"

namespace gsi {

// Montage JSON: {"electrodes":[{"name":"C3","pos":[x,y,z]},...]}.
// Positions are normalized to unit norm on load.
Montage parse_montage_json(std::string_view text);
std::string montage_to_json(const Montage& montage);

// Graph JSON: the montage object plus "weights": row-major [[...],...].
Graph parse_graph_json(std::string_view text);
std::string graph_to_json(const Graph& graph);

Montage load_montage(const std::filesystem::path& path);
Graph load_graph(const std::filesystem::path& path);
void save_montage(const std::filesystem::path& path, const Montage& montage);
void save_graph(const std::filesystem::path& path, const Graph& graph);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace gsi
