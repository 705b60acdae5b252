#pragma once

// File formats shared by the library and the command-line tool.
//
// Dataset: JSON lines. The first line is {"seed":S,"n":N}; each following
// line is {"strategy":[[..],[..],[..]],"payoffs":[y1,y2,y3]}.
//
// Behaviours: one behaviour per line, three whitespace-separated decimals.
// Blank lines and lines starting with '#' are ignored.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ctxml/game.hpp"
#include "ctxml/types.hpp"

namespace ctxml {

/// Decimal form with 17 significant digits ("%.17g"); round-trips exactly.
std::string format_double(double v);
void append_double(std::string& out, double v);

std::string dataset_to_text(const Dataset& ds);
Dataset dataset_from_text(std::string_view text);
void write_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset read_dataset(const std::filesystem::path& path);

std::string behaviours_to_text(const std::vector<Behaviour>& behaviours);
std::vector<Behaviour> behaviours_from_text(std::string_view text);
void write_behaviours(const std::filesystem::path& path, const std::vector<Behaviour>& behaviours);
std::vector<Behaviour> read_behaviours(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace ctxml
