#include "ctxml/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ctxml/error.hpp"

namespace ctxml {
namespace {

using nlohmann::json;

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                                             : end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return lines;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

}  // namespace

void append_double(std::string& out, double v) {
  if (!std::isfinite(v)) throw DomainError("cannot serialise a non-finite number");
  char buf[32];
  const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(len));
}

std::string format_double(double v) {
  std::string s;
  append_double(s, v);
  return s;
}

std::string dataset_to_text(const Dataset& ds) {
  std::string out = "{\"seed\":" + std::to_string(ds.seed) +
                    ",\"n\":" + std::to_string(ds.records.size()) + "}\n";
  for (const auto& r : ds.records) {
    out += "{\"strategy\":[";
    for (std::size_t k = 0; k < 3; ++k) {
      out += k ? ",[" : "[";
      for (std::size_t a = 0; a < 3; ++a) {
        if (a) out += ',';
        append_double(out, r.strategy.rows()[k][a]);
      }
      out += ']';
    }
    out += "],\"payoffs\":[";
    for (std::size_t k = 0; k < 3; ++k) {
      if (k) out += ',';
      out += std::to_string(r.payoffs[k]);
    }
    out += "]}\n";
  }
  return out;
}

Dataset dataset_from_text(std::string_view text) {
  const auto lines = split_lines(text);
  Dataset ds;
  std::size_t expected = 0;
  bool have_header = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i])) continue;
    const std::string where = "dataset line " + std::to_string(i + 1) + ": ";
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw IoError(where + e.what());
    }
    try {
      if (!have_header) {
        ds.seed = j.at("seed").get<std::uint64_t>();
        expected = j.at("n").get<std::size_t>();
        have_header = true;
        continue;
      }
      const auto rows = j.at("strategy").get<std::array<std::array<double, 3>, 3>>();
      Record r;
      r.strategy = Strategy(rows);
      r.payoffs = j.at("payoffs").get<std::array<int, 3>>();
      for (int y : r.payoffs) {
        if (y != 1 && y != -1) throw DomainError("payoff must be -1 or 1");
      }
      ds.records.push_back(r);
    } catch (const json::exception& e) {
      throw IoError(where + e.what());
    } catch (const DomainError& e) {
      throw IoError(where + e.what());
    }
  }
  if (!have_header) throw IoError("dataset: missing header line");
  if (ds.records.size() != expected) {
    throw IoError("dataset: header announces " + std::to_string(expected) + " records, found " +
                  std::to_string(ds.records.size()));
  }
  return ds;
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds) {
  write_text_file(path, dataset_to_text(ds));
}

Dataset read_dataset(const std::filesystem::path& path) {
  return dataset_from_text(read_text_file(path));
}

std::string behaviours_to_text(const std::vector<Behaviour>& behaviours) {
  std::string out;
  for (const auto& b : behaviours) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (k) out += ' ';
      append_double(out, b[k]);
    }
    out += '\n';
  }
  return out;
}

std::vector<Behaviour> behaviours_from_text(std::string_view text) {
  std::vector<Behaviour> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (is_blank(lines[i]) || lines[i].front() == '#') continue;
    std::istringstream in{std::string(lines[i])};
    Behaviour b;
    std::string extra;
    if (!(in >> b[0] >> b[1] >> b[2]) || (in >> extra)) {
      throw IoError("behaviours line " + std::to_string(i + 1) + ": expected three numbers");
    }
    for (double p : b.p) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw IoError("behaviours line " + std::to_string(i + 1) + ": probability outside [0,1]");
      }
    }
    out.push_back(b);
  }
  return out;
}

void write_behaviours(const std::filesystem::path& path, const std::vector<Behaviour>& behaviours) {
  write_text_file(path, behaviours_to_text(behaviours));
}

std::vector<Behaviour> read_behaviours(const std::filesystem::path& path) {
  return behaviours_from_text(read_text_file(path));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace ctxml
