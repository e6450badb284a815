#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gsn/core.hpp"
#include "gsn/greedy.hpp"
#include "gsn/ridgelet.hpp"
#include "gsn/train.hpp"

namespace gsn::io {

using json = nlohmann::json;

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, const std::string& what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r' || s.back() == '\t')) s.remove_suffix(1);
  double v = 0.0;
  if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidArgument("cannot parse number '" + std::string(s) + "' in " + what);
  }
  return v;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name, const std::string& what) const {
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == name) return k;
    }
    throw InvalidArgument(what + ": missing column '" + name + "'");
  }
};

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(t.header.size()) + " fields");
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_double(c, path.string()));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << format_double(row[k]);
    out << '\n';
  }
}

inline std::vector<std::string> coord_header(Eigen::Index d, const std::string& prefix) {
  std::vector<std::string> h;
  for (Eigen::Index k = 1; k <= d; ++k) h.push_back(prefix + std::to_string(k));
  return h;
}

// Datasets: x1..xd, y

inline void write_dataset(const std::filesystem::path& path, const Dataset& data) {
  auto header = coord_header(data.dim(), "x");
  header.emplace_back("y");
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(data.size()));
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    std::vector<double> r;
    r.reserve(static_cast<std::size_t>(data.dim()) + 1);
    for (Eigen::Index k = 0; k < data.dim(); ++k) r.push_back(data.inputs()(i, k));
    r.push_back(data.targets()(i));
    rows.push_back(std::move(r));
  }
  write_csv(path, header, rows);
}

inline Dataset read_dataset(const std::filesystem::path& path, const std::vector<Interval>& bounds) {
  const CsvTable t = read_csv(path);
  const auto d = static_cast<Eigen::Index>(bounds.size());
  if (static_cast<Eigen::Index>(t.header.size()) != d + 1) {
    throw InvalidArgument(path.string() + ": expected " + std::to_string(d) + " input columns plus 'y'");
  }
  const auto ycol = t.column("y", path.string());
  Matrix x(static_cast<Eigen::Index>(t.rows.size()), d);
  Vector y(static_cast<Eigen::Index>(t.rows.size()));
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    for (Eigen::Index k = 0; k < d; ++k) {
      x(static_cast<Eigen::Index>(i), k) = t.rows[i][t.column("x" + std::to_string(k + 1), path.string())];
    }
    y(static_cast<Eigen::Index>(i)) = t.rows[i][ycol];
  }
  return Dataset(std::move(x), std::move(y), bounds);
}

// Directions: a1..ad, b

inline std::vector<std::string> direction_header(Eigen::Index d) {
  auto h = coord_header(d, "a");
  h.emplace_back("b");
  return h;
}

inline void write_directions(const std::filesystem::path& path, const std::vector<Direction>& dirs) {
  if (dirs.empty()) throw InvalidArgument("no directions to write");
  std::vector<std::vector<double>> rows;
  rows.reserve(dirs.size());
  for (const auto& dir : dirs) rows.emplace_back(dir.point().data(), dir.point().data() + dir.point().size());
  write_csv(path, direction_header(dirs.front().dim()), rows);
}

inline std::vector<Direction> read_directions(const std::filesystem::path& path, Eigen::Index d) {
  const CsvTable t = read_csv(path);
  if (t.header != direction_header(d)) throw InvalidArgument(path.string() + ": unexpected direction columns");
  std::vector<Direction> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.emplace_back(Eigen::Map<const Vector>(r.data(), static_cast<Eigen::Index>(r.size())));
  return out;
}

// Collapsed field: a1..ad, b, value

inline void write_field(const std::filesystem::path& path, const CollapsedField& field) {
  if (field.size() == 0) throw InvalidArgument("empty collapsed field");
  auto header = direction_header(field.directions.front().dim());
  header.emplace_back("value");
  std::vector<std::vector<double>> rows;
  rows.reserve(field.size());
  for (std::size_t j = 0; j < field.size(); ++j) {
    const Vector& p = field.directions[j].point();
    std::vector<double> r(p.data(), p.data() + p.size());
    r.push_back(field.values(static_cast<Eigen::Index>(j)));
    rows.push_back(std::move(r));
  }
  write_csv(path, header, rows);
}

inline CollapsedField read_field(const std::filesystem::path& path, Eigen::Index d, const RadialQuadrature& quad) {
  const CsvTable t = read_csv(path);
  auto header = direction_header(d);
  header.emplace_back("value");
  if (t.header != header) throw InvalidArgument(path.string() + ": unexpected field columns");
  CollapsedField f{{}, Vector(static_cast<Eigen::Index>(t.rows.size())), quad};
  for (std::size_t j = 0; j < t.rows.size(); ++j) {
    f.directions.emplace_back(Eigen::Map<const Vector>(t.rows[j].data(), d + 1));
    f.values(static_cast<Eigen::Index>(j)) = t.rows[j].back();
  }
  return f;
}

// Dictionary membership: source_index, raw_norm

inline void write_dictionary(const std::filesystem::path& path, const Dictionary& dict) {
  std::vector<std::vector<double>> rows;
  rows.reserve(dict.size());
  for (std::size_t k = 0; k < dict.size(); ++k) {
    rows.push_back({static_cast<double>(dict.source_indices()[k]), dict.raw_norms()(static_cast<Eigen::Index>(k))});
  }
  write_csv(path, {"source_index", "raw_norm"}, rows);
}

inline std::vector<std::size_t> read_dictionary_indices(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto col = t.column("source_index", path.string());
  std::vector<std::size_t> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    if (r[col] < 0) throw InvalidArgument(path.string() + ": negative source_index");
    out.push_back(static_cast<std::size_t>(r[col]));
  }
  return out;
}

/// Restricts `full` to the atoms whose source indices are listed.
inline Dictionary restrict_dictionary(const Dictionary& full, const std::vector<std::size_t>& source_indices) {
  std::vector<std::size_t> keep;
  keep.reserve(source_indices.size());
  std::size_t k = 0;
  for (std::size_t s : source_indices) {
    while (k < full.size() && full.source_indices()[k] < s) ++k;
    if (k == full.size() || full.source_indices()[k] != s) {
      throw InvalidArgument("dictionary lists direction " + std::to_string(s) + " which is not a live atom");
    }
    keep.push_back(k);
  }
  return full.select(keep);
}

// Greedy path: m, atom, source_index, residual_norm, train_error, validation_error

inline void write_path(const std::filesystem::path& path, const GreedyPath& gp) {
  std::vector<std::vector<double>> rows;
  rows.reserve(gp.size());
  for (const auto& r : gp.records) {
    rows.push_back({static_cast<double>(r.iteration), static_cast<double>(r.atom), static_cast<double>(r.source_index),
                    r.residual_norm, r.train_error, r.validation_error});
  }
  write_csv(path, {"m", "atom", "source_index", "residual_norm", "train_error", "validation_error"}, rows);
}

inline std::vector<GreedyRecord> read_path(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const std::string w = path.string();
  const auto cm = t.column("m", w), ca = t.column("atom", w), cs = t.column("source_index", w);
  const auto cr = t.column("residual_norm", w), ct = t.column("train_error", w), cv = t.column("validation_error", w);
  std::vector<GreedyRecord> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    GreedyRecord rec;
    rec.iteration = static_cast<std::size_t>(r[cm]);
    rec.atom = static_cast<std::size_t>(r[ca]);
    rec.source_index = static_cast<std::size_t>(r[cs]);
    rec.residual_norm = r[cr];
    rec.train_error = r[ct];
    rec.validation_error = r[cv];
    out.push_back(std::move(rec));
  }
  return out;
}

inline void write_loss(const std::filesystem::path& path, const TrainResult& tr) {
  std::vector<std::vector<double>> rows;
  rows.reserve(tr.train_loss.size());
  for (std::size_t e = 0; e < tr.train_loss.size(); ++e) {
    const double v = e < tr.validation_loss.size() ? tr.validation_loss[e] : std::numeric_limits<double>::quiet_NaN();
    rows.push_back({static_cast<double>(e), tr.train_loss[e], v});
  }
  write_csv(path, {"epoch", "train_loss", "validation_loss"}, rows);
}

// Networks: {input_dim, nodes: [{a: [...], b, c}]}

inline json network_to_json(const ShallowNetwork& net) {
  json nodes = json::array();
  for (const auto& n : net.nodes()) {
    std::vector<double> a(n.direction.a().data(), n.direction.a().data() + n.direction.dim());
    nodes.push_back({{"a", a}, {"b", n.direction.b()}, {"c", n.outer_weight}});
  }
  return {{"input_dim", net.input_dim()}, {"nodes", nodes}};
}

/// Nodes already on the sphere keep their exact coordinates; anything else
/// is rescaled.
inline ShallowNetwork network_from_json(const json& j) {
  try {
    const auto d = j.at("input_dim").get<Eigen::Index>();
    ShallowNetwork net(d);
    for (const auto& node : j.at("nodes")) {
      const auto a = node.at("a").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(a.size()) != d) throw InvalidArgument("network json: field 'a' has wrong length");
      const double b = node.at("b").get<double>();
      const double c = node.at("c").get<double>();
      Vector av = Eigen::Map<const Vector>(a.data(), d);
      const double norm = std::sqrt(av.squaredNorm() + b * b);
      if (std::abs(norm - 1.0) <= kUnitNormTol) {
        net.add(Direction(av, b), c);
      } else {
        auto [dir, w] = rescale_node(av, b, c);
        net.add(std::move(dir), w);
      }
    }
    return net;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("network json: ") + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

}  // namespace gsn::io
