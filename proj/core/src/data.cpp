#include "hyperfit/data.hpp"

#include "hyperfit/error.hpp"
#include "hyperfit/random.hpp"

#include <json.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace hyperfit {
namespace {

constexpr int kPlacementRestarts = 50;
constexpr int kPlacementTries = 500;
constexpr long long kMaxPatchDraws = 50'000'000;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view text, std::size_t line) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("not a number: '" + std::string(text) + "'", line);
  }
  if (!std::isfinite(value)) throw ParseError("non-finite coordinate", line);
  return value;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return in;
}

// Orthonormal basis of the hyperplane directions (columns), from a QR of n.
Eigen::MatrixXd complement_basis(const Vector& n) {
  const Eigen::Index dim = n.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(n);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
  return q.rightCols(dim - 1);
}

bool inside_box(const Vector& x, double half) { return (x.array().abs() <= half).all(); }

std::vector<Hyperplane> place_hyperplanes(const InstanceSpec& spec, Rng& rng) {
  const double half = spec.box_side / 2.0;
  const double margin = 3.0 * spec.noise;
  std::vector<Hyperplane> out;
  for (int j = 0; j < spec.num_hyperplanes; ++j) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementTries && !placed; ++attempt) {
      const Vector n = random_unit_vector(spec.dim, rng);
      const double d_max = (half - margin) / n.cwiseAbs().maxCoeff();
      const double d = std::uniform_real_distribution<double>(0.0, d_max)(rng);
      const Hyperplane h{n, d};
      const Vector feature = hbar(h);
      placed = std::all_of(out.begin(), out.end(),
                           [&](const Hyperplane& o) { return (hbar(o) - feature).norm() >= spec.separation(); });
      if (placed) out.push_back(h);
    }
    if (!placed) return {};
  }
  return out;
}

}  // namespace

std::string format_real(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw Error("cannot format number");
  return std::string(buf, ptr);
}

void InstanceSpec::validate() const {
  if (dim < 2) throw ConfigError("dim must be >= 2");
  if (num_hyperplanes < 1) throw ConfigError("number of hyperplanes must be >= 1");
  if (total_points < num_hyperplanes) throw ConfigError("need at least one point per hyperplane");
  if (!(noise > 0.0)) throw ConfigError("noise must be positive");
  if (!(box_side > 0.0)) throw ConfigError("box side must be positive");
  if (!(box_side / 2.0 > 3.0 * noise)) throw ConfigError("box too small for a 3*noise margin");
  if (min_separation && !(*min_separation >= 0.0)) throw ConfigError("min separation must be nonnegative");
}

Instance generate_instance(const InstanceSpec& spec) {
  spec.validate();
  const double half = spec.box_side / 2.0;

  std::vector<Hyperplane> planes;
  Rng rng;
  for (int restart = 0; restart < kPlacementRestarts && planes.empty(); ++restart) {
    rng.seed(derive_seed(spec.seed, static_cast<std::uint64_t>(restart)));
    planes = place_hyperplanes(spec, rng);
  }
  if (planes.empty()) {
    throw ConfigError("cannot place " + std::to_string(spec.num_hyperplanes) +
                      " hyperplanes with the requested separation inside the box");
  }

  Instance inst;
  inst.points.resize(spec.total_points, spec.dim);
  inst.truth.source.resize(static_cast<std::size_t>(spec.total_points));
  // Rows are filled in a seeded random order so sources are interleaved.
  std::vector<Eigen::Index> slots(static_cast<std::size_t>(spec.total_points));
  std::iota(slots.begin(), slots.end(), Eigen::Index{0});
  std::shuffle(slots.begin(), slots.end(), rng);

  const double reach = spec.box_side * std::sqrt(static_cast<double>(spec.dim));
  std::uniform_real_distribution<double> along(-reach, reach);
  std::uniform_real_distribution<double> across(-spec.noise, spec.noise);
  const int base = spec.total_points / spec.num_hyperplanes;
  const int extra = spec.total_points % spec.num_hyperplanes;

  std::size_t next = 0;
  for (int j = 0; j < spec.num_hyperplanes; ++j) {
    const Hyperplane& h = planes[static_cast<std::size_t>(j)];
    const Eigen::MatrixXd basis = complement_basis(h.normal);
    const Vector anchor = hbar(h);
    const int count = base + (j < extra ? 1 : 0);
    long long draws = 0;
    for (int c = 0; c < count; ++c) {
      Vector x;
      for (;;) {
        if (++draws > kMaxPatchDraws) throw ConfigError("hyperplane patch inside the box is too small to sample");
        Vector u(spec.dim - 1);
        for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = along(rng);
        const Vector on_plane = anchor + basis * u;
        if (!inside_box(on_plane, half)) continue;
        x = on_plane + across(rng) * h.normal;
        x = x.cwiseMax(-half).cwiseMin(half);
        if (distance(x, h) <= spec.noise) break;
      }
      const Eigen::Index row = slots[next++];
      inst.points.row(row) = x.transpose();
      inst.truth.source[static_cast<std::size_t>(row)] = j;
    }
  }
  inst.truth.hyperplanes = std::move(planes);
  return inst;
}

PointSet load_points(const std::filesystem::path& path, bool header) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (header && line_no == 1) continue;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = body.find(',', start);
      row.push_back(parse_real(body.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start), line_no));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (dim == 0) {
      dim = row.size();
      if (dim < 2) throw ParseError("points need at least 2 columns", line_no);
    } else if (row.size() != dim) {
      throw ParseError("expected " + std::to_string(dim) + " columns, got " + std::to_string(row.size()), line_no);
    }
    rows.push_back(std::move(row));
  }
  if (in.bad()) throw IoError("read error on '" + path.string() + "'");

  PointSet points(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < dim; ++k) points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return points;
}

void save_points(const std::filesystem::path& path, const PointSet& points, bool header) {
  std::ofstream out = open_out(path);
  if (header) {
    for (Eigen::Index k = 0; k < points.cols(); ++k) out << (k ? "," : "") << 'x' << k;
    out << '\n';
  }
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index k = 0; k < points.cols(); ++k) out << (k ? "," : "") << format_real(points(i, k));
    out << '\n';
  }
  if (!out) throw IoError("write error on '" + path.string() + "'");
}

std::vector<Hyperplane> load_hyperplanes(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<Hyperplane> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    auto read_vector = [&](const char* key) {
      const auto& arr = record.at(key);
      if (!arr.is_array() || arr.size() < 2) throw ParseError(std::string("'") + key + "' must be an array of >= 2 numbers", line_no);
      Vector v(static_cast<Eigen::Index>(arr.size()));
      for (std::size_t k = 0; k < arr.size(); ++k) {
        if (!arr[k].is_number()) throw ParseError(std::string("'") + key + "' holds a non-number", line_no);
        v(static_cast<Eigen::Index>(k)) = arr[k].get<double>();
      }
      return v;
    };
    try {
      Hyperplane h;
      if (record.contains("normal")) {
        h = canonicalize(Hyperplane{read_vector("normal"), record.at("d").get<double>()});
      } else if (record.contains("a")) {
        h = from_coefficients(read_vector("a"), record.at("b").get<double>());
      } else {
        throw ParseError("record needs {\"normal\", \"d\"} or {\"a\", \"b\"}", line_no);
      }
      if (!out.empty() && out.front().dim() != h.dim()) throw ParseError("inconsistent hyperplane dimension", line_no);
      out.push_back(std::move(h));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad record: ") + e.what(), line_no);
    } catch (const NumericalError& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return out;
}

void save_hyperplanes(const std::filesystem::path& path, const std::vector<Hyperplane>& hyperplanes) {
  std::ofstream out = open_out(path);
  for (const Hyperplane& h : hyperplanes) {
    out << "{\"normal\": [";
    for (Eigen::Index k = 0; k < h.normal.size(); ++k) out << (k ? ", " : "") << format_real(h.normal(k));
    out << "], \"d\": " << format_real(h.offset) << "}\n";
  }
  if (!out) throw IoError("write error on '" + path.string() + "'");
}

void save_instance_meta(const std::filesystem::path& path, const InstanceSpec& spec) {
  std::ofstream out = open_out(path);
  out << "dim=" << spec.dim << '\n'
      << "num_hyperplanes=" << spec.num_hyperplanes << '\n'
      << "total_points=" << spec.total_points << '\n'
      << "noise=" << format_real(spec.noise) << '\n'
      << "box_side=" << format_real(spec.box_side) << '\n'
      << "min_separation=" << format_real(spec.separation()) << '\n'
      << "seed=" << spec.seed << '\n';
  if (!out) throw IoError("write error on '" + path.string() + "'");
}

InstanceSpec load_instance_meta(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::map<std::string, std::string, std::less<>> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected key=value", line_no);
    kv.emplace(std::string(trim(body.substr(0, eq))), std::string(trim(body.substr(eq + 1))));
  }
  auto get = [&](const char* key) -> const std::string& {
    const auto it = kv.find(key);
    if (it == kv.end()) throw ParseError(std::string("missing key '") + key + "'", line_no);
    return it->second;
  };
  InstanceSpec spec;
  try {
    spec.dim = std::stoi(get("dim"));
    spec.num_hyperplanes = std::stoi(get("num_hyperplanes"));
    spec.total_points = std::stoi(get("total_points"));
    spec.noise = parse_real(get("noise"), line_no);
    spec.box_side = parse_real(get("box_side"), line_no);
    if (kv.count("min_separation")) spec.min_separation = parse_real(get("min_separation"), line_no);
    spec.seed = std::stoull(get("seed"));
  } catch (const std::logic_error& e) {
    throw ParseError(std::string("bad value: ") + e.what(), line_no);
  }
  return spec;
}

void save_instance(const std::filesystem::path& dir, const Instance& instance, const InstanceSpec& spec) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  save_points(dir / InstanceFiles::points, instance.points);
  save_hyperplanes(dir / InstanceFiles::truth, instance.truth.hyperplanes);
  {
    std::ofstream out = open_out(dir / InstanceFiles::labels);
    for (int s : instance.truth.source) out << s << '\n';
    if (!out) throw IoError("write error on labels");
  }
  save_instance_meta(dir / InstanceFiles::meta, spec);
}

}  // namespace hyperfit
