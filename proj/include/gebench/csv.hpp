#pragma once

// CSV in and out. Output follows RFC 4180 (CRLF records, quoted fields when
// needed) with numbers printed as %.9g, so a fixed run always yields the same
// bytes.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gebench/model_identification.hpp"
#include "gebench/simulation.hpp"

namespace gebench {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  void row(std::initializer_list<std::string_view> fields) {
    bool first = true;
    for (auto f : fields) {
      if (!first) os_ << ',';
      os_ << csv_field(f);
      first = false;
    }
    os_ << "\r\n";
  }

  void numbers(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) os_ << ',';
      os_ << format_number(values[i]);
    }
    os_ << "\r\n";
  }

 private:
  std::ostream& os_;
};

inline void emit_csv(const TrajectoryRecord& rec, std::ostream& os) {
  CsvWriter w(os);
  w.row({"t", "z", "theta", "z_dot", "theta_dot", "omega1", "omega2", "f1", "f2", "i1", "i2",
         "z_hat", "theta_hat", "e_z", "e_theta", "k", "eta"});
  for (const auto& r : rec.rows) {
    w.numbers({r.t, r.z, r.theta, r.z_dot, r.theta_dot, r.omega1, r.omega2, r.f1, r.f2, r.i1,
               r.i2, r.z_hat, r.theta_hat, r.e_z, r.e_theta, r.k, r.eta});
  }
}

inline void emit_csv(const SweepReport& rep, std::ostream& os) {
  CsvWriter w(os);
  w.row({"case", "c_a_scale", "c_b_scale", "altitude_error_m", "altitude_rmsd_m",
         "pitch_error_rad", "pitch_rmsd_rad"});
  for (std::size_t i = 0; i < rep.cases.size(); ++i) {
    const auto& c = rep.cases[i];
    const std::string idx = std::to_string(i);
    const auto a = format_number(c.scaling.c_a), b = format_number(c.scaling.c_b);
    const auto e = format_number(c.altitude.signed_max), er = format_number(c.altitude.rmsd);
    const auto p = format_number(c.pitch.signed_max), pr = format_number(c.pitch.rmsd);
    w.row({idx, a, b, e, er, p, pr});
  }
}

template <typename T>
void emit_csv(const T& value, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing: " + std::strerror(errno));
  emit_csv(value, os);
  os.flush();
  if (!os) throw IoError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Reading

/// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF.
inline std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw IoError("unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline double parse_double(const std::string& s, const std::string& where) {
  const char* b = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(b, &end);
  while (end && (*end == ' ' || *end == '\t')) ++end;
  if (end == b || *end != '\0' || errno == ERANGE) {
    throw IoError(where + ": not a number: '" + s + "'");
  }
  return v;
}

/// Table with a header row; columns looked up by name.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name, const std::string& source) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw IoError(source + ": missing column '" + std::string(name) + "'");
  }
};

inline CsvTable read_csv_table(const std::filesystem::path& path) {
  auto rows = parse_csv(read_text(path));
  if (rows.empty()) throw IoError(path.string() + ": empty file");
  CsvTable t;
  t.header = std::move(rows.front());
  for (auto& h : t.header) {
    while (!h.empty() && (h.back() == ' ')) h.pop_back();
    while (!h.empty() && (h.front() == ' ')) h.erase(h.begin());
  }
  t.rows.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
  return t;
}

inline std::vector<double> numeric_column(const CsvTable& t, std::string_view name,
                                          const std::string& source) {
  const auto c = t.column(name, source);
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = source + ":" + std::to_string(r + 2);
    if (c >= t.rows[r].size()) throw IoError(where + ": too few fields");
    out.push_back(parse_double(t.rows[r][c], where));
  }
  return out;
}

/// Sample rate implied by a uniformly sampled time column.
inline double uniform_rate(const std::vector<double>& t, const std::string& source) {
  if (t.size() < 2) throw IoError(source + ": need at least two samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) throw IoError(source + ": time column must increase");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - dt) > 1e-3 * dt) {
      throw IoError(source + ":" + std::to_string(i + 2) + ": non-uniform sampling");
    }
  }
  return 1.0 / dt;
}

/// Current log with columns t_s, i_a.
inline CurrentTrace read_current_log(const std::filesystem::path& path, double altitude) {
  const auto t = read_csv_table(path);
  const std::string src = path.string();
  CurrentTrace tr;
  const auto time = numeric_column(t, "t_s", src);
  tr.samples = numeric_column(t, "i_a", src);
  tr.sample_rate = uniform_rate(time, src);
  tr.altitude = altitude;
  return tr;
}

/// Manifest with columns file, altitude_m; relative paths resolve against
/// the manifest's directory.
inline std::vector<CurrentTrace> read_manifest(const std::filesystem::path& manifest) {
  const auto t = read_csv_table(manifest);
  const std::string src = manifest.string();
  const auto fc = t.column("file", src);
  const auto z = numeric_column(t, "altitude_m", src);
  std::vector<CurrentTrace> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::filesystem::path p = t.rows[r].at(fc);
    if (p.is_relative()) p = manifest.parent_path() / p;
    out.push_back(read_current_log(p, z[r]));
  }
  return out;
}

struct DualCurrentSample {
  double t = 0.0;
  double i1 = 0.0;
  double i2 = 0.0;
};

/// Two-motor current log with columns t_s, i1_a, i2_a.
inline std::vector<DualCurrentSample> read_dual_current_log(const std::filesystem::path& path) {
  const auto t = read_csv_table(path);
  const std::string src = path.string();
  const auto time = numeric_column(t, "t_s", src);
  const auto i1 = numeric_column(t, "i1_a", src);
  const auto i2 = numeric_column(t, "i2_a", src);
  std::vector<DualCurrentSample> out(time.size());
  for (std::size_t n = 0; n < time.size(); ++n) out[n] = {time[n], i1[n], i2[n]};
  return out;
}

}  // namespace gebench
