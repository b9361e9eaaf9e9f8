#include "sparsesr/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "sparsesr/networks.hpp"
#include "sparsesr/solver.hpp"
#include "sparsesr/verify.hpp"

namespace sparsesr {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

struct Location {
  std::size_t line = 1;
  std::size_t column = 1;
};

Location locate(const std::string& text, std::size_t offset) {
  Location loc;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

std::string where(const std::string& source, const std::string& text, std::size_t offset) {
  const Location loc = locate(text, offset);
  return source + ":" + std::to_string(loc.line) + ":" + std::to_string(loc.column);
}

/// Byte offset of row `row` of the top-level array under `key`, or of the key
/// itself when row < 0. Only used to annotate errors.
std::optional<std::size_t> find_row(const std::string& text, const std::string& key, int row) {
  int depth = 0;
  bool in_string = false;
  std::size_t string_start = 0;
  std::string last_string;
  bool armed = false;      // saw the key at object depth 1
  int matrix_depth = -1;   // depth of the matrix array once entered
  int rows_seen = 0;
  std::optional<std::size_t> key_pos;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
        last_string = text.substr(string_start + 1, i - string_start - 1);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_string = true;
        string_start = i;
        break;
      case ':':
        if (depth == 1 && matrix_depth < 0 && last_string == key) {
          armed = true;
          key_pos = string_start;
          if (row < 0) return key_pos;
        }
        break;
      case '{':
      case '[':
        ++depth;
        if (c == '[' && armed && matrix_depth < 0) {
          matrix_depth = depth;
        } else if (c == '[' && matrix_depth > 0 && depth == matrix_depth + 1) {
          if (rows_seen++ == row) return i;
        }
        break;
      case '}':
      case ']':
        if (matrix_depth > 0 && depth == matrix_depth) return key_pos;
        --depth;
        break;
      default:
        break;
    }
  }
  return key_pos;
}

RealMatrix read_matrix(const json& value, const std::string& name, const std::string& text,
                       const std::string& source) {
  auto fail = [&](int row, const std::string& msg) {
    const auto pos = find_row(text, name, row);
    const std::string at = pos ? where(source, text, *pos) : source;
    throw ParseError(at + ": matrix \"" + name + "\" " + msg);
  };
  if (!value.is_array() || value.empty()) fail(-1, "must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(value.size());
  Eigen::Index cols = -1;
  RealMatrix out;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& r = value[static_cast<std::size_t>(i)];
    const int ri = static_cast<int>(i);
    if (!r.is_array()) fail(ri, "row " + std::to_string(i + 1) + " is not an array");
    const auto len = static_cast<Eigen::Index>(r.size());
    if (cols < 0) {
      if (len == 0) fail(ri, "row 1 is empty");
      cols = len;
      out.resize(rows, cols);
    } else if (len != cols) {
      fail(ri, "row " + std::to_string(i + 1) + " has " + std::to_string(len) +
                   " entries, expected " + std::to_string(cols));
    }
    for (Eigen::Index j = 0; j < len; ++j) {
      const json& e = r[static_cast<std::size_t>(j)];
      if (!e.is_number()) {
        fail(ri, "row " + std::to_string(i + 1) + " entry " + std::to_string(j + 1) +
                     " is not a number");
      }
      out(i, j) = e.get<double>();
    }
  }
  return out;
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    std::string msg = e.what();
    if (const auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ParseError(where(source, text, offset) + ": " + msg);
  }
}


/// Compact rows, one per line.
std::string dump_matrix(const RealMatrix& m, const std::string& indent) {
  std::string s = "[\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += indent + "  [";
    for (Eigen::Index j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + format_number(m(i, j));
    s += i + 1 < m.rows() ? "],\n" : "]\n";
  }
  return s + indent + "]";
}

}  // namespace

ProblemInstance parse_problem(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (!doc.is_object()) throw ParseError(source + ":1:1: problem document must be a JSON object");
  for (const char* key : {"A", "B", "C"}) {
    if (!doc.contains(key)) throw ParseError(source + ": missing matrix \"" + key + "\"");
  }
  const RealMatrix a = read_matrix(doc.at("A"), "A", text, source);
  const RealMatrix b = read_matrix(doc.at("B"), "B", text, source);
  const RealMatrix c = read_matrix(doc.at("C"), "C", text, source);
  RealMatrix s = doc.contains("S") ? read_matrix(doc.at("S"), "S", text, source)
                                   : RealMatrix::Ones(b.cols(), c.rows());
  auto dim_fail = [&](const std::string& name, const std::string& msg) {
    const auto pos = find_row(text, name, -1);
    throw ParseError((pos ? where(source, text, *pos) : source) + ": " + msg);
  };
  if (a.rows() != a.cols()) dim_fail("A", "A must be square");
  if (b.rows() != a.rows()) dim_fail("B", "B must have as many rows as A");
  if (c.cols() != a.rows()) dim_fail("C", "C must have as many columns as A");
  if (s.rows() != b.cols() || s.cols() != c.rows()) {
    dim_fail("S", "S must be " + std::to_string(b.cols()) + "x" + std::to_string(c.rows()));
  }
  try {
    return ProblemInstance(a, b, c, SparsityPattern(std::move(s)));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

ProblemInstance load_problem(const std::filesystem::path& path) {
  return parse_problem(read_text_file(path), path.string());
}

std::string problem_to_json(const ProblemInstance& inst) {
  return "{\n  \"A\": " + dump_matrix(inst.A(), "  ") + ",\n  \"B\": " +
         dump_matrix(inst.B(), "  ") + ",\n  \"C\": " + dump_matrix(inst.C(), "  ") +
         ",\n  \"S\": " + dump_matrix(inst.pattern().mask(), "  ") + "\n}\n";
}

RealMatrix parse_delta(const std::string& text, const std::string& source) {
  const json doc = parse_json(text, source);
  if (doc.is_object()) {
    if (!doc.contains("Delta")) throw ParseError(source + ": missing matrix \"Delta\"");
    return read_matrix(doc.at("Delta"), "Delta", text, source);
  }
  if (!doc.is_array() || doc.empty()) {
    throw ParseError(source + ":1:1: Delta must be an array of rows");
  }
  // A bare array has no key to anchor diagnostics; wrap it so rows resolve.
  const std::string wrapped = "{\"Delta\":" + text + "}";
  return read_matrix(doc, "Delta", wrapped, source);
}

RealMatrix load_delta(const std::filesystem::path& path) {
  return parse_delta(read_text_file(path), path.string());
}

std::string delta_to_json(const RealMatrix& delta) {
  return "{\n  \"Delta\": " + dump_matrix(delta, "  ") + "\n}\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(path.string() + ": cannot write file");
  out << content;
  if (!out) throw Error(path.string() + ": write failed");
}

void write_key_values(std::ostream& os, const KeyValues& kv) {
  for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
}

void write_trace_csv(std::ostream& os, const std::vector<IterationRecord>& trace) {
  os << "iter,cost,grad_norm,omega,alpha,beta,delta_fnorm\n";
  for (const IterationRecord& r : trace) {
    os << r.iter << ',' << format_number(r.cost) << ',' << format_number(r.grad_norm) << ','
       << format_number(r.omega) << ',' << format_number(r.alpha) << ',' << format_number(r.beta)
       << ',' << format_number(r.delta_fnorm) << '\n';
  }
}

void write_cloud_csv(std::ostream& os, const SpectralCloud& cloud) {
  os << "re,im,delta_fnorm\n";
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    os << format_number(cloud.points[i].real()) << ',' << format_number(cloud.points[i].imag())
       << ',' << format_number(cloud.delta_fnorm[i]) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "w,fnorm,omega,E,cost,status\n";
  for (const SweepRow& r : rows) {
    os << format_number(r.w) << ',';
    if (r.result) {
      os << format_number(r.result->fnorm) << ',' << format_number(r.result->omega) << ','
         << format_number(r.result->sparsity_error) << ',' << format_number(r.result->cost)
         << ",ok\n";
    } else {
      os << ",,,,\"" << r.error << "\"\n";
    }
  }
}

std::string format_entries(const std::vector<Entry>& entries) {
  std::string s;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    s += (i ? ";" : "") + std::string("(") + std::to_string(entries[i].row + 1) + "," +
         std::to_string(entries[i].col + 1) + ")";
  }
  return s;
}

void write_ranking_csv(std::ostream& os, const std::vector<PatternResult>& ranking) {
  os << "pattern_entries,sr,omega_hat,perturbation_entries,tie_group\n";
  for (const PatternResult& r : ranking) {
    os << '"' << format_entries(r.entries) << "\",";
    if (r.found()) {
      std::string values;
      for (std::size_t i = 0; i < r.entries.size(); ++i) {
        values += (i ? ";" : "") + format_number(r.delta(r.entries[i].row, r.entries[i].col));
      }
      os << format_number(r.sr) << ',' << format_number(r.omega) << ',' << values;
    } else {
      os << ",,";
    }
    os << ',' << r.tie_group << '\n';
  }
}

void write_results_csv(std::ostream& os, const std::vector<SolveResult>& results) {
  os << "fnorm,fnorm_sparse,omega,E,alpha,alpha_sparse,cost,final_w,columns,valid_local_min,"
        "iterations,termination\n";
  for (const SolveResult& r : results) {
    os << format_number(r.fnorm) << ',' << format_number(r.fnorm_sparse) << ','
       << format_number(r.omega) << ',' << format_number(r.sparsity_error) << ','
       << format_number(r.alpha) << ',' << format_number(r.alpha_sparse) << ','
       << format_number(r.cost) << ',' << format_number(r.final_weight) << ',' << r.columns << ','
       << (r.valid_local_min ? "true" : "false") << ',' << r.iterations << ','
       << to_string(r.termination) << '\n';
  }
}

}  // namespace sparsesr
