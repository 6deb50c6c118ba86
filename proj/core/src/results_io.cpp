#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "dpcp/error.hpp"
#include "dpcp/harness.hpp"

namespace dpcp {

namespace {

const char* const kReportColumns[] = {"estimated_codim", "singular_values", "procrustes_distance", "projection_distance",
                                      "max_principal_angle", "outlier_f1", "precision", "recall"};

std::string escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line, std::size_t row) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (quoted) throw Error(ErrorKind::Parse, "row " + std::to_string(row) + ": unterminated quote");
  cells.push_back(std::move(cur));
  return cells;
}

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

double parse_number(const std::string& s, std::size_t row, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::Parse, "row " + std::to_string(row) + ", column " + column + ": '" + s + "' is not a number");
  }
}

std::optional<double> parse_opt(const std::string& s, std::size_t row, const std::string& column) {
  if (s.empty()) return std::nullopt;
  return parse_number(s, row, column);
}

template <class Get>
std::vector<std::string> union_keys(const ResultTable& table, Get get) {
  std::vector<std::string> keys;
  for (const auto& row : table.rows)
    for (const auto& [k, v] : get(row))
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  return keys;
}

}  // namespace

std::string to_csv(const ResultTable& table) {
  const auto cell_keys = union_keys(table, [](const ResultRow& r) -> const NamedValues& { return r.cell; });
  const auto extra_keys = union_keys(table, [](const ResultRow& r) -> const NamedValues& { return r.extra; });
  std::ostringstream out;
  out << "experiment,method,trial,seed";
  for (const auto& k : cell_keys) out << ",cell." << escape(k);
  for (const char* k : kReportColumns) out << ',' << k;
  for (const auto& k : extra_keys) out << ",extra." << escape(k);
  out << ",wall_time,tag,error\n";
  for (const auto& row : table.rows) {
    out << escape(row.experiment) << ',' << escape(row.method) << ',' << row.trial << ',' << row.seed;
    for (const auto& k : cell_keys) out << ',' << opt_cell(row.cell_value(k));
    const RecoveryReport& r = row.report;
    out << ',' << r.estimated_codim << ',';
    for (Eigen::Index i = 0; i < r.singular_values.size(); ++i) out << (i ? ";" : "") << format_double(r.singular_values(i));
    out << ',' << opt_cell(r.procrustes_distance) << ',' << opt_cell(r.projection_distance) << ','
        << opt_cell(r.max_principal_angle) << ',' << opt_cell(r.outlier_f1) << ',' << opt_cell(r.precision) << ','
        << opt_cell(r.recall);
    for (const auto& k : extra_keys) out << ',' << opt_cell(row.extra_value(k));
    out << ',' << format_double(row.wall_time) << ',' << escape(row.tag) << ',' << escape(row.error) << '\n';
  }
  return out.str();
}

ResultTable table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "results file is empty");
  const auto header = split_csv_line(line, 1);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = i;
  for (const char* required : {"experiment", "method", "trial", "seed", "estimated_codim", "wall_time", "tag", "error"})
    if (!index.count(required)) throw Error(ErrorKind::Parse, std::string("results header lacks column '") + required + "'");

  ResultTable table;
  std::size_t row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line, row_no);
    if (cells.size() != header.size())
      throw Error(ErrorKind::Parse, "row " + std::to_string(row_no) + ": expected " + std::to_string(header.size()) +
                                        " cells, found " + std::to_string(cells.size()));
    auto at = [&](const std::string& name) -> const std::string& { return cells[index.at(name)]; };
    ResultRow row;
    row.experiment = at("experiment");
    row.method = at("method");
    row.trial = static_cast<int>(parse_number(at("trial"), row_no, "trial"));
    {
      const std::string& s = at("seed");
      const auto res = std::from_chars(s.data(), s.data() + s.size(), row.seed);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw Error(ErrorKind::Parse, "row " + std::to_string(row_no) + ", column seed: '" + s + "' is not a seed");
    }
    RecoveryReport& r = row.report;
    r.estimated_codim = static_cast<int>(parse_number(at("estimated_codim"), row_no, "estimated_codim"));
    if (index.count("singular_values") && !at("singular_values").empty()) {
      std::vector<double> sv;
      std::istringstream parts(at("singular_values"));
      std::string part;
      while (std::getline(parts, part, ';')) sv.push_back(parse_number(part, row_no, "singular_values"));
      r.singular_values = Eigen::Map<const Eigen::VectorXd>(sv.data(), static_cast<Eigen::Index>(sv.size()));
    }
    auto report_opt = [&](const char* name) {
      return index.count(name) ? parse_opt(at(name), row_no, name) : std::nullopt;
    };
    r.procrustes_distance = report_opt("procrustes_distance");
    r.projection_distance = report_opt("projection_distance");
    r.max_principal_angle = report_opt("max_principal_angle");
    r.outlier_f1 = report_opt("outlier_f1");
    r.precision = report_opt("precision");
    r.recall = report_opt("recall");
    for (std::size_t i = 0; i < header.size(); ++i) {
      const std::string& name = header[i];
      if (cells[i].empty()) continue;
      if (name.rfind("cell.", 0) == 0) row.cell.emplace_back(name.substr(5), parse_number(cells[i], row_no, name));
      if (name.rfind("extra.", 0) == 0) row.extra.emplace_back(name.substr(6), parse_number(cells[i], row_no, name));
    }
    row.wall_time = parse_number(at("wall_time"), row_no, "wall_time");
    row.tag = at("tag");
    row.error = at("error");
    table.rows.push_back(std::move(row));
  }
  return table;
}

namespace {

nlohmann::json named_to_json(const NamedValues& values) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& [k, v] : values) out.push_back({k, v});
  return out;
}

NamedValues named_from_json(const nlohmann::json& j) {
  NamedValues out;
  for (const auto& item : j) out.emplace_back(item.at(0).get<std::string>(), item.at(1).get<double>());
  return out;
}

}  // namespace

nlohmann::json to_json(const ResultTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) {
    nlohmann::json report = to_json(row.report);
    report.erase("orthonormalized_complement");
    rows.push_back({{"experiment", row.experiment},
                    {"cell", named_to_json(row.cell)},
                    {"method", row.method},
                    {"trial", row.trial},
                    {"seed", row.seed},
                    {"report", std::move(report)},
                    {"extra", named_to_json(row.extra)},
                    {"wall_time", row.wall_time},
                    {"tag", row.tag},
                    {"error", row.error}});
  }
  return {{"rows", std::move(rows)}};
}

ResultTable table_from_json(const nlohmann::json& j) {
  ResultTable table;
  std::size_t i = 0;
  try {
    for (const auto& item : j.at("rows")) {
      ResultRow row;
      row.experiment = item.at("experiment").get<std::string>();
      row.cell = named_from_json(item.at("cell"));
      row.method = item.at("method").get<std::string>();
      row.trial = item.at("trial").get<int>();
      row.seed = item.at("seed").get<Seed>();
      nlohmann::json report = item.at("report");
      report["orthonormalized_complement"] = nlohmann::json::array();
      const int codim = report.at("estimated_codim").get<int>();
      report["estimated_codim"] = 0;
      row.report = recovery_report_from_json(report);
      row.report.estimated_codim = codim;
      row.report.orthonormalized_complement.resize(0, 0);
      row.extra = named_from_json(item.at("extra"));
      row.wall_time = item.at("wall_time").get<double>();
      row.tag = item.at("tag").get<std::string>();
      row.error = item.at("error").get<std::string>();
      table.rows.push_back(std::move(row));
      ++i;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "results row " + std::to_string(i) + ": " + e.what());
  }
  return table;
}

ResultFormat result_format_for(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return ResultFormat::Csv;
  if (ext == ".json") return ResultFormat::Json;
  throw Error(ErrorKind::InvalidConfig, "unknown results format '" + ext + "' (use .csv or .json)");
}

void persist(const ResultTable& table, const std::filesystem::path& path) {
  persist(table, path, result_format_for(path));
}

void persist(const ResultTable& table, const std::filesystem::path& path, ResultFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  if (format == ResultFormat::Csv)
    out << to_csv(table);
  else
    out << to_json(table).dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

ResultTable load_results(const std::filesystem::path& path) {
  const ResultFormat format = result_format_for(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (format == ResultFormat::Csv) return table_from_csv(buf.str());
  try {
    return table_from_json(nlohmann::json::parse(buf.str()));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, path.string() + ": " + e.what());
  }
}

namespace {

std::pair<std::string, std::optional<double>> plot_metric(const ResultRow& row) {
  if (row.experiment == "codim_sweep") return {"exact_fraction", row.extra_value("exact")};
  if (row.experiment == "outlier_pursuit") return {"outlier_f1", row.report.outlier_f1};
  if (row.experiment == "continuous_check") return {"fixed_point_error", row.extra_value("fixed_point_error")};
  return {"projection_distance", row.report.projection_distance};
}

}  // namespace

std::string plotdata_tsv(const ResultTable& table) {
  struct Group {
    const ResultRow* first;
    std::string metric;
    double sum = 0.0;
    int n = 0;
  };
  std::vector<Group> groups;
  for (const auto& row : table.rows) {
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.first->experiment == row.experiment && g.first->cell == row.cell && g.first->method == row.method;
    });
    if (it == groups.end()) {
      groups.push_back({&row, plot_metric(row).first});
      it = std::prev(groups.end());
    }
    if (const auto v = plot_metric(row).second; v && row.error.empty()) {
      it->sum += *v;
      ++it->n;
    }
  }
  std::ostringstream out;
  std::string last_header;
  for (const auto& g : groups) {
    std::string header;
    for (const auto& [k, v] : g.first->cell) header += k + '\t';
    header += "method\tmetric\tmean\tn";
    if (header != last_header) {
      out << '#' << g.first->experiment << '\n' << header << '\n';
      last_header = header;
    }
    for (const auto& [k, v] : g.first->cell) out << format_double(v) << '\t';
    out << g.first->method << '\t' << g.metric << '\t' << (g.n ? format_double(g.sum / g.n) : std::string("nan")) << '\t'
        << g.n << '\n';
  }
  return out.str();
}

void write_plotdata(const ResultTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << plotdata_tsv(table);
  if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
}

}  // namespace dpcp
