#include "scsim/core/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "scsim/error.hpp"

namespace scsim {
namespace {

using json = nlohmann::json;

struct RawRow {
  std::size_t line = 0;
  std::map<std::string, std::string> cells;
};

bool looks_like_json(std::string_view text) {
  auto pos = text.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
  return pos != std::string_view::npos && text[pos] == '[';
}

std::string json_cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return format_double(v.get<double>());
  if (v.is_null()) return "";
  return v.dump();
}

std::vector<RawRow> rows_from_text(std::string_view text, std::vector<std::string>& header) {
  std::vector<RawRow> out;
  if (looks_like_json(text)) {
    json arr;
    try {
      arr = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(Errc::ParseError, std::string("line 1: ") + e.what());
    }
    std::size_t line = 0;
    for (const auto& obj : arr) {
      ++line;
      if (!obj.is_object()) throw Error(Errc::ParseError, "line " + std::to_string(line) + ": expected object");
      RawRow row{line, {}};
      for (const auto& [k, v] : obj.items()) {
        if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
        row.cells[k] = json_cell(v);
      }
      out.push_back(std::move(row));
    }
    return out;
  }
  auto csv = parse_csv(text);
  if (csv.empty()) return out;
  header = csv.front().fields;
  for (std::size_t i = 1; i < csv.size(); ++i) {
    const auto& r = csv[i];
    if (r.fields.size() == 1 && r.fields[0].empty()) continue;
    if (r.fields.size() != header.size()) {
      throw Error(Errc::ParseError, "line " + std::to_string(r.line) + ": expected " +
                                        std::to_string(header.size()) + " fields, got " +
                                        std::to_string(r.fields.size()));
    }
    RawRow row{r.line, {}};
    for (std::size_t k = 0; k < header.size(); ++k) row.cells[header[k]] = r.fields[k];
    out.push_back(std::move(row));
  }
  return out;
}

std::optional<long long> parse_int(std::string_view s) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::string err_line(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

std::string cell_or_empty(const RawRow& row, const std::string& key) {
  auto it = row.cells.find(key);
  return it == row.cells.end() ? std::string{} : it->second;
}

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  CsvRow row;
  std::string field;
  std::size_t line = 1;
  row.line = 1;
  bool inQuotes = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (inQuotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          inQuotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"': inQuotes = true; break;
      case ',':
        row.fields.push_back(std::move(field));
        field.clear();
        break;
      case '\r': break;
      case '\n':
        row.fields.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row = CsvRow{};
        row.line = ++line;
        any = false;
        break;
      default: field.push_back(c);
    }
  }
  if (inQuotes) throw Error(Errc::ParseError, err_line(row.line, "unterminated quoted field"));
  if (any) {
    row.fields.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Dataset parse_dataset(std::string_view companiesText, std::string_view edgesText,
                      std::string_view knowledgeText) {
  Dataset ds;
  ds.globalKnowledge = std::string(knowledgeText);

  std::vector<std::string> header;
  auto rows = rows_from_text(companiesText, header);

  // Feature columns are `<feature>@<t>`; split at the last '@'.
  std::vector<std::string> tokens;
  std::map<std::pair<std::string, std::string>, std::string> columnOf;
  for (const auto& col : header) {
    auto at = col.rfind('@');
    if (at == std::string::npos || at == 0 || at + 1 == col.size()) continue;
    auto feat = col.substr(0, at);
    auto tok = col.substr(at + 1);
    if (std::find(ds.featureNames.begin(), ds.featureNames.end(), feat) == ds.featureNames.end()) {
      ds.featureNames.push_back(feat);
    }
    if (std::find(tokens.begin(), tokens.end(), tok) == tokens.end()) tokens.push_back(tok);
    columnOf[{feat, tok}] = col;
  }
  if (std::find(header.begin(), header.end(), "id") == header.end() ||
      std::find(header.begin(), header.end(), "industry") == header.end()) {
    throw Error(Errc::ParseError, err_line(1, "companies file needs id and industry columns"));
  }
  if (ds.featureNames.empty()) throw Error(Errc::ParseError, err_line(1, "no <feature>@<t> columns"));

  const bool numeric = std::all_of(tokens.begin(), tokens.end(),
                                   [](const std::string& t) { return parse_int(t).has_value(); });
  if (numeric) {
    std::sort(tokens.begin(), tokens.end(),
              [](const std::string& a, const std::string& b) { return *parse_int(a) < *parse_int(b); });
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (*parse_int(tokens[i]) != static_cast<long long>(i)) {
        throw Error(Errc::ParseError, err_line(1, "timestamp indices must be contiguous from 0"));
      }
    }
  }
  ds.timestampLabels = tokens;
  for (const auto& f : ds.featureNames) {
    for (const auto& t : tokens) {
      if (!columnOf.contains({f, t})) throw Error(Errc::ParseError, err_line(1, "missing column " + f + "@" + t));
    }
  }

  const auto T = static_cast<Eigen::Index>(tokens.size());
  const auto F = static_cast<Eigen::Index>(ds.featureNames.size());
  for (const auto& row : rows) {
    CompanyRecord rec;
    rec.id = CompanyId(cell_or_empty(row, "id"));
    rec.industry = cell_or_empty(row, "industry");
    rec.knowledge = cell_or_empty(row, "knowledge");
    if (rec.id.empty()) throw Error(Errc::ParseError, err_line(row.line, "empty id"));
    if (rec.industry.empty()) throw Error(Errc::ParseError, err_line(row.line, "empty industry"));
    rec.features.resize(T, F);
    for (Eigen::Index t = 0; t < T; ++t) {
      for (Eigen::Index k = 0; k < F; ++k) {
        const auto& col = columnOf.at({ds.featureNames[static_cast<std::size_t>(k)],
                                       tokens[static_cast<std::size_t>(t)]});
        auto v = parse_double(cell_or_empty(row, col));
        if (!v || !std::isfinite(*v)) {
          throw Error(Errc::ParseError, err_line(row.line, "non-numeric value in " + col));
        }
        if (*v < 0.0 || *v > 100.0) {
          throw Error(Errc::FeatureOutOfRange, err_line(row.line, col + " = " + format_double(*v)));
        }
        rec.features(t, k) = *v;
      }
    }
    ds.companies.push_back(std::move(rec));
  }
  std::sort(ds.companies.begin(), ds.companies.end(),
            [](const CompanyRecord& a, const CompanyRecord& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < ds.companies.size(); ++i) {
    if (ds.companies[i - 1].id == ds.companies[i].id) {
      throw Error(Errc::ParseError, "duplicate company id " + ds.companies[i].id.str());
    }
  }

  std::map<std::string, int> tokenIndex;
  for (std::size_t i = 0; i < tokens.size(); ++i) tokenIndex[tokens[i]] = static_cast<int>(i);
  std::vector<EdgeSet> edges(tokens.size());

  std::vector<std::string> edgeHeader;
  std::vector<RawRow> edgeRows;
  if (looks_like_json(edgesText)) {
    edgeRows = rows_from_text(edgesText, edgeHeader);
  } else {
    for (auto& r : parse_csv(edgesText)) {
      if (r.fields.size() == 1 && r.fields[0].empty()) continue;
      if (r.fields.size() != 3) {
        throw Error(Errc::ParseError, err_line(r.line, "edge rows need supplier_id,customer_id,t"));
      }
      if (r.line == 1 && r.fields[0] == "supplier_id") continue;
      edgeRows.push_back(RawRow{r.line, {{"supplier_id", r.fields[0]}, {"customer_id", r.fields[1]}, {"t", r.fields[2]}}});
    }
  }
  for (const auto& row : edgeRows) {
    Edge e{CompanyId(cell_or_empty(row, "supplier_id")), CompanyId(cell_or_empty(row, "customer_id"))};
    auto tok = cell_or_empty(row, "t");
    auto ti = tokenIndex.find(tok);
    if (ti == tokenIndex.end()) throw Error(Errc::ParseError, err_line(row.line, "unknown timestamp '" + tok + "'"));
    if (e.supplier == e.customer) throw Error(Errc::SelfEdge, err_line(row.line, e.supplier.str()));
    if (!ds.find(e.supplier) || !ds.find(e.customer)) {
      throw Error(Errc::UnknownCompanyInEdge, err_line(row.line, e.supplier.str() + "->" + e.customer.str()));
    }
    if (!edges[static_cast<std::size_t>(ti->second)].insert(e).second) {
      throw Error(Errc::DuplicateEdge,
                  err_line(row.line, e.supplier.str() + "->" + e.customer.str() + " at " + tok));
    }
  }
  for (auto& es : edges) ds.network.push_back(make_snapshot(std::move(es)));
  validate(ds);
  return ds;
}

Dataset load_dataset(const std::filesystem::path& companiesFile, const std::filesystem::path& edgesFile,
                     const std::filesystem::path& knowledgeFile) {
  auto companies = read_text_file(companiesFile);
  auto edges = read_text_file(edgesFile);
  auto knowledge = read_text_file(knowledgeFile);
  return parse_dataset(companies, edges, knowledge);
}

std::string companies_csv(const Dataset& ds) {
  std::ostringstream out;
  out << "id,industry,knowledge";
  for (const auto& t : ds.timestampLabels) {
    for (const auto& f : ds.featureNames) out << ',' << csv_escape(f + "@" + t);
  }
  out << '\n';
  for (const auto& c : ds.companies) {
    out << csv_escape(c.id.str()) << ',' << csv_escape(c.industry) << ',' << csv_escape(c.knowledge);
    for (Eigen::Index t = 0; t < c.features.rows(); ++t) {
      for (Eigen::Index k = 0; k < c.features.cols(); ++k) out << ',' << format_double(c.features(t, k));
    }
    out << '\n';
  }
  return out.str();
}

std::string edges_csv(const Dataset& ds) {
  std::ostringstream out;
  out << "supplier_id,customer_id,t\n";
  for (std::size_t t = 0; t < ds.network.size(); ++t) {
    for (const auto& e : *ds.network.snapshots()[t]) {
      out << csv_escape(e.supplier.str()) << ',' << csv_escape(e.customer.str()) << ','
          << csv_escape(ds.timestampLabels[t]) << '\n';
    }
  }
  return out.str();
}

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(Errc::MissingFile, (dir / name).string());
    out << body;
  };
  write("companies.csv", companies_csv(ds));
  write("edges.csv", edges_csv(ds));
  write("knowledge.txt", ds.globalKnowledge);
}

nlohmann::json dataset_to_json(const Dataset& ds) {
  json j;
  j["featureNames"] = ds.featureNames;
  j["timestampLabels"] = ds.timestampLabels;
  j["globalKnowledge"] = ds.globalKnowledge;
  json companies = json::array();
  for (const auto& c : ds.companies) {
    json rows = json::array();
    for (Eigen::Index t = 0; t < c.features.rows(); ++t) {
      json r = json::array();
      for (Eigen::Index k = 0; k < c.features.cols(); ++k) r.push_back(c.features(t, k));
      rows.push_back(std::move(r));
    }
    companies.push_back({{"id", c.id.str()}, {"industry", c.industry}, {"knowledge", c.knowledge}, {"features", rows}});
  }
  j["companies"] = std::move(companies);
  json network = json::array();
  for (const auto& snap : ds.network.snapshots()) {
    json es = json::array();
    for (const auto& e : *snap) es.push_back({e.supplier.str(), e.customer.str()});
    network.push_back(std::move(es));
  }
  j["network"] = std::move(network);
  return j;
}

Dataset dataset_from_json(const nlohmann::json& j) {
  Dataset ds;
  try {
    ds.featureNames = j.at("featureNames").get<std::vector<std::string>>();
    ds.timestampLabels = j.at("timestampLabels").get<std::vector<std::string>>();
    ds.globalKnowledge = j.at("globalKnowledge").get<std::string>();
    for (const auto& c : j.at("companies")) {
      CompanyRecord rec;
      rec.id = CompanyId(c.at("id").get<std::string>());
      rec.industry = c.at("industry").get<std::string>();
      rec.knowledge = c.at("knowledge").get<std::string>();
      const auto& rows = c.at("features");
      rec.features.resize(static_cast<Eigen::Index>(rows.size()),
                          static_cast<Eigen::Index>(ds.featureNames.size()));
      for (std::size_t t = 0; t < rows.size(); ++t) {
        for (std::size_t k = 0; k < ds.featureNames.size(); ++k) {
          rec.features(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = rows[t].at(k).get<double>();
        }
      }
      ds.companies.push_back(std::move(rec));
    }
    for (const auto& snap : j.at("network")) {
      EdgeSet es;
      for (const auto& e : snap) {
        es.insert(Edge{CompanyId(e.at(0).get<std::string>()), CompanyId(e.at(1).get<std::string>())});
      }
      ds.network.push_back(make_snapshot(std::move(es)));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("dataset json: ") + e.what());
  }
  validate(ds);
  return ds;
}

}  // namespace scsim
