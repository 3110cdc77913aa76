#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scsim/core/dataset.hpp"

namespace scsim {

/// Companies file (CSV or JSON array of flat objects): id, industry, knowledge,
/// then `<feature>@<t>` columns. Extra columns are ignored. Timestamp tokens that
/// are all integers must cover 0..T-1; otherwise tokens are labels ordered by
/// first appearance. Edges file rows: supplier_id, customer_id, t.
/// Knowledge file: plain UTF-8 text.
///
/// Errors: MissingFile, ParseError (message carries the line), UnknownCompanyInEdge,
/// FeatureOutOfRange, DuplicateEdge, SelfEdge.
Dataset load_dataset(const std::filesystem::path& companiesFile,
                     const std::filesystem::path& edgesFile,
                     const std::filesystem::path& knowledgeFile);

/// Same as load_dataset but over in-memory contents. JSON is detected by a
/// leading '[' after whitespace.
Dataset parse_dataset(std::string_view companiesText, std::string_view edgesText,
                      std::string_view knowledgeText);

/// Writes companies.csv, edges.csv and knowledge.txt under `dir`.
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);

std::string companies_csv(const Dataset& ds);
std::string edges_csv(const Dataset& ds);

nlohmann::json dataset_to_json(const Dataset& ds);
Dataset dataset_from_json(const nlohmann::json& j);

/// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF.
/// Each row carries the 1-based line number it started on.
struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};
std::vector<CsvRow> parse_csv(std::string_view text);
std::string csv_escape(std::string_view field);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace scsim
