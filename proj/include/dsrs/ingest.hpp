#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dsrs/feature_matrix.hpp"

namespace dsrs {

/// One journal-year row of bibliometric indicators. A missing indicator is
/// simply absent from the map, which keeps missingness distinct from zero.
struct JournalRecord {
    std::string title;
    std::optional<int> year;
    std::optional<int> quarter;  // ordinal 1..4
    std::map<std::string, double> indicators;
    std::optional<double> sjr_score;

    bool operator==(const JournalRecord&) const = default;
};

/// Ordered collection of records plus the canonical column layout of the
/// source table. Record order is preserved from the input file.
struct Dataset {
    std::vector<JournalRecord> records;
    std::string source_label;
    std::string category;
    std::vector<std::string> columns;  // canonical names, file order

    bool operator==(const Dataset&) const = default;
};

struct ParseOptions {
    char delimiter = '\0';  // '\0' selects auto-detection (';' vs ',')
    std::string source_label;
    std::string category;
    /// Column to derive the quarter from. Empty means auto: an explicit
    /// "Quarter" column first, then a quartile column ("Q1".."Q4").
    std::string quarter_column;
    /// Canonical columns that must be present in the header.
    std::vector<std::string> required_columns;
};

/// The 13 canonical indicator names, in canonical order.
const std::vector<std::string>& canonical_indicators();

/// True for count-valued indicators, which must be non-negative.
bool is_count_indicator(std::string_view canonical_name);

/// Canonical name for a raw header cell, or empty if the header is not a
/// recognized alias. Recognizes the schema columns ("Title", "Year",
/// "Quarter", "SJR") as well as the indicator aliases.
std::string canonical_column_name(std::string_view header);

/// Parse a delimited indicator table (semicolon or comma separated, RFC
/// 4180 quoting). Numeric cells may use decimal commas; the cells "", "-",
/// "--", "---" and whitespace-only cells are recorded as missing. Unknown
/// numeric columns are kept as extra indicators under their literal header
/// name; unknown text columns are ignored.
Dataset parse_table(std::string_view raw, const ParseOptions& options = {});

/// Serialize a Dataset back to delimited text; parse_table(write_table(d))
/// reproduces d exactly, including missingness.
std::string write_table(const Dataset& dataset, char delimiter = ';');

/// Relative frequency of each quarter (Q_i / sum Q_i), keyed 1..4. Every
/// record must carry a quarter.
std::map<int, double> quarter_probabilities(const Dataset& dataset);

/// Fraction of records in which the named feature is missing. The
/// pseudo-feature "Quarter" and the response "SJR" are understood.
double missing_fraction(const Dataset& dataset, const std::string& feature);

/// Names of the indicator columns whose missing fraction is at most
/// max_missing_fraction, in canonical order (canonical indicators first,
/// then extra columns in file order).
std::vector<std::string> sparsity_filter(const Dataset& dataset, double max_missing_fraction);

struct BuildMatrixResult {
    FeatureMatrix matrix;
    std::size_t dropped_rows = 0;  // rows lost to complete-case deletion
};

/// Assemble the predictor matrix for the chosen features and response under
/// complete-case deletion: any row missing one of the chosen values is
/// dropped. "Quarter" draws from the quarter field; "SJR" from the
/// response field; all other names from the indicator map.
BuildMatrixResult build_matrix(const Dataset& dataset,
                               const std::vector<std::string>& features,
                               const std::string& response);

}  // namespace dsrs
