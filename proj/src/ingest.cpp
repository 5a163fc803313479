#include "dsrs/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string>
#include <unordered_map>

#include "dsrs/errors.hpp"

namespace dsrs {

namespace {

constexpr const char* kTitle = "Title";
constexpr const char* kYear = "Year";
constexpr const char* kQuarter = "Quarter";
constexpr const char* kSjr = "SJR";
// Internal marker for a quartile-valued column used as the quarter source.
constexpr const char* kQuartileSource = "\x01quartile";

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// Header matching is forgiving: case, dots, dashes and spacing vary across
// exports of the same table.
std::string normalize_header(std::string_view raw) {
    std::string s;
    s.reserve(raw.size());
    for (char c : raw) {
        if (c == '.') continue;
        if (c == '-') c = ' ';
        s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    // collapse whitespace runs, drop spaces around '/'
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!out.empty() && out.back() != ' ' && out.back() != '/') out.push_back(' ');
        } else if (c == '/') {
            if (!out.empty() && out.back() == ' ') out.pop_back();
            out.push_back('/');
        } else {
            out.push_back(c);
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

const std::unordered_map<std::string, std::string>& header_aliases() {
    static const std::unordered_map<std::string, std::string> aliases = {
        {"title", kTitle},
        {"year", kYear},
        {"quarter", kQuarter},
        {"sjr", kSjr},
        {"sjr score", kSjr},
        {"sjr best quartile", kQuartileSource},
        {"best quartile", kQuartileSource},
        {"sjr quartile", kQuartileSource},
        {"quartile", kQuartileSource},
        {"total documents", "Total Documents"},
        {"total docs", "Total Documents"},
        {"total docs (current year)", "Total Documents"},
        {"total documents (current year)", "Total Documents"},
        {"total docs 3yr", "Total Docs 3yr"},
        {"total docs (3years)", "Total Docs 3yr"},
        {"total docs (3 years)", "Total Docs 3yr"},
        {"total documents (3years)", "Total Docs 3yr"},
        {"total references", "Total References"},
        {"total refs", "Total References"},
        {"total ref", "Total References"},
        {"total cites 3yr", "Total Cites 3yr"},
        {"total cites (3years)", "Total Cites 3yr"},
        {"total cites (3 years)", "Total Cites 3yr"},
        {"h index", "H-Index"},
        {"hindex", "H-Index"},
        {"citable docs 3yr", "Citable Docs 3yr"},
        {"citable docs (3years)", "Citable Docs 3yr"},
        {"citable docs (3 years)", "Citable Docs 3yr"},
        {"citable documents (3years)", "Citable Docs 3yr"},
        {"cites/doc 4yr", "Cites/Doc 4yr"},
        {"cites/doc (4years)", "Cites/Doc 4yr"},
        {"cites/doc (4 years)", "Cites/Doc 4yr"},
        {"cites/doc 3yr", "Cites/Doc 3yr"},
        {"cites/doc (3years)", "Cites/Doc 3yr"},
        {"cites/doc (3 years)", "Cites/Doc 3yr"},
        {"cites/doc 2yr", "Cites/Doc 2yr"},
        {"cites/doc (2years)", "Cites/Doc 2yr"},
        {"cites/doc (2 years)", "Cites/Doc 2yr"},
        {"references/doc", "References/Doc"},
        {"ref/doc", "References/Doc"},
        {"refs/doc", "References/Doc"},
        {"%international collaboration", "%International Collaboration"},
        {"% international collaboration", "%International Collaboration"},
        {"international collaboration", "%International Collaboration"},
    };
    return aliases;
}

bool looks_like_year_tag(std::string_view s) {
    // "(2012)" and friends
    if (s.size() != 6 || s.front() != '(' || s.back() != ')') return false;
    return std::all_of(s.begin() + 1, s.end() - 1,
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

bool is_missing_marker(const std::string& trimmed) {
    return trimmed.empty() || trimmed == "-" || trimmed == "--" || trimmed == "---";
}

struct RawTable {
    std::vector<std::vector<std::string>> rows;  // includes the header row
};

char detect_delimiter(std::string_view raw) {
    bool in_quotes = false;
    for (char c : raw) {
        if (c == '"') in_quotes = !in_quotes;
        if (in_quotes) continue;
        if (c == '\n') break;
        if (c == ';') return ';';
    }
    return ',';
}

// RFC-4180 style tokenizer: double-quoted cells may contain the delimiter,
// quotes escaped by doubling. Lines end at \n or \r\n.
RawTable tokenize(std::string_view raw, char delimiter) {
    RawTable table;
    std::vector<std::string> row;
    std::string cell;
    bool in_quotes = false;
    bool row_has_content = false;

    auto end_cell = [&]() {
        row.push_back(cell);
        cell.clear();
    };
    auto end_row = [&]() {
        end_cell();
        const bool empty_line = row.size() == 1 && trim(row[0]).empty();
        if (!empty_line || row_has_content) table.rows.push_back(row);
        row.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < raw.size(); ++i) {
        const char c = raw[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < raw.size() && raw[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cell.push_back(c);
            }
            continue;
        }
        if (c == '"') {
            in_quotes = true;
            row_has_content = true;
        } else if (c == delimiter) {
            end_cell();
            row_has_content = true;
        } else if (c == '\n') {
            if (!cell.empty() && cell.back() == '\r') cell.pop_back();
            end_row();
        } else {
            cell.push_back(c);
        }
    }
    if (!cell.empty() || !row.empty()) end_row();
    return table;
}

double parse_real(const std::string& trimmed, std::size_t row, std::size_t col,
                  const std::string& column_name) {
    std::string text = trimmed;
    const auto commas = std::count(text.begin(), text.end(), ',');
    const bool has_period = text.find('.') != std::string::npos;
    if (commas == 1 && !has_period) {
        text[text.find(',')] = '.';  // decimal comma
    }
    const char* begin = text.c_str();
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || !std::isfinite(value))
        throw ParseError("non-numeric cell '" + trimmed + "' in column '" + column_name + "'",
                         row, col);
    return value;
}

int parse_quarter(const std::string& trimmed, std::size_t row, std::size_t col) {
    std::string text = trimmed;
    if (text.size() == 2 && (text[0] == 'Q' || text[0] == 'q')) text.erase(0, 1);
    int value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || value < 1 || value > 4)
        throw ParseError("invalid quarter '" + trimmed + "' (expected 1..4 or Q1..Q4)",
                         row, col);
    return value;
}

int parse_year(const std::string& trimmed, std::size_t row, std::size_t col) {
    int value = 0;
    const auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
    if (ec != std::errc{} || ptr != trimmed.data() + trimmed.size())
        throw ParseError("invalid year '" + trimmed + "'", row, col);
    return value;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string quote_if_needed(const std::string& s, char delimiter) {
    if (s.find(delimiter) == std::string::npos && s.find('"') == std::string::npos &&
        s.find('\n') == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

enum class ColumnKind { Title, Year, Quarter, Sjr, Indicator, Ignored };

struct ColumnPlan {
    ColumnKind kind = ColumnKind::Ignored;
    std::string name;  // canonical indicator name or literal header
};

}  // namespace

const std::vector<std::string>& canonical_indicators() {
    static const std::vector<std::string> names = {
        "Total Documents",
        "Total Docs 3yr",
        "Total References",
        "Total Cites 3yr",
        "H-Index",
        "Citable Docs 3yr",
        "Cites/Doc 4yr",
        "Cites/Doc 3yr",
        "Cites/Doc 2yr",
        "References/Doc",
        "Cited Docs",
        "Uncited Docs",
        "%International Collaboration",
    };
    return names;
}

bool is_count_indicator(std::string_view canonical_name) {
    static const std::vector<std::string> counts = {
        "Total Documents", "Total Docs 3yr",   "Total References", "Total Cites 3yr",
        "H-Index",         "Citable Docs 3yr", "Cited Docs",       "Uncited Docs",
    };
    return std::find(counts.begin(), counts.end(), canonical_name) != counts.end();
}

std::string canonical_column_name(std::string_view header) {
    std::string norm = normalize_header(header);
    const auto& aliases = header_aliases();
    if (const auto it = aliases.find(norm); it != aliases.end()) {
        return it->second == kQuartileSource ? kQuarter : it->second;
    }
    // "total docs (2012)": any parenthesized year means the current-year count
    if (norm.rfind("total docs (", 0) == 0 || norm.rfind("total documents (", 0) == 0) {
        const auto open = norm.find('(');
        if (looks_like_year_tag(std::string_view(norm).substr(open))) return "Total Documents";
    }
    return {};
}

Dataset parse_table(std::string_view raw, const ParseOptions& options) {
    // strip a UTF-8 BOM if present
    if (raw.size() >= 3 && raw.substr(0, 3) == "\xEF\xBB\xBF") raw.remove_prefix(3);

    Dataset dataset;
    dataset.source_label = options.source_label;
    dataset.category = options.category;
    if (trim(raw).empty()) return dataset;

    const char delimiter = options.delimiter ? options.delimiter : detect_delimiter(raw);
    const RawTable table = tokenize(raw, delimiter);
    if (table.rows.empty()) return dataset;

    const std::vector<std::string>& header = table.rows.front();
    const std::size_t ncols = header.size();

    // Resolve the quarter source: explicit option, else a "Quarter" column,
    // else a quartile column.
    std::optional<std::size_t> quarter_col;
    const std::string wanted_quarter = normalize_header(options.quarter_column);

    std::vector<ColumnPlan> plan(ncols);
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t c = 0; c < ncols; ++c) {
        const std::string literal = trim(header[c]);
        const std::string norm = normalize_header(literal);
        std::string canonical;
        bool is_quartile_source = false;
        if (const auto it = header_aliases().find(norm); it != header_aliases().end()) {
            canonical = it->second;
            if (canonical == kQuartileSource) {
                canonical = kQuarter;
                is_quartile_source = true;
            }
        } else {
            canonical = canonical_column_name(literal);
        }
        if (!wanted_quarter.empty() && (norm == wanted_quarter || canonical == options.quarter_column)) {
            canonical = kQuarter;
            is_quartile_source = true;
        }
        (void)is_quartile_source;

        if (!canonical.empty()) {
            if (const auto dup = seen.find(canonical); dup != seen.end())
                throw ParseError("duplicate column '" + canonical + "'", 1, c + 1);
            seen.emplace(canonical, c);
            if (canonical == kTitle) plan[c] = {ColumnKind::Title, kTitle};
            else if (canonical == kYear) plan[c] = {ColumnKind::Year, kYear};
            else if (canonical == kQuarter) {
                plan[c] = {ColumnKind::Quarter, kQuarter};
                quarter_col = c;
            } else if (canonical == kSjr) plan[c] = {ColumnKind::Sjr, kSjr};
            else plan[c] = {ColumnKind::Indicator, canonical};
        } else {
            // Unknown column: numeric if its first non-missing cell parses
            // as a real, otherwise ignored as text metadata.
            bool numeric = true;
            for (std::size_t r = 1; r < table.rows.size(); ++r) {
                if (c >= table.rows[r].size()) continue;
                const std::string cell = trim(table.rows[r][c]);
                if (is_missing_marker(cell)) continue;
                std::string text = cell;
                const auto commas = std::count(text.begin(), text.end(), ',');
                if (commas == 1 && text.find('.') == std::string::npos)
                    text[text.find(',')] = '.';
                char* end = nullptr;
                std::strtod(text.c_str(), &end);
                numeric = (end != text.c_str() && *end == '\0');
                break;
            }
            if (literal.empty()) numeric = false;
            plan[c] = numeric ? ColumnPlan{ColumnKind::Indicator, literal}
                              : ColumnPlan{ColumnKind::Ignored, literal};
            if (numeric) {
                if (const auto dup = seen.find(literal); dup != seen.end())
                    throw ParseError("duplicate column '" + literal + "'", 1, c + 1);
                seen.emplace(literal, c);
            }
        }
    }

    if (!wanted_quarter.empty() && !quarter_col)
        throw ParseError("quarter column '" + options.quarter_column + "' not found in header",
                         1, 0);

    for (std::size_t c = 0; c < ncols; ++c)
        if (plan[c].kind != ColumnKind::Ignored) dataset.columns.push_back(plan[c].name);

    for (const std::string& required : options.required_columns) {
        if (std::find(dataset.columns.begin(), dataset.columns.end(), required) ==
            dataset.columns.end())
            throw ParseError("missing required column '" + required + "'", 1, 0);
    }

    for (std::size_t r = 1; r < table.rows.size(); ++r) {
        const auto& cells = table.rows[r];
        if (cells.size() != ncols)
            throw ParseError("row has " + std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(ncols),
                             r + 1, cells.size());
        JournalRecord record;
        for (std::size_t c = 0; c < ncols; ++c) {
            const std::string cell = trim(cells[c]);
            const auto& col = plan[c];
            switch (col.kind) {
                case ColumnKind::Ignored:
                    break;
                case ColumnKind::Title:
                    record.title = cell;
                    break;
                case ColumnKind::Year:
                    if (!is_missing_marker(cell)) record.year = parse_year(cell, r + 1, c + 1);
                    break;
                case ColumnKind::Quarter:
                    if (!is_missing_marker(cell))
                        record.quarter = parse_quarter(cell, r + 1, c + 1);
                    break;
                case ColumnKind::Sjr:
                    if (!is_missing_marker(cell))
                        record.sjr_score = parse_real(cell, r + 1, c + 1, kSjr);
                    break;
                case ColumnKind::Indicator: {
                    if (is_missing_marker(cell)) break;
                    const double value = parse_real(cell, r + 1, c + 1, col.name);
                    if (is_count_indicator(col.name) && value < 0.0)
                        throw ParseError("negative count '" + cell + "' in column '" +
                                             col.name + "'",
                                         r + 1, c + 1);
                    record.indicators.emplace(col.name, value);
                    break;
                }
            }
        }
        dataset.records.push_back(std::move(record));
    }
    return dataset;
}

std::string write_table(const Dataset& dataset, char delimiter) {
    std::string out;
    for (std::size_t c = 0; c < dataset.columns.size(); ++c) {
        if (c) out.push_back(delimiter);
        out += quote_if_needed(dataset.columns[c], delimiter);
    }
    out.push_back('\n');
    for (const JournalRecord& record : dataset.records) {
        for (std::size_t c = 0; c < dataset.columns.size(); ++c) {
            if (c) out.push_back(delimiter);
            const std::string& name = dataset.columns[c];
            if (name == kTitle) {
                out += quote_if_needed(record.title, delimiter);
            } else if (name == kYear) {
                if (record.year) out += std::to_string(*record.year);
            } else if (name == kQuarter) {
                if (record.quarter) out += std::to_string(*record.quarter);
            } else if (name == kSjr) {
                if (record.sjr_score) out += format_double(*record.sjr_score);
            } else {
                if (const auto it = record.indicators.find(name); it != record.indicators.end())
                    out += format_double(it->second);
            }
        }
        out.push_back('\n');
    }
    return out;
}

std::map<int, double> quarter_probabilities(const Dataset& dataset) {
    if (dataset.records.empty())
        throw ContractViolationError("quarter_probabilities: empty dataset");
    std::map<int, double> counts = {{1, 0.0}, {2, 0.0}, {3, 0.0}, {4, 0.0}};
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const JournalRecord& record = dataset.records[i];
        if (!record.quarter) {
            const std::string who =
                record.title.empty() ? "record " + std::to_string(i + 1)
                                     : "record " + std::to_string(i + 1) + " ('" + record.title + "')";
            throw ContractViolationError("quarter_probabilities: " + who + " has no quarter");
        }
        counts[*record.quarter] += 1.0;
    }
    const double total = static_cast<double>(dataset.records.size());
    for (auto& [q, c] : counts) c /= total;
    return counts;
}

double missing_fraction(const Dataset& dataset, const std::string& feature) {
    if (dataset.records.empty())
        throw ContractViolationError("missing_fraction: empty dataset");
    std::size_t missing = 0;
    for (const JournalRecord& record : dataset.records) {
        bool present;
        if (feature == kQuarter) present = record.quarter.has_value();
        else if (feature == kSjr) present = record.sjr_score.has_value();
        else present = record.indicators.count(feature) > 0;
        if (!present) ++missing;
    }
    return static_cast<double>(missing) / static_cast<double>(dataset.records.size());
}

std::vector<std::string> sparsity_filter(const Dataset& dataset, double max_missing_fraction) {
    if (dataset.records.empty())
        throw ContractViolationError("sparsity_filter: empty dataset");
    if (max_missing_fraction < 0.0 || max_missing_fraction > 1.0)
        throw ContractViolationError("sparsity_filter: threshold must be in [0, 1]");

    // Indicator columns only, canonical indicators first in canonical order,
    // then any extra numeric columns in file order.
    std::vector<std::string> candidates;
    for (const std::string& name : canonical_indicators())
        if (std::find(dataset.columns.begin(), dataset.columns.end(), name) !=
            dataset.columns.end())
            candidates.push_back(name);
    for (const std::string& name : dataset.columns) {
        if (name == kTitle || name == kYear || name == kQuarter || name == kSjr) continue;
        if (std::find(candidates.begin(), candidates.end(), name) == candidates.end())
            candidates.push_back(name);
    }

    std::vector<std::string> retained;
    for (const std::string& name : candidates)
        if (missing_fraction(dataset, name) <= max_missing_fraction) retained.push_back(name);
    return retained;
}

BuildMatrixResult build_matrix(const Dataset& dataset,
                               const std::vector<std::string>& features,
                               const std::string& response) {
    if (features.empty())
        throw ContractViolationError("build_matrix: feature list is empty");
    if (response.empty())
        throw ContractViolationError("build_matrix: response column not named");
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i] == response)
            throw ContractViolationError("build_matrix: response '" + response +
                                         "' cannot also be a feature");
        for (std::size_t j = i + 1; j < features.size(); ++j)
            if (features[i] == features[j])
                throw ContractViolationError("build_matrix: duplicate feature '" + features[i] +
                                             "'");
    }

    auto lookup = [](const JournalRecord& record,
                     const std::string& name) -> std::optional<double> {
        if (name == kQuarter) {
            if (record.quarter) return static_cast<double>(*record.quarter);
            return std::nullopt;
        }
        if (name == kSjr) return record.sjr_score;
        if (const auto it = record.indicators.find(name); it != record.indicators.end())
            return it->second;
        return std::nullopt;
    };

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < dataset.records.size(); ++i) {
        const JournalRecord& record = dataset.records[i];
        bool complete = lookup(record, response).has_value();
        for (const std::string& f : features)
            complete = complete && lookup(record, f).has_value();
        if (complete) keep.push_back(i);
    }

    const std::size_t n = keep.size();
    const std::size_t p = features.size();
    if (n <= p + 1)
        throw InsufficientDataError(
            "insufficient observations: " + std::to_string(n) + " complete rows for " +
            std::to_string(p) + " features (need n > p + 1)");

    BuildMatrixResult result;
    result.dropped_rows = dataset.records.size() - n;
    result.matrix.feature_names = features;
    result.matrix.x = Matrix(n, p);
    result.matrix.y.resize(n);
    result.matrix.row_ids = keep;
    for (std::size_t r = 0; r < n; ++r) {
        const JournalRecord& record = dataset.records[keep[r]];
        for (std::size_t c = 0; c < p; ++c)
            result.matrix.x(r, c) = *lookup(record, features[c]);
        result.matrix.y[r] = *lookup(record, response);
    }
    result.matrix.validate();
    return result;
}

void FeatureMatrix::validate() const {
    const std::size_t rows = x.rows();
    if (feature_names.empty()) throw ContractViolationError("FeatureMatrix: no features");
    if (x.cols() != feature_names.size())
        throw ContractViolationError("FeatureMatrix: column count mismatch");
    if (y.size() != rows || row_ids.size() != rows)
        throw ContractViolationError("FeatureMatrix: row count mismatch");
    if (rows <= feature_names.size() + 1)
        throw InsufficientDataError("FeatureMatrix: need n > p + 1");
    for (std::size_t i = 0; i < rows; ++i) {
        if (!std::isfinite(y[i]))
            throw ContractViolationError("FeatureMatrix: non-finite response");
        for (std::size_t j = 0; j < x.cols(); ++j)
            if (!std::isfinite(x(i, j)))
                throw ContractViolationError("FeatureMatrix: non-finite cell");
        if (i > 0 && row_ids[i] <= row_ids[i - 1])
            throw ContractViolationError("FeatureMatrix: row_ids not strictly increasing");
    }
}

FeatureMatrix FeatureMatrix::select(const std::vector<std::string>& features) const {
    FeatureMatrix out;
    out.feature_names = features;
    out.y = y;
    out.row_ids = row_ids;
    out.x = Matrix(x.rows(), features.size());
    for (std::size_t c = 0; c < features.size(); ++c) {
        const auto it = std::find(feature_names.begin(), feature_names.end(), features[c]);
        if (it == feature_names.end()) throw MissingFeatureError(features[c]);
        const std::size_t src = static_cast<std::size_t>(it - feature_names.begin());
        for (std::size_t r = 0; r < x.rows(); ++r) out.x(r, c) = x(r, src);
    }
    return out;
}

}  // namespace dsrs
