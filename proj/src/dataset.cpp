#include "enstat/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "enstat/descriptive.hpp"
#include "enstat/errors.hpp"

namespace enstat {

namespace {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + doe - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const auto era = static_cast<std::int64_t>((z >= 0 ? z : z - 146096) / 146097);
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

int days_in_month(int year, int month) {
    static constexpr int kDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
    return month == 2 && leap ? 29 : kDays[month - 1];
}

bool parse_fixed_uint(std::string_view s, std::size_t offset, std::size_t len, int& out) {
    if (offset + len > s.size()) return false;
    int value = 0;
    for (std::size_t i = 0; i < len; ++i) {
        const char c = s[offset + i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

std::optional<double> parse_cell(std::string_view token) {
    if (token.empty()) return std::nullopt;
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

bool compare(double cell, Comparison::Op op, double value) {
    switch (op) {
        case Comparison::Op::lt: return cell < value;
        case Comparison::Op::le: return cell <= value;
        case Comparison::Op::gt: return cell > value;
        case Comparison::Op::ge: return cell >= value;
        case Comparison::Op::eq: return cell == value;
        case Comparison::Op::ne: return cell != value;
    }
    return false;
}

Dataset take_rows(const Dataset& d, const std::vector<std::size_t>& rows) {
    std::vector<Timestamp> ts;
    ts.reserve(rows.size());
    for (std::size_t r : rows) ts.push_back(d.timestamps()[r]);

    std::vector<Dataset::Column> columns;
    columns.reserve(d.schema().size());
    for (const auto& var : d.schema()) {
        const auto& src = d.cells(var.name);
        Dataset::Column col;
        col.reserve(rows.size());
        for (std::size_t r : rows) col.push_back(src[r]);
        columns.push_back(std::move(col));
    }
    return Dataset(d.schema(), std::move(ts), std::move(columns));
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);

    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    const bool date_ok = parse_fixed_uint(text, 0, 4, year) && text.size() >= 10 &&
                         text[4] == '-' && parse_fixed_uint(text, 5, 2, month) &&
                         text[7] == '-' && parse_fixed_uint(text, 8, 2, day);
    if (!date_ok || month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) {
        throw ValidationError("invalid timestamp '" + std::string(text) + "'");
    }
    if (text.size() > 10) {
        const bool sep_ok = text[10] == 'T' || text[10] == ' ';
        const bool time_ok = sep_ok && parse_fixed_uint(text, 11, 2, hour) &&
                             text.size() >= 16 && text[13] == ':' &&
                             parse_fixed_uint(text, 14, 2, minute) &&
                             (text.size() == 16 ||
                              (text.size() == 19 && text[16] == ':' &&
                               parse_fixed_uint(text, 17, 2, second)));
        if (!time_ok || hour > 23 || minute > 59 || second > 60) {
            throw ValidationError("invalid timestamp '" + std::string(text) + "'");
        }
    }
    return days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day)) *
               86400 +
           hour * 3600 + minute * 60 + second;
}

std::string format_timestamp(Timestamp t) {
    std::int64_t days = t / 86400;
    std::int64_t rem = t % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y = 0;
    unsigned m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lld", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

Dataset::Dataset(std::vector<Variable> schema, std::vector<Timestamp> timestamps,
                 std::vector<Column> columns)
    : schema_(std::move(schema)), timestamps_(std::move(timestamps)), columns_(std::move(columns)) {
    if (columns_.size() != schema_.size()) {
        throw ValidationError("dataset: column count does not match schema");
    }
    for (std::size_t i = 0; i < schema_.size(); ++i) {
        if (columns_[i].size() != timestamps_.size()) {
            throw ValidationError("dataset: column '" + schema_[i].name +
                                  "' length does not match row count");
        }
        if (!index_.emplace(schema_[i].name, i).second) {
            throw SchemaError("duplicate variable name '" + schema_[i].name + "'");
        }
    }
    for (std::size_t r = 1; r < timestamps_.size(); ++r) {
        if (timestamps_[r] <= timestamps_[r - 1]) {
            throw ValidationError("duplicate or non-increasing timestamp at row " +
                                  std::to_string(r) + " (" + format_timestamp(timestamps_[r]) +
                                  ")");
        }
    }
}

const std::vector<Variable>& Dataset::default_schema() {
    static const std::vector<Variable> schema = {
        {"temperature_c", Unit::celsius, Role::weather},
        {"relative_humidity_pct", Unit::percent, Role::weather},
        {"irradiance_wm2", Unit::watts_per_m2, Role::weather},
        {"dust_mgm3", Unit::mg_per_m3, Role::weather},
        {"wind_speed_kmh", Unit::km_per_h, Role::weather},
        {"pv_kw", Unit::kilowatt, Role::generation},
        {"load_kw", Unit::kilowatt, Role::load},
    };
    return schema;
}

std::size_t Dataset::column_index(std::string_view name) const {
    const auto it = index_.find(name);
    if (it == index_.end()) {
        throw ValidationError("unknown variable '" + std::string(name) + "'");
    }
    return it->second;
}

bool Dataset::has_variable(std::string_view name) const {
    return index_.find(name) != index_.end();
}

const Variable& Dataset::variable(std::string_view name) const {
    return schema_[column_index(name)];
}

const Dataset::Column& Dataset::cells(std::string_view name) const {
    return columns_[column_index(name)];
}

std::vector<double> Dataset::values(std::string_view name) const {
    const auto& col = cells(name);
    std::vector<double> out;
    out.reserve(col.size());
    for (const auto& cell : col) {
        if (!cell) {
            throw ValidationError("variable '" + std::string(name) +
                                  "' contains missing values; clean the dataset first");
        }
        out.push_back(*cell);
    }
    return out;
}

std::size_t Dataset::missing_count() const {
    std::size_t count = 0;
    for (const auto& col : columns_) {
        for (const auto& cell : col) {
            if (!cell) ++count;
        }
    }
    return count;
}

RangeSpec RangeSpec::defaults() {
    RangeSpec spec;
    spec.intervals = {
        {"temperature_c", {-10.0, 60.0}},  {"relative_humidity_pct", {0.0, 100.0}},
        {"irradiance_wm2", {0.0, 1500.0}}, {"dust_mgm3", {0.0, 5.0}},
        {"wind_speed_kmh", {0.0, 150.0}},  {"pv_kw", {0.0, 40.0}},
        {"load_kw", {0.0, 80.0}},
    };
    return spec;
}

const RangeSpec::Interval& RangeSpec::for_variable(std::string_view name) const {
    const auto it = intervals.find(std::string(name));
    if (it == intervals.end()) {
        throw ValidationError("range spec does not cover variable '" + std::string(name) + "'");
    }
    if (it->second.lo > it->second.hi) {
        throw ValidationError("range spec for '" + std::string(name) + "' has lo > hi");
    }
    return it->second;
}

Comparison parse_comparison(std::string_view text) {
    static constexpr struct {
        std::string_view token;
        Comparison::Op op;
    } kOps[] = {
        {">=", Comparison::Op::ge}, {"<=", Comparison::Op::le}, {"==", Comparison::Op::eq},
        {"!=", Comparison::Op::ne}, {">", Comparison::Op::gt},  {"<", Comparison::Op::lt},
    };
    for (const auto& candidate : kOps) {
        const std::size_t pos = text.find(candidate.token);
        if (pos == std::string_view::npos || pos == 0) continue;
        Comparison c;
        c.variable = std::string(text.substr(0, pos));
        while (!c.variable.empty() && c.variable.back() == ' ') c.variable.pop_back();
        c.op = candidate.op;
        auto rhs = text.substr(pos + candidate.token.size());
        while (!rhs.empty() && rhs.front() == ' ') rhs.remove_prefix(1);
        const auto value = parse_cell(rhs);
        if (!value) {
            throw ValidationError("comparison '" + std::string(text) +
                                  "' has a non-numeric right-hand side");
        }
        c.value = *value;
        return c;
    }
    throw ValidationError("cannot parse comparison '" + std::string(text) +
                          "' (expected var>value, var>=value, ...)");
}

Dataset load_csv(std::istream& source, const std::vector<Variable>& schema) {
    std::string line;
    std::size_t line_no = 0;

    // Header
    if (!std::getline(source, line)) {
        throw ParseError("missing header row", 1);
    }
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto header = split_fields(line);
    std::vector<std::string> header_names(header.begin(), header.end());

    std::optional<std::size_t> ts_index;
    std::vector<std::optional<std::size_t>> var_to_field(schema.size());
    std::vector<bool> field_known(header_names.size(), false);
    for (std::size_t f = 0; f < header_names.size(); ++f) {
        if (header_names[f] == "timestamp") {
            if (ts_index) throw SchemaError("duplicate 'timestamp' column");
            ts_index = f;
            field_known[f] = true;
        }
    }
    if (!ts_index) throw SchemaError("header lacks required column 'timestamp'");
    for (std::size_t v = 0; v < schema.size(); ++v) {
        for (std::size_t f = 0; f < header_names.size(); ++f) {
            if (header_names[f] == schema[v].name) {
                if (var_to_field[v]) {
                    throw SchemaError("duplicate column '" + schema[v].name + "'");
                }
                var_to_field[v] = f;
                field_known[f] = true;
            }
        }
        if (!var_to_field[v]) {
            throw SchemaError("header lacks required column '" + schema[v].name + "'");
        }
    }
    for (std::size_t f = 0; f < header_names.size(); ++f) {
        if (!field_known[f]) {
            throw SchemaError("unknown column '" + header_names[f] + "'");
        }
    }

    std::vector<Timestamp> timestamps;
    std::vector<Dataset::Column> columns(schema.size());

    while (std::getline(source, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const auto fields = split_fields(line);
        if (fields.size() != header_names.size()) {
            throw ParseError("expected " + std::to_string(header_names.size()) +
                                 " fields, got " + std::to_string(fields.size()),
                             line_no);
        }
        try {
            timestamps.push_back(parse_timestamp(fields[*ts_index]));
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line_no);
        }
        for (std::size_t v = 0; v < schema.size(); ++v) {
            columns[v].push_back(parse_cell(fields[*var_to_field[v]]));
        }
    }

    // Stable sort by timestamp, preserving file order among equal keys so the
    // duplicate check reports the original conflict.
    std::vector<std::size_t> order(timestamps.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return timestamps[a] < timestamps[b]; });

    std::vector<Timestamp> sorted_ts;
    sorted_ts.reserve(timestamps.size());
    for (std::size_t r : order) sorted_ts.push_back(timestamps[r]);
    std::vector<Dataset::Column> sorted_columns(schema.size());
    for (std::size_t v = 0; v < schema.size(); ++v) {
        sorted_columns[v].reserve(order.size());
        for (std::size_t r : order) sorted_columns[v].push_back(columns[v][r]);
    }

    return Dataset(schema, std::move(sorted_ts), std::move(sorted_columns));
}

Dataset load_csv_file(const std::filesystem::path& path, const std::vector<Variable>& schema) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    return load_csv(in, schema);
}

void save_csv(const Dataset& d, std::ostream& out) {
    out << "timestamp";
    for (const auto& var : d.schema()) out << ',' << var.name;
    out << '\n';
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        out << format_timestamp(d.timestamps()[r]);
        for (const auto& var : d.schema()) {
            const auto& cell = d.cells(var.name)[r];
            out << ',';
            if (cell) out << format_double(*cell);
        }
        out << '\n';
    }
}

void save_csv_file(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    save_csv(d, out);
}

std::vector<RangeViolation> validate_ranges(const Dataset& d, const RangeSpec& spec) {
    std::vector<RangeViolation> violations;
    for (const auto& var : d.schema()) {
        const auto& interval = spec.for_variable(var.name);
        const auto& col = d.cells(var.name);
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (col[r] && (*col[r] < interval.lo || *col[r] > interval.hi)) {
                violations.push_back({r, var.name, *col[r]});
            }
        }
    }
    std::sort(violations.begin(), violations.end(),
              [](const RangeViolation& a, const RangeViolation& b) {
                  return a.row != b.row ? a.row < b.row : a.variable < b.variable;
              });
    return violations;
}

std::pair<Dataset, CleaningReport> clean(const Dataset& d, const RangeSpec& spec,
                                         const OutlierRule& rule) {
    if (rule.kind == OutlierRule::Kind::tukey && !(rule.k > 0.0)) {
        throw ValidationError("tukey outlier rule requires k > 0");
    }

    CleaningReport report;
    report.rows_in = d.row_count();
    for (const auto& var : d.schema()) report.per_variable[var.name];

    // Stage 1: listwise deletion of rows with missing cells.
    std::vector<std::size_t> survivors;
    survivors.reserve(d.row_count());
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        bool complete = true;
        for (const auto& var : d.schema()) {
            if (!d.cells(var.name)[r]) {
                ++report.per_variable[var.name].missing_cells;
                complete = false;
            }
        }
        if (complete) {
            survivors.push_back(r);
        } else {
            ++report.dropped_missing;
        }
    }

    // Stage 2: rows with any cell outside its admissibility interval.
    std::vector<std::size_t> in_range;
    in_range.reserve(survivors.size());
    for (std::size_t r : survivors) {
        bool ok = true;
        for (const auto& var : d.schema()) {
            const auto& interval = spec.for_variable(var.name);
            const double v = *d.cells(var.name)[r];
            if (v < interval.lo || v > interval.hi) {
                ++report.per_variable[var.name].out_of_range_cells;
                ok = false;
            }
        }
        if (ok) {
            in_range.push_back(r);
        } else {
            ++report.dropped_out_of_range;
        }
    }

    // Stage 3: Tukey fences per variable, computed on the surviving rows.
    std::vector<std::size_t> kept = in_range;
    if (rule.kind == OutlierRule::Kind::tukey && !in_range.empty()) {
        std::map<std::string, RangeSpec::Interval> fences;
        for (const auto& var : d.schema()) {
            std::vector<double> column_values;
            column_values.reserve(in_range.size());
            for (std::size_t r : in_range) column_values.push_back(*d.cells(var.name)[r]);
            const double q1 = quantile(column_values, 0.25);
            const double q3 = quantile(column_values, 0.75);
            const double iqr = q3 - q1;
            fences[var.name] = {q1 - rule.k * iqr, q3 + rule.k * iqr};
        }
        kept.clear();
        for (std::size_t r : in_range) {
            bool ok = true;
            for (const auto& var : d.schema()) {
                const auto& fence = fences[var.name];
                const double v = *d.cells(var.name)[r];
                if (v < fence.lo || v > fence.hi) {
                    ++report.per_variable[var.name].outlier_cells;
                    ok = false;
                }
            }
            if (ok) {
                kept.push_back(r);
            } else {
                ++report.dropped_outlier;
            }
        }
    }

    report.rows_out = kept.size();
    report.empty_result = kept.empty();
    return {take_rows(d, kept), report};
}

Dataset filter_rows(const Dataset& d, const RowPredicate& predicate) {
    for (const auto& c : predicate) {
        if (!d.has_variable(c.variable)) {
            throw ValidationError("unknown variable '" + c.variable + "' in row predicate");
        }
    }
    std::vector<std::size_t> kept;
    kept.reserve(d.row_count());
    for (std::size_t r = 0; r < d.row_count(); ++r) {
        bool ok = true;
        for (const auto& c : predicate) {
            const auto& cell = d.cells(c.variable)[r];
            if (!cell || !compare(*cell, c.op, c.value)) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(r);
    }
    return take_rows(d, kept);
}

}  // namespace enstat
