#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace enstat {

enum class Unit { celsius, percent, watts_per_m2, mg_per_m3, km_per_h, kilowatt };
enum class Role { weather, generation, load };

struct Variable {
    std::string name;
    Unit unit;
    Role role;
};

/// Seconds since the Unix epoch, UTC.
using Timestamp = std::int64_t;

/// Parses ISO-8601 "YYYY-MM-DD[THH:MM[:SS]]"; 'T' may be a space, a trailing
/// 'Z' is accepted.
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

/// Immutable table of aligned, timestamped numeric columns. Timestamps are
/// strictly increasing; every column has exactly row_count() cells.
class Dataset {
public:
    using Column = std::vector<std::optional<double>>;

    Dataset(std::vector<Variable> schema, std::vector<Timestamp> timestamps,
            std::vector<Column> columns);

    /// The energy/weather schema used by the CLI and the bundled data:
    /// temperature_c, relative_humidity_pct, irradiance_wm2, dust_mgm3,
    /// wind_speed_kmh, pv_kw, load_kw.
    static const std::vector<Variable>& default_schema();

    std::size_t row_count() const { return timestamps_.size(); }
    const std::vector<Variable>& schema() const { return schema_; }
    const std::vector<Timestamp>& timestamps() const { return timestamps_; }

    bool has_variable(std::string_view name) const;
    const Variable& variable(std::string_view name) const;
    const Column& cells(std::string_view name) const;

    /// Column as plain doubles; throws ValidationError if any cell is
    /// missing (clean first).
    std::vector<double> values(std::string_view name) const;

    std::size_t missing_count() const;

private:
    std::size_t column_index(std::string_view name) const;

    std::vector<Variable> schema_;
    std::vector<Timestamp> timestamps_;
    std::vector<Column> columns_;  // schema order
    std::map<std::string, std::size_t, std::less<>> index_;
};

/// Closed admissibility interval per variable.
struct RangeSpec {
    struct Interval {
        double lo;
        double hi;
    };
    std::map<std::string, Interval> intervals;

    /// Wide physical brackets for the default schema (temperature -10..60 C,
    /// humidity 0..100 %, irradiance 0..1500 W/m2, dust 0..5 mg/m3, wind
    /// 0..150 km/h, PV 0..40 kW, load 0..80 kW).
    static RangeSpec defaults();

    const Interval& for_variable(std::string_view name) const;
};

struct RangeViolation {
    std::size_t row;
    std::string variable;
    double value;
};

struct OutlierRule {
    enum class Kind { none, tukey };
    Kind kind = Kind::tukey;
    double k = 1.5;  // fence multiplier when kind == tukey

    static OutlierRule none() { return {Kind::none, 0.0}; }
    static OutlierRule tukey(double k = 1.5) { return {Kind::tukey, k}; }
};

struct CleaningReport {
    struct VariableCounts {
        std::size_t missing_cells = 0;
        std::size_t out_of_range_cells = 0;
        std::size_t outlier_cells = 0;
    };

    std::size_t rows_in = 0;
    std::size_t rows_out = 0;
    std::size_t dropped_missing = 0;
    std::size_t dropped_out_of_range = 0;
    std::size_t dropped_outlier = 0;
    std::map<std::string, VariableCounts> per_variable;
    bool empty_result = false;
};

/// Conjunction of per-variable comparisons; a row passes when every
/// comparison holds. Missing cells fail every comparison.
struct Comparison {
    enum class Op { lt, le, gt, ge, eq, ne };
    std::string variable;
    Op op;
    double value;
};
using RowPredicate = std::vector<Comparison>;

/// Parses "var>value" (also >=, <, <=, ==, !=).
Comparison parse_comparison(std::string_view text);

/// Reads a CSV whose header names a timestamp column plus every schema
/// variable. Empty cells and non-numeric tokens become missing values; rows
/// are sorted by timestamp after parsing.
Dataset load_csv(std::istream& source, const std::vector<Variable>& schema);
Dataset load_csv_file(const std::filesystem::path& path, const std::vector<Variable>& schema);

/// Writes the schema header plus one row per timestamp. Numbers use the
/// shortest round-trip decimal form; missing cells are empty.
void save_csv(const Dataset& d, std::ostream& out);
void save_csv_file(const Dataset& d, const std::filesystem::path& path);

/// Cells strictly outside their [lo, hi] interval. Missing cells are not
/// violations.
std::vector<RangeViolation> validate_ranges(const Dataset& d, const RangeSpec& spec);

/// Drops, in order: rows with missing values, rows with out-of-range cells,
/// rows outside the Tukey fences computed per variable on the survivors.
std::pair<Dataset, CleaningReport> clean(const Dataset& d, const RangeSpec& spec,
                                         const OutlierRule& rule);

/// Rows satisfying all comparisons, original order preserved.
Dataset filter_rows(const Dataset& d, const RowPredicate& predicate);

}  // namespace enstat
